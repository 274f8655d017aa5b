//! Medical-entity extraction via a longest-match lexicon matcher, plus
//! corpus-level IDF importance weights for the extracted entities.
//!
//! The matcher stands behind the same interface a full clinical NER system
//! would use: downstream code only ever sees entity token sequences.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{tokenize, Corpus, Note};
use crate::error::{Error, Result};

/// Maximum entity length in tokens.
pub const MAX_ENTITY_TOKENS: usize = 6;

/// A set of entity surface forms, each 1..=6 lowercase tokens.
#[derive(Debug, Clone)]
pub struct EntityLexicon {
    entries: Vec<Vec<String>>,
    set: HashSet<Vec<String>>,
    max_len: usize,
}

impl EntityLexicon {
    /// Build from surface-form strings. Each is run through the corpus
    /// tokenizer; empty or over-long forms are rejected.
    pub fn new<S: AsRef<str>>(surface_forms: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut set = HashSet::new();
        for form in surface_forms {
            let tokens = tokenize(form.as_ref());
            if tokens.is_empty() {
                return Err(Error::Config(format!(
                    "lexicon entry {:?} tokenizes to no words",
                    form.as_ref()
                )));
            }
            if tokens.len() > MAX_ENTITY_TOKENS {
                return Err(Error::Config(format!(
                    "lexicon entry {:?} has more than {MAX_ENTITY_TOKENS} tokens",
                    form.as_ref()
                )));
            }
            set.insert(tokens);
        }
        let mut entries: Vec<Vec<String>> = set.iter().cloned().collect();
        entries.sort();
        let max_len = entries.iter().map(Vec::len).max().unwrap_or(0);
        Ok(EntityLexicon {
            entries,
            set,
            max_len,
        })
    }

    /// Load from a plain-text file, one surface form per line. Blank lines
    /// and `#` comments are skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        let mut forms = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            forms.push(trimmed.to_string());
        }
        Self::new(forms)
    }

    /// Entries in sorted order.
    pub fn entries(&self) -> &[Vec<String>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, tokens: &[String]) -> bool {
        self.set.contains(tokens)
    }

    /// A small built-in clinical vocabulary, enough to drive the synthetic
    /// generator and the CLI without an external lexicon file.
    pub fn builtin() -> Self {
        let terms = [
            "anemia",
            "aortic stenosis",
            "aspirin",
            "atrial fibrillation",
            "beta blocker",
            "bun",
            "chest pain",
            "chronic kidney disease",
            "chronic systolic heart failure",
            "clopidogrel",
            "copd",
            "coronary artery bypass grafting",
            "coronary artery disease",
            "creatinine",
            "diabetes mellitus",
            "dietary salt intake",
            "digoxin",
            "diuretic",
            "dyspnea",
            "edema",
            "ejection fraction",
            "furosemide",
            "heart failure",
            "hematocrit",
            "hemoglobin",
            "heparin",
            "hypertension",
            "hyperlipidemia",
            "hyponatremia",
            "insulin",
            "left ventricular hypertrophy",
            "lisinopril",
            "metoprolol",
            "mitral regurgitation",
            "myocardial infarction",
            "nitroglycerin",
            "orthopnea",
            "pacemaker",
            "pleural effusion",
            "pneumonia",
            "potassium",
            "pulmonary edema",
            "renal insufficiency",
            "shortness of breath",
            "sodium",
            "statin",
            "syncope",
            "tachycardia",
            "tobacco abuse",
            "troponin",
            "valve replacement",
            "vanco level",
            "warfarin",
            "atorvastatin",
            "bradycardia",
            "cardiomyopathy",
            "catheterization",
            "defibrillator",
            "echocardiogram",
            "electrocardiogram",
            "hypotension",
            "palpitations",
            "stent placement",
            "stress test",
        ];
        Self::new(terms).expect("builtin lexicon is valid")
    }
}

/// One entity occurrence inside a sentence. `token_span` is a half-open
/// range into the sentence's tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMention {
    pub entity: Vec<String>,
    pub sentence_index: usize,
    pub token_span: (usize, usize),
}

/// Greedy longest-match left-to-right extraction per sentence. Matches
/// never overlap within a sentence.
pub fn extract_entities(note: &Note, lexicon: &EntityLexicon) -> Vec<EntityMention> {
    let mut mentions = Vec::new();
    if lexicon.is_empty() {
        return mentions;
    }
    for sentence in &note.sentences {
        let tokens = &sentence.tokens;
        let n = tokens.len();
        let mut pos = 0usize;
        while pos < n {
            let longest = lexicon.max_len.min(n - pos);
            let mut matched = 0usize;
            for len in (1..=longest).rev() {
                if lexicon.set.contains(&tokens[pos..pos + len]) {
                    matched = len;
                    break;
                }
            }
            if matched > 0 {
                mentions.push(EntityMention {
                    entity: tokens[pos..pos + matched].to_vec(),
                    sentence_index: sentence.index,
                    token_span: (pos, pos + matched),
                });
                pos += matched;
            } else {
                pos += 1;
            }
        }
    }
    mentions
}

/// Distinct entities of a note, sorted. This is the entity set E(D).
pub fn entity_set(note: &Note, lexicon: &EntityLexicon) -> Vec<Vec<String>> {
    let mut set: Vec<Vec<String>> = extract_entities(note, lexicon)
        .into_iter()
        .map(|m| m.entity)
        .collect();
    set.sort();
    set.dedup();
    set
}

/// IDF importance weights over entities: ln(N / df) with df the number of
/// notes containing at least one mention. Entities never mentioned are
/// absent, so every stored df is >= 1 and every weight is finite.
#[derive(Debug, Clone)]
pub struct IdfTable {
    weights: HashMap<Vec<String>, f64>,
    note_count: usize,
}

impl IdfTable {
    pub fn weight(&self, entity: &[String]) -> Option<f64> {
        self.weights.get(entity).copied()
    }

    pub fn note_count(&self) -> usize {
        self.note_count
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Entities with their weights, sorted by entity for determinism.
    pub fn sorted_entries(&self) -> Vec<(Vec<String>, f64)> {
        let mut entries: Vec<(Vec<String>, f64)> = self
            .weights
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        entries.sort();
        entries
    }
}

/// Compute the IDF table over a whole corpus. The document unit is the note.
pub fn compute_idf(corpus: &Corpus, lexicon: &EntityLexicon) -> Result<IdfTable> {
    if corpus.is_empty() {
        return Err(Error::Config("cannot compute IDF over an empty corpus".into()));
    }
    let n = corpus.len();
    let mut df: HashMap<Vec<String>, usize> = HashMap::new();
    for note in corpus.notes() {
        for entity in entity_set(note, lexicon) {
            *df.entry(entity).or_insert(0) += 1;
        }
    }
    let weights = df
        .into_iter()
        .map(|(entity, count)| {
            debug_assert!(count >= 1 && count <= n);
            (entity, (n as f64 / count as f64).ln())
        })
        .collect();
    Ok(IdfTable {
        weights,
        note_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn note(sents: &[&str]) -> Note {
        let raw: Vec<String> = sents.iter().map(|s| s.to_string()).collect();
        Note::new(
            "p1",
            "n1",
            NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            &raw,
        )
        .unwrap()
    }

    fn lexicon(forms: &[&str]) -> EntityLexicon {
        EntityLexicon::new(forms.iter().copied()).unwrap()
    }

    #[test]
    fn longest_match_wins() {
        let lex = lexicon(&["heart failure", "chronic systolic heart failure"]);
        let n = note(&["chronic systolic heart failure"]);
        let mentions = extract_entities(&n, &lex);
        assert_eq!(mentions.len(), 1);
        assert_eq!(
            mentions[0].entity,
            vec!["chronic", "systolic", "heart", "failure"]
        );
        assert_eq!(mentions[0].token_span, (0, 4));
    }

    #[test]
    fn no_lexicon_tokens_no_mentions() {
        let lex = lexicon(&["hemoglobin"]);
        let n = note(&["patient resting comfortably today"]);
        assert!(extract_entities(&n, &lex).is_empty());
    }

    #[test]
    fn adjacent_entities_do_not_overlap() {
        let lex = lexicon(&["hemoglobin", "hematocrit"]);
        let n = note(&["hemoglobin and hematocrit"]);
        let mentions = extract_entities(&n, &lex);
        assert_eq!(mentions.len(), 2);
        assert_eq!(mentions[0].token_span, (0, 1));
        assert_eq!(mentions[1].token_span, (2, 3));
    }

    #[test]
    fn match_restarts_after_failed_prefix() {
        // "valve" alone is not an entry; matcher must still find the later one.
        let lex = lexicon(&["valve replacement"]);
        let n = note(&["valve disease then valve replacement done"]);
        let mentions = extract_entities(&n, &lex);
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].token_span, (3, 5));
    }

    #[test]
    fn lexicon_rejects_empty_and_overlong_entries() {
        assert!(EntityLexicon::new(["!!!"]).is_err());
        assert!(EntityLexicon::new(["a b c d e f g"]).is_err());
    }

    #[test]
    fn idf_matches_formula() {
        // 4 notes, entity in 2 of them -> ln 2.
        let notes = vec![
            note(&["hemoglobin low"]),
            note(&["hemoglobin stable"]),
            note(&["no labs drawn"]),
            note(&["no labs drawn again"]),
        ];
        let notes: Vec<Note> = notes
            .into_iter()
            .enumerate()
            .map(|(i, mut n)| {
                n.note_id = format!("n{i}");
                n
            })
            .collect();
        let corpus = Corpus::from_notes(notes).unwrap();
        let lex = lexicon(&["hemoglobin"]);
        let idf = compute_idf(&corpus, &lex).unwrap();
        let w = idf.weight(&["hemoglobin".to_string()]).unwrap();
        assert!((w - 2.0f64.ln()).abs() < 1e-12);
        assert!((w - 0.6931).abs() < 1e-4);
    }

    #[test]
    fn idf_zero_when_entity_in_every_note() {
        let notes = vec![
            {
                let mut n = note(&["aspirin given"]);
                n.note_id = "n0".into();
                n
            },
            {
                let mut n = note(&["aspirin held"]);
                n.note_id = "n1".into();
                n
            },
        ];
        let corpus = Corpus::from_notes(notes).unwrap();
        let idf = compute_idf(&corpus, &lexicon(&["aspirin"])).unwrap();
        assert_eq!(idf.weight(&["aspirin".to_string()]), Some(0.0));
    }

    #[test]
    fn idf_omits_unmentioned_entities() {
        let corpus = Corpus::from_notes(vec![note(&["plain words only"])]).unwrap();
        let idf = compute_idf(&corpus, &lexicon(&["hemoglobin"])).unwrap();
        assert_eq!(idf.weight(&["hemoglobin".to_string()]), None);
        assert!(idf.is_empty());
    }

    #[test]
    fn idf_rejects_empty_corpus() {
        let corpus = Corpus::from_notes(vec![]).unwrap();
        assert!(compute_idf(&corpus, &EntityLexicon::builtin()).is_err());
    }

    proptest! {
        #[test]
        fn prop_mentions_never_overlap(
            words in proptest::collection::vec("[ab]{1,2}", 1..20),
        ) {
            // Tiny alphabet makes collisions with the lexicon frequent.
            let lex = lexicon(&["a", "b a", "ab a", "b ab"]);
            let n = note(&[words.join(" ").as_str()]);
            let mentions = extract_entities(&n, &lex);
            for pair in mentions.windows(2) {
                if pair[0].sentence_index == pair[1].sentence_index {
                    prop_assert!(pair[0].token_span.1 <= pair[1].token_span.0);
                }
            }
            for m in &mentions {
                let s = &n.sentences[m.sentence_index];
                prop_assert!(m.token_span.1 <= s.tokens.len());
                prop_assert_eq!(&s.tokens[m.token_span.0..m.token_span.1], &m.entity[..]);
            }
        }

        #[test]
        fn prop_idf_is_permutation_invariant(seed in 0u64..500) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vocab = ["hemoglobin", "aspirin", "edema", "rest", "walk", "eat"];
            let mut notes = Vec::new();
            for k in 0..5 {
                let len = rng.random_range(2..6);
                let words: Vec<&str> = (0..len).map(|_| vocab[rng.random_range(0..vocab.len())]).collect();
                notes.push({
                    let mut n = note(&[words.join(" ").as_str()]);
                    n.note_id = format!("n{k}");
                    n
                });
            }
            let lex = lexicon(&["hemoglobin", "aspirin", "edema"]);
            let forward = compute_idf(&Corpus::from_notes(notes.clone()).unwrap(), &lex).unwrap();
            notes.reverse();
            let reversed = compute_idf(&Corpus::from_notes(notes).unwrap(), &lex).unwrap();
            prop_assert_eq!(forward.sorted_entries(), reversed.sorted_entries());
        }
    }
}
