//! Deterministic synthetic corpus generator.
//!
//! Real longitudinal note corpora are access-restricted, so tests and demos
//! run on generated ones. The generator plants the structure the pipeline
//! depends on: entities introduced in early notes are restated in later
//! notes, and the generator records every restatement so tests have ground
//! truth about which earlier-note sentences carry recurring information.
//!
//! Lexicon entries are split into a "chronic" pool (eligible for
//! restatement) and a "transient" pool (one-off mentions). Sentences built
//! from chronic entities are the ones a coverage-driven selector should
//! find; transient mentions act as distractors with high corpus IDF.

use chrono::NaiveDate;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Note};
use crate::entities::EntityLexicon;
use crate::error::{Error, Result};

/// Knobs for [`generate`]. `SynthConfig::new` fills in the built-in
/// vocabulary and lexicon plus defaults that make every consecutive note
/// pair qualify for pairing.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub patients: usize,
    pub notes_per_patient: usize,
    pub vocab: Vec<String>,
    pub lexicon: EntityLexicon,
    pub sentences_per_note: (usize, usize),
    pub words_per_sentence: (usize, usize),
    /// Probability that a sentence gets a freshly planted entity.
    pub plant_prob: f64,
    /// Probability that a previously introduced chronic entity is restated
    /// in each subsequent note.
    pub restate_prob: f64,
    /// Days between consecutive notes of one patient; > 183 so every
    /// consecutive pair qualifies.
    pub note_gap_days: i64,
}

impl SynthConfig {
    pub fn new(seed: u64, patients: usize, notes_per_patient: usize) -> Self {
        SynthConfig {
            seed,
            patients,
            notes_per_patient,
            vocab: default_vocab(),
            lexicon: EntityLexicon::builtin(),
            sentences_per_note: (6, 12),
            words_per_sentence: (5, 11),
            plant_prob: 0.3,
            restate_prob: 0.6,
            note_gap_days: 200,
        }
    }
}

/// One restatement event: `entity` was introduced in
/// (`source_note_id`, `source_sentence`) and repeated in
/// (`echo_note_id`, `echo_sentence`) of the same patient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantRecord {
    pub patient_id: String,
    pub entity: Vec<String>,
    pub source_note_id: String,
    pub source_sentence: usize,
    pub echo_note_id: String,
    pub echo_sentence: usize,
}

/// A generated corpus plus its planting ground truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub corpus: Corpus,
    pub planted: Vec<PlantRecord>,
}

/// Generate a corpus. Deterministic: the output is a pure function of the
/// config, byte for byte.
pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    if config.patients < 1 {
        return Err(Error::Config("patients must be >= 1".into()));
    }
    if config.notes_per_patient < 2 {
        return Err(Error::Config(
            "notes_per_patient must be >= 2 so notes can pair".into(),
        ));
    }
    if config.vocab.is_empty() {
        return Err(Error::Config("synthetic vocabulary is empty".into()));
    }
    if config.lexicon.is_empty() {
        return Err(Error::Config("synthetic lexicon is empty".into()));
    }
    let (lo_s, hi_s) = config.sentences_per_note;
    let (lo_w, hi_w) = config.words_per_sentence;
    if lo_s < 1 || lo_s > hi_s || lo_w < 1 || lo_w > hi_w {
        return Err(Error::Config("bad sentence/word count ranges".into()));
    }

    // Entries are sorted inside the lexicon, so this split is stable.
    let entries = config.lexicon.entries();
    let half = entries.len().div_ceil(2);
    let chronic: Vec<&Vec<String>> = entries[..half].iter().collect();
    let transient: Vec<&Vec<String>> = entries[half..].iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut notes = Vec::new();
    let mut planted = Vec::new();
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");

    for p in 0..config.patients {
        let patient_id = format!("p{p:03}");
        let start = epoch + chrono::Duration::days((p as i64) * 13);
        // Chronic entities introduced so far: (entity, note index, sentence).
        let mut introduced: Vec<(Vec<String>, usize, usize)> = Vec::new();

        for k in 0..config.notes_per_patient {
            let note_id = format!("{patient_id}-n{k}");
            let date = start + chrono::Duration::days(config.note_gap_days * k as i64);
            let n_sentences = rng.random_range(lo_s..=hi_s);
            let mut sentences: Vec<Vec<String>> = Vec::with_capacity(n_sentences);
            for _ in 0..n_sentences {
                let n_words = rng.random_range(lo_w..=hi_w);
                let words: Vec<String> = (0..n_words)
                    .map(|_| config.vocab[rng.random_range(0..config.vocab.len())].clone())
                    .collect();
                sentences.push(words);
            }

            // Fresh plants: chronic entities become candidates for later
            // restatement; transient ones are distractors.
            for s in 0..n_sentences {
                if rng.random_bool(config.plant_prob) {
                    let from_chronic = transient.is_empty() || rng.random_bool(0.6);
                    let entity = if from_chronic {
                        chronic[rng.random_range(0..chronic.len())].clone()
                    } else {
                        transient[rng.random_range(0..transient.len())].clone()
                    };
                    splice_entity(&mut sentences[s], &entity, &mut rng);
                    if from_chronic
                        && !introduced.iter().any(|(e, _, _)| e == &entity)
                    {
                        introduced.push((entity, k, s));
                    }
                }
            }

            // Restatements of earlier chronic entities.
            if k > 0 {
                let eligible: Vec<(Vec<String>, usize, usize)> = introduced
                    .iter()
                    .filter(|(_, intro_note, _)| *intro_note < k)
                    .cloned()
                    .collect();
                for (entity, intro_note, intro_sentence) in eligible {
                    if rng.random_bool(config.restate_prob) {
                        let s = rng.random_range(0..n_sentences);
                        splice_entity(&mut sentences[s], &entity, &mut rng);
                        planted.push(PlantRecord {
                            patient_id: patient_id.clone(),
                            entity,
                            source_note_id: format!("{patient_id}-n{intro_note}"),
                            source_sentence: intro_sentence,
                            echo_note_id: note_id.clone(),
                            echo_sentence: s,
                        });
                    }
                }
            }

            let raw: Vec<String> = sentences.iter().map(|w| w.join(" ")).collect();
            notes.push(Note::new(&patient_id, &note_id, date, &raw)?);
        }
    }

    Ok(SynthCorpus {
        corpus: Corpus::from_notes(notes)?,
        planted,
    })
}

/// Insert the entity's tokens as a contiguous run at a random position.
fn splice_entity(words: &mut Vec<String>, entity: &[String], rng: &mut ChaCha8Rng) {
    let at = rng.random_range(0..=words.len());
    for (i, tok) in entity.iter().enumerate() {
        words.insert(at + i, tok.clone());
    }
}

/// Filler vocabulary for generated notes: common clinical-narrative words,
/// none of which collide with the built-in lexicon entries.
pub fn default_vocab() -> Vec<String> {
    const WORDS: &[&str] = &[
        "patient", "admitted", "discharged", "stable", "improved", "worsened", "denies",
        "reports", "presents", "with", "without", "history", "of", "status", "post",
        "followup", "scheduled", "continue", "current", "medications", "reviewed", "daily",
        "twice", "morning", "evening", "bedtime", "tolerated", "well", "poorly", "mild",
        "moderate", "severe", "acute", "onset", "gradual", "sudden", "resolved", "ongoing",
        "persistent", "intermittent", "chronic", "new", "old", "prior", "recent", "remote",
        "left", "right", "bilateral", "upper", "lower", "extremity", "abdomen", "chest",
        "head", "neck", "back", "exam", "unremarkable", "notable", "for", "reveals",
        "auscultation", "clear", "lungs", "heart", "regular", "rate", "rhythm", "murmur",
        "appreciated", "soft", "nontender", "nondistended", "bowel", "sounds", "present",
        "alert", "oriented", "awake", "responsive", "ambulating", "assistance", "diet",
        "advanced", "tolerating", "restricted", "fluids", "encouraged", "monitor", "vitals",
        "temperature", "afebrile", "blood", "pressure", "controlled", "elevated", "low",
        "normal", "range", "labs", "drawn", "pending", "results", "within", "limits",
        "repeat", "tomorrow", "today", "yesterday", "overnight", "week", "month", "year",
        "plan", "assessment", "impression", "recommend", "consult", "placed", "ordered",
        "started", "stopped", "held", "increased", "decreased", "titrated", "dose",
        "adjusted", "renewed", "refilled", "home", "facility", "rehab", "clinic", "unit",
        "floor", "transferred", "observation", "course", "uncomplicated", "complicated",
        "by", "episode", "episodes", "no", "further", "events", "noted", "uneventful",
        "remained", "comfortable", "resting", "sleeping", "eating", "drinking", "voiding",
        "output", "adequate", "intake", "appetite", "good", "fair", "poor", "family",
        "updated", "aware", "agreeable", "questions", "answered", "education", "provided",
        "instructions", "given", "return", "precautions", "discussed", "follow", "primary",
        "care", "provider", "appointment", "arranged", "transportation", "confirmed",
        "wound", "healing", "incision", "intact", "dressing", "changed", "drainage",
        "minimal", "swelling", "redness", "tenderness", "palpation", "strength", "full",
        "sensation", "grossly", "gait", "steady", "unsteady", "fall", "risk", "assessed",
        "observed", "maintained", "therapy", "physical", "occupational", "speech",
        "evaluation", "completed", "progressing", "goals", "met", "continues", "work",
        "toward", "baseline", "function", "independence", "activities", "living",
    ];
    WORDS.iter().map(|w| w.to_string()).collect()
}
