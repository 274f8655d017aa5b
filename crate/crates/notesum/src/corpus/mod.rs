//! Corpus data model: timestamped, sentence-segmented notes grouped by
//! patient, plus ingestion from the JSON-lines corpus format and the
//! minimum-gap note pairing used to supervise pseudo-labels.

pub mod synth;

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default pairing threshold: "six months" measured as days.
pub const DEFAULT_MIN_GAP_DAYS: i64 = 183;

/// Lowercase, split on whitespace, strip leading/trailing non-alphanumeric
/// characters from each token, drop empties. Deterministic by construction.
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace()
        .map(|w| {
            w.to_lowercase()
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// One sentence of a note. `char_span` indexes into the note's raw text
/// (sentences joined by single spaces).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub raw: String,
    pub tokens: Vec<String>,
    pub char_span: (usize, usize),
}

impl Sentence {
    /// Word count |s_t|.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A timestamped clinical-style document for one patient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub note_id: String,
    pub patient_id: String,
    pub timestamp: NaiveDate,
    pub sentences: Vec<Sentence>,
}

impl Note {
    /// Build a note from raw sentence strings, tokenizing each one.
    pub fn new(
        patient_id: impl Into<String>,
        note_id: impl Into<String>,
        timestamp: NaiveDate,
        raw_sentences: &[String],
    ) -> Result<Self> {
        let patient_id = patient_id.into();
        let note_id = note_id.into();
        if raw_sentences.is_empty() {
            return Err(Error::Config(format!(
                "note {note_id:?} has no sentences"
            )));
        }
        let mut sentences = Vec::with_capacity(raw_sentences.len());
        let mut offset = 0usize;
        for (index, raw) in raw_sentences.iter().enumerate() {
            let tokens = tokenize(raw);
            if tokens.is_empty() {
                return Err(Error::Config(format!(
                    "sentence {index} of note {note_id:?} tokenizes to no words"
                )));
            }
            let span = (offset, offset + raw.len());
            offset = span.1 + 1; // joining space
            sentences.push(Sentence {
                index,
                raw: raw.clone(),
                tokens,
                char_span: span,
            });
        }
        Ok(Note {
            note_id,
            patient_id,
            timestamp,
            sentences,
        })
    }

    /// Total word count |D^i| summed over sentences.
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    /// Sentence word lengths in order.
    pub fn sentence_lengths(&self) -> Vec<usize> {
        self.sentences.iter().map(Sentence::len).collect()
    }

    /// Raw note text: sentences joined by single spaces.
    pub fn raw_text(&self) -> String {
        let parts: Vec<&str> = self.sentences.iter().map(|s| s.raw.as_str()).collect();
        parts.join(" ")
    }
}

/// All notes, grouped contiguously by patient and sorted ascending by
/// timestamp within a patient. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    notes: Vec<Note>,
}

impl Corpus {
    /// Validate, group by patient, and sort. Rejects duplicate
    /// (patient_id, note_id) keys.
    pub fn from_notes(mut notes: Vec<Note>) -> Result<Self> {
        let mut seen = HashSet::new();
        for note in &notes {
            if !seen.insert((note.patient_id.clone(), note.note_id.clone())) {
                return Err(Error::DuplicateNote {
                    patient_id: note.patient_id.clone(),
                    note_id: note.note_id.clone(),
                });
            }
        }
        // Stable sort keeps input order for equal timestamps.
        notes.sort_by(|a, b| {
            a.patient_id
                .cmp(&b.patient_id)
                .then(a.timestamp.cmp(&b.timestamp))
        });
        Ok(Corpus { notes })
    }

    pub fn notes(&self) -> &[Note] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.notes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.notes.is_empty()
    }

    pub fn note(&self, idx: usize) -> &Note {
        &self.notes[idx]
    }

    /// Look up a note by its id. Errors if the id is ambiguous across
    /// patients or absent.
    pub fn note_by_id(&self, note_id: &str) -> Result<&Note> {
        let mut found = None;
        for note in &self.notes {
            if note.note_id == note_id {
                if found.is_some() {
                    return Err(Error::Config(format!(
                        "note id {note_id:?} is ambiguous across patients"
                    )));
                }
                found = Some(note);
            }
        }
        found.ok_or_else(|| Error::MissingReference {
            note_id: note_id.to_string(),
        })
    }

    /// Contiguous index ranges per patient, in patient-id order.
    pub fn patient_ranges(&self) -> Vec<(String, std::ops::Range<usize>)> {
        let mut ranges = Vec::new();
        let mut start = 0usize;
        for i in 1..=self.notes.len() {
            if i == self.notes.len() || self.notes[i].patient_id != self.notes[start].patient_id {
                ranges.push((self.notes[start].patient_id.clone(), start..i));
                start = i;
            }
        }
        ranges
    }

    /// Longest note, in sentences.
    pub fn max_sentences(&self) -> usize {
        self.notes
            .iter()
            .map(|n| n.sentences.len())
            .max()
            .unwrap_or(0)
    }
}

/// One line of the corpus file.
#[derive(Debug, Serialize, Deserialize)]
struct NoteRecord {
    patient_id: String,
    note_id: String,
    date: String,
    sentences: Vec<String>,
}

/// Read a corpus from the JSON-lines format: one record per line with
/// `patient_id`, `note_id`, `date` (YYYY-MM-DD), and `sentences`.
pub fn ingest(path: impl AsRef<Path>) -> Result<Corpus> {
    let file = std::fs::File::open(path.as_ref())?;
    ingest_reader(BufReader::new(file))
}

pub fn ingest_reader(reader: impl BufRead) -> Result<Corpus> {
    let mut notes = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: NoteRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let date = NaiveDate::parse_from_str(&record.date, "%Y-%m-%d").map_err(|_| {
            Error::DateFormat {
                line: line_no,
                value: record.date.clone(),
            }
        })?;
        let note = Note::new(record.patient_id, record.note_id, date, &record.sentences)
            .map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
        notes.push(note);
    }
    Corpus::from_notes(notes)
}

/// Write a corpus back out in the line format. `ingest(serialize(c)) == c`
/// for every valid corpus.
pub fn serialize(corpus: &Corpus, mut writer: impl Write) -> Result<()> {
    for note in corpus.notes() {
        let record = NoteRecord {
            patient_id: note.patient_id.clone(),
            note_id: note.note_id.clone(),
            date: note.timestamp.format("%Y-%m-%d").to_string(),
            sentences: note.sentences.iter().map(|s| s.raw.clone()).collect(),
        };
        serde_json::to_writer(&mut writer, &record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn serialize_to_path(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    serialize(corpus, std::io::BufWriter::new(file))
}

/// An (earlier, later) note pair for one patient, separated by at least the
/// pairing threshold. Indices point into `Corpus::notes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotePair {
    pub patient_id: String,
    pub earlier: usize,
    pub later: usize,
    pub gap_days: i64,
}

/// All pairs (i, j), i < j within the same patient, whose timestamps differ
/// by at least `min_gap_days`. Deterministic order: patient, i, j ascending.
pub fn pair_notes(corpus: &Corpus, min_gap_days: i64) -> Vec<NotePair> {
    let mut pairs = Vec::new();
    for (patient_id, range) in corpus.patient_ranges() {
        for i in range.clone() {
            for j in (i + 1)..range.end {
                let gap = corpus.note(j)
                    .timestamp
                    .signed_duration_since(corpus.note(i).timestamp)
                    .num_days();
                if gap >= min_gap_days {
                    pairs.push(NotePair {
                        patient_id: patient_id.clone(),
                        earlier: i,
                        later: j,
                        gap_days: gap,
                    });
                }
            }
        }
    }
    pairs
}
