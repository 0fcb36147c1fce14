//! Minimal CoNLL-U reader.
//!
//! Only the columns the feature analyses consume are kept: FORM (2), UPOS (4),
//! HEAD (7) and DEPREL (8). Multiword-token ranges (`1-2`) and empty nodes
//! (`1.1`) are skipped.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub upos: String,
    /// `None` when the column is `_`. Zero is the root.
    pub head: Option<usize>,
    pub deprel: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    /// Comment lines without the leading `#` and surrounding whitespace.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Value of a `# key = value` comment, if present.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
    }

    pub fn deprels(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.deprel.as_str())
    }

    pub fn upos_tags(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.upos.as_str())
    }
}

pub fn parse_conllu<R: Read>(reader: R) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut current = Sentence::default();
    let mut open = false;

    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if open {
                sentences.push(std::mem::take(&mut current));
                open = false;
            }
            continue;
        }
        open = true;
        if let Some(c) = line.strip_prefix('#') {
            current.comments.push(c.trim().to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                lineno,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad token id {:?}", cols[0])))?;
        let head = match cols[6] {
            "_" => None,
            h => Some(
                h.parse()
                    .map_err(|_| Error::parse(lineno, format!("bad head {h:?}")))?,
            ),
        };
        current.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: cols[7].to_string(),
        });
    }
    if open {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn load_conllu(path: impl AsRef<Path>) -> Result<Vec<Sentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(file)
}

/// Groups sentences into documents using `# newdoc id = ...` markers.
///
/// Sentences before the first marker form a document keyed by their own
/// `sent_id` (or their index). Files without any marker yield one document
/// per sentence.
pub fn group_documents(sentences: Vec<Sentence>) -> Vec<(String, Vec<Sentence>)> {
    let mut docs: Vec<(String, Vec<Sentence>)> = Vec::new();
    let mut in_doc = false;
    for (i, s) in sentences.into_iter().enumerate() {
        if let Some(id) = s.meta("newdoc id") {
            docs.push((id.to_string(), vec![s]));
            in_doc = true;
        } else if in_doc {
            docs.last_mut().expect("in_doc implies a document").1.push(s);
        } else {
            let id = s.meta("sent_id").map_or_else(|| i.to_string(), str::to_string);
            docs.push((id, vec![s]));
        }
    }
    docs
}
