//! Word form → ambiguity class lookup, the first stage after tokenization.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tagset::{AmbiguityClass, Tagset};

/// Maps case-normalized surface forms to their ambiguity classes.
///
/// Forms are stored lowercased; `lookup` tries the exact token text first and
/// falls back to its lowercase form, so sentence-initial capitalization does
/// not hide entries. Duplicate lines for a form union into a single class.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, AmbiguityClass>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts a form, unioning with any class already present for it.
    pub fn insert(&mut self, form: &str, class: AmbiguityClass) {
        let key = form.to_lowercase();
        match self.entries.remove(&key) {
            Some(existing) => {
                let union = AmbiguityClass::new(
                    existing.tags().iter().chain(class.tags()).cloned(),
                )
                .expect("union of two non-empty classes");
                self.entries.insert(key, union);
            }
            None => {
                self.entries.insert(key, class);
            }
        }
    }

    /// Class for a token, if its form is known. Never falls back to the open
    /// class; unknown words are the guesser's job.
    pub fn lookup(&self, token_text: &str) -> Option<&AmbiguityClass> {
        if let Some(class) = self.entries.get(token_text) {
            return Some(class);
        }
        let lower = token_text.to_lowercase();
        self.entries.get(&lower)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &AmbiguityClass)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Parses the lexicon file format: `form TAB tag1 tag2 ...` per line with
/// `#` comments. Duplicate form lines union into one class.
pub fn parse_lexicon(text: &str, tagset: &Tagset) -> Result<Lexicon> {
    let mut lexicon = Lexicon::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (form, tag_part) = line.split_once('\t').ok_or_else(|| Error::LexiconParse {
            line: lineno + 1,
            message: format!("expected `form\\ttag...`, got {line:?}"),
        })?;
        let form = form.trim();
        if form.is_empty() {
            return Err(Error::LexiconParse {
                line: lineno + 1,
                message: "empty form".into(),
            });
        }
        let names: Vec<&str> = tag_part.split_whitespace().collect();
        if names.is_empty() {
            return Err(Error::LexiconParse {
                line: lineno + 1,
                message: format!("form {form:?} has no tags"),
            });
        }
        let class = tagset.make_class(names).map_err(|e| match e {
            Error::UnknownTag { name } => Error::LexiconParse {
                line: lineno + 1,
                message: format!("unknown tag {name:?}"),
            },
            other => other,
        })?;
        lexicon.insert(form, class);
    }
    Ok(lexicon)
}
