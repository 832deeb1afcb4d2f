//! Unknown-word handling via word-final character sequences.
//!
//! "Suffix" is meant in the wide sense: any set of ending characters, not a
//! linguistic morpheme. Tables come from two sources that share one file
//! format: manual tables written by a linguist, and learned tables computed
//! from an untagged corpus plus the lexicon. All suffix processing is
//! lowercase and operates on decoded characters, so byte length and case
//! never split an ending across table entries.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::tagset::{AmbiguityClass, ClassRegistry, Tag, Tagset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Manual,
    Learned,
}

/// Manual tables may flag entries that exist for verb+enclitic recognition
/// or for foreign words; those are counted apart from the general entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuffixCategory {
    General,
    Enclitic,
    Foreign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixEntry {
    pub suffix: String,
    pub class: AmbiguityClass,
    pub provenance: Provenance,
    pub category: SuffixCategory,
}

/// Suffix → ambiguity class map with longest-match lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuffixTable {
    entries: BTreeMap<String, SuffixEntry>,
    max_len: usize, // characters, not bytes
}

#[derive(Debug, Clone, Copy)]
pub struct GuesserConfig {
    /// Maximum length of a learned suffix, in characters.
    pub suffix_limit: usize,
    /// Minimum number of corpus token occurrences ending in a candidate
    /// suffix for it to be considered at all.
    pub min_support: usize,
}

impl Default for GuesserConfig {
    fn default() -> Self {
        GuesserConfig {
            suffix_limit: 5,
            min_support: 1,
        }
    }
}

impl GuesserConfig {
    pub fn validate(&self) -> Result<()> {
        if self.suffix_limit < 1 {
            return Err(Error::InvalidConfig("suffix limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Size and ambiguity metrics of a suffix table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuffixStats {
    pub num_suffixes: usize,
    pub max_suffix_len: usize,
    pub total_tags: usize,
    pub tags_per_suffix: f64,
    pub enclitic_suffixes: usize,
    pub foreign_suffixes: usize,
}

impl SuffixTable {
    pub fn new() -> Self {
        SuffixTable::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, suffix: &str) -> Option<&SuffixEntry> {
        self.entries.get(suffix)
    }

    /// Entries in sorted suffix order.
    pub fn entries(&self) -> impl Iterator<Item = &SuffixEntry> {
        self.entries.values()
    }

    pub fn insert(&mut self, entry: SuffixEntry) -> Result<()> {
        if entry.suffix.is_empty() || entry.suffix.chars().any(char::is_whitespace) {
            return Err(Error::InvalidConfig(format!(
                "invalid suffix {:?}",
                entry.suffix
            )));
        }
        if self.entries.contains_key(&entry.suffix) {
            return Err(Error::DuplicateSuffix {
                suffix: entry.suffix,
            });
        }
        self.max_len = self.max_len.max(entry.suffix.chars().count());
        self.entries.insert(entry.suffix.clone(), entry);
        Ok(())
    }

    /// Longest table suffix that ends the (lowercased) word, if any.
    pub fn longest_match(&self, word: &str) -> Option<&SuffixEntry> {
        let lower = word.to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        let upper = chars.len().min(self.max_len);
        for len in (1..=upper).rev() {
            let candidate: String = chars[chars.len() - len..].iter().collect();
            if let Some(entry) = self.entries.get(&candidate) {
                return Some(entry);
            }
        }
        None
    }

    /// Class for an unknown word: longest suffix match, else the open class.
    pub fn guess_class(&self, word: &str, tagset: &Tagset) -> AmbiguityClass {
        match self.longest_match(word) {
            Some(entry) => entry.class.clone(),
            None => tagset.open_class().clone(),
        }
    }

    /// Table-3-style metrics. Enclitic and foreign entries are counted apart
    /// and do not contribute to the four general metrics.
    pub fn stats(&self) -> SuffixStats {
        let mut num = 0usize;
        let mut max_len = 0usize;
        let mut total_tags = 0usize;
        let mut enclitic = 0usize;
        let mut foreign = 0usize;
        for entry in self.entries.values() {
            match entry.category {
                SuffixCategory::Enclitic => enclitic += 1,
                SuffixCategory::Foreign => foreign += 1,
                SuffixCategory::General => {
                    num += 1;
                    max_len = max_len.max(entry.suffix.chars().count());
                    total_tags += entry.class.len();
                }
            }
        }
        let ratio = if num > 0 {
            total_tags as f64 / num as f64
        } else {
            0.0
        };
        SuffixStats {
            num_suffixes: num,
            max_suffix_len: max_len,
            total_tags,
            tags_per_suffix: ratio,
            enclitic_suffixes: enclitic,
            foreign_suffixes: foreign,
        }
    }

    /// Serializes in the same format `parse_suffix_table` reads. Learned
    /// tables carry a `# learned` header; category changes are marked with
    /// `# section:` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let all_learned =
            !self.entries.is_empty() && self.entries().all(|e| e.provenance == Provenance::Learned);
        if all_learned {
            out.push_str("# learned\n");
        }
        let mut current = SuffixCategory::General;
        for section in [
            SuffixCategory::General,
            SuffixCategory::Enclitic,
            SuffixCategory::Foreign,
        ] {
            for entry in self.entries.values().filter(|e| e.category == section) {
                if entry.category != current {
                    let name = match entry.category {
                        SuffixCategory::General => "general",
                        SuffixCategory::Enclitic => "enclitic",
                        SuffixCategory::Foreign => "foreign",
                    };
                    out.push_str(&format!("# section: {name}\n"));
                    current = entry.category;
                }
                out.push_str(&format!("{}\t{}\n", entry.suffix, entry.class));
            }
        }
        out
    }
}

/// Parses a suffix file: `suffix TAB tag1 tag2 ...` per line. A leading
/// `# learned` comment marks every entry as learned; `# section: enclitic`
/// and `# section: foreign` switch the category of subsequent entries.
pub fn parse_suffix_table(text: &str, tagset: &Tagset) -> Result<SuffixTable> {
    let mut table = SuffixTable::new();
    let mut provenance = Provenance::Manual;
    let mut category = SuffixCategory::General;
    let mut saw_entry = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end();
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if comment == "learned" && !saw_entry {
                provenance = Provenance::Learned;
            } else if let Some(name) = comment.strip_prefix("section:") {
                category = match name.trim() {
                    "general" => SuffixCategory::General,
                    "enclitic" => SuffixCategory::Enclitic,
                    "foreign" => SuffixCategory::Foreign,
                    other => {
                        return Err(Error::SuffixParse {
                            line: lineno + 1,
                            message: format!("unknown section {other:?}"),
                        })
                    }
                };
            }
            continue;
        }
        let (suffix, tag_part) = line.split_once('\t').ok_or_else(|| Error::SuffixParse {
            line: lineno + 1,
            message: format!("expected `suffix\\ttag...`, got {line:?}"),
        })?;
        let suffix = suffix.trim().to_lowercase();
        if suffix.is_empty() {
            return Err(Error::SuffixParse {
                line: lineno + 1,
                message: "empty suffix".into(),
            });
        }
        let names: Vec<&str> = tag_part.split_whitespace().collect();
        if names.is_empty() {
            return Err(Error::SuffixParse {
                line: lineno + 1,
                message: format!("suffix {suffix:?} has no tags"),
            });
        }
        let class = tagset.make_class(names).map_err(|e| match e {
            Error::UnknownTag { name } => Error::SuffixParse {
                line: lineno + 1,
                message: format!("unknown tag {name:?}"),
            },
            other => other,
        })?;
        table.insert(SuffixEntry {
            suffix,
            class,
            provenance,
            category,
        })?;
        saw_entry = true;
    }
    Ok(table)
}

/// Parses a manual suffix table; all entries get manual provenance.
pub fn load_manual_suffixes(text: &str, tagset: &Tagset) -> Result<SuffixTable> {
    let table = parse_suffix_table(text, tagset)?;
    if table.entries().any(|e| e.provenance == Provenance::Learned) {
        return Err(Error::SuffixParse {
            line: 1,
            message: "expected a manual table, found a `# learned` header".into(),
        });
    }
    Ok(table)
}

/// Learns a suffix table from corpus word tokens and the lexicon.
///
/// Every word-final character sequence of length 1..=`suffix_limit` seen in
/// the corpus (lowercased, with at least `min_support` occurrences) is a
/// candidate. For candidate `s`, the tags of all lexicon forms ending in `s`
/// are unioned, then restricted to the open class. An empty remainder drops
/// the candidate; an exact match with a registry class assigns that class;
/// anything else falls back to the open class.
pub fn train_guesser<I, S>(
    corpus_tokens: I,
    lexicon: &Lexicon,
    registry: &ClassRegistry,
    config: &GuesserConfig,
) -> Result<SuffixTable>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    config.validate()?;
    let limit = config.suffix_limit;

    // Candidate suffixes with corpus occurrence counts.
    let mut support: HashMap<String, usize> = HashMap::new();
    for token in corpus_tokens {
        let lower = token.as_ref().to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        if chars.is_empty() {
            continue;
        }
        for len in 1..=chars.len().min(limit) {
            let suffix: String = chars[chars.len() - len..].iter().collect();
            *support.entry(suffix).or_insert(0) += 1;
        }
    }

    // Tag union per word ending across the lexicon, up to the same limit.
    let mut ending_tags: HashMap<String, Vec<Tag>> = HashMap::new();
    for (form, class) in lexicon.iter() {
        let chars: Vec<char> = form.chars().collect();
        for len in 1..=chars.len().min(limit) {
            let suffix: String = chars[chars.len() - len..].iter().collect();
            let tags = ending_tags.entry(suffix).or_default();
            for tag in class.tags() {
                if !tags.contains(tag) {
                    tags.push(tag.clone());
                }
            }
        }
    }

    let open = registry.open_class();
    let mut candidates: Vec<&String> = support
        .iter()
        .filter(|(_, &count)| count >= config.min_support)
        .map(|(suffix, _)| suffix)
        .collect();
    candidates.sort();

    let mut table = SuffixTable::new();
    for suffix in candidates {
        let Some(tags) = ending_tags.get(suffix) else {
            continue; // no lexicon form ends in this suffix
        };
        let observed = AmbiguityClass::new(tags.iter().cloned())?;
        let Some(restricted) = observed.intersect(open) else {
            continue; // nothing open-class about this ending
        };
        let class = if registry.contains(&restricted) {
            restricted
        } else {
            open.clone()
        };
        table.insert(SuffixEntry {
            suffix: suffix.clone(),
            class,
            provenance: Provenance::Learned,
            category: SuffixCategory::General,
        })?;
    }
    Ok(table)
}
