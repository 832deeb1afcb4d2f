//! Tags, ambiguity classes, and the class registry.
//!
//! An ambiguity class is the set of all tags a word form can bear; the
//! registry is the system-wide collection of admissible classes. Unknown-word
//! handling hinges on the registry containing a class that exactly matches a
//! suffix's tag set, so the registry also supports merging classes supplied
//! by a manual suffix table (the "mixed model").

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::guesser::{Provenance, SuffixTable};
use crate::lexicon::Lexicon;

/// An atomic category symbol, e.g. `NCFS` or `ADJGFS`.
///
/// Names never contain whitespace or underscores; the underscore is reserved
/// by the `token_TAG` output format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(String);

impl Tag {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidTag {
                name,
                reason: "empty",
            });
        }
        if name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidTag {
                name,
                reason: "contains whitespace",
            });
        }
        if name.contains('_') {
            return Err(Error::InvalidTag {
                name,
                reason: "contains underscore",
            });
        }
        Ok(Tag(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A canonically ordered, duplicate-free, non-empty set of tags.
///
/// Canonical order is lexicographic by tag name, so two classes compare equal
/// exactly when their tag sets are equal, independent of construction order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AmbiguityClass {
    tags: Vec<Tag>,
}

impl AmbiguityClass {
    /// Builds the canonical class for a tag sequence: sorted and deduplicated.
    pub fn new(tags: impl IntoIterator<Item = Tag>) -> Result<Self> {
        let mut tags: Vec<Tag> = tags.into_iter().collect();
        if tags.is_empty() {
            return Err(Error::EmptyClass);
        }
        tags.sort();
        tags.dedup();
        Ok(AmbiguityClass { tags })
    }

    pub fn singleton(tag: Tag) -> Self {
        AmbiguityClass { tags: vec![tag] }
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        false // size >= 1 by construction
    }

    pub fn contains(&self, tag: &Tag) -> bool {
        self.tags.binary_search(tag).is_ok()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.tags.binary_search_by(|t| t.name().cmp(name)).is_ok()
    }

    /// Tags shared with `other`, as a new class; `None` when disjoint.
    pub fn intersect(&self, other: &AmbiguityClass) -> Option<AmbiguityClass> {
        let tags: Vec<Tag> = self
            .tags
            .iter()
            .filter(|t| other.contains(t))
            .cloned()
            .collect();
        if tags.is_empty() {
            None
        } else {
            Some(AmbiguityClass { tags })
        }
    }
}

impl fmt::Display for AmbiguityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for tag in &self.tags {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(tag.name())?;
            first = false;
        }
        Ok(())
    }
}

/// The closed set of tags plus the configured open class.
#[derive(Debug, Clone)]
pub struct Tagset {
    tags: Vec<Tag>,
    index: HashMap<String, usize>,
    open_class: AmbiguityClass,
}

impl Tagset {
    /// Builds a tagset from declared tags and the open-class members.
    pub fn new(tags: Vec<Tag>, open_tags: Vec<Tag>) -> Result<Self> {
        if tags.is_empty() {
            return Err(Error::InvalidConfig("tagset is empty".into()));
        }
        let mut index = HashMap::with_capacity(tags.len());
        for (i, tag) in tags.iter().enumerate() {
            if index.insert(tag.name().to_string(), i).is_some() {
                return Err(Error::DuplicateTag {
                    name: tag.name().to_string(),
                });
            }
        }
        for tag in &open_tags {
            if !index.contains_key(tag.name()) {
                return Err(Error::UnknownTag {
                    name: tag.name().to_string(),
                });
            }
        }
        let open_class = AmbiguityClass::new(open_tags)?;
        Ok(Tagset {
            tags,
            index,
            open_class,
        })
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn open_class(&self) -> &AmbiguityClass {
        &self.open_class
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn tag(&self, name: &str) -> Result<Tag> {
        match self.index.get(name) {
            Some(&i) => Ok(self.tags[i].clone()),
            None => Err(Error::UnknownTag { name: name.into() }),
        }
    }

    /// Canonical class for a sequence of tag names, all of which must be
    /// declared in this tagset.
    pub fn make_class<I, S>(&self, names: I) -> Result<AmbiguityClass>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut tags = Vec::new();
        for name in names {
            tags.push(self.tag(name.as_ref())?);
        }
        AmbiguityClass::new(tags)
    }
}

/// Parses the tagset file format: one tag per line, `#` comments, and a
/// mandatory `OPEN: t1 t2 ...` line declaring the open class.
pub fn parse_tagset(text: &str) -> Result<Tagset> {
    let mut tags = Vec::new();
    let mut seen = BTreeSet::new();
    let mut open_names: Option<(usize, Vec<String>)> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("OPEN:") {
            if open_names.is_some() {
                return Err(Error::TagsetParse {
                    line: lineno + 1,
                    message: "multiple OPEN lines".into(),
                });
            }
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return Err(Error::TagsetParse {
                    line: lineno + 1,
                    message: "OPEN line declares no tags".into(),
                });
            }
            open_names = Some((lineno + 1, names));
            continue;
        }
        if line.split_whitespace().count() > 1 {
            return Err(Error::TagsetParse {
                line: lineno + 1,
                message: format!("expected a single tag per line, got {line:?}"),
            });
        }
        let tag = Tag::new(line).map_err(|e| Error::TagsetParse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(tag.name().to_string()) {
            return Err(Error::DuplicateTag {
                name: tag.name().to_string(),
            });
        }
        tags.push(tag);
    }

    if tags.is_empty() {
        return Err(Error::TagsetParse {
            line: 0,
            message: "no tags declared".into(),
        });
    }
    let (open_line, open_names) = open_names.ok_or(Error::TagsetParse {
        line: 0,
        message: "missing OPEN line".into(),
    })?;
    let mut open_tags = Vec::new();
    for name in &open_names {
        if !seen.contains(name) {
            return Err(Error::TagsetParse {
                line: open_line,
                message: format!("open-class tag {name:?} is not declared"),
            });
        }
        open_tags.push(Tag::new(name.clone())?);
    }
    Tagset::new(tags, open_tags)
}

/// The set of admissible ambiguity classes.
///
/// Built from a lexicon it contains (i) the singleton class of every tag
/// observed in the lexicon, (ii) every distinct class of a lexicon form,
/// and (iii) the open class. Lookup is by exact tag-set equality; there is
/// no subset matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRegistry {
    classes: BTreeSet<AmbiguityClass>,
    open_class: AmbiguityClass,
}

impl ClassRegistry {
    pub fn from_lexicon(lexicon: &Lexicon, tagset: &Tagset) -> ClassRegistry {
        let mut classes = BTreeSet::new();
        for (_, class) in lexicon.iter() {
            for tag in class.tags() {
                classes.insert(AmbiguityClass::singleton(tag.clone()));
            }
            classes.insert(class.clone());
        }
        classes.insert(tagset.open_class().clone());
        ClassRegistry {
            classes,
            open_class: tagset.open_class().clone(),
        }
    }

    /// Returns a new registry extended with every class assigned to a
    /// manual-provenance suffix. Learned entries are ignored: only classes
    /// stated by hand take part in the mixed model.
    pub fn merge_manual_classes(&self, suffixes: &SuffixTable) -> ClassRegistry {
        let mut merged = self.clone();
        for entry in suffixes.entries() {
            if entry.provenance == Provenance::Manual {
                merged.classes.insert(entry.class.clone());
            }
        }
        merged
    }

    pub fn insert(&mut self, class: AmbiguityClass) {
        self.classes.insert(class);
    }

    pub fn contains(&self, class: &AmbiguityClass) -> bool {
        self.classes.contains(class)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn open_class(&self) -> &AmbiguityClass {
        &self.open_class
    }

    /// Classes in canonical (sorted) order.
    pub fn iter(&self) -> impl Iterator<Item = &AmbiguityClass> {
        self.classes.iter()
    }

    /// One class per line in canonical order, preceded by an `OPEN:` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("OPEN: {}\n", self.open_class);
        for class in &self.classes {
            out.push_str(&class.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, tagset: &Tagset) -> Result<ClassRegistry> {
        let mut open_class = None;
        let mut classes = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("OPEN:") {
                open_class = Some(tagset.make_class(rest.split_whitespace())?);
                continue;
            }
            classes.insert(tagset.make_class(line.split_whitespace())?);
        }
        let open_class = open_class.ok_or(Error::TagsetParse {
            line: 0,
            message: "registry file missing OPEN header".into(),
        })?;
        classes.insert(open_class.clone());
        Ok(ClassRegistry {
            classes,
            open_class,
        })
    }
}
