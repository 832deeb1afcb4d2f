//! Tokenization, sentence segmentation, tagged-output formatting, and
//! postediting.
//!
//! Two date shapes are recognized as single tokens: `dd.mm.yy` and
//! `yyyy-yyyy`. Sentences end at `.`, `!` or `?` followed by whitespace and a
//! capital letter (or end of input); a configurable abbreviation list keeps
//! `Sr.` and friends from splitting. Tagged text is `token_TAG` pairs
//! separated by spaces, one sentence per line; the tag follows the last
//! underscore, which is why tags may not contain one.

use crate::error::{Error, Result};
use crate::tagset::Tag;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Punctuation,
    Date,
    Multiword,
    Number,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    /// Character offset in the source text.
    pub position: usize,
}

impl Token {
    pub fn word(text: impl Into<String>, position: usize) -> Token {
        let text = text.into();
        let kind = classify_text(&text);
        Token {
            text,
            kind,
            position,
        }
    }
}

/// Infers a token kind from bare text, for callers that feed pre-tokenized
/// material (e.g. gold files) back through the tagging pipeline.
pub fn classify_text(text: &str) -> TokenKind {
    let mut chars = text.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if !c.is_alphanumeric() && c != '_' => return TokenKind::Punctuation,
        _ => {}
    }
    if is_date_text(text) {
        TokenKind::Date
    } else if text.contains('_') {
        TokenKind::Multiword
    } else if !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()) {
        TokenKind::Number
    } else {
        TokenKind::Word
    }
}

fn is_date_text(text: &str) -> bool {
    let chars: Vec<char> = text.chars().collect();
    matches_ddmmyy(&chars, 0) == Some(8) && chars.len() == 8
        || matches_year_range(&chars, 0) == Some(9) && chars.len() == 9
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

/// Sentence splitter and token scanner with a configurable abbreviation list.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    abbreviations: Vec<String>, // stored lowercase, without the trailing dot
}

impl Tokenizer {
    pub fn new() -> Self {
        Tokenizer::default()
    }

    /// Entries may be written with or without the trailing dot.
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let abbreviations = abbreviations
            .into_iter()
            .map(|a| {
                a.as_ref()
                    .trim()
                    .trim_end_matches('.')
                    .to_lowercase()
            })
            .filter(|a| !a.is_empty())
            .collect();
        Tokenizer { abbreviations }
    }

    fn is_abbreviation(&self, word: &str) -> bool {
        let lower = word.to_lowercase();
        self.abbreviations.iter().any(|a| *a == lower)
    }

    /// Splits text into sentences of word, number, date, multiword, and
    /// punctuation tokens. Total: every non-whitespace character lands in
    /// exactly one token.
    pub fn tokenize(&self, text: &str) -> Vec<Sentence> {
        let chars: Vec<char> = text.chars().collect();
        let mut sentences = Vec::new();
        let mut current: Vec<Token> = Vec::new();
        let mut i = 0;

        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }

            if let Some(len) = matches_ddmmyy(&chars, i).or_else(|| matches_year_range(&chars, i))
            {
                current.push(Token {
                    text: chars[i..i + len].iter().collect(),
                    kind: TokenKind::Date,
                    position: i,
                });
                i += len;
                continue;
            }

            if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                let mut text: String = chars[start..i].iter().collect();
                // Known abbreviations keep their dot so it cannot be read as
                // a sentence boundary.
                if i < chars.len() && chars[i] == '.' && self.is_abbreviation(&text) {
                    text.push('.');
                    i += 1;
                }
                let kind = classify_text(&text);
                current.push(Token {
                    text,
                    kind,
                    position: start,
                });
                continue;
            }

            // Any other character is a one-char punctuation token.
            current.push(Token {
                text: c.to_string(),
                kind: TokenKind::Punctuation,
                position: i,
            });
            i += 1;

            if matches!(c, '.' | '!' | '?') && sentence_breaks_after(&chars, i) {
                sentences.push(Sentence {
                    tokens: std::mem::take(&mut current),
                });
            }
        }

        if !current.is_empty() {
            sentences.push(Sentence { tokens: current });
        }
        sentences
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// `dd.mm.yy` at position `i`, not continuing into further digits.
fn matches_ddmmyy(chars: &[char], i: usize) -> Option<usize> {
    if i + 8 > chars.len() {
        return None;
    }
    let p = &chars[i..i + 8];
    let shape_ok = p[0].is_ascii_digit()
        && p[1].is_ascii_digit()
        && p[2] == '.'
        && p[3].is_ascii_digit()
        && p[4].is_ascii_digit()
        && p[5] == '.'
        && p[6].is_ascii_digit()
        && p[7].is_ascii_digit();
    if shape_ok && chars.get(i + 8).map_or(true, |c| !c.is_ascii_digit()) {
        Some(8)
    } else {
        None
    }
}

/// `yyyy-yyyy` at position `i`, not continuing into further digits.
fn matches_year_range(chars: &[char], i: usize) -> Option<usize> {
    if i + 9 > chars.len() {
        return None;
    }
    let p = &chars[i..i + 9];
    let shape_ok = p[0..4].iter().all(char::is_ascii_digit)
        && p[4] == '-'
        && p[5..9].iter().all(char::is_ascii_digit);
    if shape_ok && chars.get(i + 9).map_or(true, |c| !c.is_ascii_digit()) {
        Some(9)
    } else {
        None
    }
}

fn sentence_breaks_after(chars: &[char], i: usize) -> bool {
    let mut j = i;
    while j < chars.len() && chars[j].is_whitespace() {
        j += 1;
    }
    if j == chars.len() {
        return true; // end of input
    }
    j > i && chars[j].is_uppercase()
}

/// Replaces the internal spaces of every listed multi-word unit with `_`,
/// so later tokenization sees it as one token. Matching is case-insensitive
/// on word boundaries, longest unit first, leftmost, non-overlapping; each
/// whitespace run inside a match becomes a single underscore.
pub fn preprocess_multiwords<S: AsRef<str>>(text: &str, mwu_list: &[S]) -> String {
    // Units as lowercase word sequences, longest (by word count, then by
    // character length) first.
    let mut units: Vec<Vec<String>> = mwu_list
        .iter()
        .map(|u| {
            u.as_ref()
                .split_whitespace()
                .map(str::to_lowercase)
                .collect::<Vec<_>>()
        })
        .filter(|words| words.len() >= 2)
        .collect();
    units.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| b.concat().len().cmp(&a.concat().len()))
    });
    units.dedup();
    if units.is_empty() {
        return text.to_string();
    }

    let chars: Vec<char> = text.chars().collect();
    // Word runs as (start, end) char spans.
    let mut words: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if is_word_char(chars[i]) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            words.push((start, i));
        } else {
            i += 1;
        }
    }

    let word_text = |span: (usize, usize)| -> String {
        chars[span.0..span.1].iter().collect::<String>().to_lowercase()
    };
    let gap_is_whitespace = |a: (usize, usize), b: (usize, usize)| -> bool {
        chars[a.1..b.0].iter().all(|c| c.is_whitespace())
    };

    // Gaps to replace with "_", as (start, end) char spans.
    let mut joins: Vec<(usize, usize)> = Vec::new();
    let mut w = 0;
    'outer: while w < words.len() {
        for unit in &units {
            let k = unit.len();
            if w + k > words.len() {
                continue;
            }
            let matches = (0..k).all(|j| word_text(words[w + j]) == unit[j])
                && (0..k - 1).all(|j| gap_is_whitespace(words[w + j], words[w + j + 1]));
            if matches {
                for j in 0..k - 1 {
                    joins.push((words[w + j].1, words[w + j + 1].0));
                }
                w += k;
                continue 'outer;
            }
        }
        w += 1;
    }

    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for (start, end) in joins {
        out.extend(&chars[pos..start]);
        out.push('_');
        pos = end;
    }
    out.extend(&chars[pos..]);
    out
}

/// Renders one sentence as space-separated `token_TAG` pairs.
pub fn format_output(sentence: &Sentence, tags: &[Tag]) -> Result<String> {
    if sentence.tokens.len() != tags.len() {
        return Err(Error::LengthMismatch {
            tokens: sentence.tokens.len(),
            tags: tags.len(),
        });
    }
    let mut out = String::new();
    for (token, tag) in sentence.tokens.iter().zip(tags) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&token.text);
        out.push('_');
        out.push_str(tag.name());
    }
    Ok(out)
}

/// Parses `token_TAG` text back into (token, tag) pairs, one sentence per
/// line. The tag is everything after the last underscore.
pub fn parse_tagged(text: &str) -> Result<Vec<Vec<(String, String)>>> {
    let mut sentences = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut pairs = Vec::new();
        for item in line.split_whitespace() {
            let (token, tag) = item.rsplit_once('_').ok_or_else(|| Error::TaggedParse {
                line: lineno + 1,
                message: format!("no underscore in {item:?}"),
            })?;
            if token.is_empty() || tag.is_empty() {
                return Err(Error::TaggedParse {
                    line: lineno + 1,
                    message: format!("empty token or tag in {item:?}"),
                });
            }
            pairs.push((token.to_string(), tag.to_string()));
        }
        sentences.push(pairs);
    }
    Ok(sentences)
}

fn render_tagged(sentences: &[Vec<(String, String)>]) -> String {
    sentences
        .iter()
        .map(|pairs| {
            pairs
                .iter()
                .map(|(token, tag)| format!("{token}_{tag}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// One item of a postedit pattern: a tag to match, optionally constrained to
/// an exact token text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleItem {
    pub tag: String,
    pub text: Option<String>,
}

/// A flat pattern → replacement correction over tag sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteditRule {
    pub pattern: Vec<RuleItem>,
    pub replacement: Vec<String>,
}

/// Parses rules of the form `TAG TAG[text=de] -> TAG TAG`, one per line.
pub fn parse_postedit_rules(text: &str) -> Result<Vec<PosteditRule>> {
    let mut rules = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::RuleParse {
            line: lineno + 1,
            message: "missing `->`".into(),
        })?;
        let mut pattern = Vec::new();
        for item in lhs.split_whitespace() {
            if let Some((tag, rest)) = item.split_once('[') {
                let constraint = rest.strip_suffix(']').ok_or_else(|| Error::RuleParse {
                    line: lineno + 1,
                    message: format!("unterminated constraint in {item:?}"),
                })?;
                let text = constraint
                    .strip_prefix("text=")
                    .ok_or_else(|| Error::RuleParse {
                        line: lineno + 1,
                        message: format!("unknown constraint {constraint:?}"),
                    })?;
                pattern.push(RuleItem {
                    tag: tag.to_string(),
                    text: Some(text.to_string()),
                });
            } else {
                pattern.push(RuleItem {
                    tag: item.to_string(),
                    text: None,
                });
            }
        }
        let replacement: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
        if pattern.is_empty() || pattern.len() != replacement.len() {
            return Err(Error::RuleParse {
                line: lineno + 1,
                message: format!(
                    "pattern has {} items but replacement has {}",
                    pattern.len(),
                    replacement.len()
                ),
            });
        }
        rules.push(PosteditRule {
            pattern,
            replacement,
        });
    }
    Ok(rules)
}

/// Sets the tag of every sentence-final `.` to `full_stop_tag`, then applies
/// each rule left to right in a single non-overlapping pass.
pub fn postedit(tagged_text: &str, rules: &[PosteditRule], full_stop_tag: &Tag) -> Result<String> {
    let mut sentences = parse_tagged(tagged_text)?;
    for pairs in &mut sentences {
        if let Some(last) = pairs.last_mut() {
            if last.0 == "." {
                last.1 = full_stop_tag.name().to_string();
            }
        }
        for rule in rules {
            let k = rule.pattern.len();
            let mut i = 0;
            while i + k <= pairs.len() {
                let matched = rule.pattern.iter().enumerate().all(|(j, item)| {
                    pairs[i + j].1 == item.tag
                        && item.text.as_ref().map_or(true, |t| pairs[i + j].0 == *t)
                });
                if matched {
                    for (j, tag) in rule.replacement.iter().enumerate() {
                        pairs[i + j].1 = tag.clone();
                    }
                    i += k;
                } else {
                    i += 1;
                }
            }
        }
    }
    Ok(render_tagged(&sentences))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(sentences: &[Sentence]) -> Vec<Vec<String>> {
        sentences
            .iter()
            .map(|s| s.tokens.iter().map(|t| t.text.clone()).collect())
            .collect()
    }

    #[test]
    fn date_ddmmyy_is_one_token() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("Firmado el 12.05.93.");
        assert_eq!(
            texts(&sents),
            vec![vec!["Firmado", "el", "12.05.93", "."]]
        );
        assert_eq!(sents[0].tokens[2].kind, TokenKind::Date);
        assert_eq!(sents[0].tokens[3].kind, TokenKind::Punctuation);
    }

    #[test]
    fn date_year_range_is_one_token() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("el periodo 1990-1994 fue");
        let flat: Vec<&Token> = sents.iter().flat_map(|s| &s.tokens).collect();
        let date = flat.iter().find(|t| t.kind == TokenKind::Date).unwrap();
        assert_eq!(date.text, "1990-1994");
    }

    #[test]
    fn digit_continuation_blocks_date() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("12.05.935");
        let flat: Vec<&Token> = sents.iter().flat_map(|s| &s.tokens).collect();
        assert!(flat.iter().all(|t| t.kind != TokenKind::Date));
    }

    #[test]
    fn abbreviation_does_not_split_sentence() {
        let tok = Tokenizer::with_abbreviations(["Sr."]);
        let sents = tok.tokenize("Sr. García llegó.");
        assert_eq!(sents.len(), 1);
        assert_eq!(sents[0].tokens[0].text, "Sr.");
    }

    #[test]
    fn capital_after_terminator_splits() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("Hola mundo. Adiós ya.");
        assert_eq!(sents.len(), 2);
        assert_eq!(texts(&sents)[0], vec!["Hola", "mundo", "."]);
    }

    #[test]
    fn lowercase_after_terminator_does_not_split() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("el Sr. no vino. pero llegó Ana.");
        // "no" and "pero" are lowercase: only end-of-input closes a sentence
        // until ". " + capital appears; "Sr" splits nothing (no abbrev list,
        // but the next word is lowercase).
        assert_eq!(sents.len(), 1);
    }

    #[test]
    fn number_kind_detected() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("hay 42 cosas");
        assert_eq!(sents[0].tokens[1].kind, TokenKind::Number);
    }

    #[test]
    fn multiword_kind_detected() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("llegó sin_embargo hoy");
        assert_eq!(sents[0].tokens[1].kind, TokenKind::Multiword);
        assert_eq!(sents[0].tokens[1].text, "sin_embargo");
    }

    #[test]
    fn positions_are_char_offsets() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("año dos");
        assert_eq!(sents[0].tokens[0].position, 0);
        assert_eq!(sents[0].tokens[1].position, 4);
    }

    #[test]
    fn coverage_preserves_every_non_whitespace_char() {
        let tok = Tokenizer::new();
        let input = "Firmado, el 12.05.93; periodo 1990-1994 (sí)!";
        let sents = tok.tokenize(input);
        let joined: String = sents
            .iter()
            .flat_map(|s| &s.tokens)
            .map(|t| t.text.as_str())
            .collect();
        let reference: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(joined, reference);
    }

    #[test]
    fn mwu_replaces_spaces() {
        let out = preprocess_multiwords("llegó sin embargo hoy", &["sin embargo"]);
        assert_eq!(out, "llegó sin_embargo hoy");
    }

    #[test]
    fn mwu_without_match_is_identity() {
        let out = preprocess_multiwords("nada que ver", &["sin embargo"]);
        assert_eq!(out, "nada que ver");
    }

    #[test]
    fn mwu_longest_first() {
        let out = preprocess_multiwords("a pesar de todo", &["a pesar", "a pesar de"]);
        assert_eq!(out, "a_pesar_de todo");
    }

    #[test]
    fn mwu_case_insensitive_keeps_original_case() {
        let out = preprocess_multiwords("Sin embargo, vino", &["sin embargo"]);
        assert_eq!(out, "Sin_embargo, vino");
    }

    #[test]
    fn mwu_requires_word_boundaries() {
        let out = preprocess_multiwords("asin embargo", &["sin embargo"]);
        assert_eq!(out, "asin embargo");
    }

    #[test]
    fn format_basic_pair() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("la casa");
        let tags = vec![Tag::new("ART").unwrap(), Tag::new("NCFS").unwrap()];
        assert_eq!(format_output(&sents[0], &tags).unwrap(), "la_ART casa_NCFS");
    }

    #[test]
    fn format_single_punctuation() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize(".");
        let tags = vec![Tag::new("FS").unwrap()];
        assert_eq!(format_output(&sents[0], &tags).unwrap(), "._FS");
    }

    #[test]
    fn format_length_mismatch_is_error() {
        let tok = Tokenizer::new();
        let sents = tok.tokenize("la casa");
        let tags = vec![Tag::new("ART").unwrap()];
        assert!(matches!(
            format_output(&sents[0], &tags),
            Err(Error::LengthMismatch { tokens: 2, tags: 1 })
        ));
    }

    #[test]
    fn tagged_round_trip() {
        let line = "la_ART casa_NCFS sin_embargo_CC ._FS";
        let parsed = parse_tagged(line).unwrap();
        assert_eq!(parsed[0][2], ("sin_embargo".to_string(), "CC".to_string()));
        assert_eq!(render_tagged(&parsed), line);
    }

    #[test]
    fn parse_tagged_rejects_untagged_tokens() {
        assert!(parse_tagged("la_ART casa").is_err());
        assert!(parse_tagged("_ART").is_err());
        assert!(parse_tagged("la_").is_err());
    }

    #[test]
    fn postedit_fixes_final_full_stop() {
        let fs = Tag::new("FS").unwrap();
        let out = postedit("la_ART casa_NCFS ._XX", &[], &fs).unwrap();
        assert_eq!(out, "la_ART casa_NCFS ._FS");
    }

    #[test]
    fn postedit_without_rules_or_final_stop_is_identity() {
        let fs = Tag::new("FS").unwrap();
        let input = "la_ART casa_NCFS";
        assert_eq!(postedit(input, &[], &fs).unwrap(), input);
    }

    #[test]
    fn postedit_applies_transition_rule() {
        let fs = Tag::new("FS").unwrap();
        let rules = parse_postedit_rules("PREP VLPI3S -> PREP VLINF").unwrap();
        let out = postedit("de_PREP canta_VLPI3S", &rules, &fs).unwrap();
        assert_eq!(out, "de_PREP canta_VLINF");
    }

    #[test]
    fn postedit_text_constraint() {
        let fs = Tag::new("FS").unwrap();
        let rules = parse_postedit_rules("PREP[text=de] VLPI3S -> PREP VLINF").unwrap();
        let out = postedit("a_PREP canta_VLPI3S", &rules, &fs).unwrap();
        assert_eq!(out, "a_PREP canta_VLPI3S"); // constraint not met
        let out = postedit("de_PREP canta_VLPI3S", &rules, &fs).unwrap();
        assert_eq!(out, "de_PREP canta_VLINF");
    }

    #[test]
    fn postedit_is_idempotent() {
        let fs = Tag::new("FS").unwrap();
        let rules = parse_postedit_rules("PREP VLPI3S -> PREP VLINF").unwrap();
        let once = postedit("de_PREP canta_VLPI3S va_VLPI3S ._XX", &rules, &fs).unwrap();
        let twice = postedit(&once, &rules, &fs).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn rule_parser_rejects_length_mismatch() {
        assert!(parse_postedit_rules("PREP VLPI3S -> PREP").is_err());
        assert!(parse_postedit_rules("PREP").is_err());
    }
}
