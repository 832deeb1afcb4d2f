//! Symbol and transition biases applied at model initialization.

use crate::error::{Error, Result};
use crate::tagset::{AmbiguityClass, Tag, Tagset};

/// A lexical preference: within `class`, the `favored` tags have their
/// emission mass multiplied by `weight` (> 1) before renormalization.
#[derive(Debug, Clone)]
pub struct SymbolBias {
    pub class: AmbiguityClass,
    pub favored: Vec<Tag>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasDirection {
    Favored,
    Disfavored,
}

/// A prior on tag-to-tag transitions. Favored cells are multiplied by
/// `value` (> 1); disfavored cells are set to `value` (a small positive
/// constant), so they stay possible and training data can raise them again.
#[derive(Debug, Clone)]
pub struct TransitionBias {
    pub from: Tag,
    pub to: Vec<Tag>,
    pub direction: BiasDirection,
    pub value: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BiasSpec {
    pub symbol_biases: Vec<SymbolBias>,
    pub transition_biases: Vec<TransitionBias>,
}

/// Parses a biases file. Lines:
///
/// ```text
/// SYM class-tags | favored-tags | weight
/// TRANS from-tag | to-tags | favored|disfavored | value
/// ```
pub fn parse_biases(text: &str, tagset: &Tagset) -> Result<BiasSpec> {
    let mut spec = BiasSpec::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::BiasParse {
            line: lineno + 1,
            message,
        };
        if let Some(rest) = line.strip_prefix("SYM ") {
            let fields: Vec<&str> = rest.split('|').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(format!(
                    "expected `SYM class | favored | weight`, got {line:?}"
                )));
            }
            let class = tagset.make_class(fields[0].split_whitespace())?;
            let mut favored = Vec::new();
            for name in fields[1].split_whitespace() {
                favored.push(tagset.tag(name)?);
            }
            if favored.is_empty() {
                return Err(err("no favored tags".into()));
            }
            let weight: f64 = fields[2]
                .parse()
                .map_err(|_| err(format!("bad weight {:?}", fields[2])))?;
            spec.symbol_biases.push(SymbolBias {
                class,
                favored,
                weight,
            });
        } else if let Some(rest) = line.strip_prefix("TRANS ") {
            let fields: Vec<&str> = rest.split('|').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(err(format!(
                    "expected `TRANS from | to | favored|disfavored | value`, got {line:?}"
                )));
            }
            let from = tagset.tag(fields[0])?;
            let mut to = Vec::new();
            for name in fields[1].split_whitespace() {
                to.push(tagset.tag(name)?);
            }
            if to.is_empty() {
                return Err(err("no target tags".into()));
            }
            let direction = match fields[2] {
                "favored" => BiasDirection::Favored,
                "disfavored" => BiasDirection::Disfavored,
                other => return Err(err(format!("bad direction {other:?}"))),
            };
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| err(format!("bad value {:?}", fields[3])))?;
            spec.transition_biases.push(TransitionBias {
                from,
                to,
                direction,
                value,
            });
        } else {
            return Err(err(format!("unrecognized bias line {line:?}")));
        }
    }
    Ok(spec)
}
