//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tag name {name:?}: {reason}")]
    InvalidTag { name: String, reason: &'static str },

    #[error("duplicate tag {name:?}")]
    DuplicateTag { name: String },

    #[error("unknown tag {name:?}")]
    UnknownTag { name: String },

    #[error("ambiguity class must contain at least one tag")]
    EmptyClass,

    #[error("tagset file, line {line}: {message}")]
    TagsetParse { line: usize, message: String },

    #[error("lexicon file, line {line}: {message}")]
    LexiconParse { line: usize, message: String },

    #[error("suffix file, line {line}: {message}")]
    SuffixParse { line: usize, message: String },

    #[error("duplicate suffix {suffix:?}")]
    DuplicateSuffix { suffix: String },

    #[error("biases file, line {line}: {message}")]
    BiasParse { line: usize, message: String },

    #[error("bias references class not in the registry: {class}")]
    UnknownBiasClass { class: String },

    #[error("postedit rules file, line {line}: {message}")]
    RuleParse { line: usize, message: String },

    #[error("tagged text, line {line}: {message}")]
    TaggedParse { line: usize, message: String },

    #[error("tag/token count mismatch: {tokens} tokens but {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },

    #[error("token mismatch at position {position}: system {system:?} vs gold {gold:?}")]
    Misaligned {
        position: usize,
        system: String,
        gold: String,
    },

    #[error("ambiguity class {class} is not part of the model")]
    UnknownClass { class: String },

    #[error("impossible sequence: no admissible path at position {position}")]
    ImpossibleSequence { position: usize },

    #[error("unsupported model format version {found:?}")]
    ModelVersion { found: String },

    #[error("corrupt model payload: {0}")]
    CorruptModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the decoding math itself rather than of input data.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ImpossibleSequence { .. } | Error::UnknownClass { .. }
        )
    }
}
