use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    Shape {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown parameter `{name}` for model {model}")]
    UnknownParameter { model: &'static str, name: String },

    #[error("both classes are required, found only label {present}")]
    SingleClass { present: u8 },

    #[error("class {class} has {count} rows, fewer than k = {k}")]
    TooFewRows { class: u8, count: usize, k: usize },

    #[error("unsupervised training received {count} fraud-labelled rows")]
    LabelLeak { count: usize },

    #[error("{model} diverged at epoch {epoch}: non-finite parameters")]
    Diverged { model: &'static str, epoch: usize },

    #[error("hyperparameter grid is empty")]
    EmptyGrid,

    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
