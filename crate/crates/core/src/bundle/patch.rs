use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar, Scalar, MAX_VARS};

/// A coordinate chart; coordinate order fixes the monomial order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Patch {
    names: Vec<String>,
}

impl Patch {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Shape("a patch needs at least one coordinate".into()));
        }
        if names.len() > MAX_VARS {
            return Err(Error::Shape(format!("at most {MAX_VARS} coordinates are supported")));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::Shape(format!("invalid coordinate name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::Shape(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Patch { names })
    }

    /// `x, y, z` for dimensions up to three, `x1..xn` beyond.
    pub fn standard(dim: usize) -> Self {
        let names: Vec<String> = match dim {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            3 => vec!["x".into(), "y".into(), "z".into()],
            _ => (1..=dim).map(|i| format!("x{i}")).collect(),
        };
        Patch::new(names).expect("standard names are valid")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse(&self, text: &str) -> Result<Scalar> {
        parse_scalar(text, &self.names)
    }

    pub fn show(&self, f: &Scalar) -> String {
        f.to_text(&self.names)
    }

    pub fn show_all(&self, v: &[Scalar]) -> Vec<String> {
        v.iter().map(|f| self.show(f)).collect()
    }
}
