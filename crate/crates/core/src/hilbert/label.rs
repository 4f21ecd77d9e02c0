use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Separator between subsystem tokens in the canonical rendering of a label.
pub const SEPARATOR: char = ',';

/// A basis ket name made of one token per subsystem, e.g. `c,C,D` for the
/// photon in arm `c` with both detectors ready.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    parts: Vec<String>,
}

impl BasisLabel {
    pub fn new<I, S>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let parts: Vec<String> = parts.into_iter().map(Into::into).collect();
        if parts.is_empty() {
            return Err(Error::InvalidLabel(String::new()));
        }
        for part in &parts {
            validate_token(part).map_err(|_| Error::InvalidLabel(parts.join(",")))?;
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn part(&self, position: usize) -> Option<&str> {
        self.parts.get(position).map(String::as_str)
    }

    /// Copy of this label with the tokens at the given positions replaced.
    pub(crate) fn with_parts(&self, replacements: &[(usize, &str)]) -> BasisLabel {
        let mut parts = self.parts.clone();
        for &(pos, token) in replacements {
            parts[pos] = token.to_string();
        }
        BasisLabel { parts }
    }
}

pub(crate) fn validate_token(token: &str) -> Result<()> {
    if token.is_empty() || token.contains(SEPARATOR) || token.trim() != token {
        Err(Error::InvalidLabel(token.to_string()))
    } else {
        Ok(())
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, "{SEPARATOR}")?;
            }
            f.write_str(part)?;
        }
        Ok(())
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisLabel::new(s.split(SEPARATOR).map(str::trim))
            .map_err(|_| Error::InvalidLabel(s.to_string()))
    }
}

/// Anything that names a basis label: the label itself or its rendering.
pub trait IntoLabel {
    fn into_label(self) -> Result<BasisLabel>;
}

impl IntoLabel for BasisLabel {
    fn into_label(self) -> Result<BasisLabel> {
        Ok(self)
    }
}

impl IntoLabel for &BasisLabel {
    fn into_label(self) -> Result<BasisLabel> {
        Ok(self.clone())
    }
}

impl IntoLabel for &str {
    fn into_label(self) -> Result<BasisLabel> {
        self.parse()
    }
}

impl IntoLabel for String {
    fn into_label(self) -> Result<BasisLabel> {
        self.parse()
    }
}

impl IntoLabel for &String {
    fn into_label(self) -> Result<BasisLabel> {
        self.parse()
    }
}
