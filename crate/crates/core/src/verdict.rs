//! Checker results.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::algebra::GradedPoly;

/// A labelled polynomial that should have vanished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub label: String,
    pub value: GradedPoly,
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Residual", 2)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("residual", &self.value.to_string())?;
        st.end()
    }
}

/// Pass iff there are no residuals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub residuals: Vec<Residual>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict::default()
    }

    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Record `value` under `label` unless it is zero.
    pub fn push(&mut self, label: impl Into<String>, value: GradedPoly) {
        if !value.is_zero() {
            self.residuals.push(Residual { label: label.into(), value });
        }
    }

    /// Merge another verdict, prefixing its labels.
    pub fn absorb(&mut self, prefix: &str, other: Verdict) {
        for r in other.residuals {
            let label = if prefix.is_empty() { r.label } else { format!("{prefix}/{}", r.label) };
            self.residuals.push(Residual { label, value: r.value });
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.residuals.iter().map(|r| r.label.as_str()).collect()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "PASS");
        }
        write!(f, "FAIL")?;
        for r in &self.residuals {
            write!(f, "\n  {}: {}", r.label, r.value)?;
        }
        Ok(())
    }
}
