use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Outcome of labeling a page: it has an interstitial, it does not, or the
/// evidence falls between the two thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
    Unlabeled,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Yes => "yes",
            Label::No => "no",
            Label::Unlabeled => "unlabeled",
        }
    }

    /// `+1` for yes, `-1` for no.
    pub fn sign(self) -> Option<f64> {
        match self {
            Label::Yes => Some(1.0),
            Label::No => Some(-1.0),
            Label::Unlabeled => None,
        }
    }

    pub fn is_labeled(self) -> bool {
        self != Label::Unlabeled
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "yes" => Ok(Label::Yes),
            "no" => Ok(Label::No),
            "unlabeled" => Ok(Label::Unlabeled),
            other => Err(crate::Error::invalid(format!("unknown label {other:?}"))),
        }
    }
}
