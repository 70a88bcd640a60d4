//! Kleene's three-valued logic.
//!
//! Values are ordered two ways. The *logical* order `0 ≤ ½ ≤ 1` drives the
//! connectives (conjunction is the minimum, disjunction the maximum). The
//! *information* order puts `½` above both definite values: `a ⊑ b` holds when
//! `a = b` or `b = ½`, read as "`b` carries no more information than `a`".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum TruthValue {
    #[serde(rename = "0")]
    False = 0,
    #[serde(rename = "1/2")]
    Maybe = 1,
    #[serde(rename = "1")]
    True = 2,
}

pub use TruthValue::{False, Maybe, True};

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [False, Maybe, True];

    pub fn from_bool(b: bool) -> Self {
        if b {
            True
        } else {
            False
        }
    }

    pub fn is_definite(self) -> bool {
        self != Maybe
    }

    /// Kleene conjunction: minimum under the logical order.
    pub fn and(self, other: Self) -> Self {
        self.min(other)
    }

    /// Kleene disjunction: maximum under the logical order.
    pub fn or(self, other: Self) -> Self {
        self.max(other)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            False => True,
            Maybe => Maybe,
            True => False,
        }
    }

    pub fn implies(self, other: Self) -> Self {
        self.not().or(other)
    }

    /// `self ⊑ other` in the information order.
    pub fn info_le(self, other: Self) -> bool {
        self == other || other == Maybe
    }

    /// `self ≤ other` in the logical order.
    pub fn logical_le(self, other: Self) -> bool {
        self == other || self == False || (self == Maybe && other == True)
    }

    /// Least upper bound in the information order.
    pub fn info_join(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            Maybe
        }
    }
}

impl std::ops::Not for TruthValue {
    type Output = TruthValue;

    fn not(self) -> TruthValue {
        TruthValue::not(self)
    }
}

impl std::ops::BitAnd for TruthValue {
    type Output = TruthValue;

    fn bitand(self, rhs: TruthValue) -> TruthValue {
        self.and(rhs)
    }
}

impl std::ops::BitOr for TruthValue {
    type Output = TruthValue;

    fn bitor(self, rhs: TruthValue) -> TruthValue {
        self.or(rhs)
    }
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        TruthValue::from_bool(b)
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            False => "0",
            Maybe => "1/2",
            True => "1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid truth value `{0}` (expected 0, 1/2 or 1)")]
pub struct ParseTruthValueError(pub String);

impl FromStr for TruthValue {
    type Err = ParseTruthValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "0" => Ok(False),
            "1/2" => Ok(Maybe),
            "1" => Ok(True),
            other => Err(ParseTruthValueError(other.to_string())),
        }
    }
}
