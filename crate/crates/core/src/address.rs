//! Addresses of vertices in the binary trees (Markov, Cohn and Farey trees
//! share one addressing scheme through the canonical isomorphism).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn as_char(self) -> char {
        match self {
            Side::L => 'L',
            Side::R => 'R',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A finite word over `{L, R}`; the empty word is the root.
///
/// Addresses order first by length and then lexicographically with `L < R`,
/// which is the breadth-first order every enumeration emits.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TreeAddress(Vec<Side>);

impl TreeAddress {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    pub fn child(&self, side: Side) -> Self {
        let mut word = Vec::with_capacity(self.0.len() + 1);
        word.extend_from_slice(&self.0);
        word.push(side);
        Self(word)
    }

    pub fn push(&mut self, side: Side) {
        self.0.push(side);
    }

    /// The address with its first letter removed (`None` at the root).
    pub fn strip_first(&self) -> Option<(Side, TreeAddress)> {
        let (first, rest) = self.0.split_first()?;
        Some((*first, Self(rest.to_vec())))
    }

    pub fn parent(&self) -> Option<(TreeAddress, Side)> {
        let (last, rest) = self.0.split_last()?;
        Some((Self(rest.to_vec()), *last))
    }
}

impl From<Vec<Side>> for TreeAddress {
    fn from(word: Vec<Side>) -> Self {
        Self(word)
    }
}

impl Ord for TreeAddress {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for TreeAddress {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for side in &self.0 {
            write!(f, "{}", side.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for TreeAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|ch| match ch {
                'L' | 'l' => Ok(Side::L),
                'R' | 'r' => Ok(Side::R),
                other => Err(Error::Parse(format!("invalid address letter {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl Serialize for TreeAddress {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeAddress {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Which of the three nested trees to walk.
///
/// For Markov triples these are WMT(k), MT(k) and LMT(k); for Cohn triples
/// the same selectors pick WGCT(k, l), GCT(k, l) and LGCT(k, l).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    /// The wide tree rooted at the `(1, 1, 1)` vertex.
    Wide,
    /// The subtree rooted at the left child of the wide root.
    Main,
    /// The subtree rooted at the left child of the main root.
    Left,
}

impl TreeKind {
    /// Address of this tree's root inside the wide tree.
    pub fn root_address(self) -> TreeAddress {
        match self {
            TreeKind::Wide => TreeAddress::root(),
            TreeKind::Main => TreeAddress(vec![Side::L]),
            TreeKind::Left => TreeAddress(vec![Side::L, Side::L]),
        }
    }
}
