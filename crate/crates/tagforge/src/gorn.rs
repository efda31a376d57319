//! Gorn addresses: integer paths that identify nodes inside a tree.
//!
//! The root is spelled `0` in text form; the i-th child of a node at `p`
//! is `p.i` with children counted from 1. A leading `0.` is optional on
//! input (`0.2.1` and `2.1` name the same node), and the canonical
//! rendering drops it.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, TagError};

/// Path from the root of a tree to one of its nodes. Empty path = root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GornAddress(Vec<u32>);

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn from_steps(steps: impl Into<Vec<u32>>) -> Self {
        let steps = steps.into();
        debug_assert!(steps.iter().all(|&s| s >= 1));
        GornAddress(steps)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// Address of this node's i-th child (1-based).
    ///
    /// Panics if `i` is zero; child indices start at 1.
    pub fn child(&self, i: u32) -> Self {
        assert!(i >= 1, "child indices start at 1");
        let mut steps = self.0.clone();
        steps.push(i);
        GornAddress(steps)
    }

    pub fn parent(&self) -> Result<Self> {
        if self.is_root() {
            return Err(TagError::RootHasNoParent);
        }
        Ok(GornAddress(self.0[..self.0.len() - 1].to_vec()))
    }

    /// True when `self` addresses an ancestor of (or equals) `other`.
    pub fn is_prefix_of(&self, other: &GornAddress) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Concatenate: the node at `suffix` inside the subtree rooted at `self`.
    pub fn join(&self, suffix: &GornAddress) -> Self {
        let mut steps = self.0.clone();
        steps.extend_from_slice(&suffix.0);
        GornAddress(steps)
    }

    /// Strip `prefix` from the front, if it is one.
    pub fn strip_prefix(&self, prefix: &GornAddress) -> Option<GornAddress> {
        if prefix.is_prefix_of(self) {
            Some(GornAddress(self.0[prefix.0.len()..].to_vec()))
        } else {
            None
        }
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for step in &self.0 {
            if !first {
                write!(f, ".")?;
            }
            write!(f, "{step}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for GornAddress {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| TagError::syntax(0, 0, format!("bad Gorn address '{s}': {msg}"));
        if s.is_empty() {
            return Err(bad("empty"));
        }
        if s == "0" {
            return Ok(GornAddress::root());
        }
        // A leading "0." spells out the root explicitly.
        let body = s.strip_prefix("0.").unwrap_or(s);
        let mut steps = Vec::new();
        for part in body.split('.') {
            let n: u32 = part
                .parse()
                .map_err(|_| bad("steps must be positive integers"))?;
            if n == 0 {
                return Err(bad("child steps start at 1"));
            }
            steps.push(n);
        }
        Ok(GornAddress(steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GornAddress {
        s.parse().unwrap()
    }

    #[test]
    fn root_renders_as_zero() {
        assert_eq!(GornAddress::root().to_string(), "0");
        assert!(g("0").is_root());
    }

    #[test]
    fn leading_zero_is_optional() {
        assert_eq!(g("0.2.1"), g("2.1"));
        assert_eq!(g("2.1").to_string(), "2.1");
    }

    #[test]
    fn child_appends() {
        assert_eq!(g("2").child(1), g("2.1"));
        assert_eq!(GornAddress::root().child(3), g("3"));
    }

    #[test]
    fn parent_drops_last_step() {
        assert_eq!(g("2.1").parent().unwrap(), g("2"));
        assert_eq!(g("1").parent().unwrap(), GornAddress::root());
        assert_eq!(GornAddress::root().parent(), Err(TagError::RootHasNoParent));
    }

    #[test]
    fn prefix_relation() {
        assert!(g("2").is_prefix_of(&g("2.1")));
        assert!(!g("1").is_prefix_of(&g("2.1")));
        assert!(GornAddress::root().is_prefix_of(&g("2.1")));
        assert!(g("2.1").is_prefix_of(&g("2.1")));
    }

    #[test]
    fn rejects_malformed() {
        assert!("".parse::<GornAddress>().is_err());
        assert!("1.0".parse::<GornAddress>().is_err());
        assert!("0.0".parse::<GornAddress>().is_err());
        assert!("a.b".parse::<GornAddress>().is_err());
    }

    #[test]
    fn join_and_strip() {
        assert_eq!(g("2").join(&g("1.3")), g("2.1.3"));
        assert_eq!(g("2.1.3").strip_prefix(&g("2")), Some(g("1.3")));
        assert_eq!(g("2.1").strip_prefix(&g("3")), None);
    }
}
