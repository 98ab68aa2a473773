use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cascade::Vertex;
use crate::error::{Error, Result};

/// Largest level a character may involve (sums run over `2^{max F}` rectangles).
pub const CHARACTER_CAP: usize = 12;

/// The character `chi_F(s) = prod_{j in F} s_j` of the boundary group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    levels: BTreeSet<usize>,
}

impl Character {
    pub fn new(levels: impl IntoIterator<Item = usize>) -> Result<Self> {
        let levels: BTreeSet<usize> = levels.into_iter().collect();
        if levels.contains(&0) {
            return Err(Error::InvalidArgument("character levels start at 1".into()));
        }
        if let Some(&level) = levels.iter().next_back() {
            if level > CHARACTER_CAP {
                return Err(Error::CharacterCap {
                    level,
                    cap: CHARACTER_CAP,
                });
            }
        }
        Ok(Self { levels })
    }

    /// `F = {}`, whose expectation is always 1.
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().copied()
    }

    /// `max F`, or 0 for the trivial character.
    pub fn max_level(&self) -> usize {
        self.levels.iter().next_back().copied().unwrap_or(0)
    }

    /// `chi_F(v)`; `v` must be at least `max F` deep.
    pub fn value(&self, v: &Vertex) -> i8 {
        debug_assert!(v.depth() >= self.max_level());
        v.parity(self.levels())
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Character {
    type Err = Error;

    /// Comma-separated levels, optionally in braces: `1,2` or `{1,2}`; empty is trivial.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let levels = inner
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad character level {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Character::new(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_and_parsing() {
        let f: Character = "{1,3}".parse().unwrap();
        assert_eq!(f.max_level(), 3);
        assert_eq!(f.to_string(), "{1,3}");
        let v: Vertex = "+-+".parse().unwrap();
        assert_eq!(f.value(&v), 1);
        let v: Vertex = "-++".parse().unwrap();
        assert_eq!(f.value(&v), -1);
        assert_eq!(Character::trivial().value(&v), 1);
        assert_eq!("".parse::<Character>().unwrap(), Character::trivial());
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(Character::new([0]).is_err());
        assert_eq!(Character::new([13]), Err(Error::CharacterCap { level: 13, cap: 12 }));
        assert!("1,x".parse::<Character>().is_err());
    }
}
