use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One step of a tree path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Plus,
    Minus,
}

impl Step {
    /// Canonical order: `+1` before `-1`.
    pub const BOTH: [Step; 2] = [Step::Plus, Step::Minus];

    pub fn value(self) -> i8 {
        match self {
            Step::Plus => 1,
            Step::Minus => -1,
        }
    }

    fn bit(self) -> u64 {
        match self {
            Step::Plus => 0,
            Step::Minus => 1,
        }
    }

    fn from_bit(bit: u64) -> Step {
        if bit == 0 {
            Step::Plus
        } else {
            Step::Minus
        }
    }
}

/// A finite tree path `v = (v_1, .., v_m)` with `v_i` in `{+1, -1}`.
///
/// Stored as `m` bits with `v_1` in the most significant position and
/// `+1 -> 0`, `-1 -> 1`, so [`Vertex::index`] enumerates the depth-`m`
/// vertices in canonical order (`+1` before `-1`, lexicographic in the steps).
/// The derived `Ord` sorts by depth, then canonical index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    depth: u8,
    bits: u64,
}

impl Vertex {
    pub const MAX_DEPTH: usize = 63;

    pub const fn root() -> Self {
        Vertex { depth: 0, bits: 0 }
    }

    pub fn from_steps(steps: &[i8]) -> Result<Self> {
        if steps.len() > Self::MAX_DEPTH {
            return Err(Error::InvalidArgument(format!(
                "vertex depth {} exceeds {}",
                steps.len(),
                Self::MAX_DEPTH
            )));
        }
        let mut v = Vertex::root();
        for &s in steps {
            let step = match s {
                1 => Step::Plus,
                -1 => Step::Minus,
                other => {
                    return Err(Error::InvalidArgument(format!("step must be +1 or -1, got {other}")))
                }
            };
            v = v.child(step);
        }
        Ok(v)
    }

    /// The `index`-th vertex of depth `depth` in canonical order.
    ///
    /// Panics if `depth > 63` or `index >= 2^depth`.
    pub fn from_index(depth: usize, index: u64) -> Self {
        assert!(depth <= Self::MAX_DEPTH, "depth {depth} too large");
        assert!(index >> depth == 0, "index {index} out of range for depth {depth}");
        Vertex {
            depth: depth as u8,
            bits: index,
        }
    }

    /// All vertices of the given depth in canonical order.
    pub fn level(depth: usize) -> impl Iterator<Item = Vertex> + Clone {
        assert!(depth <= 32, "refusing to enumerate 2^{depth} vertices");
        (0..1u64 << depth).map(move |i| Vertex::from_index(depth, i))
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    /// Position among the vertices of the same depth in canonical order.
    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Unique code over all depths: the index with a sentinel bit above it.
    pub(crate) fn code(&self) -> u64 {
        (1u64 << self.depth) | self.bits
    }

    /// Step `j`, counted from 1.
    pub fn step(&self, j: usize) -> Step {
        assert!(j >= 1 && j <= self.depth(), "step {j} out of range");
        Step::from_bit((self.bits >> (self.depth() - j)) & 1)
    }

    pub fn steps(&self) -> Vec<i8> {
        (1..=self.depth()).map(|j| self.step(j).value()).collect()
    }

    pub fn child(&self, step: Step) -> Vertex {
        assert!(self.depth() < Self::MAX_DEPTH, "vertex depth overflow");
        Vertex {
            depth: self.depth + 1,
            bits: (self.bits << 1) | step.bit(),
        }
    }

    pub fn children(&self) -> [Vertex; 2] {
        [self.child(Step::Plus), self.child(Step::Minus)]
    }

    /// Concatenation `self * tail`.
    pub fn concat(&self, tail: &Vertex) -> Vertex {
        let depth = self.depth() + tail.depth();
        assert!(depth <= Self::MAX_DEPTH, "vertex depth overflow");
        let bits = if tail.depth == 0 {
            self.bits
        } else {
            (self.bits << tail.depth) | tail.bits
        };
        Vertex {
            depth: depth as u8,
            bits,
        }
    }

    /// The restriction `v|k`.
    pub fn prefix(&self, k: usize) -> Vertex {
        assert!(k <= self.depth(), "prefix length {k} exceeds depth {}", self.depth);
        Vertex {
            depth: k as u8,
            bits: self.bits >> (self.depth() - k),
        }
    }

    pub fn parent(&self) -> Option<Vertex> {
        (self.depth > 0).then(|| self.prefix(self.depth() - 1))
    }

    /// Endpoint of the polygonal path, `sum_j v_j`.
    pub fn position(&self) -> i64 {
        self.depth as i64 - 2 * self.bits.count_ones() as i64
    }

    /// Character value `prod_{j in levels} v_j`; levels beyond the depth are ignored.
    pub(crate) fn parity(&self, levels: impl IntoIterator<Item = usize>) -> i8 {
        let mut sign = 1i8;
        for j in levels {
            if j >= 1 && j <= self.depth() {
                sign *= self.step(j).value();
            }
        }
        sign
    }
}

impl fmt::Display for Vertex {
    /// `+`/`-` string of the steps; the root is written `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("0");
        }
        for j in 1..=self.depth() {
            f.write_str(match self.step(j) {
                Step::Plus => "+",
                Step::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vertex({self})")
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "0" || s.is_empty() {
            return Ok(Vertex::root());
        }
        let steps = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidArgument(format!("invalid vertex character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Vertex::from_steps(&steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn root_and_children() {
        let root = Vertex::root();
        assert_eq!(root.depth(), 0);
        assert_eq!(root.to_string(), "0");
        let [plus, minus] = root.children();
        assert_eq!(plus.steps(), vec![1]);
        assert_eq!(minus.steps(), vec![-1]);
        assert!(plus < minus);
        assert_eq!(plus.parent(), Some(root));
        assert_eq!(root.parent(), None);
    }

    #[test]
    fn canonical_order_plus_first() {
        let names: Vec<String> = Vertex::level(2).map(|v| v.to_string()).collect();
        assert_eq!(names, ["++", "+-", "-+", "--"]);
    }

    #[test]
    fn parse_and_position() {
        let v: Vertex = "+--".parse().unwrap();
        assert_eq!(v.steps(), vec![1, -1, -1]);
        assert_eq!(v.position(), -1);
        assert_eq!(v.index(), 0b011);
        assert!("+x".parse::<Vertex>().is_err());
        assert!(Vertex::from_steps(&[1, 0]).is_err());
    }

    #[test]
    fn codes_unique_across_depths() {
        let mut codes = std::collections::HashSet::new();
        for d in 0..=6 {
            for v in Vertex::level(d) {
                assert!(codes.insert(v.code()));
            }
        }
    }

    proptest! {
        #[test]
        fn concat_prefix_round_trip(a in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..30),
                                    b in proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], 0..30)) {
            let va = Vertex::from_steps(&a).unwrap();
            let vb = Vertex::from_steps(&b).unwrap();
            let joined = va.concat(&vb);
            prop_assert_eq!(joined.depth(), a.len() + b.len());
            prop_assert_eq!(joined.prefix(a.len()), va);
            let mut all = a.clone();
            all.extend(&b);
            prop_assert_eq!(joined.steps(), all.clone());
            prop_assert_eq!(joined.to_string().parse::<Vertex>().unwrap(), joined);
            prop_assert_eq!(joined.position(), all.iter().map(|&s| s as i64).sum::<i64>());
        }
    }
}
