use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension of the underlying vector space, `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionTooSmall {
                found: n,
                required: 3,
                context: "Dimension",
            });
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Dimension of Λ², `n(n-1)/2`.
    #[inline]
    pub fn pairs(self) -> usize {
        self.0 * (self.0 - 1) / 2
    }

    /// Dimension of Λ³, `n(n-1)(n-2)/6`.
    #[inline]
    pub fn triples(self) -> usize {
        self.0 * (self.0 - 1) * (self.0 - 2) / 6
    }

    pub fn require_at_least(self, required: usize, context: &'static str) -> Result<()> {
        if self.0 < required {
            Err(Error::DimensionTooSmall {
                found: self.0,
                required,
                context,
            })
        } else {
            Ok(())
        }
    }

    pub fn require_exactly(self, required: usize, context: &'static str) -> Result<()> {
        if self.0 != required {
            Err(Error::WrongDimension {
                found: self.0,
                required,
                context,
            })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Position of the pair `(i, j)`, `i < j`, in the lexicographic basis of Λ².
#[inline]
pub fn pair_pos(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Position and orientation sign of an arbitrary ordered pair; `None` on the diagonal.
#[inline]
pub fn signed_pair(n: usize, i: usize, j: usize) -> Option<(usize, f64)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Some((pair_pos(n, i, j), 1.0)),
        std::cmp::Ordering::Greater => Some((pair_pos(n, j, i), -1.0)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Position of `(i, j, k)`, `i < j < k`, in the lexicographic basis of Λ³.
pub fn triple_pos(n: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k && k < n);
    // triples starting below i, then pairs (j,k) of {i+1..n-1} before (j,k)
    let before_i: usize = (0..i).map(|a| (n - a - 1) * (n - a - 2) / 2).sum();
    let m = n - i - 1;
    before_i + pair_pos(m, j - i - 1, k - i - 1)
}

/// Position and sign of an arbitrary ordered triple; `None` when indices repeat.
pub fn signed_triple(n: usize, i: usize, j: usize, k: usize) -> Option<(usize, f64)> {
    if i == j || j == k || i == k {
        return None;
    }
    let mut v = [i, j, k];
    let mut sign = 1.0;
    // three-element bubble sort tracking parity
    for (a, b) in [(0, 1), (1, 2), (0, 1)] {
        if v[a] > v[b] {
            v.swap(a, b);
            sign = -sign;
        }
    }
    Some((triple_pos(n, v[0], v[1], v[2]), sign))
}

/// Lexicographic basis bookkeeping for Λ² and Λ³.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFormIndexing {
    n: Dimension,
    pairs: Vec<(usize, usize)>,
    triples: Vec<(usize, usize, usize)>,
}

impl TwoFormIndexing {
    pub fn new(n: Dimension) -> Self {
        let m = n.get();
        let mut pairs = Vec::with_capacity(n.pairs());
        for i in 0..m {
            for j in i + 1..m {
                pairs.push((i, j));
            }
        }
        let mut triples = Vec::with_capacity(n.triples());
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    triples.push((i, j, k));
                }
            }
        }
        TwoFormIndexing { n, pairs, triples }
    }

    pub fn dim(&self) -> Dimension {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }

    pub fn pair(&self, pos: usize) -> (usize, usize) {
        self.pairs[pos]
    }

    pub fn position(&self, i: usize, j: usize) -> Option<(usize, f64)> {
        if i >= self.n.get() || j >= self.n.get() {
            return None;
        }
        signed_pair(self.n.get(), i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_dimensions() {
        assert!(Dimension::new(2).is_err());
        assert_eq!(Dimension::new(3).unwrap().pairs(), 3);
    }

    #[test]
    fn pair_round_trip() {
        for n in 3..10 {
            let idx = TwoFormIndexing::new(Dimension::new(n).unwrap());
            assert_eq!(idx.len(), n * (n - 1) / 2);
            for (p, &(i, j)) in idx.pairs().iter().enumerate() {
                assert_eq!(idx.position(i, j), Some((p, 1.0)));
                assert_eq!(idx.position(j, i), Some((p, -1.0)));
            }
            assert_eq!(idx.position(1, 1), None);
        }
    }

    #[test]
    fn triple_round_trip() {
        for n in 3..9 {
            let idx = TwoFormIndexing::new(Dimension::new(n).unwrap());
            for (p, &(i, j, k)) in idx.triples().iter().enumerate() {
                assert_eq!(triple_pos(n, i, j, k), p);
                assert_eq!(signed_triple(n, k, j, i), Some((p, -1.0)));
                assert_eq!(signed_triple(n, j, k, i), Some((p, 1.0)));
            }
        }
    }
}
