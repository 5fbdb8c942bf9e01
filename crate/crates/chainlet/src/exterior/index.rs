use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A strictly increasing set of axis indices naming the basis k-direction `e_H`.
///
/// Indices are zero-based in the API; the JSON formats use one-based indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidIndex(format!("multi-index {indices:?} is not strictly increasing")));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidIndex(format!("index {last} out of range for dimension {n}")));
            }
        }
        Ok(MultiIndex(indices))
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        MultiIndex(indices)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// `{0, .., n-1}`, the direction of `vol`.
    pub fn full(n: usize) -> Self {
        MultiIndex((0..n).collect())
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn complement(&self, n: usize) -> MultiIndex {
        MultiIndex((0..n).filter(|i| !self.contains(*i)).collect())
    }

    /// Sign of the permutation `(H, Hᶜ)` of `0..n`.
    pub fn complement_sign(&self) -> f64 {
        let s: usize = self.0.iter().enumerate().map(|(pos, &h)| h - pos).sum();
        if s.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn without_position(&self, pos: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.remove(pos);
        MultiIndex(v)
    }

    /// Inserts `i`, returning the new index and the position it landed at.
    pub fn with_index(&self, i: usize) -> Option<(MultiIndex, usize)> {
        match self.0.binary_search(&i) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, i);
                Some((MultiIndex(v), pos))
            }
        }
    }

    /// Exterior product of basis directions: `e_H ∧ e_L = sign · e_{H∪L}`.
    pub fn wedge(&self, other: &MultiIndex) -> Option<(MultiIndex, f64)> {
        let mut merged = Vec::with_capacity(self.0.len() + other.0.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i] < other.0[j]) {
                merged.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || other.0[j] < self.0[i] {
                // other[j] passes the remaining entries of self
                inversions += self.0.len() - i;
                merged.push(other.0[j]);
                j += 1;
            } else {
                return None;
            }
        }
        let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((MultiIndex(merged), sign))
    }

    /// All multi-indices of grade `k` in dimension `n`, lexicographic.
    pub fn all(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                if n - i < k - cur.len() {
                    break;
                }
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(0, n, k, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "e")?;
        for i in &self.0 {
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// The list of translation directions `U` in `∇_U`, kept as a sorted multiset
/// because the derivative slots commute.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DerivKey(Vec<usize>);

impl DerivKey {
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidIndex(format!("derivative index {bad} out of range for dimension {n}")));
        }
        indices.sort_unstable();
        Ok(DerivKey(indices))
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] <= w[1]));
        DerivKey(indices)
    }

    pub fn empty() -> Self {
        DerivKey(Vec::new())
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn with_index(&self, i: usize) -> DerivKey {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= i);
        v.insert(pos, i);
        DerivKey(v)
    }

    /// Removes one copy of `i`, if present.
    pub fn without_index(&self, i: usize) -> Option<DerivKey> {
        let pos = self.0.iter().position(|&x| x == i)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(DerivKey(v))
    }

    pub fn merge(&self, other: &DerivKey) -> DerivKey {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        DerivKey(v)
    }

    /// Distinct indices in increasing order.
    pub fn distinct(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        v.dedup();
        v
    }

    /// `Π mᵢ!` over the multiplicities.
    pub fn multiplicity_factorial(&self) -> f64 {
        let mut out = 1.0;
        let mut run = 0usize;
        for (pos, &x) in self.0.iter().enumerate() {
            if pos > 0 && self.0[pos - 1] == x {
                run += 1;
            } else {
                run = 1;
            }
            out *= run as f64;
        }
        out
    }

    /// All multisets of size `j` drawn from `0..n`.
    pub fn all(n: usize, j: usize) -> Vec<DerivKey> {
        fn rec(start: usize, n: usize, j: usize, cur: &mut Vec<usize>, out: &mut Vec<DerivKey>) {
            if cur.len() == j {
                out.push(DerivKey(cur.clone()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i, n, j, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 || j == 0 {
            rec(0, n, j, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl Ord for DerivKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for DerivKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DerivKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.0 {
            write!(f, "∇{}", i + 1)?;
        }
        Ok(())
    }
}
