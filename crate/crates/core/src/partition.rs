//! Ordinal-indexed partitions of the naturals.
//!
//! A partition of length `zeta >= 1` splits `w` into classes `U_eps`,
//! `eps < zeta`, each infinite, pairwise disjoint, with union all of `w` and
//! `0` in `U_0`.  Membership is decided by Cantor-unpairing: `n = pair(a, k)`
//! belongs to the class whose index `a` denotes — via [`segment_decode`] when
//! `zeta` is infinite, via `a mod zeta` when it is finite.  Since `0` unpairs
//! to `(0, 0)` and position `0` always decodes to the ordinal `0`, the
//! normalising transposition demanded by the construction is the identity.
//!
//! Strategies never enumerate a whole class; they draw from the canonical
//! *stream* of a class, the infinite subset `{ pair(a0, k) : k }` where `a0`
//! is the class's canonical position.  Streams of distinct classes are
//! disjoint by injectivity of the pairing.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::ordinal::{pair, segment_code, segment_decode, unpair, Ordinal};
use crate::{Error, Result};

/// A partition of the naturals into `length`-many infinite classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaPartition {
    length: Ordinal,
}

impl OmegaPartition {
    pub fn new(length: Ordinal) -> Result<OmegaPartition> {
        if length.is_zero() {
            return Err(Error::OutOfRange("a partition needs at least one class".into()));
        }
        Ok(OmegaPartition { length })
    }

    pub fn length(&self) -> &Ordinal {
        &self.length
    }

    fn check_class(&self, eps: &Ordinal) -> Result<()> {
        if *eps >= self.length {
            return Err(Error::OutOfRange(format!(
                "class {eps} is not below the partition length {}",
                self.length
            )));
        }
        Ok(())
    }

    /// The unique class containing `n`.
    pub fn classify(&self, n: u64) -> Result<Ordinal> {
        let (a, _) = unpair(n);
        match self.length.as_nat() {
            Some(z) => Ok(Ordinal::from_nat(a % z)),
            None => segment_decode(&self.length, a),
        }
    }

    /// Characteristic test of `U_eps`.
    pub fn member(&self, eps: &Ordinal, n: u64) -> Result<bool> {
        self.check_class(eps)?;
        Ok(self.classify(n)? == *eps)
    }

    /// Canonical position of class `eps` among the unpaired first components.
    pub fn stream_index(&self, eps: &Ordinal) -> Result<u64> {
        self.check_class(eps)?;
        match self.length.as_nat() {
            Some(_) => Ok(eps.as_nat().expect("class below a finite length is finite")),
            None => segment_code(&self.length, eps),
        }
    }

    /// The `k`-th element of the canonical stream of `U_eps`, an infinite
    /// subset of the class; strictly increasing in `k`.
    pub fn stream_element(&self, eps: &Ordinal, k: u64) -> Result<u64> {
        pair(self.stream_index(eps)?, k)
    }

    /// The first `count` elements of `U_eps` in increasing order.
    pub fn enumerate(&self, eps: &Ordinal, count: usize) -> Result<Vec<u64>> {
        self.check_class(eps)?;
        match self.length.as_nat() {
            None => {
                let a = self.stream_index(eps)?;
                (0..count as u64).map(|k| pair(a, k)).collect()
            }
            Some(z) => {
                // the class is the union of the streams a, a+z, a+2z, ...;
                // lazily merge them since stream heads increase with a
                let base = eps.as_nat().expect("finite class index");
                let mut heap: BinaryHeap<Reverse<(u64, u64, u64)>> = BinaryHeap::new();
                let mut next_stream = base;
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    loop {
                        let head = pair(next_stream, 0)?;
                        if heap.peek().is_some_and(|&Reverse((v, _, _))| head > v) {
                            break;
                        }
                        heap.push(Reverse((head, next_stream, 0)));
                        next_stream = next_stream.checked_add(z).ok_or(Error::Overflow)?;
                    }
                    let Reverse((v, a, k)) = heap.pop().expect("heap was just fed");
                    out.push(v);
                    heap.push(Reverse((pair(a, k + 1)?, a, k + 1)));
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn zero_is_in_class_zero() {
        for len in ["w^0*1", "w^0*3", "w^1*1", "w^1*2", "w^2*1"] {
            let p = OmegaPartition::new(ord(len)).unwrap();
            assert!(p.member(&Ordinal::zero(), 0).unwrap(), "0 must lie in U_0 for length {len}");
        }
    }

    #[test]
    fn classes_partition_small_naturals() {
        // brute force: each n < 64 belongs to exactly the class it decodes to
        let p = OmegaPartition::new(ord("w^1*2")).unwrap();
        for n in 0..64u64 {
            let eps = p.classify(n).unwrap();
            assert!(p.member(&eps, n).unwrap());
            // and to no other sampled class
            for m in 0..16u64 {
                for half in 0..2u64 {
                    let other = Ordinal::term(1, half).add(&Ordinal::from_nat(m));
                    if other != eps {
                        assert!(!p.member(&other, n).unwrap(), "n={n} in two classes");
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_successor_class() {
        // U_w for length w+1 is inhabited, increasing, distinct
        let p = OmegaPartition::new(ord("w^1*1+w^0*1")).unwrap();
        let xs = p.enumerate(&ord("w^1*1"), 3).unwrap();
        assert_eq!(xs.len(), 3);
        assert!(xs[0] < xs[1] && xs[1] < xs[2]);
        for &x in &xs {
            assert!(p.member(&ord("w^1*1"), x).unwrap());
        }
    }

    #[test]
    fn enumerate_finite_length_merges_streams() {
        let p = OmegaPartition::new(ord("w^0*3")).unwrap();
        let xs = p.enumerate(&Ordinal::from_nat(1), 50).unwrap();
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
        for &x in &xs {
            assert_eq!(p.classify(x).unwrap(), Ordinal::from_nat(1));
        }
        // and the enumeration misses nothing: scan confirms
        let bound = *xs.last().unwrap();
        let scanned: Vec<u64> =
            (0..=bound).filter(|&n| p.classify(n).unwrap() == Ordinal::from_nat(1)).collect();
        assert_eq!(scanned, xs);
    }

    #[test]
    fn class_bound_checked() {
        let p = OmegaPartition::new(ord("w^1*1")).unwrap();
        assert!(p.member(&ord("w^1*1"), 0).is_err());
        assert!(OmegaPartition::new(Ordinal::zero()).is_err());
    }

    #[test]
    fn streams_sit_inside_their_class() {
        let p = OmegaPartition::new(ord("w^1*2")).unwrap();
        for eps in [Ordinal::zero(), ord("w^0*3"), ord("w^1*1+w^0*2")] {
            for k in 0..40 {
                let n = p.stream_element(&eps, k).unwrap();
                assert!(p.member(&eps, n).unwrap());
            }
        }
    }
}
