//! The GF(2) vector space with basis `x0, x1, ...`, its index cosets, and
//! symbolic endomorphisms.
//!
//! Elements are stored by their support, the finite set of basis indices in
//! the unique basis representation; addition is symmetric difference.  The
//! coset `G{l}_{n}` collects the elements whose support meets `{n}` with
//! parity `l`, so `G0_n` is the subgroup spanned by the other basis vectors
//! and `G1_n = x_n + G0_n`.  Translating a coset by an element stays inside
//! the same index pair, which is why [`Coset::translate`] can return a
//! `Coset` rather than a set.
//!
//! Homomorphisms are *symbolic*: a base rule giving the image of every basis
//! vector, plus finitely many per-index overrides.  Keeping the rules
//! piecewise-arithmetic (rather than opaque closures) is what makes
//! preimage-of-index queries and the symbolic expansion checks decidable.
//!
//! Wire forms: elements as `x0+x3` (zero as `0`), cosets as `G0_3`/`G1_3`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A finite-support GF(2) vector over the basis `x0, x1, ...`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupElement {
    /// Strictly increasing basis indices.
    support: Vec<u64>,
}

impl GroupElement {
    pub fn zero() -> GroupElement {
        GroupElement { support: Vec::new() }
    }

    pub fn basis(n: u64) -> GroupElement {
        GroupElement { support: vec![n] }
    }

    /// Element with the given support set (duplicates collapse).
    pub fn from_support(indices: impl IntoIterator<Item = u64>) -> GroupElement {
        let mut v: Vec<u64> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        GroupElement { support: v }
    }

    /// Characteristic-2 sum of basis vectors (duplicates cancel).
    pub fn sum_of_basis(indices: impl IntoIterator<Item = u64>) -> GroupElement {
        let mut acc = GroupElement::zero();
        for n in indices {
            acc = acc.add(&GroupElement::basis(n));
        }
        acc
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.support.binary_search(&n).is_ok()
    }

    /// Symmetric difference of supports.
    pub fn add(&self, other: &GroupElement) -> GroupElement {
        let mut out = Vec::with_capacity(self.support.len() + other.support.len());
        let (mut i, mut j) = (0, 0);
        while i < self.support.len() && j < other.support.len() {
            match self.support[i].cmp(&other.support[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.support[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.support[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.support[i..]);
        out.extend_from_slice(&other.support[j..]);
        GroupElement { support: out }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for n in &self.support {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "x{n}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupElement> {
        if s == "0" {
            return Ok(GroupElement::zero());
        }
        let mut support = Vec::new();
        let mut at = 0usize;
        for part in s.split('+') {
            let digits = part
                .strip_prefix('x')
                .ok_or_else(|| Error::parse(at, "expected basis vector like x3"))?;
            if digits.is_empty() || (digits != "0" && digits.starts_with('0')) {
                return Err(Error::parse(at + 1, "expected a canonical index"));
            }
            let n: u64 =
                digits.parse().map_err(|_| Error::parse(at + 1, "index is not a u64"))?;
            if let Some(&last) = support.last() {
                if n <= last {
                    return Err(Error::parse(at, "indices must strictly increase"));
                }
            }
            support.push(n);
            at += part.len() + 1;
        }
        Ok(GroupElement { support })
    }
}

/// The coset `G{l}_{n}`: elements whose support contains `n` iff `l = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    index: u64,
    parity: bool,
}

impl Coset {
    pub fn new(index: u64, parity: bool) -> Coset {
        Coset { index, parity }
    }

    /// `G0_n`, the subgroup spanned by the basis vectors other than `x_n`.
    pub fn subgroup(index: u64) -> Coset {
        Coset { index, parity: false }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn parity(&self) -> bool {
        self.parity
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.contains(self.index) == self.parity
    }

    /// The coset `x + self`; same index, parity flipped iff `n` is in the
    /// support of `x`.
    pub fn translate(&self, x: &GroupElement) -> Coset {
        Coset { index: self.index, parity: self.parity ^ x.contains(self.index) }
    }
}

impl fmt::Display for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}_{}", if self.parity { 1 } else { 0 }, self.index)
    }
}

impl fmt::Debug for Coset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Coset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Coset> {
        let rest = s.strip_prefix('G').ok_or_else(|| Error::parse(0, "expected G0_n or G1_n"))?;
        let (parity, rest) = if let Some(r) = rest.strip_prefix("0_") {
            (false, r)
        } else if let Some(r) = rest.strip_prefix("1_") {
            (true, r)
        } else {
            return Err(Error::parse(1, "expected parity 0 or 1 then '_'"));
        };
        if rest.is_empty() || (rest != "0" && rest.starts_with('0')) {
            return Err(Error::parse(3, "expected a canonical index"));
        }
        let index: u64 = rest.parse().map_err(|_| Error::parse(3, "index is not a u64"))?;
        Ok(Coset { index, parity })
    }
}

/// Base rule of a symbolic homomorphism: the image of the basis vector `x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HomRule {
    /// `x_n -> x_n`.
    Identity,
    /// `x_n -> x_(n mod m)`, `m >= 1`.
    Residue(u64),
    /// `x_n -> x_(scale*n + shift)`; `scale = 0` gives the constant basis map.
    BasisAffine { scale: u64, shift: u64 },
    /// Every basis vector maps to the same element (possibly zero).
    Constant(GroupElement),
}

impl HomRule {
    fn basis_image(&self, n: u64) -> GroupElement {
        match self {
            HomRule::Identity => GroupElement::basis(n),
            HomRule::Residue(m) => GroupElement::basis(n % m),
            HomRule::BasisAffine { scale, shift } => GroupElement::basis(
                scale
                    .checked_mul(n)
                    .and_then(|v| v.checked_add(*shift))
                    .expect("affine hom index overflow"),
            ),
            HomRule::Constant(g) => g.clone(),
        }
    }
}

/// A homomorphism `G -> G` given by a base rule with finite overrides and
/// extended linearly with characteristic-2 cancellation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    base: HomRule,
    overrides: BTreeMap<u64, GroupElement>,
}

impl GroupHom {
    pub fn new(base: HomRule, overrides: BTreeMap<u64, GroupElement>) -> GroupHom {
        GroupHom { base, overrides }
    }

    pub fn from_rule(base: HomRule) -> GroupHom {
        GroupHom { base, overrides: BTreeMap::new() }
    }

    pub fn identity() -> GroupHom {
        GroupHom::from_rule(HomRule::Identity)
    }

    /// The even/odd collapse `x_(2n+l) -> x_l`.
    pub fn parity_collapse() -> GroupHom {
        GroupHom::from_rule(HomRule::Residue(2))
    }

    pub fn base(&self) -> &HomRule {
        &self.base
    }

    pub fn overrides(&self) -> &BTreeMap<u64, GroupElement> {
        &self.overrides
    }

    /// Image of the basis vector `x_n`.
    pub fn basis_image(&self, n: u64) -> GroupElement {
        match self.overrides.get(&n) {
            Some(g) => g.clone(),
            None => self.base.basis_image(n),
        }
    }

    /// Linear extension: XOR of the basis images over the support.
    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let mut acc = GroupElement::zero();
        for &n in x.support() {
            acc = acc.add(&self.basis_image(n));
        }
        acc
    }

    /// Indices `n < bound` whose basis image has `target` in its support.
    pub fn preimage_indices(&self, target: u64, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&n| self.basis_image(n).contains(target)).collect()
    }
}
