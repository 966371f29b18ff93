//! Cantor-normal-form ordinal arithmetic below `w^w`, together with the
//! computable coding bijections between `w` and infinite ordinal segments
//! that the duplicator strategies and the class partitions are built on.
//!
//! An ordinal is stored as its Cantor normal form
//! `w^e1*c1 + w^e2*c2 + ... + w^ek*ck` with strictly decreasing natural
//! exponents and positive coefficients; the empty sum is `0`.  The wire form
//! is exactly that expression with `w^e*c` terms joined by `+`, and `0` for
//! zero, e.g. `w^2*1+w^0*3`.  Parsing accepts only the canonical spelling, so
//! display and parse round-trip bit-exactly.
//!
//! The universe is capped below `w^w` ([`ORDINAL_CAP`]): any computable
//! notation system has to stop somewhere, and this cap comfortably exceeds
//! every length the engine is asked to play at while keeping the arithmetic
//! elementary.  The cap is exposed as a constant rather than pretending the
//! type reaches any uncountable index set.
//!
//! # Segment coding
//!
//! For an infinite `zeta` the functions [`segment_code`] / [`segment_decode`]
//! form a fixed bijection between `[0, zeta)` and the naturals.  The scheme,
//! which is part of the transcript format and must not change:
//!
//! 1. `[0, zeta)` splits into CNF *blocks*: the term `w^e*c` contributes `c`
//!    consecutive blocks each order-isomorphic to `[0, w^e)`.  Blocks with
//!    `e = 0` are single points.  Because exponents decrease, all infinite
//!    blocks precede all singleton blocks.
//! 2. Inside a block of exponent `e >= 1`, the point `w^(e-1)*t_(e-1) + ... +
//!    w^0*t_0` is coded by folding the coefficient tuple through the Cantor
//!    pairing function: `pair(...pair(t_(e-1), t_(e-2))..., t_0)`; for
//!    `e = 1` the code is `t_0` itself, which makes the coding on `[0, w)`
//!    the identity.
//! 3. Globally the blocks are interleaved round-robin: round 0 visits every
//!    block's code 0 in block order; every later round visits only the
//!    infinite blocks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Everything representable is strictly below this ordinal (spelled in the
/// same notation the type serializes to).
pub const ORDINAL_CAP: &str = "w^w";

/// An ordinal below `w^w` in Cantor normal form.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    /// `(exponent, coefficient)` pairs, exponents strictly decreasing,
    /// coefficients >= 1.  Empty means 0.
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Ordinal {
        Ordinal { terms: Vec::new() }
    }

    pub fn from_nat(n: u64) -> Ordinal {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Ordinal {
        Ordinal { terms: vec![(1, 1)] }
    }

    /// `w^exp * coeff`; a zero coefficient gives 0.
    pub fn term(exp: u32, coeff: u64) -> Ordinal {
        if coeff == 0 {
            Ordinal::zero()
        } else {
            Ordinal { terms: vec![(exp, coeff)] }
        }
    }

    /// Builds an ordinal from CNF terms given in strictly decreasing exponent
    /// order; zero coefficients are rejected.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Ordinal> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(Error::InvalidDescriptor(
                    "ordinal exponents must strictly decrease".into(),
                ));
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(Error::InvalidDescriptor("ordinal coefficients must be positive".into()));
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == 0)
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// The natural this ordinal denotes, when finite.
    pub fn as_nat(&self) -> Option<u64> {
        if self.terms.is_empty() {
            Some(0)
        } else if self.is_finite() {
            Some(self.terms[0].1)
        } else {
            None
        }
    }

    /// Nonzero with no `w^0` term.
    pub fn is_limit(&self) -> bool {
        match self.terms.last() {
            None => false,
            Some(&(e, _)) => e > 0,
        }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::from_nat(1))
    }

    /// Standard (non-commutative) ordinal addition in CNF: terms of `self`
    /// below the leading exponent of `other` are absorbed.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        if other.is_zero() {
            return self.clone();
        }
        let (lead_e, lead_c) = other.terms[0];
        let mut terms: Vec<(u32, u64)> =
            self.terms.iter().copied().take_while(|&(e, _)| e > lead_e).collect();
        let mut rest = other.terms.clone();
        if let Some(&(e, c)) = self.terms.get(terms.len()) {
            if e == lead_e {
                rest[0].1 = c.checked_add(lead_c).expect("ordinal coefficient overflow");
            }
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    /// The unique `rho` with `self + rho = other`, defined when
    /// `self <= other`.
    pub fn left_sub(&self, other: &Ordinal) -> Result<Ordinal> {
        let a = &self.terms;
        let b = &other.terms;
        let mut i = 0;
        while i < a.len() && i < b.len() && a[i] == b[i] {
            i += 1;
        }
        if i == a.len() {
            return Ok(Ordinal { terms: b[i..].to_vec() });
        }
        if i == b.len() {
            return Err(Error::OutOfRange(format!("{self} exceeds {other}")));
        }
        let (ea, ca) = a[i];
        let (eb, cb) = b[i];
        if ea > eb || (ea == eb && ca > cb) {
            return Err(Error::OutOfRange(format!("{self} exceeds {other}")));
        }
        if ea < eb {
            Ok(Ordinal { terms: b[i..].to_vec() })
        } else {
            // ea == eb, ca < cb
            let mut terms = vec![(ea, cb - ca)];
            terms.extend_from_slice(&b[i + 1..]);
            Ok(Ordinal { terms })
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Ordinal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Ordinal) -> Ordering {
        for (ta, tb) in self.terms.iter().zip(other.terms.iter()) {
            if ta.0 != tb.0 {
                return ta.0.cmp(&tb.0);
            }
            if ta.1 != tb.1 {
                return ta.1.cmp(&tb.1);
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for &(e, c) in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "w^{e}*{c}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_nat(s: &str, at: usize) -> Result<u64> {
    if s.is_empty() {
        return Err(Error::parse(at, "expected a number"));
    }
    if s != "0" && s.starts_with('0') {
        return Err(Error::parse(at, "leading zeros are not canonical"));
    }
    s.parse::<u64>().map_err(|_| Error::parse(at, "not a u64 number"))
}

impl FromStr for Ordinal {
    type Err = Error;

    /// Strict parser for the canonical wire form; anything that would not
    /// re-display identically is rejected.
    fn from_str(s: &str) -> Result<Ordinal> {
        if s == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms = Vec::new();
        let mut at = 0usize;
        for part in s.split('+') {
            let rest = part
                .strip_prefix("w^")
                .ok_or_else(|| Error::parse(at, "expected term of the form w^e*c"))?;
            let star = rest
                .find('*')
                .ok_or_else(|| Error::parse(at, "expected '*' between exponent and coefficient"))?;
            let e = parse_nat(&rest[..star], at + 2)?;
            let c = parse_nat(&rest[star + 1..], at + 3 + star)?;
            let e: u32 =
                e.try_into().map_err(|_| Error::parse(at + 2, "exponent too large"))?;
            if c == 0 {
                return Err(Error::parse(at, "zero coefficient is not canonical"));
            }
            if let Some(&(prev_e, _)) = terms.last() {
                if e >= prev_e {
                    return Err(Error::parse(at, "exponents must strictly decrease"));
                }
            }
            terms.push((e, c));
            at += part.len() + 1;
        }
        Ok(Ordinal { terms })
    }
}

// ---------------------------------------------------------------------------
// Cantor pairing
// ---------------------------------------------------------------------------

/// Cantor pairing `pair(a, b) = (a+b)(a+b+1)/2 + b`, checked.
pub fn pair(a: u64, b: u64) -> Result<u64> {
    let s = a.checked_add(b).ok_or(Error::Overflow)?;
    let t = (s as u128) * (s as u128 + 1) / 2;
    let t: u64 = t.try_into().map_err(|_| Error::Overflow)?;
    t.checked_add(b).ok_or(Error::Overflow)
}

/// Inverse of [`pair`].
pub fn unpair(n: u64) -> (u64, u64) {
    let m = 8u128 * n as u128 + 1;
    let r = m.isqrt();
    let w = ((r - 1) / 2) as u64;
    let t = w * (w + 1) / 2;
    let b = n - t;
    (w - b, b)
}

// ---------------------------------------------------------------------------
// Block decomposition of [0, zeta)
// ---------------------------------------------------------------------------

fn require_infinite(zeta: &Ordinal) -> Result<()> {
    if zeta.is_infinite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("segment coding needs an infinite length, got {zeta}")))
    }
}

/// `(total blocks, infinite blocks)` of the CNF block decomposition.
fn block_counts(zeta: &Ordinal) -> Result<(u64, u64)> {
    let mut total = 0u64;
    let mut infinite = 0u64;
    for &(e, c) in zeta.terms() {
        total = total.checked_add(c).ok_or(Error::Overflow)?;
        if e > 0 {
            infinite += c;
        }
    }
    Ok((total, infinite))
}

/// Start ordinal and exponent of block `b`.
fn block_location(zeta: &Ordinal, b: u64) -> Result<(Ordinal, u32)> {
    let mut cum = 0u64;
    let mut prefix = Ordinal::zero();
    for &(e, c) in zeta.terms() {
        if b < cum + c {
            let d = b - cum;
            return Ok((prefix.add(&Ordinal::term(e, d)), e));
        }
        cum += c;
        prefix = prefix.add(&Ordinal::term(e, c));
    }
    Err(Error::OutOfRange(format!("block {b} out of range for {zeta}")))
}

/// Locates `alpha < zeta`: block index, offset within the block, exponent.
fn block_of(zeta: &Ordinal, alpha: &Ordinal) -> Result<(u64, Ordinal, u32)> {
    let mut cum = 0u64;
    let mut prefix = Ordinal::zero();
    for &(e, c) in zeta.terms() {
        let span_end = prefix.add(&Ordinal::term(e, c));
        if *alpha < span_end {
            let delta = prefix.left_sub(alpha)?;
            // coefficient of w^e inside delta (0 when absent)
            let d = delta.terms().iter().find(|&&(de, _)| de == e).map_or(0, |&(_, dc)| dc);
            let within = Ordinal::term(e, d).left_sub(&delta)?;
            return Ok((cum + d, within, e));
        }
        cum += c;
        prefix = span_end;
    }
    Err(Error::OutOfRange(format!("{alpha} is not below {zeta}")))
}

/// Codes `within < w^exp` by its coefficient tuple folded through [`pair`].
fn tuple_encode(exp: u32, within: &Ordinal) -> Result<u64> {
    if exp == 0 {
        debug_assert!(within.is_zero());
        return Ok(0);
    }
    let mut coeffs = vec![0u64; exp as usize];
    for &(e, c) in within.terms() {
        coeffs[e as usize] = c;
    }
    let mut acc = coeffs[exp as usize - 1];
    for j in (0..exp as usize - 1).rev() {
        acc = pair(acc, coeffs[j])?;
    }
    Ok(acc)
}

/// Inverse of [`tuple_encode`].
fn tuple_decode(exp: u32, code: u64) -> Result<Ordinal> {
    if exp == 0 {
        if code != 0 {
            return Err(Error::OutOfRange("singleton block has only code 0".into()));
        }
        return Ok(Ordinal::zero());
    }
    let mut coeffs = vec![0u64; exp as usize];
    let mut acc = code;
    for coeff in coeffs.iter_mut().take(exp as usize - 1) {
        let (rest, t) = unpair(acc);
        *coeff = t;
        acc = rest;
    }
    coeffs[exp as usize - 1] = acc;
    let mut out = Ordinal::zero();
    for j in (0..exp as usize).rev() {
        out = out.add(&Ordinal::term(j as u32, coeffs[j]));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Segment coding
// ---------------------------------------------------------------------------

/// The `n`-th ordinal below the infinite `zeta` under the fixed bijection.
pub fn segment_decode(zeta: &Ordinal, n: u64) -> Result<Ordinal> {
    require_infinite(zeta)?;
    let (total, infinite) = block_counts(zeta)?;
    let (b, code) = if n < total {
        (n, 0)
    } else {
        let d = n - total;
        (d % infinite, d / infinite + 1)
    };
    let (prefix, e) = block_location(zeta, b)?;
    Ok(prefix.add(&tuple_decode(e, code)?))
}

/// Position of `alpha < zeta` under the fixed bijection; inverse of
/// [`segment_decode`].
pub fn segment_code(zeta: &Ordinal, alpha: &Ordinal) -> Result<u64> {
    require_infinite(zeta)?;
    if alpha >= zeta {
        return Err(Error::OutOfRange(format!("{alpha} is not below {zeta}")));
    }
    let (total, infinite) = block_counts(zeta)?;
    let (b, within, e) = block_of(zeta, alpha)?;
    let code = tuple_encode(e, &within)?;
    if code == 0 {
        Ok(b)
    } else {
        let stride = (code - 1).checked_mul(infinite).ok_or(Error::Overflow)?;
        total.checked_add(stride).and_then(|v| v.checked_add(b)).ok_or(Error::Overflow)
    }
}

/// Injective code of `pos` inside an interval of length `len`; the identity
/// on naturals when `len` is finite, [`segment_code`] otherwise.
pub fn interval_code(len: &Ordinal, pos: &Ordinal) -> Result<u64> {
    if pos >= len {
        return Err(Error::OutOfRange(format!("{pos} is not below {len}")));
    }
    match len.as_nat() {
        Some(_) => Ok(pos.as_nat().expect("position below a finite length is finite")),
        None => segment_code(len, pos),
    }
}

/// Inverse of [`interval_code`]; for finite `len` only codes below `len`
/// denote a point.
pub fn interval_decode(len: &Ordinal, idx: u64) -> Result<Ordinal> {
    match len.as_nat() {
        Some(n) => {
            if idx < n {
                Ok(Ordinal::from_nat(idx))
            } else {
                Err(Error::OutOfRange(format!("index {idx} is not below {len}")))
            }
        }
        None => segment_decode(len, idx),
    }
}
