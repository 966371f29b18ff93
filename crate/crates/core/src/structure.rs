//! The layered two-sorted structures and their expansions.
//!
//! The plain structure has, for every level `alpha` below the ordinal cap, an
//! A-layer (a copy of the group, tagged with the level) and a B-layer (the
//! coset sequences of length `alpha` that deviate from some constant `G0_n`
//! at only finitely many coordinates).  The vocabulary:
//!
//! * `P1` / `P2` — the two sorts;
//! * `E1` / `E2` — the level quasi-orders within each sort, whose classes are
//!   the layers;
//! * `F_y` for every group element `y` — translation by `y` on the A-sort,
//!   the identity on the B-sort;
//! * `R` — between a B-element of length `beta` and an A-element `(alpha, x)`
//!   with `alpha < beta`: whether `x` lies in the sequence's coset at
//!   `alpha`.
//!
//! An expansion adds `R1`, linking `(beta_alpha, y2)` to `(alpha, y1)` when
//! the level hom carries `y1` to `y2`; the level maps `alpha -> beta_alpha`
//! and `alpha -> g_alpha` are symbolic rules with finite overrides, so `R1`
//! is decidable at every level without enumeration.
//!
//! Sorts are disjoint by construction (an enum tag), so the "without loss of
//! generality pairwise disjoint" coding is structural.  Restrictions
//! (`cutoff`) carve out the levels below a bound; evaluation commutes with
//! restriction whenever the arguments stay below the bound.
//!
//! Wire forms: `A(<ordinal>; <element>)` and
//! `B(<ordinal>; <base>; <ordinal>↦<coset>, ...)` (deviation list omitted
//! when empty; `->` is accepted for `↦` on input).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::group::{Coset, GroupElement, GroupHom};
use crate::ordinal::Ordinal;
use crate::{Error, Result};

/// Copies of finite-level B-elements are re-based to `base = 0`; rebasing
/// enumerates the level, so it is capped well above anything desk scale asks.
const FINITE_REBASE_CAP: u64 = 1 << 16;

/// A point `(level, x)` of the A-sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AElement {
    pub level: Ordinal,
    pub value: GroupElement,
}

impl AElement {
    pub fn new(level: Ordinal, value: GroupElement) -> AElement {
        AElement { level, value }
    }
}

/// A B-sort element: a coset sequence of length `level`, equal to `G0_base`
/// everywhere except at the recorded deviations.
///
/// Canonical form: deviation keys lie below the level, no recorded deviation
/// equals the default coset, and finite-level elements use `base = 0` (two
/// elements denote the same sequence iff they are structurally equal).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BElement {
    level: Ordinal,
    base: u64,
    deviations: BTreeMap<Ordinal, Coset>,
}

impl BElement {
    pub fn new(
        level: Ordinal,
        base: u64,
        deviations: BTreeMap<Ordinal, Coset>,
    ) -> Result<BElement> {
        for key in deviations.keys() {
            if *key >= level {
                return Err(Error::InvalidElement(format!(
                    "deviation at {key} is not below the level {level}"
                )));
            }
        }
        if let Some(n) = level.as_nat() {
            if base != 0 {
                // finite levels are canonicalised to base 0
                if n > FINITE_REBASE_CAP {
                    return Err(Error::InvalidElement(format!(
                        "finite level {n} too large to re-base"
                    )));
                }
                let mut rebased = BTreeMap::new();
                for k in 0..n {
                    let key = Ordinal::from_nat(k);
                    let coset = deviations.get(&key).copied().unwrap_or(Coset::subgroup(base));
                    if coset != Coset::subgroup(0) {
                        rebased.insert(key, coset);
                    }
                }
                return Ok(BElement { level, base: 0, deviations: rebased });
            }
        }
        let deviations: BTreeMap<Ordinal, Coset> =
            deviations.into_iter().filter(|(_, c)| *c != Coset::subgroup(base)).collect();
        Ok(BElement { level, base, deviations })
    }

    /// The constant-`G0_base` sequence of the given length.
    pub fn constant(level: Ordinal, base: u64) -> Result<BElement> {
        BElement::new(level, base, BTreeMap::new())
    }

    pub fn level(&self) -> &Ordinal {
        &self.level
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn deviations(&self) -> &BTreeMap<Ordinal, Coset> {
        &self.deviations
    }

    /// The coset at coordinate `beta < level`.
    pub fn coset_at(&self, beta: &Ordinal) -> Result<Coset> {
        if *beta >= self.level {
            return Err(Error::OutOfRange(format!(
                "coordinate {beta} is not below the length {}",
                self.level
            )));
        }
        Ok(self.deviations.get(beta).copied().unwrap_or(Coset::subgroup(self.base)))
    }
}

/// A point of either sort.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    A(AElement),
    B(BElement),
}

impl Element {
    pub fn a(level: Ordinal, value: GroupElement) -> Element {
        Element::A(AElement::new(level, value))
    }

    pub fn level(&self) -> &Ordinal {
        match self {
            Element::A(a) => &a.level,
            Element::B(b) => &b.level,
        }
    }

    pub fn is_a(&self) -> bool {
        matches!(self, Element::A(_))
    }

    pub fn as_a(&self) -> Option<&AElement> {
        match self {
            Element::A(a) => Some(a),
            Element::B(_) => None,
        }
    }

    pub fn as_b(&self) -> Option<&BElement> {
        match self {
            Element::B(b) => Some(b),
            Element::A(_) => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::A(a) => write!(f, "A({}; {})", a.level, a.value),
            Element::B(b) => {
                write!(f, "B({}; {}", b.level, b.base)?;
                if !b.deviations.is_empty() {
                    write!(f, "; ")?;
                    let mut first = true;
                    for (k, c) in &b.deviations {
                        if !first {
                            write!(f, ", ")?;
                        }
                        write!(f, "{k}\u{21a6}{c}")?;
                        first = false;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for AElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({}; {})", self.level, self.value)
    }
}

impl fmt::Debug for BElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Element::B(self.clone()))
    }
}

impl FromStr for Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Element> {
        let inner = |s: &str, tag: &str| -> Result<String> {
            s.strip_prefix(tag)
                .and_then(|r| r.strip_suffix(')'))
                .map(str::to_owned)
                .ok_or_else(|| Error::parse(0, format!("expected {tag}...)")))
        };
        if s.starts_with("A(") {
            let body = inner(s, "A(")?;
            let (lvl, val) = body
                .split_once("; ")
                .ok_or_else(|| Error::parse(2, "expected 'A(level; value)'"))?;
            let level: Ordinal = lvl.parse().map_err(shift_parse(2))?;
            let value: GroupElement = val.parse().map_err(shift_parse(4 + lvl.len()))?;
            return Ok(Element::A(AElement::new(level, value)));
        }
        if s.starts_with("B(") {
            let body = inner(s, "B(")?;
            let mut parts = body.splitn(3, "; ");
            let lvl = parts.next().ok_or_else(|| Error::parse(2, "expected level"))?;
            let base_s =
                parts.next().ok_or_else(|| Error::parse(2 + lvl.len(), "expected base index"))?;
            let level: Ordinal = lvl.parse().map_err(shift_parse(2))?;
            let base: u64 = base_s
                .parse()
                .map_err(|_| Error::parse(4 + lvl.len(), "base index is not a u64"))?;
            let mut deviations = BTreeMap::new();
            if let Some(devs) = parts.next() {
                let mut at = 6 + lvl.len() + base_s.len();
                for item in devs.split(", ") {
                    let (k, c) = item
                        .split_once('\u{21a6}')
                        .or_else(|| item.split_once("->"))
                        .ok_or_else(|| Error::parse(at, "expected 'ordinal↦coset'"))?;
                    let key: Ordinal = k.parse().map_err(shift_parse(at))?;
                    let coset: Coset = c.parse().map_err(shift_parse(at + k.len()))?;
                    if deviations.insert(key, coset).is_some() {
                        return Err(Error::parse(at, "duplicate deviation coordinate"));
                    }
                    at += item.len() + 2;
                }
            }
            return Ok(Element::B(BElement::new(level, base, deviations)?));
        }
        Err(Error::parse(0, "expected an element starting with A( or B("))
    }
}

fn shift_parse(base: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { pos, msg } => Error::Parse { pos: base + pos, msg },
        other => other,
    }
}

/// Symbolic level map `alpha -> beta_alpha <= alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaRule {
    Identity,
    Constant(Ordinal),
}

/// The pair of level rules defining an expansion: `alpha -> beta_alpha` and
/// `alpha -> g_alpha`, both with finite overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDescriptor {
    beta_base: BetaRule,
    beta_overrides: BTreeMap<Ordinal, Ordinal>,
    hom_base: GroupHom,
    hom_overrides: BTreeMap<Ordinal, GroupHom>,
}

impl PDescriptor {
    pub fn new(
        beta_base: BetaRule,
        beta_overrides: BTreeMap<Ordinal, Ordinal>,
        hom_base: GroupHom,
        hom_overrides: BTreeMap<Ordinal, GroupHom>,
    ) -> PDescriptor {
        PDescriptor { beta_base, beta_overrides, hom_base, hom_overrides }
    }

    pub fn uniform(beta: BetaRule, hom: GroupHom) -> PDescriptor {
        PDescriptor::new(beta, BTreeMap::new(), hom, BTreeMap::new())
    }

    /// The parity expansion: every level links to level 0 through the
    /// even/odd collapse.
    pub fn parity() -> PDescriptor {
        PDescriptor::uniform(BetaRule::Constant(Ordinal::zero()), GroupHom::parity_collapse())
    }

    pub fn beta_base(&self) -> &BetaRule {
        &self.beta_base
    }

    pub fn hom_base(&self) -> &GroupHom {
        &self.hom_base
    }

    pub fn beta_overrides(&self) -> &BTreeMap<Ordinal, Ordinal> {
        &self.beta_overrides
    }

    pub fn hom_overrides(&self) -> &BTreeMap<Ordinal, GroupHom> {
        &self.hom_overrides
    }

    /// `beta_alpha`; the rule contract `beta_alpha <= alpha` is checked on
    /// every evaluation.
    pub fn beta_at(&self, alpha: &Ordinal) -> Result<Ordinal> {
        let beta = match self.beta_overrides.get(alpha) {
            Some(b) => b.clone(),
            None => match &self.beta_base {
                BetaRule::Identity => alpha.clone(),
                BetaRule::Constant(c) => c.clone(),
            },
        };
        if beta > *alpha {
            return Err(Error::OutOfRange(format!(
                "level rule sends {alpha} above itself (to {beta})"
            )));
        }
        Ok(beta)
    }

    pub fn hom_at(&self, alpha: &Ordinal) -> &GroupHom {
        self.hom_overrides.get(alpha).unwrap_or(&self.hom_base)
    }
}

/// A handle on a structure: the plain model, optionally expanded, optionally
/// restricted to the levels below a cutoff, optionally pointed.
#[derive(Clone, Debug, PartialEq)]
pub struct Structure {
    expansion: Option<PDescriptor>,
    cutoff: Option<Ordinal>,
    distinguished: Option<AElement>,
}

impl Structure {
    pub fn plain() -> Structure {
        Structure { expansion: None, cutoff: None, distinguished: None }
    }

    pub fn expanded(p: PDescriptor) -> Structure {
        Structure { expansion: Some(p), cutoff: None, distinguished: None }
    }

    /// The parity-expanded structure.
    pub fn parity_expansion() -> Structure {
        Structure::expanded(PDescriptor::parity())
    }

    pub fn with_cutoff(mut self, gamma: Ordinal) -> Structure {
        self.cutoff = Some(gamma);
        self
    }

    pub fn with_distinguished(mut self, a: AElement) -> Structure {
        self.distinguished = Some(a);
        self
    }

    pub fn expansion(&self) -> Option<&PDescriptor> {
        self.expansion.as_ref()
    }

    pub fn cutoff(&self) -> Option<&Ordinal> {
        self.cutoff.as_ref()
    }

    pub fn distinguished(&self) -> Option<&AElement> {
        self.distinguished.as_ref()
    }

    pub fn is_expanded(&self) -> bool {
        self.expansion.is_some()
    }

    /// Universe test: the element's level lies below the cutoff (full model
    /// when there is none).
    pub fn contains(&self, e: &Element) -> bool {
        match &self.cutoff {
            None => true,
            Some(gamma) => e.level() < gamma,
        }
    }

    pub fn eval_p1(&self, e: &Element) -> bool {
        e.is_a()
    }

    pub fn eval_p2(&self, e: &Element) -> bool {
        !e.is_a()
    }

    /// A-sort level quasi-order; false across sorts.
    pub fn eval_e1(&self, a: &Element, b: &Element) -> bool {
        match (a, b) {
            (Element::A(x), Element::A(y)) => x.level <= y.level,
            _ => false,
        }
    }

    /// B-sort level quasi-order; false across sorts.
    pub fn eval_e2(&self, a: &Element, b: &Element) -> bool {
        match (a, b) {
            (Element::B(x), Element::B(y)) => x.level <= y.level,
            _ => false,
        }
    }

    /// Strict-mode variants: applying the order predicates across sorts is
    /// flagged instead of silently false.
    pub fn eval_e1_strict(&self, a: &Element, b: &Element) -> Result<bool> {
        if a.is_a() && b.is_a() {
            Ok(self.eval_e1(a, b))
        } else {
            Err(Error::SortMismatch("E1 compares A-sort elements".into()))
        }
    }

    pub fn eval_e2_strict(&self, a: &Element, b: &Element) -> Result<bool> {
        if !a.is_a() && !b.is_a() {
            Ok(self.eval_e2(a, b))
        } else {
            Err(Error::SortMismatch("E2 compares B-sort elements".into()))
        }
    }

    /// The translation function `F_y`: adds `y` on the A-sort, identity on
    /// the B-sort.
    pub fn eval_f(&self, y: &GroupElement, e: &Element) -> Element {
        match e {
            Element::A(a) => Element::a(a.level.clone(), a.value.add(y)),
            Element::B(_) => e.clone(),
        }
    }

    /// `R(eta, (alpha, x))`: the level is strictly below the sequence length
    /// and `x` lies in the coset at that coordinate.
    pub fn eval_r(&self, eta: &BElement, a: &AElement) -> bool {
        if a.level >= *eta.level() {
            return false;
        }
        eta.coset_at(&a.level).expect("coordinate checked below length").contains(&a.value)
    }

    /// `R1(e2, e1)`: defined on expanded structures; `e2` sits at the level
    /// the rule assigns to `e1`'s level and carries the hom image of `e1`.
    pub fn eval_r1(&self, e2: &AElement, e1: &AElement) -> Result<bool> {
        let p = self
            .expansion
            .as_ref()
            .ok_or_else(|| Error::SortMismatch("R1 needs an expanded structure".into()))?;
        let beta = p.beta_at(&e1.level)?;
        Ok(e2.level == beta && p.hom_at(&e1.level).apply(&e1.value) == e2.value)
    }
}
