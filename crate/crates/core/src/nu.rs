//! Symbolic descriptors for total functions `nu : [0, gamma) -> G` and the
//! level-wise translation maps they induce.
//!
//! A descriptor is a finite list of contiguous interval segments covering
//! `[0, domain_sup)`, each carrying a rule, plus finitely many point
//! overrides that take precedence.  Rules:
//!
//! * `CONST(g)` — the constant value `g`;
//! * `BINJ(zeta, color, slot)` — fresh basis vectors: the interval injects
//!   into an infinite subset of the class `U_color` of the length-`zeta`
//!   partition, the subset carved out by `slot`;
//! * `PINJ(slot)` — fresh consecutive pair sums `x_{2e} + x_{2e+1}`, `e >= 1`
//!   drawn injectively from the slot's reservoir.
//!
//! Positions inside a segment are numbered by the interval coding of
//! [`crate::ordinal`]; slots with distinct numbers draw from disjoint
//! reservoirs (Cantor pairing), so injectivity across segments needs no
//! cross-segment search.
//!
//! The induced map `f_nu` translates `(alpha, x)` to `(alpha, x + nu(alpha))`
//! and translates every coordinate of a B-element pointwise.  For the image
//! of a B-element to stay finitely-deviating, the support preimage
//! `{alpha < level : base in supp(nu(alpha))}` must be finite — the query
//! [`NuDescriptor::support_preimage`] is therefore a first-class operation,
//! and [`NuDescriptor::apply`] reports `IllegalImage` exactly when it comes
//! back infinite.  A descriptor is *valid* when the literal per-bound
//! condition holds: below every `beta < domain_sup` every index has a finite
//! preimage.  Invalid descriptors are still constructible (the rigidity
//! probe needs them) but flag themselves via [`NuDescriptor::is_valid`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::group::{GroupElement, HomRule};
use crate::ordinal::{interval_code, interval_decode, pair, unpair, Ordinal};
use crate::partition::OmegaPartition;
use crate::structure::{BElement, BetaRule, Element, PDescriptor};
use crate::{Error, Result};

/// Points probed when deciding extension questions that fall outside the
/// aligned-segment fragment.
const SCAN_PROBES: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentRule {
    Constant(GroupElement),
    BasisInjection { partition: OmegaPartition, color: Ordinal, slot: u64 },
    PairInjection { slot: u64 },
}

/// One contiguous piece `[start, end)` of a descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    start: Ordinal,
    end: Ordinal,
    rule: SegmentRule,
}

impl Segment {
    pub fn new(start: Ordinal, end: Ordinal, rule: SegmentRule) -> Result<Segment> {
        if start >= end {
            return Err(Error::InvalidDescriptor(format!(
                "segment [{start}, {end}) is empty"
            )));
        }
        Ok(Segment { start, end, rule })
    }

    pub fn start(&self) -> &Ordinal {
        &self.start
    }

    pub fn end(&self) -> &Ordinal {
        &self.end
    }

    pub fn rule(&self) -> &SegmentRule {
        &self.rule
    }

    pub fn len(&self) -> Ordinal {
        self.start.left_sub(&self.end).expect("segment ends after it starts")
    }

    /// The reservoir stream a basis-injection draws from.
    fn stream(&self) -> Result<Option<u64>> {
        match &self.rule {
            SegmentRule::BasisInjection { partition, color, .. } => {
                Ok(Some(partition.stream_index(color)?))
            }
            _ => Ok(None),
        }
    }

    fn value_at(&self, alpha: &Ordinal) -> Result<GroupElement> {
        debug_assert!(*alpha >= self.start && *alpha < self.end);
        match &self.rule {
            SegmentRule::Constant(g) => Ok(g.clone()),
            SegmentRule::BasisInjection { partition, color, slot } => {
                let pos = self.start.left_sub(alpha)?;
                let idx = interval_code(&self.len(), &pos)?;
                // stream position 0 is skipped, keeping index 0 out of reach
                let n = partition.stream_element(color, pair(*slot, idx)?.checked_add(1).ok_or(Error::Overflow)?)?;
                Ok(GroupElement::basis(n))
            }
            SegmentRule::PairInjection { slot } => {
                let pos = self.start.left_sub(alpha)?;
                let idx = interval_code(&self.len(), &pos)?;
                let e = pair(*slot, idx)?.checked_add(1).ok_or(Error::Overflow)?;
                let low = e.checked_mul(2).ok_or(Error::Overflow)?;
                Ok(GroupElement::from_support([low, low + 1]))
            }
        }
    }

    /// The single point of this segment (ignoring overrides and clipping to
    /// `cut`) whose value's support contains `n`, for injection rules.
    fn injection_preimage(&self, n: u64, cut: &Ordinal) -> Result<Option<Ordinal>> {
        let idx = match &self.rule {
            SegmentRule::Constant(_) => return Ok(None),
            SegmentRule::BasisInjection { partition, color, slot } => {
                let stream = partition.stream_index(color)?;
                let (a, t) = unpair(n);
                if a != stream || t == 0 {
                    return Ok(None);
                }
                let (s, idx) = unpair(t - 1);
                if s != *slot {
                    return Ok(None);
                }
                idx
            }
            SegmentRule::PairInjection { slot } => {
                let e = n / 2;
                if e == 0 {
                    return Ok(None);
                }
                let (s, idx) = unpair(e - 1);
                if s != *slot {
                    return Ok(None);
                }
                idx
            }
        };
        match interval_decode(&self.len(), idx) {
            Err(_) => Ok(None), // finite interval, index beyond it
            Ok(pos) => {
                let alpha = self.start.add(&pos);
                if alpha < *cut {
                    Ok(Some(alpha))
                } else {
                    Ok(None)
                }
            }
        }
    }
}

/// Result of a support-preimage query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Finite(Vec<Ordinal>),
    Infinite,
}

/// A finitely-described total function `[0, domain_sup) -> G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuDescriptor {
    domain_sup: Ordinal,
    segments: Vec<Segment>,
    overrides: BTreeMap<Ordinal, GroupElement>,
}

impl NuDescriptor {
    /// Builds a descriptor; the segments must tile `[0, sup)` contiguously
    /// from zero and the overrides must stay below the supremum.
    pub fn new(
        segments: Vec<Segment>,
        overrides: BTreeMap<Ordinal, GroupElement>,
    ) -> Result<NuDescriptor> {
        let mut expect = Ordinal::zero();
        for seg in &segments {
            if seg.start != expect {
                return Err(Error::InvalidDescriptor(format!(
                    "segment starts at {} where {expect} was expected",
                    seg.start
                )));
            }
            expect = seg.end.clone();
        }
        let domain_sup = expect;
        for key in overrides.keys() {
            if *key >= domain_sup {
                return Err(Error::InvalidDescriptor(format!(
                    "override at {key} is not below the domain supremum {domain_sup}"
                )));
            }
        }
        Ok(NuDescriptor { domain_sup, segments, overrides })
    }

    /// The empty descriptor with domain `[0, 0)`.
    pub fn empty() -> NuDescriptor {
        NuDescriptor {
            domain_sup: Ordinal::zero(),
            segments: Vec::new(),
            overrides: BTreeMap::new(),
        }
    }

    /// Constant descriptor `nu == g` on `[0, sup)`.
    pub fn constant(g: GroupElement, sup: Ordinal) -> Result<NuDescriptor> {
        NuDescriptor::new(
            vec![Segment::new(Ordinal::zero(), sup, SegmentRule::Constant(g))?],
            BTreeMap::new(),
        )
    }

    pub fn domain_sup(&self) -> &Ordinal {
        &self.domain_sup
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn overrides(&self) -> &BTreeMap<Ordinal, GroupElement> {
        &self.overrides
    }

    /// A copy with one more segment appended at the top and extra overrides.
    pub fn extended(
        &self,
        segment: Segment,
        overrides: impl IntoIterator<Item = (Ordinal, GroupElement)>,
    ) -> Result<NuDescriptor> {
        let mut segments = self.segments.clone();
        segments.push(segment);
        let mut all = self.overrides.clone();
        for (k, v) in overrides {
            all.insert(k, v);
        }
        NuDescriptor::new(segments, all)
    }

    fn segment_containing(&self, alpha: &Ordinal) -> Option<&Segment> {
        let i = self.segments.partition_point(|s| s.start <= *alpha);
        if i == 0 {
            return None;
        }
        let seg = &self.segments[i - 1];
        (*alpha < seg.end).then_some(seg)
    }

    pub fn eval(&self, alpha: &Ordinal) -> Result<GroupElement> {
        if *alpha >= self.domain_sup {
            return Err(Error::OutOfDomain(format!(
                "{alpha} is not below the domain supremum {}",
                self.domain_sup
            )));
        }
        if let Some(v) = self.overrides.get(alpha) {
            return Ok(v.clone());
        }
        self.segment_containing(alpha)
            .expect("segments tile the domain")
            .value_at(alpha)
    }

    /// Exactly `{alpha < bound : n in supp(nu(alpha))}`, or `Infinite`.
    pub fn support_preimage(&self, n: u64, bound: &Ordinal) -> Result<Preimage> {
        if *bound > self.domain_sup {
            return Err(Error::OutOfRange(format!(
                "bound {bound} exceeds the domain supremum {}",
                self.domain_sup
            )));
        }
        let mut hits: Vec<Ordinal> = Vec::new();
        for seg in &self.segments {
            if seg.start >= *bound {
                break;
            }
            let cut = if seg.end <= *bound { seg.end.clone() } else { bound.clone() };
            match &seg.rule {
                SegmentRule::Constant(g) => {
                    if g.contains(n) {
                        let clip_len = seg.start.left_sub(&cut)?;
                        match clip_len.as_nat() {
                            None => return Ok(Preimage::Infinite),
                            Some(k) => {
                                for j in 0..k {
                                    let alpha = seg.start.add(&Ordinal::from_nat(j));
                                    if !self.overrides.contains_key(&alpha) {
                                        hits.push(alpha);
                                    }
                                }
                            }
                        }
                    }
                }
                _ => {
                    if let Some(alpha) = seg.injection_preimage(n, &cut)? {
                        if !self.overrides.contains_key(&alpha) {
                            hits.push(alpha);
                        }
                    }
                }
            }
        }
        for (key, value) in &self.overrides {
            if *key < *bound && value.contains(n) {
                hits.push(key.clone());
            }
        }
        hits.sort();
        hits.dedup();
        Ok(Preimage::Finite(hits))
    }

    /// The literal per-bound finiteness condition: below every
    /// `beta < domain_sup` every index has a finite support preimage.
    pub fn is_valid(&self) -> bool {
        for seg in &self.segments {
            if let SegmentRule::Constant(g) = &seg.rule {
                if g.is_zero() {
                    continue;
                }
                let len = seg.len();
                if len.is_finite() {
                    continue;
                }
                // an infinite constant run is only harmless when it reaches
                // the supremum and no proper bound cuts an infinite piece
                if seg.end < self.domain_sup || len > Ordinal::omega() {
                    return false;
                }
            }
        }
        true
    }

    /// The induced translation map: `(alpha, x) -> (alpha, x + nu(alpha))` on
    /// the A-sort, coordinatewise coset translation on the B-sort.
    pub fn apply(&self, e: &Element) -> Result<Element> {
        match e {
            Element::A(a) => {
                if a.level >= self.domain_sup {
                    return Err(Error::OutOfDomain(format!(
                        "A-level {} is not below the domain supremum {}",
                        a.level, self.domain_sup
                    )));
                }
                Ok(Element::a(a.level.clone(), a.value.add(&self.eval(&a.level)?)))
            }
            Element::B(b) => {
                if *b.level() > self.domain_sup {
                    return Err(Error::OutOfDomain(format!(
                        "B-length {} exceeds the domain supremum {}",
                        b.level(),
                        self.domain_sup
                    )));
                }
                let mut touched: BTreeSet<Ordinal> = b.deviations().keys().cloned().collect();
                match self.support_preimage(b.base(), b.level())? {
                    Preimage::Infinite => {
                        return Err(Error::IllegalImage(format!(
                            "index {} is hit at infinitely many coordinates below {}",
                            b.base(),
                            b.level()
                        )))
                    }
                    Preimage::Finite(extra) => touched.extend(extra),
                }
                let mut devs = BTreeMap::new();
                for alpha in touched {
                    let coset = b.coset_at(&alpha)?.translate(&self.eval(&alpha)?);
                    devs.insert(alpha, coset);
                }
                Ok(Element::B(BElement::new(b.level().clone(), b.base(), devs)?))
            }
        }
    }

    /// `f_nu` composed with itself is the identity (order-2 translations).
    pub fn involution_check(&self, e: &Element) -> Result<bool> {
        Ok(self.apply(&self.apply(e)?)? == *e)
    }

    /// Whether `self` end-extends `base`: at least as large a domain and the
    /// same values below `base`'s supremum.  Decided symbolically segment by
    /// segment plus overrides; exact for descriptors whose common segments
    /// are aligned (which covers everything the strategies build), and
    /// conservatively false for pathological aliasing between differently
    /// anchored injections that agree on every probe.
    pub fn end_extends(&self, base: &NuDescriptor) -> bool {
        if self.domain_sup < base.domain_sup {
            return false;
        }
        let mut pointwise: BTreeSet<Ordinal> = BTreeSet::new();
        for k in base.overrides.keys().chain(self.overrides.keys()) {
            if *k < base.domain_sup {
                pointwise.insert(k.clone());
            }
        }
        for alpha in &pointwise {
            match (base.eval(alpha), self.eval(alpha)) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => return false,
            }
        }
        for sb in &base.segments {
            for se in &self.segments {
                let start = if sb.start >= se.start { sb.start.clone() } else { se.start.clone() };
                let end = if sb.end <= se.end { sb.end.clone() } else { se.end.clone() };
                if start >= end {
                    continue;
                }
                if !self.rules_agree_on(base, sb, se, &start, &end, &pointwise) {
                    return false;
                }
            }
        }
        true
    }

    fn rules_agree_on(
        &self,
        base: &NuDescriptor,
        sb: &Segment,
        se: &Segment,
        start: &Ordinal,
        end: &Ordinal,
        pointwise: &BTreeSet<Ordinal>,
    ) -> bool {
        let overlap_len = start.left_sub(end).expect("overlap is nonempty");
        let eval_probe = |alpha: &Ordinal| -> bool {
            if pointwise.contains(alpha) {
                return true; // already compared
            }
            matches!((base.eval(alpha), self.eval(alpha)), (Ok(a), Ok(b)) if a == b)
        };
        if let Some(k) = overlap_len.as_nat() {
            return (0..k).all(|j| eval_probe(&start.add(&Ordinal::from_nat(j))));
        }
        let aligned = sb.start == se.start && sb.end == se.end;
        match (&sb.rule, &se.rule) {
            (SegmentRule::Constant(g), SegmentRule::Constant(h)) => g == h,
            (
                SegmentRule::BasisInjection { slot: s1, .. },
                SegmentRule::BasisInjection { slot: s2, .. },
            ) => {
                let (st1, st2) = match (sb.stream(), se.stream()) {
                    (Ok(Some(a)), Ok(Some(b))) => (a, b),
                    _ => return false,
                };
                if st1 != st2 || s1 != s2 {
                    return false; // disjoint reservoirs
                }
                if aligned {
                    return true;
                }
                self.scan_disagreement(base, start, &overlap_len, pointwise)
            }
            (SegmentRule::PairInjection { slot: s1 }, SegmentRule::PairInjection { slot: s2 }) => {
                if s1 != s2 {
                    return false;
                }
                if aligned {
                    return true;
                }
                self.scan_disagreement(base, start, &overlap_len, pointwise)
            }
            // an injection takes infinitely many values, a constant one
            _ => false,
        }
    }

    /// Probe an infinite overlap for a disagreement point outside the
    /// pointwise set; agreeing on every probe does not certify equality, so
    /// the answer is then conservatively false.
    fn scan_disagreement(
        &self,
        base: &NuDescriptor,
        start: &Ordinal,
        overlap_len: &Ordinal,
        pointwise: &BTreeSet<Ordinal>,
    ) -> bool {
        for j in 0..SCAN_PROBES {
            let Ok(pos) = interval_decode(overlap_len, j) else { break };
            let alpha = start.add(&pos);
            if pointwise.contains(&alpha) {
                continue;
            }
            match (base.eval(&alpha), self.eval(&alpha)) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => return false,
            }
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Expansion compatibility and the pair-family recognizer
// ---------------------------------------------------------------------------

/// Composite of a segment rule with a hom base rule, on an infinite point
/// set: either a constant value, a family of pairwise distinct values, or
/// outside the engineered fragment.
enum Family {
    Constant(GroupElement),
    Injective,
    Unknown,
}

fn composite_family(rule: &SegmentRule, hom: &HomRule) -> Family {
    let hom = match hom {
        HomRule::BasisAffine { scale: 1, shift: 0 } => &HomRule::Identity,
        other => other,
    };
    match rule {
        SegmentRule::Constant(_) => unreachable!("constant rules are handled pointwise"),
        SegmentRule::BasisInjection { .. } => match hom {
            HomRule::Identity => Family::Injective,
            HomRule::Constant(h) => Family::Constant(h.clone()),
            HomRule::Residue(1) => Family::Constant(GroupElement::basis(0)),
            HomRule::Residue(_) => Family::Unknown,
            HomRule::BasisAffine { scale: 0, shift } => {
                Family::Constant(GroupElement::basis(*shift))
            }
            HomRule::BasisAffine { .. } => Family::Injective,
        },
        SegmentRule::PairInjection { .. } => match hom {
            HomRule::Identity => Family::Injective,
            HomRule::Constant(_) => Family::Constant(GroupElement::zero()),
            HomRule::Residue(1) => Family::Constant(GroupElement::zero()),
            HomRule::Residue(2) => Family::Constant(GroupElement::from_support([0, 1])),
            HomRule::Residue(_) => Family::Unknown,
            HomRule::BasisAffine { scale: 0, .. } => Family::Constant(GroupElement::zero()),
            HomRule::BasisAffine { .. } => Family::Injective,
        },
    }
}

/// Whether translating by `nu` respects the expansion relation below
/// `gamma`: for every `alpha < gamma` the level hom carries `nu(alpha)` to
/// `nu(beta_alpha)`.  Decided symbolically: finitely many points (overrides,
/// finite segment clips, hom basis-override hits) are evaluated directly,
/// and each remaining infinite segment tail reduces to one of the engineered
/// rule combinations.  Combinations outside that fragment refuse with
/// [`Error::Undecided`] rather than guess.
pub fn expansion_condition(
    p: &PDescriptor,
    nu: &NuDescriptor,
    gamma: &Ordinal,
) -> Result<bool> {
    if *gamma > *nu.domain_sup() {
        return Err(Error::OutOfRange(format!(
            "gamma {gamma} exceeds the domain supremum {}",
            nu.domain_sup()
        )));
    }
    let mut pointwise: BTreeSet<Ordinal> = BTreeSet::new();
    let mut collect = |keys: Box<dyn Iterator<Item = &Ordinal> + '_>| {
        for k in keys {
            if *k < *gamma {
                pointwise.insert(k.clone());
            }
        }
    };
    collect(Box::new(nu.overrides().keys()));
    collect(Box::new(p.beta_overrides().keys()));
    collect(Box::new(p.hom_overrides().keys()));

    let mut tails: Vec<&Segment> = Vec::new();
    for seg in nu.segments() {
        if seg.start >= *gamma {
            break;
        }
        let cut = if seg.end <= *gamma { seg.end.clone() } else { gamma.clone() };
        let clip_len = seg.start.left_sub(&cut)?;
        match clip_len.as_nat() {
            Some(k) => {
                for j in 0..k {
                    pointwise.insert(seg.start.add(&Ordinal::from_nat(j)));
                }
            }
            None => {
                // hom basis overrides touch an injection at finitely many
                // points; peel those off so the tail sees the base rule only
                if !matches!(seg.rule, SegmentRule::Constant(_)) {
                    for &n in p.hom_base().overrides().keys() {
                        if let Some(alpha) = seg.injection_preimage(n, &cut)? {
                            pointwise.insert(alpha);
                        }
                    }
                }
                tails.push(seg);
            }
        }
    }

    for alpha in &pointwise {
        let v = nu.eval(alpha)?;
        let beta = p.beta_at(alpha)?;
        let rhs = nu.eval(&beta)?;
        if p.hom_at(alpha).apply(&v) != rhs {
            return Ok(false);
        }
    }

    for seg in tails {
        match (&seg.rule, p.beta_base()) {
            (SegmentRule::Constant(g), BetaRule::Identity) => {
                // hom is constant across the tail, so one identity decides it
                if p.hom_base().apply(g) != *g {
                    return Ok(false);
                }
            }
            (SegmentRule::Constant(g), BetaRule::Constant(c)) => {
                if *c > seg.start {
                    return Err(Error::OutOfRange(format!(
                        "level rule constant {c} exceeds levels from {}",
                        seg.start
                    )));
                }
                if p.hom_base().apply(g) != nu.eval(c)? {
                    return Ok(false);
                }
            }
            (rule, BetaRule::Identity) => match composite_family(rule, p.hom_base().base()) {
                Family::Constant(_) | Family::Injective => {
                    // a fixed-point identity h(v(alpha)) = v(alpha) across an
                    // injective family forces the hom to fix infinitely many
                    // distinct values; only the identity rule does, and that
                    // case is Family::Injective with h = id
                    if matches!(
                        normalised_base(p.hom_base().base()),
                        HomRule::Identity
                    ) {
                        continue;
                    }
                    return Ok(false);
                }
                Family::Unknown => {
                    // residue collapses never fix an unbounded injective
                    // family: large indices map below the modulus
                    return Ok(false);
                }
            },
            (rule, BetaRule::Constant(c)) => {
                if *c > seg.start {
                    return Err(Error::OutOfRange(format!(
                        "level rule constant {c} exceeds levels from {}",
                        seg.start
                    )));
                }
                let rhs = nu.eval(c)?;
                match composite_family(rule, p.hom_base().base()) {
                    Family::Constant(v) => {
                        if v != rhs {
                            return Ok(false);
                        }
                    }
                    Family::Injective => return Ok(false),
                    Family::Unknown => {
                        return Err(Error::Undecided(format!(
                            "segment [{}, {}) against hom rule {:?}",
                            seg.start,
                            seg.end,
                            p.hom_base().base()
                        )))
                    }
                }
            }
        }
    }
    Ok(true)
}

fn normalised_base(h: &HomRule) -> &HomRule {
    match h {
        HomRule::BasisAffine { scale: 1, shift: 0 } => &HomRule::Identity,
        other => other,
    }
}

/// Recognizes the strategy family for the parity expansion below `gamma`:
/// `nu(0) = x0+x1`, every later value a consecutive pair sum
/// `x_{2n} + x_{2n+1}`, and no value repeated.
pub fn is_pair_family(nu: &NuDescriptor, gamma: &Ordinal) -> Result<bool> {
    if *gamma > *nu.domain_sup() {
        return Err(Error::OutOfRange(format!(
            "gamma {gamma} exceeds the domain supremum {}",
            nu.domain_sup()
        )));
    }
    if gamma.is_zero() {
        return Ok(true);
    }
    let anchor = GroupElement::from_support([0, 1]);
    if nu.eval(&Ordinal::zero())? != anchor {
        return Ok(false);
    }
    let pair_index = |g: &GroupElement| -> Option<u64> {
        match g.support() {
            [a, b] if *a % 2 == 0 && *b == *a + 1 => Some(*a / 2),
            _ => None,
        }
    };

    // explicitly known values: overrides plus isolated constant points
    let mut explicit: Vec<(Ordinal, u64)> = Vec::new();
    for (k, v) in nu.overrides() {
        if *k < *gamma {
            match pair_index(v) {
                Some(idx) => explicit.push((k.clone(), idx)),
                None => return Ok(false),
            }
        }
    }
    let mut pair_segments: Vec<&Segment> = Vec::new();
    for seg in nu.segments() {
        if seg.start >= *gamma {
            break;
        }
        let cut = if seg.end <= *gamma { seg.end.clone() } else { gamma.clone() };
        let clip_len = seg.start.left_sub(&cut)?;
        match &seg.rule {
            SegmentRule::PairInjection { .. } => pair_segments.push(seg),
            SegmentRule::BasisInjection { .. } => {
                // single basis vectors are never pair sums
                if uncovered_point(nu, seg, &clip_len).is_some() {
                    return Ok(false);
                }
            }
            SegmentRule::Constant(g) => match clip_len.as_nat() {
                // an infinite constant run repeats its value
                None => return Ok(false),
                Some(k) => {
                    let mut pts = Vec::new();
                    for j in 0..k {
                        let alpha = seg.start.add(&Ordinal::from_nat(j));
                        if !nu.overrides().contains_key(&alpha) {
                            pts.push(alpha);
                        }
                    }
                    if pts.len() >= 2 {
                        return Ok(false); // same value twice
                    }
                    if let Some(alpha) = pts.pop() {
                        match pair_index(g) {
                            Some(idx) => explicit.push((alpha, idx)),
                            None => return Ok(false),
                        }
                    }
                }
            },
        }
    }

    // repetitions among the explicit values
    let mut seen = BTreeSet::new();
    for (_, idx) in &explicit {
        if !seen.insert(*idx) {
            return Ok(false);
        }
    }
    // explicit values colliding with a pair segment's reservoir
    for (_, idx) in &explicit {
        if *idx == 0 {
            continue; // reservoirs start at e = 1
        }
        let (slot, code) = unpair(idx - 1);
        for seg in &pair_segments {
            let SegmentRule::PairInjection { slot: s } = &seg.rule else { unreachable!() };
            if *s != slot {
                continue;
            }
            if let Ok(pos) = interval_decode(&seg.len(), code) {
                let alpha = seg.start.add(&pos);
                let cut = if seg.end <= *gamma { &seg.end } else { gamma };
                if alpha < *cut && !nu.overrides().contains_key(&alpha) {
                    return Ok(false);
                }
            }
        }
    }
    // two reservoirs with the same slot are treated as a repetition; the
    // strategies always allocate fresh slots, so this is never a false alarm
    // for engine-built descriptors
    let mut slots = BTreeSet::new();
    for seg in &pair_segments {
        let SegmentRule::PairInjection { slot } = &seg.rule else { unreachable!() };
        if !slots.insert(*slot) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A point of a clipped segment not shadowed by an override; `None` when
/// every point is shadowed.
fn uncovered_point(nu: &NuDescriptor, seg: &Segment, clip_len: &Ordinal) -> Option<Ordinal> {
    match clip_len.as_nat() {
        Some(k) => (0..k)
            .map(|j| seg.start.add(&Ordinal::from_nat(j)))
            .find(|alpha| !nu.overrides().contains_key(alpha)),
        None => {
            // infinitely many points, finitely many overrides: walk probes
            for j in 0.. {
                let alpha = seg.start.add(&Ordinal::from_nat(j));
                if !nu.overrides().contains_key(&alpha) {
                    return Some(alpha);
                }
            }
            unreachable!()
        }
    }
}

// ---------------------------------------------------------------------------
// Wire forms
// ---------------------------------------------------------------------------

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}:", self.start, self.end)?;
        match &self.rule {
            SegmentRule::Constant(g) => write!(f, "CONST({g})"),
            SegmentRule::BasisInjection { partition, color, slot } => {
                write!(f, "BINJ(zeta={},color={color},slot={slot})", partition.length())
            }
            SegmentRule::PairInjection { slot } => write!(f, "PINJ(slot={slot})"),
        }
    }
}

impl FromStr for Segment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Segment> {
        let (range, rule) =
            s.split_once(':').ok_or_else(|| Error::parse(0, "expected start..end:RULE"))?;
        let (a, b) =
            range.split_once("..").ok_or_else(|| Error::parse(0, "expected start..end"))?;
        let start: Ordinal = a.parse()?;
        let end: Ordinal = b.parse()?;
        let rule = if let Some(inner) = rule.strip_prefix("CONST(").and_then(|r| r.strip_suffix(')'))
        {
            SegmentRule::Constant(inner.parse()?)
        } else if let Some(inner) = rule.strip_prefix("BINJ(").and_then(|r| r.strip_suffix(')')) {
            let mut zeta = None;
            let mut color = None;
            let mut slot = None;
            for kv in inner.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::parse(0, "expected key=value in BINJ"))?;
                match k {
                    "zeta" => zeta = Some(v.parse::<Ordinal>()?),
                    "color" => color = Some(v.parse::<Ordinal>()?),
                    "slot" => {
                        slot = Some(v.parse::<u64>().map_err(|_| Error::parse(0, "bad slot"))?)
                    }
                    _ => return Err(Error::parse(0, format!("unknown BINJ field {k}"))),
                }
            }
            let (zeta, color, slot) = match (zeta, color, slot) {
                (Some(z), Some(c), Some(s)) => (z, c, s),
                _ => return Err(Error::parse(0, "BINJ needs zeta, color and slot")),
            };
            SegmentRule::BasisInjection { partition: OmegaPartition::new(zeta)?, color, slot }
        } else if let Some(inner) = rule.strip_prefix("PINJ(").and_then(|r| r.strip_suffix(')')) {
            let v = inner
                .strip_prefix("slot=")
                .ok_or_else(|| Error::parse(0, "expected PINJ(slot=...)"))?;
            SegmentRule::PairInjection {
                slot: v.parse::<u64>().map_err(|_| Error::parse(0, "bad slot"))?,
            }
        } else {
            return Err(Error::parse(0, "expected CONST(, BINJ( or PINJ("));
        };
        Segment::new(start, end, rule)
    }
}

fn write_descriptor_body(
    f: &mut fmt::Formatter<'_>,
    sup: &Ordinal,
    segments: &[Segment],
    overrides: impl Iterator<Item = (Ordinal, GroupElement)>,
) -> fmt::Result {
    write!(f, "sup={sup}; segs=[")?;
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            write!(f, "; ")?;
        }
        write!(f, "{seg}")?;
    }
    write!(f, "]; over=[")?;
    for (i, (k, v)) in overrides.enumerate() {
        if i > 0 {
            write!(f, "; ")?;
        }
        write!(f, "{k}:={v}")?;
    }
    write!(f, "]")
}

impl fmt::Display for NuDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nu{{")?;
        write_descriptor_body(
            f,
            &self.domain_sup,
            &self.segments,
            self.overrides.iter().map(|(k, v)| (k.clone(), v.clone())),
        )?;
        write!(f, "}}")
    }
}

/// Descriptor delta carried by transcript move lines: the new supremum, the
/// appended segments and the added overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuDelta {
    pub new_sup: Ordinal,
    pub segments: Vec<Segment>,
    pub overrides: Vec<(Ordinal, GroupElement)>,
}

impl NuDelta {
    /// Structural difference `new - old`; the new descriptor must extend the
    /// old one by appending.
    pub fn diff(old: &NuDescriptor, new: &NuDescriptor) -> Result<NuDelta> {
        if new.segments.len() < old.segments.len()
            || new.segments[..old.segments.len()] != old.segments[..]
        {
            return Err(Error::InvalidDescriptor(
                "extension does not append to the old segment list".into(),
            ));
        }
        for (k, v) in &old.overrides {
            if new.overrides.get(k) != Some(v) {
                return Err(Error::InvalidDescriptor(
                    "extension drops or changes an old override".into(),
                ));
            }
        }
        let segments = new.segments[old.segments.len()..].to_vec();
        let overrides = new
            .overrides
            .iter()
            .filter(|(k, _)| !old.overrides.contains_key(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Ok(NuDelta { new_sup: new.domain_sup.clone(), segments, overrides })
    }

    pub fn apply(&self, old: &NuDescriptor) -> Result<NuDescriptor> {
        let mut segments = old.segments.clone();
        segments.extend(self.segments.iter().cloned());
        let mut overrides = old.overrides.clone();
        for (k, v) in &self.overrides {
            overrides.insert(k.clone(), v.clone());
        }
        let nu = NuDescriptor::new(segments, overrides)?;
        if nu.domain_sup != self.new_sup {
            return Err(Error::InvalidDescriptor(format!(
                "delta supremum {} does not match the extended domain {}",
                self.new_sup, nu.domain_sup
            )));
        }
        Ok(nu)
    }
}

impl fmt::Display for NuDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "delta{{")?;
        write_descriptor_body(f, &self.new_sup, &self.segments, self.overrides.iter().cloned())?;
        write!(f, "}}")
    }
}

fn parse_descriptor_body(s: &str) -> Result<(Ordinal, Vec<Segment>, Vec<(Ordinal, GroupElement)>)> {
    let (sup_part, rest) =
        s.split_once("; segs=[").ok_or_else(|| Error::parse(0, "expected sup=...; segs=["))?;
    let sup: Ordinal = sup_part
        .strip_prefix("sup=")
        .ok_or_else(|| Error::parse(0, "expected sup="))?
        .parse()?;
    let (segs_part, over_part) =
        rest.split_once("]; over=[").ok_or_else(|| Error::parse(0, "expected ]; over=["))?;
    let over_part =
        over_part.strip_suffix(']').ok_or_else(|| Error::parse(0, "expected closing ]"))?;
    let mut segments = Vec::new();
    if !segs_part.is_empty() {
        for item in segs_part.split("; ") {
            segments.push(item.parse()?);
        }
    }
    let mut overrides = Vec::new();
    if !over_part.is_empty() {
        for item in over_part.split("; ") {
            let (k, v) =
                item.split_once(":=").ok_or_else(|| Error::parse(0, "expected key:=value"))?;
            overrides.push((k.parse()?, v.parse()?));
        }
    }
    Ok((sup, segments, overrides))
}

impl FromStr for NuDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<NuDescriptor> {
        let body = s
            .strip_prefix("nu{")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::parse(0, "expected nu{...}"))?;
        let (sup, segments, overrides) = parse_descriptor_body(body)?;
        let nu = NuDescriptor::new(segments, overrides.into_iter().collect())?;
        if nu.domain_sup != sup {
            return Err(Error::InvalidDescriptor(format!(
                "declared supremum {sup} does not match the segments ({})",
                nu.domain_sup
            )));
        }
        Ok(nu)
    }
}

impl FromStr for NuDelta {
    type Err = Error;

    fn from_str(s: &str) -> Result<NuDelta> {
        let body = s
            .strip_prefix("delta{")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::parse(0, "expected delta{...}"))?;
        let (new_sup, segments, overrides) = parse_descriptor_body(body)?;
        Ok(NuDelta { new_sup, segments, overrides })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupHom;
    use crate::structure::AElement;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn ge(s: &str) -> GroupElement {
        s.parse().unwrap()
    }

    fn omega() -> Ordinal {
        Ordinal::omega()
    }

    /// Constant-zero over [0, w) with the anchor override at 0.
    fn anchored_zero() -> NuDescriptor {
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        NuDescriptor::new(
            vec![Segment::new(Ordinal::zero(), omega(), SegmentRule::Constant(GroupElement::zero()))
                .unwrap()],
            over,
        )
        .unwrap()
    }

    fn pair_descriptor(sup: &str) -> NuDescriptor {
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), ord(sup), SegmentRule::PairInjection { slot: 0 }).unwrap(),
            ],
            over,
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let nu = anchored_zero();
        assert_eq!(nu.eval(&Ordinal::zero()).unwrap(), ge("x0+x1"));
        assert_eq!(nu.eval(&Ordinal::from_nat(5)).unwrap(), GroupElement::zero());
        assert!(nu.eval(&omega()).is_err());

        // hand-enumerated reservoir of the pair rule on [1, w), slot 0:
        // positions code as idx = alpha - 1, so e = 1 + pair(0, idx)
        let nu = pair_descriptor("w^1*1");
        for (alpha, idx) in [(1u64, 0u64), (2, 1), (3, 2)] {
            let e = 1 + pair(0, idx).unwrap();
            assert_eq!(
                nu.eval(&Ordinal::from_nat(alpha)).unwrap(),
                GroupElement::from_support([2 * e, 2 * e + 1]),
                "value at {alpha}"
            );
        }
    }

    #[test]
    fn support_preimage_examples() {
        let constant = NuDescriptor::constant(ge("x0"), omega()).unwrap();
        assert_eq!(constant.support_preimage(0, &omega()).unwrap(), Preimage::Infinite);
        assert_eq!(
            constant.support_preimage(1, &omega()).unwrap(),
            Preimage::Finite(vec![])
        );

        // injections hit each index at most once
        let part = OmegaPartition::new(ord("w^1*2")).unwrap();
        let binj = NuDescriptor::new(
            vec![Segment::new(
                Ordinal::zero(),
                omega(),
                SegmentRule::BasisInjection { partition: part, color: ord("w^1*1"), slot: 3 },
            )
            .unwrap()],
            BTreeMap::new(),
        )
        .unwrap();
        for n in 0..200u64 {
            match binj.support_preimage(n, &omega()).unwrap() {
                Preimage::Finite(v) => assert!(v.len() <= 1),
                Preimage::Infinite => panic!("injection preimage must be finite"),
            }
        }
        // and the preimage is consistent with eval on a scan
        for alpha in 0..50u64 {
            let v = binj.eval(&Ordinal::from_nat(alpha)).unwrap();
            let n = v.support()[0];
            assert_eq!(
                binj.support_preimage(n, &omega()).unwrap(),
                Preimage::Finite(vec![Ordinal::from_nat(alpha)])
            );
        }
    }

    #[test]
    fn apply_examples() {
        let nu = anchored_zero();
        let a1 = Element::a(Ordinal::zero(), ge("x1"));
        assert_eq!(nu.apply(&a1).unwrap(), Element::a(Ordinal::zero(), ge("x0")));

        // a B-element whose base the descriptor never touches is fixed
        let eta: Element = "B(w^1*1; 3)".parse().unwrap();
        assert_eq!(nu.apply(&eta).unwrap(), eta);

        // the obstruction: constantly nonzero over an infinite run
        let bad = NuDescriptor::constant(ge("x0"), omega()).unwrap();
        let eta0: Element = "B(w^1*1; 0)".parse().unwrap();
        assert_eq!(
            bad.apply(&eta0),
            Err(Error::IllegalImage(
                "index 0 is hit at infinitely many coordinates below w^1*1".into()
            ))
        );
        // the same descriptor satisfies the literal per-bound condition
        assert!(bad.is_valid());
    }

    #[test]
    fn validity_flags() {
        let w = omega();
        assert!(NuDescriptor::constant(ge("x2"), w.clone()).unwrap().is_valid());
        // a proper bound cuts an infinite constant run: invalid
        assert!(!NuDescriptor::constant(ge("x2"), ord("w^1*1+w^0*1")).unwrap().is_valid());
        assert!(!NuDescriptor::constant(ge("x2"), ord("w^1*2")).unwrap().is_valid());
        // zero constants are always valid
        assert!(NuDescriptor::constant(GroupElement::zero(), ord("w^2*1")).unwrap().is_valid());
        // a final run of length exactly w is fine
        let nu = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), w.clone(), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(w.clone(), ord("w^1*2"), SegmentRule::Constant(ge("x1"))).unwrap(),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(nu.is_valid());
    }

    #[test]
    fn involution_on_mixed_elements() {
        let nu = pair_descriptor("w^1*1");
        let mut elems: Vec<Element> = vec![
            Element::a(Ordinal::zero(), ge("x0")),
            Element::a(Ordinal::from_nat(7), ge("x3+x5")),
            "B(w^1*1; 4)".parse().unwrap(),
            "B(w^0*3; 0; 0\u{21a6}G1_2)".parse().unwrap(),
        ];
        // a B-element with three deviations under a two-segment descriptor
        let mut devs = BTreeMap::new();
        devs.insert(Ordinal::zero(), Coset::new(9, true));
        devs.insert(Ordinal::from_nat(2), Coset::new(4, false));
        devs.insert(Ordinal::from_nat(5), Coset::new(7, true));
        elems.push(Element::B(BElement::new(omega(), 9, devs).unwrap()));
        for e in &elems {
            assert!(nu.involution_check(e).unwrap(), "f(f(e)) = e for {e}");
        }
        assert!(nu.involution_check(&Element::a(omega(), ge("x0"))).is_err());
    }

    use crate::group::Coset;

    #[test]
    fn end_extension_examples() {
        let nu = pair_descriptor("w^1*1");
        assert!(nu.end_extends(&nu));
        let bigger = nu
            .extended(
                Segment::new(omega(), ord("w^1*1+w^0*2"), SegmentRule::PairInjection { slot: 1 })
                    .unwrap(),
                [],
            )
            .unwrap();
        assert!(bigger.end_extends(&nu));
        assert!(!nu.end_extends(&bigger));

        // a conflicting override at 0 breaks extension
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x5"));
        let conflicting = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), ord("w^1*1"), SegmentRule::PairInjection { slot: 0 })
                    .unwrap(),
            ],
            over,
        )
        .unwrap();
        assert!(!conflicting.end_extends(&nu));
        assert!(!nu.end_extends(&conflicting));

        // same shape, different reservoir: not an extension
        let other_slot = {
            let mut over = BTreeMap::new();
            over.insert(Ordinal::zero(), ge("x0+x1"));
            NuDescriptor::new(
                vec![
                    Segment::new(
                        Ordinal::zero(),
                        ord("w^0*1"),
                        SegmentRule::Constant(GroupElement::zero()),
                    )
                    .unwrap(),
                    Segment::new(ord("w^0*1"), ord("w^1*1"), SegmentRule::PairInjection { slot: 9 })
                        .unwrap(),
                ],
                over,
            )
            .unwrap()
        };
        assert!(!other_slot.end_extends(&nu));
    }

    #[test]
    fn monotone_extension_agrees_below() {
        let nu = pair_descriptor("w^1*1");
        let ext = nu
            .extended(
                Segment::new(omega(), ord("w^1*2"), SegmentRule::PairInjection { slot: 4 }).unwrap(),
                [],
            )
            .unwrap();
        assert!(ext.end_extends(&nu));
        for alpha in 0..40u64 {
            let alpha = Ordinal::from_nat(alpha);
            assert_eq!(nu.eval(&alpha).unwrap(), ext.eval(&alpha).unwrap());
        }
        let e = Element::a(Ordinal::from_nat(3), ge("x2"));
        assert_eq!(nu.apply(&e).unwrap(), ext.apply(&e).unwrap());
    }

    #[test]
    fn expansion_condition_for_parity_rules() {
        let p = PDescriptor::parity();
        // the pair family is compatible below any gamma in range
        let nu = pair_descriptor("w^1*1");
        assert!(expansion_condition(&p, &nu, &omega()).unwrap());
        assert!(expansion_condition(&p, &nu, &Ordinal::from_nat(3)).unwrap());

        // a stray single basis value breaks it: collapse sends x2 to x0
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        over.insert(Ordinal::from_nat(1), ge("x2"));
        let bad = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), omega(), SegmentRule::PairInjection { slot: 0 }).unwrap(),
            ],
            over,
        )
        .unwrap();
        assert!(!expansion_condition(&p, &bad, &omega()).unwrap());

        // identity homs with the identity level map accept anything
        let p_id = PDescriptor::uniform(BetaRule::Identity, GroupHom::identity());
        let any = NuDescriptor::constant(ge("x3+x4"), ord("w^1*3")).unwrap();
        assert!(expansion_condition(&p_id, &any, &ord("w^1*3")).unwrap());
    }

    #[test]
    fn expansion_condition_refuses_outside_fragment() {
        // basis injection against a residue collapse with a constant level
        // map is outside the engineered fragment on an infinite tail
        let p = PDescriptor::uniform(
            BetaRule::Constant(Ordinal::zero()),
            GroupHom::from_rule(HomRule::Residue(3)),
        );
        let part = OmegaPartition::new(omega()).unwrap();
        let nu = NuDescriptor::new(
            vec![Segment::new(
                Ordinal::zero(),
                omega(),
                SegmentRule::BasisInjection { partition: part, color: Ordinal::zero(), slot: 0 },
            )
            .unwrap()],
            BTreeMap::new(),
        )
        .unwrap();
        assert!(matches!(expansion_condition(&p, &nu, &omega()), Err(Error::Undecided(_))));
        // but any finite gamma is decided pointwise
        assert!(expansion_condition(&p, &nu, &Ordinal::from_nat(3)).is_ok());
    }

    #[test]
    fn pair_family_recognizer() {
        let nu = pair_descriptor("w^1*1");
        assert!(is_pair_family(&nu, &omega()).unwrap());
        assert!(is_pair_family(&nu, &Ordinal::from_nat(5)).unwrap());

        // forced repetition through overrides
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        over.insert(Ordinal::from_nat(2), ge("x8+x9"));
        over.insert(Ordinal::from_nat(7), ge("x8+x9"));
        let repeated = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), omega(), SegmentRule::PairInjection { slot: 0 }).unwrap(),
            ],
            over,
        )
        .unwrap();
        assert!(!is_pair_family(&repeated, &omega()).unwrap());

        // a non-aligned pair is not of the required form
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        over.insert(Ordinal::from_nat(3), ge("x1+x2"));
        let skewed = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), omega(), SegmentRule::PairInjection { slot: 0 }).unwrap(),
            ],
            over,
        )
        .unwrap();
        assert!(!is_pair_family(&skewed, &omega()).unwrap());

        // an override equal to a reservoir value collides with it
        let clash_value = {
            let probe = pair_descriptor("w^1*1");
            probe.eval(&Ordinal::from_nat(2)).unwrap()
        };
        let mut over = BTreeMap::new();
        over.insert(Ordinal::zero(), ge("x0+x1"));
        over.insert(Ordinal::from_nat(40), clash_value);
        let clashing = NuDescriptor::new(
            vec![
                Segment::new(Ordinal::zero(), ord("w^0*1"), SegmentRule::Constant(GroupElement::zero()))
                    .unwrap(),
                Segment::new(ord("w^0*1"), omega(), SegmentRule::PairInjection { slot: 0 }).unwrap(),
            ],
            over,
        )
        .unwrap();
        assert!(!is_pair_family(&clashing, &omega()).unwrap());

        // the anchor value must be present
        let plain = NuDescriptor::constant(GroupElement::zero(), omega()).unwrap();
        assert!(!is_pair_family(&plain, &omega()).unwrap());
        assert!(is_pair_family(&plain, &Ordinal::zero()).unwrap());
    }

    #[test]
    fn delta_diff_and_apply_round_trip() {
        let nu = pair_descriptor("w^1*1");
        let ext = nu
            .extended(
                Segment::new(omega(), ord("w^1*1+w^0*3"), SegmentRule::PairInjection { slot: 2 })
                    .unwrap(),
                [(omega(), ge("x20+x21"))],
            )
            .unwrap();
        let delta = NuDelta::diff(&nu, &ext).unwrap();
        assert_eq!(delta.apply(&nu).unwrap(), ext);
        assert_eq!(delta.segments.len(), 1);
        assert_eq!(delta.overrides.len(), 1);
    }

    #[test]
    fn wire_round_trips() {
        let nu = pair_descriptor("w^1*1");
        let s = nu.to_string();
        assert_eq!(s.parse::<NuDescriptor>().unwrap(), nu);
        let part = OmegaPartition::new(ord("w^3*1")).unwrap();
        let binj = NuDescriptor::new(
            vec![Segment::new(
                Ordinal::zero(),
                ord("w^2*1"),
                SegmentRule::BasisInjection { partition: part, color: ord("w^0*4"), slot: 7 },
            )
            .unwrap()],
            BTreeMap::new(),
        )
        .unwrap();
        let s = binj.to_string();
        assert_eq!(s.parse::<NuDescriptor>().unwrap(), binj);
        let delta = NuDelta {
            new_sup: ord("w^1*2"),
            segments: vec![
                Segment::new(omega(), ord("w^1*2"), SegmentRule::PairInjection { slot: 1 }).unwrap(),
            ],
            overrides: vec![(Ordinal::zero(), ge("x0+x1"))],
        };
        let s = delta.to_string();
        assert_eq!(s.parse::<NuDelta>().unwrap(), delta);
    }

    #[test]
    fn apply_respects_deviation_translation() {
        // pointwise recomputation of a B-image under a mixed descriptor
        let nu = pair_descriptor("w^1*1");
        let mut devs = BTreeMap::new();
        devs.insert(Ordinal::from_nat(1), Coset::new(2, true));
        let eta = BElement::new(omega(), 2, devs).unwrap();
        let image = match nu.apply(&Element::B(eta.clone())).unwrap() {
            Element::B(b) => b,
            Element::A(_) => unreachable!(),
        };
        for alpha in 0..64u64 {
            let alpha = Ordinal::from_nat(alpha);
            let expected = eta.coset_at(&alpha).unwrap().translate(&nu.eval(&alpha).unwrap());
            assert_eq!(image.coset_at(&alpha).unwrap(), expected, "coordinate {alpha}");
        }
    }
}
