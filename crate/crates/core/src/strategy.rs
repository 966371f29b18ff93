//! The duplicator strategies and the spoiler players.
//!
//! Both built-in strategies keep a single invariant shape: the anchor
//! override `nu(0) = x0 + x1` (which swaps the two distinguished points) on
//! top of a constant-zero stub covering `[0, 1)`, followed by one injection
//! segment per answered move.  A move at stage `eps` seeing elements up to
//! level `L` extends the domain to `max(domain, L) + 1` — strictly above
//! everything mentioned — and fills the new interval with fresh values:
//!
//! * [`BasisStrategy`] (plain pair) uses fresh basis vectors coloured by the
//!   stage: the segment draws from the class `U_eps` of the game-length
//!   partition, so distinct stages can never collide and the no-repetition
//!   and finite-preimage demands hold by construction.
//! * [`PairStrategy`] (parity pair) uses fresh consecutive pair sums, whose
//!   reservoir slot encodes the stage; every value collapses onto
//!   `x0 + x1 = nu(0)` under the parity hom, which is exactly the
//!   compatibility condition the expansion relation needs.
//!
//! Neither strategy ever lacks a legal answer: any finite set of elements
//! lies below some level, and the fresh values exist at every stage.  The
//! [`Sequenced`] adapter lifts either strategy to finite-set moves one
//! element at a time (they also answer sets natively in one segment);
//! sub-moves get distinct reservoir slots so sequencing preserves
//! injectivity.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{AisMove, GameConfig, GameKind, GamePosition, IsoStrategy};
use crate::group::{Coset, GroupElement};
use crate::nu::{is_pair_family, NuDescriptor, Segment, SegmentRule};
use crate::ordinal::{pair, segment_code, Ordinal};
use crate::partition::OmegaPartition;
use crate::structure::{BElement, Element};
use crate::{Error, Result};

fn anchor_value() -> GroupElement {
    GroupElement::from_support([0, 1])
}

/// Constant-zero stub on `[0, 1)` with the anchor override.
fn anchored_initial() -> Result<NuDescriptor> {
    let mut overrides = BTreeMap::new();
    overrides.insert(Ordinal::zero(), anchor_value());
    NuDescriptor::new(
        vec![Segment::new(
            Ordinal::zero(),
            Ordinal::from_nat(1),
            SegmentRule::Constant(GroupElement::zero()),
        )?],
        overrides,
    )
}

/// Natural-number code of a stage, used to key reservoirs.
fn stage_code(length: &Ordinal, stage: &Ordinal) -> Result<u64> {
    match length.as_nat() {
        Some(_) => stage
            .as_nat()
            .ok_or_else(|| Error::OutOfRange("infinite stage in a finite game".into())),
        None => segment_code(length, stage),
    }
}

/// Domain supremum after covering the given elements: strictly above the
/// current domain and every mentioned level.
fn covering_sup(nu: &NuDescriptor, elements: &[&Element]) -> Ordinal {
    let mut hi = nu.domain_sup().clone();
    for e in elements {
        if *e.level() > hi {
            hi = e.level().clone();
        }
    }
    hi.successor()
}

fn fresh_rule(
    kind: GameKind,
    cfg: &GameConfig,
    stage: &Ordinal,
    sub_slot: u64,
) -> Result<SegmentRule> {
    match kind {
        GameKind::PlainPair => Ok(SegmentRule::BasisInjection {
            partition: OmegaPartition::new(cfg.length.clone())?,
            color: stage.clone(),
            slot: sub_slot,
        }),
        GameKind::ParityPair => Ok(SegmentRule::PairInjection {
            slot: pair(stage_code(&cfg.length, stage)?, sub_slot)?,
        }),
    }
}

fn extend_covering(
    kind: GameKind,
    cfg: &GameConfig,
    stage: &Ordinal,
    nu: &NuDescriptor,
    elements: &[&Element],
    sub_slot: u64,
) -> Result<NuDescriptor> {
    let new_sup = covering_sup(nu, elements);
    let segment =
        Segment::new(nu.domain_sup().clone(), new_sup, fresh_rule(kind, cfg, stage, sub_slot)?)?;
    nu.extended(segment, [])
}

/// Structural shape shared by both strategy states: the anchored stub, then
/// injection segments only, with the anchor as the only override.
fn check_state_shape(nu: &NuDescriptor, expect_basis: bool) -> Result<()> {
    let anchor: BTreeMap<Ordinal, GroupElement> =
        [(Ordinal::zero(), anchor_value())].into_iter().collect();
    if *nu.overrides() != anchor {
        return Err(Error::InconsistentState(
            "the state must carry exactly the anchor override".into(),
        ));
    }
    let segs = nu.segments();
    if segs.is_empty()
        || *segs[0].start() != Ordinal::zero()
        || *segs[0].end() != Ordinal::from_nat(1)
        || !matches!(segs[0].rule(), SegmentRule::Constant(g) if g.is_zero())
    {
        return Err(Error::InconsistentState(
            "the state must start with the constant-zero stub on [0, 1)".into(),
        ));
    }
    for seg in &segs[1..] {
        let ok = match seg.rule() {
            SegmentRule::BasisInjection { .. } => expect_basis,
            SegmentRule::PairInjection { .. } => !expect_basis,
            SegmentRule::Constant(_) => false,
        };
        if !ok {
            return Err(Error::InconsistentState(format!(
                "segment [{}, {}) carries the wrong rule kind for this strategy",
                seg.start(),
                seg.end()
            )));
        }
    }
    if !nu.is_valid() {
        return Err(Error::InconsistentState("the state violates the finiteness condition".into()));
    }
    Ok(())
}

/// Fresh-basis-vector duplicator for the plain pointed pair.
#[derive(Clone, Copy, Debug, Default)]
pub struct BasisStrategy;

impl IsoStrategy for BasisStrategy {
    fn initial_state(&self, _cfg: &GameConfig) -> Result<NuDescriptor> {
        anchored_initial()
    }

    fn respond(
        &self,
        cfg: &GameConfig,
        pos: &GamePosition,
        mv: &AisMove,
    ) -> Result<NuDescriptor> {
        let elements: Vec<&Element> = mv.elements().collect();
        extend_covering(GameKind::PlainPair, cfg, &pos.stage, &pos.nu, &elements, 0)
    }

    fn validate_resume(&self, cfg: &GameConfig, stage: &Ordinal, nu: &NuDescriptor) -> Result<()> {
        check_state_shape(nu, true)?;
        // colours must come from already-played stages and be pairwise fresh
        let mut last: Option<(Ordinal, u64)> = None;
        for seg in &nu.segments()[1..] {
            let SegmentRule::BasisInjection { partition, color, slot } = seg.rule() else {
                unreachable!("shape checked above");
            };
            if partition.length() != &cfg.length {
                return Err(Error::InconsistentState(format!(
                    "segment partition length {} differs from the game length {}",
                    partition.length(),
                    cfg.length
                )));
            }
            if color >= stage {
                return Err(Error::InconsistentState(format!(
                    "colour {color} was not available before stage {stage}"
                )));
            }
            let key = (color.clone(), *slot);
            if let Some(prev) = &last {
                if *prev >= key {
                    return Err(Error::InconsistentState(
                        "colours/slots must strictly increase along the state".into(),
                    ));
                }
            }
            last = Some(key);
        }
        Ok(())
    }
}

/// Fresh-pair-sum duplicator for the parity-expanded pointed pair.
#[derive(Clone, Copy, Debug, Default)]
pub struct PairStrategy;

impl IsoStrategy for PairStrategy {
    fn initial_state(&self, _cfg: &GameConfig) -> Result<NuDescriptor> {
        anchored_initial()
    }

    fn respond(
        &self,
        cfg: &GameConfig,
        pos: &GamePosition,
        mv: &AisMove,
    ) -> Result<NuDescriptor> {
        let elements: Vec<&Element> = mv.elements().collect();
        extend_covering(GameKind::ParityPair, cfg, &pos.stage, &pos.nu, &elements, 0)
    }

    fn validate_resume(&self, cfg: &GameConfig, stage: &Ordinal, nu: &NuDescriptor) -> Result<()> {
        check_state_shape(nu, false)?;
        // slots must come from reservoirs available before the stage; the
        // family recognizer then rules out any repetition
        for seg in &nu.segments()[1..] {
            let SegmentRule::PairInjection { slot } = seg.rule() else {
                unreachable!("shape checked above");
            };
            let (code, _sub) = crate::ordinal::unpair(*slot);
            let color = match cfg.length.as_nat() {
                Some(_) => Ordinal::from_nat(code),
                None => crate::ordinal::segment_decode(&cfg.length, code)?,
            };
            if color >= *stage {
                return Err(Error::InconsistentState(format!(
                    "reservoir slot {slot} was not available before stage {stage}"
                )));
            }
        }
        if !is_pair_family(nu, nu.domain_sup())? {
            return Err(Error::InconsistentState(
                "the state is not a repetition-free pair family".into(),
            ));
        }
        Ok(())
    }
}

/// Lifts a single-element strategy to finite-set moves by sequencing the
/// elements one extension at a time; sub-moves receive distinct reservoir
/// slots.  Singleton moves reproduce the base strategy's answers exactly.
#[derive(Clone, Copy, Debug)]
pub struct Sequenced<S>(pub S);

impl IsoStrategy for Sequenced<BasisStrategy> {
    fn initial_state(&self, cfg: &GameConfig) -> Result<NuDescriptor> {
        self.0.initial_state(cfg)
    }

    fn respond(
        &self,
        cfg: &GameConfig,
        pos: &GamePosition,
        mv: &AisMove,
    ) -> Result<NuDescriptor> {
        sequence_elements(GameKind::PlainPair, cfg, pos, mv)
    }

    fn validate_resume(&self, cfg: &GameConfig, stage: &Ordinal, nu: &NuDescriptor) -> Result<()> {
        self.0.validate_resume(cfg, stage, nu)
    }
}

impl IsoStrategy for Sequenced<PairStrategy> {
    fn initial_state(&self, cfg: &GameConfig) -> Result<NuDescriptor> {
        self.0.initial_state(cfg)
    }

    fn respond(
        &self,
        cfg: &GameConfig,
        pos: &GamePosition,
        mv: &AisMove,
    ) -> Result<NuDescriptor> {
        sequence_elements(GameKind::ParityPair, cfg, pos, mv)
    }

    fn validate_resume(&self, cfg: &GameConfig, stage: &Ordinal, nu: &NuDescriptor) -> Result<()> {
        self.0.validate_resume(cfg, stage, nu)
    }
}

fn sequence_elements(
    kind: GameKind,
    cfg: &GameConfig,
    pos: &GamePosition,
    mv: &AisMove,
) -> Result<NuDescriptor> {
    let elements: Vec<&Element> = mv.elements().collect();
    if elements.is_empty() {
        return extend_covering(kind, cfg, &pos.stage, &pos.nu, &[], 0);
    }
    let mut nu = pos.nu.clone();
    for (k, e) in elements.iter().enumerate() {
        nu = extend_covering(kind, cfg, &pos.stage, &nu, &[*e], k as u64)?;
    }
    Ok(nu)
}

/// Builds a strategy-shaped state for starting play at `stage`, as the
/// simplest state the validator accepts: the anchored stub plus (when the
/// stage is past 1) one injection segment over `[1, stage)` keyed by colour
/// zero.
pub fn synthetic_resume_state(
    kind: GameKind,
    cfg: &GameConfig,
    stage: &Ordinal,
) -> Result<NuDescriptor> {
    let initial = anchored_initial()?;
    if *stage <= Ordinal::from_nat(1) {
        return Ok(initial);
    }
    let rule = fresh_rule(kind, cfg, &Ordinal::zero(), 0)?;
    initial.extended(Segment::new(Ordinal::from_nat(1), stage.clone(), rule)?, [])
}

pub fn strategy_for(kind: GameKind) -> Box<dyn IsoStrategy> {
    match kind {
        GameKind::PlainPair => Box::new(BasisStrategy),
        GameKind::ParityPair => Box::new(PairStrategy),
    }
}

pub fn sequenced_strategy_for(kind: GameKind) -> Box<dyn IsoStrategy> {
    match kind {
        GameKind::PlainPair => Box::new(Sequenced(BasisStrategy)),
        GameKind::ParityPair => Box::new(Sequenced(PairStrategy)),
    }
}

// ---------------------------------------------------------------------------
// Spoiler players
// ---------------------------------------------------------------------------

/// Seeded random spoiler.  Levels are sampled below `w^3` with small
/// coefficients and supports stay below 32, matching the verification
/// regime; every draw goes through the one generator, so a fixed seed fixes
/// the whole play.
pub struct RandomAis {
    rng: ChaCha8Rng,
    set_size: usize,
}

impl RandomAis {
    pub fn new(seed: u64, set_size: usize) -> RandomAis {
        RandomAis { rng: ChaCha8Rng::seed_from_u64(seed), set_size: set_size.max(1) }
    }

    fn sample_level(&mut self) -> Ordinal {
        let c2 = self.rng.gen_range(0..4u64);
        let c1 = self.rng.gen_range(0..4u64);
        let c0 = self.rng.gen_range(0..8u64);
        Ordinal::term(2, c2).add(&Ordinal::term(1, c1)).add(&Ordinal::from_nat(c0))
    }

    fn sample_value(&mut self) -> GroupElement {
        let k = self.rng.gen_range(0..=4usize);
        GroupElement::from_support((0..k).map(|_| self.rng.gen_range(0..32u64)))
    }

    fn sample_element(&mut self) -> Element {
        let level = self.sample_level();
        if self.rng.gen_range(0..10u32) < 7 {
            Element::a(level, self.sample_value())
        } else {
            let base = self.rng.gen_range(0..8u64);
            let mut devs = BTreeMap::new();
            for _ in 0..self.rng.gen_range(0..=3u32) {
                let key = self.sample_level();
                if key < level {
                    devs.insert(
                        key,
                        Coset::new(self.rng.gen_range(0..32u64), self.rng.gen_bool(0.5)),
                    );
                }
            }
            Element::B(BElement::new(level, base, devs).expect("sampled keys are below the level"))
        }
    }

    pub fn next_move(&mut self, _cfg: &GameConfig) -> AisMove {
        let count = self.rng.gen_range(1..=self.set_size);
        let mut mv = AisMove::default();
        for _ in 0..count {
            let e = self.sample_element();
            if self.rng.gen_bool(0.5) {
                mv.left.push(e);
            } else {
                mv.right.push(e);
            }
        }
        mv
    }
}

/// Replays a fixed move list.
pub struct ScriptedAis {
    moves: std::vec::IntoIter<AisMove>,
}

impl ScriptedAis {
    pub fn new(moves: Vec<AisMove>) -> ScriptedAis {
        ScriptedAis { moves: moves.into_iter() }
    }

    pub fn next_move(&mut self) -> Option<AisMove> {
        self.moves.next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_step, new_game, resume_at};
    use crate::nu::Preimage;
    use crate::oracle::{audit_pairs, mentioned_basis_indices, AuditReport, FaultInjection};

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn elem(s: &str) -> Element {
        s.parse().unwrap()
    }

    #[test]
    fn stage_zero_answer_matches_the_partition() {
        // picking (w, x3) at stage 0 pushes the domain to w+1 and the fresh
        // value at w is a basis vector from class 0
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 1).unwrap();
        let pos = new_game(&cfg, &BasisStrategy).unwrap();
        let mv = AisMove { left: vec![elem("A(w^1*1; x3)")], right: vec![] };
        let next = game_step(&cfg, &pos, mv, &BasisStrategy).unwrap();
        assert_eq!(*next.nu.domain_sup(), ord("w^1*1+w^0*1"));
        let value = next.nu.eval(&ord("w^1*1")).unwrap();
        assert_eq!(value.support().len(), 1, "fresh values are basis vectors");
        let part = OmegaPartition::new(ord("w^3*1")).unwrap();
        assert!(part.member(&Ordinal::zero(), value.support()[0]).unwrap());
        assert!(next.map.contains(&(
            elem("A(w^1*1; x3)"),
            Element::a(ord("w^1*1"), "x3".parse::<GroupElement>().unwrap().add(&value)),
        )));
    }

    #[test]
    fn index_zero_only_comes_from_the_anchor() {
        // after three moves the preimage of index 0 below the domain is {0}
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 1).unwrap();
        let mut pos = new_game(&cfg, &BasisStrategy).unwrap();
        let mut ais = RandomAis::new(3, 1);
        for _ in 0..3 {
            pos = game_step(&cfg, &pos, ais.next_move(&cfg), &BasisStrategy).unwrap();
        }
        for n in [0u64, 1] {
            assert_eq!(
                pos.nu.support_preimage(n, pos.nu.domain_sup()).unwrap(),
                Preimage::Finite(vec![Ordinal::zero()]),
                "index {n} must only appear in the anchor"
            );
        }
    }

    #[test]
    fn pair_strategy_outputs_stay_in_the_family() {
        let cfg = GameConfig::new(GameKind::ParityPair, ord("w^3*1"), 1).unwrap();
        let mut pos = new_game(&cfg, &PairStrategy).unwrap();
        let mut ais = RandomAis::new(5, 1);
        for _ in 0..20 {
            pos = game_step(&cfg, &pos, ais.next_move(&cfg), &PairStrategy).unwrap();
            assert!(is_pair_family(&pos.nu, pos.nu.domain_sup()).unwrap());
            assert!(crate::nu::expansion_condition(
                cfg.left.expansion().unwrap(),
                &pos.nu,
                pos.nu.domain_sup()
            )
            .unwrap());
        }
    }

    #[test]
    fn resume_at_limit_then_play() {
        for kind in [GameKind::PlainPair, GameKind::ParityPair] {
            let cfg = GameConfig::new(kind, ord("w^3*1"), 1).unwrap();
            let strategy = strategy_for(kind);
            let stage = ord("w^1*1");
            let state = synthetic_resume_state(kind, &cfg, &stage).unwrap();
            assert_eq!(*state.domain_sup(), ord("w^1*1"));
            let mut pos = resume_at(&cfg, stage, state, strategy.as_ref()).unwrap();
            let mut ais = RandomAis::new(7, 1);
            for _ in 0..10 {
                pos = game_step(&cfg, &pos, ais.next_move(&cfg), strategy.as_ref()).unwrap();
            }
            assert_eq!(pos.stage, ord("w^1*1+w^0*10"));
        }
    }

    #[test]
    fn resume_rejects_repetition() {
        let cfg = GameConfig::new(GameKind::ParityPair, ord("w^3*1"), 1).unwrap();
        // two segments drawing from the same reservoir repeat values
        let bad = anchored_initial()
            .unwrap()
            .extended(
                Segment::new(Ordinal::from_nat(1), ord("w^1*1"), SegmentRule::PairInjection {
                    slot: 0,
                })
                .unwrap(),
                [],
            )
            .unwrap()
            .extended(
                Segment::new(ord("w^1*1"), ord("w^1*2"), SegmentRule::PairInjection { slot: 0 })
                    .unwrap(),
                [],
            )
            .unwrap();
        assert!(matches!(
            resume_at(&cfg, ord("w^1*2"), bad, &PairStrategy),
            Err(Error::InconsistentState(_))
        ));
    }

    #[test]
    fn resume_at_zero_equals_a_fresh_game() {
        for kind in [GameKind::PlainPair, GameKind::ParityPair] {
            let cfg = GameConfig::new(kind, ord("w^3*1"), 1).unwrap();
            let strategy = strategy_for(kind);
            let fresh = new_game(&cfg, strategy.as_ref()).unwrap();
            let resumed = resume_at(
                &cfg,
                Ordinal::zero(),
                strategy.initial_state(&cfg).unwrap(),
                strategy.as_ref(),
            )
            .unwrap();
            assert_eq!(fresh.stage, resumed.stage);
            assert_eq!(fresh.nu, resumed.nu);
            assert_eq!(fresh.map, resumed.map);
        }
    }

    #[test]
    fn set_moves_answered_in_one_extension() {
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 8).unwrap();
        let pos = new_game(&cfg, &BasisStrategy).unwrap();
        let mv = AisMove {
            left: vec![elem("A(0; x2)"), elem("A(w^1*1; x3)")],
            right: vec![elem("B(w^1*2; 1)")],
        };
        let next = game_step(&cfg, &pos, mv, &BasisStrategy).unwrap();
        assert_eq!(next.nu.segments().len(), pos.nu.segments().len() + 1);
        assert_eq!(*next.nu.domain_sup(), ord("w^1*2+w^0*1"));
        assert_eq!(next.map.len(), cfg.initial_map.len() + 3);
    }

    #[test]
    fn singleton_sets_reproduce_the_base_strategy() {
        for kind in [GameKind::PlainPair, GameKind::ParityPair] {
            let cfg = GameConfig::new(kind, ord("w^3*1"), 1).unwrap();
            let base = strategy_for(kind);
            let lifted = sequenced_strategy_for(kind);
            let mut pos_a = new_game(&cfg, base.as_ref()).unwrap();
            let mut pos_b = new_game(&cfg, lifted.as_ref()).unwrap();
            let mut ais = RandomAis::new(9, 1);
            for _ in 0..12 {
                let mv = ais.next_move(&cfg);
                pos_a = game_step(&cfg, &pos_a, mv.clone(), base.as_ref()).unwrap();
                pos_b = game_step(&cfg, &pos_b, mv, lifted.as_ref()).unwrap();
                assert_eq!(pos_a.nu, pos_b.nu);
                assert_eq!(pos_a.map, pos_b.map);
            }
        }
    }

    #[test]
    fn empty_set_move_advances_with_unchanged_map() {
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 8).unwrap();
        let lifted = sequenced_strategy_for(GameKind::PlainPair);
        let pos = new_game(&cfg, lifted.as_ref()).unwrap();
        let next = game_step(&cfg, &pos, AisMove::default(), lifted.as_ref()).unwrap();
        assert_eq!(next.map, pos.map);
        assert_eq!(next.stage, Ordinal::from_nat(1));
        assert!(next.nu.domain_sup() > pos.nu.domain_sup());
    }

    #[test]
    fn thirty_move_plays_audit_clean() {
        for kind in [GameKind::PlainPair, GameKind::ParityPair] {
            let cfg = GameConfig::new(kind, ord("w^3*1"), 1).unwrap();
            let strategy = strategy_for(kind);
            let mut pos = new_game(&cfg, strategy.as_ref()).unwrap();
            let mut ais = RandomAis::new(13, 1);
            let mut report = AuditReport::default();
            for _ in 0..30 {
                let before = pos.map.len();
                pos = game_step(&cfg, &pos, ais.next_move(&cfg), strategy.as_ref()).unwrap();
                let y_set: Vec<GroupElement> = mentioned_basis_indices(&pos.map)
                    .into_iter()
                    .map(GroupElement::basis)
                    .collect();
                let nu = pos.nu.clone();
                audit_pairs(
                    &cfg.left,
                    &cfg.right,
                    &pos.map,
                    &y_set,
                    before,
                    &mut |e| nu.apply(e),
                    &FaultInjection::none(),
                    &mut report,
                );
            }
            assert!(report.passed(), "{}", report.render("30-move play"));
            assert!(report.checked > 1000);
        }
    }

}
