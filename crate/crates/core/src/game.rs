//! The back-and-forth game state machine.
//!
//! A game runs between AIS (the spoiler, picking bounded element sets on
//! either side) and ISO (the duplicator, answering with an end-extension of
//! its current descriptor whose induced translation covers everything picked
//! so far).  Positions are immutable snapshots: the stage ordinal, the
//! duplicator's descriptor, the finite partial map accumulated so far, and
//! the move history.  The engine never pretends to play through a limit
//! stage; instead [`resume_at`] starts play at any symbolic stage from a
//! strategy-validated descriptor, which is how the transfinite claims get
//! exercised at desk scale.
//!
//! The duplicator answers through the [`IsoStrategy`] interface and loses
//! ([`crate::Error::IsoStuck`]) if its answer is not a legal extension.

use crate::nu::{NuDelta, NuDescriptor};
use crate::oracle::{audit_pairs, AuditReport, FaultInjection};
use crate::ordinal::Ordinal;
use crate::structure::{AElement, Element, Structure};
use crate::{Error, Result};

/// Which pointed pair is being played.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameKind {
    /// The plain structure, pointed at `(0, x1)` on the left and `(0, x0)`
    /// on the right.
    PlainPair,
    /// The parity expansion, pointed at `(0, x0)` and `(0, x1)`.
    ParityPair,
}

impl GameKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GameKind::PlainPair => "m-pair",
            GameKind::ParityPair => "n-pair",
        }
    }

    pub fn parse(s: &str) -> Result<GameKind> {
        match s {
            "m-pair" => Ok(GameKind::PlainPair),
            "n-pair" => Ok(GameKind::ParityPair),
            other => Err(Error::Transcript(format!("unknown game kind {other}"))),
        }
    }
}

/// Move-size sentinel: no bound on the (finite) set sizes.
pub const UNBOUNDED_MOVES: usize = usize::MAX;

/// A fixed playing field: the two pointed structures, the game length, the
/// per-move size bound, and the starting partial map.
#[derive(Clone, Debug)]
pub struct GameConfig {
    pub kind: GameKind,
    pub left: Structure,
    pub right: Structure,
    pub length: Ordinal,
    pub move_size_bound: usize,
    pub initial_map: Vec<(Element, Element)>,
}

impl GameConfig {
    /// Builds the standard pointed pair for `kind`; the initial map is
    /// oracle-audited before the config is handed out.
    pub fn new(kind: GameKind, length: Ordinal, move_size_bound: usize) -> Result<GameConfig> {
        let (left, right, initial_map) = match kind {
            GameKind::PlainPair => {
                let a1 = AElement::new(Ordinal::zero(), "x1".parse()?);
                let a2 = AElement::new(Ordinal::zero(), "x0".parse()?);
                (
                    Structure::plain().with_distinguished(a1.clone()),
                    Structure::plain().with_distinguished(a2.clone()),
                    vec![(Element::A(a1), Element::A(a2))],
                )
            }
            GameKind::ParityPair => {
                let a1 = AElement::new(Ordinal::zero(), "x0".parse()?);
                let a2 = AElement::new(Ordinal::zero(), "x1".parse()?);
                (
                    Structure::parity_expansion().with_distinguished(a1.clone()),
                    Structure::parity_expansion().with_distinguished(a2.clone()),
                    vec![(Element::A(a1), Element::A(a2))],
                )
            }
        };
        let cfg = GameConfig { kind, left, right, length, move_size_bound, initial_map };
        let report = cfg.audit_initial_map();
        if !report.passed() {
            return Err(Error::InvalidDescriptor(format!(
                "initial map is not a partial isomorphism: {}",
                report.verdict_line()
            )));
        }
        Ok(cfg)
    }

    fn audit_initial_map(&self) -> AuditReport {
        let mut report = AuditReport::default();
        let pairs = self.initial_map.clone();
        let mut image_of = |e: &Element| -> Result<Element> {
            pairs
                .iter()
                .find(|(d, _)| d == e)
                .map(|(_, i)| i.clone())
                .ok_or_else(|| Error::OutOfDomain(format!("{e} not in the initial map")))
        };
        audit_pairs(
            &self.left,
            &self.right,
            &self.initial_map,
            &[],
            0,
            &mut image_of,
            &FaultInjection::none(),
            &mut report,
        );
        report
    }
}

/// One spoiler move: element sets for each side.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AisMove {
    pub left: Vec<Element>,
    pub right: Vec<Element>,
}

impl AisMove {
    pub fn size(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.left.iter().chain(self.right.iter())
    }
}

/// A played move: the stage it started from, the spoiler's sets, and the
/// duplicator's descriptor delta.
#[derive(Clone, Debug)]
pub struct MoveRecord {
    pub stage: Ordinal,
    pub mv: AisMove,
    pub delta: NuDelta,
}

/// An immutable game snapshot.
#[derive(Clone, Debug)]
pub struct GamePosition {
    pub stage: Ordinal,
    pub nu: NuDescriptor,
    pub map: Vec<(Element, Element)>,
    pub history: Vec<MoveRecord>,
}

/// The duplicator interface.  Strategies are deterministic functions of the
/// position and move; they answer with a full replacement descriptor that
/// must end-extend the current one.
pub trait IsoStrategy {
    fn initial_state(&self, cfg: &GameConfig) -> Result<NuDescriptor>;

    fn respond(
        &self,
        cfg: &GameConfig,
        pos: &GamePosition,
        mv: &AisMove,
    ) -> Result<NuDescriptor>;

    /// Accepts a descriptor as a legal state for this strategy at the given
    /// stage, for starting play past a limit.
    fn validate_resume(&self, cfg: &GameConfig, stage: &Ordinal, nu: &NuDescriptor) -> Result<()>;
}

pub fn new_game(cfg: &GameConfig, strategy: &dyn IsoStrategy) -> Result<GamePosition> {
    Ok(GamePosition {
        stage: Ordinal::zero(),
        nu: strategy.initial_state(cfg)?,
        map: cfg.initial_map.clone(),
        history: Vec::new(),
    })
}

/// Starts play at an arbitrary (possibly limit) stage from a supplied
/// duplicator state.  The state must pass the strategy's own validator;
/// resuming at stage zero from the strategy's initial state is exactly a
/// fresh game.
pub fn resume_at(
    cfg: &GameConfig,
    stage: Ordinal,
    nu: NuDescriptor,
    strategy: &dyn IsoStrategy,
) -> Result<GamePosition> {
    if stage > cfg.length {
        return Err(Error::InconsistentState(format!(
            "stage {stage} lies beyond the game length {}",
            cfg.length
        )));
    }
    strategy.validate_resume(cfg, &stage, &nu)?;
    Ok(GamePosition { stage, nu, map: cfg.initial_map.clone(), history: Vec::new() })
}

/// Plays one move: validates the spoiler's sets, obtains the duplicator's
/// extension, checks its legality, and produces the successor position whose
/// map covers everything picked.
pub fn game_step(
    cfg: &GameConfig,
    pos: &GamePosition,
    mv: AisMove,
    strategy: &dyn IsoStrategy,
) -> Result<GamePosition> {
    if pos.stage >= cfg.length {
        return Err(Error::IllegalAisMove(format!(
            "the play lasts {} moves and is over at stage {}",
            cfg.length, pos.stage
        )));
    }
    if mv.size() > cfg.move_size_bound {
        return Err(Error::IllegalAisMove(format!(
            "{} elements exceed the move size bound {}",
            mv.size(),
            cfg.move_size_bound
        )));
    }
    for e in mv.left.iter() {
        if !cfg.left.contains(e) {
            return Err(Error::IllegalAisMove(format!("{e} is not in the left structure")));
        }
    }
    for e in mv.right.iter() {
        if !cfg.right.contains(e) {
            return Err(Error::IllegalAisMove(format!("{e} is not in the right structure")));
        }
    }

    let nu = strategy.respond(cfg, pos, &mv)?;
    if !nu.end_extends(&pos.nu) {
        return Err(Error::IsoStuck("the answer does not end-extend the current state".into()));
    }
    if !nu.is_valid() {
        return Err(Error::IsoStuck("the answer violates the finite-preimage condition".into()));
    }
    let delta = NuDelta::diff(&pos.nu, &nu)
        .map_err(|e| Error::IsoStuck(format!("non-appending extension: {e}")))?;

    let apply = |e: &Element| -> Result<Element> {
        nu.apply(e).map_err(|err| Error::IsoStuck(format!("cannot cover {e}: {err}")))
    };
    let mut map = pos.map.clone();
    let push_pair = |map: &mut Vec<(Element, Element)>, dom: Element, img: Element| {
        for (d, i) in map.iter() {
            if *d == dom {
                return if *i == img {
                    Ok(false)
                } else {
                    Err(Error::IsoStuck(format!("conflicting images for {dom}")))
                };
            }
            if *i == img {
                return Err(Error::IsoStuck(format!("image {img} already taken")));
            }
        }
        map.push((dom, img));
        Ok(true)
    };
    // recorded pairs must stay consistent with the extended translation
    for (d, i) in pos.map.iter() {
        let img = apply(d)?;
        if img != *i {
            return Err(Error::IsoStuck(format!("extension moves the committed image of {d}")));
        }
    }
    for e in mv.left.iter() {
        let img = apply(e)?;
        push_pair(&mut map, e.clone(), img)?;
    }
    for e in mv.right.iter() {
        // the translation is an involution, so the preimage of a right-side
        // pick is its own image
        let pre = apply(e)?;
        push_pair(&mut map, pre, e.clone())?;
    }

    let mut history = pos.history.clone();
    history.push(MoveRecord { stage: pos.stage.clone(), mv, delta });
    Ok(GamePosition { stage: pos.stage.successor(), nu, map, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::{strategy_for, BasisStrategy, RandomAis};

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn elem(s: &str) -> Element {
        s.parse().unwrap()
    }

    #[test]
    fn zero_length_game_permits_no_steps() {
        let cfg = GameConfig::new(GameKind::PlainPair, Ordinal::zero(), 1).unwrap();
        let pos = new_game(&cfg, &BasisStrategy).unwrap();
        assert_eq!(pos.map, cfg.initial_map);
        let mv = AisMove { left: vec![elem("A(0; x5)")], right: vec![] };
        assert!(matches!(
            game_step(&cfg, &pos, mv, &BasisStrategy),
            Err(Error::IllegalAisMove(_))
        ));
    }

    #[test]
    fn first_move_maps_through_the_anchor() {
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 1).unwrap();
        let pos = new_game(&cfg, &BasisStrategy).unwrap();
        let mv = AisMove { left: vec![elem("A(0; x5)")], right: vec![] };
        let next = game_step(&cfg, &pos, mv, &BasisStrategy).unwrap();
        // recompute through the descriptor: nu(0) = x0 + x1
        assert!(next.map.contains(&(elem("A(0; x5)"), elem("A(0; x0+x1+x5)"))));
        assert_eq!(next.stage, Ordinal::from_nat(1));
    }

    #[test]
    fn oversized_move_rejected() {
        let cfg = GameConfig::new(GameKind::PlainPair, ord("w^3*1"), 1).unwrap();
        let pos = new_game(&cfg, &BasisStrategy).unwrap();
        let mv = AisMove {
            left: vec![elem("A(0; x1)"), elem("A(0; x2)")],
            right: vec![elem("A(0; x3)")],
        };
        assert!(matches!(
            game_step(&cfg, &pos, mv, &BasisStrategy),
            Err(Error::IllegalAisMove(_))
        ));
    }

    #[test]
    fn right_side_picks_are_covered_by_the_involution() {
        let cfg = GameConfig::new(GameKind::ParityPair, ord("w^3*1"), 1).unwrap();
        let strategy = strategy_for(GameKind::ParityPair);
        let pos = new_game(&cfg, strategy.as_ref()).unwrap();
        let target = elem("A(w^1*1; x2)");
        let mv = AisMove { left: vec![], right: vec![target.clone()] };
        let next = game_step(&cfg, &pos, mv, strategy.as_ref()).unwrap();
        let (pre, img) = next.map.last().unwrap().clone();
        assert_eq!(img, target);
        // the preimage maps back onto the pick
        assert_eq!(next.nu.apply(&pre).unwrap(), target);
    }

    #[test]
    fn distinguished_pair_fixed_across_a_random_play() {
        for kind in [GameKind::PlainPair, GameKind::ParityPair] {
            let cfg = GameConfig::new(kind, ord("w^3*1"), 1).unwrap();
            let strategy = strategy_for(kind);
            let mut pos = new_game(&cfg, strategy.as_ref()).unwrap();
            let mut ais = RandomAis::new(11, 1);
            for _ in 0..30 {
                let mv = ais.next_move(&cfg);
                pos = game_step(&cfg, &pos, mv, strategy.as_ref()).unwrap();
                let (a1, a2) = &cfg.initial_map[0];
                assert_eq!(pos.nu.apply(a1).unwrap(), *a2, "anchor must keep the pointing");
            }
            // successive recorded answers form an extension chain
            let mut nu = strategy.initial_state(&cfg).unwrap();
            for rec in &pos.history {
                let next = rec.delta.apply(&nu).unwrap();
                assert!(next.end_extends(&nu));
                nu = next;
            }
            assert_eq!(nu, pos.nu);
        }
    }
}
