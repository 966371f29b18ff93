//! Command-line front end.
//!
//! Commands: `verify` (oracle suites), `selfplay` (seeded random spoiler
//! against the built-in duplicator), `play` (interactive spoiler REPL),
//! `replay` (byte-exact transcript re-derivation), `partition` (class and
//! coding utilities), `demo` (a guided tour).  Exit codes: 0 pass, 1
//! verification failure, 2 usage error.  Every command is deterministic
//! under a fixed seed and writes nothing beyond its declared transcript or
//! report outputs.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::game::{game_step, new_game, AisMove, GameConfig, GameKind, UNBOUNDED_MOVES};
use crate::oracle::{
    census_suite, expansion_equivalence_grid, fault_canary, kernel_suite, rigidity_probe,
    AuditReport, FaultInjection, ProbeTarget,
};
use crate::ordinal::{segment_code, segment_decode, Ordinal};
use crate::partition::OmegaPartition;
use crate::strategy::{strategy_for, synthetic_resume_state};
use crate::structure::Element;
use crate::transcript::{replay, scripted_play, selfplay, PlayOptions};
use crate::{Error, Result, ENGINE_VERSION};

#[derive(Parser)]
#[command(name = "eftower", version, about = "Transfinite back-and-forth game laboratory")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every oracle suite and report a verdict.
    Verify {
        /// Grid knobs as comma-separated key=value pairs
        /// (gamma, support, prules, nus, census, seed).
        #[arg(long, default_value = "")]
        bounds: String,
        /// Flip one coset parity inside the oracle to prove violations
        /// surface.
        #[arg(long, hide = true)]
        inject_fault: bool,
        /// Also write the report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Play a seeded random spoiler against the built-in duplicator.
    Selfplay {
        /// Which pointed pair to play: m-pair or n-pair.
        #[arg(long)]
        game: String,
        /// Game length as an ordinal string.
        #[arg(long, default_value = "w^3*1")]
        length: String,
        #[arg(long, default_value_t = 16)]
        moves: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-move element bound; "max" lifts the bound.
        #[arg(long, default_value = "1")]
        set_bound: String,
        /// Start past a limit: stage as an ordinal string.
        #[arg(long)]
        resume_stage: Option<String>,
        /// Where to write the transcript.
        #[arg(long, default_value = "selfplay.transcript")]
        transcript: PathBuf,
        /// Answer sets through the element-at-a-time adapter.
        #[arg(long, hide = true)]
        sequenced: bool,
        #[arg(long)]
        strict: bool,
    },
    /// Interactive spoiler: you pick elements, the engine answers.
    Play {
        #[arg(long)]
        game: String,
        #[arg(long, default_value = "w^3*1")]
        length: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "play.transcript")]
        transcript: PathBuf,
    },
    /// Re-execute a transcript and compare byte for byte.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Partition and ordinal-coding utilities.
    Partition {
        /// Partition length as an ordinal string.
        #[arg(long)]
        length: String,
        /// Print the class of this natural.
        #[arg(long)]
        classify: Option<u64>,
        /// Enumerate a class (ordinal string), with --count elements.
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Code an ordinal below the length to its natural position.
        #[arg(long)]
        code: Option<String>,
        /// Decode a natural position back to an ordinal.
        #[arg(long)]
        decode: Option<u64>,
    },
    /// A guided, deterministic tour of the construction.
    Demo,
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Transcript(_) | Error::Parse { .. } | Error::OutOfRange(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Verify { bounds, inject_fault, report, strict: _ } => {
            cmd_verify(&bounds, inject_fault, report)
        }
        Command::Selfplay {
            game,
            length,
            moves,
            seed,
            set_bound,
            resume_stage,
            transcript,
            sequenced,
            strict: _,
        } => cmd_selfplay(&game, &length, moves, seed, &set_bound, resume_stage, transcript, sequenced),
        Command::Play { game, length, seed, transcript } => {
            cmd_play(&game, &length, seed, transcript)
        }
        Command::Replay { transcript } => cmd_replay(transcript),
        Command::Partition { length, classify, epsilon, count, code, decode } => {
            cmd_partition(&length, classify, epsilon, count, code, decode)
        }
        Command::Demo => cmd_demo(),
    }
}

struct Bounds {
    gamma: u64,
    support: u32,
    prules: usize,
    nus: usize,
    census: Vec<u32>,
    seed: u64,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { gamma: 3, support: 6, prules: 10, nus: 50, census: vec![2, 3, 4], seed: 0xEF }
    }
}

fn parse_bounds(s: &str) -> Result<Bounds> {
    let mut b = Bounds::default();
    for kv in s.split(',').filter(|kv| !kv.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::OutOfRange(format!("bounds need key=value, got {kv}")))?;
        let parse = |v: &str| -> Result<u64> {
            v.parse().map_err(|_| Error::OutOfRange(format!("bad bounds value {v}")))
        };
        match k {
            "gamma" => b.gamma = parse(v)?,
            "support" => b.support = parse(v)? as u32,
            "prules" => b.prules = parse(v)? as usize,
            "nus" => b.nus = parse(v)? as usize,
            "census" => b.census = (2..=parse(v)? as u32).collect(),
            "seed" => b.seed = parse(v)?,
            other => return Err(Error::OutOfRange(format!("unknown bounds key {other}"))),
        }
    }
    Ok(b)
}

fn cmd_verify(bounds: &str, inject_fault: bool, report_path: Option<PathBuf>) -> Result<i32> {
    let mut out = String::new();
    let mut total = AuditReport::default();
    if inject_fault {
        let canary = fault_canary(&FaultInjection::flip(0, false));
        out.push_str(&canary.render("fault canary (coset parity flipped)"));
        total.absorb(canary);
    } else {
        let b = parse_bounds(bounds)?;
        let kernel = kernel_suite();
        out.push_str(&kernel.render("ordinal kernel laws"));
        total.absorb(kernel);
        let grid = expansion_equivalence_grid(b.gamma, b.support, b.prules, b.nus, b.seed)?;
        out.push_str(&grid.render("expansion-compatibility equivalence grid"));
        total.absorb(grid);
        let census = census_suite(&[Ordinal::zero(), Ordinal::omega()], &b.census);
        out.push_str(&census.render("translation census"));
        total.absorb(census);
        let (rigid, solutions) = rigidity_probe(ProbeTarget::ParityExpanded, b.support);
        out.push_str(&rigid.render("rigidity obstruction (expanded)"));
        out.push_str(&format!("   collapse solutions found: {}\n", solutions.len()));
        total.absorb(rigid);
        let (plain, _) = rigidity_probe(ProbeTarget::Plain, b.support.min(5));
        out.push_str(&plain.render("rigidity dichotomy (plain)"));
        total.absorb(plain);
    }
    out.push_str(&total.verdict_line());
    out.push('\n');
    print!("{out}");
    if let Some(path) = report_path {
        std::fs::write(&path, &out).map_err(|e| Error::Transcript(e.to_string()))?;
        println!("report written to {}", path.display());
    }
    Ok(if total.passed() { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_selfplay(
    game: &str,
    length: &str,
    moves: usize,
    seed: u64,
    set_bound: &str,
    resume_stage: Option<String>,
    transcript: PathBuf,
    sequenced: bool,
) -> Result<i32> {
    let kind = GameKind::parse(game)?;
    let length: Ordinal = length.parse()?;
    let set_bound =
        if set_bound == "max" { UNBOUNDED_MOVES } else { set_bound.parse().map_err(|_| Error::OutOfRange(format!("bad set bound {set_bound}")))? };
    let mut opts = PlayOptions::new(kind, length.clone(), moves, seed);
    opts.set_bound = set_bound;
    opts.sequenced = sequenced;
    if let Some(stage) = resume_stage {
        let stage: Ordinal = stage.parse()?;
        let cfg = GameConfig::new(kind, length, set_bound)?;
        let state = synthetic_resume_state(kind, &cfg, &stage)?;
        opts.resume = Some((stage, state));
    }
    let outcome = selfplay(&opts)?;
    std::fs::write(&transcript, outcome.text()).map_err(|e| Error::Transcript(e.to_string()))?;
    println!(
        "{} moves played, {} atoms audited, verdict {}",
        moves,
        outcome.report.checked,
        if outcome.passed() { "PASS" } else { "FAIL" }
    );
    println!("transcript written to {}", transcript.display());
    if !outcome.passed() {
        print!("{}", outcome.report.render("selfplay"));
    }
    Ok(if outcome.passed() { 0 } else { 1 })
}

fn cmd_replay(path: PathBuf) -> Result<i32> {
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Transcript(e.to_string()))?;
    let outcome = replay(&text)?;
    match (&outcome.ok, &outcome.divergence) {
        (true, _) => {
            println!("replay PASS: transcript re-derives byte for byte");
            Ok(0)
        }
        (false, Some((line, want, got))) => {
            println!("replay FAIL at line {line}");
            println!("  transcript: {want}");
            println!("  re-derived: {got}");
            Ok(1)
        }
        (false, None) => {
            println!("replay FAIL: audits reported violations");
            print!("{}", outcome.report.render("replay"));
            Ok(1)
        }
    }
}

fn cmd_play(game: &str, length: &str, seed: u64, transcript: PathBuf) -> Result<i32> {
    let kind = GameKind::parse(game)?;
    let length: Ordinal = length.parse()?;
    let cfg = GameConfig::new(kind, length.clone(), 1)?;
    let strategy = strategy_for(kind);
    let mut pos = new_game(&cfg, strategy.as_ref())?;
    let mut moves: Vec<AisMove> = Vec::new();
    let stdin = std::io::stdin();
    let mut line = String::new();
    println!("spoiler REPL on the {} game of length {length}", kind.as_str());
    println!("pick elements as `L A(0; x5)` or `R B(w^1*1; 0)` (bare input plays left);");
    println!("`map` shows the position, `quit` audits and exits.");
    loop {
        print!("> ");
        std::io::stdout().flush().ok();
        line.clear();
        if stdin.lock().read_line(&mut line).unwrap_or(0) == 0 {
            break;
        }
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        if input == "quit" || input == "q" {
            break;
        }
        if input == "map" {
            for (d, i) in &pos.map {
                println!("  {d}  \u{21a6}  {i}");
            }
            continue;
        }
        let (side, elem_str) = match input.split_once(' ') {
            Some(("L", rest)) => (b'L', rest),
            Some(("R", rest)) => (b'R', rest),
            _ => (b'L', input),
        };
        let elem: Element = match elem_str.parse() {
            Ok(e) => e,
            Err(e) => {
                println!("  {e}");
                println!("  (input was: {elem_str})");
                continue;
            }
        };
        let mv = if side == b'L' {
            AisMove { left: vec![elem], right: vec![] }
        } else {
            AisMove { left: vec![], right: vec![elem] }
        };
        match game_step(&cfg, &pos, mv.clone(), strategy.as_ref()) {
            Ok(next) => {
                let (d, i) = next.map.last().expect("one pair was added").clone();
                println!("  {d}  \u{21a6}  {i}");
                moves.push(mv);
                pos = next;
            }
            Err(e) => println!("  move refused: {e}"),
        }
    }
    // audit the whole play and write the scripted transcript
    let opts = PlayOptions::new(kind, length, moves.len(), seed);
    let outcome = scripted_play(&opts, &moves)?;
    std::fs::write(&transcript, outcome.text()).map_err(|e| Error::Transcript(e.to_string()))?;
    println!(
        "{} moves, {} atoms audited, verdict {}; transcript written to {}",
        moves.len(),
        outcome.report.checked,
        if outcome.passed() { "PASS" } else { "FAIL" },
        transcript.display()
    );
    Ok(if outcome.passed() { 0 } else { 1 })
}

fn cmd_partition(
    length: &str,
    classify: Option<u64>,
    epsilon: Option<String>,
    count: usize,
    code: Option<String>,
    decode: Option<u64>,
) -> Result<i32> {
    let length: Ordinal = length.parse()?;
    let part = OmegaPartition::new(length.clone())?;
    let mut did_something = false;
    if let Some(n) = classify {
        println!("{n} lies in class {}", part.classify(n)?);
        did_something = true;
    }
    if let Some(eps) = epsilon {
        let eps: Ordinal = eps.parse()?;
        let xs = part.enumerate(&eps, count)?;
        println!(
            "class {eps}: {}",
            xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
        );
        did_something = true;
    }
    if let Some(alpha) = code {
        let alpha: Ordinal = alpha.parse()?;
        println!("code({alpha}) = {}", segment_code(&length, &alpha)?);
        did_something = true;
    }
    if let Some(n) = decode {
        println!("decode({n}) = {}", segment_decode(&length, n)?);
        did_something = true;
    }
    if !did_something {
        return Err(Error::OutOfRange(
            "nothing to do: pass --classify, --epsilon, --code or --decode".into(),
        ));
    }
    Ok(0)
}

fn cmd_demo() -> Result<i32> {
    println!("{ENGINE_VERSION} guided tour");
    println!();
    println!("The group: GF(2) vectors with finite support, e.g. x0+x3.");
    let x: crate::group::GroupElement = "x0+x3".parse()?;
    let y: crate::group::GroupElement = "x3+x5".parse()?;
    println!("  (x0+x3) + (x3+x5) = {}", x.add(&y));
    println!("  cosets sort elements by one coordinate: x0+x3 lands in {}",
        crate::group::Coset::subgroup(3).translate(&x));
    println!();
    for kind in [GameKind::PlainPair, GameKind::ParityPair] {
        println!("three scripted moves on the {} game:", kind.as_str());
        let moves = vec![
            AisMove { left: vec!["A(0; x5)".parse()?], right: vec![] },
            AisMove { left: vec![], right: vec!["A(w^1*1; x2+x3)".parse()?] },
            AisMove { left: vec!["B(w^1*2; 1)".parse()?], right: vec![] },
        ];
        let opts = PlayOptions::new(kind, "w^3*1".parse()?, 3, 0);
        let outcome = scripted_play(&opts, &moves)?;
        for line in outcome.lines.iter().filter(|l| l.contains("AIS:")) {
            println!("  {line}");
        }
        println!("  verdict: {}", if outcome.passed() { "PASS" } else { "FAIL" });
        println!();
    }
    println!("why the expanded pair is rigid: solutions of collapse(z) = x0+x1");
    let (report, solutions) = rigidity_probe(ProbeTarget::ParityExpanded, 6);
    println!(
        "  {} solutions with support below 6, none zero (e.g. {}); probe verdict {}",
        solutions.len(),
        solutions.first().map(|z| z.to_string()).unwrap_or_default(),
        if report.passed() { "PASS" } else { "FAIL" }
    );
    println!("  translating constantly by a nonzero z pushes a constant coset");
    println!("  sequence outside the structure, so no automorphism swaps the points.");
    println!();
    let part = OmegaPartition::new("w^1*2".parse()?)?;
    println!(
        "partition classes for length w*2: class 0 starts {:?}, class w starts {:?}",
        part.enumerate(&Ordinal::zero(), 5)?,
        part.enumerate(&Ordinal::omega(), 5)?
    );
    Ok(0)
}
