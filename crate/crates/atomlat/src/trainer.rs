//! Batch training: pinning-term generation, inconsistent-pinning discard,
//! the per-epoch pipeline, and epoch protocols for supervised and
//! Queens-style unsupervised runs.
//!
//! Per epoch the dual scaffolding is rebuilt from scratch: fresh dual atoms
//! enforce the batch, the dual is reduced, trace constraints are enforced
//! for the batch and for whichever accumulated pinning relations still hold
//! in the reduced dual, the positives are sparse-crossed, the master is
//! reduced, and the surviving atoms are folded back into pinning terms.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraState, ConstantId, ElementRef, Relation, Sign, TermId};
use crate::bitset::BitSet;
use crate::crossing;
use crate::error::{Error, Result};
use crate::inference::{self, QueryTerm};
use crate::problems::bars::LabeledExample;
use crate::problems::pixels::PixelWorld;
use crate::problems::queens::{self, BoardSpec, QueensWorld, Square, SquareState};
use crate::reduction;
use crate::trace;

/// One remembered atom: the constants that contained it and the epoch that
/// produced it. Immutable once recorded.
#[derive(Clone, Debug)]
pub struct PinningEntry {
    pub fingerprint: BitSet,
    pub origin_epoch: u32,
    alive: bool,
}

/// Accumulated pinning terms and relations. Entries are deduplicated by
/// fingerprint; discarded entries are never resurrected within a run.
#[derive(Clone, Debug, Default)]
pub struct PinningStructure {
    entries: Vec<PinningEntry>,
    index: HashMap<Vec<u32>, usize>,
    discarded: HashSet<Vec<u32>>,
}

impl PinningStructure {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(fingerprint: &BitSet) -> Vec<u32> {
        fingerprint.iter().map(|i| i as u32).collect()
    }

    /// Records a fingerprint; returns false for duplicates and for
    /// fingerprints discarded earlier in the run.
    pub fn add(&mut self, fingerprint: BitSet, origin_epoch: u32) -> bool {
        let key = Self::key(&fingerprint);
        if self.discarded.contains(&key) || self.index.contains_key(&key) {
            return false;
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(PinningEntry {
            fingerprint,
            origin_epoch,
            alive: true,
        });
        true
    }

    pub fn discard(&mut self, idx: usize) {
        if self.entries[idx].alive {
            self.entries[idx].alive = false;
            let key = Self::key(&self.entries[idx].fingerprint);
            self.index.remove(&key);
            self.discarded.insert(key);
        }
    }

    pub fn live(&self) -> impl Iterator<Item = (usize, &PinningEntry)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.alive)
    }

    pub fn len(&self) -> usize {
        self.entries.iter().filter(|e| e.alive).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fingerprints(&self) -> Vec<Vec<u32>> {
        self.live()
            .map(|(_, e)| Self::key(&e.fingerprint))
            .collect()
    }
}

/// Frozen atomization usable for inference, voting and serialization.
/// Self-contained: classification needs nothing else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSnapshot {
    pub version: u32,
    pub seed: u64,
    pub epoch: u32,
    pub constants: Vec<String>,
    /// Learned atoms as ascending constant-index lists (bottom excluded).
    pub atoms: Vec<Vec<u32>>,
    /// Live pinning fingerprints in the same encoding.
    pub pinning: Vec<Vec<u32>>,
}

impl ModelSnapshot {
    pub fn from_state(state: &AlgebraState, pinning: &[Vec<u32>], epoch: u32) -> Self {
        let constants = state
            .constant_ids()
            .map(|c| state.constant_name(c).to_string())
            .collect();
        let atoms = state
            .learned_atoms()
            .map(|a| {
                state
                    .atom_fingerprint(a)
                    .iter()
                    .map(|i| i as u32)
                    .collect()
            })
            .collect();
        ModelSnapshot {
            version: 1,
            seed: state.seed(),
            epoch,
            constants,
            atoms,
            pinning: pinning.to_vec(),
        }
    }

    pub fn constant_index(&self, name: &str) -> Option<u32> {
        self.constants.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Partial order between two constants under this atomization.
    pub fn leq_constants(&self, a: u32, b: u32) -> bool {
        self.atoms
            .iter()
            .filter(|fp| fp.binary_search(&a).is_ok())
            .all(|fp| fp.binary_search(&b).is_ok())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Per-epoch knobs. The batch is the epoch's relation set; its terms must
/// be live in the state when `train_epoch` is called.
#[derive(Clone, Debug)]
pub struct EpochConfig {
    pub batch: Vec<Relation>,
    pub epoch: u32,
    /// Run the master reduction at the end of the epoch.
    pub reduce_master: bool,
    /// Upper bound on how many currently-holding pinning relations are
    /// trace-enforced; None enforces all of them.
    pub max_pinning_enforced: Option<usize>,
}

impl EpochConfig {
    pub fn new(batch: Vec<Relation>, epoch: u32) -> Self {
        EpochConfig {
            batch,
            epoch,
            reduce_master: true,
            max_pinning_enforced: None,
        }
    }
}

/// Emits one pinning term per current master atom: the merge of every
/// constant NOT containing the atom, with one negative relation per
/// containing constant. Appends deduplicated entries.
pub fn generate_pinning(state: &AlgebraState, epoch: u32, pinning: &mut PinningStructure) -> usize {
    let constant_count = state.constant_count();
    let mut added = 0;
    for atom in state.learned_atoms() {
        let fp = state.atom_fingerprint(atom);
        // Degenerate pinning terms are skipped: an atom in every constant
        // has an empty complement, one in no constant pins nothing.
        if fp.is_empty() || fp.len() == constant_count {
            continue;
        }
        if pinning.add(fp, epoch) {
            added += 1;
        }
    }
    added
}

/// Pinning entry realized inside the state for one epoch.
struct RealizedEntry {
    entry: usize,
    relations: Vec<Relation>,
}

fn realize_pinning(state: &mut AlgebraState, pinning: &PinningStructure) -> Result<Vec<RealizedEntry>> {
    let constant_count = state.constant_count();
    let mut out = Vec::new();
    for (idx, entry) in pinning
        .live()
        .map(|(i, e)| (i, e.fingerprint.clone()))
        .collect::<Vec<_>>()
    {
        let complement: Vec<ConstantId> = (0..constant_count as u32)
            .map(ConstantId)
            .filter(|c| !entry.contains(c.0 as usize))
            .collect();
        if complement.is_empty() {
            continue;
        }
        let term = state.define_term(&complement)?;
        let relations = entry
            .iter()
            .map(|c| Relation {
                sign: Sign::Negative,
                lhs: ElementRef::Constant(ConstantId(c as u32)),
                rhs: term,
            })
            .collect();
        out.push(RealizedEntry {
            entry: idx,
            relations,
        });
    }
    Ok(out)
}

/// Runs dual enforcement for the batch plus all live pinning relations.
/// Pinning entries whose relations fail are discarded together with their
/// terms; a failing batch relation is a training-set inconsistency.
/// On success the dual carries the batch and the kept pinning relations.
pub fn filter_pinning(
    state: &mut AlgebraState,
    batch: &[Relation],
    pinning: &mut PinningStructure,
) -> Result<Vec<Relation>> {
    let realized = realize_pinning(state, pinning)?;
    let mut all: Vec<Relation> = batch.to_vec();
    for r in &realized {
        all.extend_from_slice(&r.relations);
    }
    let report = trace::preprocess_duals(state, &all)?;
    let mut kept: Vec<Relation> = Vec::new();
    if report.consistent {
        for r in &realized {
            kept.extend_from_slice(&r.relations);
        }
        return Ok(kept);
    }
    for failed in &report.failed {
        if batch.contains(failed) {
            return Err(Error::InconsistentTrainingSet);
        }
    }
    for r in &realized {
        if r.relations.iter().any(|rel| report.failed.contains(rel)) {
            pinning.discard(r.entry);
        } else {
            kept.extend_from_slice(&r.relations);
        }
    }
    Ok(kept)
}

/// One full training epoch over `config.batch`; returns the resulting
/// snapshot. All batch relations hold in the returned model.
pub fn train_epoch(
    state: &mut AlgebraState,
    config: &EpochConfig,
    pinning: &mut PinningStructure,
) -> Result<ModelSnapshot> {
    let keep: Vec<TermId> = terms_mentioned(&config.batch);
    state.begin_epoch(&keep);

    let kept_pinning = filter_pinning(state, &config.batch, pinning)?;

    let negatives: Vec<Relation> = config
        .batch
        .iter()
        .filter(|r| !r.is_positive())
        .copied()
        .collect();
    reduction::reduce_dual(state, &negatives)?;

    // Pinning relations that still hold in the reduced dual get their
    // trace constraints enforced; in different epochs different ones hold.
    let mut holding: Vec<Relation> = Vec::new();
    for rel in &kept_pinning {
        let db = state.dual_of(rel.rhs)?;
        let da = state.dual_of(rel.lhs)?;
        if !state.leq(db, da)? {
            holding.push(*rel);
        }
    }
    if let Some(cap) = config.max_pinning_enforced {
        if holding.len() > cap {
            let order = state.shuffled((0..holding.len()).collect());
            holding = order[..cap].iter().map(|&i| holding[i]).collect();
        }
    }

    let mut to_enforce = config.batch.clone();
    to_enforce.extend(holding);
    trace::enforce_all(state, &to_enforce)?;

    let positives: Vec<Relation> = config
        .batch
        .iter()
        .filter(|r| r.is_positive())
        .copied()
        .collect();
    crossing::enforce_positive_relations(state, &positives)?;

    if config.reduce_master {
        reduction::reduce_master(state)?;
    }
    generate_pinning(state, config.epoch, pinning);
    Ok(ModelSnapshot::from_state(
        state,
        &pinning.fingerprints(),
        config.epoch,
    ))
}

fn terms_mentioned(relations: &[Relation]) -> Vec<TermId> {
    let mut out = Vec::new();
    for rel in relations {
        for side in [rel.lhs, rel.rhs] {
            if let ElementRef::Term(t) = side {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

// --------------------------------------------------------------- supervised

/// Stream of labeled examples for supervised fitting.
pub trait ExampleSource {
    fn next_batch(&mut self, n: usize) -> Vec<LabeledExample>;
}

impl ExampleSource for crate::problems::bars::BarGenerator {
    fn next_batch(&mut self, n: usize) -> Vec<LabeledExample> {
        self.take(n)
    }
}

/// Batch-size adaptation rules used by the experiments.
#[derive(Clone, Debug)]
pub enum BatchSizing {
    Fixed(usize),
    /// Grow by `growth` whenever pre-batch training accuracy stagnates,
    /// up to `cap`.
    GrowOnStagnation {
        start: usize,
        growth: f64,
        cap: usize,
    },
    /// Grow (shrink) by `step` when test error rose (fell) since the last
    /// epoch.
    FollowTestError { start: usize, step: f64 },
}

#[derive(Clone, Debug)]
pub struct FitProtocol {
    pub sizing: BatchSizing,
    pub max_epochs: u32,
    /// Stop after this many consecutive epochs of zero pre-batch error.
    pub stop_after_zero_error: Option<u32>,
    /// How many trailing snapshots to retain for voting.
    pub keep_snapshots: usize,
    /// Epoch stride between experiment records (and test evaluations).
    pub record_every: u32,
    pub max_pinning_enforced: Option<usize>,
    pub reduce_every: u32,
}

impl Default for FitProtocol {
    fn default() -> Self {
        FitProtocol {
            sizing: BatchSizing::Fixed(200),
            max_epochs: 50,
            stop_after_zero_error: None,
            keep_snapshots: 10,
            record_every: 1,
            max_pinning_enforced: None,
            reduce_every: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitReport {
    /// Trailing snapshots, oldest first; the last is the final model.
    pub snapshots: Vec<ModelSnapshot>,
    pub records: Vec<crate::metrics::ExperimentRecord>,
    /// Distinct training examples consumed.
    pub examples_seen: usize,
}

/// Supervised batch training on an image world. Retains the last
/// `keep_snapshots` snapshots and logs records on the record stride.
pub fn fit(
    state: &mut AlgebraState,
    world: &PixelWorld,
    source: &mut dyn ExampleSource,
    eval: &[LabeledExample],
    protocol: &FitProtocol,
) -> Result<FitReport> {
    let mut pinning = PinningStructure::new();
    let mut snapshots: Vec<ModelSnapshot> = Vec::new();
    let mut records = Vec::new();
    let mut batch_size = match protocol.sizing {
        BatchSizing::Fixed(n) => n,
        BatchSizing::GrowOnStagnation { start, .. } => start,
        BatchSizing::FollowTestError { start, .. } => start,
    };
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut retained_pool: Vec<(QueryTerm, bool)> = Vec::new();
    let mut last_test_err: Option<f64> = None;
    let mut last_batch_err: Option<f64> = None;
    let mut zero_streak = 0u32;
    let mut examples_seen = 0usize;

    for epoch in 0..protocol.max_epochs {
        let examples = source.next_batch(batch_size);
        examples_seen += examples.len();

        // Pre-batch training error: how the previous model does on the
        // incoming examples. Drives stagnation and stop rules.
        let batch_err = match snapshots.last() {
            None => 1.0,
            Some(snap) => error_rate(snap, world, &examples)?,
        };
        if batch_err == 0.0 {
            zero_streak += 1;
        } else {
            zero_streak = 0;
        }

        let mut batch = Vec::with_capacity(examples.len());
        for ex in &examples {
            batch.push(world.relation(state, &ex.image, ex.label)?);
            let key: Vec<u32> = world
                .query(&ex.image)?
                .constants
                .iter()
                .map(|i| i as u32)
                .collect();
            if seen.insert(key) {
                retained_pool.push((world.query(&ex.image)?, ex.label));
            }
        }

        let mut config = EpochConfig::new(batch, epoch);
        config.reduce_master = protocol.reduce_every > 0 && epoch % protocol.reduce_every == 0;
        config.max_pinning_enforced = protocol.max_pinning_enforced;
        let snapshot = train_epoch(state, &config, &mut pinning)?;

        let record_due = protocol.record_every > 0
            && (epoch % protocol.record_every == 0 || epoch + 1 == protocol.max_epochs);
        let mut test_err = None;
        if record_due {
            let err = error_rate(&snapshot, world, eval)?;
            test_err = Some(err);
            let retained = retained_pool
                .iter()
                .filter(|(q, label)| {
                    inference::contains(&snapshot, world.class, q).unwrap_or(false) == *label
                })
                .count();
            records.push(crate::metrics::record_epoch(
                &snapshot,
                world.paired_constant_count(),
                retained,
                batch_err,
                err,
                epoch,
            ));
        }

        snapshots.push(snapshot);
        if snapshots.len() > protocol.keep_snapshots {
            snapshots.remove(0);
        }

        if let Some(streak) = protocol.stop_after_zero_error {
            if zero_streak >= streak {
                break;
            }
        }

        // Batch-size adaptation.
        match protocol.sizing {
            BatchSizing::Fixed(_) => {}
            BatchSizing::GrowOnStagnation { growth, cap, .. } => {
                if let Some(prev) = last_batch_err {
                    if batch_err >= prev {
                        batch_size = ((batch_size as f64 * (1.0 + growth)).round() as usize).min(cap);
                    }
                }
            }
            BatchSizing::FollowTestError { step, .. } => {
                if let (Some(now), Some(prev)) = (test_err, last_test_err) {
                    if now > prev {
                        batch_size = (batch_size as f64 * (1.0 + step)).round() as usize;
                    } else if now < prev {
                        batch_size = ((batch_size as f64 * (1.0 - step)).round() as usize).max(1);
                    }
                }
            }
        }
        if test_err.is_some() {
            last_test_err = test_err;
        }
        last_batch_err = Some(batch_err);
    }

    Ok(FitReport {
        snapshots,
        records,
        examples_seen,
    })
}

/// Error rate of a snapshot over labeled examples.
pub fn error_rate(
    snapshot: &ModelSnapshot,
    world: &PixelWorld,
    examples: &[LabeledExample],
) -> Result<f64> {
    if examples.is_empty() {
        return Ok(0.0);
    }
    let mut wrong = 0usize;
    for ex in examples {
        let q = world.query(&ex.image)?;
        if inference::contains(snapshot, world.class, &q)? != ex.label {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / examples.len() as f64)
}

// --------------------------------------------------------------- queens

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EpochKind {
    /// Rule set plus game relations.
    Full,
    /// Rule set only; no fixed queens this epoch.
    Idle,
    /// Game relations plus one random legal queen inserted for this epoch.
    Insert,
}

/// Cyclic epoch schedule.
#[derive(Clone, Debug)]
pub struct QueensSchedule {
    pub pattern: Vec<EpochKind>,
}

impl QueensSchedule {
    /// All-game epochs with an idle break every `idle_every` epochs, the
    /// straightforward protocol for small boards.
    pub fn with_idle_every(idle_every: usize) -> Self {
        let mut pattern = vec![EpochKind::Full; idle_every.saturating_sub(1).max(1)];
        pattern.push(EpochKind::Idle);
        QueensSchedule { pattern }
    }

    /// Legal-queen insertions with trailing idle epochs, the protocol used
    /// on large boards.
    pub fn insert_then_idle(inserts: usize, idles: usize) -> Self {
        let mut pattern = vec![EpochKind::Insert; inserts.max(1)];
        pattern.extend(std::iter::repeat(EpochKind::Idle).take(idles));
        QueensSchedule { pattern }
    }

    fn kind(&self, epoch: u32) -> EpochKind {
        self.pattern[(epoch as usize) % self.pattern.len()]
    }
}

#[derive(Clone, Debug)]
pub struct QueensEpochReport {
    pub epoch: u32,
    pub kind: EpochKind,
    pub inserted: Option<Square>,
    pub board: Vec<Vec<SquareState>>,
    pub complete: bool,
}

/// Epoch protocol for a completion instance: each epoch re-enforces the
/// rule set (plus game relations unless idle), reads the board back and
/// validates completions. Stops at `max_epochs` or on the first complete
/// board when `stop_on_complete` is set.
pub fn queens_protocol(
    state: &mut AlgebraState,
    world: &QueensWorld,
    spec: &BoardSpec,
    schedule: &QueensSchedule,
    max_epochs: u32,
    max_pinning_enforced: Option<usize>,
    stop_on_complete: bool,
) -> Result<Vec<QueensEpochReport>> {
    spec.validate()?;
    let mut pinning = PinningStructure::new();
    let mut reports: Vec<QueensEpochReport> = Vec::new();
    for epoch in 0..max_epochs {
        let kind = schedule.kind(epoch);
        let mut batch = world.rule_relations(state)?;
        let mut inserted = None;
        if kind != EpochKind::Idle {
            batch.extend(world.game_relations(state, spec)?);
        }
        if kind == EpochKind::Insert {
            let occupied = occupied_squares(reports.last(), spec);
            if let Some(sq) = random_legal_square(state, world.size, &occupied) {
                batch.push(Relation::positive(world.queen_at(sq), world.solution));
                inserted = Some(sq);
            }
        }
        let mut config = EpochConfig::new(batch, epoch);
        config.max_pinning_enforced = max_pinning_enforced;
        let snapshot = train_epoch(state, &config, &mut pinning)?;
        let board = queens::read_board(&snapshot, spec)?;
        let complete = queens::validate_board(&board).unwrap_or(false);
        reports.push(QueensEpochReport {
            epoch,
            kind,
            inserted,
            board,
            complete,
        });
        if complete && stop_on_complete {
            break;
        }
    }
    Ok(reports)
}

/// Queens currently on the board: blocked plus whatever the last epoch
/// reported. Legality is computed by the validator, not the algebra.
fn occupied_squares(last: Option<&QueensEpochReport>, spec: &BoardSpec) -> Vec<Square> {
    let mut out = spec.blocked.clone();
    if let Some(report) = last {
        for (rank, row) in report.board.iter().enumerate() {
            for (file, &cell) in row.iter().enumerate() {
                let sq = Square { file, rank };
                if cell == SquareState::Queen && !out.contains(&sq) {
                    out.push(sq);
                }
            }
        }
    }
    out
}

fn random_legal_square(
    state: &mut AlgebraState,
    size: usize,
    occupied: &[Square],
) -> Option<Square> {
    let mut legal = Vec::new();
    for rank in 0..size {
        for file in 0..size {
            let sq = Square { file, rank };
            if occupied.iter().all(|q| *q != sq && !q.attacks(&sq)) {
                legal.push(rank * size + file);
            }
        }
    }
    let pick = *state.shuffled(legal).first()?;
    Some(Square {
        file: pick % size,
        rank: pick / size,
    })
}
