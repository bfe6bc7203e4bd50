//! End-to-end runs of the space-time encoding.
//!
//! A [`Window`] holds the occupancy of every site within `N_t` of a focal
//! site. [`run`] encodes it as one basis state, applies `N_t` steps of
//! collision and streaming circuits, and reads the focal velocity pattern
//! distribution exactly from the amplitudes. [`classical_ensemble_oracle`]
//! enumerates classical trajectories, branching at every pair-class
//! collision with weights `|alpha|^2` / `|beta|^2`, on an ordinary periodic
//! occupancy field.
//!
//! Within a step the default order is collide-then-stream. Under that order
//! step `t` has to collide every offset within `N_t - t + 1`, since all of
//! them stream into the region still needed afterwards; under
//! stream-then-collide the radius is `N_t - t`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    collide_classical, equivalence_classes, stream_classical, CollisionRule, LatticeDescriptor, OccupancyField, Pattern,
};
use crate::qstate::{BasisLabel, Circuit, CircuitEffect, Gate, SparseState};
use crate::spacetime::{
    collision_circuit_for_radius, collision_quad, enumerate_vicinity, streaming_circuit_for_radius, CollisionParams,
    VicinityLayout,
};

/// Default cap on stored sparse amplitudes.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 22;
/// Largest register simulated in full-grid mode.
pub const FULL_GRID_MAX_QUBITS: usize = 24;
/// Cap on branching events along one classical trajectory.
pub const MAX_BRANCH_EVENTS: usize = 20;
/// Tolerance on total-variation distance in [`compare`].
pub const COMPARE_TOL: f64 = 1e-9;

/// Order of the two sub-steps inside one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepOrder {
    #[default]
    CollideThenStream,
    StreamThenCollide,
}

impl StepOrder {
    /// Radius of the collision region at step `t` of `n_t`.
    pub fn collision_radius(self, n_t: usize, t: usize) -> usize {
        match self {
            StepOrder::CollideThenStream => n_t + 1 - t,
            StepOrder::StreamThenCollide => n_t - t,
        }
    }
}

impl fmt::Display for StepOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepOrder::CollideThenStream => "collide-then-stream",
            StepOrder::StreamThenCollide => "stream-then-collide",
        })
    }
}

impl FromStr for StepOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collide-then-stream" | "cs" => Ok(StepOrder::CollideThenStream),
            "stream-then-collide" | "sc" => Ok(StepOrder::StreamThenCollide),
            _ => Err(Error::Parse {
                line: 0,
                msg: format!("unknown step order `{s}`"),
            }),
        }
    }
}

fn manhattan(offset: &[i32]) -> usize {
    offset.iter().map(|c| c.unsigned_abs() as usize).sum()
}

/// Occupancy of the sites within `extent` of a focal site. Unlisted sites are empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    descriptor: LatticeDescriptor,
    extent: usize,
    patterns: BTreeMap<Vec<i32>, Pattern>,
}

impl Window {
    pub fn new(descriptor: &LatticeDescriptor, extent: usize) -> Self {
        Self {
            descriptor: descriptor.clone(),
            extent,
            patterns: BTreeMap::new(),
        }
    }

    /// Window whose bits follow the layout's qubit order.
    pub fn from_layout_bits(layout: &VicinityLayout, bits: &[bool]) -> Result<Self> {
        if bits.len() != layout.num_qubits() {
            return Err(Error::WidthMismatch {
                expected: layout.num_qubits(),
                got: bits.len(),
            });
        }
        let mut w = Self::new(layout.descriptor(), layout.extent());
        for (q, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            let (offset, j) = layout.location(q);
            w.set(offset, j, true)?;
        }
        Ok(w)
    }

    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.descriptor
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    fn check_offset(&self, offset: &[i32]) -> Result<()> {
        if offset.len() != self.descriptor.dimension() {
            return Err(Error::OutsideVicinity(format!(
                "offset {offset:?} has the wrong dimension"
            )));
        }
        if manhattan(offset) > self.extent {
            return Err(Error::OutsideVicinity(format!(
                "offset {offset:?} is farther than {} from the focal site",
                self.extent
            )));
        }
        Ok(())
    }

    pub fn set(&mut self, offset: &[i32], direction: usize, value: bool) -> Result<()> {
        self.check_offset(offset)?;
        let m = self.descriptor.num_directions();
        if direction >= m {
            return Err(Error::OutsideVicinity(format!(
                "direction {direction} out of range for {}",
                self.descriptor
            )));
        }
        let p = self.pattern(offset).with(direction, value);
        self.set_pattern(offset, p)
    }

    pub fn set_pattern(&mut self, offset: &[i32], pattern: Pattern) -> Result<()> {
        self.check_offset(offset)?;
        if pattern.width() != self.descriptor.num_directions() {
            return Err(Error::InvalidField(format!("pattern {pattern} has the wrong width")));
        }
        if pattern.popcount() == 0 {
            self.patterns.remove(offset);
        } else {
            self.patterns.insert(offset.to_vec(), pattern);
        }
        Ok(())
    }

    pub fn pattern(&self, offset: &[i32]) -> Pattern {
        self.patterns
            .get(offset)
            .copied()
            .unwrap_or_else(|| Pattern::empty(self.descriptor.num_directions()))
    }

    /// Occupied `(offset, direction)` pairs in sorted order.
    pub fn occupied(&self) -> impl Iterator<Item = (&[i32], usize)> {
        self.patterns
            .iter()
            .flat_map(|(o, p)| (0..p.width()).filter(|&j| p.get(j)).map(move |j| (o.as_slice(), j)))
    }

    /// The same occupancy under another extent. Shrinking fails if it would
    /// drop an occupied site; growing fails since the new shell is unknown.
    pub fn with_extent(&self, extent: usize) -> Result<Window> {
        if extent > self.extent {
            return Err(Error::MissingBit(format!(
                "window of extent {} does not cover extent {extent}",
                self.extent
            )));
        }
        let mut w = Window::new(&self.descriptor, extent);
        for (offset, &p) in &self.patterns {
            w.set_pattern(offset, p)?;
        }
        Ok(w)
    }

    /// Embeds the window in a periodic field of side `2 extent + 1`, focal site at the center.
    pub fn to_field(&self) -> OccupancyField {
        let side = 2 * self.extent + 1;
        let extents = vec![side; self.descriptor.dimension()];
        let mut field = OccupancyField::empty(&self.descriptor, &extents).expect("positive extents");
        for (offset, &p) in &self.patterns {
            let site = field.site_index(&window_coords(offset, self.extent));
            field.set_pattern(site, p);
        }
        field
    }
}

fn window_coords(offset: &[i32], extent: usize) -> Vec<i64> {
    offset.iter().map(|&c| c as i64 + extent as i64).collect()
}

fn focal_site(field: &OccupancyField, extent: usize) -> usize {
    let dim = field.descriptor().dimension();
    field.site_index(&vec![extent as i64; dim])
}

/// Maps a window to its space-time basis state.
pub fn encode_window(layout: &VicinityLayout, window: &Window) -> Result<SparseState> {
    if window.descriptor() != layout.descriptor() {
        return Err(Error::InvalidField(format!(
            "window lattice {} does not match layout lattice {}",
            window.descriptor(),
            layout.descriptor()
        )));
    }
    if window.extent() < layout.extent() {
        return Err(Error::MissingBit(format!(
            "window extent {} does not cover the vicinity of extent {}",
            window.extent(),
            layout.extent()
        )));
    }
    let mut label = BasisLabel::zeros(layout.num_qubits());
    for (offset, j) in window.occupied() {
        let q = layout.qubit(offset, j).ok_or_else(|| {
            Error::OutsideVicinity(format!("offset {offset:?} lies outside extent {}", layout.extent()))
        })?;
        label.set(q, true);
    }
    SparseState::init_basis(layout.num_qubits(), label)
}

/// Probability of each focal velocity pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalDistribution {
    width: usize,
    probs: BTreeMap<Pattern, f64>,
}

impl FocalDistribution {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            probs: BTreeMap::new(),
        }
    }

    pub fn point(pattern: Pattern) -> Self {
        let mut d = Self::new(pattern.width());
        d.add(pattern, 1.0);
        d
    }

    pub fn add(&mut self, pattern: Pattern, weight: f64) {
        *self.probs.entry(pattern).or_default() += weight;
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, pattern: Pattern) -> f64 {
        self.probs.get(&pattern).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pattern, f64)> + '_ {
        self.probs.iter().map(|(p, w)| (*p, *w))
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// The single pattern carrying all weight, if any (within `tol`).
    pub fn certain(&self, tol: f64) -> Option<Pattern> {
        self.iter().find(|(_, w)| (w - 1.0).abs() <= tol).map(|(p, _)| p)
    }

    /// Half the L1 distance.
    pub fn tv_distance(&self, other: &FocalDistribution) -> f64 {
        self.deltas(other).values().map(|d| d.abs()).sum::<f64>() / 2.0
    }

    /// `self - other` per pattern over the union of supports.
    pub fn deltas(&self, other: &FocalDistribution) -> BTreeMap<Pattern, f64> {
        let mut out: BTreeMap<Pattern, f64> = self.probs.clone();
        for (p, w) in &other.probs {
            *out.entry(*p).or_default() -= w;
        }
        out
    }

    /// Mixes distributions with the given weights.
    pub fn mix(parts: &[(f64, FocalDistribution)]) -> Self {
        let width = parts.first().map_or(0, |(_, d)| d.width);
        let mut out = Self::new(width);
        for (w, d) in parts {
            for (p, x) in d.iter() {
                out.add(p, w * x);
            }
        }
        out
    }
}

/// Precomputed per-step circuits for one lattice, extent, collision and order.
#[derive(Debug, Clone)]
pub struct WindowSimulator {
    layout: VicinityLayout,
    params: CollisionParams,
    order: StepOrder,
    steps: Vec<[Circuit; 2]>,
}

impl WindowSimulator {
    pub fn new(descriptor: &LatticeDescriptor, n_t: usize, params: CollisionParams, order: StepOrder) -> Result<Self> {
        let layout = enumerate_vicinity(descriptor, n_t)?;
        let steps = (1..=n_t)
            .map(|t| {
                let (collision, _) = collision_circuit_for_radius(&layout, &params, order.collision_radius(n_t, t))?;
                let streaming = streaming_circuit_for_radius(&layout, n_t - t)?.circuit;
                Ok(match order {
                    StepOrder::CollideThenStream => [collision, streaming],
                    StepOrder::StreamThenCollide => [streaming, collision],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            layout,
            params,
            order,
            steps,
        })
    }

    pub fn layout(&self) -> &VicinityLayout {
        &self.layout
    }

    pub fn params(&self) -> &CollisionParams {
        &self.params
    }

    pub fn order(&self) -> StepOrder {
        self.order
    }

    /// Circuits of every step in application order.
    pub fn circuits(&self) -> impl Iterator<Item = &Circuit> {
        self.steps.iter().flatten()
    }

    pub fn run(&self, window: &Window, max_entries: usize) -> Result<RunOutcome> {
        let mut state = encode_window(&self.layout, window)?;
        let mut effect = CircuitEffect {
            peak_entries: state.len(),
            ..Default::default()
        };
        for circuit in self.circuits() {
            effect.absorb(state.apply_circuit_capped(circuit, max_entries)?);
        }
        let focal = focal_distribution(&state, &self.layout)?;
        Ok(RunOutcome { state, focal, effect })
    }
}

fn focal_distribution(state: &SparseState, layout: &VicinityLayout) -> Result<FocalDistribution> {
    let m = layout.descriptor().num_directions();
    let mut dist = FocalDistribution::new(m);
    for (label, p) in state.marginal(&layout.focal_qubits())? {
        let pattern = (0..m).fold(Pattern::empty(m), |acc, j| acc.with(j, label.get(j)));
        dist.add(pattern, p);
    }
    Ok(dist)
}

/// Everything needed for one window run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub descriptor: LatticeDescriptor,
    pub n_t: usize,
    pub params: CollisionParams,
    pub window: Window,
    pub order: StepOrder,
    pub max_entries: usize,
}

impl RunConfig {
    pub fn new(window: Window, n_t: usize, params: CollisionParams) -> Self {
        Self {
            descriptor: window.descriptor().clone(),
            n_t,
            params,
            window,
            order: StepOrder::default(),
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SparseState,
    pub focal: FocalDistribution,
    pub effect: CircuitEffect,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    WindowSimulator::new(&config.descriptor, config.n_t, config.params, config.order)?
        .run(&config.window, config.max_entries)
}

#[derive(Clone)]
struct Trajectory {
    weight: f64,
    events: usize,
}

/// Brute-force classical ensemble over collision outcomes.
pub fn classical_ensemble_oracle(config: &RunConfig) -> Result<FocalDistribution> {
    let n_t = config.n_t;
    if config.window.extent() != n_t {
        return Err(Error::MissingBit(format!(
            "window extent {} differs from N_t = {n_t}",
            config.window.extent()
        )));
    }
    let table = equivalence_classes(&config.descriptor);
    let keep = config.params.alpha().norm_sqr();
    let swap = config.params.beta().norm_sqr();
    let start = config.window.to_field();
    let center = focal_site(&start, n_t);
    let mut ensemble: FxHashMap<OccupancyField, Trajectory> = FxHashMap::default();
    ensemble.insert(start, Trajectory { weight: 1.0, events: 0 });

    let collide = |ensemble: FxHashMap<OccupancyField, Trajectory>, radius: usize| -> Result<_> {
        let mut out: FxHashMap<OccupancyField, Trajectory> = FxHashMap::default();
        for (field, traj) in ensemble {
            let mut branches = vec![(field, traj)];
            for site in 0..branches[0].0.num_sites() {
                let coords = branches[0].0.site_coords(site);
                let offset_norm: usize = coords.iter().map(|&c| c.abs_diff(n_t)).sum();
                if offset_norm > radius {
                    continue;
                }
                let mut next = Vec::with_capacity(branches.len() * 2);
                for (f, tr) in branches {
                    let Some(partner) = table.partner(f.pattern(site)) else {
                        next.push((f, tr));
                        continue;
                    };
                    let events = tr.events + 1;
                    if events > MAX_BRANCH_EVENTS {
                        return Err(Error::BranchExplosion { cap: MAX_BRANCH_EVENTS });
                    }
                    if swap > 0.0 {
                        let mut g = f.clone();
                        g.set_pattern(site, partner);
                        next.push((
                            g,
                            Trajectory {
                                weight: tr.weight * swap,
                                events,
                            },
                        ));
                    }
                    if keep > 0.0 {
                        next.push((
                            f,
                            Trajectory {
                                weight: tr.weight * keep,
                                events,
                            },
                        ));
                    }
                }
                branches = next;
            }
            for (f, tr) in branches {
                let slot = out.entry(f).or_insert(Trajectory { weight: 0.0, events: 0 });
                slot.weight += tr.weight;
                slot.events = slot.events.max(tr.events);
            }
        }
        Ok(out)
    };
    let stream = |ensemble: FxHashMap<OccupancyField, Trajectory>| {
        let mut out: FxHashMap<OccupancyField, Trajectory> = FxHashMap::default();
        for (f, tr) in ensemble {
            let slot = out
                .entry(stream_classical(&f))
                .or_insert(Trajectory { weight: 0.0, events: 0 });
            slot.weight += tr.weight;
            slot.events = slot.events.max(tr.events);
        }
        out
    };

    for t in 1..=n_t {
        let radius = config.order.collision_radius(n_t, t);
        ensemble = match config.order {
            StepOrder::CollideThenStream => stream(collide(ensemble, radius)?),
            StepOrder::StreamThenCollide => collide(stream(ensemble), radius)?,
        };
    }
    let mut dist = FocalDistribution::new(config.descriptor.num_directions());
    for (f, tr) in &ensemble {
        dist.add(f.pattern(center), tr.weight);
    }
    Ok(dist)
}

/// Classical evolution of a window with a deterministic rule at every site,
/// returning the focal pattern after `n_t` steps.
pub fn classical_focal_evolution(window: &Window, n_t: usize, rule: CollisionRule, order: StepOrder) -> Pattern {
    let mut field = window.to_field();
    for _ in 0..n_t {
        field = match order {
            StepOrder::CollideThenStream => stream_classical(&collide_classical(&field, rule)),
            StepOrder::StreamThenCollide => collide_classical(&stream_classical(&field), rule),
        };
    }
    field.pattern(focal_site(&field, window.extent()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMode {
    /// No quantum branches merged; the ensemble must agree.
    Agreement,
    /// Branches interfered; the classical ensemble is not expected to match.
    ExpectedMismatch,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub tv_distance: f64,
    pub deltas: BTreeMap<Pattern, f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub mode: ComparisonMode,
    pub quantum: RunOutcome,
    pub classical: FocalDistribution,
}

pub fn compare(config: &RunConfig) -> Result<ComparisonReport> {
    let quantum = run(config)?;
    let classical = classical_ensemble_oracle(config)?;
    let tv_distance = quantum.focal.tv_distance(&classical);
    let mode = if quantum.effect.merged_pairs > 0 {
        ComparisonMode::ExpectedMismatch
    } else {
        ComparisonMode::Agreement
    };
    Ok(ComparisonReport {
        tv_distance,
        deltas: quantum.focal.deltas(&classical),
        tolerance: COMPARE_TOL,
        pass: tv_distance <= COMPARE_TOL,
        mode,
        quantum,
        classical,
    })
}

/// Whole-grid run: one qubit per (site, direction), bit `site * m + j`.
#[derive(Debug, Clone)]
pub struct FullGridConfig {
    pub initial: OccupancyField,
    pub steps: usize,
    pub params: CollisionParams,
    pub order: StepOrder,
    pub max_entries: usize,
}

impl FullGridConfig {
    pub fn new(initial: OccupancyField, steps: usize, params: CollisionParams) -> Self {
        Self {
            initial,
            steps,
            params,
            order: StepOrder::default(),
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

/// Grid state after one step.
#[derive(Debug, Clone)]
pub struct FullGridFrame {
    pub step: usize,
    /// Probability that each bit `site * m + j` is set.
    pub occupancy: Vec<f64>,
    /// Decoded field when the state is a single basis state.
    pub basis: Option<OccupancyField>,
    pub entries: usize,
}

#[derive(Debug, Clone)]
pub struct FullGridTrace {
    pub frames: Vec<FullGridFrame>,
    pub effect: CircuitEffect,
}

/// Collision and streaming circuits of the whole periodic grid.
pub fn full_grid_circuits(template: &OccupancyField, params: &CollisionParams) -> Result<(Circuit, Circuit)> {
    let descriptor = template.descriptor();
    let m = descriptor.num_directions();
    let n = template.num_sites() * m;
    if n > FULL_GRID_MAX_QUBITS {
        return Err(Error::GridTooLarge {
            qubits: n,
            cap: FULL_GRID_MAX_QUBITS,
        });
    }
    let mut collision = Circuit::new(n);
    if let Some(quad) = collision_quad(descriptor) {
        for site in 0..template.num_sites() {
            collision.append(&crate::spacetime::collision_local_circuit(
                params,
                quad.map(|j| site * m + j),
                n,
            )?)?;
        }
    }
    let mut dest: Vec<usize> = (0..n).collect();
    for site in 0..template.num_sites() {
        for j in 0..m {
            dest[site * m + j] = template.shifted(site, descriptor.velocity(j)) * m + j;
        }
    }
    let mut streaming = Circuit::new(n);
    streaming.push(Gate::Permute(dest))?;
    Ok((collision, streaming))
}

fn grid_frame(state: &SparseState, template: &OccupancyField, step: usize) -> Result<FullGridFrame> {
    let n = state.num_qubits();
    let mut occupancy = vec![0.0; n];
    for (label, amp) in state.iter() {
        let p = amp.norm_sqr();
        for q in label.ones() {
            occupancy[q] += p;
        }
    }
    let basis = match state.as_basis() {
        Some(label) => Some(OccupancyField::from_bits(
            template.descriptor(),
            template.extents(),
            label.to_bits(),
        )?),
        None => None,
    };
    Ok(FullGridFrame {
        step,
        occupancy,
        basis,
        entries: state.len(),
    })
}

pub fn full_grid_run(config: &FullGridConfig) -> Result<FullGridTrace> {
    let template = &config.initial;
    let (collision, streaming) = full_grid_circuits(template, &config.params)?;
    let n = collision.num_qubits();
    let mut state = SparseState::init_basis(n, BasisLabel::from_bits(template.bits()))?;
    let mut frames = vec![grid_frame(&state, template, 0)?];
    let mut effect = CircuitEffect {
        peak_entries: 1,
        ..Default::default()
    };
    let ordered = match config.order {
        StepOrder::CollideThenStream => [&collision, &streaming],
        StepOrder::StreamThenCollide => [&streaming, &collision],
    };
    for step in 1..=config.steps {
        for circuit in ordered {
            effect.absorb(state.apply_circuit_capped(circuit, config.max_entries)?);
        }
        frames.push(grid_frame(&state, template, step)?);
    }
    Ok(FullGridTrace { frames, effect })
}

/// Classical evolution of a whole field, including the initial frame.
pub fn classical_grid_evolution(
    field: &OccupancyField,
    steps: usize,
    rule: CollisionRule,
    order: StepOrder,
) -> Vec<OccupancyField> {
    let mut frames = vec![field.clone()];
    for _ in 0..steps {
        let last = frames.last().expect("nonempty");
        frames.push(match order {
            StepOrder::CollideThenStream => stream_classical(&collide_classical(last, rule)),
            StepOrder::StreamThenCollide => collide_classical(&stream_classical(last), rule),
        });
    }
    frames
}

/// Deterministic classical rule matching the collision parameters, if one exists.
pub fn deterministic_rule(params: &CollisionParams) -> Option<CollisionRule> {
    if params.beta().norm_sqr() == 0.0 {
        Some(CollisionRule::Identity)
    } else if params.alpha().norm_sqr() == 0.0 {
        Some(CollisionRule::SwapClass)
    } else {
        None
    }
}
