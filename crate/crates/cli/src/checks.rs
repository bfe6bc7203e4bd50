//! The validation suite: one check per acceptance criterion.
//!
//! Every check draws from its own seeded RNG, so results do not depend on
//! the order or concurrency of execution.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use qlbm_core::lattice::{
    equivalence_classes, mass_momentum, stream_classical, CollisionRule, LatticeDescriptor, OccupancyField, Pattern,
};
use qlbm_core::qstate::{
    apply_circuit_dense, circuit_to_operator, to_dense, unitarity_check, BasisLabel, Circuit, Gate, SparseState,
};
use qlbm_core::realizability::{
    amplitude_nogo_instance, cbs_nogo_instance, cbs_states, encode_cbs, gram_check, AmplitudeNogoParams,
    D1Q2_SETTING_1, D1Q2_SETTING_2, GRAM_TOL,
};
use qlbm_core::simulator::{
    classical_ensemble_oracle, classical_focal_evolution, full_grid_run, run, FullGridConfig, RunConfig, StepOrder,
    Window,
};
use qlbm_core::spacetime::{
    collision_local_circuit, enumerate_vicinity, step_circuits, streaming_step, swap_depth, swap_depth_bound,
    CollisionParams,
};
use qlbm_core::Result;

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Perturbs the collision operator so the unitarity check must fail.
    pub inject_fault: bool,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    pub metrics: BTreeMap<String, f64>,
    pub elapsed: Duration,
}

type CheckFn = fn(&SuiteOptions, &mut Tally) -> Result<bool>;

/// Collects headline numbers and a short description while a check runs.
#[derive(Default)]
pub struct Tally {
    metrics: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Tally {
    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn worst(&mut self, key: &str, value: f64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(0.0);
        *slot = slot.max(value);
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

pub const CHECKS: [(usize, &str, CheckFn); 11] = [
    (1, "cbs streaming no-go", cbs_nogo),
    (2, "amplitude collision no-go", amplitude_nogo),
    (3, "qubit-count formula", qubit_count),
    (4, "collision unitarity", collision_unitarity),
    (5, "step-count formulas", step_counts),
    (6, "streaming oracle equivalence", streaming_oracle),
    (7, "deterministic end-to-end runs", deterministic_runs),
    (8, "superposed collision vs ensemble", ensemble_agreement),
    (9, "full-grid D1Q2 settings", full_grid_settings),
    (10, "streaming depth bound", depth_bound),
    (11, "sparse vs dense engine", engine_cross_check),
];

pub fn run_check(id: usize, opts: &SuiteOptions) -> Option<CheckOutcome> {
    let &(id, name, f) = CHECKS.iter().find(|c| c.0 == id)?;
    let mut tally = Tally::default();
    let start = Instant::now();
    let result = f(opts, &mut tally);
    let elapsed = start.elapsed();
    let (pass, summary) = match result {
        Ok(pass) => (pass, tally.notes.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CheckOutcome {
        id,
        name,
        pass,
        summary,
        metrics: tally.metrics,
        elapsed,
    })
}

/// Runs every check on its own thread; results come back ordered by id.
pub fn run_suite(opts: &SuiteOptions) -> Vec<CheckOutcome> {
    std::thread::scope(|s| {
        let handles: Vec<_> = CHECKS
            .iter()
            .map(|&(id, ..)| s.spawn(move || run_check(id, opts).expect("id from table")))
            .collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    })
}

fn rng_for(id: usize) -> StdRng {
    StdRng::seed_from_u64(0x5eed_0000 + id as u64)
}

fn unit_pair(rng: &mut StdRng) -> (Complex64, Complex64) {
    let t: f64 = rng.random_range(0.0..FRAC_PI_2);
    (
        Complex64::from_polar(t.cos(), rng.random_range(-3.2..3.2)),
        Complex64::from_polar(t.sin(), rng.random_range(-3.2..3.2)),
    )
}

fn patterns(strs: &[&str]) -> Vec<Pattern> {
    strs.iter().map(|s| s.parse().expect("valid pattern literal")).collect()
}

fn d2q4() -> LatticeDescriptor {
    LatticeDescriptor::build("D2Q4").expect("built-in lattice")
}

fn cbs_nogo(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let start = Instant::now();
    let [p1, p2, q1, q2] = cbs_states()?;
    let before = p1.inner_product(&p2)?;
    let after = q1.inner_product(&q2)?;
    let report = gram_check(&cbs_nogo_instance(), GRAM_TOL);
    let elapsed = start.elapsed();

    // the primed states must be what classical streaming produces
    let d1q2 = LatticeDescriptor::build("D1Q2")?;
    let mut consistent = true;
    for (setting, primed) in [(D1Q2_SETTING_1, &q1), (D1Q2_SETTING_2, &q2)] {
        let f = OccupancyField::from_patterns(&d1q2, &[4], &patterns(&setting))?;
        let overlap = encode_cbs(&stream_classical(&f))?.inner_product(primed)?;
        consistent &= (overlap.norm() - 1.0).abs() <= 1e-12;
    }

    t.metric("inner_before", before.re);
    t.metric("inner_after", after.re);
    t.metric("seconds", elapsed.as_secs_f64());
    t.note(format!(
        "<psi1|psi2> = {}, <psi1'|psi2'> = {}, {:.1?}",
        before.re, after.re, elapsed
    ));
    Ok(before.norm() <= 1e-12
        && (after - Complex64::new(0.5, 0.0)).norm() <= 1e-12
        && !report.realizable
        && consistent
        && elapsed < Duration::from_secs(1))
}

fn amplitude_nogo(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let mut rng = rng_for(2);
    let mut ok = true;
    for _ in 0..100 {
        let (alpha0, alpha1) = unit_pair(&mut rng);
        let (beta2, beta3) = unit_pair(&mut rng);
        let (gamma0, gamma1) = unit_pair(&mut rng);
        let p = AmplitudeNogoParams {
            alpha0,
            alpha1,
            beta2,
            beta3,
            gamma0,
            gamma1,
            theta: rng.random_range(-3.2..3.2),
        };
        let report = gram_check(&amplitude_nogo_instance(&p)?, GRAM_TOL);
        let expected = gamma1.norm() * beta2.norm();
        let err = (report.max_deviation - expected).abs();
        t.worst("max_error", err);
        ok &= err <= 1e-12 && report.realizable == (expected <= GRAM_TOL);
    }
    let trivial = gram_check(
        &amplitude_nogo_instance(&AmplitudeNogoParams::from_real(0.0, FRAC_1_SQRT_2, 0.3)?)?,
        GRAM_TOL,
    );
    t.note(format!(
        "100 sets, worst |delta - |g1||b2|| = {:.2e}; gamma1 = 0 realizable: {}",
        t.metrics["max_error"], trivial.realizable
    ));
    Ok(ok && trivial.realizable)
}

fn qubit_count(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let mut ok = true;
    for n in 0..=8usize {
        ok &= enumerate_vicinity(&d, n)?.num_qubits() == 8 * n * n + 8 * n + 4;
    }
    let one = enumerate_vicinity(&d, 1)?.num_qubits();
    t.metric("n_v_at_1", one as f64);
    t.note(format!("N_t = 0..8 match, N_t = 1 gives {one} qubits"));
    Ok(ok && one == 20)
}

fn pattern_of_index(index: usize) -> Pattern {
    (0..4).fold(Pattern::empty(4), |p, j| p.with(j, index >> (3 - j) & 1 == 1))
}

fn collision_unitarity(opts: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let table = equivalence_classes(&d);
    let mut rng = rng_for(4);
    let mut ok = true;
    for trial in 0..50 {
        let (a, b) = unit_pair(&mut rng);
        let params = CollisionParams::new(a, b)?;
        let mut op = circuit_to_operator(&collision_local_circuit(&params, [0, 1, 2, 3], 4)?)?;
        if opts.inject_fault && trial == 0 {
            let i = 0b1010;
            op.set(i, i, op.get(i, i) * 1.001);
        }
        let report = unitarity_check(&op, 1e-12);
        t.worst("max_unitarity_deviation", report.max_deviation);
        ok &= report.passed();
        for col in 0..16 {
            let input = pattern_of_index(col);
            let in_class = table.partner(input).is_some();
            for row in 0..16 {
                let x = op.get(row, col);
                if !in_class {
                    let want = if row == col { 1.0 } else { 0.0 };
                    t.worst("max_identity_deviation", (x - want).norm());
                    ok &= (x - want).norm() <= 1e-12;
                }
                if x.norm() > 1e-12 {
                    ok &= mass_momentum(pattern_of_index(row), &d) == mass_momentum(input, &d);
                }
            }
        }
    }
    t.note(format!(
        "50 draws, max |U^dag U - I| = {:.2e}, identity on 14 states, invariants kept",
        t.metrics["max_unitarity_deviation"]
    ));
    Ok(ok)
}

fn step_counts(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let params = CollisionParams::real(0.6, 0.8)?;
    let mut ok = true;
    let mut cases = 0;
    for n_t in 1..=6usize {
        let layout = enumerate_vicinity(&d, n_t)?;
        for step in 1..=n_t {
            let r = n_t - step;
            let sc = step_circuits(&layout, &params, step)?;
            let c = sc.collision.count(|g| matches!(g, Gate::McRot { .. }));
            let swaps = sc.streaming.circuit.count(|g| matches!(g, Gate::Swap(..)));
            ok &= c == 2 * r * r + 2 * r + 1 && swaps == 8 * r * r + 8 * r + 4;
            ok &= c == sc.c_applied && swaps == sc.swaps_applied;
            cases += 1;
        }
    }
    t.metric("cases", cases as f64);
    t.note(format!("{cases} (N_t, t) pairs match exactly"));
    Ok(ok)
}

fn random_window(rng: &mut StdRng, layout_bits: usize, density: f64) -> Vec<bool> {
    (0..layout_bits).map(|_| rng.random_bool(density)).collect()
}

fn streaming_oracle(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let mut rng = rng_for(6);
    let mut ok = true;
    let mut compared = 0usize;
    for n_t in 1..=4usize {
        let layout = enumerate_vicinity(&d, n_t)?;
        let steps: Vec<_> = (1..=n_t).map(|s| streaming_step(&layout, s)).collect::<Result<_>>()?;
        for _ in 0..1000 {
            let bits = random_window(&mut rng, layout.num_qubits(), 0.5);
            let field = Window::from_layout_bits(&layout, &bits)?.to_field();
            let streamed = stream_classical(&field);
            for (s, step) in steps.iter().enumerate() {
                let radius = n_t - (s + 1);
                let mut state = SparseState::init_basis(layout.num_qubits(), BasisLabel::from_bits(&bits))?;
                state.apply_circuit(&step.circuit)?;
                let out = state.as_basis().expect("swaps keep a basis state");
                for q in 0..layout.num_qubits() {
                    let (offset, j) = layout.location(q);
                    if offset.iter().map(|c| c.unsigned_abs() as usize).sum::<usize>() > radius {
                        continue;
                    }
                    let coords: Vec<i64> = offset.iter().map(|&c| (c + n_t as i32) as i64).collect();
                    ok &= out.get(q) == streamed.get(streamed.site_index(&coords), j);
                    compared += 1;
                }
            }
        }
    }
    t.metric("bits_compared", compared as f64);
    t.note(format!(
        "4000 windows (1000 per N_t = 1..4), {compared} retained bits compared"
    ));
    Ok(ok)
}

fn deterministic_runs(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let mut rng = rng_for(7);
    let params = CollisionParams::real(0.0, 1.0)?;
    let start = Instant::now();
    let mut ok = true;
    let mut runs = 0;
    for n_t in 1..=3usize {
        let layout = enumerate_vicinity(&d, n_t)?;
        for i in 0..1000 {
            let bits = random_window(&mut rng, layout.num_qubits(), 0.5);
            let mut w = Window::from_layout_bits(&layout, &bits)?;
            // cycle through all focal patterns
            w.set_pattern(&[0, 0], Pattern::new(i as u32 % 16, 4))?;
            let out = run(&RunConfig::new(w.clone(), n_t, params))?;
            let expect = classical_focal_evolution(&w, n_t, CollisionRule::SwapClass, StepOrder::CollideThenStream);
            ok &= out.state.len() == 1 && out.focal.certain(0.0) == Some(expect);
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    t.metric("runs", runs as f64);
    t.metric("seconds", elapsed.as_secs_f64());
    t.note(format!(
        "{runs} windows bit-exact, single entry throughout, {elapsed:.1?}"
    ));
    Ok(ok && elapsed < Duration::from_secs(60))
}

fn ensemble_agreement(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = d2q4();
    let mut rng = rng_for(8);
    let params = CollisionParams::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2)?;
    let target = 250;
    let mut ok = true;
    let (mut agreed, mut interfering, mut too_many) = (0usize, 0usize, 0usize);
    for n_t in 1..=2usize {
        let layout = enumerate_vicinity(&d, n_t)?;
        let mut kept = 0;
        let mut attempts = 0;
        while kept < target && attempts < 50 * target {
            attempts += 1;
            let density = rng.random_range(0.1..0.5);
            let bits = random_window(&mut rng, layout.num_qubits(), density);
            let w = Window::from_layout_bits(&layout, &bits)?;
            let cfg = RunConfig::new(w, n_t, params);
            let quantum = run(&cfg)?;
            let events = quantum.effect.branching_rotations;
            if events == 0 {
                continue;
            }
            if events > 8 {
                too_many += 1;
                continue;
            }
            if quantum.effect.merged_pairs > 0 {
                interfering += 1;
                continue;
            }
            let classical = classical_ensemble_oracle(&cfg)?;
            let tv = quantum.focal.tv_distance(&classical);
            t.worst("max_tv", tv);
            ok &= tv <= 1e-9;
            kept += 1;
        }
        ok &= kept == target;
        agreed += kept;
    }
    t.metric("windows", agreed as f64);
    t.metric("interfering_skipped", interfering as f64);
    t.note(format!(
        "{agreed} branching windows, max TV = {:.2e}; skipped {interfering} interfering, {too_many} over 8 events",
        t.metrics.get("max_tv").copied().unwrap_or(0.0)
    ));
    Ok(ok)
}

fn full_grid_settings(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let d = LatticeDescriptor::build("D1Q2")?;
    let [_, _, q1, q2] = cbs_states()?;
    let expected = [["11", "00", "10", "10"], ["11", "00", "01", "01"]];
    let mut ok = true;
    for ((setting, after), primed) in [D1Q2_SETTING_1, D1Q2_SETTING_2].iter().zip(expected).zip([q1, q2]) {
        let field = OccupancyField::from_patterns(&d, &[4], &patterns(setting))?;
        let trace = full_grid_run(&FullGridConfig::new(field.clone(), 9, CollisionParams::identity()))?;
        let frames: Vec<_> = trace.frames.iter().map(|f| f.basis.clone()).collect();
        let Some(one) = frames[1].clone() else { return Ok(false) };
        ok &= one == OccupancyField::from_patterns(&d, &[4], &patterns(&after))?;
        ok &= (encode_cbs(&one)?.inner_product(&primed)?.norm() - 1.0).abs() <= 1e-12;
        ok &= frames[9].as_ref() == Some(&one);
        ok &= frames[8].as_ref() == Some(&field);
    }
    t.note("both settings give the primed configurations after one step; 8 more steps return to them");
    Ok(ok)
}

fn depth_bound(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let mut ok = true;
    let mut worst = 0usize;
    for name in ["D2Q4", "D1Q2", "D1Q3", "D2Q5"] {
        let d = LatticeDescriptor::build(name)?;
        for n_t in 1..=8usize {
            let layout = enumerate_vicinity(&d, n_t)?;
            for step in 1..=n_t {
                let depth = swap_depth(&layout, step)?;
                worst = worst.max(depth);
                ok &= depth <= swap_depth_bound(n_t, step);
            }
        }
    }
    t.metric("max_depth", worst as f64);
    t.note(format!(
        "all 1 <= t <= N_t <= 8 within bound, deepest layer count {worst}"
    ));
    Ok(ok)
}

fn random_gate(rng: &mut StdRng, n: usize) -> Gate {
    let mut qs: Vec<usize> = (0..n).collect();
    qs.shuffle(rng);
    match rng.random_range(0..5) {
        0 => Gate::X(qs[0]),
        1 if n > 1 => Gate::Swap(qs[0], qs[1]),
        2 if n > 1 => Gate::Cnot {
            control: qs[0],
            target: qs[1],
        },
        3 => {
            let mut dest: Vec<usize> = (0..n).collect();
            dest.shuffle(rng);
            Gate::Permute(dest)
        }
        _ => {
            let k = rng.random_range(0..n.min(4));
            let (a, b) = unit_pair(rng);
            Gate::mc_rot(qs[1..=k].to_vec(), qs[0], a, b).expect("normalized pair")
        }
    }
}

fn engine_cross_check(_: &SuiteOptions, t: &mut Tally) -> Result<bool> {
    let mut rng = rng_for(11);
    let mut ok = true;
    for _ in 0..500 {
        let n = rng.random_range(1..=12usize);
        let mut circuit = Circuit::new(n);
        for _ in 0..rng.random_range(1..40) {
            circuit.push(random_gate(&mut rng, n))?;
        }
        let terms: Vec<_> = (0..rng.random_range(1..5))
            .map(|_| rng.random_range(0..1u64 << n))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|i| {
                (
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                    BasisLabel::from_index(i, n),
                )
            })
            .collect();
        let mut sparse = SparseState::superpose(&terms)?;
        let mut dense = to_dense(&sparse)?;
        sparse.apply_circuit(&circuit)?;
        apply_circuit_dense(&mut dense, &circuit)?;
        for (a, b) in to_dense(&sparse)?.iter().zip(&dense) {
            let err = (a - b).norm();
            t.worst("max_amplitude_error", err);
            ok &= err <= 1e-10;
        }
    }
    t.note(format!(
        "500 circuits on 1..12 qubits, max amplitude error {:.2e}",
        t.metrics["max_amplitude_error"]
    ));
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_injection_trips_unitarity() {
        let bad = run_check(4, &SuiteOptions { inject_fault: true }).unwrap();
        assert!(!bad.pass);
        assert!(bad.metrics["max_unitarity_deviation"] > 1e-6);
    }

    #[test]
    fn index_to_pattern_is_big_endian() {
        assert_eq!(pattern_of_index(0b1010).to_string(), "1010");
        assert_eq!(pattern_of_index(0b0001).to_string(), "0001");
    }
}
