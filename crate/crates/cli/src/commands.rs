//! Subcommand implementations. Each returns a [`Report`] holding the same
//! result as JSON, CSV and human-readable text.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Map, Value};

use qlbm_core::lattice::{LatticeDescriptor, OccupancyField, Pattern};
use qlbm_core::qstate::{Gate, SparseState};
use qlbm_core::realizability::{
    amplitude_nogo_instance, cbs_nogo_instance, cbs_states, gram_check, AmplitudeNogoParams, GramReport, GRAM_TOL,
};
use qlbm_core::simulator::{
    classical_grid_evolution, compare, deterministic_rule, full_grid_run, run, ComparisonMode, FocalDistribution,
    FullGridConfig, RunConfig, StepOrder, Window, DEFAULT_MAX_ENTRIES,
};
use qlbm_core::spacetime::{
    collision_count_formula, enumerate_vicinity, qubit_count_formula, step_circuits, swap_count_formula, swap_depth,
    swap_depth_bound, CollisionParams,
};
use qlbm_core::winfile::{self, WinFile};

use crate::canonical::{format_float, SCHEMA_VERSION};
use crate::checks::{run_suite, SuiteOptions};
use crate::error::{exit, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// One result rendered three ways, plus the exit code it implies.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub human: String,
    pub exit: u8,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => crate::canonical::to_string(&self.json),
            Format::Csv => self.csv.clone(),
            Format::Human => self.human.clone(),
        }
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    if let Value::Object(body) = body {
        map.extend(body);
    }
    Value::Object(map)
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// `0.5|0011> + (0.1-0.2i)|0100>` with `|q0 q1 ...>` ordering.
pub fn ket_string(state: &SparseState) -> String {
    let mut entries: Vec<(String, Complex64)> = state.iter().map(|(l, a)| (l.to_string(), *a)).collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let terms: Vec<String> = entries
        .into_iter()
        .map(|(label, a)| {
            let coeff = if a.im == 0.0 {
                format!("{}", a.re)
            } else if a.re == 0.0 {
                format!("{}i", a.im)
            } else {
                format!("({}{:+}i)", a.re, a.im)
            };
            format!("{coeff}|{label}>")
        })
        .collect();
    terms.join(" + ")
}

fn gram_json(report: &GramReport) -> Value {
    let matrix = |m: &Vec<Vec<Complex64>>| -> Value {
        Value::Array(
            m.iter()
                .map(|row| Value::Array(row.iter().map(|z| complex_json(*z)).collect()))
                .collect(),
        )
    };
    let violation = |v: &qlbm_core::realizability::Violation| {
        json!({
            "i": v.i,
            "j": v.j,
            "in": v.inner_in.re,
            "in_im": v.inner_in.im,
            "out": v.inner_out.re,
            "out_im": v.inner_out.im,
            "delta": v.delta,
        })
    };
    let worst = report
        .violations
        .iter()
        .max_by(|a, b| a.delta.total_cmp(&b.delta))
        .map(violation)
        .unwrap_or(Value::Null);
    json!({
        "realizable": report.realizable,
        "tolerance": report.tolerance,
        "max_deviation": report.max_deviation,
        "violation": worst,
        "violations": report.violations.iter().map(violation).collect::<Vec<_>>(),
        "gram_in": matrix(&report.gram_in),
        "gram_out": matrix(&report.gram_out),
    })
}

fn gram_csv(report: &GramReport) -> String {
    let mut s = String::from("i,j,in_re,in_im,out_re,out_im,delta\n");
    for v in &report.violations {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            v.i,
            v.j,
            format_float(v.inner_in.re),
            format_float(v.inner_in.im),
            format_float(v.inner_out.re),
            format_float(v.inner_out.im),
            format_float(v.delta)
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Encoding {
    Amplitude,
    Cbs,
}

#[derive(Debug, Clone, Args)]
pub struct NogoArgs {
    #[arg(value_enum)]
    pub encoding: Encoding,
    /// Weight of the partner class after collision.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub gamma1: f64,
    #[arg(long, default_value_t = FRAC_1_SQRT_2, allow_hyphen_values = true)]
    pub beta2: f64,
    /// Phase picked up by the lone-speed state.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,
}

pub fn nogo(args: &NogoArgs) -> CliResult<Report> {
    match args.encoding {
        Encoding::Cbs => nogo_cbs(),
        Encoding::Amplitude => nogo_amplitude(args),
    }
}

fn nogo_cbs() -> CliResult<Report> {
    let states = cbs_states()?;
    let report = gram_check(&cbs_nogo_instance(), GRAM_TOL);
    let before = states[0].inner_product(&states[1])?;
    let after = states[2].inner_product(&states[3])?;
    let reproduced = before.norm() <= 1e-12 && (after - Complex64::new(0.5, 0.0)).norm() <= 1e-12;
    let names = ["psi1", "psi2", "psi1_streamed", "psi2_streamed"];
    let kets: Map<String, Value> = names
        .iter()
        .zip(&states)
        .map(|(n, s)| (n.to_string(), json!(ket_string(s))))
        .collect();
    let mut body = gram_json(&report);
    body["encoding"] = json!("cbs");
    body["states"] = Value::Object(kets);
    body["expected_violation"] = json!(true);
    body["reproduced"] = json!(reproduced);

    let mut human = String::new();
    for (n, s) in names.iter().zip(&states) {
        let _ = writeln!(human, "{n:>14} = {}", ket_string(s));
    }
    let _ = writeln!(human, "<psi1|psi2> = {}", before.re);
    let _ = writeln!(human, "<psi1'|psi2'> = {}", after.re);
    let _ = writeln!(
        human,
        "{}",
        if report.realizable {
            "realizable"
        } else {
            "no unitary streaming exists"
        }
    );
    Ok(Report {
        json: envelope("nogo", body),
        csv: gram_csv(&report),
        human,
        exit: if reproduced { exit::OK } else { exit::VALIDATION },
    })
}

fn nogo_amplitude(args: &NogoArgs) -> CliResult<Report> {
    let params = AmplitudeNogoParams::from_real(args.gamma1, args.beta2, args.theta)?;
    let report = gram_check(&amplitude_nogo_instance(&params)?, GRAM_TOL);
    let expected_violation = (params.gamma1 * params.beta2).norm() > GRAM_TOL;
    let reproduced = report.realizable != expected_violation;
    let mut body = gram_json(&report);
    body["encoding"] = json!("amplitude");
    body["params"] = json!({
        "alpha0": complex_json(params.alpha0),
        "alpha1": complex_json(params.alpha1),
        "beta2": complex_json(params.beta2),
        "beta3": complex_json(params.beta3),
        "gamma0": complex_json(params.gamma0),
        "gamma1": complex_json(params.gamma1),
        "theta": params.theta,
    });
    body["expected_violation"] = json!(expected_violation);
    body["reproduced"] = json!(reproduced);
    let human = format!(
        "gamma1 = {}, beta2 = {}, theta = {}\nmax deviation {} -> {}\n",
        args.gamma1,
        args.beta2,
        args.theta,
        report.max_deviation,
        if report.realizable {
            "realizable"
        } else {
            "not realizable"
        }
    );
    Ok(Report {
        json: envelope("nogo", body),
        csv: gram_csv(&report),
        human,
        exit: if reproduced { exit::OK } else { exit::VALIDATION },
    })
}

#[derive(Debug, Clone, Args)]
pub struct FormulasArgs {
    /// Largest N_t tabulated (at most 64).
    #[arg(long, default_value_t = 8)]
    pub nt_max: usize,
    #[arg(long, default_value = "d2q4")]
    pub lattice: String,
}

pub const NT_MAX_LIMIT: usize = 64;

pub fn formulas(args: &FormulasArgs) -> CliResult<Report> {
    if args.nt_max > NT_MAX_LIMIT {
        return Err(CliError::Usage(format!("--nt-max must be at most {NT_MAX_LIMIT}")));
    }
    let d = LatticeDescriptor::build(&args.lattice)?;
    let params = CollisionParams::real(0.6, 0.8)?;
    let mut rows = Vec::new();
    let mut csv = String::from(
        "n_t,t,n_v_formula,n_v_enum,c_formula,c_enum,n_swap_formula,n_swap_enum,measured_depth,depth_bound,match\n",
    );
    let mut human = format!(
        "{:>4} {:>4} {:>8} {:>6} {:>8} {:>6} {:>6}\n",
        "N_t", "t", "n_v", "c", "n_swap", "depth", "ok"
    );
    let mut all_ok = true;
    for n_t in 0..=args.nt_max {
        let layout = enumerate_vicinity(&d, n_t)?;
        let nv_f = qubit_count_formula(&d, n_t);
        let nv_e = layout.num_qubits();
        if n_t == 0 {
            let ok = nv_f == nv_e;
            all_ok &= ok;
            rows.push(json!({"n_t": 0, "t": 0, "n_v_formula": nv_f, "n_v_enum": nv_e, "match": ok}));
            let _ = writeln!(csv, "0,0,{nv_f},{nv_e},,,,,,,{ok}");
            let _ = writeln!(
                human,
                "{:>4} {:>4} {:>8} {:>6} {:>8} {:>6} {:>6}",
                0, 0, nv_e, "-", "-", "-", ok
            );
            continue;
        }
        for t in 1..=n_t {
            let sc = step_circuits(&layout, &params, t)?;
            let c_f = collision_count_formula(&d, n_t, t)?;
            let c_e = sc.collision.count(|g| matches!(g, Gate::McRot { .. }));
            let s_f = swap_count_formula(&d, n_t, t)?;
            let s_e = sc.streaming.circuit.count(|g| matches!(g, Gate::Swap(..)));
            let depth = swap_depth(&layout, t)?;
            let bound = swap_depth_bound(n_t, t);
            let ok = nv_f == nv_e && c_f == c_e && s_f == s_e && depth <= bound;
            all_ok &= ok;
            rows.push(json!({
                "n_t": n_t, "t": t,
                "n_v_formula": nv_f, "n_v_enum": nv_e,
                "c_formula": c_f, "c_enum": c_e,
                "n_swap_formula": s_f, "n_swap_enum": s_e,
                "measured_depth": depth, "depth_bound": bound,
                "match": ok,
            }));
            let _ = writeln!(
                csv,
                "{n_t},{t},{nv_f},{nv_e},{c_f},{c_e},{s_f},{s_e},{depth},{bound},{ok}"
            );
            let _ = writeln!(human, "{n_t:>4} {t:>4} {nv_e:>8} {c_e:>6} {s_e:>8} {depth:>6} {ok:>6}");
        }
    }
    Ok(Report {
        json: envelope(
            "formulas",
            json!({"lattice": d.name(), "nt_max": args.nt_max, "rows": rows, "all_match": all_ok}),
        ),
        csv,
        human,
        exit: if all_ok { exit::OK } else { exit::VALIDATION },
    })
}

/// Flags shared by `simulate` and `fullgrid`.
#[derive(Debug, Clone, Args)]
pub struct RunFlags {
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// `collide-then-stream` or `stream-then-collide`.
    #[arg(long, default_value = "collide-then-stream")]
    pub order: String,
    /// Compare against the classical oracle.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ENTRIES)]
    pub max_entries: usize,
}

impl RunFlags {
    fn params(&self) -> CliResult<CollisionParams> {
        let norm = self.alpha * self.alpha + self.beta * self.beta;
        CollisionParams::real(self.alpha, self.beta).map_err(|_| {
            CliError::Usage(format!(
                "collision amplitudes must satisfy alpha^2 + beta^2 = 1, got {norm}"
            ))
        })
    }

    fn order(&self) -> CliResult<StepOrder> {
        self.order
            .parse()
            .map_err(|_| CliError::Usage(format!("unknown step order `{}`", self.order)))
    }

    fn descriptor(&self, file: Option<&WinFile>) -> CliResult<LatticeDescriptor> {
        match (&self.lattice, file) {
            (Some(name), Some(f)) => {
                let d = LatticeDescriptor::build(name)?;
                if &d != f.descriptor() {
                    return Err(CliError::Usage(format!(
                        "--lattice {} disagrees with the file's {}",
                        d,
                        f.descriptor()
                    )));
                }
                Ok(d)
            }
            (Some(name), None) => Ok(LatticeDescriptor::build(name)?),
            (None, Some(f)) => Ok(f.descriptor().clone()),
            (None, None) => Ok(LatticeDescriptor::build("d2q4")?),
        }
    }
}

pub fn read_win(path: &Path) -> CliResult<WinFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(winfile::parse(&text)?)
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunFlags,
    /// Number of time steps; defaults to the window extent.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Focal velocity pattern, overriding the window file.
    #[arg(long)]
    pub focal: Option<String>,
    /// Draw this many demonstration samples from the focal distribution.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn distribution_json(d: &FocalDistribution) -> Value {
    Value::Array(
        d.iter()
            .map(|(p, w)| json!({"pattern": p.to_string(), "probability": w}))
            .collect(),
    )
}

fn sample_counts(dist: &FocalDistribution, n: usize, seed: u64) -> BTreeMap<String, usize> {
    let mut rng = StdRng::seed_from_u64(seed);
    let support: Vec<(Pattern, f64)> = dist.iter().collect();
    let total: f64 = support.iter().map(|(_, w)| w).sum();
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        let mut x = rng.random::<f64>() * total;
        let mut pick = support.last().map(|(p, _)| *p);
        for (p, w) in &support {
            if x < *w {
                pick = Some(*p);
                break;
            }
            x -= w;
        }
        if let Some(p) = pick {
            *counts.entry(p.to_string()).or_default() += 1;
        }
    }
    counts
}

pub fn simulate(args: &SimulateArgs) -> CliResult<Report> {
    let params = args.run.params()?;
    let order = args.run.order()?;
    let file = args.run.init.as_deref().map(read_win).transpose()?;
    let descriptor = args.run.descriptor(file.as_ref())?;
    let mut window = match file {
        Some(WinFile::Window(w)) => w,
        Some(WinFile::Grid(_)) => {
            return Err(CliError::Usage(
                "simulate needs an `extent` window file, not a `grid` file".into(),
            ))
        }
        None => Window::new(&descriptor, args.nt.unwrap_or(1)),
    };
    let n_t = args.nt.unwrap_or(window.extent());
    window = window.with_extent(n_t)?;
    if let Some(f) = &args.focal {
        let p: Pattern = f
            .parse()
            .map_err(|_| CliError::Usage(format!("bad focal pattern `{f}`")))?;
        if p.width() != descriptor.num_directions() {
            return Err(CliError::Usage(format!(
                "focal pattern needs {} bits",
                descriptor.num_directions()
            )));
        }
        window.set_pattern(&vec![0; descriptor.dimension()], p)?;
    }
    let config = RunConfig {
        descriptor: descriptor.clone(),
        n_t,
        params,
        window: window.clone(),
        order,
        max_entries: args.run.max_entries,
    };
    let (outcome, comparison) = if args.run.verify {
        let c = compare(&config)?;
        (c.quantum.clone(), Some(c))
    } else {
        (run(&config)?, None)
    };

    let occupied: Vec<Value> = window
        .occupied()
        .map(|(o, j)| json!({"offset": o, "direction": j}))
        .collect();
    let mut body = json!({
        "config": {
            "lattice": descriptor.name(),
            "n_t": n_t,
            "alpha": params.alpha().re,
            "beta": params.beta().re,
            "order": order.to_string(),
            "max_entries": args.run.max_entries,
            "window": occupied,
        },
        "focal": distribution_json(&outcome.focal),
        "sparse": {
            "num_qubits": outcome.state.num_qubits(),
            "final_entries": outcome.state.len(),
            "peak_entries": outcome.effect.peak_entries,
            "branching_rotations": outcome.effect.branching_rotations,
            "merged_pairs": outcome.effect.merged_pairs,
        },
    });
    let mut csv = String::from("pattern,probability");
    let mut human = format!(
        "{} N_t={} alpha={} beta={} ({})\n",
        descriptor,
        n_t,
        params.alpha().re,
        params.beta().re,
        order
    );
    let mut exit_code = exit::OK;
    if let Some(c) = &comparison {
        body["comparison"] = json!({
            "tv_distance": c.tv_distance,
            "tolerance": c.tolerance,
            "pass": c.pass,
            "mode": match c.mode {
                ComparisonMode::Agreement => "agreement",
                ComparisonMode::ExpectedMismatch => "expected-mismatch",
            },
            "classical": distribution_json(&c.classical),
            "deltas": c.deltas.iter().map(|(p, d)| json!({"pattern": p.to_string(), "delta": d})).collect::<Vec<_>>(),
        });
        csv.push_str(",classical,delta");
        if c.mode == ComparisonMode::Agreement && !c.pass {
            exit_code = exit::VALIDATION;
        }
    }
    csv.push('\n');
    let patterns: Vec<Pattern> = match &comparison {
        Some(c) => c.deltas.keys().copied().collect(),
        None => outcome.focal.iter().map(|(p, _)| p).collect(),
    };
    for p in patterns {
        let _ = write!(csv, "{p},{}", format_float(outcome.focal.get(p)));
        if let Some(c) = &comparison {
            let _ = write!(
                csv,
                ",{},{}",
                format_float(c.classical.get(p)),
                format_float(c.deltas[&p])
            );
        }
        csv.push('\n');
    }
    if outcome.state.len() <= 32 {
        let _ = writeln!(human, "state: {}", ket_string(&outcome.state));
    } else {
        let _ = writeln!(human, "state: {} basis entries", outcome.state.len());
    }
    for (p, w) in outcome.focal.iter() {
        let _ = writeln!(human, "  P(|{p}>) = {w}");
    }
    if let Some(c) = &comparison {
        let _ = writeln!(
            human,
            "classical ensemble TV distance {} ({})",
            c.tv_distance,
            if c.mode == ComparisonMode::Agreement {
                if c.pass {
                    "agrees"
                } else {
                    "DISAGREES"
                }
            } else {
                "branches interfered, mismatch expected"
            }
        );
    }
    if args.samples > 0 {
        let counts = sample_counts(&outcome.focal, args.samples, args.seed);
        for (p, n) in &counts {
            let _ = writeln!(human, "  sampled |{p}> x{n}");
        }
        body["samples"] = json!({"seed": args.seed, "count": args.samples, "counts": counts});
    }
    Ok(Report {
        json: envelope("simulate", body),
        csv,
        human,
        exit: exit_code,
    })
}

#[derive(Debug, Clone, Args)]
pub struct FullGridArgs {
    #[command(flatten)]
    pub run: RunFlags,
    /// Grid size, `4` or `2x3`; taken from the file when omitted.
    #[arg(long)]
    pub sites: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

fn parse_sites(s: &str) -> CliResult<Vec<usize>> {
    s.split(['x', 'X', ','])
        .map(|p| match p.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("bad --sites `{s}`"))),
        })
        .collect()
}

pub fn fullgrid(args: &FullGridArgs) -> CliResult<Report> {
    let params = args.run.params()?;
    let order = args.run.order()?;
    let file = args.run.init.as_deref().map(read_win).transpose()?;
    let descriptor = args.run.descriptor(file.as_ref())?;
    let sites = args.sites.as_deref().map(parse_sites).transpose()?;
    let field = match (file, sites) {
        (Some(WinFile::Grid(f)), Some(s)) if f.extents() != s.as_slice() => {
            return Err(CliError::Usage(format!(
                "--sites {:?} disagrees with the file's grid {:?}",
                s,
                f.extents()
            )))
        }
        (Some(WinFile::Grid(f)), _) => f,
        (Some(WinFile::Window(_)), _) => {
            return Err(CliError::Usage(
                "fullgrid needs a `grid` file, not an `extent` window".into(),
            ))
        }
        (None, Some(s)) => OccupancyField::empty(&descriptor, &s)?,
        (None, None) => return Err(CliError::Usage("fullgrid needs --init or --sites".into())),
    };
    let config = FullGridConfig {
        initial: field.clone(),
        steps: args.steps,
        params,
        order,
        max_entries: args.run.max_entries,
    };
    let trace = full_grid_run(&config)?;
    let m = descriptor.num_directions();

    let mut verify = Value::Null;
    let mut exit_code = exit::OK;
    if args.run.verify {
        let (kind, pass) = match deterministic_rule(&params) {
            Some(rule) => {
                let expect = classical_grid_evolution(&field, args.steps, rule, order);
                let pass = trace
                    .frames
                    .iter()
                    .zip(&expect)
                    .all(|(f, e)| f.basis.as_ref() == Some(e));
                ("classical-evolution", pass)
            }
            None => {
                let mass = field.total_mass() as f64;
                let pass = trace
                    .frames
                    .iter()
                    .all(|f| (f.occupancy.iter().sum::<f64>() - mass).abs() <= 1e-9);
                ("mass-conservation", pass)
            }
        };
        verify = json!({"kind": kind, "pass": pass});
        if !pass {
            exit_code = exit::VALIDATION;
        }
    }

    let patterns_of =
        |f: &OccupancyField| -> Vec<String> { (0..f.num_sites()).map(|s| f.pattern(s).to_string()).collect() };
    let frames: Vec<Value> = trace
        .frames
        .iter()
        .map(|f| {
            json!({
                "step": f.step,
                "entries": f.entries,
                "occupancy": f.occupancy,
                "basis": f.basis.as_ref().map(patterns_of),
            })
        })
        .collect();
    let body = json!({
        "config": {
            "lattice": descriptor.name(),
            "sites": field.extents(),
            "steps": args.steps,
            "alpha": params.alpha().re,
            "beta": params.beta().re,
            "order": order.to_string(),
            "max_entries": args.run.max_entries,
        },
        "frames": frames,
        "sparse": {
            "peak_entries": trace.effect.peak_entries,
            "branching_rotations": trace.effect.branching_rotations,
            "merged_pairs": trace.effect.merged_pairs,
        },
        "verify": verify,
    });
    let mut csv = String::from("step,site,direction,probability\n");
    let mut human = String::new();
    for f in &trace.frames {
        for (q, p) in f.occupancy.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{},{}", f.step, q / m, q % m, format_float(*p));
        }
        match &f.basis {
            Some(b) => {
                let _ = writeln!(human, "t={:<3} |{}>", f.step, patterns_of(b).join(" "));
            }
            None => {
                let _ = writeln!(
                    human,
                    "t={:<3} {} entries, occupancy {:?}",
                    f.step, f.entries, f.occupancy
                );
            }
        }
    }
    if let Some(v) = verify.get("pass") {
        let _ = writeln!(human, "verify: {}", if v == true { "pass" } else { "FAIL" });
    }
    Ok(Report {
        json: envelope("fullgrid", body),
        csv,
        human,
        exit: exit_code,
    })
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Perturb the collision operator to exercise the failure path.
    #[arg(long)]
    pub inject_fault: bool,
}

pub fn validate(args: &ValidateArgs) -> CliResult<Report> {
    let outcomes = run_suite(&SuiteOptions {
        inject_fault: args.inject_fault,
    });
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let mut human = String::new();
    let mut csv = String::from("id,name,pass,seconds\n");
    for o in &outcomes {
        let _ = writeln!(
            human,
            "{} [{:>2}] {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.summary
        );
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            o.id,
            o.name,
            o.pass,
            format_float(o.elapsed.as_secs_f64())
        );
    }
    let _ = writeln!(human, "{passed}/{} checks passed", outcomes.len());
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "id": o.id,
                "name": o.name,
                "pass": o.pass,
                "summary": o.summary,
                "metrics": o.metrics,
                "seconds": o.elapsed.as_secs_f64(),
            })
        })
        .collect();
    Ok(Report {
        json: envelope(
            "validate",
            json!({"checks": checks, "passed": passed, "total": outcomes.len(), "inject_fault": args.inject_fault}),
        ),
        csv,
        human,
        exit: if passed == outcomes.len() {
            exit::OK
        } else {
            exit::VALIDATION
        },
    })
}
