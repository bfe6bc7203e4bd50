//! Unitary realizability of finite transition sets.
//!
//! A set of required transitions `in_i -> out_i` is realized by some unitary
//! iff every pairwise inner product is preserved:
//! `<in_i|in_j> = <out_i|out_j>` for all `i, j`. [`gram_check`] tests this
//! and [`synthesize_unitary`] builds a witness when it holds.
//!
//! Two counterexample families are packaged here: collision under amplitude
//! encoding ([`amplitude_nogo_instance`]) and streaming under computational
//! basis state encoding ([`cbs_nogo_instance`]).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeDescriptor, OccupancyField, Pattern};
use crate::qstate::{to_dense, BasisLabel, DenseOperator, SparseState, OPERATOR_CAP};

/// Default tolerance for [`gram_check`].
pub const GRAM_TOL: f64 = 1e-10;
const UNIT_NORM_TOL: f64 = 1e-10;
const PARAM_NORM_TOL: f64 = 1e-12;

/// Required state transitions over one register.
#[derive(Debug, Clone)]
pub struct TransitionSpec {
    num_qubits: usize,
    pairs: Vec<(SparseState, SparseState)>,
}

impl TransitionSpec {
    pub fn new(pairs: Vec<(SparseState, SparseState)>) -> Result<Self> {
        let Some((first, _)) = pairs.first() else {
            return Err(Error::EmptySpec);
        };
        let num_qubits = first.num_qubits();
        for (a, b) in &pairs {
            for s in [a, b] {
                if s.num_qubits() != num_qubits {
                    return Err(Error::WidthMismatch {
                        expected: num_qubits,
                        got: s.num_qubits(),
                    });
                }
                let norm = s.norm_sqr();
                if (norm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::NotNormalized(norm));
                }
            }
        }
        Ok(Self { num_qubits, pairs })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn pairs(&self) -> &[(SparseState, SparseState)] {
        &self.pairs
    }

    fn inputs(&self) -> impl Iterator<Item = &SparseState> {
        self.pairs.iter().map(|(a, _)| a)
    }

    fn outputs(&self) -> impl Iterator<Item = &SparseState> {
        self.pairs.iter().map(|(_, b)| b)
    }
}

/// One pair `(i, j)` whose inner product is not preserved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub inner_in: Complex64,
    pub inner_out: Complex64,
    /// `|<in_i|in_j> - <out_i|out_j>|`
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub realizable: bool,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub gram_in: Vec<Vec<Complex64>>,
    pub gram_out: Vec<Vec<Complex64>>,
    /// Violating pairs with `i <= j`.
    pub violations: Vec<Violation>,
}

fn gram<'a>(states: impl Iterator<Item = &'a SparseState>) -> Vec<Vec<Complex64>> {
    let states: Vec<&SparseState> = states.collect();
    states
        .iter()
        .map(|a| {
            states
                .iter()
                .map(|b| a.inner_product(b).expect("widths checked by TransitionSpec"))
                .collect()
        })
        .collect()
}

pub fn gram_check(spec: &TransitionSpec, tol: f64) -> GramReport {
    let gram_in = gram(spec.inputs());
    let gram_out = gram(spec.outputs());
    let n = gram_in.len();
    let mut violations = Vec::new();
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let delta = (gram_in[i][j] - gram_out[i][j]).norm();
            max_deviation = max_deviation.max(delta);
            if delta > tol {
                violations.push(Violation {
                    i,
                    j,
                    inner_in: gram_in[i][j],
                    inner_out: gram_out[i][j],
                    delta,
                });
            }
        }
    }
    GramReport {
        realizable: violations.is_empty(),
        tolerance: tol,
        max_deviation,
        gram_in,
        gram_out,
        violations,
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `v` along the orthonormal `basis` (two passes).
fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for e in basis {
            let c = dot(e, v);
            for (x, y) in v.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
    }
}

fn complete_basis(basis: &mut Vec<Vec<Complex64>>, dim: usize) {
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex64::default(); dim];
        v[k] = Complex64::new(1.0, 0.0);
        orthogonalize(&mut v, basis);
        let n = norm(&v);
        if n > 1e-6 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
}

/// Builds a unitary mapping every input to its output.
///
/// Inputs and outputs are orthonormalized in lockstep, both bases are
/// completed, and `U = sum_k |f_k><e_k|`.
pub fn synthesize_unitary(spec: &TransitionSpec) -> Result<DenseOperator> {
    let n = spec.num_qubits();
    if n > OPERATOR_CAP {
        return Err(Error::RegisterTooLarge {
            num_qubits: n,
            cap: OPERATOR_CAP,
        });
    }
    let report = gram_check(spec, GRAM_TOL);
    if !report.realizable {
        return Err(Error::NotRealizable(report.max_deviation));
    }
    let dim = 1usize << n;
    let mut ins: Vec<Vec<Complex64>> = Vec::new();
    let mut outs: Vec<Vec<Complex64>> = Vec::new();
    for (a, b) in spec.pairs() {
        let mut u = to_dense(a)?;
        let mut w = to_dense(b)?;
        orthogonalize(&mut u, &ins);
        orthogonalize(&mut w, &outs);
        let (nu, nw) = (norm(&u), norm(&w));
        if nu > 1e-9 && nw > 1e-9 {
            u.iter_mut().for_each(|x| *x /= nu);
            w.iter_mut().for_each(|x| *x /= nw);
            ins.push(u);
            outs.push(w);
        }
    }
    complete_basis(&mut ins, dim);
    complete_basis(&mut outs, dim);
    debug_assert_eq!(ins.len(), dim);
    debug_assert_eq!(outs.len(), dim);

    let mut data = vec![Complex64::default(); dim * dim];
    for (e, f) in ins.iter().zip(&outs) {
        for r in 0..dim {
            if f[r] == Complex64::default() {
                continue;
            }
            for c in 0..dim {
                data[r * dim + c] += f[r] * e[c].conj();
            }
        }
    }
    DenseOperator::from_rows(n, data)
}

/// Parameters of the amplitude-encoding collision counterexample.
///
/// `psi_1 = a0|v0> + a1|v1>` must collide into
/// `g0 (a0|v0> + a1|v1>) + g1 (b2|v2> + b3|v3>)`, while `psi_2 = |v2>`
/// (a single speed, alone in its class) may only pick up a phase `e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeNogoParams {
    pub alpha0: Complex64,
    pub alpha1: Complex64,
    pub beta2: Complex64,
    pub beta3: Complex64,
    pub gamma0: Complex64,
    pub gamma1: Complex64,
    pub theta: f64,
}

impl AmplitudeNogoParams {
    /// Real parameters with `alpha0 = alpha1 = 1/sqrt 2` and the partner
    /// coefficients fixed by normalization.
    pub fn from_real(gamma1: f64, beta2: f64, theta: f64) -> Result<Self> {
        for x in [gamma1, beta2] {
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::NotNormalized(x * x));
            }
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        let params = Self {
            alpha0: c(FRAC_1_SQRT_2),
            alpha1: c(FRAC_1_SQRT_2),
            beta2: c(beta2),
            beta3: c((1.0 - beta2 * beta2).sqrt()),
            gamma0: c((1.0 - gamma1 * gamma1).sqrt()),
            gamma1: c(gamma1),
            theta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (a, b) in [
            (self.alpha0, self.alpha1),
            (self.beta2, self.beta3),
            (self.gamma0, self.gamma1),
        ] {
            let n = a.norm_sqr() + b.norm_sqr();
            if (n - 1.0).abs() > PARAM_NORM_TOL {
                return Err(Error::NotNormalized(n));
            }
        }
        Ok(())
    }
}

/// Two-qubit velocity register: `|v_k>` is the basis state with big-endian value `k`.
fn velocity_ket(k: u64) -> BasisLabel {
    BasisLabel::from_index(k, 2)
}

pub fn amplitude_nogo_instance(params: &AmplitudeNogoParams) -> Result<TransitionSpec> {
    params.validate()?;
    let p = params;
    let psi1 = SparseState::superpose(&[(p.alpha0, velocity_ket(0)), (p.alpha1, velocity_ket(1))])?;
    let psi1_out = SparseState::superpose(&[
        (p.gamma0 * p.alpha0, velocity_ket(0)),
        (p.gamma0 * p.alpha1, velocity_ket(1)),
        (p.gamma1 * p.beta2, velocity_ket(2)),
        (p.gamma1 * p.beta3, velocity_ket(3)),
    ])?;
    let psi2 = SparseState::init_basis(2, velocity_ket(2))?;
    let psi2_out = SparseState::superpose(&[(Complex64::from_polar(1.0, p.theta), velocity_ket(2))])?;
    TransitionSpec::new(vec![(psi1, psi1_out), (psi2, psi2_out)])
}

/// D1Q2 configurations on four periodic sites (one pattern `q0 q1` per site).
pub const D1Q2_SETTING_1: [&str; 4] = ["00", "11", "10", "10"];
pub const D1Q2_SETTING_2: [&str; 4] = ["01", "01", "00", "11"];

/// The four basis-state-encoded kets `|x>|q0 q1>` (position first), as written out by hand.
pub const PSI1_TERMS: [&str; 4] = ["0000", "0111", "1010", "1110"];
pub const PSI2_TERMS: [&str; 4] = ["0001", "0101", "1000", "1111"];
pub const PSI1_STREAMED_TERMS: [&str; 4] = ["0011", "0100", "1010", "1110"];
pub const PSI2_STREAMED_TERMS: [&str; 4] = ["0011", "0100", "1001", "1101"];

fn equal_superposition(terms: &[&str]) -> Result<SparseState> {
    let terms = terms
        .iter()
        .map(|t| Ok((Complex64::new(1.0, 0.0), t.parse::<BasisLabel>()?)))
        .collect::<Result<Vec<_>>>()?;
    SparseState::superpose(&terms)
}

/// Position-plus-velocity encoding `sum_x |x>|v_x>` of a 1D field with a power-of-two site count.
pub fn encode_cbs(field: &OccupancyField) -> Result<SparseState> {
    let sites = field.num_sites();
    if field.descriptor().dimension() != 1 || !sites.is_power_of_two() {
        return Err(Error::InvalidField(
            "basis-state encoding needs a 1D field with 2^k sites".into(),
        ));
    }
    let pos_bits = sites.trailing_zeros() as usize;
    let m = field.descriptor().num_directions();
    let terms = (0..sites)
        .map(|x| {
            let mut bits = BasisLabel::from_index(x as u64, pos_bits).to_bits();
            bits.extend((0..m).map(|j| field.get(x, j)));
            (Complex64::new(1.0, 0.0), BasisLabel::from_bits(&bits))
        })
        .collect::<Vec<_>>();
    SparseState::superpose(&terms)
}

/// Inverse of [`encode_cbs`]: reads one velocity pattern per position term.
pub fn decode_cbs(state: &SparseState, descriptor: &LatticeDescriptor) -> Result<OccupancyField> {
    let m = descriptor.num_directions();
    let pos_bits = state
        .num_qubits()
        .checked_sub(m)
        .ok_or_else(|| Error::InvalidField("register smaller than one velocity pattern".into()))?;
    let sites = 1usize << pos_bits;
    let mut patterns: Vec<Option<Pattern>> = vec![None; sites];
    for (label, _) in state.sorted_entries() {
        let pos_qubits: Vec<usize> = (0..pos_bits).collect();
        let x = label.project(&pos_qubits).to_index().unwrap_or(0) as usize;
        let p = (0..m).fold(Pattern::empty(m), |p, j| p.with(j, label.get(pos_bits + j)));
        if patterns[x].replace(p).is_some() {
            return Err(Error::InvalidField(format!("position {x} encoded twice")));
        }
    }
    let patterns = patterns
        .into_iter()
        .enumerate()
        .map(|(x, p)| p.ok_or_else(|| Error::MissingBit(format!("position {x} absent"))))
        .collect::<Result<Vec<_>>>()?;
    OccupancyField::from_patterns(descriptor, &[sites], &patterns)
}

/// The four states of the streaming counterexample: `(psi1, psi2, psi1', psi2')`.
pub fn cbs_states() -> Result<[SparseState; 4]> {
    Ok([
        equal_superposition(&PSI1_TERMS)?,
        equal_superposition(&PSI2_TERMS)?,
        equal_superposition(&PSI1_STREAMED_TERMS)?,
        equal_superposition(&PSI2_STREAMED_TERMS)?,
    ])
}

pub fn cbs_nogo_instance() -> TransitionSpec {
    let [psi1, psi2, psi1s, psi2s] = cbs_states().expect("constant kets are well formed");
    TransitionSpec::new(vec![(psi1, psi1s), (psi2, psi2s)]).expect("constant kets are unit norm")
}
