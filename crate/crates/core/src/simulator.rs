//! Piecewise-constant control of the truncated model.
//!
//! For the spectrum-generating system the controls evolve as
//! `G(t) = e^{−iHt} G(0) e^{iHt}`. In the frame `φ = e^{iHt} ψ` they are
//! constant, so each segment is one exact exponential
//! `φ ← exp(Δt Σ u_k G′_k(0)) φ` and no time-ordering error arises.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorId, DIM};
use crate::controllability::ControlSystem;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, OperatorMatrix, SymmetryTag, C64, HERMITIAN_TOL, UNITARY_TOL};
use crate::representation::RepSet;

/// Populations above this on the two outermost shells mark a trajectory as
/// unreliable under truncation.
pub const LEAK_FLAG: f64 = 0.01;

/// `exp(K)` for skew-Hermitian `K`, verified unitary.
pub fn matrix_exponential(k: &OperatorMatrix) -> Result<OperatorMatrix> {
    let scale = k.max_abs().max(1.0);
    let defect = k.skew_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::Symmetry(format!("exponent is not skew-Hermitian: defect {defect:.3e}")));
    }
    OperatorMatrix::from_dense(k.dense().exp()).with_verified_tag(SymmetryTag::Unitary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub u: [f64; DIM],
}

impl Segment {
    pub fn new(duration: f64, u: [f64; DIM]) -> Self {
        Segment { duration, u }
    }

    pub fn amplitude(&self, g: GeneratorId) -> f64 {
        self.u[g.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct SegmentDoc {
    duration: f64,
    #[serde(default)]
    u: BTreeMap<String, f64>,
}

impl PulseSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let s = PulseSchedule { segments };
        s.validate()?;
        Ok(s)
    }

    /// `n` segments of the given duration with all amplitudes zero.
    pub fn zero(n: usize, duration: f64) -> Self {
        PulseSchedule {
            segments: vec![Segment::new(duration, [0.0; DIM]); n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidArgument(format!("segment {i}: duration must be positive and finite")));
            }
            if s.u.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("segment {i}: amplitudes must be finite")));
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn concat(&self, other: &PulseSchedule) -> PulseSchedule {
        let mut segments = self.segments.clone();
        segments.extend(other.segments.iter().cloned());
        PulseSchedule { segments }
    }

    /// JSON list of `{duration, u: {name: amplitude}}`; zero amplitudes are
    /// omitted.
    pub fn to_json(&self) -> String {
        let docs: Vec<SegmentDoc> = self
            .segments
            .iter()
            .map(|s| SegmentDoc {
                duration: s.duration,
                u: GeneratorId::ALL
                    .iter()
                    .filter(|g| s.u[g.index()] != 0.0)
                    .map(|g| (g.name().to_string(), s.u[g.index()]))
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let docs: Vec<SegmentDoc> = serde_json::from_str(text)?;
        let mut segments = Vec::with_capacity(docs.len());
        for d in docs {
            let mut u = [0.0; DIM];
            for (name, v) in d.u {
                u[name.parse::<GeneratorId>()?.index()] = v;
            }
            segments.push(Segment::new(d.duration, u));
        }
        PulseSchedule::new(segments)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Lab-frame states sampled at segment boundaries (and sub-samples).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub norm_defects: Vec<f64>,
    /// Population on the shells `n_max − 1` and `n_max`.
    pub boundary_population: Vec<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &CVector {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial time")
    }

    pub fn max_boundary_population(&self) -> f64 {
        self.boundary_population.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.norm_defects.iter().copied().fold(0.0, f64::max)
    }

    /// True if any sample exceeds [`LEAK_FLAG`] on the boundary shells.
    pub fn truncation_unreliable(&self) -> bool {
        self.max_boundary_population() > LEAK_FLAG
    }

    /// Columns `time, pop_n1 … pop_nN, energy, l3, d, norm_defect`.
    pub fn write_csv(&self, rep: &RepSet, mut w: impl std::io::Write) -> Result<()> {
        use crate::algebra::GeneratorId::{D, L3};
        let shells: Vec<String> = (1..=rep.n_max()).map(|n| format!("pop_n{n}")).collect();
        writeln!(w, "time,{},energy,l3,d,norm_defect", shells.join(","))?;
        for (i, psi) in self.states.iter().enumerate() {
            let pops = shell_populations(rep, psi);
            let unit = psi / C64::new(psi.norm(), 0.0);
            let row: Vec<String> = pops.iter().map(|p| format!("{p:.12e}")).collect();
            writeln!(
                w,
                "{:.12e},{},{:.12e},{:.12e},{:.12e},{:.3e}",
                self.times[i],
                row.join(","),
                observable_expectation(&unit, &rep.hamiltonian)?,
                observable_expectation(&unit, rep.generator(L3))?,
                observable_expectation(&unit, rep.generator(D))?,
                self.norm_defects[i],
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self, rep: &RepSet) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(rep, &mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV is ASCII"))
    }

    pub fn save_csv(&self, rep: &RepSet, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(rep, &mut f)?;
        f.flush()?;
        Ok(())
    }
}

/// Population per shell `n = 1..=n_max`.
pub fn shell_populations(rep: &RepSet, psi: &CVector) -> Vec<f64> {
    (1..=rep.n_max())
        .map(|n| rep.basis.shell(n).map(|i| psi[i].norm_sqr()).sum())
        .collect()
}

/// Population on the two outermost shells.
pub fn boundary_population(rep: &RepSet, psi: &CVector) -> f64 {
    let start = rep.basis.shell(rep.n_max().saturating_sub(1).max(1)).start;
    psi.iter().skip(start).map(|z| z.norm_sqr()).sum()
}

/// `|⟨target|ψ⟩|²`, insensitive to global phase.
pub fn fidelity(psi: &CVector, target: &CVector) -> f64 {
    target.dotc(psi).norm_sqr().clamp(0.0, 1.0)
}

/// `⟨ψ|A|ψ⟩` for Hermitian `A`.
pub fn observable_expectation(psi: &CVector, a: &OperatorMatrix) -> Result<f64> {
    if a.tag() != SymmetryTag::Hermitian {
        let defect = a.hermiticity_defect();
        if defect > HERMITIAN_TOL * a.max_abs().max(1.0) {
            return Err(Error::Symmetry(format!("observable is not Hermitian: defect {defect:.3e}")));
        }
    }
    let v = psi.dotc(&a.apply(psi));
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(Error::Symmetry(format!("expectation has imaginary part {:.3e}", v.im)));
    }
    Ok(v.re)
}

fn check_state(psi: &CVector, dim: usize) -> Result<()> {
    if psi.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
    }
    let n = psi.norm();
    if (n - 1.0).abs() > UNITARY_TOL {
        return Err(Error::InvalidArgument(format!("initial state has norm {n}, expected 1")));
    }
    Ok(())
}

/// `Σ u_k G′_k(0)` over the system's controls; an amplitude on a generator
/// that is not a control is an error.
fn control_sum(sys: &ControlSystem, seg: &Segment) -> Result<CMatrix> {
    let d = sys.dim();
    let mut k = CMatrix::zeros(d, d);
    for g in GeneratorId::ALL {
        let u = seg.u[g.index()];
        if u == 0.0 {
            continue;
        }
        let idx = sys
            .control_index(g)
            .ok_or_else(|| Error::InvalidArgument(format!("{g} is not a control of this system")))?;
        k += sys.control_matrix(idx).dense().as_ref() * C64::new(u, 0.0);
    }
    Ok(k)
}

/// Diagonal phases `e^{−iE t}`.
fn drift_phases(rep: &RepSet, t: f64) -> Vec<C64> {
    rep.energies().iter().map(|&e| C64::from_polar(1.0, -e * t)).collect()
}

fn apply_phases(phases: &[C64], v: &CVector) -> CVector {
    CVector::from_iterator(v.len(), v.iter().zip(phases).map(|(a, p)| a * p))
}

/// `propagate` starting at time `0` with samples at segment boundaries.
pub fn propagate(sys: &ControlSystem, schedule: &PulseSchedule, psi0: &CVector) -> Result<Trajectory> {
    propagate_from(sys, schedule, psi0, 0.0, 1)
}

/// Exact piecewise propagation from `t0`, sampling `substeps` points per
/// segment. Time-dependent systems are stepped in the rotating frame;
/// frozen-control systems use `exp(Δt (H′ + Σ u G′))` in the lab frame.
pub fn propagate_from(
    sys: &ControlSystem,
    schedule: &PulseSchedule,
    psi0: &CVector,
    t0: f64,
    substeps: usize,
) -> Result<Trajectory> {
    check_state(psi0, sys.dim())?;
    schedule.validate()?;
    let substeps = substeps.max(1);
    let rep = sys.rep();
    let drift = sys.drift().dense().into_owned();
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![psi0.clone()],
        norm_defects: vec![(psi0.norm() - 1.0).abs()],
        boundary_population: vec![boundary_population(rep, psi0)],
    };
    let conj: Vec<C64> = drift_phases(rep, -t0);
    let mut phi = if sys.time_dependent {
        apply_phases(&conj, psi0)
    } else {
        psi0.clone()
    };
    let mut t = t0;
    for seg in &schedule.segments {
        let mut k = control_sum(sys, seg)?;
        if !sys.time_dependent {
            k += &drift;
        }
        let tau = seg.duration / substeps as f64;
        let step = (k * C64::new(tau, 0.0)).exp();
        for j in 1..=substeps {
            phi = &step * &phi;
            let tj = if j == substeps { t + seg.duration } else { t + tau * j as f64 };
            let psi = if sys.time_dependent {
                apply_phases(&drift_phases(rep, tj), &phi)
            } else {
                phi.clone()
            };
            traj.times.push(tj);
            traj.norm_defects.push((psi.norm() - 1.0).abs());
            traj.boundary_population.push(boundary_population(rep, &psi));
            traj.states.push(psi);
        }
        t += seg.duration;
    }
    Ok(traj)
}

/// Lab-frame cross-check: each segment is cut into slices no longer than
/// `max_slice`, and every slice uses `exp(δ (H′ + Σ u G′(t_k)))` with the
/// generators frozen at the slice's left end. First order in `δ`.
pub fn propagate_lab_sliced(
    sys: &ControlSystem,
    schedule: &PulseSchedule,
    psi0: &CVector,
    t0: f64,
    max_slice: f64,
) -> Result<CVector> {
    check_state(psi0, sys.dim())?;
    schedule.validate()?;
    if !(max_slice > 0.0) {
        return Err(Error::InvalidArgument("slice length must be positive".into()));
    }
    let drift = sys.drift().dense().into_owned();
    let mut psi = psi0.clone();
    let mut t = t0;
    for seg in &schedule.segments {
        let n = (seg.duration / max_slice).ceil().max(1.0) as usize;
        let delta = seg.duration / n as f64;
        let active: Vec<(usize, f64)> = sys
            .controls()
            .iter()
            .enumerate()
            .filter(|(_, g)| seg.u[g.index()] != 0.0)
            .map(|(i, g)| (i, seg.u[g.index()]))
            .collect();
        control_sum(sys, seg)?;
        for s in 0..n {
            let tk = t + delta * s as f64;
            let mut k = drift.clone();
            for &(i, u) in &active {
                k += sys.evolve(sys.control_matrix(i), tk).dense().as_ref() * C64::new(u, 0.0);
            }
            psi = (k * C64::new(delta, 0.0)).exp() * psi;
        }
        t += seg.duration;
    }
    Ok(psi)
}

/// Settings of the multistart ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub segment_duration: f64,
    pub starts: usize,
    /// Standard deviation of the random initial amplitudes.
    pub init_scale: f64,
    /// Initial ascent step; for BFGS the initial inverse curvature is
    /// `initial_step · I`.
    pub initial_step: f64,
    pub gradient: GradientMethod,
    /// Central-difference step when `gradient` is `finite-difference`.
    pub fd_step: f64,
    /// Boundary population above which the penalty applies.
    pub leak_threshold: f64,
    /// Weight of `Σ_k max(0, leak_k − threshold)²`; zero disables it.
    pub leak_penalty: f64,
    /// Number of penalty stages; stage `k` of `K` uses weight
    /// `leak_penalty · 10^(k+1−K)` and warm-starts from the previous one.
    pub penalty_stages: usize,
    pub direction: Direction,
}

/// Search direction of the ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Gradient,
    Bfgs,
}

/// How the ascent obtains gradients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethod {
    /// One backward co-state sweep, counted as one evaluation.
    Adjoint,
    /// Central differences, two evaluations per parameter.
    FiniteDifference,
}

impl Default for OptimizeOptions {
    /// Tuned so that 20 segments and 5·10⁴ evaluations steer `|1 0 0⟩` to
    /// `|2 1 0⟩` at `n_max = 4` with boundary population below 1%.
    fn default() -> Self {
        OptimizeOptions {
            segment_duration: 1.0,
            starts: 16,
            init_scale: 1.5,
            initial_step: 1e-2,
            gradient: GradientMethod::Adjoint,
            fd_step: 1e-5,
            leak_threshold: 0.003,
            leak_penalty: 3000.0,
            penalty_stages: 3,
            direction: Direction::Bfgs,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartSummary {
    pub objective: f64,
    pub fidelity: f64,
    pub max_boundary_population: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub schedule: PulseSchedule,
    pub fidelity: f64,
    pub objective: f64,
    pub max_boundary_population: f64,
    pub evaluations: usize,
    /// Dimension of the subspace reachable from `ψ₀` that the search ran in.
    pub reachable_dim: usize,
    pub starts: Vec<StartSummary>,
}

/// Orthonormal basis (columns) of the smallest subspace containing `psi0`
/// and invariant under every matrix in `ops`.
pub fn reachable_subspace(ops: &[&CMatrix], psi0: &CVector) -> CMatrix {
    let d = psi0.len();
    let mut basis: Vec<CVector> = Vec::new();
    let mut queue = vec![psi0.clone()];
    while let Some(mut v) = queue.pop() {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let r = v.norm();
        if r <= 1e-10 * scale || basis.len() == d {
            continue;
        }
        let v = v / C64::new(r, 0.0);
        queue.extend(ops.iter().map(|m| *m * &v));
        basis.push(v);
    }
    CMatrix::from_columns(&basis)
}

/// Segment propagator `exp(dt·K)` with its spectral data.
struct Step {
    u: CMatrix,
    vecs: CMatrix,
    /// Eigenvalues of `dt·K`, all imaginary.
    lam: Vec<C64>,
}

impl Step {
    /// Divided differences of `exp` over the spectrum, the kernel of the
    /// Fréchet derivative in the eigenbasis.
    fn divided(&self, a: usize, b: usize) -> C64 {
        let (la, lb) = (self.lam[a], self.lam[b]);
        let delta = la - lb;
        if delta.norm() < 1e-6 {
            lb.exp() * (C64::new(1.0, 0.0) + delta * 0.5 + delta * delta / 6.0)
        } else {
            (la.exp() - lb.exp()) / delta
        }
    }
}

/// Objective evaluator over the amplitudes of the system's controls,
/// working in the reachable subspace.
#[derive(Clone)]
struct Evaluator<'a> {
    gens: Vec<CMatrix>,
    base: Option<CMatrix>,
    phi0: CVector,
    target: CVector,
    /// Boundary-shell projector in the reduced coordinates.
    proj: CMatrix,
    dt: f64,
    nseg: usize,
    opts: &'a OptimizeOptions,
    penalty: f64,
}

struct Pass {
    steps: Vec<Step>,
    /// `states[k]` enters segment `k`; `states[nseg]` is final.
    states: Vec<CVector>,
    value: Eval,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    objective: f64,
    fidelity: f64,
    max_leak: f64,
}

impl<'a> Evaluator<'a> {
    /// Reduced problem; also returns the reachable dimension.
    fn new(
        sys: &ControlSystem,
        psi0: &CVector,
        target: &CVector,
        n_segments: usize,
        opts: &'a OptimizeOptions,
    ) -> Result<(Self, usize)> {
        check_state(psi0, sys.dim())?;
        check_state(target, sys.dim())?;
        let rep = sys.rep();
        let total = opts.segment_duration * n_segments as f64;
        // Compare in the rotating frame: ψ(T) = e^{−iHT} φ(T).
        let target_frame = if sys.time_dependent {
            apply_phases(&drift_phases(rep, -total), target)
        } else {
            target.clone()
        };
        let gens: Vec<CMatrix> = (0..sys.controls().len()).map(|i| sys.control_matrix(i).dense().into_owned()).collect();
        let base: Option<CMatrix> = (!sys.time_dependent).then(|| sys.drift().dense().into_owned());
        let ops: Vec<&CMatrix> = gens.iter().chain(base.as_ref()).collect();
        let q = reachable_subspace(&ops, psi0);
        let qh = q.adjoint();
        let reduce = |m: &CMatrix| &qh * m * &q;
        let start = rep.basis.shell(rep.n_max().saturating_sub(1).max(1)).start;
        let qb = q.rows(start, sys.dim() - start);
        let eval = Evaluator {
            gens: gens.iter().map(reduce).collect(),
            base: base.as_ref().map(reduce),
            phi0: &qh * psi0,
            target: &qh * &target_frame,
            proj: qb.adjoint() * qb,
            dt: opts.segment_duration,
            nseg: n_segments,
            opts,
            penalty: opts.leak_penalty,
        };
        Ok((eval, q.ncols()))
    }
}

impl Evaluator<'_> {
    fn nparams(&self) -> usize {
        self.nseg * self.gens.len()
    }

    fn step(&self, u: &[f64]) -> Step {
        let r = self.phi0.len();
        let mut k = self.base.clone().unwrap_or_else(|| CMatrix::zeros(r, r));
        for (g, &a) in self.gens.iter().zip(u) {
            if a != 0.0 {
                k += g * C64::new(a, 0.0);
            }
        }
        // dt·K = −iM with M Hermitian
        let m = k * C64::new(0.0, self.dt);
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = m.symmetric_eigen();
        let lam: Vec<C64> = eig.eigenvalues.iter().map(|&w| C64::new(0.0, -w)).collect();
        let phases = DVector::from_iterator(r, lam.iter().map(|l| l.exp()));
        let u = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
        Step { u, vecs: eig.eigenvectors, lam }
    }

    fn leak(&self, v: &CVector) -> f64 {
        v.dotc(&(&self.proj * v)).re
    }

    fn full(&self, x: &[f64]) -> Pass {
        let nc = self.gens.len();
        let steps: Vec<Step> = (0..self.nseg).map(|k| self.step(&x[k * nc..(k + 1) * nc])).collect();
        let mut states = Vec::with_capacity(self.nseg + 1);
        states.push(self.phi0.clone());
        for s in &steps {
            let next = &s.u * states.last().expect("non-empty");
            states.push(next);
        }
        let mut pen = 0.0;
        let mut max_leak: f64 = 0.0;
        for s in &states[1..] {
            let l = self.leak(s);
            max_leak = max_leak.max(l);
            pen += (l - self.opts.leak_threshold).max(0.0).powi(2);
        }
        let fidelity = self.target.dotc(&states[self.nseg]).norm_sqr();
        let value = Eval {
            objective: fidelity - self.penalty * pen,
            fidelity,
            max_leak,
        };
        Pass { steps, states, value }
    }

    /// Gradient at `x` under the configured method; returns it with the
    /// number of evaluations spent.
    fn gradient_at(&self, pass: &Pass, x: &[f64]) -> (Vec<f64>, usize) {
        match self.opts.gradient {
            GradientMethod::Adjoint => (self.gradient(pass), 1),
            GradientMethod::FiniteDifference => {
                let h = self.opts.fd_step;
                let mut y = x.to_vec();
                let g = (0..x.len())
                    .map(|i| {
                        y[i] = x[i] + h;
                        let up = self.full(&y).value.objective;
                        y[i] = x[i] - h;
                        let dn = self.full(&y).value.objective;
                        y[i] = x[i];
                        (up - dn) / (2.0 * h)
                    })
                    .collect();
                (g, 2 * x.len())
            }
        }
    }

    fn gradient_cost(&self) -> usize {
        match self.opts.gradient {
            GradientMethod::Adjoint => 1,
            GradientMethod::FiniteDifference => 2 * self.nparams(),
        }
    }

    /// Exact gradient by one backward sweep of co-states.
    fn gradient(&self, pass: &Pass) -> Vec<f64> {
        let nc = self.gens.len();
        let r = self.phi0.len();
        let last = &pass.states[self.nseg];
        let mut mu = &self.target * self.target.dotc(last);
        let mut grad = vec![0.0; self.nparams()];
        for k in (0..self.nseg).rev() {
            let phi = &pass.states[k + 1];
            let excess = (self.leak(phi) - self.opts.leak_threshold).max(0.0);
            if excess > 0.0 {
                mu -= (&self.proj * phi) * C64::new(2.0 * self.penalty * excess, 0.0);
            }
            let step = &pass.steps[k];
            let vh = step.vecs.adjoint();
            let x = &vh * &mu;
            let y = &vh * &pass.states[k];
            let w = CMatrix::from_fn(r, r, |a, b| x[a].conj() * step.divided(a, b) * y[b]);
            for c in 0..nc {
                let e = &vh * &self.gens[c] * &step.vecs;
                grad[k * nc + c] = 2.0 * self.dt * e.component_mul(&w).sum().re;
            }
            mu = step.u.adjoint() * mu;
        }
        grad
    }

    /// Staged ascent from `x`; the returned value uses the final penalty.
    fn ascend(&self, mut x: Vec<f64>, budget: usize) -> (Vec<f64>, Eval, usize) {
        let stages = self.opts.penalty_stages.max(1);
        let mut used = 0;
        for k in 0..stages {
            let mut stage = self.clone();
            stage.penalty = self.penalty * 10f64.powi(k as i32 + 1 - stages as i32);
            let share = budget.saturating_sub(used + 1) / (stages - k);
            let (y, _, n) = match self.opts.direction {
                Direction::Gradient => stage.ascend_gradient(x, share),
                Direction::Bfgs => stage.ascend_bfgs(x, share),
            };
            x = y;
            used += n;
        }
        let value = self.full(&x).value;
        (x, value, used + 1)
    }

    /// Plain gradient steps; the step doubles after success and halves on
    /// backtracking.
    fn ascend_gradient(&self, mut x: Vec<f64>, budget: usize) -> (Vec<f64>, Eval, usize) {
        let mut evals = 1;
        let mut pass = self.full(&x);
        let mut step = self.opts.initial_step;
        while evals + self.gradient_cost() < budget {
            let (g, n) = self.gradient_at(&pass, &x);
            evals += n;
            let mut moved = false;
            while evals < budget && step > 1e-12 {
                let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
                let trial = self.full(&y);
                evals += 1;
                if trial.value.objective > pass.value.objective {
                    x = y;
                    pass = trial;
                    step *= 2.0;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (x, pass.value, evals)
    }

    /// Quasi-Newton ascent: BFGS inverse-curvature update with Armijo
    /// backtracking from the full step.
    fn ascend_bfgs(&self, x: Vec<f64>, budget: usize) -> (Vec<f64>, Eval, usize) {
        let n = self.nparams();
        let cost = self.gradient_cost();
        let mut evals = 1;
        let mut x = DVector::from_vec(x);
        let mut pass = self.full(x.as_slice());
        let fresh = || DMatrix::<f64>::identity(n, n) * self.opts.initial_step;
        let mut h = fresh();
        if evals + cost > budget {
            return (x.as_slice().to_vec(), pass.value, evals);
        }
        let (g0, spent) = self.gradient_at(&pass, x.as_slice());
        evals += spent;
        let mut g = DVector::from_vec(g0);
        while evals + cost < budget {
            let mut d = &h * &g;
            let mut slope = d.dot(&g);
            if !(slope > 0.0) {
                h = fresh();
                d = &h * &g;
                slope = d.dot(&g);
            }
            let mut alpha = 1.0;
            let mut accepted = None;
            while evals < budget && alpha > 1e-10 {
                let y = &x + &d * alpha;
                let trial = self.full(y.as_slice());
                evals += 1;
                if trial.value.objective >= pass.value.objective + 1e-4 * alpha * slope {
                    accepted = Some((y, trial));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((y, trial)) = accepted else {
                if h == fresh() {
                    break;
                }
                h = fresh();
                continue;
            };
            if evals + cost >= budget {
                x = y;
                pass = trial;
                break;
            }
            let (g_new, spent) = self.gradient_at(&trial, y.as_slice());
            evals += spent;
            let g_new = DVector::from_vec(g_new);
            // curvature pair for the minimization of −objective
            let s = &y - &x;
            let q = &g - &g_new;
            let sq = s.dot(&q);
            if sq > 1e-12 * s.norm() * q.norm() {
                let rho = 1.0 / sq;
                let hq = &h * &q;
                let qhq = q.dot(&hq);
                h += (&s * s.transpose()) * ((1.0 + rho * qhq) * rho) - (&hq * s.transpose() + &s * hq.transpose()) * rho;
            }
            x = y;
            pass = trial;
            g = g_new;
        }
        (x.as_slice().to_vec(), pass.value, evals)
    }
}

/// [`optimize_pulse_with`] under default options.
pub fn optimize_pulse(
    sys: &ControlSystem,
    psi0: &CVector,
    target: &CVector,
    n_segments: usize,
    budget: usize,
    seed: u64,
) -> Result<OptimizeResult> {
    optimize_pulse_with(sys, psi0, target, n_segments, budget, seed, &OptimizeOptions::default())
}

/// Maximizes `|⟨target|ψ(T)⟩|²` over the amplitudes of `n_segments`
/// equal-length segments by random multistart plus gradient ascent,
/// optionally penalizing boundary-shell population at segment ends.
///
/// The state never leaves the subspace generated from `ψ₀` by the controls
/// (and the frozen drift in the lab frame), so the search runs there exactly.
/// By default gradients come from a backward co-state sweep; a forward pass
/// and a gradient sweep each count as one evaluation against `budget`. The zero
/// schedule is always a candidate, so `target = ψ₀` returns zero amplitudes.
/// Starts run on scoped threads with independent random streams and the
/// result depends only on `seed`.
pub fn optimize_pulse_with(
    sys: &ControlSystem,
    psi0: &CVector,
    target: &CVector,
    n_segments: usize,
    budget: usize,
    seed: u64,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    if n_segments == 0 {
        return Err(Error::InvalidArgument("need at least one segment".into()));
    }
    if !(opts.segment_duration > 0.0) || opts.starts == 0 {
        return Err(Error::InvalidArgument("segment duration and start count must be positive".into()));
    }
    let (eval, reachable_dim) = Evaluator::new(sys, psi0, target, n_segments, opts)?;
    let nc = eval.gens.len();
    let zero = vec![0.0; n_segments * nc];
    let zero_eval = eval.full(&zero).value;
    let mut best = (zero, zero_eval);
    let mut used = 1;
    let mut starts = Vec::new();
    if zero_eval.fidelity < 1.0 - 1e-12 && nc > 0 && budget > 1 {
        let share = (budget - 1) / opts.starts;
        let eval = &eval;
        let results: Vec<(Vec<f64>, Eval, usize)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..opts.starts)
                .map(|i| {
                    scope.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(i as u64 + 1);
                        let x0: Vec<f64> = (0..eval.nparams())
                            .map(|_| opts.init_scale * rng.sample::<f64, _>(StandardNormal))
                            .collect();
                        eval.ascend(x0, share)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("optimizer start panicked")).collect()
        });
        for (x, e, n) in results {
            used += n;
            starts.push(StartSummary {
                objective: e.objective,
                fidelity: e.fidelity,
                max_boundary_population: e.max_leak,
                evaluations: n,
            });
            if e.objective > best.1.objective {
                best = (x, e);
            }
        }
    }
    let (x, e) = best;
    let segments = (0..n_segments)
        .map(|k| {
            let mut u = [0.0; DIM];
            for (c, g) in sys.controls().iter().enumerate() {
                u[g.index()] = x[k * nc + c];
            }
            Segment::new(opts.segment_duration, u)
        })
        .collect();
    Ok(OptimizeResult {
        schedule: PulseSchedule { segments },
        fidelity: e.fidelity,
        objective: e.objective,
        max_boundary_population: e.max_leak,
        evaluations: used,
        reachable_dim,
        starts,
    })
}

/// Reference exponential by Hermitian eigendecomposition of `iK`.
pub fn expm_eigen(k: &OperatorMatrix) -> CMatrix {
    let h: CMatrix = k.dense().as_ref() * C64::new(0.0, 1.0);
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|w| C64::from_polar(1.0, -w)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// A random schedule with `N(0, scale²)` amplitudes on the system's controls.
pub fn random_schedule(sys: &ControlSystem, n: usize, duration: f64, scale: f64, rng: &mut impl Rng) -> PulseSchedule {
    let segments = (0..n)
        .map(|_| {
            let mut u = [0.0; DIM];
            for g in sys.controls() {
                u[g.index()] = scale * rng.sample::<f64, _>(StandardNormal);
            }
            Segment::new(duration, u)
        })
        .collect();
    PulseSchedule { segments }
}
