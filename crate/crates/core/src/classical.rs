//! Classical phase-space realization of so(4,2) for the Coulomb problem
//! (atomic units, `H = p²/2 − 1/r`), for negative and positive energies.
//!
//! Symmetrized operator products such as `(p r + r p)/2` are read as plain
//! classical products, and `(L × p − p × L)/2` as `L × p`. Brackets are
//! checked against the structure table through `[X, Y] = iZ ↔ {x, y} = z`
//! with `{f, g} = Σ ∂f/∂rᵢ ∂g/∂pᵢ − ∂f/∂pᵢ ∂g/∂rᵢ`.
//!
//! The printed formulas leave two sign choices open: the sign of the `r/r`
//! term in the Runge-Lenz-type vector, and the relative sign of each
//! generator family. [`verify_relations`] settles both empirically on
//! sampled points; [`Realization::canonical`] is the outcome.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Family, GeneratorId, StructureTable, DIM};
use crate::error::{Error, Result};
use crate::representation::NamedResidual;

pub const R_MIN: f64 = 1e-3;
pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_TOL: f64 = 1e-5;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub r: V3,
    pub p: V3,
    pub t: f64,
}

impl PhasePoint {
    pub fn new(r: V3, p: V3, t: f64) -> Self {
        PhasePoint { r, p, t }
    }

    pub fn radius(&self) -> f64 {
        dot(self.r, self.r).sqrt()
    }

    pub fn energy(&self) -> f64 {
        0.5 * dot(self.p, self.p) - 1.0 / self.radius()
    }

    /// Coordinates `(r₁, r₂, r₃, p₁, p₂, p₃, t)`.
    fn coords(&self) -> [f64; 7] {
        [self.r[0], self.r[1], self.r[2], self.p[0], self.p[1], self.p[2], self.t]
    }

    fn from_coords(c: [f64; 7]) -> Self {
        PhasePoint::new([c[0], c[1], c[2]], [c[3], c[4], c[5]], c[6])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Negative,
    Positive,
}

impl EnergySign {
    /// The family that is a pure function of `H` on this branch.
    pub fn energy_family(self) -> Family {
        match self {
            EnergySign::Negative => Family::D,
            EnergySign::Positive => Family::C,
        }
    }

    /// The vector family whose `r/r` sign differs between formula blocks.
    pub fn runge_lenz_family(self) -> Family {
        match self {
            EnergySign::Negative => Family::A,
            EnergySign::Positive => Family::B,
        }
    }
}

impl std::str::FromStr for EnergySign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "negative" | "neg" | "-" => Ok(EnergySign::Negative),
            "positive" | "pos" | "+" => Ok(EnergySign::Positive),
            _ => Err(Error::InvalidArgument(format!("energy sign `{s}`"))),
        }
    }
}

/// Sign of the `r/r` term in `(L × p ± r/r)/k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialTerm {
    /// `+ r/r`, the form that accompanies the so(4) / so(3,1) statement.
    Plus,
    /// `− r/r`, the form inside the realization formula block.
    Minus,
}

impl RadialTerm {
    fn sign(self) -> f64 {
        match self {
            RadialTerm::Plus => 1.0,
            RadialTerm::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            RadialTerm::Plus => "+r/r",
            RadialTerm::Minus => "-r/r",
        }
    }
}

/// A concrete choice of the open signs: the `r/r` term and a per-family
/// overall sign (bit `i` set flips `Family::ALL[i]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Realization {
    pub sign: EnergySign,
    pub radial: RadialTerm,
    pub flips: u8,
}

impl Realization {
    /// Formulas exactly as written in the realization blocks.
    pub fn printed(sign: EnergySign) -> Self {
        Realization {
            sign,
            radial: RadialTerm::Minus,
            flips: 0,
        }
    }

    /// The table-consistent choice found by [`verify_relations`].
    pub fn canonical(sign: EnergySign) -> Self {
        let flips = match sign {
            EnergySign::Negative => flip_mask(&[Family::B, Family::S]),
            EnergySign::Positive => 0,
        };
        Realization {
            sign,
            radial: RadialTerm::Plus,
            flips,
        }
    }

    pub fn with_flips(self, flips: u8) -> Self {
        Realization { flips, ..self }
    }

    pub fn family_sign(&self, f: Family) -> f64 {
        if self.flips & (1 << family_index(f)) != 0 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flipped_families(&self) -> Vec<Family> {
        flipped(self.flips)
    }

    /// All fifteen generator values at `x`, in `GeneratorId` order.
    pub fn eval_all(&self, x: &PhasePoint) -> Result<[f64; DIM]> {
        let r = x.radius();
        if !(r > R_MIN) {
            return Err(Error::Domain(format!("|r| = {r:.3e} is within the Coulomb cutoff {R_MIN}")));
        }
        let h = x.energy();
        let wrong_sign = match self.sign {
            EnergySign::Negative => !(h < 0.0),
            EnergySign::Positive => !(h > 0.0),
        };
        if wrong_sign {
            return Err(Error::Domain(format!("H = {h:.6} is not on the {:?} energy branch", self.sign)));
        }
        let (rv, pv) = (x.r, x.p);
        let rp = dot(rv, pv);
        let l = cross(rv, pv);
        let lxp = cross(l, pv);
        let rhat = rv.map(|c| c / r);
        let eps = self.radial.sign();
        let runge = |k: f64| -> V3 { std::array::from_fn(|i| (lxp[i] + eps * rhat[i]) / k) };
        // the three-term vector shape shared by B, Γ (negative) and A, Γ (positive)
        let mixed = |k: f64, a: f64, b: f64| -> V3 {
            std::array::from_fn(|i| pv[i] * r * a - pv[i] * rp / k * b + rhat[i] / k * b)
        };
        let mut out = [0.0; DIM];
        let (vecs, scalars): ([V3; 4], [f64; 3]) = match self.sign {
            EnergySign::Negative => {
                let k = (-2.0 * h).sqrt();
                let z = k * rp + k.powi(3) * x.t;
                let (s, c) = z.sin_cos();
                let a = runge(k);
                let b = mixed(k, c, s);
                let g = std::array::from_fn(|i| -pv[i] * r * s - pv[i] * rp / k * c + rhat[i] / k * c);
                let q = (1.0 + 2.0 * h * r) / k;
                ([l, a, b, g], [-rp * s - q * c, -rp * c + q * s, 1.0 / k])
            }
            EnergySign::Positive => {
                let k = (2.0 * h).sqrt();
                let z = k * rp - k.powi(3) * x.t;
                let (s, c) = (z.sinh(), z.cosh());
                let a = mixed(k, s, c);
                let b = runge(k);
                let g = mixed(k, c, s);
                let q = (2.0 * h * r + 1.0) / k;
                ([l, a, b, g], [q * s - rp * c, 1.0 / k, rp * s - q * c])
            }
        };
        for (fi, v) in vecs.iter().enumerate() {
            let sgn = self.family_sign(Family::ALL[fi]);
            for k in 0..3 {
                out[3 * fi + k] = sgn * v[k];
            }
        }
        for (k, v) in scalars.iter().enumerate() {
            out[12 + k] = self.family_sign(Family::ALL[4 + k]) * v;
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite generator value".into()));
        }
        Ok(out)
    }

    pub fn eval(&self, g: GeneratorId, x: &PhasePoint) -> Result<f64> {
        Ok(self.eval_all(x)?[g.index()])
    }

    /// `∂x_a/∂(r, p, t)` for all generators by central differences.
    pub fn jacobian(&self, x: &PhasePoint, h: f64, richardson: bool) -> Result<[[f64; 7]; DIM]> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
        }
        let central = |h: f64| -> Result<[[f64; 7]; DIM]> {
            let mut jac = [[0.0; 7]; DIM];
            let c = x.coords();
            for i in 0..7 {
                let (mut up, mut dn) = (c, c);
                up[i] += h;
                dn[i] -= h;
                let fu = self.eval_all(&PhasePoint::from_coords(up))?;
                let fd = self.eval_all(&PhasePoint::from_coords(dn))?;
                for a in 0..DIM {
                    jac[a][i] = (fu[a] - fd[a]) / (2.0 * h);
                }
            }
            Ok(jac)
        };
        let j1 = central(h)?;
        if !richardson {
            return Ok(j1);
        }
        let j2 = central(h / 2.0)?;
        let mut out = j1;
        for a in 0..DIM {
            for i in 0..7 {
                out[a][i] = (4.0 * j2[a][i] - j1[a][i]) / 3.0;
            }
        }
        Ok(out)
    }
}

fn family_index(f: Family) -> usize {
    Family::ALL.iter().position(|&g| g == f).expect("family listed in ALL")
}

pub fn flip_mask(families: &[Family]) -> u8 {
    families.iter().fold(0, |m, &f| m | (1 << family_index(f)))
}

fn flipped(mask: u8) -> Vec<Family> {
    Family::ALL
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &f)| f)
        .collect()
}

/// One generator on one energy branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizationFn {
    pub generator: GeneratorId,
    pub sign: EnergySign,
}

impl RealizationFn {
    pub fn new(generator: GeneratorId, sign: EnergySign) -> Self {
        RealizationFn { generator, sign }
    }
}

/// Value of `f` at `x` under the canonical sign choice.
pub fn eval_generator(f: RealizationFn, x: &PhasePoint) -> Result<f64> {
    Realization::canonical(f.sign).eval(f.generator, x)
}

fn bracket_from_jacobian(ja: &[f64; 7], jb: &[f64; 7]) -> f64 {
    (0..3).map(|i| ja[i] * jb[3 + i] - ja[3 + i] * jb[i]).sum()
}

/// `{f, g}` at `x` by central differences of step `h`.
pub fn poisson_bracket(f: RealizationFn, g: RealizationFn, x: &PhasePoint, h: f64) -> Result<f64> {
    let jf = Realization::canonical(f.sign).jacobian(x, h, false)?;
    let jg = if f.sign == g.sign {
        jf
    } else {
        Realization::canonical(g.sign).jacobian(x, h, false)?
    };
    Ok(bracket_from_jacobian(&jf[f.generator.index()], &jg[g.generator.index()]))
}

/// `∇H` in `(r, p)`.
fn energy_gradient(x: &PhasePoint) -> [f64; 6] {
    let r3 = x.radius().powi(3);
    [x.r[0] / r3, x.r[1] / r3, x.r[2] / r3, x.p[0], x.p[1], x.p[2]]
}

fn motion_residual(j: &[f64; 7], x: &PhasePoint) -> f64 {
    let gh = energy_gradient(x);
    let bracket: f64 = (0..3).map(|i| j[i] * gh[3 + i] - j[3 + i] * gh[i]).sum();
    (j[6] + bracket).abs()
}

/// `|∂f/∂t + {f, H}|` at `x`.
pub fn verify_constant_of_motion(f: RealizationFn, x: &PhasePoint) -> Result<f64> {
    let j = Realization::canonical(f.sign).jacobian(x, DEFAULT_STEP, false)?;
    Ok(motion_residual(&j[f.generator.index()], x))
}

/// `∂G/∂t = c k³ G_partner` as printed in the `[H, G]` blocks, with
/// `k = √(∓2H)`; families absent from the list have no explicit `t`.
pub fn time_derivative_partners(sign: EnergySign) -> &'static [(Family, Family, f64)] {
    match sign {
        EnergySign::Negative => &[
            (Family::B, Family::Gamma, 1.0),
            (Family::Gamma, Family::B, -1.0),
            (Family::S, Family::C, 1.0),
            (Family::C, Family::S, -1.0),
        ],
        EnergySign::Positive => &[
            (Family::A, Family::Gamma, -1.0),
            (Family::Gamma, Family::A, -1.0),
            (Family::S, Family::D, 1.0),
            (Family::D, Family::S, 1.0),
        ],
    }
}

/// Residuals of the printed time-derivative relations under `real`,
/// corrected by the family signs it applies.
pub fn time_derivative_residuals(real: &Realization, x: &PhasePoint, h: f64) -> Result<[f64; DIM]> {
    let vals = real.eval_all(x)?;
    let jac = real.jacobian(x, h, false)?;
    let k3 = (2.0 * x.energy().abs()).powf(1.5);
    let mut out = [0.0; DIM];
    for g in GeneratorId::ALL {
        let f = g.family();
        let expected = match time_derivative_partners(real.sign).iter().find(|(a, _, _)| *a == f) {
            Some(&(_, partner, c)) => {
                let s = real.family_sign(f) * real.family_sign(partner);
                s * c * k3 * vals[partner.component(g.component().unwrap_or(1)).index()]
            }
            None => 0.0,
        };
        out[g.index()] = (jac[g.index()][6] - expected).abs();
    }
    Ok(out)
}

/// Rejection-sampling window for admissible points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingWindow {
    pub r_box: f64,
    pub p_box: f64,
    pub t_box: f64,
    pub r_min: f64,
    pub min_abs_energy: f64,
    pub max_abs_zeta: f64,
    pub max_abs_value: f64,
}

impl Default for SamplingWindow {
    /// Chosen so that `h = 1e−5` central differences resolve `1e−5`
    /// absolute residuals in double precision.
    fn default() -> Self {
        SamplingWindow {
            r_box: 3.0,
            p_box: 2.0,
            t_box: 1.0,
            r_min: 0.5,
            min_abs_energy: 0.2,
            max_abs_zeta: 3.0,
            max_abs_value: 10.0,
        }
    }
}

impl SamplingWindow {
    /// Wide window: only the Coulomb cutoff and `|ζ| ≤ 50`.
    pub fn wide() -> Self {
        SamplingWindow {
            r_min: R_MIN,
            min_abs_energy: 0.0,
            max_abs_zeta: 50.0,
            max_abs_value: f64::INFINITY,
            ..Default::default()
        }
    }

    fn zeta(sign: EnergySign, x: &PhasePoint) -> f64 {
        let h = x.energy();
        let rp = dot(x.r, x.p);
        match sign {
            EnergySign::Negative => {
                let k = (-2.0 * h).sqrt();
                k * rp + k.powi(3) * x.t
            }
            EnergySign::Positive => {
                let k = (2.0 * h).sqrt();
                k * rp - k.powi(3) * x.t
            }
        }
    }

    fn admits(&self, sign: EnergySign, x: &PhasePoint) -> bool {
        let h = x.energy();
        let on_branch = match sign {
            EnergySign::Negative => h < 0.0,
            EnergySign::Positive => h > 0.0,
        };
        if x.radius() <= self.r_min.max(R_MIN) || !on_branch || h.abs() < self.min_abs_energy {
            return false;
        }
        if Self::zeta(sign, x).abs() > self.max_abs_zeta {
            return false;
        }
        [RadialTerm::Plus, RadialTerm::Minus].iter().all(|&radial| {
            let real = Realization {
                sign,
                radial,
                flips: 0,
            };
            matches!(real.eval_all(x), Ok(v) if v.iter().all(|c| c.abs() <= self.max_abs_value))
        })
    }

    /// Draws `n` admissible points; returns them with the rejection count.
    pub fn sample(&self, sign: EnergySign, n: usize, rng: &mut impl Rng) -> (Vec<PhasePoint>, usize) {
        let mut pts = Vec::with_capacity(n);
        let mut rejected = 0;
        while pts.len() < n {
            let mut u = |b: f64| rng.random_range(-b..=b);
            let x = PhasePoint::new(
                [u(self.r_box), u(self.r_box), u(self.r_box)],
                [u(self.p_box), u(self.p_box), u(self.p_box)],
                u(self.t_box),
            );
            if self.admits(sign, &x) {
                pts.push(x);
            } else {
                rejected += 1;
            }
        }
        (pts, rejected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub step: f64,
    pub tolerance: f64,
    pub richardson: bool,
    pub window: SamplingWindow,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            step: DEFAULT_STEP,
            tolerance: DEFAULT_TOL,
            richardson: false,
            window: SamplingWindow::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationResidual {
    pub a: GeneratorId,
    pub b: GeneratorId,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialTermResolution {
    pub family: Family,
    pub chosen: RadialTerm,
    /// Worst constant-of-motion and bracket residual with `+r/r`.
    pub plus_residual: f64,
    /// Same with `−r/r`.
    pub minus_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignPattern {
    pub flipped: Vec<Family>,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationReport {
    pub sign: EnergySign,
    pub seed: u64,
    pub n_samples: usize,
    pub rejected_samples: usize,
    pub options: VerifyOptions,
    /// `"{x,y} = z"`, or `"{x,y} = -z"` if the chosen pattern flips every family.
    pub convention: String,
    pub global_flip: bool,
    pub radial_term: RadialTermResolution,
    /// Residual of the formulas exactly as printed, without family flips.
    pub printed_max_residual: f64,
    /// Every family-sign pattern that satisfies the table.
    pub valid_sign_patterns: Vec<SignPattern>,
    pub chosen_flips: Vec<Family>,
    pub relations: Vec<RelationResidual>,
    pub constant_of_motion: Vec<NamedResidual>,
    pub time_derivatives: Vec<NamedResidual>,
    /// `max |{L_i, f}|` for `f ∈ {S, C, D}`.
    pub scalar_rotation_residual: f64,
    pub max_relation_residual: f64,
    pub max_motion_residual: f64,
    pub passed: bool,
}

struct Sample {
    vals: [f64; DIM],
    jac: [[f64; 7]; DIM],
    point: PhasePoint,
}

impl Sample {
    fn bracket(&self, a: usize, b: usize) -> f64 {
        bracket_from_jacobian(&self.jac[a], &self.jac[b])
    }
}

fn pattern_residual(samples: &[Sample], table: &StructureTable, flips: u8, per_pair: Option<&mut Vec<f64>>) -> f64 {
    let sign = |g: GeneratorId| if flips & (1 << family_index(g.family())) != 0 { -1.0 } else { 1.0 };
    let mut pairs = vec![0.0; DIM * (DIM - 1) / 2];
    for s in samples {
        let mut idx = 0;
        for (i, &a) in GeneratorId::ALL.iter().enumerate() {
            for &b in &GeneratorId::ALL[i + 1..] {
                let lhs = sign(a) * sign(b) * s.bracket(a.index(), b.index());
                let rhs: f64 = table
                    .sparse_row(a, b)
                    .iter()
                    .map(|&(c, f)| f as f64 * sign(c) * s.vals[c.index()])
                    .sum();
                pairs[idx] = f64::max(pairs[idx], (lhs - rhs).abs());
                idx += 1;
            }
        }
    }
    let worst = pairs.iter().copied().fold(0.0, f64::max);
    if let Some(out) = per_pair {
        *out = pairs;
    }
    worst
}

fn collect(real: &Realization, points: &[PhasePoint], opts: &VerifyOptions) -> Result<Vec<Sample>> {
    points
        .iter()
        .map(|x| {
            Ok(Sample {
                vals: real.eval_all(x)?,
                jac: real.jacobian(x, opts.step, opts.richardson)?,
                point: *x,
            })
        })
        .collect()
}

fn max_motion(samples: &[Sample], family: Option<Family>) -> f64 {
    samples
        .iter()
        .flat_map(|s| {
            GeneratorId::ALL
                .iter()
                .filter(move |g| family.is_none_or(|f| g.family() == f))
                .map(move |g| motion_residual(&s.jac[g.index()], &s.point))
        })
        .fold(0.0, f64::max)
}

/// Samples admissible points and checks every Poisson-bracket relation and
/// the constant-of-motion condition, settling the open signs on the way:
///
/// 1. the `r/r` term of the Runge-Lenz-type vector is the variant with the
///    smaller worst residual (conservation plus brackets);
/// 2. all 128 family-sign patterns are scored; among those that satisfy the
///    table, the chosen one keeps `L` and the pure energy function fixed,
///    then has the fewest flips, then the earliest families.
pub fn verify_relations(sign: EnergySign, n_samples: usize, seed: u64) -> Result<RelationReport> {
    verify_relations_with(sign, n_samples, seed, &VerifyOptions::default())
}

pub fn verify_relations_with(sign: EnergySign, n_samples: usize, seed: u64, opts: &VerifyOptions) -> Result<RelationReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let table = StructureTable::so42();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, rejected) = opts.window.sample(sign, n_samples, &mut rng);

    let all_patterns = |samples: &[Sample]| -> Vec<(u8, f64)> {
        (0..=u8::MAX >> 1).map(|m| (m, pattern_residual(samples, table, m, None))).collect()
    };

    let rl = sign.runge_lenz_family();
    let mut scored = Vec::new();
    for radial in [RadialTerm::Plus, RadialTerm::Minus] {
        let real = Realization { sign, radial, flips: 0 };
        let samples = collect(&real, &points, opts)?;
        let best_bracket = all_patterns(&samples).iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let score = max_motion(&samples, Some(rl)).max(best_bracket);
        scored.push((radial, score, samples));
    }
    let plus_residual = scored[0].1;
    let minus_residual = scored[1].1;
    let (radial, _, samples) = if plus_residual <= minus_residual {
        scored.swap_remove(0)
    } else {
        scored.swap_remove(1)
    };
    let printed_max_residual = minus_residual.max(if radial == RadialTerm::Minus {
        pattern_residual(&samples, table, 0, None)
    } else {
        let printed = collect(&Realization::printed(sign), &points, opts)?;
        pattern_residual(&printed, table, 0, None)
    });

    let patterns = all_patterns(&samples);
    let mut valid: Vec<(u8, f64)> = patterns.iter().copied().filter(|p| p.1 < opts.tolerance).collect();
    let rank = |m: u8| {
        let fixed = flip_mask(&[Family::L, sign.energy_family()]);
        let families: Vec<usize> = (0..7).filter(|i| m & (1 << i) != 0).collect();
        (m & fixed != 0, m.count_ones(), families)
    };
    valid.sort_by_key(|p| rank(p.0));
    let chosen = match valid.first() {
        Some(&(m, _)) => m,
        None => patterns
            .iter()
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|p| p.0)
            .unwrap_or(0),
    };
    let real = Realization { sign, radial, flips: chosen };

    let mut per_pair = Vec::new();
    let max_relation_residual = pattern_residual(&samples, table, chosen, Some(&mut per_pair));
    let mut relations = Vec::with_capacity(per_pair.len());
    let mut idx = 0;
    for (i, &a) in GeneratorId::ALL.iter().enumerate() {
        for &b in &GeneratorId::ALL[i + 1..] {
            relations.push(RelationResidual {
                a,
                b,
                max_residual: per_pair[idx],
            });
            idx += 1;
        }
    }

    // family flips do not change conservation, so the unflipped samples serve
    let constant_of_motion: Vec<NamedResidual> = GeneratorId::ALL
        .iter()
        .map(|g| NamedResidual {
            name: g.to_string(),
            residual: samples
                .iter()
                .map(|s| motion_residual(&s.jac[g.index()], &s.point))
                .fold(0.0, f64::max),
        })
        .collect();
    let max_motion_residual = constant_of_motion.iter().map(|e| e.residual).fold(0.0, f64::max);

    let mut td = [0.0f64; DIM];
    for x in &points {
        let r = time_derivative_residuals(&real, x, opts.step)?;
        for i in 0..DIM {
            td[i] = td[i].max(r[i]);
        }
    }
    let time_derivatives = GeneratorId::ALL
        .iter()
        .map(|g| NamedResidual {
            name: g.to_string(),
            residual: td[g.index()],
        })
        .collect::<Vec<_>>();

    let scalar_rotation_residual = samples
        .iter()
        .flat_map(|s| {
            Family::L
                .members()
                .into_iter()
                .flat_map(move |l| [GeneratorId::S, GeneratorId::C, GeneratorId::D].map(|f| s.bracket(l.index(), f.index()).abs()))
        })
        .fold(0.0, f64::max);

    let global_flip = chosen == u8::MAX >> 1;
    let td_max = td.iter().copied().fold(0.0, f64::max);
    let passed = !valid.is_empty()
        && max_relation_residual < opts.tolerance
        && max_motion_residual < opts.tolerance
        && td_max < opts.tolerance
        && scalar_rotation_residual < opts.tolerance;
    Ok(RelationReport {
        sign,
        seed,
        n_samples,
        rejected_samples: rejected,
        options: *opts,
        convention: if global_flip { "{x,y} = -z" } else { "{x,y} = z" }.into(),
        global_flip,
        radial_term: RadialTermResolution {
            family: rl,
            chosen: radial,
            plus_residual,
            minus_residual,
        },
        printed_max_residual,
        valid_sign_patterns: valid
            .iter()
            .map(|&(m, r)| SignPattern {
                flipped: flipped(m),
                max_residual: r,
            })
            .collect(),
        chosen_flips: flipped(chosen),
        relations,
        constant_of_motion,
        time_derivatives,
        scalar_rotation_residual,
        max_relation_residual,
        max_motion_residual,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use GeneratorId::*;

    #[test]
    fn spot_values() {
        let x = PhasePoint::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0);
        assert_abs_diff_eq!(eval_generator(RealizationFn::new(L3, EnergySign::Negative), &x).unwrap(), 1.0);
        let x = PhasePoint::new([1.0, 0.0, 0.0], [0.0, 0.5, 0.0], 4.2);
        let d = eval_generator(RealizationFn::new(D, EnergySign::Negative), &x).unwrap();
        assert_abs_diff_eq!(d, 1.0 / 1.75f64.sqrt(), epsilon = 1e-15);
        let x = PhasePoint::new([1.0, 0.0, 0.0], [0.0, 2.0, 0.0], 0.0);
        let c = eval_generator(RealizationFn::new(C, EnergySign::Positive), &x).unwrap();
        assert_abs_diff_eq!(c, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn domain_errors() {
        let bound = PhasePoint::new([1.0, 0.0, 0.0], [0.0, 0.5, 0.0], 0.0);
        let f = RealizationFn::new(C, EnergySign::Positive);
        assert!(matches!(eval_generator(f, &bound), Err(Error::Domain(_))));
        let origin = PhasePoint::new([1e-4, 0.0, 0.0], [0.0, 0.0, 0.0], 0.0);
        let f = RealizationFn::new(L1, EnergySign::Negative);
        assert!(matches!(eval_generator(f, &origin), Err(Error::Domain(_))));
    }

    #[test]
    fn angular_momentum_bracket() {
        let x = PhasePoint::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 0.0);
        let neg = EnergySign::Negative;
        let v = poisson_bracket(RealizationFn::new(L1, neg), RealizationFn::new(L2, neg), &x, 1e-5).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn flip_masks() {
        assert_eq!(flipped(flip_mask(&[Family::B, Family::S])), vec![Family::B, Family::S]);
        assert_eq!(Realization::canonical(EnergySign::Negative).family_sign(Family::B), -1.0);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(verify_relations(EnergySign::Negative, 0, 1).is_err());
    }
}
