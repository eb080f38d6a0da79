//! Truncated bound-state representation of so(4,2) on `{|n l m⟩ : n ≤ n_max}`.
//!
//! The angular ladder coefficients `ω_m^l`, `β_m^l`, `γ_m^l` and the radial
//! coefficients `ω_l^n` are not given in closed form by the ladder formulas;
//! they are solved from the commutation relations they must satisfy and then
//! validated on the truncation interior. The remaining coefficients
//! (`α`, `c`, `u`, `v`) are evaluated from their closed forms.
//!
//! Matrix elements that would land on `n = n_max + 1` are dropped, so all
//! identities are asserted only on the interior `n ≤ n_max − 2`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{Family, GeneratorId, StructureTable, DIM};
use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, SymmetryTag, C64, I};

pub use crate::linalg::MatrixDocument;

/// Residual bound for accepting a derived coefficient table.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub n: i64,
    pub l: i64,
    pub m: i64,
}

impl BasisState {
    pub fn new(n: i64, l: i64, m: i64) -> Self {
        BasisState { n, l, m }
    }

    pub fn is_valid(&self) -> bool {
        self.n >= 1 && (0..self.n).contains(&self.l) && self.m.abs() <= self.l
    }
}

impl std::str::FromStr for BasisState {
    type Err = Error;

    /// Parses `"n,l,m"`, optionally written as the ket `|n,l,m⟩`.
    fn from_str(s: &str) -> Result<Self> {
        let bare = s.trim().trim_start_matches('|').trim_end_matches(['⟩', '>']);
        let parts: Vec<i64> = bare
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad state `{s}`: {e}")))?;
        match parts[..] {
            [n, l, m] => {
                let st = BasisState::new(n, l, m);
                if st.is_valid() {
                    Ok(st)
                } else {
                    Err(Error::Index(format!("|{n},{l},{m}⟩ is not a bound state")))
                }
            }
            _ => Err(Error::InvalidArgument(format!("expected `n,l,m`, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for BasisState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{},{},{}⟩", self.n, self.l, self.m)
    }
}

/// Number of states with `n ≤ n_max`.
pub fn basis_dim(n_max: usize) -> usize {
    n_max * (n_max + 1) * (2 * n_max + 1) / 6
}

/// Lexicographically ordered basis with its index map.
#[derive(Debug, Clone)]
pub struct Basis {
    n_max: usize,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl Basis {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        let mut states = Vec::with_capacity(basis_dim(n_max));
        for n in 1..=n_max as i64 {
            for l in 0..n {
                for m in -l..=l {
                    states.push(BasisState::new(n, l, m));
                }
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Basis { n_max, states, index })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    pub fn index_of(&self, s: BasisState) -> Option<usize> {
        self.index.get(&s).copied()
    }

    /// Number of leading states with `n ≤ n_max − 2`; the interior projector
    /// is the prefix mask of this length.
    pub fn interior_dim(&self) -> usize {
        basis_dim(self.n_max.saturating_sub(2))
    }

    /// Index range of shell `n`.
    pub fn shell(&self, n: usize) -> std::ops::Range<usize> {
        basis_dim(n - 1)..basis_dim(n)
    }
}

/// `build_basis`: ordered states with index map.
pub fn build_basis(n_max: usize) -> Result<Basis> {
    Basis::new(n_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientKind {
    Alpha,
    C,
    U,
    V,
}

fn den(l: i64) -> f64 {
    ((2 * l - 1) * (2 * l + 1)) as f64
}

/// Closed-form ladder coefficients `α_m^l`, `c_l^n`, `u_l^n`, `v_l^n`.
///
/// `m` is ignored for `C`, `U`, `V`; `n` is ignored for `Alpha`.
pub fn closed_form_coefficient(kind: CoefficientKind, n: i64, l: i64, m: i64) -> Result<f64> {
    let out_of_range = || Error::Index(format!("{kind:?} undefined at n={n}, l={l}, m={m}"));
    match kind {
        CoefficientKind::Alpha => {
            if l < 0 || m.abs() > l {
                return Err(out_of_range());
            }
            Ok((((l - m) * (l + m)) as f64).sqrt())
        }
        CoefficientKind::C => {
            if n < 1 || l < 1 || l > n {
                return Err(out_of_range());
            }
            Ok((((n - l) * (n + l)) as f64 / den(l)).sqrt())
        }
        CoefficientKind::U => {
            if n < 1 || l < 1 || l > n {
                return Err(out_of_range());
            }
            Ok(0.5 * (((n + l - 1) * (n + l)) as f64 / den(l)).sqrt())
        }
        CoefficientKind::V => {
            if n < 1 || l < 1 || l > n + 1 {
                return Err(out_of_range());
            }
            Ok(0.5 * (((n - l) * (n - l + 1)) as f64 / den(l)).sqrt())
        }
    }
}

fn coeff(kind: CoefficientKind, n: i64, l: i64) -> f64 {
    closed_form_coefficient(kind, n, l, 0).expect("coefficient evaluated inside its range")
}

fn alpha(l: i64, m: i64) -> f64 {
    closed_form_coefficient(CoefficientKind::Alpha, 0, l, m).expect("alpha evaluated inside its range")
}

/// Coefficients solved from the commutation relations, with the residuals
/// of the constraints that define them.
#[derive(Debug, Clone)]
pub struct CoefficientTables {
    pub n_max: usize,
    /// `ω_m^l`: `L₊|n l m⟩ = ω_m^l |n l m+1⟩`, keyed by `(l, m)`.
    pub omega_rot: BTreeMap<(i64, i64), f64>,
    /// `β_m^l`, keyed by `(l, m)`.
    pub beta: BTreeMap<(i64, i64), f64>,
    /// `γ_m^l`, keyed by `(l, m)`.
    pub gamma: BTreeMap<(i64, i64), f64>,
    /// `ω_l^n`: `T₊|n l m⟩ = ω_l^n |n+1 l m⟩`, keyed by `(n, l)`; `ω_l^l = 0`.
    pub omega_rad: BTreeMap<(i64, i64), f64>,
    pub residuals: ConstraintResiduals,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    /// `[L₃, L±] ∓ L±`, `[L₊, L₋] − 2L₃`.
    pub rotation: f64,
    /// `[L, A] = iA`, `[A, A] = iL` componentwise on the interior.
    pub runge_lenz: f64,
    /// `[D, T±] ∓ T±`, `[T₊, T₋] + 2D` on the interior.
    pub radial: f64,
    /// Spread of `β`, `γ` across the shells they were read from.
    pub shell_consistency: f64,
    /// `L₋` coefficient on `|l m⟩` equals `ω_{-m}^l` (printed lowering rule).
    pub rotation_lowering_rule: bool,
    /// `A₋` built from the printed `β_{-m}`, `γ_{-m}` rule equals `A₊†`.
    pub runge_lenz_lowering_rule: bool,
}

impl CoefficientTables {
    pub fn omega_rot(&self, l: i64, m: i64) -> f64 {
        self.omega_rot.get(&(l, m)).copied().unwrap_or(0.0)
    }

    pub fn beta(&self, l: i64, m: i64) -> f64 {
        self.beta.get(&(l, m)).copied().unwrap_or(0.0)
    }

    pub fn gamma(&self, l: i64, m: i64) -> f64 {
        self.gamma.get(&(l, m)).copied().unwrap_or(0.0)
    }

    pub fn omega_rad(&self, n: i64, l: i64) -> f64 {
        self.omega_rad.get(&(n, l)).copied().unwrap_or(0.0)
    }

    /// `T₋|n l m⟩` coefficient. `T₋ = T₊†` forces the lowering coefficient
    /// to be the raising coefficient of the shell below, `ω_l^{n−1}`.
    pub fn omega_rad_lowering(&self, n: i64, l: i64) -> f64 {
        self.omega_rad(n - 1, l)
    }

    pub fn max_residual(&self) -> f64 {
        let r = &self.residuals;
        r.rotation.max(r.runge_lenz).max(r.radial).max(r.shell_consistency)
    }
}

/// Sparse builder: `f(state)` lists `(coefficient, target)` pairs; targets
/// outside the truncated basis are dropped.
fn ladder(basis: &Basis, f: impl Fn(BasisState) -> Vec<(C64, BasisState)>) -> OperatorMatrix {
    let mut triplets = Vec::new();
    for (j, &s) in basis.states().iter().enumerate() {
        for (v, t) in f(s) {
            if v.norm() == 0.0 || !t.is_valid() {
                continue;
            }
            if let Some(i) = basis.index_of(t) {
                triplets.push((i, j, v));
            }
        }
    }
    OperatorMatrix::from_triplets(basis.dim(), triplets)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn st(n: i64, l: i64, m: i64) -> BasisState {
    BasisState::new(n, l, m)
}

fn valid(n: i64, l: i64, m: i64) -> bool {
    st(n, l, m).is_valid()
}

/// `L₊` from a table of `ω_m^l`.
fn l_plus(basis: &Basis, t: &CoefficientTables) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(t.omega_rot(s.l, s.m)), st(s.n, s.l, s.m + 1))])
}

/// `L₋` via the printed rule `L₋|n l m⟩ = ω_{−m}^l |n l m−1⟩`.
fn l_minus(basis: &Basis, t: &CoefficientTables) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(t.omega_rot(s.l, -s.m)), st(s.n, s.l, s.m - 1))])
}

fn a3(basis: &Basis) -> OperatorMatrix {
    ladder(basis, |s| {
        let (n, l, m) = (s.n, s.l, s.m);
        let mut out = Vec::new();
        if valid(n, l - 1, m) {
            out.push((re(alpha(l, m) * coeff(CoefficientKind::C, n, l)), st(n, l - 1, m)));
        }
        if valid(n, l + 1, m) {
            out.push((re(alpha(l + 1, m) * coeff(CoefficientKind::C, n, l + 1)), st(n, l + 1, m)));
        }
        out
    })
}

/// `A₊` (`sign = 1`) or `A₋` (`sign = −1`) from the printed formulas.
fn a_pm(basis: &Basis, t: &CoefficientTables, sign: i64) -> OperatorMatrix {
    ladder(basis, |s| {
        let (n, l, m) = (s.n, s.l, s.m);
        let sm = sign * m;
        let s = sign as f64;
        let mut out = Vec::new();
        if valid(n, l - 1, m + sign) {
            out.push((
                re(s * t.beta(l - 1, sm) * coeff(CoefficientKind::C, n, l)),
                st(n, l - 1, m + sign),
            ));
        }
        if valid(n, l + 1, m + sign) {
            out.push((
                re(-s * t.gamma(l + 1, sm) * coeff(CoefficientKind::C, n, l + 1)),
                st(n, l + 1, m + sign),
            ));
        }
        out
    })
}

/// The four n-changing amplitudes shared by the `B` and `Γ` ladders for a
/// state `|n l m⟩`: targets `(n−1,l−1)`, `(n+1,l−1)`, `(n−1,l+1)`, `(n+1,l+1)`.
fn radial_amplitudes(n: i64, l: i64) -> [(f64, i64, i64); 4] {
    use CoefficientKind::{U, V};
    let guarded = |ok: bool, f: &dyn Fn() -> f64| if ok { f() } else { 0.0 };
    [
        (guarded(l >= 1, &|| coeff(U, n, l)), -1, -1),
        (guarded(l >= 1, &|| coeff(V, n, l)), 1, -1),
        (guarded(n >= 2, &|| coeff(V, n - 1, l + 1)), -1, 1),
        (guarded(true, &|| coeff(U, n + 1, l + 1)), 1, 1),
    ]
}

/// Builds `X₃`, `X₊`, `X₋` for `X ∈ {B, Γ}` from the printed formulas.
///
/// `phase(dn)` multiplies each amplitude according to the direction of the
/// `n` shift: `1` for `B`, `±i` for `Γ`.
fn b_like(basis: &Basis, t: &CoefficientTables, phase: impl Fn(i64) -> C64 + Copy) -> [OperatorMatrix; 3] {
    let third = ladder(basis, |s| {
        let (n, l, m) = (s.n, s.l, s.m);
        radial_amplitudes(n, l)
            .into_iter()
            .filter(|&(_, dn, dl)| valid(n + dn, l + dl, m))
            .map(|(amp, dn, dl)| {
                let a = if dl < 0 { alpha(l, m) } else { alpha(l + 1, m) };
                (phase(dn) * a * amp, st(n + dn, l + dl, m))
            })
            .collect()
    });
    let pm = |sign: i64| {
        ladder(basis, move |s| {
            let (n, l, m) = (s.n, s.l, s.m);
            let sm = sign * m;
            let s = sign as f64;
            radial_amplitudes(n, l)
                .into_iter()
                .filter(|&(_, dn, dl)| valid(n + dn, l + dl, m + sign))
                .map(|(amp, dn, dl)| {
                    let a = if dl < 0 { s * t.beta(l - 1, sm) } else { -s * t.gamma(l + 1, sm) };
                    (phase(dn) * a * amp, st(n + dn, l + dl, m + sign))
                })
                .collect()
        })
    };
    [third, pm(1), pm(-1)]
}

fn t_plus(basis: &Basis, t: &CoefficientTables) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(t.omega_rad(s.n, s.l)), st(s.n + 1, s.l, s.m))])
}

fn t_minus(basis: &Basis, t: &CoefficientTables) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(t.omega_rad_lowering(s.n, s.l)), st(s.n - 1, s.l, s.m))])
}

fn d_matrix(basis: &Basis) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(s.n as f64), s)])
}

fn l3(basis: &Basis) -> OperatorMatrix {
    ladder(basis, |s| vec![(re(s.m as f64), s)])
}

fn cartesian(plus: &OperatorMatrix, minus: &OperatorMatrix) -> (OperatorMatrix, OperatorMatrix) {
    let half = re(0.5);
    let x = plus.lin_comb(half, minus, half);
    let y = plus.lin_comb(-half * I, minus, half * I);
    (x, y)
}

/// Solves the undefined ladder coefficients from their defining relations.
///
/// * `ω_m^l` from `[L₊, L₋] = 2L₃` with `L₊` annihilating `m = l` and
///   `L₋ = L₊†`, taking the non-negative root.
/// * `β`, `γ` from `A₊ = [A₃, L₊]` (the component form of `[L, A] = iA`),
///   read off the `l ∓ 1` matrix elements and divided by `c`.
/// * `ω_l^n` from `[T₊, T₋] = −2D` with `T₋ = T₊†` and `T₋` annihilating the
///   lowest shell `n = l + 1`.
///
/// Every table is then validated on the interior.
pub fn derive_ladder_coefficients(n_max: usize) -> Result<CoefficientTables> {
    if n_max < 3 {
        return Err(Error::InvalidArgument("deriving ladder coefficients needs n_max ≥ 3".into()));
    }
    let basis = Basis::new(n_max)?;
    let nm = n_max as i64;
    let mut tables = CoefficientTables {
        n_max,
        omega_rot: BTreeMap::new(),
        beta: BTreeMap::new(),
        gamma: BTreeMap::new(),
        omega_rad: BTreeMap::new(),
        residuals: ConstraintResiduals::default(),
    };

    // ω_m^l: ω_{m-1}² − ω_m² = 2m, downward from ω_l = 0.
    for l in 0..nm {
        let mut sq = 0.0;
        tables.omega_rot.insert((l, l), 0.0);
        for m in (-l..l).rev() {
            sq += 2.0 * (m + 1) as f64;
            if sq < -CONSTRAINT_TOL {
                return Err(Error::Constraint(format!("ω_{m}^{l} has no real solution")));
            }
            tables.omega_rot.insert((l, m), sq.max(0.0).sqrt());
        }
        // closing condition: L₋ annihilates m = −l
        let closing = tables.omega_rot[&(l, -l)].powi(2) - 2.0 * l as f64;
        if closing.abs() > CONSTRAINT_TOL {
            return Err(Error::Constraint(format!("so(3) ladder for l={l} does not close")));
        }
    }

    // ω_l^n: (ω^n)² = (ω^{n−1})² + 2n starting from ω^l = 0.
    for l in 0..nm {
        let mut sq = 0.0;
        tables.omega_rad.insert((l, l), 0.0);
        for n in (l + 1)..=nm {
            sq += 2.0 * n as f64;
            tables.omega_rad.insert((n, l), sq.sqrt());
        }
    }

    // β, γ from A₊ = [A₃, L₊]; each value is read from every shell that
    // carries it and must agree across shells.
    let lp = l_plus(&basis, &tables);
    let a_plus = a3(&basis).commutator(&lp);
    let mut spread: f64 = 0.0;
    let mut record = |map: &mut BTreeMap<(i64, i64), f64>, key: (i64, i64), value: f64| {
        if let Some(prev) = map.insert(key, value) {
            spread = spread.max((prev - value).abs());
        }
    };
    for (j, s) in basis.states().iter().enumerate() {
        let (n, l, m) = (s.n, s.l, s.m);
        if l >= 1 {
            let c = coeff(CoefficientKind::C, n, l);
            let v = basis
                .index_of(st(n, l - 1, m + 1))
                .map(|i| a_plus.get(i, j).re)
                .unwrap_or(0.0);
            record(&mut tables.beta, (l - 1, m), v / c);
        }
        if l + 1 < n {
            let c = coeff(CoefficientKind::C, n, l + 1);
            let v = basis
                .index_of(st(n, l + 1, m + 1))
                .map(|i| a_plus.get(i, j).re)
                .unwrap_or(0.0);
            record(&mut tables.gamma, (l + 1, m), -v / c);
        }
    }
    tables.residuals.shell_consistency = spread;
    for (name, map) in [("β", &tables.beta), ("γ", &tables.gamma)] {
        if let Some(((l, m), v)) = map.iter().find(|(_, &v)| v < -CONSTRAINT_TOL) {
            return Err(Error::Constraint(format!(
                "{name}_{m}^{l} = {v} is negative; the printed sign pattern is inconsistent"
            )));
        }
    }
    if spread > CONSTRAINT_TOL {
        return Err(Error::Constraint(format!("β/γ differ between shells by {spread:.3e}")));
    }

    validate_tables(&basis, &mut tables)?;
    Ok(tables)
}

fn validate_tables(basis: &Basis, t: &mut CoefficientTables) -> Result<()> {
    let k = basis.interior_dim();
    let lp = l_plus(basis, t);
    let lm = l_minus(basis, t);
    let l3m = l3(basis);
    let one = re(1.0);

    t.residuals.rotation_lowering_rule = lm.sub(&lp.adjoint()).max_abs() < CONSTRAINT_TOL;
    let rot = [
        l3m.commutator(&lp).sub(&lp).max_abs(),
        l3m.commutator(&lm).add(&lm).max_abs(),
        lp.commutator(&lm).lin_comb(one, &l3m, re(-2.0)).max_abs(),
    ];
    t.residuals.rotation = rot.into_iter().fold(0.0, f64::max);

    let ap = a_pm(basis, t, 1);
    let am = a_pm(basis, t, -1);
    t.residuals.runge_lenz_lowering_rule = am.sub(&ap.adjoint()).max_abs() < CONSTRAINT_TOL;
    let (lx, ly) = cartesian(&lp, &lm);
    let (ax, ay) = cartesian(&ap, &am);
    let l = [lx, ly, l3m];
    let a = [ax, ay, a3(basis)];
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                worst = worst.max(l[i].commutator(&a[j]).max_abs_in_block(k));
                continue;
            }
            let kk = 3 - i - j;
            let eps = if (i + 1) % 3 == j { 1.0 } else { -1.0 };
            let la = l[i].commutator(&a[j]).lin_comb(one, &a[kk], -I * eps);
            let aa = a[i].commutator(&a[j]).lin_comb(one, &l[kk], -I * eps);
            worst = worst.max(la.max_abs_in_block(k)).max(aa.max_abs_in_block(k));
        }
    }
    t.residuals.runge_lenz = worst;

    let tp = t_plus(basis, t);
    let tm = t_minus(basis, t);
    let d = d_matrix(basis);
    let rad = [
        d.commutator(&tp).sub(&tp).max_abs_in_block(k),
        d.commutator(&tm).add(&tm).max_abs_in_block(k),
        tp.commutator(&tm).lin_comb(one, &d, re(2.0)).max_abs_in_block(k),
        tm.sub(&tp.adjoint()).max_abs(),
    ];
    t.residuals.radial = rad.into_iter().fold(0.0, f64::max);

    if !t.residuals.rotation_lowering_rule || !t.residuals.runge_lenz_lowering_rule {
        return Err(Error::Constraint("printed lowering rule disagrees with the adjoint".into()));
    }
    let max = t.max_residual();
    if max > CONSTRAINT_TOL {
        return Err(Error::Constraint(format!("derived tables leave residual {max:.3e}")));
    }
    Ok(())
}

/// All fifteen generator matrices at once, in `GeneratorId` order.
fn build_all(basis: &Basis, t: &CoefficientTables) -> Result<Vec<OperatorMatrix>> {
    let (l1, l2) = cartesian(&l_plus(basis, t), &l_minus(basis, t));
    let (a1, a2) = cartesian(&a_pm(basis, t, 1), &a_pm(basis, t, -1));
    let [b3, bp, bm] = b_like(basis, t, |_| re(1.0));
    let (b1, b2) = cartesian(&bp, &bm);
    let [g3, gp, gm] = b_like(basis, t, |dn| C64::new(0.0, dn as f64));
    let (g1, g2) = cartesian(&gp, &gm);
    let tp = t_plus(basis, t);
    let tm = t_minus(basis, t);
    let s = tp.lin_comb(-0.5 * I, &tm, 0.5 * I);
    let c = tp.lin_comb(re(0.5), &tm, re(0.5));
    let mats = vec![
        l1,
        l2,
        l3(basis),
        a1,
        a2,
        a3(basis),
        b1,
        b2,
        b3,
        g1,
        g2,
        g3,
        s,
        c,
        d_matrix(basis),
    ];
    mats.into_iter()
        .map(|m| m.with_verified_tag(SymmetryTag::Hermitian))
        .collect()
}

/// Hermitian matrix of generator `g` on the truncated basis.
///
/// `L₁, L₂` come from `L± = L₁ ± iL₂` (likewise `A`, `B`, `Γ`);
/// `S = (T₊ − T₋)/(2i)`, `C = (T₊ + T₋)/2`, the pairing under which
/// `[D, T±] = ±T±`.
pub fn build_generator_matrix(g: GeneratorId, n_max: usize, tables: &CoefficientTables) -> Result<OperatorMatrix> {
    if tables.n_max != n_max {
        return Err(Error::InvalidArgument(format!(
            "tables were derived for n_max={}, not {n_max}",
            tables.n_max
        )));
    }
    let basis = Basis::new(n_max)?;
    let mut all = build_all(&basis, tables)?;
    Ok(all.swap_remove(g.index()))
}

pub fn energy(n: i64) -> f64 {
    -1.0 / (2.0 * (n * n) as f64)
}

/// Diagonal Hamiltonian with `E_n = −1/(2n²)`.
pub fn build_hamiltonian(n_max: usize) -> Result<OperatorMatrix> {
    let basis = Basis::new(n_max)?;
    let diag: Vec<C64> = basis.states().iter().map(|s| re(energy(s.n))).collect();
    OperatorMatrix::diagonal(&diag).with_verified_tag(SymmetryTag::Hermitian)
}

/// Immutable set of representation matrices for one cutoff.
#[derive(Debug, Clone)]
pub struct RepSet {
    pub basis: Basis,
    pub tables: CoefficientTables,
    generators: Vec<OperatorMatrix>,
    pub hamiltonian: OperatorMatrix,
    energies: Vec<f64>,
}

impl RepSet {
    pub fn build(n_max: usize) -> Result<Self> {
        let tables = derive_ladder_coefficients(n_max)?;
        let basis = Basis::new(n_max)?;
        let generators = build_all(&basis, &tables)?;
        let hamiltonian = build_hamiltonian(n_max)?;
        let energies = basis.states().iter().map(|s| energy(s.n)).collect();
        Ok(RepSet {
            basis,
            tables,
            generators,
            hamiltonian,
            energies,
        })
    }

    pub fn n_max(&self) -> usize {
        self.basis.n_max()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn generator(&self, g: GeneratorId) -> &OperatorMatrix {
        &self.generators[g.index()]
    }

    pub fn generators(&self) -> &[OperatorMatrix] {
        &self.generators
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn interior_dim(&self) -> usize {
        self.basis.interior_dim()
    }

    /// Hermitian matrix of a real combination `Σ c_a X_a`.
    pub fn realize(&self, x: &crate::algebra::AlgebraElement<f64>) -> OperatorMatrix {
        let mut acc = OperatorMatrix::zeros(self.dim());
        for g in GeneratorId::ALL {
            let c = *x.coeff(g);
            if c != 0.0 {
                acc = acc.lin_comb(re(1.0), self.generator(g), re(c));
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    pub entries: Vec<NamedResidual>,
    pub max_residual: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn new(tolerance: f64, entries: Vec<NamedResidual>) -> Self {
        let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
        ResidualReport {
            tolerance,
            passed: max_residual < tolerance,
            entries,
            max_residual,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.residual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Leading block `n ≤ n_max − 2`.
    Interior,
    Full,
}

/// `‖P([X_a, X_b] − i Σ_c f_ab^c X_c)P‖_max` for the given pairs.
pub fn check_commutators_with(
    rep: &RepSet,
    tol: f64,
    pairs: &[(GeneratorId, GeneratorId)],
    projection: Projection,
) -> ResidualReport {
    let table = StructureTable::so42();
    let k = match projection {
        Projection::Interior => rep.interior_dim(),
        Projection::Full => rep.dim(),
    };
    let entries = pairs
        .iter()
        .map(|&(a, b)| {
            let mut r = rep.generator(a).commutator(rep.generator(b));
            for c in GeneratorId::ALL {
                let f = table.coefficient(a, b, c);
                if f != 0 {
                    r = r.lin_comb(re(1.0), rep.generator(c), -I * f as f64);
                }
            }
            NamedResidual {
                name: format!("{a},{b}"),
                residual: r.max_abs_in_block(k),
            }
        })
        .collect();
    ResidualReport::new(tol, entries)
}

/// All 105 unordered generator pairs.
pub fn all_pairs() -> Vec<(GeneratorId, GeneratorId)> {
    let mut v = Vec::with_capacity(DIM * (DIM - 1) / 2);
    for (i, &a) in GeneratorId::ALL.iter().enumerate() {
        for &b in &GeneratorId::ALL[i + 1..] {
            v.push((a, b));
        }
    }
    v
}

pub fn check_commutators(rep: &RepSet, tol: f64) -> ResidualReport {
    check_commutators_with(rep, tol, &all_pairs(), Projection::Interior)
}

/// `G(t) = e^{−iHt} G(0) e^{iHt}`; with `H` diagonal this is an entry-wise
/// phase `e^{−i(E_j − E_k)t}`.
pub fn heisenberg_generator(rep: &RepSet, g: GeneratorId, t: f64) -> OperatorMatrix {
    heisenberg_evolve(rep, rep.generator(g), t)
}

pub fn heisenberg_evolve(rep: &RepSet, m: &OperatorMatrix, t: f64) -> OperatorMatrix {
    let e = rep.energies();
    let out = m.map_entries(|j, k, v| v * C64::from_polar(1.0, -(e[j] - e[k]) * t));
    match m.tag() {
        SymmetryTag::None => out,
        tag => out.with_verified_tag(tag).unwrap_or_else(|err| panic!("conjugation broke symmetry: {err}")),
    }
}

/// `L·A + A·L = 0` and `L² + A² = D² − 1` on interior states.
pub fn casimir_check(rep: &RepSet, tol: f64) -> ResidualReport {
    use GeneratorId::*;
    let k = rep.interior_dim();
    let dot = |x: &[GeneratorId; 3], y: &[GeneratorId; 3]| {
        let mut acc = OperatorMatrix::zeros(rep.dim());
        for i in 0..3 {
            acc = acc.add(&rep.generator(x[i]).matmul(rep.generator(y[i])));
        }
        acc
    };
    let (lv, av) = ([L1, L2, L3], [A1, A2, A3]);
    let la = dot(&lv, &av);
    let al = dot(&av, &lv);
    let d = rep.generator(D);
    let casimir = dot(&lv, &lv)
        .add(&dot(&av, &av))
        .sub(&d.matmul(d))
        .add(&OperatorMatrix::identity(rep.dim()));
    ResidualReport::new(
        tol,
        vec![
            NamedResidual {
                name: "L.A".into(),
                residual: la.max_abs_in_block(k),
            },
            NamedResidual {
                name: "A.L".into(),
                residual: al.max_abs_in_block(k),
            },
            NamedResidual {
                name: "L^2+A^2-D^2+1".into(),
                residual: casimir.max_abs_in_block(k),
            },
        ],
    )
}

/// `max ‖X − X†‖` over the fifteen generators.
pub fn hermiticity_report(rep: &RepSet, tol: f64) -> ResidualReport {
    ResidualReport::new(
        tol,
        GeneratorId::ALL
            .iter()
            .map(|&g| NamedResidual {
                name: g.to_string(),
                residual: rep.generator(g).hermiticity_defect(),
            })
            .collect(),
    )
}

/// Families that commute with the Hamiltonian keep `n` fixed.
pub fn preserves_shell(f: Family) -> bool {
    matches!(f, Family::L | Family::A | Family::D)
}
