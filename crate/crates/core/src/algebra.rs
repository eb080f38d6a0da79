//! The abstract 15-dimensional real Lie algebra so(4,2).
//!
//! Elements are coefficient vectors over the fifteen named generators
//! `L1..L3, A1..A3, B1..B3, Γ1..Γ3, S, C, D`. Structure constants are stored
//! for the skew-Hermitian basis `X' = -iX`, where every relation of the form
//! `[X, Y] = iZ` between Hermitian generators becomes the real relation
//! `[X', Y'] = Z'`. The table therefore has entries in `{-1, 0, 1}` and the
//! Hermitian commutators are recovered as `[X_a, X_b] = i Σ_c f_ab^c X_c`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of generators.
pub const DIM: usize = 15;

/// Signature of the pseudo-Euclidean metric preserved by SO(4,2).
pub const METRIC_SIGNATURE: [i8; 6] = [1, 1, 1, 1, -1, -1];

/// Bracket depth after which closure iteration gives up.
pub const MAX_CLOSURE_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorId {
    L1,
    L2,
    L3,
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    G1,
    G2,
    G3,
    S,
    C,
    D,
}

/// Generator families; the vector families carry three Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    L,
    A,
    B,
    Gamma,
    S,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::L,
        Family::A,
        Family::B,
        Family::Gamma,
        Family::S,
        Family::C,
        Family::D,
    ];

    pub fn is_vector(self) -> bool {
        matches!(self, Family::L | Family::A | Family::B | Family::Gamma)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::L => "L",
            Family::A => "A",
            Family::B => "B",
            Family::Gamma => "G",
            Family::S => "S",
            Family::C => "C",
            Family::D => "D",
        }
    }

    /// Members of the family in index order.
    pub fn members(self) -> &'static [GeneratorId] {
        use GeneratorId::*;
        match self {
            Family::L => &[L1, L2, L3],
            Family::A => &[A1, A2, A3],
            Family::B => &[B1, B2, B3],
            Family::Gamma => &[G1, G2, G3],
            Family::S => &[S],
            Family::C => &[C],
            Family::D => &[D],
        }
    }

    /// Component `k` (1-based) of a vector family, or the scalar itself.
    pub fn component(self, k: usize) -> GeneratorId {
        let m = self.members();
        if m.len() == 1 {
            m[0]
        } else {
            m[k - 1]
        }
    }
}

impl GeneratorId {
    pub const ALL: [GeneratorId; DIM] = {
        use GeneratorId::*;
        [L1, L2, L3, A1, A2, A3, B1, B2, B3, G1, G2, G3, S, C, D]
    };

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        use GeneratorId::*;
        match self {
            L1 => "L1",
            L2 => "L2",
            L3 => "L3",
            A1 => "A1",
            A2 => "A2",
            A3 => "A3",
            B1 => "B1",
            B2 => "B2",
            B3 => "B3",
            G1 => "G1",
            G2 => "G2",
            G3 => "G3",
            S => "S",
            C => "C",
            D => "D",
        }
    }

    pub fn family(self) -> Family {
        match self.index() {
            0..=2 => Family::L,
            3..=5 => Family::A,
            6..=8 => Family::B,
            9..=11 => Family::Gamma,
            12 => Family::S,
            13 => Family::C,
            _ => Family::D,
        }
    }

    /// Cartesian component (1..=3) for vector generators.
    pub fn component(self) -> Option<usize> {
        let i = self.index();
        (i < 12).then_some(i % 3 + 1)
    }

    /// Parse a comma-separated list such as `"L1,L2,A3,S,C"`.
    pub fn parse_list(s: &str) -> Result<Vec<GeneratorId>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    /// Case-insensitive; accepts `Gamma1`, `Γ1` and `G1` alike, and ignores a
    /// trailing prime.
    fn from_str(s: &str) -> Result<Self> {
        let raw = s.trim();
        let trimmed = raw.trim_end_matches(['\'', '′']);
        let lower = trimmed.to_lowercase();
        let canon = if let Some(rest) = lower.strip_prefix("gamma") {
            format!("g{rest}")
        } else if let Some(rest) = lower.strip_prefix('γ') {
            format!("g{rest}")
        } else {
            lower
        };
        GeneratorId::ALL
            .iter()
            .copied()
            .find(|g| g.name().eq_ignore_ascii_case(&canon))
            .ok_or_else(|| Error::UnknownGenerator(raw.to_string()))
    }
}

/// Coefficient field for algebra elements.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(v: i64) -> Self;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for i64 {
    fn from_int(v: i64) -> Self {
        v
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// An element of so(4,2) written in the generator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<T = f64> {
    coeffs: [T; DIM],
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn zero() -> Self {
        Self {
            coeffs: std::array::from_fn(|_| T::zero()),
        }
    }

    pub fn basis(g: GeneratorId) -> Self {
        let mut e = Self::zero();
        e.coeffs[g.index()] = T::one();
        e
    }

    pub fn from_coeffs(coeffs: [T; DIM]) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T; DIM] {
        &self.coeffs
    }

    pub fn coeff(&self, g: GeneratorId) -> &T {
        &self.coeffs[g.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() * s.clone()),
        }
    }

    /// Bracket with the canonical so(4,2) table.
    pub fn bracket(&self, other: &Self) -> Self {
        StructureTable::so42().bracket(self, other)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AlgebraElement<U> {
        AlgebraElement {
            coeffs: std::array::from_fn(|i| f(&self.coeffs[i])),
        }
    }
}

impl AlgebraElement<BigRational> {
    pub fn to_f64(&self) -> AlgebraElement<f64> {
        use num_traits::ToPrimitive;
        self.map(|c| c.to_f64().unwrap_or(f64::NAN))
    }
}

impl AlgebraElement<f64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl<T: Scalar> Add for AlgebraElement<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<T: Scalar> Add for &AlgebraElement<T> {
    type Output = AlgebraElement<T>;
    fn add(self, rhs: Self) -> AlgebraElement<T> {
        AlgebraElement {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()),
        }
    }
}

impl<T: Scalar> Sub for AlgebraElement<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        AlgebraElement {
            coeffs: std::array::from_fn(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()),
        }
    }
}

impl<T: Scalar> Neg for AlgebraElement<T> {
    type Output = Self;
    fn neg(self) -> Self {
        AlgebraElement {
            coeffs: std::array::from_fn(|i| -self.coeffs[i].clone()),
        }
    }
}

impl<T: Scalar> fmt::Display for AlgebraElement<T>
where
    T: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = GeneratorId::ALL
            .iter()
            .filter(|g| !self.coeffs[g.index()].is_zero())
            .map(|g| format!("{}·{}", self.coeffs[g.index()], g))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Fully expanded structure constants `f[a][b][c]` with `[X'_a, X'_b] = Σ f_ab^c X'_c`.
#[derive(Debug, Clone)]
pub struct StructureTable {
    f: [[[i8; DIM]; DIM]; DIM],
    // nonzero (c, f_ab^c) per ordered pair, for sparse brackets
    sparse: Vec<Vec<(usize, i8)>>,
}

/// `[X, Y] = sign * Z` between families, expanded componentwise according to
/// the arity of the three families: vector×vector→vector uses ε_ijk,
/// vector×vector→scalar uses δ_ij, scalar×vector (or vector×scalar)→vector is
/// componentwise, and scalar×scalar→scalar is literal.
const RELATIONS: &[(Family, Family, Family, i8)] = {
    use Family::*;
    &[
        (L, L, L, 1),
        (L, A, A, 1),
        (L, B, B, 1),
        (L, Gamma, Gamma, 1),
        (A, A, L, 1),
        (B, B, L, -1),
        (Gamma, Gamma, L, -1),
        (A, B, S, 1),
        (S, A, B, 1),
        (S, B, A, 1),
        (C, A, Gamma, 1),
        (D, B, Gamma, -1),
        (C, S, D, -1),
        (S, D, C, 1),
        (D, C, S, 1),
        (Gamma, A, C, -1),
        (Gamma, B, D, -1),
        (Gamma, C, A, -1),
        (Gamma, D, B, -1),
    ]
};

fn levi_civita(i: usize, j: usize, k: usize) -> i8 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

impl StructureTable {
    /// The canonical table, built once.
    pub fn so42() -> &'static StructureTable {
        static TABLE: OnceLock<StructureTable> = OnceLock::new();
        TABLE.get_or_init(StructureTable::build)
    }

    fn build() -> Self {
        let mut f = [[[0i8; DIM]; DIM]; DIM];
        let mut set = |a: GeneratorId, b: GeneratorId, c: GeneratorId, v: i8| {
            let (a, b, c) = (a.index(), b.index(), c.index());
            for (x, y, w) in [(a, b, v), (b, a, -v)] {
                let slot = &mut f[x][y][c];
                assert!(
                    *slot == 0 || *slot == w,
                    "conflicting structure constant at ({x},{y},{c})"
                );
                *slot = w;
            }
        };
        for &(x, y, z, s) in RELATIONS {
            match (x.is_vector(), y.is_vector(), z.is_vector()) {
                (true, true, true) => {
                    for i in 1..=3 {
                        for j in 1..=3 {
                            for k in 1..=3 {
                                let e = levi_civita(i, j, k);
                                if e != 0 {
                                    set(x.component(i), y.component(j), z.component(k), s * e);
                                }
                            }
                        }
                    }
                }
                (true, true, false) => {
                    for i in 1..=3 {
                        set(x.component(i), y.component(i), z.component(1), s);
                    }
                }
                (false, true, true) | (true, false, true) => {
                    for i in 1..=3 {
                        set(x.component(i), y.component(i), z.component(i), s);
                    }
                }
                (false, false, false) => set(x.component(1), y.component(1), z.component(1), s),
                _ => unreachable!("relation {x:?} {y:?} -> {z:?} has no componentwise reading"),
            }
        }
        let sparse = (0..DIM * DIM)
            .map(|ab| {
                let (a, b) = (ab / DIM, ab % DIM);
                (0..DIM)
                    .filter(|&c| f[a][b][c] != 0)
                    .map(|c| (c, f[a][b][c]))
                    .collect()
            })
            .collect();
        StructureTable { f, sparse }
    }

    pub fn coefficient(&self, a: GeneratorId, b: GeneratorId, c: GeneratorId) -> i8 {
        self.f[a.index()][b.index()][c.index()]
    }

    /// Nonzero `(c, f_ab^c)` for the ordered pair `(a, b)`.
    pub fn sparse_row(&self, a: GeneratorId, b: GeneratorId) -> Vec<(GeneratorId, i8)> {
        self.sparse[a.index() * DIM + b.index()]
            .iter()
            .map(|&(c, v)| (GeneratorId::ALL[c], v))
            .collect()
    }

    pub fn metric_signature(&self) -> [i8; 6] {
        METRIC_SIGNATURE
    }

    /// `[X'_a, X'_b]` as an integer element.
    pub fn bracket_generators(&self, a: GeneratorId, b: GeneratorId) -> AlgebraElement<i64> {
        let mut out = AlgebraElement::<i64>::zero();
        for &(c, v) in &self.sparse[a.index() * DIM + b.index()] {
            out.coeffs[c] = v as i64;
        }
        out
    }

    pub fn bracket<T: Scalar>(&self, x: &AlgebraElement<T>, y: &AlgebraElement<T>) -> AlgebraElement<T> {
        let mut out = AlgebraElement::<T>::zero();
        for (a, xa) in x.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (b, yb) in y.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let prod = xa.clone() * yb.clone();
                for &(c, v) in &self.sparse[a * DIM + b] {
                    let term = prod.clone() * T::from_int(v as i64);
                    out.coeffs[c] = out.coeffs[c].clone() + term;
                }
            }
        }
        out
    }

    /// `[a,[b,c]] + [b,[c,a]] + [c,[a,b]]`, exactly.
    pub fn jacobi_defect(&self, a: GeneratorId, b: GeneratorId, c: GeneratorId) -> AlgebraElement<BigRational> {
        let (ea, eb, ec) = (
            AlgebraElement::<BigRational>::basis(a),
            AlgebraElement::basis(b),
            AlgebraElement::basis(c),
        );
        let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
        let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
        let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
        t1 + t2 + t3
    }

    /// Killing form `B(X_a, X_b) = tr(ad X_a · ad X_b)`.
    pub fn killing_matrix(&self) -> [[i64; DIM]; DIM] {
        let mut k = [[0i64; DIM]; DIM];
        for (a, row) in k.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                // (ad_a)_{cd} = f_ad^c
                let mut s = 0i64;
                for c in 0..DIM {
                    for d in 0..DIM {
                        s += self.f[a][d][c] as i64 * self.f[b][c][d] as i64;
                    }
                }
                *entry = s;
            }
        }
        k
    }

    /// Exact rank of the Killing form restricted to `subset × subset`.
    pub fn killing_rank(&self, subset: &[GeneratorId]) -> usize {
        let k = self.killing_matrix();
        let rows: Vec<Vec<BigRational>> = subset
            .iter()
            .map(|a| subset.iter().map(|b| BigRational::from_int(k[a.index()][b.index()])).collect())
            .collect();
        exact_rank(rows)
    }

    /// True when the Killing form has full rank 15 (semisimplicity).
    pub fn killing_nondegeneracy(&self) -> bool {
        self.killing_rank(&GeneratorId::ALL) == DIM
    }

    pub fn to_document(&self) -> StructureTableDocument {
        let mut entries = Vec::new();
        for a in GeneratorId::ALL {
            for b in GeneratorId::ALL {
                for c in GeneratorId::ALL {
                    let v = self.coefficient(a, b, c);
                    if v != 0 {
                        entries.push(StructureEntry {
                            a,
                            b,
                            c,
                            coefficient: v as i64,
                        });
                    }
                }
            }
        }
        StructureTableDocument {
            basis: "skew-hermitian".into(),
            convention: "[X'_a, X'_b] = sum_c f_ab^c X'_c ; Hermitian form [X_a, X_b] = i sum_c f_ab^c X_c".into(),
            metric_signature: METRIC_SIGNATURE,
            entries,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureEntry {
    pub a: GeneratorId,
    pub b: GeneratorId,
    pub c: GeneratorId,
    pub coefficient: i64,
}

/// JSON export of the structure table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureTableDocument {
    pub basis: String,
    pub convention: String,
    pub metric_signature: [i8; 6],
    pub entries: Vec<StructureEntry>,
}

/// Result of closing a set of seeds under the bracket.
#[derive(Debug, Clone)]
pub struct Closure<T> {
    pub basis: Vec<AlgebraElement<T>>,
    pub dim: usize,
    /// Number of bracket rounds that contributed new directions.
    pub depth: usize,
    /// False if the depth cap was hit before the span stabilized.
    pub converged: bool,
}

/// Incremental exact row-echelon form over the rationals.
#[derive(Debug, Clone, Default)]
struct ExactEchelon {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl ExactEchelon {
    fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let factor = v[*pivot].clone() / row[*pivot].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = x.clone() - factor.clone() * r.clone();
                }
            }
        }
        v
    }

    /// Insert `v` if independent; returns whether the rank grew.
    fn insert(&mut self, v: &[BigRational]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }
}

fn exact_rank(rows: Vec<Vec<BigRational>>) -> usize {
    let mut e = ExactEchelon::default();
    rows.iter().filter(|r| e.insert(r)).count()
}

/// Exact bracket closure of rational seeds.
pub fn generated_subalgebra_exact(seeds: &[AlgebraElement<BigRational>]) -> Closure<BigRational> {
    let table = StructureTable::so42();
    let mut echelon = ExactEchelon::default();
    let mut basis = Vec::new();
    for s in seeds {
        if echelon.insert(s.coeffs()) {
            basis.push(s.clone());
        }
    }
    let mut frontier = basis.clone();
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth == MAX_CLOSURE_DEPTH {
            let dim = basis.len();
            return Closure { basis, dim, depth, converged: false };
        }
        // one round: brackets of the previous round with everything known
        // before it, so `depth` counts nested bracket levels
        let mut fresh = Vec::new();
        for x in &frontier {
            for y in &basis {
                let z = table.bracket(x, y);
                if echelon.insert(z.coeffs()) {
                    fresh.push(z);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        depth += 1;
        basis.extend(fresh.iter().cloned());
        frontier = fresh;
    }
    let dim = basis.len();
    Closure { basis, dim, depth, converged: true }
}

/// Numerical rank of the rows in `vectors`: singular values below
/// `tol * s_max` count as zero.
pub fn numerical_rank(vectors: &[AlgebraElement<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(vectors.len(), DIM, |i, j| vectors[i].coeffs[j]);
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Floating-point bracket closure; rank growth is decided by singular-value
/// ratios against `tol`.
pub fn generated_subalgebra(seeds: &[AlgebraElement<f64>], tol: f64) -> Result<Closure<f64>> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("closure needs at least one seed".into()));
    }
    let table = StructureTable::so42();
    let mut basis: Vec<AlgebraElement<f64>> = Vec::new();
    let try_push = |basis: &mut Vec<AlgebraElement<f64>>, z: AlgebraElement<f64>| -> bool {
        if z.max_abs() == 0.0 {
            return false;
        }
        basis.push(z);
        if numerical_rank(basis, tol) == basis.len() {
            true
        } else {
            basis.pop();
            false
        }
    };
    for s in seeds {
        try_push(&mut basis, s.clone());
    }
    let mut frontier_start = 0;
    let mut depth = 0;
    loop {
        let frontier_end = basis.len();
        if frontier_start == frontier_end {
            break;
        }
        if depth == MAX_CLOSURE_DEPTH {
            let dim = basis.len();
            return Ok(Closure { basis, dim, depth, converged: false });
        }
        for i in frontier_start..frontier_end {
            for j in 0..frontier_end {
                let z = table.bracket(&basis[i], &basis[j]);
                try_push(&mut basis, z);
            }
        }
        if basis.len() == frontier_end {
            break;
        }
        depth += 1;
        frontier_start = frontier_end;
    }
    let dim = basis.len();
    Ok(Closure { basis, dim, depth, converged: true })
}

/// Express `x` in the span of `basis` by least squares; returns the residual
/// max-norm (zero when `x` lies in the span).
pub fn span_residual(basis: &[AlgebraElement<f64>], x: &AlgebraElement<f64>) -> f64 {
    if basis.is_empty() {
        return x.max_abs();
    }
    let m = DMatrix::from_fn(DIM, basis.len(), |i, j| basis[j].coeffs[i]);
    let rhs = nalgebra::DVector::from_fn(DIM, |i, _| x.coeffs[i]);
    let svd = m.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .unwrap_or_else(|_| nalgebra::DVector::zeros(basis.len()));
    (m * sol - rhs).amax()
}

/// Summary of the exact self-consistency checks on the structure table.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraReport {
    pub pairs_checked: usize,
    pub antisymmetry_violations: usize,
    pub jacobi_triples: usize,
    pub jacobi_failures: Vec<[GeneratorId; 3]>,
    pub killing_nondegenerate: bool,
    pub killing_signature: (usize, usize),
    pub seeds: Vec<GeneratorId>,
    pub closure_dim: usize,
    pub closure_depth: usize,
    pub passed: bool,
}

/// Antisymmetry over all ordered pairs, the 455 Jacobi triples `a < b < c`,
/// the Killing form and the closure of `seeds`, all in exact arithmetic.
pub fn verify_algebra(seeds: &[GeneratorId]) -> AlgebraReport {
    let t = StructureTable::so42();
    let mut antisymmetry_violations = 0;
    let mut pairs_checked = 0;
    for a in GeneratorId::ALL {
        for b in GeneratorId::ALL {
            if a.index() < b.index() {
                pairs_checked += 1;
            }
            if t.bracket_generators(a, b) != -t.bracket_generators(b, a) {
                antisymmetry_violations += 1;
            }
        }
    }
    let mut jacobi_triples = 0;
    let mut jacobi_failures = Vec::new();
    for a in 0..DIM {
        for b in a + 1..DIM {
            for c in b + 1..DIM {
                let g = [GeneratorId::ALL[a], GeneratorId::ALL[b], GeneratorId::ALL[c]];
                jacobi_triples += 1;
                if !t.jacobi_defect(g[0], g[1], g[2]).is_zero() {
                    jacobi_failures.push(g);
                }
            }
        }
    }
    let k = t.killing_matrix();
    let km = DMatrix::from_fn(DIM, DIM, |i, j| k[i][j] as f64);
    let eig = km.symmetric_eigen().eigenvalues;
    let killing_signature = (
        eig.iter().filter(|&&x| x > 1e-9).count(),
        eig.iter().filter(|&&x| x < -1e-9).count(),
    );
    let killing_nondegenerate = t.killing_nondegeneracy();
    let closure = generated_subalgebra_exact(&seeds.iter().map(|&g| AlgebraElement::basis(g)).collect::<Vec<_>>());
    let passed = antisymmetry_violations == 0 && jacobi_failures.is_empty() && killing_nondegenerate;
    AlgebraReport {
        pairs_checked,
        antisymmetry_violations,
        jacobi_triples,
        jacobi_failures,
        killing_nondegenerate,
        killing_signature,
        seeds: seeds.to_vec(),
        closure_dim: closure.dim,
        closure_depth: closure.depth,
        passed,
    }
}
