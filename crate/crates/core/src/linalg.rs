//! Complex operator matrices shared by the representation, controllability
//! and simulator modules.
//!
//! Storage is dense up to a few hundred basis states and row-sparse above
//! that. Symmetry tags are only ever attached after the corresponding check
//! has passed.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;

/// Largest dimension stored densely (n_max = 10 gives 385 states).
pub const DENSE_LIMIT: usize = 385;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryTag {
    Hermitian,
    SkewHermitian,
    Unitary,
    None,
}

/// Row-major sparse matrix; each row holds `(col, value)` sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            *acc[r].entry(c).or_insert(C64::new(0.0, 0.0)) += v;
        }
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| v.norm() != 0.0).collect())
            .collect();
        SparseMatrix { dim, rows }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    fn matmul(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut rows = Vec::with_capacity(self.dim);
        for row in &self.rows {
            let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    *acc.entry(c).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
            rows.push(acc.into_iter().filter(|(_, v)| v.norm() != 0.0).collect());
        }
        SparseMatrix { dim: self.dim, rows }
    }

    fn combine(&self, other: &SparseMatrix, alpha: C64, beta: C64) -> SparseMatrix {
        let t = self
            .triplets()
            .map(|(r, c, v)| (r, c, alpha * v))
            .chain(other.triplets().map(|(r, c, v)| (r, c, beta * v)));
        SparseMatrix::from_triplets(self.dim, t)
    }

    fn apply(&self, v: &CVector) -> CVector {
        CVector::from_iterator(
            self.dim,
            self.rows
                .iter()
                .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum::<C64>()),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(CMatrix),
    Sparse(SparseMatrix),
}

/// A square complex matrix over the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    storage: Storage,
    tag: SymmetryTag,
}

impl OperatorMatrix {
    pub fn from_dense(m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator matrices are square");
        OperatorMatrix {
            storage: Storage::Dense(m),
            tag: SymmetryTag::None,
        }
    }

    /// Build from `(row, col, value)` entries; dense when `dim <= DENSE_LIMIT`.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let sparse = SparseMatrix::from_triplets(dim, triplets);
        let storage = if dim <= DENSE_LIMIT {
            Storage::Dense(sparse.to_dense())
        } else {
            Storage::Sparse(sparse)
        };
        OperatorMatrix {
            storage,
            tag: SymmetryTag::None,
        }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        Self::from_triplets(values.len(), values.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_triplets(dim, std::iter::empty())
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(m) => m.nrows(),
            Storage::Sparse(s) => s.dim,
        }
    }

    pub fn tag(&self) -> SymmetryTag {
        self.tag
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn dense(&self) -> Cow<'_, CMatrix> {
        match &self.storage {
            Storage::Dense(m) => Cow::Borrowed(m),
            Storage::Sparse(s) => Cow::Owned(s.to_dense()),
        }
    }

    pub fn into_dense(self) -> CMatrix {
        match self.storage {
            Storage::Dense(m) => m,
            Storage::Sparse(s) => s.to_dense(),
        }
    }

    fn sparse(&self) -> Cow<'_, SparseMatrix> {
        match &self.storage {
            Storage::Sparse(s) => Cow::Borrowed(s),
            Storage::Dense(m) => {
                let dim = m.nrows();
                Cow::Owned(SparseMatrix::from_triplets(
                    dim,
                    (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).filter_map(|(r, c)| {
                        let v = m[(r, c)];
                        (v.norm() != 0.0).then_some((r, c, v))
                    }),
                ))
            }
        }
    }

    /// Nonzero entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        self.sparse().triplets().collect()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m[(r, c)],
            Storage::Sparse(s) => s.rows[r]
                .binary_search_by_key(&c, |&(k, _)| k)
                .map(|i| s.rows[r][i].1)
                .unwrap_or(C64::new(0.0, 0.0)),
        }
    }

    fn untagged(storage: Storage) -> Self {
        OperatorMatrix {
            storage,
            tag: SymmetryTag::None,
        }
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Sparse(s) => Storage::Sparse(SparseMatrix::from_triplets(
                s.dim,
                s.triplets().map(|(r, c, v)| (c, r, v.conj())),
            )),
        };
        OperatorMatrix { storage, tag: self.tag }
    }

    pub fn scale(&self, a: C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(m * a),
            Storage::Sparse(s) => {
                Storage::Sparse(SparseMatrix::from_triplets(s.dim, s.triplets().map(|(r, c, v)| (r, c, a * v))))
            }
        };
        Self::untagged(storage)
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: C64, other: &Self, beta: C64) -> Self {
        self.check_dim(other.dim()).expect("dimension mismatch in lin_comb");
        match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => Self::untagged(Storage::Dense(a * alpha + b * beta)),
            _ => Self::untagged(Storage::Sparse(self.sparse().combine(&other.sparse(), alpha, beta))),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        self.check_dim(other.dim()).expect("dimension mismatch in matmul");
        match (&self.storage, &other.storage) {
            (Storage::Dense(a), Storage::Dense(b)) => Self::untagged(Storage::Dense(a * b)),
            _ => Self::untagged(Storage::Sparse(self.sparse().matmul(&other.sparse()))),
        }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match &self.storage {
            Storage::Dense(m) => m * v,
            Storage::Sparse(s) => s.apply(v),
        }
    }

    /// Entry-wise transform `(row, col, value) -> value'` preserving sparsity.
    pub fn map_entries(&self, f: impl Fn(usize, usize, C64) -> C64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(m) => Storage::Dense(CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| f(r, c, m[(r, c)]))),
            Storage::Sparse(s) => {
                Storage::Sparse(SparseMatrix::from_triplets(s.dim, s.triplets().map(|(r, c, v)| (r, c, f(r, c, v)))))
            }
        };
        Self::untagged(storage)
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_in_block(self.dim())
    }

    /// Max-norm of the leading `k × k` block.
    pub fn max_abs_in_block(&self, k: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.view((0, 0), (k, k)).iter().fold(0.0, |a, v| a.max(v.norm())),
            Storage::Sparse(s) => s
                .triplets()
                .filter(|&(r, c, _)| r < k && c < k)
                .fold(0.0, |a, (_, _, v)| a.max(v.norm())),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn skew_defect(&self) -> f64 {
        self.add(&self.adjoint()).max_abs()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .sub(&OperatorMatrix::identity(self.dim()))
            .max_abs()
    }

    /// Attach `tag` after verifying it.
    pub fn with_verified_tag(mut self, tag: SymmetryTag) -> Result<Self> {
        let (defect, tol, what) = match tag {
            SymmetryTag::Hermitian => (self.hermiticity_defect(), HERMITIAN_TOL, "Hermitian"),
            SymmetryTag::SkewHermitian => (self.skew_defect(), HERMITIAN_TOL, "skew-Hermitian"),
            SymmetryTag::Unitary => (self.unitarity_defect(), UNITARY_TOL, "unitary"),
            SymmetryTag::None => (0.0, 0.0, ""),
        };
        if defect > tol {
            return Err(Error::Symmetry(format!("matrix is not {what}: defect {defect:.3e} > {tol:.0e}")));
        }
        self.tag = tag;
        Ok(self)
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }

    pub fn to_document(&self) -> MatrixDocument {
        MatrixDocument {
            dim: self.dim(),
            symmetry: self.tag,
            triplets: self.triplets().into_iter().map(|(r, c, v)| (r, c, v.re, v.im)).collect(),
        }
    }

    /// CSV with header `row,col,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for (r, c, v) in self.triplets() {
            let _ = writeln!(out, "{r},{c},{:e},{:e}", v.re, v.im);
        }
        out
    }
}

/// JSON export: dimension and `(row, col, re, im)` triplets.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDocument {
    pub dim: usize,
    pub symmetry: SymmetryTag,
    pub triplets: Vec<(usize, usize, f64, f64)>,
}

impl MatrixDocument {
    pub fn to_operator(&self) -> OperatorMatrix {
        OperatorMatrix::from_triplets(
            self.dim,
            self.triplets.iter().map(|&(r, c, re, im)| (r, c, C64::new(re, im))),
        )
    }
}

pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
