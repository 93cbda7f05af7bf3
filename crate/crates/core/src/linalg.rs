//! Dense linear algebra for the closed-form ridge fit.
//!
//! The regularized normal-equation matrix `A = XᵀX + λI` is factored once by
//! Cholesky inside a [`RidgeCertifier`]; the weights θ, the per-point influence
//! vectors `z = xᵀA⁻¹Xᵀ` and the full coefficient map `C = A⁻¹Xᵀ` all reuse that
//! factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::config::Tolerances;
use crate::error::{check_len, Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_len("matrix row", cols, r.as_ref().len())?;
            data.extend_from_slice(r.as_ref());
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    /// `M v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec", self.cols, v.len())?;
        Ok(self.iter_rows().map(|r| dot(r, v)).collect())
    }

    /// `Mᵀ v`.
    pub fn t_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("t_matvec", self.rows, v.len())?;
        let mut out = vec![0.0; self.cols];
        for (r, &vi) in self.iter_rows().zip(v) {
            if vi != 0.0 {
                axpy(vi, r, &mut out);
            }
        }
        Ok(out)
    }

    /// `MᵀM`, accumulated row by row and skipping zero entries, which keeps
    /// sparse image features cheap.
    pub fn gram(&self) -> Matrix {
        let d = self.cols;
        let mut g = Matrix::zeros(d, d);
        for r in self.iter_rows() {
            for (a, &ra) in r.iter().enumerate() {
                if ra != 0.0 {
                    axpy(ra, &r[a..], &mut g.data[a * d + a..(a + 1) * d]);
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g.data[a * d + b] = g.data[b * d + a];
            }
        }
        g
    }

    /// Rows selected by `idx`, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabelKind {
    Regression,
    /// Labels are exactly `-1.0` or `+1.0`.
    Binary,
}

/// A training set: `n × d` features and `n` labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<f64>,
    kind: LabelKind,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<f64>, kind: LabelKind) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::InvalidDataset("no rows"));
        }
        if features.cols() == 0 {
            return Err(Error::InvalidDataset("no feature columns"));
        }
        check_len("labels", features.rows(), labels.len())?;
        if kind == LabelKind::Binary && labels.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidDataset("binary labels must be -1 or +1"));
        }
        Ok(Dataset {
            features,
            labels,
            kind,
        })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn select(&self, idx: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.features.select_rows(idx),
            idx.iter().map(|&i| self.labels[i]).collect(),
            self.kind,
        )
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Returns `None` if a pivot is not strictly positive.
    pub fn factor(a: &Matrix) -> Option<Self> {
        let n = a.rows();
        let mut l = a.data.clone();
        for j in 0..n {
            let (head, tail) = l.split_at_mut(j * n);
            let row_j = &mut tail[..n];
            for i in 0..j {
                let row_i = &head[i * n..i * n + n];
                let s = row_j[i] - dot(&row_i[..i], &row_j[..i]);
                row_j[i] = s / row_i[i];
            }
            let diag = row_j[j] - dot(&row_j[..j], &row_j[..j]);
            if diag.is_nan() || diag <= 0.0 {
                return None;
            }
            row_j[j] = libm::sqrt(diag);
            for v in &mut row_j[j + 1..] {
                *v = 0.0;
            }
        }
        Some(Cholesky { n, l })
    }

    /// Cheap reciprocal condition estimate, `(min Lᵢᵢ / max Lᵢᵢ)²`.
    pub fn rcond_estimate(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..self.n {
            let v = self.l[i * self.n + i];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let r = lo / hi;
        r * r
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            b[i] = (b[i] - dot(row, &b[..i])) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i] * bk;
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Fitted ridge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    pub theta: Vec<f64>,
    pub lambda: f64,
}

impl RidgeModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_len("test point", self.theta.len(), x.len())?;
        Ok(dot(&self.theta, x))
    }
}

/// `z = xᵀ(XᵀX + λI)⁻¹Xᵀ`: the prediction at `x` as a linear functional of the
/// training labels.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceVector {
    pub z: Vec<f64>,
    /// `z · y` on the unmodified labels.
    pub base_prediction: f64,
}

impl InfluenceVector {
    /// Wraps a raw functional, computing the base prediction against `labels`.
    pub fn from_weights(z: Vec<f64>, labels: &[f64]) -> Result<Self> {
        check_len("influence weights", z.len(), labels.len())?;
        let base_prediction = dot(&z, labels);
        Ok(InfluenceVector { z, base_prediction })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn apply(&self, labels: &[f64]) -> f64 {
        dot(&self.z, labels)
    }
}

/// `C = (XᵀX + λI)⁻¹Xᵀ`, a `d × n` matrix with `C y = θ`. Row `i` is the
/// influence functional of weight coordinate `θᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMap {
    pub c: Matrix,
}

impl CoefficientMap {
    /// Uses an arbitrary `d × n` matrix as the coefficient map.
    pub fn from_matrix(c: Matrix) -> Self {
        CoefficientMap { c }
    }

    pub fn apply(&self, labels: &[f64]) -> Result<Vec<f64>> {
        self.c.matvec(labels)
    }

    pub fn row_functional(&self, i: usize, labels: &[f64]) -> Result<InfluenceVector> {
        InfluenceVector::from_weights(self.c.row(i).to_vec(), labels)
    }
}

/// One factorization of `XᵀX + λI` for a fixed training set, shared by every
/// query against it.
#[derive(Clone, Debug)]
pub struct RidgeCertifier<'a> {
    data: &'a Dataset,
    lambda: f64,
    factor: Cholesky,
    theta: Vec<f64>,
}

impl<'a> RidgeCertifier<'a> {
    pub fn new(data: &'a Dataset, lambda: f64) -> Result<Self> {
        Self::with_gram(data, lambda, &data.features.gram())
    }

    /// Like [`new`](Self::new) with a precomputed `XᵀX`, so sweeps over λ
    /// pay for the Gram matrix once.
    pub fn with_gram(data: &'a Dataset, lambda: f64, gram: &Matrix) -> Result<Self> {
        Self::with_tolerances(data, lambda, gram, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(
        data: &'a Dataset,
        lambda: f64,
        gram: &Matrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::NegativeLambda(lambda));
        }
        let d = data.d();
        check_len("gram matrix rows", d, gram.rows())?;
        check_len("gram matrix cols", d, gram.cols())?;
        let mut a = gram.clone();
        for i in 0..d {
            a[(i, i)] += lambda;
        }
        let factor = Cholesky::factor(&a).ok_or(Error::SingularSystem { rcond: 0.0 })?;
        if lambda == 0.0 {
            let rcond = factor.rcond_estimate();
            if rcond < tol.singular_rcond {
                return Err(Error::SingularSystem { rcond });
            }
        }
        let theta = factor.solve(&data.features.t_matvec(&data.labels)?);
        Ok(RidgeCertifier {
            data,
            lambda,
            factor,
            theta,
        })
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn model(&self) -> RidgeModel {
        RidgeModel {
            theta: self.theta.clone(),
            lambda: self.lambda,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        check_len("test point", self.data.d(), x.len())?;
        Ok(dot(&self.theta, x))
    }

    /// `z = X (A⁻¹ x)`, which equals `xᵀA⁻¹Xᵀ` since `A` is symmetric.
    pub fn influence(&self, x: &[f64]) -> Result<InfluenceVector> {
        check_len("test point", self.data.d(), x.len())?;
        let w = self.factor.solve(x);
        let z = self.data.features.matvec(&w)?;
        InfluenceVector::from_weights(z, &self.data.labels)
    }

    pub fn coefficient_map(&self) -> CoefficientMap {
        let (n, d) = (self.data.n(), self.data.d());
        let mut c = Matrix::zeros(d, n);
        let mut e = vec![0.0; d];
        for i in 0..d {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[i] = 1.0;
            self.factor.solve_in_place(&mut e);
            for (j, r) in self.data.features.iter_rows().enumerate() {
                c[(i, j)] = dot(r, &e);
            }
        }
        CoefficientMap { c }
    }
}

pub fn fit_ridge(data: &Dataset, lambda: f64) -> Result<RidgeModel> {
    RidgeCertifier::new(data, lambda).map(|c| c.model())
}

pub fn influence(data: &Dataset, lambda: f64, x: &[f64]) -> Result<InfluenceVector> {
    RidgeCertifier::new(data, lambda)?.influence(x)
}

pub fn coefficient_map(data: &Dataset, lambda: f64) -> Result<CoefficientMap> {
    Ok(RidgeCertifier::new(data, lambda)?.coefficient_map())
}
