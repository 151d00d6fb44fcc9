//! Dense linear algebra primitives: multi-response least squares via
//! Householder QR, lower Cholesky factorization, and the spectral radius
//! of a square matrix.
//!
//! Everything works on the row-major [`Matrix`] type in plain f64. The
//! routines are written for the small systems this engine deals with
//! (a few dozen rows/columns, companion matrices up to n = 64).

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

/// Relative tolerance for the rank test on the R diagonal of a QR
/// factorization: the factorization is rank deficient when the smallest
/// |r_ii| falls below `RANK_TOL` times the largest.
pub const RANK_TOL: f64 = 1e-10;

/// Relative tolerance for the symmetry check in [`cholesky_lower`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Iteration cap for the QR eigenvalue sweep: at most this many shifted
/// QR steps per eigenvalue before giving up with `NoConvergence`.
pub const MAX_QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(
        "rank deficient: smallest R diagonal {smallest:.6e} is below {RANK_TOL:e} x largest {largest:.6e}"
    )]
    RankDeficient { smallest: f64, largest: f64 },
    #[error("matrix is not symmetric within {SYMMETRY_TOL:e} relative")]
    NotSymmetric,
    #[error("matrix is not positive definite: pivot {pivot:.6e} at column {column}")]
    NotPositiveDefinite { column: usize, pivot: f64 },
    #[error("eigenvalue iteration did not converge within {0} QR steps for one eigenvalue")]
    NoConvergence(usize),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Dense row-major matrix of finite f64 entries.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, validating the shape and
    /// that every entry is finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(NumericsError::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(NumericsError::ShapeMismatch("empty row list".into()));
        }
        let cols = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(NumericsError::ShapeMismatch(format!(
                "ragged rows: expected {cols} columns, found {}",
                r.len()
            )));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    /// Column vector from a slice.
    pub fn column(values: &[f64]) -> Result<Self, NumericsError> {
        Matrix::new(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Matrix product; panics on inner-dimension mismatch (internal contract).
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul inner dimensions: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shapes");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Least-squares solution B of min ‖Y − XB‖_F by Householder QR, one
/// right-hand-side column at a time. `x` is T×k with T ≥ k, `y` is T×m;
/// the result is k×m.
///
/// The factorization is rejected as rank deficient when the smallest
/// |r_ii| on the R diagonal drops below [`RANK_TOL`] times the largest,
/// so exactly collinear regressors fail loudly instead of producing
/// unstable coefficients.
pub fn least_squares(x: &Matrix, y: &Matrix) -> Result<Matrix, NumericsError> {
    let t = x.rows();
    let k = x.cols();
    let m = y.cols();
    if y.rows() != t {
        return Err(NumericsError::ShapeMismatch(format!(
            "X has {t} rows but Y has {}",
            y.rows()
        )));
    }
    if t < k {
        return Err(NumericsError::ShapeMismatch(format!(
            "need at least as many rows as columns: {t} rows, {k} columns"
        )));
    }

    let mut a = x.clone();
    let mut b = y.clone();

    // Householder triangularization of A, reflectors applied to B as we go.
    for j in 0..k {
        // norm of the active part of column j
        let mut norm = 0.0_f64;
        for i in j..t {
            norm = norm.hypot(a[(i, j)]);
        }
        if norm == 0.0 {
            // column identically zero below: R diagonal entry is zero
            continue;
        }
        let alpha = if a[(j, j)] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; t - j];
        v[0] = a[(j, j)] - alpha;
        for i in j + 1..t {
            v[i - j] = a[(i, j)];
        }
        let vtv: f64 = v.iter().map(|w| w * w).sum();
        a[(j, j)] = alpha;
        for i in j + 1..t {
            a[(i, j)] = 0.0;
        }
        if vtv == 0.0 {
            continue;
        }
        // apply H = I - 2 v v^T / (v^T v) to the trailing columns of A
        for c in j + 1..k {
            let mut dot = 0.0;
            for i in j..t {
                dot += v[i - j] * a[(i, c)];
            }
            let s = 2.0 * dot / vtv;
            for i in j..t {
                a[(i, c)] -= s * v[i - j];
            }
        }
        // and to every column of B
        for c in 0..m {
            let mut dot = 0.0;
            for i in j..t {
                dot += v[i - j] * b[(i, c)];
            }
            let s = 2.0 * dot / vtv;
            for i in j..t {
                b[(i, c)] -= s * v[i - j];
            }
        }
    }

    // rank check on the R diagonal
    let mut smallest = f64::INFINITY;
    let mut largest = 0.0_f64;
    for j in 0..k {
        let d = a[(j, j)].abs();
        smallest = smallest.min(d);
        largest = largest.max(d);
    }
    if smallest < RANK_TOL * largest || largest == 0.0 {
        return Err(NumericsError::RankDeficient { smallest, largest });
    }

    // back-substitution R * B = Q^T Y (top k rows of the transformed B)
    let mut out = Matrix::zeros(k, m);
    for c in 0..m {
        for i in (0..k).rev() {
            let mut s = b[(i, c)];
            for j in i + 1..k {
                s -= a[(i, j)] * out[(j, c)];
            }
            out[(i, c)] = s / a[(i, i)];
        }
    }
    Ok(out)
}

/// Lower Cholesky factor P of a symmetric positive definite matrix,
/// so that P Pᵀ = S. The upper triangle of the result is identically
/// zero and the diagonal strictly positive.
pub fn cholesky_lower(s: &Matrix) -> Result<Matrix, NumericsError> {
    if !s.is_square() {
        return Err(NumericsError::ShapeMismatch(format!(
            "Cholesky needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let scale = s.max_abs();
    for i in 0..n {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(NumericsError::NotSymmetric);
            }
        }
    }

    let mut p = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= p[(j, k)] * p[(j, k)];
        }
        if d <= 0.0 {
            return Err(NumericsError::NotPositiveDefinite { column: j, pivot: d });
        }
        let diag = d.sqrt();
        p[(j, j)] = diag;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= p[(i, k)] * p[(j, k)];
            }
            p[(i, j)] = v / diag;
        }
    }
    Ok(p)
}

/// Largest eigenvalue modulus of a square matrix.
///
/// Householder reduction to upper Hessenberg form followed by the Francis
/// double-shift QR sweep (the classic EISPACK `hqr` scheme), so complex
/// conjugate pairs are handled in real arithmetic. Accuracy is well within
/// the 1e-8 contract for the n ≤ 64 matrices the engine produces.
pub fn spectral_radius(m: &Matrix) -> Result<f64, NumericsError> {
    if !m.is_square() {
        return Err(NumericsError::ShapeMismatch(format!(
            "spectral radius needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let eig = eigenvalues(m)?;
    Ok(eig
        .iter()
        .map(|(re, im)| re.hypot(*im))
        .fold(0.0, f64::max))
}

/// All eigenvalues of a square matrix as (re, im) pairs.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<(f64, f64)>, NumericsError> {
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    hqr_eigenvalues(&mut h)
}

/// Householder similarity reduction to upper Hessenberg form, in place.
fn hessenberg_in_place(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for j in 0..n - 2 {
        let mut norm = 0.0_f64;
        for i in j + 1..n {
            norm = norm.hypot(a[(i, j)]);
        }
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[(j + 1, j)] > 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - j - 1];
        v[0] = a[(j + 1, j)] - alpha;
        for i in j + 2..n {
            v[i - j - 1] = a[(i, j)];
        }
        let vtv: f64 = v.iter().map(|w| w * w).sum();
        if vtv == 0.0 {
            continue;
        }
        a[(j + 1, j)] = alpha;
        for i in j + 2..n {
            a[(i, j)] = 0.0;
        }
        // left multiply rows j+1.. on columns j+1..
        for c in j + 1..n {
            let mut dot = 0.0;
            for i in j + 1..n {
                dot += v[i - j - 1] * a[(i, c)];
            }
            let s = 2.0 * dot / vtv;
            for i in j + 1..n {
                a[(i, c)] -= s * v[i - j - 1];
            }
        }
        // right multiply columns j+1.. on all rows
        for r in 0..n {
            let mut dot = 0.0;
            for c in j + 1..n {
                dot += a[(r, c)] * v[c - j - 1];
            }
            let s = 2.0 * dot / vtv;
            for c in j + 1..n {
                a[(r, c)] -= s * v[c - j - 1];
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis double-shift
/// QR iteration. Destroys `a`. Returns (re, im) pairs.
fn hqr_eigenvalues(a: &mut Matrix) -> Result<Vec<(f64, f64)>, NumericsError> {
    let n = a.rows();
    let mut eig = Vec::with_capacity(n);
    let eps = f64::EPSILON;

    let mut anorm = 0.0_f64;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        // zero matrix
        return Ok(vec![(0.0, 0.0); n]);
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0_f64; // accumulated exceptional shifts
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let mut s = a[(l as usize - 1, l as usize - 1)].abs()
                    + a[(l as usize, l as usize)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l as usize, l as usize - 1)].abs() <= eps * s {
                    a[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nn as usize, nn as usize)];
            if l == nn {
                // one real eigenvalue found
                eig.push((x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[(nn as usize - 1, nn as usize - 1)];
            let w = a[(nn as usize, nn as usize - 1)] * a[(nn as usize - 1, nn as usize)];
            if l == nn - 1 {
                // a 2x2 block: real pair or complex conjugate pair
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x_sh = x + t;
                if q >= 0.0 {
                    let z = p + if p >= 0.0 { z } else { -z };
                    eig.push((x_sh + z, 0.0));
                    eig.push((if z != 0.0 { x_sh - w / z } else { x_sh + z }, 0.0));
                } else {
                    eig.push((x_sh + p, z));
                    eig.push((x_sh + p, -z));
                }
                nn -= 2;
                break;
            }
            // no convergence yet: one double-shift QR step
            if its == MAX_QR_ITERATIONS_PER_EIGENVALUE {
                return Err(NumericsError::NoConvergence(
                    MAX_QR_ITERATIONS_PER_EIGENVALUE,
                ));
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 || its == 30 || its == 40 || its == 50 {
                // exceptional shift
                t += x;
                for i in 0..=nn as usize {
                    a[(i, i)] -= x;
                }
                let s = a[(nn as usize, nn as usize - 1)].abs()
                    + a[(nn as usize - 1, nn as usize - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // find two consecutive small subdiagonals
            let mut mfound = l;
            let (mut p, mut q, mut r) = (0.0_f64, 0.0_f64, 0.0_f64);
            let mut mm = nn - 2;
            while mm >= l {
                let mu = mm as usize;
                let z = a[(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(mu + 1, mu)] + a[(mu, mu + 1)];
                q = a[(mu + 1, mu + 1)] - z - rr - ss;
                r = a[(mu + 2, mu + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    mfound = mm;
                    break;
                }
                let u = a[(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a[(mu - 1, mu - 1)].abs() + z.abs() + a[(mu + 1, mu + 1)].abs());
                if u <= eps * v {
                    mfound = mm;
                    break;
                }
                mm -= 1;
            }
            let m = mfound as usize;
            for i in m + 2..=nn as usize {
                a[(i, i - 2)] = 0.0;
            }
            for i in m + 3..=nn as usize {
                a[(i, i - 3)] = 0.0;
            }
            // double QR sweep over rows l..nn
            for k in m..nn as usize {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nn as usize - 1 {
                        a[(k + 2, k - 1)]
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s0 = (p * p + q * q + r * r).sqrt();
                let s = if p >= 0.0 { s0 } else { -s0 };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m as isize {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in k..=nn as usize {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k != nn as usize - 1 {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * z;
                    }
                    a[(k + 1, j)] -= pp * y;
                    a[(k, j)] -= pp * x;
                }
                // column modification
                let upper = if (nn as usize) < k + 3 { nn as usize } else { k + 3 };
                for i in l as usize..=upper {
                    let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                    if k != nn as usize - 1 {
                        pp += z * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
        }
    }
    Ok(eig)
}
