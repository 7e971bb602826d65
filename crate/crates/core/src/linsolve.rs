//! Sparse symmetric/unsymmetric direct solvers and condition estimation.
//!
//! Systems assembled on the structured background grids here have small
//! bandwidth under the grid-ordered dof numbering, so the factorizations
//! use banded storage: LDLT (no pivoting) for symmetric matrices and LU
//! with partial pivoting for the unsymmetric transport systems. Solutions
//! are polished with iterative refinement against the original matrix and
//! checked against a residual tolerance.

use thiserror::Error;

/// Relative residual every solve must reach.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dimension mismatch: matrix is {n}x{n}, vector has length {len}")]
    DimensionMismatch { n: usize, len: usize },
    #[error("singular matrix: {zero_pivots} zero pivot(s), first at index {first} (estimated rank deficiency {zero_pivots})")]
    Singular { zero_pivots: usize, first: usize },
    #[error("relative residual {residual:.3e} exceeds {tol:.3e} after iterative refinement")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("eigenvalue estimate did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("condition estimate requires a symmetric matrix (defect {0:.3e})")]
    NotSymmetric(f64),
}

/// Unstructured triplet accumulator used by all assembly routines.
/// Duplicate entries are summed when converting to compressed storage.
#[derive(Debug, Clone)]
pub struct TripletMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        TripletMatrix { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        if value != 0.0 {
            self.entries.push((row, col, value));
        }
    }

    pub fn add_scaled(&mut self, other: &TripletMatrix, scale: f64) {
        assert_eq!(self.n, other.n);
        self.entries
            .extend(other.entries.iter().map(|&(i, j, v)| (i, j, scale * v)));
    }

    /// Sums duplicates into compressed sparse row storage.
    pub fn to_csr(&self) -> CsrMatrix {
        let mut entries = self.entries.clone();
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut row_of: Vec<usize> = Vec::with_capacity(entries.len());
        for &(i, j, v) in &entries {
            if let (Some(&last_row), Some(&last_col)) = (row_of.last(), cols.last()) {
                if last_row == i && last_col == j {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            row_of.push(i);
            cols.push(j);
            vals.push(v);
        }
        let mut row_ptr = vec![0usize; self.n + 1];
        for &i in &row_of {
            row_ptr[i + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

/// Compressed sparse row matrix with sorted, duplicate-free columns per row.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// max |A - A^T| over all entries.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                let a_ij = self.vals[k];
                let a_ji = self.get(j, i);
                defect = defect.max((a_ij - a_ji).abs());
            }
        }
        defect
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.cols[lo..hi].binary_search(&j) {
            Ok(pos) => self.vals[lo + pos],
            Err(_) => 0.0,
        }
    }

    /// (lower, upper) bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0usize;
        let mut ku = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k])] = self.vals[k];
            }
        }
        m
    }
}

/// Banded LDL^T factorization of a symmetric matrix (no pivoting).
pub struct LdltFactor {
    n: usize,
    band: usize,
    /// Column-major band storage: column j holds L(j..=j+band, j), diagonal
    /// entry replaced by D(j,j).
    data: Vec<f64>,
    negative_pivots: usize,
}

impl LdltFactor {
    pub fn negative_pivots(&self) -> usize {
        self.negative_pivots
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * (self.band + 1) + (i - j)]
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let m = self.band;
        // L y = b
        for j in 0..n {
            let xj = x[j];
            if xj != 0.0 {
                for i in (j + 1)..=(j + m).min(n - 1) {
                    x[i] -= self.at(i, j) * xj;
                }
            }
        }
        // D z = y
        for j in 0..n {
            x[j] /= self.at(j, j);
        }
        // L^T x = z
        for j in (0..n).rev() {
            let mut acc = x[j];
            for i in (j + 1)..=(j + m).min(n - 1) {
                acc -= self.at(i, j) * x[i];
            }
            x[j] = acc;
        }
    }
}

/// Factors a symmetric matrix. Pivots below `max_abs * 1e-300` count as zero.
pub fn factor_ldlt(a: &CsrMatrix) -> Result<LdltFactor, SolveError> {
    let n = a.n;
    let (kl, ku) = a.bandwidths();
    let m = kl.max(ku);
    let stride = m + 1;
    let mut data = vec![0.0f64; n * stride];
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.cols[k];
            if i >= j {
                data[j * stride + (i - j)] = a.vals[k];
            }
        }
    }
    let tiny = f64::MIN_POSITIVE;
    let mut negative_pivots = 0usize;
    let mut zero_pivots = 0usize;
    let mut first_zero = 0usize;
    for j in 0..n {
        // d_j = a_jj - sum L_jk^2 d_k
        let mut d = data[j * stride];
        let k0 = j.saturating_sub(m);
        for k in k0..j {
            let ljk = data[k * stride + (j - k)];
            d -= ljk * ljk * data[k * stride];
        }
        if d.abs() < tiny || !d.is_finite() {
            if zero_pivots == 0 {
                first_zero = j;
            }
            zero_pivots += 1;
            data[j * stride] = tiny;
            continue;
        }
        if d < 0.0 {
            negative_pivots += 1;
        }
        data[j * stride] = d;
        for i in (j + 1)..=(j + m).min(n - 1) {
            let mut acc = data[j * stride + (i - j)];
            let k0 = i.saturating_sub(m);
            for k in k0..j {
                acc -= data[k * stride + (i - k)] * data[k * stride + (j - k)] * data[k * stride];
            }
            data[j * stride + (i - j)] = acc / d;
        }
    }
    if zero_pivots > 0 {
        return Err(SolveError::Singular { zero_pivots, first: first_zero });
    }
    Ok(LdltFactor { n, band: m, data, negative_pivots })
}

/// Banded LU factorization with partial pivoting.
pub struct LuFactor {
    n: usize,
    kl: usize,
    /// Working upper bandwidth `ku + kl` (fill from pivoting).
    kw: usize,
    /// Column-major band storage; column j holds rows j-kw ..= j+kl.
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl LuFactor {
    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.kw + self.kl + 1) + (i + self.kw - j)
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        // P and L
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                x.swap(p, j);
            }
            let xj = x[j];
            if xj != 0.0 {
                for i in (j + 1)..=(j + self.kl).min(n - 1) {
                    x[i] -= self.at(i, j) * xj;
                }
            }
        }
        // U
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..=(i + self.kw).min(n - 1) {
                acc -= self.at(i, j) * x[j];
            }
            x[i] = acc / self.at(i, i);
        }
    }
}

pub fn factor_lu(a: &CsrMatrix) -> Result<LuFactor, SolveError> {
    let n = a.n;
    let (kl, ku) = a.bandwidths();
    let kw = (ku + kl).min(n.saturating_sub(1));
    let stride = kw + kl + 1;
    let mut data = vec![0.0f64; n * stride];
    let idx = |i: usize, j: usize| j * stride + (i + kw - j);
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            data[idx(i, a.cols[k])] = a.vals[k];
        }
    }
    let mut pivots = vec![0usize; n];
    let mut zero_pivots = 0usize;
    let mut first_zero = 0usize;
    for j in 0..n {
        // pivot search in column j, rows j..=j+kl
        let hi = (j + kl).min(n - 1);
        let mut p = j;
        let mut best = data[idx(j, j)].abs();
        for i in (j + 1)..=hi {
            let v = data[idx(i, j)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        pivots[j] = p;
        if best < f64::MIN_POSITIVE || !best.is_finite() {
            if zero_pivots == 0 {
                first_zero = j;
            }
            zero_pivots += 1;
            data[idx(j, j)] = f64::MIN_POSITIVE;
            continue;
        }
        if p != j {
            // swap rows p and j over columns j..=j+kw (within band of both)
            for c in j..=(j + kw).min(n - 1) {
                data.swap(idx(p, c), idx(j, c));
            }
        }
        let piv = data[idx(j, j)];
        for i in (j + 1)..=hi {
            let l = data[idx(i, j)] / piv;
            data[idx(i, j)] = l;
            if l != 0.0 {
                for c in (j + 1)..=(j + kw).min(n - 1) {
                    let u = data[idx(j, c)];
                    if u != 0.0 {
                        data[idx(i, c)] -= l * u;
                    }
                }
            }
        }
    }
    if zero_pivots > 0 {
        return Err(SolveError::Singular { zero_pivots, first: first_zero });
    }
    Ok(LuFactor { n, kl, kw, data, pivots })
}

/// A factorization of either kind together with the original matrix,
/// reusable for repeated right-hand sides.
pub enum Factorization {
    Ldlt(LdltFactor),
    Lu(LuFactor),
}

pub struct FactoredMatrix {
    pub matrix: CsrMatrix,
    factor: Factorization,
}

impl FactoredMatrix {
    /// Factors `a`, choosing LDLT for symmetric input and LU otherwise.
    /// A symmetric matrix that defeats unpivoted LDLT falls back to LU.
    pub fn new(a: CsrMatrix) -> Result<Self, SolveError> {
        let defect = a.symmetry_defect();
        let scale = a.max_abs().max(1.0);
        let factor = if defect <= 1e-10 * scale {
            match factor_ldlt(&a) {
                Ok(f) => Factorization::Ldlt(f),
                Err(_) => Factorization::Lu(factor_lu(&a)?),
            }
        } else {
            Factorization::Lu(factor_lu(&a)?)
        };
        Ok(FactoredMatrix { matrix: a, factor })
    }

    fn raw_solve(&self, x: &mut [f64]) {
        match &self.factor {
            Factorization::Ldlt(f) => f.solve_in_place(x),
            Factorization::Lu(f) => f.solve_in_place(x),
        }
    }

    /// Solves with iterative refinement. The residual must reach
    /// `RESIDUAL_TOL` relative to `|b| + |A| |x|`; for well-conditioned
    /// systems this coincides with the plain relative residual, while for
    /// ill-conditioned ones it is the backward-error criterion a direct
    /// solver can actually meet.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        let n = self.matrix.n;
        if b.len() != n {
            return Err(SolveError::DimensionMismatch { n, len: b.len() });
        }
        let norm_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm_b == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let row_sum_norm = {
            let mut m = 0.0f64;
            for i in 0..n {
                let s: f64 = (self.matrix.row_ptr[i]..self.matrix.row_ptr[i + 1])
                    .map(|k| self.matrix.vals[k].abs())
                    .sum();
                m = m.max(s);
            }
            m
        };
        let mut x = b.to_vec();
        self.raw_solve(&mut x);
        let mut residual = vec![0.0; n];
        let mut norm_r = f64::INFINITY;
        for pass in 0..4 {
            self.matrix.matvec(&x, &mut residual);
            for i in 0..n {
                residual[i] = b[i] - residual[i];
            }
            norm_r = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if norm_r <= 1e-13 * norm_b || pass == 3 {
                break;
            }
            let mut dx = residual.clone();
            self.raw_solve(&mut dx);
            for i in 0..n {
                x[i] += dx[i];
            }
        }
        let norm_x = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let scale = norm_b + row_sum_norm * norm_x;
        let rel = norm_r / scale.max(f64::MIN_POSITIVE);
        if rel > RESIDUAL_TOL || !norm_x.is_finite() {
            return Err(SolveError::ResidualTooLarge { residual: rel, tol: RESIDUAL_TOL });
        }
        Ok(x)
    }

    pub fn negative_pivots(&self) -> Option<usize> {
        match &self.factor {
            Factorization::Ldlt(f) => Some(f.negative_pivots()),
            Factorization::Lu(_) => None,
        }
    }
}

/// One-shot factor + solve with residual contract.
pub fn factor_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    FactoredMatrix::new(a.clone())?.solve(b)
}

const EIG_MAX_ITERS: usize = 10_000;

fn seed_vector(n: usize) -> Vec<f64> {
    // fixed quasi-random start; avoids special alignment with grid modes
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = (i as f64 * 0.754877666246693) % 1.0;
            2.0 * t - 1.0 + 0.1
        })
        .collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut x {
        *v /= norm;
    }
    x
}

/// Largest |eigenvalue| of a symmetric matrix by power iteration.
fn power_iteration(a: &CsrMatrix) -> Result<f64, SolveError> {
    let n = a.n;
    let mut x = seed_vector(n);
    let mut y = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..EIG_MAX_ITERS {
        a.matvec(&x, &mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = norm;
        for i in 0..n {
            x[i] = y[i] / norm;
        }
        if (next - lambda).abs() <= 1e-6 * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Err(SolveError::NoConvergence(EIG_MAX_ITERS))
}

/// Smallest |eigenvalue| by inverse iteration through a factorization.
fn inverse_iteration(a: &CsrMatrix) -> Result<f64, SolveError> {
    let factored = match FactoredMatrix::new(a.clone()) {
        Ok(f) => f,
        // exactly singular: smallest eigenvalue is zero
        Err(SolveError::Singular { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let n = a.n;
    let mut x = seed_vector(n);
    let mut growth = 0.0f64;
    for _ in 0..EIG_MAX_ITERS {
        let mut y = x.clone();
        factored.raw_solve(&mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Ok(0.0);
        }
        if norm == 0.0 {
            return Err(SolveError::NoConvergence(EIG_MAX_ITERS));
        }
        for i in 0..n {
            x[i] = y[i] / norm;
        }
        if (norm - growth).abs() <= 1e-6 * norm {
            return Ok(1.0 / norm);
        }
        growth = norm;
    }
    Err(SolveError::NoConvergence(EIG_MAX_ITERS))
}

/// 2-norm condition number estimate lambda_max / lambda_min of a symmetric
/// matrix via power and inverse-power iteration.
pub fn condition_estimate(a: &CsrMatrix) -> Result<f64, SolveError> {
    let defect = a.symmetry_defect();
    let scale = a.max_abs().max(1.0);
    if defect > 1e-8 * scale {
        return Err(SolveError::NotSymmetric(defect));
    }
    let lambda_max = power_iteration(a)?;
    let lambda_min = inverse_iteration(a)?;
    if lambda_min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(lambda_max / lambda_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn csr_from_dense(m: &nalgebra::DMatrix<f64>) -> CsrMatrix {
        let n = m.nrows();
        let mut t = TripletMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    t.push(i, j, m[(i, j)]);
                }
            }
        }
        t.to_csr()
    }

    #[test]
    fn identity_solve() {
        let mut t = TripletMatrix::new(3);
        for i in 0..3 {
            t.push(i, i, 1.0);
        }
        let a = t.to_csr();
        let x = factor_solve(&a, &[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.0]);
    }

    #[test]
    fn diagonal_solve() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 2.0);
        t.push(1, 1, 4.0);
        let x = factor_solve(&t.to_csr(), &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 1.5);
        t.push(1, 1, 1.0);
        t.push(0, 1, 0.25);
        t.push(0, 1, -0.25);
        let a = t.to_csr();
        assert!((a.get(0, 0) - 2.5).abs() < 1e-15);
        assert_eq!(a.get(0, 1), 0.0);
    }

    #[test]
    fn random_spd_residual_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 50;
        let b_mat = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let spd = &b_mat * b_mat.transpose() + nalgebra::DMatrix::identity(n, n) * (n as f64);
        let a = csr_from_dense(&spd);
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = factor_solve(&a, &b).unwrap();
        let mut r = vec![0.0; n];
        a.matvec(&x, &mut r);
        let norm_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let res = b
            .iter()
            .zip(&r)
            .fold(0.0f64, |m, (bi, ri)| m.max((bi - ri).abs()));
        assert!(res <= 1e-9 * norm_b, "residual {res}");
    }

    #[test]
    fn recovers_x_from_ax() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let b_mat = nalgebra::DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let spd = &b_mat * b_mat.transpose() + nalgebra::DMatrix::identity(n, n) * 2.0;
        let a = csr_from_dense(&spd);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let x = factor_solve(&a, &b).unwrap();
        let err = x
            .iter()
            .zip(&x_true)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = x_true.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-8 * scale, "error {err}");
    }

    #[test]
    fn lu_handles_pivoting() {
        // antidiagonal: unpivoted elimination would divide by zero
        let mut t = TripletMatrix::new(2);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        let x = factor_solve(&t.to_csr(), &[3.0, 5.0]).unwrap();
        assert!((x[0] - 5.0).abs() < 1e-14 && (x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn unsymmetric_band_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 60;
        let band = 4usize;
        let mut t = TripletMatrix::new(n);
        for i in 0..n {
            for j in i.saturating_sub(band)..(i + band + 1).min(n) {
                if i == j {
                    t.push(i, j, 10.0 + rng.random_range(0.0..1.0));
                } else {
                    t.push(i, j, rng.random_range(-1.0..1.0));
                }
            }
        }
        let a = t.to_csr();
        let x_true: Vec<f64> = (0..n).map(|i| ((i * i) as f64 * 0.05).cos()).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let x = factor_solve(&a, &b).unwrap();
        let err = x
            .iter()
            .zip(&x_true)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "error {err}");
    }

    #[test]
    fn singular_matrix_reports_deficiency() {
        let mut t = TripletMatrix::new(3);
        t.push(0, 0, 1.0);
        t.push(2, 2, 1.0);
        t.push(1, 1, 0.0); // row 1 empty
        let err = factor_solve(&t.to_csr(), &[1.0, 1.0, 1.0]).unwrap_err();
        match err {
            SolveError::Singular { zero_pivots, first } => {
                assert_eq!(zero_pivots, 1);
                assert_eq!(first, 1);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn condition_of_identity() {
        let mut t = TripletMatrix::new(10);
        for i in 0..10 {
            t.push(i, i, 1.0);
        }
        let c = condition_estimate(&t.to_csr()).unwrap();
        assert!((c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn condition_of_stiff_diagonal() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 1.0);
        t.push(1, 1, 1e6);
        let c = condition_estimate(&t.to_csr()).unwrap();
        assert!(c > 1e5 && c < 1e7, "estimate {c}");
    }

    #[test]
    fn condition_of_1d_laplacian_vs_dense_eigensolve() {
        let n = 100;
        let mut t = TripletMatrix::new(n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
            }
        }
        let a = t.to_csr();
        let est = condition_estimate(&a).unwrap();
        let eig = nalgebra::SymmetricEigen::new(a.to_dense());
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for v in eig.eigenvalues.iter() {
            lo = lo.min(v.abs());
            hi = hi.max(v.abs());
        }
        let exact = hi / lo;
        assert!(est < 10.0 * exact && est > exact / 10.0, "est {est} exact {exact}");
        // ~ 4 n^2 / pi^2 sanity
        let asymptotic = 4.0 * (n as f64) * (n as f64) / std::f64::consts::PI.powi(2);
        assert!(est > asymptotic / 10.0 && est < asymptotic * 10.0);
    }
}
