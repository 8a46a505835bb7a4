//! Minimal dense real linear algebra: symmetric eigendecomposition via cyclic
//! Jacobi sweeps, PSD tests, circulant spectra and Gram factorizations.
//!
//! Everything here is deterministic for a fixed input, which keeps solver
//! certificates and test expectations reproducible. Scale is desk-sized
//! (n up to a few hundred); no attempt is made at sparse or blocked kernels.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Kronecker product, row-major block layout.
    pub fn kron(&self, other: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn frobenius_norm(&self) -> S {
        self.data.iter().map(|&v| v * v).sum::<S>().sqrt()
    }

    pub fn max_abs(&self) -> S {
        self.data.iter().fold(S::zero(), |m, &v| m.max(v.abs()))
    }
}

/// Dense real symmetric matrix. The constructor symmetrizes its input via
/// `(M + M^T)/2`, so the stored entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymMatrix<S> {
    /// Builds from a row-major `n*n` buffer; rejects non-finite entries and
    /// symmetrizes.
    pub fn new(n: usize, entries: Vec<S>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                n * n,
                n,
                n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("symmetric matrix"));
        }
        let mut m = SymMatrix { n, data: entries };
        let half = S::of(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (m.data[i * n + j] + m.data[j * n + i]) * half;
                m.data[i * n + j] = s;
                m.data[j * n + i] = s;
            }
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SymMatrix::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> S {
        self.data.iter().map(|&v| v * v).sum::<S>().sqrt()
    }

    pub fn scaled(&self, c: S) -> SymMatrix<S> {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &SymMatrix<S>) -> SymMatrix<S> {
        assert_eq!(self.n, other.n, "add shape mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix<S>) -> SymMatrix<S> {
        assert_eq!(self.n, other.n, "sub shape mismatch");
        SymMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn to_mat(&self) -> Mat<S> {
        Mat {
            rows: self.n,
            cols: self.n,
            data: self.data.clone(),
        }
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n, "matvec shape mismatch");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect()
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are ascending; `eigenvectors` holds the corresponding
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Spectrum<S> {
    pub eigenvalues: Vec<S>,
    pub eigenvectors: Mat<S>,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps row-by-row over all off-diagonal pairs, rotating each to zero, until
/// the off-diagonal Frobenius mass drops below `1e-12 * ||M||_F` (floored at a
/// few machine epsilons so f32 inputs terminate too) or 100 sweeps elapse.
pub fn eig_sym<S: Scalar>(m: &SymMatrix<S>) -> Spectrum<S> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = Mat::identity(n);
    if n == 0 {
        return Spectrum {
            eigenvalues: vec![],
            eigenvectors: v,
        };
    }

    let norm = m.frobenius_norm();
    let eps_floor = S::epsilon() * S::of(8.0);
    let thresh = norm * S::of(1e-12).max(eps_floor);

    let off = |a: &[S]| -> S {
        let mut s = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let e = a[i * n + j];
                s += e * e;
            }
        }
        (s + s).sqrt()
    };

    for _sweep in 0..100 {
        if off(&a) <= thresh {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == S::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (S::of(2.0) * apq);
                let t = if tau >= S::zero() {
                    S::one() / (tau + (S::one() + tau * tau).sqrt())
                } else {
                    -S::one() / (-tau + (S::one() + tau * tau).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = S::zero();
                a[q * n + p] = S::zero();
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = s * akp + c * akq;
                    a[q * n + k] = a[k * n + q];
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<S> = order.iter().map(|&i| a[i * n + i]).collect();
    let eigenvectors = Mat::from_fn(n, n, |i, j| v.get(i, order[j]));
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Tests `lambda_min(m) >= -tol * max(1, ||m||_F)`.
pub fn is_psd<S: Scalar>(m: &SymMatrix<S>, tol: S) -> bool {
    let n = m.n();
    if n == 0 {
        return true;
    }
    let spec = eig_sym(m);
    let bound = -tol * S::one().max(m.frobenius_norm());
    spec.eigenvalues[0] >= bound
}

/// Eigenvalues of the real symmetric circulant with the given first row,
/// `lambda_j = sum_k c_k cos(2 pi j k / n)`, returned in index order
/// `j = 0..n-1`.
///
/// The first row must satisfy `c_j = c_{n-j}`; otherwise the circulant is not
/// symmetric and an error is returned.
pub fn circulant_spectrum<S: Scalar>(first_row: &[S]) -> Result<Vec<S>> {
    let n = first_row.len();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty circulant row".into()));
    }
    if first_row.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("circulant first row"));
    }
    let scale = first_row.iter().fold(S::one(), |m, &v| m.max(v.abs()));
    let tol = scale * S::of(1e-12);
    for j in 1..n {
        if (first_row[j] - first_row[n - j]).abs() > tol {
            return Err(Error::AsymmetricCirculantRow);
        }
    }
    let two_pi = S::of(2.0) * S::PI();
    let nf = S::of(n as f64);
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let angle = two_pi * S::of((j * k) as f64) / nf;
                    first_row[k] * angle.cos()
                })
                .sum()
        })
        .collect())
}

/// Gram factorization of a correlation matrix: returns unit vectors whose
/// pairwise inner products reproduce `p`.
///
/// Eigenvalues are clipped at zero; the vector dimension is the numerical rank
/// (eigenvalues above `rank_tol * lambda_max`), with coordinates ordered by
/// descending eigenvalue. Errors if `p` is not PSD within `rank_tol` or its
/// diagonal deviates from 1 by more than 1e-8.
pub fn gram_vectors<S: Scalar>(p: &SymMatrix<S>, rank_tol: S) -> Result<Vec<Vec<S>>> {
    let n = p.n();
    if !is_psd(p, rank_tol) {
        return Err(Error::NotPsd);
    }
    let diag_tol = S::of(1e-8);
    for i in 0..n {
        if (p.get(i, i) - S::one()).abs() > diag_tol {
            return Err(Error::NotUnitDiagonal);
        }
    }
    let spec = eig_sym(p);
    let lambda_max = spec.eigenvalues.last().copied().unwrap_or(S::zero());
    let cutoff = rank_tol * lambda_max;
    // Descending-eigenvalue columns, keeping only the numerically nonzero ones.
    let kept: Vec<usize> = (0..n)
        .rev()
        .filter(|&j| spec.eigenvalues[j] > cutoff)
        .collect();
    let vectors = (0..n)
        .map(|x| {
            kept.iter()
                .map(|&j| spec.eigenvectors.get(x, j) * spec.eigenvalues[j].max(S::zero()).sqrt())
                .collect()
        })
        .collect();
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix<f64> {
        SymMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0).unwrap()
    }

    fn c5_adjacency() -> SymMatrix<f64> {
        SymMatrix::from_fn(5, |i, j| {
            let d = (i + 5 - j) % 5;
            if d == 1 || d == 4 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn eig_identity() {
        let spec = eig_sym(&SymMatrix::<f64>::identity(3));
        for ev in spec.eigenvalues {
            assert_close(ev, 1.0, 1e-14);
        }
    }

    #[test]
    fn eig_k5_adjacency() {
        let a = SymMatrix::from_fn(5, |i, j| if i == j { 0.0 } else { 1.0 }).unwrap();
        let spec = eig_sym(&a);
        for j in 0..4 {
            assert_close(spec.eigenvalues[j], -1.0, 1e-9);
        }
        assert_close(spec.eigenvalues[4], 4.0, 1e-9);
    }

    #[test]
    fn eig_c5_matches_dft_oracle() {
        let spec = eig_sym(&c5_adjacency());
        let mut expect = circulant_spectrum(&[0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in spec.eigenvalues.iter().zip(&expect) {
            assert_close(*got, *want, 1e-9);
        }
        // frozen values 2 cos(2 pi j / 5)
        assert_close(spec.eigenvalues[0], -1.618033988749895, 1e-9);
        assert_close(spec.eigenvalues[4], 2.0, 1e-9);
    }

    #[test]
    fn eig_reconstructs_and_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1usize, 2, 3, 5, 16, 64] {
            let m = random_sym(n, &mut rng);
            let spec = eig_sym(&m);
            let v = &spec.eigenvectors;
            // reconstruction
            let mut recon = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += v.get(i, k) * spec.eigenvalues[k] * v.get(j, k);
                    }
                    recon.set(i, j, s);
                }
            }
            let mut err = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    err += (recon.get(i, j) - m.get(i, j)).powi(2);
                }
            }
            assert!(err.sqrt() <= 1e-8 * m.frobenius_norm().max(1e-30), "n={n}");
            // orthogonality
            let vtv = v.transpose().matmul(v);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_close(vtv.get(i, j), want, 1e-9);
                }
            }
            // residual per eigenpair
            for k in 0..n {
                let col: Vec<f64> = (0..n).map(|i| v.get(i, k)).collect();
                let mv = m.matvec(&col);
                let mut res = 0.0;
                for i in 0..n {
                    res += (mv[i] - spec.eigenvalues[k] * col[i]).powi(2);
                }
                assert!(res.sqrt() <= 1e-9 * m.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn eig_f32_instantiates() {
        let m = SymMatrix::<f32>::from_fn(4, |i, j| if i == j { 2.0 } else { 0.5 }).unwrap();
        let spec = eig_sym(&m);
        assert!((spec.eigenvalues[3] - 3.5).abs() < 1e-4);
    }

    #[test]
    fn psd_tests() {
        assert!(is_psd(&SymMatrix::<f64>::zeros(3), 0.0));
        let mut d = SymMatrix::zeros(2);
        d.set(0, 0, 1.0);
        d.set(1, 1, -1e-15);
        assert!(is_psd(&d, 1e-9));
        assert!(!is_psd(&c5_adjacency(), 1e-9));
    }

    #[test]
    fn circulant_cases() {
        let lam = circulant_spectrum(&[0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        for (j, &l) in lam.iter().enumerate() {
            assert_close(
                l,
                2.0 * (2.0 * std::f64::consts::PI * j as f64 / 5.0).cos(),
                1e-12,
            );
        }

        let lam = circulant_spectrum(&[0.25, 0.25, 0.25, 0.25]).unwrap();
        assert_close(lam[0], 1.0, 1e-12);
        for &l in &lam[1..] {
            assert_close(l, 0.0, 1e-12);
        }

        // cost row (q/n, -p/2n, 0, .., 0, -p/2n) -> q/n - (p/n) cos(2 pi j / n)
        let (n, p) = (7usize, 0.6f64);
        let q = 1.0 - p;
        let mut row = vec![0.0; n];
        row[0] = q / n as f64;
        row[1] = -p / (2.0 * n as f64);
        row[n - 1] = -p / (2.0 * n as f64);
        let lam = circulant_spectrum(&row).unwrap();
        for (j, &l) in lam.iter().enumerate() {
            let want = q / n as f64
                - (p / n as f64) * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos();
            assert_close(l, want, 1e-12);
        }

        assert!(matches!(
            circulant_spectrum(&[0.0, 1.0, 0.0]),
            Err(Error::AsymmetricCirculantRow)
        ));
    }

    #[test]
    fn circulant_agrees_with_eig_on_random_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=12usize {
            let mut row = vec![0.0f64; n];
            for j in 0..=(n / 2) {
                let v = rng.random::<f64>() * 2.0 - 1.0;
                row[j] = v;
                row[(n - j) % n] = v;
            }
            let m = SymMatrix::from_fn(n, |i, j| row[(j + n - i) % n]).unwrap();
            let mut a = circulant_spectrum(&row).unwrap();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let b = eig_sym(&m).eigenvalues;
            for (x, y) in a.iter().zip(&b) {
                assert_close(*x, *y, 1e-9);
            }
        }
    }

    #[test]
    fn gram_vector_cases() {
        // all-ones: a single repeated unit vector
        let j3 = SymMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let vs = gram_vectors(&j3, 1e-9).unwrap();
        assert_eq!(vs[0].len(), 1);
        for v in &vs {
            assert_close(v[0], vs[0][0], 1e-9);
        }

        // identity: an orthonormal basis
        let vs = gram_vectors(&SymMatrix::<f64>::identity(4), 1e-9).unwrap();
        assert_eq!(vs[0].len(), 4);
        for (x, vx) in vs.iter().enumerate() {
            for (y, vy) in vs.iter().enumerate() {
                let dot: f64 = vx.iter().zip(vy).map(|(a, b)| a * b).sum();
                assert_close(dot, if x == y { 1.0 } else { 0.0 }, 1e-9);
            }
        }

        // pentagon Gram matrix: rank 2
        let p = SymMatrix::from_fn(5, |x, y| {
            (4.0 * std::f64::consts::PI * (x as f64 - y as f64) / 5.0).cos()
        })
        .unwrap();
        let vs = gram_vectors(&p, 1e-9).unwrap();
        assert_eq!(vs[0].len(), 2);
        for x in 0..5 {
            for y in 0..5 {
                let dot: f64 = vs[x].iter().zip(&vs[y]).map(|(a, b)| a * b).sum();
                assert_close(dot, p.get(x, y), 1e-7);
            }
        }

        assert!(matches!(
            gram_vectors(&c5_adjacency(), 1e-9),
            Err(Error::NotPsd)
        ));
        let half = SymMatrix::from_fn(2, |i, j| if i == j { 0.5 } else { 0.0 }).unwrap();
        assert!(matches!(
            gram_vectors(&half, 1e-9),
            Err(Error::NotUnitDiagonal)
        ));
    }

    #[test]
    fn gram_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=10usize {
            // random correlation matrix: Gram of random unit vectors
            let dim = 3;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / norm).collect()
                })
                .collect();
            let p = SymMatrix::from_fn(n, |i, j| {
                rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum()
            })
            .unwrap();
            let vs = gram_vectors(&p, 1e-9).unwrap();
            for x in 0..n {
                for y in 0..n {
                    let dot: f64 = vs[x].iter().zip(&vs[y]).map(|(a, b)| a * b).sum();
                    assert_close(dot, p.get(x, y), 1e-7);
                }
            }
        }
    }

    #[test]
    fn symmetrization_and_validation() {
        let m = SymMatrix::new(2, vec![1.0, 3.0, 1.0, 2.0]).unwrap();
        assert_close(m.get(0, 1), 2.0, 0.0);
        assert_close(m.get(1, 0), 2.0, 0.0);
        assert!(SymMatrix::new(2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(SymMatrix::new(2, vec![1.0]).is_err());
    }

    #[test]
    fn kron_small() {
        let a = Mat::from_fn(2, 2, |i, j| (i * 2 + j) as f64);
        let b = Mat::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_close(k.get(0, 0), 0.0, 0.0);
        assert_close(k.get(2, 0), 2.0, 0.0);
        assert_close(k.get(2, 2), 3.0, 0.0);
        assert_close(k.get(3, 3), 3.0, 0.0);
        assert_close(k.get(2, 3), 0.0, 0.0);
    }
}
