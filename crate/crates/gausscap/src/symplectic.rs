//! Real-matrix substrate for phase-space calculus: symplectic (commutation)
//! forms, symplectic spectra, matrix functional calculus and block
//! composition of bipartite systems.
//!
//! Covariance matrices are kept in units of hbar throughout; symplectic
//! spectra are reported in the dimensionless gamma convention where the
//! vacuum sits exactly at gamma = 1/2.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for symmetry / skew-symmetry checks.
pub const SHAPE_TOL: f64 = 1e-10;
/// Slack allowed below the uncertainty boundary gamma = 1/2.
pub const GAMMA_TOL: f64 = 1e-9;
/// Ridge added to singular covariance matrices before square roots.
pub const RIDGE: f64 = 1e-12;

/// Skew-symmetric commutation matrix of the canonical variables, together
/// with its hbar convention and mode count.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    modes: usize,
    hbar: f64,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    /// Canonical block-diagonal form: 2x2 blocks [[0, hbar], [-hbar, 0]]
    /// in the interleaved (q1, p1, ..., qs, ps) ordering.
    pub fn canonical(modes: usize, hbar: f64) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        let dim = 2 * modes;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..modes {
            m[(2 * j, 2 * j + 1)] = hbar;
            m[(2 * j + 1, 2 * j)] = -hbar;
        }
        Ok(Self { modes, hbar, matrix: m })
    }

    /// Wraps an arbitrary nondegenerate skew-symmetric matrix. The spectrum
    /// routines accept these; only `canonical` produces the standard block
    /// layout.
    pub fn from_matrix(matrix: DMatrix<f64>, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        let (r, c) = matrix.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "commutation matrix must be square with even dimension, got {r}x{c}"
            )));
        }
        let scale = matrix.amax().max(1.0);
        let skew_err = (&matrix + matrix.transpose()).amax();
        if skew_err > SHAPE_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "commutation matrix is not skew-symmetric (deviation {skew_err:.3e})"
            )));
        }
        let svd = matrix.clone().svd(false, false);
        let smin = svd.singular_values.min();
        if smin <= SHAPE_TOL * scale {
            return Err(Error::InvalidArgument(
                "commutation matrix is degenerate".into(),
            ));
        }
        Ok(Self { modes: r / 2, hbar, matrix })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    /// The sign-reversed form -Delta (reflected reference convention).
    pub fn reflected(&self) -> Self {
        Self {
            modes: self.modes,
            hbar: self.hbar,
            matrix: -&self.matrix,
        }
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.matrix
            .clone()
            .try_inverse()
            .expect("commutation matrix is invertible by construction")
    }

    /// Block-diagonal join of two forms. The hbar conventions must match.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if (self.hbar - other.hbar).abs() > SHAPE_TOL * self.hbar {
            return Err(Error::InvalidArgument(format!(
                "hbar mismatch in direct sum: {} vs {}",
                self.hbar, other.hbar
            )));
        }
        Ok(Self {
            modes: self.modes + other.modes,
            hbar: self.hbar,
            matrix: block_diag(&self.matrix, &other.matrix),
        })
    }
}

/// Real symmetric second-moment matrix of the canonical variables, in
/// units of hbar.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix must be square with even dimension, got {r}x{c}"
            )));
        }
        let scale = matrix.amax().max(1.0);
        let sym_err = (&matrix - matrix.transpose()).amax();
        if sym_err > SHAPE_TOL * scale {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix is not symmetric (deviation {sym_err:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self {
            matrix: block_diag(&self.matrix, &other.matrix),
        }
    }
}

/// Moduli of the eigenvalue pairs +-i gamma_j of Delta^{-1} alpha, each
/// pair reported once, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    gammas: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn min_gamma(&self) -> f64 {
        self.gammas.last().copied().unwrap_or(f64::INFINITY)
    }
}

/// Uncertainty-relation report: valid iff every gamma_j >= 1/2 - tol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub valid: bool,
    pub min_gamma: f64,
}

fn check_dims(alpha: &CovarianceMatrix, delta: &SymplecticForm) -> Result<()> {
    if alpha.dim() != delta.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: covariance is {}x{} but form is {}x{}",
            alpha.dim(),
            alpha.dim(),
            delta.dim(),
            delta.dim()
        )));
    }
    Ok(())
}

/// Symmetric square root of a PSD matrix. Eigenvalues below `ridge` are
/// lifted to `ridge`; genuinely negative eigenvalues beyond tolerance are
/// an error.
pub(crate) fn sym_sqrt(m: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    sym_func(m, ridge, |x| x.sqrt())
}

pub(crate) fn sym_func<F: Fn(f64) -> f64>(
    m: &DMatrix<f64>,
    ridge: f64,
    f: F,
) -> Result<DMatrix<f64>> {
    let scale = m.amax().max(1.0);
    let eig = m.clone().symmetric_eigen();
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < -1e-8 * scale {
            return Err(Error::NumericFailure(format!(
                "matrix expected PSD has eigenvalue {v:.3e}"
            )));
        }
        *v = f(v.max(ridge));
    }
    let d = DMatrix::from_diagonal(&vals);
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Symplectic spectrum via singular values of the antisymmetric matrix
/// alpha^{1/2} Delta^{-1} alpha^{1/2}. Each singular value appears twice;
/// pairs are collapsed to one entry.
pub fn symplectic_spectrum(
    alpha: &CovarianceMatrix,
    delta: &SymplecticForm,
) -> Result<SymplecticSpectrum> {
    check_dims(alpha, delta)?;
    let ridge = RIDGE * delta.hbar();
    let root = sym_sqrt(alpha.matrix(), ridge)?;
    let anti = &root * delta.inverse() * &root;
    let svd = anti.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut gammas = Vec::with_capacity(delta.modes());
    for pair in sv.chunks(2) {
        if pair.len() != 2 {
            return Err(Error::NumericFailure(
                "singular values of the antisymmetric matrix did not pair up".into(),
            ));
        }
        let spread = (pair[0] - pair[1]).abs();
        if spread > 1e-6 * pair[0].max(1.0) {
            return Err(Error::NumericFailure(format!(
                "singular-value pair split by {spread:.3e}; eigenroutine did not converge"
            )));
        }
        let mut g = 0.5 * (pair[0] + pair[1]);
        // The ridge inflates exact-boundary (pure) spectra by ~1e-12; strip
        // it only when it is provably below reporting precision.
        if g < RIDGE * 1e2 {
            g = 0.0;
        }
        gammas.push(g);
    }
    Ok(SymplecticSpectrum { gammas })
}

/// Cross-check path: moduli of the complex eigenvalues of Delta^{-1} alpha
/// computed by a general real-matrix eigenroutine.
pub fn symplectic_spectrum_eig(
    alpha: &CovarianceMatrix,
    delta: &SymplecticForm,
) -> Result<SymplecticSpectrum> {
    check_dims(alpha, delta)?;
    let m = delta.inverse() * alpha.matrix();
    let eig = m.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let gammas = mods.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    Ok(SymplecticSpectrum { gammas })
}

/// Matrix uncertainty relation alpha - (i/2) Delta >= 0, expressed through
/// the symplectic spectrum.
pub fn check_uncertainty(
    alpha: &CovarianceMatrix,
    delta: &SymplecticForm,
) -> Result<UncertaintyReport> {
    let spectrum = symplectic_spectrum(alpha, delta)?;
    let min_gamma = spectrum.min_gamma();
    Ok(UncertaintyReport {
        valid: min_gamma >= 0.5 - GAMMA_TOL,
        min_gamma,
    })
}

/// Scalar functions admitted by [`matrix_function`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFunction {
    Abs,
    Sqrt,
}

/// Functional calculus S f(diag) S^{-1} on a diagonalizable real matrix.
/// The result is real whenever the spectrum is symmetric under complex
/// conjugation; a residual imaginary part beyond tolerance is reported as
/// a numeric failure.
pub fn matrix_function(m: &DMatrix<f64>, f: MatrixFunction) -> Result<DMatrix<f64>> {
    let (s, lambdas) = complex_eigendecomposition(m)?;
    let mapped: Vec<Complex64> = lambdas
        .iter()
        .map(|l| match f {
            MatrixFunction::Abs => Complex64::new(l.norm(), 0.0),
            MatrixFunction::Sqrt => l.sqrt(),
        })
        .collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(mapped));
    let s_inv = s.clone().try_inverse().ok_or_else(|| {
        Error::NumericFailure("eigenvector matrix is singular (defective input)".into())
    })?;
    let result = &s * d * s_inv;
    let scale = m.amax().max(1.0);
    let imag_max = result.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag_max > 1e-7 * scale {
        return Err(Error::NumericFailure(format!(
            "matrix function has non-real residual {imag_max:.3e}; spectrum not conjugation-symmetric"
        )));
    }
    Ok(result.map(|z| z.re))
}

/// Eigen-decomposition of a small real matrix: eigenvalues via the real
/// Schur form, eigenvectors recovered as null vectors of (M - lambda I)
/// with multiplicity handled by clustering.
pub(crate) fn complex_eigendecomposition(
    m: &DMatrix<f64>,
) -> Result<(DMatrix<Complex64>, Vec<Complex64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let scale = m.amax().max(1.0);
    let eigs = m.complex_eigenvalues();
    let mut lambdas: Vec<Complex64> = eigs.iter().copied().collect();
    lambdas.sort_by(|a, b| {
        (b.re, b.im)
            .partial_cmp(&(a.re, a.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Cluster numerically coincident eigenvalues so repeated roots get a
    // full set of independent null vectors.
    let tol = 1e-8 * scale;
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    let mut col = 0usize;
    let mut i = 0usize;
    while i < lambdas.len() {
        let mut j = i + 1;
        while j < lambdas.len() && (lambdas[j] - lambdas[i]).norm() < tol {
            j += 1;
        }
        let mult = j - i;
        let center = lambdas[i..j].iter().sum::<Complex64>() / mult as f64;
        let shifted = &mc - DMatrix::from_diagonal_element(n, n, center);
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[a]
                .partial_cmp(&svd.singular_values[b])
                .unwrap()
        });
        for &row in order.iter().take(mult) {
            let sing = svd.singular_values[row];
            if sing > 1e-5 * scale {
                return Err(Error::NumericFailure(format!(
                    "matrix is defective or near-defective near lambda = {center}; \
                     null-space residual {sing:.3e}"
                )));
            }
            for k in 0..n {
                s[(k, col)] = v_t[(row, k)].conj();
            }
            col += 1;
        }
        i = j;
    }
    // Condition estimate on the assembled eigenvector basis.
    let svd = s.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 0.0 || smax / smin > 1e10 {
        return Err(Error::NumericFailure(format!(
            "eigenvector basis ill-conditioned (cond ~ {:.3e}); matrix near-defective",
            if smin > 0.0 { smax / smin } else { f64::INFINITY }
        )));
    }
    Ok((s, lambdas))
}

pub(crate) fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = DMatrix::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

/// Brings a nondegenerate skew-symmetric matrix to block normal form
/// M = Q B Q^T with orthogonal Q and B block-diagonal in 2x2 blocks
/// [[0, d_j], [-d_j, 0]], d_j > 0. Returns (Q, [d_j]).
pub(crate) fn skew_normal_form(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = m.nrows();
    if n % 2 != 0 {
        return Err(Error::InvalidArgument("skew matrix must have even dimension".into()));
    }
    let scale = m.amax().max(1.0);
    let gram = m.transpose() * m; // = -M^2, symmetric PSD with paired spectrum
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut q = DMatrix::<f64>::zeros(n, n);
    let mut ds = Vec::with_capacity(n / 2);
    let mut used: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut col = 0usize;
    for &idx in &order {
        if ds.len() == n / 2 {
            break;
        }
        let d2 = eig.eigenvalues[idx];
        if d2 <= (SHAPE_TOL * scale).powi(2) {
            return Err(Error::UnsupportedChannel(
                "skew-symmetric form is degenerate".into(),
            ));
        }
        let d = d2.sqrt();
        // Orthogonalize the candidate against all previously fixed basis
        // vectors; degenerate d_j share an eigenspace of -M^2.
        let mut v: DVector<f64> = eig.eigenvectors.column(idx).into();
        for u in &used {
            let p = u.dot(&v);
            v -= u * p;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue; // already spanned by an earlier pair
        }
        v /= norm;
        let w = m * &v / d;
        // Columns ordered (w, v) so that Q^T M Q lands on [[0, d], [-d, 0]].
        q.set_column(col, &w);
        q.set_column(col + 1, &v);
        used.push(w);
        used.push(v);
        ds.push(d);
        col += 2;
    }
    if ds.len() != n / 2 {
        return Err(Error::NumericFailure(
            "failed to pair the spectrum of the skew-symmetric form".into(),
        ));
    }
    Ok((q, ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn thermal_cov(n: f64, hbar: f64) -> CovarianceMatrix {
        CovarianceMatrix::new(DMatrix::from_diagonal_element(2, 2, hbar * (n + 0.5))).unwrap()
    }

    #[test]
    fn canonical_form_one_mode() {
        let f = SymplecticForm::canonical(1, 1.0).unwrap();
        assert_eq!(f.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn canonical_form_two_modes() {
        let f = SymplecticForm::canonical(2, 1.0).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, -1.0, 0.0,
            ],
        );
        assert_eq!(f.matrix(), &expected);
    }

    #[test]
    fn canonical_form_scales_with_hbar() {
        let f = SymplecticForm::canonical(1, 2.0).unwrap();
        assert_eq!(f.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]));
    }

    #[test]
    fn canonical_form_rejects_bad_args() {
        assert!(SymplecticForm::canonical(0, 1.0).is_err());
        assert!(SymplecticForm::canonical(1, 0.0).is_err());
        assert!(SymplecticForm::canonical(1, -1.0).is_err());
    }

    #[test]
    fn vacuum_spectrum_is_half() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let alpha = thermal_cov(0.0, 1.0);
        let s = symplectic_spectrum(&alpha, &delta).unwrap();
        assert_abs_diff_eq!(s.gammas()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn thermal_spectrum_is_n_plus_half() {
        for hbar in [1.0, 2.0] {
            let delta = SymplecticForm::canonical(1, hbar).unwrap();
            let alpha = thermal_cov(1.0, hbar);
            let s = symplectic_spectrum(&alpha, &delta).unwrap();
            assert_abs_diff_eq!(s.gammas()[0], 1.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectrum_dimension_mismatch_errors() {
        let delta = SymplecticForm::canonical(2, 1.0).unwrap();
        let alpha = thermal_cov(1.0, 1.0);
        assert!(symplectic_spectrum(&alpha, &delta).is_err());
    }

    #[test]
    fn svd_route_matches_eig_route_on_two_modes() {
        let delta = SymplecticForm::canonical(2, 1.0).unwrap();
        // A correlated but valid two-mode covariance.
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.3, 0.0, 0.2, 0.1, //
                0.0, 1.3, -0.1, 0.2, //
                0.2, -0.1, 0.9, 0.0, //
                0.1, 0.2, 0.0, 0.9,
            ],
        );
        let alpha = CovarianceMatrix::new(m).unwrap();
        let a = symplectic_spectrum(&alpha, &delta).unwrap();
        let b = symplectic_spectrum_eig(&alpha, &delta).unwrap();
        for (x, y) in a.gammas().iter().zip(b.gammas()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn uncertainty_vacuum_boundary() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let rep = check_uncertainty(&thermal_cov(0.0, 1.0), &delta).unwrap();
        assert!(rep.valid);
        assert_abs_diff_eq!(rep.min_gamma, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn uncertainty_violation_detected() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let alpha = CovarianceMatrix::new(DMatrix::from_diagonal_element(2, 2, 0.4)).unwrap();
        let rep = check_uncertainty(&alpha, &delta).unwrap();
        assert!(!rep.valid);
        assert_abs_diff_eq!(rep.min_gamma, 0.4, epsilon = 1e-10);
    }

    #[test]
    fn uncertainty_thermal() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let rep = check_uncertainty(&thermal_cov(2.0, 1.0), &delta).unwrap();
        assert!(rep.valid);
        assert_abs_diff_eq!(rep.min_gamma, 2.5, epsilon = 1e-10);
    }

    #[test]
    fn matrix_abs_of_real_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![-2.0, 3.0]));
        let out = matrix_function(&m, MatrixFunction::Abs).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out[(1, 1)], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out[(0, 1)], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn matrix_abs_of_vacuum_hamiltonian() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let m = delta.inverse() * thermal_cov(0.0, 1.0).matrix();
        let out = matrix_function(&m, MatrixFunction::Abs).unwrap();
        assert_abs_diff_eq!(out[(0, 0)], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(out[(1, 1)], 0.5, epsilon = 1e-9);
    }

    #[test]
    fn matrix_sqrt_thermal_purification_block() {
        // sqrt(-(D^{-1}a)^2 - I/4) = sqrt(g^2 - 1/4) I for thermal gamma.
        let n = 1.0;
        let gamma: f64 = n + 0.5;
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let m = delta.inverse() * thermal_cov(n, 1.0).matrix();
        let x = -(&m * &m) - DMatrix::identity(2, 2) * 0.25;
        let out = matrix_function(&x, MatrixFunction::Sqrt).unwrap();
        let expect = (gamma * gamma - 0.25).sqrt();
        assert_abs_diff_eq!(out[(0, 0)], expect, epsilon = 1e-9);
        assert_abs_diff_eq!(out[(1, 1)], expect, epsilon = 1e-9);
    }

    #[test]
    fn matrix_abs_is_idempotent_and_matches_sqrt_of_square() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let m = delta.inverse() * thermal_cov(0.7, 1.0).matrix();
        let a1 = matrix_function(&m, MatrixFunction::Abs).unwrap();
        let a2 = matrix_function(&a1, MatrixFunction::Abs).unwrap();
        assert!((&a1 - &a2).amax() < 1e-8);
        // spectrum of m is +-i*gamma, so abs(m) = sqrt(-m^2)
        let s = matrix_function(&(-(&m * &m)), MatrixFunction::Sqrt).unwrap();
        assert!((&a1 - &s).amax() < 1e-8);
    }

    #[test]
    fn direct_sum_of_forms_is_canonical_two_mode() {
        let d1 = SymplecticForm::canonical(1, 1.0).unwrap();
        let sum = d1.direct_sum(&d1).unwrap();
        let canon = SymplecticForm::canonical(2, 1.0).unwrap();
        assert_eq!(sum.matrix(), canon.matrix());
    }

    #[test]
    fn direct_sum_hbar_mismatch_errors() {
        let d1 = SymplecticForm::canonical(1, 1.0).unwrap();
        let d2 = SymplecticForm::canonical(1, 2.0).unwrap();
        assert!(d1.direct_sum(&d2).is_err());
    }

    #[test]
    fn direct_sum_spectrum_is_multiset_union() {
        let delta = SymplecticForm::canonical(1, 1.0).unwrap();
        let a = thermal_cov(1.0, 1.0);
        let b = thermal_cov(0.2, 1.0);
        let joint = symplectic_spectrum(
            &a.direct_sum(&b),
            &delta.direct_sum(&delta).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(joint.gammas()[0], 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(joint.gammas()[1], 0.7, epsilon = 1e-10);
    }

    #[test]
    fn reflected_direct_sum_for_purification() {
        let d = SymplecticForm::canonical(1, 1.0).unwrap();
        let sum = d.direct_sum(&d.reflected()).unwrap();
        assert_abs_diff_eq!(sum.matrix()[(2, 3)], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sum.matrix()[(0, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn skew_normal_form_recovers_scaled_canonical() {
        let c = 1.8;
        let delta = SymplecticForm::canonical(2, 1.0).unwrap();
        let m = delta.matrix() * c;
        let (q, ds) = skew_normal_form(&m).unwrap();
        for d in &ds {
            assert_abs_diff_eq!(*d, c, epsilon = 1e-10);
        }
        // Q orthogonal and Q^T M Q in block normal form.
        assert!((q.transpose() * &q - DMatrix::identity(4, 4)).amax() < 1e-10);
        let b = q.transpose() * &m * &q;
        assert_abs_diff_eq!(b[(0, 1)], c, epsilon = 1e-10);
        assert_abs_diff_eq!(b[(1, 0)], -c, epsilon = 1e-10);
        assert!(b[(0, 2)].abs() < 1e-10);
    }
}
