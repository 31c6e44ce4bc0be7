//! Gaussian states as (mean, covariance, form) triples: entropy, purity,
//! purification with the reflected reference convention, the gauge-invariant
//! correspondence and thermal-state facts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symplectic::{
    check_uncertainty, sym_func, sym_sqrt, symplectic_spectrum, CovarianceMatrix,
    SymplecticForm, GAMMA_TOL, RIDGE,
};

/// Logarithm base used for entropies and capacity quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    /// Base-2 logarithms (bits); the default convention.
    #[default]
    Bits,
    /// Natural logarithms (nats).
    Nats,
}

impl LogBase {
    /// Conversion factor from bits to this base.
    pub fn from_bits(self) -> f64 {
        match self {
            LogBase::Bits => 1.0,
            LogBase::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Bits => x.log2(),
            LogBase::Nats => x.ln(),
        }
    }
}

/// Thermal-mode entropy g(x) = (x+1) log2(x+1) - x log2(x), in bits.
///
/// Evaluated through ln_1p so the x -> 0 asymptotics stay accurate deep
/// into the regime probed by the small-power expansions.
pub fn g_function(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "g is defined for nonnegative arguments, got {x}"
        )));
    }
    Ok(g_unchecked(x))
}

pub(crate) fn g_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // (x+1) ln(x+1) - x ln x rearranged to avoid cancellation at large x.
    (x * (1.0 / x).ln_1p() + x.ln_1p()) / std::f64::consts::LN_2
}

pub fn g_in(x: f64, base: LogBase) -> Result<f64> {
    Ok(g_function(x)? * base.from_bits())
}

/// Gaussian state determined by mean vector, covariance matrix and
/// commutation form.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: CovarianceMatrix,
    form: SymplecticForm,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: CovarianceMatrix, form: SymplecticForm) -> Result<Self> {
        if mean.len() != form.dim() {
            return Err(Error::InvalidArgument(format!(
                "mean has length {} but the form has dimension {}",
                mean.len(),
                form.dim()
            )));
        }
        let rep = check_uncertainty(&cov, &form)?;
        if !rep.valid {
            return Err(Error::InvalidArgument(format!(
                "covariance violates the uncertainty relation (min gamma = {})",
                rep.min_gamma
            )));
        }
        Ok(Self { mean, cov, form })
    }

    /// Constructor that skips the uncertainty check; for outputs of maps
    /// already known to be physical.
    pub(crate) fn new_unchecked(
        mean: DVector<f64>,
        cov: CovarianceMatrix,
        form: SymplecticForm,
    ) -> Self {
        Self { mean, cov, form }
    }

    pub fn vacuum(modes: usize, hbar: f64) -> Result<Self> {
        Self::thermal_multi(&vec![0.0; modes], hbar)
    }

    /// One-mode thermal (elementary Gaussian) state with mean photon
    /// number `n_mean`.
    pub fn thermal(n_mean: f64, hbar: f64) -> Result<Self> {
        Self::thermal_multi(&[n_mean], hbar)
    }

    /// Product of thermal modes with the given mean photon numbers.
    pub fn thermal_multi(n_means: &[f64], hbar: f64) -> Result<Self> {
        if n_means.is_empty() {
            return Err(Error::InvalidArgument("at least one mode required".into()));
        }
        for &n in n_means {
            if n < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "mean photon number must be nonnegative, got {n}"
                )));
            }
        }
        let form = SymplecticForm::canonical(n_means.len(), hbar)?;
        let dim = form.dim();
        let mut diag = DVector::zeros(dim);
        for (j, &n) in n_means.iter().enumerate() {
            diag[2 * j] = hbar * (n + 0.5);
            diag[2 * j + 1] = hbar * (n + 0.5);
        }
        let cov = CovarianceMatrix::new(DMatrix::from_diagonal(&diag))?;
        Ok(Self {
            mean: DVector::zeros(dim),
            cov,
            form,
        })
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn form(&self) -> &SymplecticForm {
        &self.form
    }

    pub fn modes(&self) -> usize {
        self.form.modes()
    }

    /// Von Neumann entropy in bits: sum of g(gamma_j - 1/2) over the
    /// symplectic spectrum.
    pub fn entropy(&self) -> Result<f64> {
        let spec = symplectic_spectrum(&self.cov, &self.form)?;
        Ok(spec
            .gammas()
            .iter()
            .map(|&g| g_unchecked((g - 0.5).max(0.0)))
            .sum())
    }

    pub fn entropy_in(&self, base: LogBase) -> Result<f64> {
        Ok(self.entropy()? * base.from_bits())
    }

    /// True iff every symplectic eigenvalue sits at the boundary 1/2.
    pub fn is_pure(&self) -> Result<bool> {
        let spec = symplectic_spectrum(&self.cov, &self.form)?;
        Ok(spec.gammas().iter().all(|&g| (g - 0.5).abs() <= GAMMA_TOL))
    }

    /// Purification on 2s modes with the reflected reference convention
    /// Delta_2 = -Delta: blocks alpha_1 = alpha_2 = alpha and off-diagonal
    /// beta = Delta sqrt(-(Delta^{-1} alpha)^2 - I/4).
    pub fn purify(&self) -> Result<GaussianState> {
        let beta = self.purification_offdiag()?;
        let a = self.cov.matrix();
        let dim = a.nrows();
        let mut joint = DMatrix::zeros(2 * dim, 2 * dim);
        joint.view_mut((0, 0), (dim, dim)).copy_from(a);
        joint.view_mut((0, dim), (dim, dim)).copy_from(&beta);
        joint.view_mut((dim, 0), (dim, dim)).copy_from(&beta.transpose());
        joint.view_mut((dim, dim), (dim, dim)).copy_from(a);
        let form = self.form.direct_sum(&self.form.reflected())?;
        let mut mean = DVector::zeros(2 * dim);
        mean.rows_mut(0, dim).copy_from(&self.mean);
        mean.rows_mut(dim, dim).copy_from(&self.mean);
        Ok(GaussianState::new_unchecked(
            mean,
            CovarianceMatrix::new(joint)?,
            form,
        ))
    }

    /// The purification off-diagonal block beta, computed through the
    /// alpha^{1/2}-similarity so only symmetric eigenproblems arise.
    pub(crate) fn purification_offdiag(&self) -> Result<DMatrix<f64>> {
        let ridge = RIDGE * self.form.hbar();
        let root = sym_sqrt(self.cov.matrix(), ridge)?;
        let root_inv = sym_func(self.cov.matrix(), ridge, |x| 1.0 / x.sqrt())?;
        let anti = &root * self.form.inverse() * &root;
        // -(A)^2 - I/4 = A^T A - I/4, symmetric; clamp the exact-boundary
        // negatives produced by pure modes.
        let dim = anti.nrows();
        let x = anti.transpose() * &anti - DMatrix::identity(dim, dim) * 0.25;
        let sqrt_x = sym_func(&x, 0.0, |v| v.max(0.0).sqrt())?;
        Ok(self.form.matrix() * root_inv * sqrt_x * root)
    }

    /// Restriction to the first `modes` modes (diagonal block).
    pub fn restrict_first(&self, modes: usize) -> Result<GaussianState> {
        if modes == 0 || modes > self.modes() {
            return Err(Error::InvalidArgument("invalid restriction".into()));
        }
        // Only meaningful when the form is block-diagonal across the cut.
        let dim = 2 * modes;
        let cov = CovarianceMatrix::new(self.cov.matrix().view((0, 0), (dim, dim)).into())?;
        let form = SymplecticForm::from_matrix(
            self.form.matrix().view((0, 0), (dim, dim)).into(),
            self.form.hbar(),
        )?;
        Ok(GaussianState::new_unchecked(
            self.mean.rows(0, dim).into(),
            cov,
            form,
        ))
    }

    /// Restriction to the modes after the first `modes` modes.
    pub fn restrict_last(&self, modes: usize) -> Result<GaussianState> {
        if modes == 0 || modes > self.modes() {
            return Err(Error::InvalidArgument("invalid restriction".into()));
        }
        let skip = 2 * (self.modes() - modes);
        let dim = 2 * modes;
        let cov = CovarianceMatrix::new(self.cov.matrix().view((skip, skip), (dim, dim)).into())?;
        let form = SymplecticForm::from_matrix(
            self.form.matrix().view((skip, skip), (dim, dim)).into(),
            self.form.hbar(),
        )?;
        Ok(GaussianState::new_unchecked(
            self.mean.rows(skip, dim).into(),
            cov,
            form,
        ))
    }

    /// Quantum characteristic function phi(z) = exp(i m^T z - z^T alpha z / 2).
    pub fn char_fn(&self, z: &DVector<f64>) -> Complex64 {
        let quad = (z.transpose() * self.cov.matrix() * z)[(0, 0)];
        let phase = self.mean.dot(z);
        (Complex64::new(0.0, phase) - Complex64::new(0.5 * quad, 0.0)).exp()
    }
}

/// Gauge-invariant state described by its Hermitian PSD photon-number
/// matrix N.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeInvariantState {
    n: DMatrix<Complex64>,
}

impl GaugeInvariantState {
    pub fn new(n: DMatrix<Complex64>) -> Result<Self> {
        if n.nrows() != n.ncols() || n.nrows() == 0 {
            return Err(Error::InvalidArgument("N must be square and nonempty".into()));
        }
        let scale = n.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let herm_err = (&n - n.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > 1e-10 * scale {
            return Err(Error::InvalidArgument(format!(
                "N is not Hermitian (deviation {herm_err:.3e})"
            )));
        }
        let eig = n.clone().symmetric_eigen();
        if eig.eigenvalues.min() < -1e-10 * scale {
            return Err(Error::InvalidArgument(
                "N must be positive semidefinite".into(),
            ));
        }
        Ok(Self { n })
    }

    pub fn photon_matrix(&self) -> &DMatrix<Complex64> {
        &self.n
    }

    pub fn modes(&self) -> usize {
        self.n.nrows()
    }
}

/// The real-covariance correspondence alpha <-> hbar (N + I/2) for
/// gauge-invariant states, built in the interleaved (q, p) ordering so the
/// canonical form applies.
pub fn gauge_to_real(gi: &GaugeInvariantState, hbar: f64) -> Result<GaussianState> {
    let s = gi.modes();
    let form = SymplecticForm::canonical(s, hbar)?;
    let mut a = DMatrix::zeros(2 * s, 2 * s);
    for j in 0..s {
        for k in 0..s {
            let njk = gi.n[(j, k)];
            let re = njk.re + if j == k { 0.5 } else { 0.0 };
            let im = njk.im;
            a[(2 * j, 2 * k)] = hbar * re;
            a[(2 * j + 1, 2 * k + 1)] = hbar * re;
            a[(2 * j, 2 * k + 1)] = -hbar * im;
            a[(2 * j + 1, 2 * k)] = hbar * im;
        }
    }
    GaussianState::new(DVector::zeros(2 * s), CovarianceMatrix::new(a)?, form)
}

/// Trace norm of the formal thermal operator rho_gamma: max{1, 1/(2 gamma)}.
/// Equals 1 exactly when gamma >= 1/2, i.e. when rho_gamma is a state.
pub fn thermal_trace_norm(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "thermal parameter must be positive, got {gamma}"
        )));
    }
    Ok(1.0f64.max(1.0 / (2.0 * gamma)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::symplectic::symplectic_spectrum;

    #[test]
    fn g_at_landmarks() {
        assert_eq!(g_function(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(g_function(1.0).unwrap(), 2.0, epsilon = 1e-14);
        let g36 = g_function(0.36).unwrap();
        assert!(g36 > 1.13 && g36 < 1.14, "g(0.36) = {g36}");
        assert!(g_function(-0.1).is_err());
    }

    #[test]
    fn g_small_argument_asymptotics() {
        // g(x) ~ x (log2 e - log2 x) for x -> 0
        for x in [1e-7f64, 1e-9, 1e-11] {
            let expect = x * (std::f64::consts::LOG2_E - x.log2());
            let got = g_function(x).unwrap();
            assert!((got - expect).abs() / expect < 1e-6, "x={x}: {got} vs {expect}");
        }
    }

    #[test]
    fn g_matches_geometric_series_entropy() {
        // Entropy of the geometric photon-number distribution, summed to
        // cutoff 60, against the closed form.
        for n in [0.3f64, 1.0, 2.0] {
            let mut h = 0.0;
            for j in 0..60u32 {
                let p = (1.0 / (n + 1.0)) * (n / (n + 1.0)).powi(j as i32);
                if p > 0.0 {
                    h -= p * p.log2();
                }
            }
            assert_abs_diff_eq!(h, g_function(n).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn entropy_of_vacuum_and_thermal() {
        assert_abs_diff_eq!(
            GaussianState::vacuum(1, 1.0).unwrap().entropy().unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            GaussianState::thermal(1.0, 1.0).unwrap().entropy().unwrap(),
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn entropy_additive_over_product() {
        let st = GaussianState::thermal_multi(&[1.0, 0.0], 1.0).unwrap();
        assert_abs_diff_eq!(st.entropy().unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_in_nats() {
        let st = GaussianState::thermal(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            st.entropy_in(LogBase::Nats).unwrap(),
            2.0 * std::f64::consts::LN_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn purity_checks() {
        assert!(GaussianState::vacuum(1, 1.0).unwrap().is_pure().unwrap());
        assert!(!GaussianState::thermal(1.0, 1.0).unwrap().is_pure().unwrap());
    }

    #[test]
    fn purify_thermal_is_pure_and_restricts_back() {
        let st = GaussianState::thermal(1.0, 1.0).unwrap();
        let pure = st.purify().unwrap();
        assert_eq!(pure.modes(), 2);
        assert!(pure.is_pure().unwrap());
        let back = pure.restrict_first(1).unwrap();
        assert!((back.cov().matrix() - st.cov().matrix()).amax() < 1e-9);
        // Off-diagonal block is Delta * sqrt(gamma^2 - 1/4) for thermal states.
        let gamma: f64 = 1.5;
        let expect = (gamma * gamma - 0.25).sqrt();
        let beta = st.purification_offdiag().unwrap();
        assert_abs_diff_eq!(beta[(0, 1)].abs(), expect, epsilon = 1e-9);
        assert_abs_diff_eq!(beta[(1, 0)].abs(), expect, epsilon = 1e-9);
        assert!(beta[(0, 0)].abs() < 1e-9);
        // beta is antisymmetric in the reflected convention.
        assert!((beta.transpose() + &beta).amax() < 1e-9);
    }

    #[test]
    fn purify_vacuum_has_zero_offdiagonal() {
        let st = GaussianState::vacuum(1, 1.0).unwrap();
        let beta = st.purification_offdiag().unwrap();
        assert!(beta.amax() < 1e-5, "beta = {beta}");
    }

    #[test]
    fn purify_marginals_share_entropy() {
        let st = GaussianState::thermal_multi(&[0.8, 0.1], 1.0).unwrap();
        let pure = st.purify().unwrap();
        let h1 = pure.restrict_first(2).unwrap().entropy().unwrap();
        let h2 = pure.restrict_last(2).unwrap().entropy().unwrap();
        assert_abs_diff_eq!(h1, h2, epsilon = 1e-9);
        assert_abs_diff_eq!(h1, st.entropy().unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn gauge_correspondence_matches_sqrt_pattern() {
        // Extended matrix off-diagonal sqrt(N^2 + N) for gauge-invariant N.
        let n = 1.0;
        let st = GaussianState::thermal(n, 1.0).unwrap();
        let beta = st.purification_offdiag().unwrap();
        assert_abs_diff_eq!(beta[(0, 1)].abs(), (n * n + n).sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn gauge_to_real_cases() {
        let one = GaugeInvariantState::new(DMatrix::from_element(
            1,
            1,
            Complex64::new(1.0, 0.0),
        ))
        .unwrap();
        let st = gauge_to_real(&one, 1.0).unwrap();
        let spec = symplectic_spectrum(st.cov(), st.form()).unwrap();
        assert_abs_diff_eq!(spec.gammas()[0], 1.5, epsilon = 1e-12);

        let zero = GaugeInvariantState::new(DMatrix::from_element(
            1,
            1,
            Complex64::new(0.0, 0.0),
        ))
        .unwrap();
        let vac = gauge_to_real(&zero, 1.0).unwrap();
        assert!(vac.is_pure().unwrap());

        let two = GaugeInvariantState::new(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]),
        ))
        .unwrap();
        let st2 = gauge_to_real(&two, 1.0).unwrap();
        let spec2 = symplectic_spectrum(st2.cov(), st2.form()).unwrap();
        assert_abs_diff_eq!(spec2.gammas()[0], 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spec2.gammas()[1], 1.5, epsilon = 1e-12);
    }

    #[test]
    fn gauge_invariant_rejects_non_hermitian() {
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.1, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(GaugeInvariantState::new(bad).is_err());
    }

    #[test]
    fn char_fn_values() {
        let st = GaussianState::thermal(0.0, 1.0).unwrap();
        let zero = DVector::zeros(2);
        assert_abs_diff_eq!(st.char_fn(&zero).re, 1.0, epsilon = 1e-15);
        let z = DVector::from_vec(vec![2.0f64.sqrt(), 0.0]);
        assert_abs_diff_eq!(st.char_fn(&z).re, (-0.5f64).exp(), epsilon = 1e-12);

        let th = GaussianState::thermal(1.0, 1.0).unwrap();
        let z2 = DVector::from_vec(vec![0.3, -0.4]);
        let expect = (-0.5 * 1.5 * 0.25f64).exp();
        assert_abs_diff_eq!(th.char_fn(&z2).re, expect, epsilon = 1e-12);
    }

    #[test]
    fn thermal_trace_norm_values() {
        assert_abs_diff_eq!(thermal_trace_norm(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_trace_norm(0.25).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(thermal_trace_norm(3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(thermal_trace_norm(0.0).is_err());
    }
}
