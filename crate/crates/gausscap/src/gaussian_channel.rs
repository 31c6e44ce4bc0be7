//! Gaussian channels on covariance matrices: channel action, dilations,
//! entropy exchange, mutual and coherent information, complete-positivity
//! via the noise-operator spectrum, transpose composition and the
//! cb-norm bound q_theta.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian_state::{g_unchecked, GaussianState, LogBase};
use crate::symplectic::{
    block_diag, skew_normal_form, symplectic_spectrum, CovarianceMatrix, SymplecticForm,
    GAMMA_TOL, SHAPE_TOL,
};

/// Tolerance for the dilation consistency check and form comparisons.
const FORM_TOL: f64 = 1e-9;

fn check_sym_psd(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > SHAPE_TOL * scale {
        return Err(Error::InvalidArgument(format!("{what} must be symmetric")));
    }
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.min() < -1e-9 * scale {
        return Err(Error::InvalidArgument(format!(
            "{what} must be positive semidefinite (min eigenvalue {:.3e})",
            eig.eigenvalues.min()
        )));
    }
    Ok(())
}

/// Gaussian channel alpha -> K alpha K^T + Y between systems with
/// commutation forms `form_in` and `form_out`. Complete positivity is
/// evaluated once at construction and cached; maps produced by
/// [`GaussianChannel::transpose_compose`] may legitimately cache `false`.
#[derive(Debug, Clone)]
pub struct GaussianChannel {
    k: DMatrix<f64>,
    y: DMatrix<f64>,
    form_in: SymplecticForm,
    form_out: SymplecticForm,
    validity: std::result::Result<bool, Error>,
}

/// Unitary dilation data: the environment coupling K_E together with the
/// environment covariance and commutation form. The environment form may
/// be degenerate or zero (purely classical noise).
#[derive(Debug, Clone)]
pub struct Dilation {
    pub k_e: DMatrix<f64>,
    pub env_cov: CovarianceMatrix,
    pub env_form: DMatrix<f64>,
}

/// Normal-mode data of the noise operator: the difference form and the
/// per-mode thermal parameters gamma_l.
#[derive(Debug, Clone)]
pub struct NoiseDecomposition {
    pub delta_pp: DMatrix<f64>,
    pub mode_gammas: Vec<f64>,
}

impl GaussianChannel {
    pub fn new(
        k: DMatrix<f64>,
        y: DMatrix<f64>,
        form_in: SymplecticForm,
        form_out: SymplecticForm,
    ) -> Result<Self> {
        if k.nrows() != form_out.dim() || k.ncols() != form_in.dim() {
            return Err(Error::InvalidArgument(format!(
                "transfer matrix is {}x{}, expected {}x{}",
                k.nrows(),
                k.ncols(),
                form_out.dim(),
                form_in.dim()
            )));
        }
        if y.nrows() != form_out.dim() || y.ncols() != form_out.dim() {
            return Err(Error::InvalidArgument(
                "noise form must be square on the output space".into(),
            ));
        }
        check_sym_psd(&y, "noise form")?;
        let mut ch = Self {
            k,
            y,
            form_in,
            form_out,
            validity: Ok(false),
        };
        ch.validity = ch.compute_validity();
        Ok(ch)
    }

    /// One-mode attenuation (k < 1) / amplification (k > 1) channel with
    /// classical noise variance nc, in its minimal-noise Gaussian form
    /// Y = hbar (|k^2 - 1|/2 + nc) I.
    pub fn one_mode(k: f64, nc: f64, hbar: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gain must be nonnegative, got {k}"
            )));
        }
        if !(nc >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be nonnegative, got {nc}"
            )));
        }
        let form = SymplecticForm::canonical(1, hbar)?;
        let y = hbar * ((k * k - 1.0).abs() / 2.0 + nc);
        Self::new(
            DMatrix::from_diagonal_element(2, 2, k),
            DMatrix::from_diagonal_element(2, 2, y),
            form.clone(),
            form,
        )
    }

    /// Channel induced by a linear coupling R' = K R + K_E R_E to a
    /// Gaussian environment: Y = K_E alpha_E K_E^T. The commutation form
    /// of the output must reproduce as Delta' = K Delta K^T + K_E Delta_E K_E^T.
    pub fn from_dilation(
        k: DMatrix<f64>,
        dilation: &Dilation,
        form_in: SymplecticForm,
    ) -> Result<Self> {
        let dim_out = k.nrows();
        if dilation.k_e.nrows() != dim_out {
            return Err(Error::InvalidDilation(
                "environment coupling has the wrong output dimension".into(),
            ));
        }
        if dilation.k_e.ncols() != dilation.env_cov.dim()
            || dilation.env_form.nrows() != dilation.env_cov.dim()
        {
            return Err(Error::InvalidDilation(
                "environment matrices have inconsistent dimensions".into(),
            ));
        }
        let form_out_matrix = &k * form_in.matrix() * k.transpose()
            + &dilation.k_e * &dilation.env_form * dilation.k_e.transpose();
        let form_out = SymplecticForm::from_matrix(form_out_matrix, form_in.hbar())
            .map_err(|e| Error::InvalidDilation(format!("output commutation form: {e}")))?;
        let y = &dilation.k_e * dilation.env_cov.matrix() * dilation.k_e.transpose();
        Self::new(k, y, form_in, form_out)
    }

    pub fn transfer(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn noise_form(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn form_in(&self) -> &SymplecticForm {
        &self.form_in
    }

    pub fn form_out(&self) -> &SymplecticForm {
        &self.form_out
    }

    /// Gaussian factor f(z) = exp(-z^T Y z / 2) of the channel on
    /// characteristic functions.
    pub fn noise_char_fn(&self, z: &DVector<f64>) -> f64 {
        (-0.5 * (z.transpose() * &self.y * z)[(0, 0)]).exp()
    }

    fn compute_validity(&self) -> std::result::Result<bool, Error> {
        let hbar = self.form_in.hbar();
        let reversible = self.y.amax() <= 1e-12 * hbar
            && (&self.k * self.form_in.matrix() * self.k.transpose() - self.form_out.matrix())
                .amax()
                <= FORM_TOL * hbar;
        if reversible {
            return Ok(true);
        }
        // Form-preserving K with a vanishing difference form: the channel
        // is a classical Gaussian displacement, CP whenever Y is PSD
        // (checked at construction).
        let delta_pp = self.form_out.matrix()
            - &self.k * self.form_in.matrix() * self.k.transpose();
        if delta_pp.amax() <= FORM_TOL * hbar {
            return Ok(true);
        }
        let nd = self.noise_decomposition(false)?;
        Ok(nd.mode_gammas.iter().all(|&g| g >= 0.5 - GAMMA_TOL))
    }

    /// Complete positivity, as cached at construction: every normal-mode
    /// gamma_l of the noise operator is at least 1/2. Reversible channels
    /// (Y = 0 with symplectic K) short-circuit to true.
    pub fn is_valid_channel(&self) -> Result<bool> {
        self.validity.clone()
    }

    /// Normal-mode decomposition of the noise operator. The difference
    /// form Delta'' = Delta' - K Delta K^T (with Delta sign-reversed when
    /// `transpose_composed`) is brought to canonical shape by a linear
    /// substitution A, and the gamma_l are the symplectic eigenvalues of
    /// A^T Y A.
    pub fn noise_decomposition(&self, transpose_composed: bool) -> Result<NoiseDecomposition> {
        let hbar = self.form_in.hbar();
        let sign = if transpose_composed { -1.0 } else { 1.0 };
        let delta_pp = self.form_out.matrix()
            - sign * (&self.k * self.form_in.matrix() * self.k.transpose());
        let (q, ds) = skew_normal_form(&delta_pp)?;
        let dim = delta_pp.nrows();
        let mut scale = DVector::zeros(dim);
        for (j, &d) in ds.iter().enumerate() {
            let s = (hbar / d).sqrt();
            scale[2 * j] = s;
            scale[2 * j + 1] = s;
        }
        let a = &q * DMatrix::from_diagonal(&scale);
        let noise_cov = CovarianceMatrix::new(a.transpose() * &self.y * &a)?;
        let canon = SymplecticForm::canonical(dim / 2, hbar)?;
        let spec = symplectic_spectrum(&noise_cov, &canon)?;
        Ok(NoiseDecomposition {
            delta_pp,
            mode_gammas: spec.gammas().to_vec(),
        })
    }

    /// Output state: mean K m, covariance K alpha K^T + Y.
    pub fn apply(&self, st: &GaussianState) -> Result<GaussianState> {
        if st.form().dim() != self.form_in.dim() {
            return Err(Error::InvalidArgument(format!(
                "state has {} modes, channel input has {}",
                st.modes(),
                self.form_in.modes()
            )));
        }
        if (st.form().matrix() - self.form_in.matrix()).amax() > FORM_TOL * self.form_in.hbar() {
            return Err(Error::InvalidArgument(
                "state and channel disagree on the input commutation form".into(),
            ));
        }
        let mean = &self.k * st.mean();
        let cov = &self.k * st.cov().matrix() * self.k.transpose() + &self.y;
        Ok(GaussianState::new_unchecked(
            mean,
            CovarianceMatrix::new(cov)?,
            self.form_out.clone(),
        ))
    }

    /// Entropy exchange H(rho, T) in bits: the entropy of the channel
    /// applied to one half of a purification of the input.
    pub fn entropy_exchange(&self, st: &GaussianState) -> Result<f64> {
        if !self.is_valid_channel().unwrap_or(false) {
            return Err(Error::InvalidArgument(
                "entropy exchange requires a completely positive channel".into(),
            ));
        }
        let out = self.apply(st)?;
        let beta = st.purification_offdiag()?;
        let k_beta = &self.k * &beta;
        let dim_out = self.form_out.dim();
        let dim_in = self.form_in.dim();
        let mut joint = DMatrix::zeros(dim_out + dim_in, dim_out + dim_in);
        joint
            .view_mut((0, 0), (dim_out, dim_out))
            .copy_from(out.cov().matrix());
        joint
            .view_mut((0, dim_out), (dim_out, dim_in))
            .copy_from(&k_beta);
        joint
            .view_mut((dim_out, 0), (dim_in, dim_out))
            .copy_from(&k_beta.transpose());
        joint
            .view_mut((dim_out, dim_out), (dim_in, dim_in))
            .copy_from(st.cov().matrix());
        let form12 = self.form_out.direct_sum(&self.form_in.reflected())?;
        let spec = symplectic_spectrum(&CovarianceMatrix::new(joint)?, &form12)?;
        Ok(spec
            .gammas()
            .iter()
            .map(|&g| g_unchecked((g - 0.5).max(0.0)))
            .sum())
    }

    /// Quantum mutual information I(rho, T) = H(rho) + H(T[rho]) - H(rho, T).
    pub fn mutual_info(&self, st: &GaussianState) -> Result<f64> {
        Ok(st.entropy()? + self.coherent_info(st)?)
    }

    /// Coherent information J(rho, T) = H(T[rho]) - H(rho, T); may be
    /// negative.
    pub fn coherent_info(&self, st: &GaussianState) -> Result<f64> {
        Ok(self.apply(st)?.entropy()? - self.entropy_exchange(st)?)
    }

    /// Composition with the transpose operation: same K and Y, with the
    /// sign of the input commutation form reversed. Generally not CP.
    pub fn transpose_compose(&self) -> Self {
        let mut ch = Self {
            k: self.k.clone(),
            y: self.y.clone(),
            form_in: self.form_in.reflected(),
            form_out: self.form_out.clone(),
            validity: Ok(false),
        };
        ch.validity = ch.compute_validity();
        ch
    }

    /// Upper bound on the capacity with error epsilon -> 0:
    /// sum_l log2 max{1, 1/(2 gamma_l)} over the normal modes of the
    /// transpose-composed noise operator. Infinite when some gamma_l = 0.
    pub fn q_theta(&self) -> Result<f64> {
        let nd = self.noise_decomposition(true)?;
        let mut total = 0.0;
        for &g in &nd.mode_gammas {
            if g <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += (1.0f64.max(1.0 / (2.0 * g))).log2();
        }
        Ok(total)
    }

    pub fn q_theta_in(&self, base: LogBase) -> Result<f64> {
        Ok(self.q_theta()? * base.from_bits())
    }

    /// Independent parallel use: block-diagonal K and Y, direct-sum forms.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Self::new(
            block_diag(&self.k, &other.k),
            block_diag(&self.y, &other.y),
            self.form_in.direct_sum(&other.form_in)?,
            self.form_out.direct_sum(&other.form_out)?,
        )
    }

    /// Sequential composition self . inner (inner acts first).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if (inner.form_out.matrix() - self.form_in.matrix()).amax()
            > FORM_TOL * self.form_in.hbar()
        {
            return Err(Error::InvalidArgument(
                "channels are not composable: intermediate forms differ".into(),
            ));
        }
        Self::new(
            &self.k * &inner.k,
            &self.k * &inner.y * self.k.transpose() + &self.y,
            inner.form_in.clone(),
            self.form_out.clone(),
        )
    }

    /// Maximizes the mutual information over product-thermal Gaussian
    /// inputs subject to the energy constraint Sp(energy * alpha) <= budget.
    /// Returns the optimal input and the achieved value in bits.
    ///
    /// The constraint is saturated; energy is shuttled between modes by
    /// golden-section line searches until a full sweep improves the value
    /// by less than 1e-8.
    pub fn maximize_mutual_info_gaussian(
        &self,
        energy: &DMatrix<f64>,
        budget: f64,
    ) -> Result<(GaussianState, f64)> {
        let s = self.form_in.modes();
        let hbar = self.form_in.hbar();
        if energy.nrows() != 2 * s || energy.ncols() != 2 * s {
            return Err(Error::InvalidArgument(
                "energy matrix has the wrong dimension".into(),
            ));
        }
        check_sym_psd(energy, "energy matrix")?;
        if !(budget > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "energy budget must be positive, got {budget}"
            )));
        }
        // Cost per unit (n_j + 1/2) for a thermal mode j.
        let mut costs = Vec::with_capacity(s);
        for j in 0..s {
            let c = hbar * (energy[(2 * j, 2 * j)] + energy[(2 * j + 1, 2 * j + 1)]);
            if c <= 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "energy matrix does not constrain mode {j}"
                )));
            }
            costs.push(c);
        }
        let floor: f64 = costs.iter().map(|c| c / 2.0).sum();
        if budget < floor - 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "budget {budget} is below the vacuum energy {floor}"
            )));
        }

        let objective = |alloc: &[f64]| -> f64 {
            let ns: Vec<f64> = alloc
                .iter()
                .zip(&costs)
                .map(|(e, c)| (e / c - 0.5).max(0.0))
                .collect();
            match GaussianState::thermal_multi(&ns, hbar)
                .and_then(|st| self.mutual_info(&st))
            {
                Ok(v) => v,
                Err(_) => f64::NEG_INFINITY,
            }
        };
        let build = |alloc: &[f64]| -> Result<GaussianState> {
            let ns: Vec<f64> = alloc
                .iter()
                .zip(&costs)
                .map(|(e, c)| (e / c - 0.5).max(0.0))
                .collect();
            GaussianState::thermal_multi(&ns, hbar)
        };

        // Saturate the budget, splitting the surplus evenly.
        let surplus = (budget - floor).max(0.0);
        let mut alloc: Vec<f64> = costs
            .iter()
            .map(|c| c / 2.0 + surplus / s as f64)
            .collect();
        let mut value = objective(&alloc);
        if s == 1 {
            return Ok((build(&alloc)?, value));
        }

        for _sweep in 0..200 {
            let mut improved = 0.0;
            for i in 0..s {
                for j in (i + 1)..s {
                    // Transfer t from mode j to mode i, keeping both above
                    // their vacuum floors.
                    let lo = -(alloc[i] - costs[i] / 2.0);
                    let hi = alloc[j] - costs[j] / 2.0;
                    if hi - lo < 1e-14 {
                        continue;
                    }
                    let f = |t: f64| {
                        let mut a = alloc.clone();
                        a[i] += t;
                        a[j] -= t;
                        objective(&a)
                    };
                    let (t_best, v_best) = golden_max(&f, lo, hi, 60);
                    if v_best > value + 1e-15 {
                        alloc[i] += t_best;
                        alloc[j] -= t_best;
                        improved += v_best - value;
                        value = v_best;
                    }
                }
            }
            if improved < 1e-8 {
                return Ok((build(&alloc)?, value));
            }
        }
        Err(Error::NumericFailure(format!(
            "energy-allocation ascent did not converge in 200 sweeps; best value {value}"
        )))
    }
}

/// Energy matrix whose trace pairing with a covariance counts photons:
/// Sp(energy * alpha) = sum_j (n_j + 1/2) for gauge-invariant alpha.
pub fn photon_number_form(modes: usize, hbar: f64) -> DMatrix<f64> {
    DMatrix::from_diagonal_element(2 * modes, 2 * modes, 1.0 / (2.0 * hbar))
}

/// Golden-section maximization of a unimodal function on [a, b].
fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}
