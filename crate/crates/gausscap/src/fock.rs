//! Brute-force verification layer in a truncated number basis: thermal
//! states, attenuation by Kraus ladder and by beamsplitter dilation,
//! classical noise by Gauss-Hermite quadrature over displacements, joint
//! (channel x identity) action on purifications, and the non-Gaussian
//! perturbation probe.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaussian_state::g_unchecked;

type CMatrix = DMatrix<Complex64>;

const HERM_TOL: f64 = 1e-12;
const THERMAL_LEAK_TOL: f64 = 1e-8;
const CHANNEL_LEAK_TOL: f64 = 1e-6;
/// Joint two-mode computations cap the per-mode dimension to keep the
/// eigenproblems at desk scale.
pub const JOINT_CUTOFF: usize = 30;

/// Density matrix on the span of |0>..|cutoff-1>. The trace may fall
/// short of one; the shortfall (truncation leak) is reported, never
/// renormalized away.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    cutoff: usize,
    matrix: CMatrix,
}

impl FockDensity {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let cutoff = matrix.nrows();
        if cutoff == 0 || matrix.ncols() != cutoff {
            return Err(Error::InvalidArgument(
                "density matrix must be square and nonempty".into(),
            ));
        }
        let herm_err = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_err > HERM_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian (deviation {herm_err:.3e})"
            )));
        }
        let eig = matrix.clone().symmetric_eigen();
        if eig.eigenvalues.min() < -1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {:.3e}",
                eig.eigenvalues.min()
            )));
        }
        let tr = matrix.trace().re;
        if tr > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument(format!("trace {tr} exceeds one")));
        }
        Ok(Self { cutoff, matrix })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Probability mass lost to the truncation.
    pub fn leak(&self) -> f64 {
        (1.0 - self.trace()).max(0.0)
    }

    pub fn mean_photons(&self) -> f64 {
        (0..self.cutoff)
            .map(|n| n as f64 * self.matrix[(n, n)].re)
            .sum()
    }
}

/// Plain operator on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub cutoff: usize,
    pub matrix: CMatrix,
}

pub fn annihilation(cutoff: usize) -> FockOperator {
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    FockOperator { cutoff, matrix: m }
}

/// Displacement D(z) = exp(z a^dag - conj(z) a), exact in the truncated
/// space via the Hermitian eigenbasis of i(z a^dag - conj(z) a).
pub fn displacement(z: Complex64, cutoff: usize) -> FockOperator {
    let a = annihilation(cutoff).matrix;
    let gen = a.adjoint() * z - &a * z.conj();
    let h = gen.map(|x| x * Complex64::i());
    let eig = h.symmetric_eigen();
    let phases = DVector::from_iterator(
        cutoff,
        eig.eigenvalues.iter().map(|&l| (-Complex64::i() * l).exp()),
    );
    let u = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
    FockOperator { cutoff, matrix: u }
}

/// Geometric (thermal) state with mean photon number `n_mean`.
pub fn thermal_fock(n_mean: f64, cutoff: usize) -> Result<FockDensity> {
    if !(n_mean >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mean photon number must be nonnegative, got {n_mean}"
        )));
    }
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    let mut m = CMatrix::zeros(cutoff, cutoff);
    if n_mean == 0.0 {
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        return FockDensity::new(m);
    }
    let q = n_mean / (n_mean + 1.0);
    let leak = q.powi(cutoff as i32);
    if leak >= THERMAL_LEAK_TOL {
        let required = (THERMAL_LEAK_TOL.ln() / q.ln()).ceil() as usize + 1;
        return Err(Error::CutoffTooSmall {
            msg: format!("thermal tail at n_mean = {n_mean} leaks {leak:.3e}"),
            required,
        });
    }
    let mut p = 1.0 / (n_mean + 1.0);
    for n in 0..cutoff {
        m[(n, n)] = Complex64::new(p, 0.0);
        p *= q;
    }
    FockDensity::new(m)
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &FockDensity) -> f64 {
    vn_entropy_matrix(&rho.matrix)
}

fn vn_entropy_matrix(m: &CMatrix) -> f64 {
    // For a Hermitian positive semidefinite matrix the singular values
    // are the eigenvalues; the SVD is far more robust here than the
    // Hermitian eigensolver on the low-rank joint matrices.
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

fn binom(n: usize, m: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 0..m {
        c *= (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Kraus ladder of the attenuation channel with transmission amplitude k.
fn attenuation_kraus(k: f64, cutoff: usize) -> Vec<CMatrix> {
    let loss = 1.0 - k * k;
    let mut ops = Vec::with_capacity(cutoff);
    for m in 0..cutoff {
        let mut a = CMatrix::zeros(cutoff, cutoff);
        for n in m..cutoff {
            let amp2 = binom(n, m) * loss.powi(m as i32) * (k * k).powi((n - m) as i32);
            a[(n - m, n)] = Complex64::new(amp2.sqrt(), 0.0);
        }
        ops.push(a);
    }
    ops
}

fn check_channel_leak(before: f64, out: &CMatrix, cutoff: usize) -> Result<()> {
    let lost = before - out.trace().re;
    if lost > CHANNEL_LEAK_TOL {
        return Err(Error::CutoffTooSmall {
            msg: format!("channel application leaked {lost:.3e}"),
            required: cutoff * 2,
        });
    }
    Ok(())
}

/// Attenuation by the Kraus ladder.
pub fn attenuate_fock(rho: &FockDensity, k: f64) -> Result<FockDensity> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "oracle attenuation needs 0 <= k <= 1, got {k}"
        )));
    }
    let cutoff = rho.cutoff;
    let mut out = CMatrix::zeros(cutoff, cutoff);
    for a in attenuation_kraus(k, cutoff) {
        out += &a * &rho.matrix * a.adjoint();
    }
    check_channel_leak(rho.trace(), &out, cutoff)?;
    FockDensity::new(out)
}

/// Attenuation by the two-mode beamsplitter dilation with vacuum
/// environment: U = exp(theta (a^dag a0 - a a0^dag)), theta = arccos k.
pub fn attenuate_fock_unitary(rho: &FockDensity, k: f64) -> Result<FockDensity> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "oracle attenuation needs 0 <= k <= 1, got {k}"
        )));
    }
    let c = rho.cutoff;
    let theta = k.clamp(0.0, 1.0).acos();
    let a = annihilation(c).matrix;
    let gen = (a.adjoint().kronecker(&a) - a.kronecker(&a.adjoint())) * Complex64::new(theta, 0.0);
    let h = gen.map(|x| x * Complex64::i());
    let eig = h.symmetric_eigen();
    let phases = DVector::from_iterator(
        c * c,
        eig.eigenvalues.iter().map(|&l| (-Complex64::i() * l).exp()),
    );
    let u = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();

    // rho (x) |0><0| on (system, environment) with row-major pairing.
    let mut env = CMatrix::zeros(c, c);
    env[(0, 0)] = Complex64::new(1.0, 0.0);
    let joint = rho.matrix.kronecker(&env);
    let evolved = &u * joint * u.adjoint();
    // Trace out the environment (second factor).
    let mut out = CMatrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            let mut s = Complex64::new(0.0, 0.0);
            for e in 0..c {
                s += evolved[(i * c + e, j * c + e)];
            }
            out[(i, j)] = s;
        }
    }
    check_channel_leak(rho.trace(), &out, c)?;
    FockDensity::new(out)
}

/// Gauss-Hermite nodes and weights for the weight exp(-t^2) on the line,
/// by diagonalizing the Jacobi matrix of the Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        jac[(i - 1, i)] = b;
        jac[(i, i - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            (
                eig.eigenvalues[i],
                std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Kraus-like quadrature decomposition of the classical-noise channel:
/// sqrt(w_i w_j / pi) D(sqrt(nc) (t_i + i t_j)).
fn classical_noise_kraus(nc: f64, node_count: usize, cutoff: usize) -> Vec<CMatrix> {
    let (nodes, weights) = gauss_hermite(node_count);
    let scale = nc.sqrt();
    let mut ops = Vec::with_capacity(node_count * node_count);
    for (i, &ti) in nodes.iter().enumerate() {
        for (j, &tj) in nodes.iter().enumerate() {
            let z = Complex64::new(scale * ti, scale * tj);
            let w = (weights[i] * weights[j] / std::f64::consts::PI).sqrt();
            ops.push(displacement(z, cutoff).matrix * Complex64::new(w, 0.0));
        }
    }
    ops
}

/// Random-displacement channel with complex Gaussian noise of variance nc,
/// integrated by `node_count`^2 Gauss-Hermite nodes.
pub fn classical_noise_fock(rho: &FockDensity, nc: f64, node_count: usize) -> Result<FockDensity> {
    if !(nc >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be nonnegative, got {nc}"
        )));
    }
    if nc == 0.0 {
        return Ok(rho.clone());
    }
    if node_count < 2 {
        return Err(Error::InvalidArgument("need at least 2 quadrature nodes".into()));
    }
    let cutoff = rho.cutoff;
    let mut out = CMatrix::zeros(cutoff, cutoff);
    for d in classical_noise_kraus(nc, node_count, cutoff) {
        out += &d * &rho.matrix * d.adjoint();
    }
    check_channel_leak(rho.trace(), &out, cutoff)?;
    // Quadrature can introduce ~1e-14 asymmetry; fold it back.
    let sym = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    FockDensity::new(sym)
}

/// Trace norm of the formal thermal operator with parameter gamma,
/// summed as a signed geometric series over the number basis.
pub fn trace_norm_fock(gamma: f64, cutoff: usize) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "thermal parameter must be positive, got {gamma}"
        )));
    }
    let q = (gamma - 0.5) / (gamma + 0.5);
    let qa = q.abs();
    if qa > 0.0 {
        let tail = qa.powi(cutoff as i32) / ((1.0 - qa) * (gamma + 0.5));
        if tail > 1e-7 {
            let required =
                ((1e-7 * (1.0 - qa) * (gamma + 0.5)).ln() / qa.ln()).ceil() as usize + 1;
            return Err(Error::CutoffTooSmall {
                msg: format!("trace-norm series tail {tail:.3e} at gamma = {gamma}"),
                required,
            });
        }
    }
    let mut total = 0.0;
    let mut term = 1.0 / (gamma + 0.5);
    for _ in 0..cutoff {
        total += term.abs();
        term *= q;
    }
    Ok(total)
}

/// Channel in the oracle-supported regime: attenuation (k <= 1) possibly
/// followed by classical noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleChannel {
    pub k: f64,
    pub nc: f64,
    pub node_count: usize,
}

impl OracleChannel {
    pub fn new(k: f64, nc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "the oracle supports 0 <= k <= 1, got {k}"
            )));
        }
        if !(nc >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be nonnegative, got {nc}"
            )));
        }
        Ok(Self { k, nc, node_count: 24 })
    }

    fn kraus_sets(&self, cutoff: usize) -> Vec<Vec<CMatrix>> {
        let mut sets = Vec::new();
        if self.k < 1.0 {
            sets.push(attenuation_kraus(self.k, cutoff));
        }
        if self.nc > 0.0 {
            sets.push(classical_noise_kraus(self.nc, self.node_count, cutoff));
        }
        sets
    }

    pub fn apply(&self, rho: &FockDensity) -> Result<FockDensity> {
        let mut cur = rho.clone();
        if self.k < 1.0 {
            cur = attenuate_fock(&cur, self.k)?;
        }
        if self.nc > 0.0 {
            cur = classical_noise_fock(&cur, self.nc, self.node_count)?;
        }
        Ok(cur)
    }

    /// Applies the channel to the first tensor factor of a joint density
    /// matrix with factor dimensions (dim1, dim2), via the superoperator
    /// matrix on reshuffled indices.
    fn apply_mode1(&self, joint: &CMatrix, dim1: usize, dim2: usize) -> Result<CMatrix> {
        let mut cur = joint.clone();
        for kraus in self.kraus_sets(dim1) {
            let mut superop = CMatrix::zeros(dim1 * dim1, dim1 * dim1);
            for a in &kraus {
                superop += a.kronecker(&a.map(|z| z.conj()));
            }
            // R[(a,b),(i2,j2)] = cur[(a,i2),(b,j2)]
            let mut r = CMatrix::zeros(dim1 * dim1, dim2 * dim2);
            for a in 0..dim1 {
                for b in 0..dim1 {
                    for i2 in 0..dim2 {
                        for j2 in 0..dim2 {
                            r[(a * dim1 + b, i2 * dim2 + j2)] =
                                cur[(a * dim2 + i2, b * dim2 + j2)];
                        }
                    }
                }
            }
            let rp = superop * r;
            let mut next = CMatrix::zeros(dim1 * dim2, dim1 * dim2);
            for a in 0..dim1 {
                for b in 0..dim1 {
                    for i2 in 0..dim2 {
                        for j2 in 0..dim2 {
                            next[(a * dim2 + i2, b * dim2 + j2)] =
                                rp[(a * dim1 + b, i2 * dim2 + j2)];
                        }
                    }
                }
            }
            cur = next;
        }
        check_channel_leak(joint.trace().re, &cur, dim1)?;
        Ok((&cur + cur.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Entropy exchange for an arbitrary input: entropy of
    /// (channel x identity) applied to the eigendecomposition purification.
    pub fn exchange_entropy(&self, rho: &FockDensity) -> Result<f64> {
        let dim1 = rho.cutoff;
        if dim1 > JOINT_CUTOFF {
            return Err(Error::InvalidArgument(format!(
                "joint computations support per-mode cutoff up to {JOINT_CUTOFF}, got {dim1}"
            )));
        }
        let eig = rho.matrix.clone().symmetric_eigen();
        let kept: Vec<usize> = (0..dim1).filter(|&i| eig.eigenvalues[i] > 1e-14).collect();
        let dim2 = kept.len();
        let mut psi = DVector::<Complex64>::zeros(dim1 * dim2);
        for (r, &i) in kept.iter().enumerate() {
            let s = eig.eigenvalues[i].sqrt();
            for row in 0..dim1 {
                psi[row * dim2 + r] = eig.eigenvectors[(row, i)] * s;
            }
        }
        let joint = &psi * psi.adjoint();
        let out = self.apply_mode1(&joint, dim1, dim2)?;
        Ok(vn_entropy_matrix(&out))
    }

    /// Quantum mutual information H(rho) + H(T[rho]) - H(rho, T), all
    /// three terms from the Fock machinery.
    pub fn mutual_info(&self, rho: &FockDensity) -> Result<f64> {
        Ok(vn_entropy(rho) + vn_entropy(&self.apply(rho)?) - self.exchange_entropy(rho)?)
    }
}

/// Entropy exchange of the (k, nc) channel on a thermal input, purified
/// as the two-mode squeezed vector with geometric Schmidt coefficients.
pub fn exchange_entropy_fock(k: f64, nc: f64, n_mean: f64, cutoff: usize) -> Result<f64> {
    let ch = OracleChannel::new(k, nc)?;
    let jc = cutoff.min(JOINT_CUTOFF);
    let rho = thermal_fock(n_mean, jc)?;
    ch.exchange_entropy(&rho)
}

/// Outcome of one non-Gaussian perturbation trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult {
    pub i_gaussian: f64,
    pub i_perturbed: f64,
}

/// Builds a non-Gaussian state with the same first and second moments as
/// the thermal input (diagonal shifts constrained to preserve the photon
/// number, plus a |0><2| / |1><3| coherence pair keeping <a^2> = 0) and
/// compares the mutual information against the Gaussian value.
pub fn gaussian_maximality_probe(
    ch: &OracleChannel,
    n_mean: f64,
    seed: u64,
    cutoff: usize,
) -> Result<ProbeResult> {
    let rho = thermal_fock(n_mean, cutoff)?;
    let i_gaussian = ch.mutual_info(&rho)?;

    let support = 6.min(cutoff);
    if support < 4 {
        return Err(Error::InvalidArgument("cutoff too small for the probe".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d: Vec<f64> = (0..support).map(|_| rng.gen_range(-1.0..1.0)).collect();
    // Project out the components changing the trace and the mean photon
    // number.
    let u1: Vec<f64> = vec![1.0 / (support as f64).sqrt(); support];
    let mean_n = (support - 1) as f64 / 2.0;
    let mut u2: Vec<f64> = (0..support).map(|i| i as f64 - mean_n).collect();
    let n2 = u2.iter().map(|x| x * x).sum::<f64>().sqrt();
    u2.iter_mut().for_each(|x| *x /= n2);
    for u in [&u1, &u2] {
        let p: f64 = d.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        for (x, b) in d.iter_mut().zip(u.iter()) {
            *x -= p * b;
        }
    }
    let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c02: f64 = rng.gen_range(-1.0..1.0);
    if dn < 1e-8 && c02.abs() < 1e-8 {
        return Err(Error::PerturbationRejected(
            "random direction projected to zero".into(),
        ));
    }
    // sqrt(2) c02 + sqrt(6) c13 = 0 keeps <a^2> at zero.
    let c13 = -c02 * (2.0f64 / 6.0).sqrt();
    let mut pert = CMatrix::zeros(cutoff, cutoff);
    for (i, &x) in d.iter().enumerate() {
        pert[(i, i)] = Complex64::new(x, 0.0);
    }
    pert[(0, 2)] = Complex64::new(c02, 0.0);
    pert[(2, 0)] = Complex64::new(c02, 0.0);
    pert[(1, 3)] = Complex64::new(c13, 0.0);
    pert[(3, 1)] = Complex64::new(c13, 0.0);

    // Largest step keeping the state positive semidefinite.
    let mut t = 0.25 * rho.matrix[(support - 1, support - 1)].re;
    let mut accepted = None;
    for _ in 0..40 {
        let cand = &rho.matrix + &pert * Complex64::new(t, 0.0);
        let min_eig = cand.clone().symmetric_eigen().eigenvalues.min();
        if min_eig >= -1e-14 {
            accepted = Some(cand);
            break;
        }
        t *= 0.5;
    }
    let cand = accepted.ok_or_else(|| {
        Error::PerturbationRejected("no positive step size found".into())
    })?;
    let rho_p = FockDensity::new(cand)?;
    debug_assert!((rho_p.mean_photons() - rho.mean_photons()).abs() < 1e-10);
    let i_perturbed = ch.mutual_info(&rho_p)?;
    Ok(ProbeResult {
        i_gaussian,
        i_perturbed,
    })
}

/// Reference entropy of a thermal mode, for comparisons in tests.
pub fn g_bits(x: f64) -> f64 {
    g_unchecked(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::onemode::{report, OneModeParams};

    #[test]
    fn thermal_fock_basics() {
        let vac = thermal_fock(0.0, 10).unwrap();
        assert_abs_diff_eq!(vac.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vn_entropy(&vac), 0.0, epsilon = 1e-12);

        let th = thermal_fock(1.0, 60).unwrap();
        assert!(th.leak() < 1e-8);
        assert_abs_diff_eq!(vn_entropy(&th), 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(th.mean_photons(), 1.0, epsilon = 1e-6);

        match thermal_fock(1.0, 5) {
            Err(Error::CutoffTooSmall { required, .. }) => assert!(required > 5),
            other => panic!("expected cutoff error, got {other:?}"),
        }
    }

    #[test]
    fn vn_entropy_landmarks() {
        let mut m = CMatrix::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = Complex64::new(0.25, 0.0);
        }
        assert_abs_diff_eq!(vn_entropy(&FockDensity::new(m).unwrap()), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn density_validation() {
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(FockDensity::new(bad).is_err());
    }

    #[test]
    fn attenuation_identity_and_dark_limits() {
        let th = thermal_fock(1.0, 40).unwrap();
        let same = attenuate_fock(&th, 1.0).unwrap();
        assert!((same.matrix() - th.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        let dark = attenuate_fock(&th, 0.0).unwrap();
        assert_abs_diff_eq!(dark.matrix()[(0, 0)].re, th.trace(), epsilon = 1e-10);
    }

    #[test]
    fn attenuation_matches_thermal_closed_form() {
        let th = thermal_fock(1.0, 60).unwrap();
        let out = attenuate_fock(&th, 0.8).unwrap();
        assert_abs_diff_eq!(vn_entropy(&out), g_bits(0.64), epsilon = 1e-4);
        assert_abs_diff_eq!(out.mean_photons(), 0.64, epsilon = 1e-6);
    }

    #[test]
    fn kraus_and_unitary_attenuation_agree() {
        // State supported on n <= 8, padded into cutoff 20 so the
        // photon-number-conserving unitary loses nothing.
        let mut m = CMatrix::zeros(20, 20);
        let mut p = 0.5;
        for n in 0..9 {
            m[(n, n)] = Complex64::new(p, 0.0);
            p *= 0.5;
        }
        m[(0, 2)] = Complex64::new(0.05, 0.01);
        m[(2, 0)] = Complex64::new(0.05, -0.01);
        let rho = FockDensity::new(m).unwrap();
        for k in [0.3, 0.8, 0.95] {
            let a = attenuate_fock(&rho, k).unwrap();
            let b = attenuate_fock_unitary(&rho, k).unwrap();
            let diff = (a.matrix() - b.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "paths disagree by {diff} at k = {k}");
        }
    }

    #[test]
    fn gauss_hermite_moments() {
        let (nodes, weights) = gauss_hermite(24);
        let s0: f64 = weights.iter().sum();
        let s2: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
        let rootpi = std::f64::consts::PI.sqrt();
        assert_abs_diff_eq!(s0, rootpi, epsilon = 1e-10);
        assert_abs_diff_eq!(s2, rootpi / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn classical_noise_entropies() {
        let vac = thermal_fock(0.0, 40).unwrap();
        let noisy = classical_noise_fock(&vac, 0.5, 24).unwrap();
        assert_abs_diff_eq!(vn_entropy(&noisy), g_bits(0.5), epsilon = 1e-4);

        let th = thermal_fock(1.0, 60).unwrap();
        let out = classical_noise_fock(&th, 1.0, 24).unwrap();
        assert_abs_diff_eq!(vn_entropy(&out), g_bits(2.0), epsilon = 1e-3);

        let same = classical_noise_fock(&th, 0.0, 24).unwrap();
        assert_eq!(same.matrix(), th.matrix());
    }

    #[test]
    fn purified_marginals_are_symmetric() {
        // Schmidt symmetry: either marginal of the purification carries
        // the input entropy; exchange entropy of the identity channel is 0.
        let rho = thermal_fock(1.0, 30).unwrap();
        let id = OracleChannel::new(1.0, 0.0).unwrap();
        assert_abs_diff_eq!(id.exchange_entropy(&rho).unwrap(), 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(id.mutual_info(&rho).unwrap(), 2.0 * vn_entropy(&rho), epsilon = 1e-7);
    }

    #[test]
    fn exchange_entropy_matches_closed_form() {
        let got = exchange_entropy_fock(0.8, 0.0, 1.0, 60).unwrap();
        assert_abs_diff_eq!(got, g_bits(0.36), epsilon = 1e-3);
    }

    #[test]
    fn exchange_entropy_with_noise_matches_env_route() {
        let got = exchange_entropy_fock(1.0, 0.5, 1.0, 60).unwrap();
        let env = crate::onemode::env_entropy_k1(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(got, env.entropy, epsilon = 1e-3);
    }

    #[test]
    fn oracle_grid_against_closed_forms() {
        for k in [0.5, 0.8, 1.0] {
            for nc in [0.0, 0.5] {
                for n in [0.2, 1.0] {
                    let params = OneModeParams::new(k, nc).unwrap();
                    let rep = report(params, n).unwrap();
                    let rho = thermal_fock(n, 60).unwrap();
                    let ch = OracleChannel::new(k, nc).unwrap();
                    let out = ch.apply(&rho).unwrap();
                    assert_abs_diff_eq!(vn_entropy(&out), rep.h_out, epsilon = 1e-4);
                    let hx = exchange_entropy_fock(k, nc, n, 60).unwrap();
                    assert_abs_diff_eq!(hx, rep.h_exch, epsilon = 1e-3);
                }
            }
        }
    }

    #[test]
    fn trace_norm_series() {
        assert_abs_diff_eq!(trace_norm_fock(0.5, 200).unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(trace_norm_fock(0.25, 200).unwrap(), 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(trace_norm_fock(0.3, 200).unwrap(), 1.0 / 0.6, epsilon = 1e-5);
        assert_abs_diff_eq!(trace_norm_fock(3.0, 200).unwrap(), 1.0, epsilon = 1e-10);
        assert!(trace_norm_fock(1e-4, 50).is_err());
        assert!(trace_norm_fock(0.0, 50).is_err());
    }

    #[test]
    fn probe_inequality_holds() {
        let ch = OracleChannel::new(0.8, 0.0).unwrap();
        for seed in 0..3u64 {
            let res = gaussian_maximality_probe(&ch, 0.8, seed, 24).unwrap();
            assert!(
                res.i_perturbed <= res.i_gaussian + 1e-6,
                "seed {seed}: perturbed {} > gaussian {}",
                res.i_perturbed,
                res.i_gaussian
            );
        }
    }

    #[test]
    fn probe_with_noise_channel() {
        let ch = OracleChannel::new(0.6, 0.3).unwrap();
        let res = gaussian_maximality_probe(&ch, 0.8, 7, 24).unwrap();
        assert!(res.i_perturbed <= res.i_gaussian + 1e-6);
    }

    #[test]
    fn oracle_rejects_amplification() {
        assert!(OracleChannel::new(1.5, 0.0).is_err());
    }
}
