//! Closed forms for the one-mode attenuation/amplification channel with
//! classical noise: entropies, capacity quantities, asymptotics, the k=1
//! environment-entropy cross-check and figure-data grids.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian_state::{g_unchecked, LogBase};

/// Channel parameters: gain k (attenuation k < 1, amplification k > 1)
/// and classical noise variance nc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneModeParams {
    pub k: f64,
    pub nc: f64,
}

impl OneModeParams {
    pub fn new(k: f64, nc: f64) -> Result<Self> {
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
        Ok(Self { k, nc })
    }

    fn is_identity_gain(&self) -> bool {
        (self.k - 1.0).abs() < 1e-12
    }
}

/// Every closed-form quantity for one channel use on a thermal input.
/// Entropic fields are in bits unless rescaled through [`OneModeReport::in_base`].
#[derive(Debug, Clone, PartialEq)]
pub struct OneModeReport {
    pub k: f64,
    pub nc: f64,
    /// Input mean photon number N.
    pub n: f64,
    /// Output mean photon number N' = k^2 N + N'_0.
    pub n_prime: f64,
    /// Output photons for vacuum input, N'_0 = max{0, k^2 - 1} + nc.
    pub n0_prime: f64,
    /// Discriminant D of the exchange-entropy spectrum.
    pub d: f64,
    /// Moduli of the joint-state eigenvalue pairs.
    pub lambda_abs: [f64; 2],
    pub h_in: f64,
    pub h_out: f64,
    pub h_exch: f64,
    /// Entanglement-assisted capacity C_e = h_in + h_out - h_exch.
    pub c_e: f64,
    /// Coherent-state lower bound g(N') - g(N'_0) on the one-shot
    /// classical capacity (conjectured-optimal lower bound).
    pub c1_lower: f64,
    /// Gain of entanglement assistance, c_e / c1_lower.
    pub gain: f64,
    /// Set when c1_lower vanishes and the gain is reported as infinite.
    pub gain_infinite: bool,
    /// Coherent information J = h_out - h_exch.
    pub j: f64,
    /// Large-N limit of J over Gaussian inputs.
    pub q_g: f64,
    /// Transposition bound on the quantum capacity.
    pub q_theta: f64,
}

impl OneModeReport {
    /// Rescales every entropic field from bits into `base`. Ratios and
    /// photon numbers are untouched.
    pub fn in_base(&self, base: LogBase) -> Self {
        let f = base.from_bits();
        Self {
            h_in: self.h_in * f,
            h_out: self.h_out * f,
            h_exch: self.h_exch * f,
            c_e: self.c_e * f,
            c1_lower: self.c1_lower * f,
            j: self.j * f,
            q_g: self.q_g * f,
            q_theta: self.q_theta * f,
            ..self.clone()
        }
    }
}

fn exchange_spectrum(params: OneModeParams, n: f64) -> Result<(f64, f64, f64, f64, f64)> {
    let k2 = params.k * params.k;
    let n0_prime = (k2 - 1.0).max(0.0) + params.nc;
    let n_prime = k2 * n + n0_prime;
    // (n + n' + 1)^2 - 4 k^2 n (n + 1), expanded into nonnegative terms so
    // the large-n limit does not lose digits to cancellation.
    let b = n0_prime + 1.0;
    let d = ((1.0 - k2).powi(2) * n * n + 2.0 * n * ((1.0 + k2) * b - 2.0 * k2) + b * b).sqrt();
    let x1 = (d + n_prime - n - 1.0) / 2.0;
    let x2 = (d - n_prime + n - 1.0) / 2.0;
    for x in [x1, x2] {
        if x < -1e-9 {
            return Err(Error::NumericFailure(format!(
                "exchange-entropy argument {x} is negative at k={}, nc={}, n={n}",
                params.k, params.nc
            )));
        }
    }
    Ok((n_prime, n0_prime, d, x1.max(0.0), x2.max(0.0)))
}

/// Coherent information J(N) in bits, closed form.
fn j_closed(params: OneModeParams, n: f64) -> Result<f64> {
    let (n_prime, _, _, x1, x2) = exchange_spectrum(params, n)?;
    Ok(g_unchecked(n_prime) - g_unchecked(x1) - g_unchecked(x2))
}

/// All closed-form quantities for input photon number `n`.
pub fn report(params: OneModeParams, n: f64) -> Result<OneModeReport> {
    if !(n >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "input photon number must be nonnegative, got {n}"
        )));
    }
    let (n_prime, n0_prime, d, x1, x2) = exchange_spectrum(params, n)?;
    let h_in = g_unchecked(n);
    let h_out = g_unchecked(n_prime);
    let h_exch = g_unchecked(x1) + g_unchecked(x2);
    let c_e = h_in + h_out - h_exch;
    let c1_lower = h_out - g_unchecked(n0_prime);
    let (gain, gain_infinite) = if c1_lower <= 0.0 {
        (f64::INFINITY, true)
    } else {
        (c_e / c1_lower, false)
    };
    Ok(OneModeReport {
        k: params.k,
        nc: params.nc,
        n,
        n_prime,
        n0_prime,
        d,
        lambda_abs: [x1 + 0.5, x2 + 0.5],
        h_in,
        h_out,
        h_exch,
        c_e,
        c1_lower,
        gain,
        gain_infinite,
        j: h_out - h_exch,
        q_g: q_g(params)?,
        q_theta: q_theta_closed(params),
    })
}

/// Large-N limit of the coherent information over Gaussian inputs, in
/// bits: log2 k^2 - log2 |k^2 - 1| - g(nc / |k^2 - 1|) for k != 1. The
/// k = 1 closed form is 0/0; there the N -> infinity limit of J is taken
/// numerically (infinite for the noiseless identity channel).
pub fn q_g(params: OneModeParams) -> Result<f64> {
    if params.is_identity_gain() {
        if params.nc == 0.0 {
            return Ok(f64::INFINITY);
        }
        // J(N) converges like 1/N; double N until stable.
        let mut n = 1e3;
        let mut prev = j_closed(params, n)?;
        for _ in 0..40 {
            n *= 2.0;
            let cur = j_closed(params, n)?;
            if (cur - prev).abs() < 1e-9 {
                return Ok(cur);
            }
            prev = cur;
        }
        return Err(Error::NumericFailure(
            "large-N limit of the coherent information did not stabilize".into(),
        ));
    }
    let k2 = params.k * params.k;
    let dk = (k2 - 1.0).abs();
    if params.k == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(k2.log2() - dk.log2() - g_unchecked(params.nc / dk))
}

/// Transposition bound in bits: max{0, log2(k^2+1) - log2(|k^2-1| + 2 nc)},
/// infinite exactly for the noiseless identity channel.
pub fn q_theta_closed(params: OneModeParams) -> f64 {
    let k2 = params.k * params.k;
    let denom = (k2 - 1.0).abs() + 2.0 * params.nc;
    if denom == 0.0 {
        return f64::INFINITY;
    }
    (((k2 + 1.0) / denom).log2()).max(0.0)
}

/// Result of the explicit k = 1 environment computation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvEntropy {
    pub entropy: f64,
    pub lambda_abs: [f64; 2],
}

/// Entropy of the classical-noise environment at k = 1 from the explicit
/// 4x4 matrices of the function-space representation, with
/// D = sqrt((nc+1)^2 + 4 nc n). Must coincide with the k = 1 exchange
/// entropy.
pub fn env_entropy_k1(n: f64, nc: f64) -> Result<EnvEntropy> {
    if !(nc > 0.0) {
        return Err(Error::InvalidArgument(
            "the environment representation needs nc > 0".into(),
        ));
    }
    if !(n >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "input photon number must be nonnegative, got {n}"
        )));
    }
    let d2 = (nc + 1.0).powi(2) + 4.0 * nc * n;
    #[rustfmt::skip]
    let delta_e = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, -1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
    ]);
    #[rustfmt::skip]
    let alpha_e = 0.5 * DMatrix::from_row_slice(4, 4, &[
        nc, 0.0, 0.0, nc,
        0.0, nc, -nc, 0.0,
        0.0, -nc, d2 / nc, 0.0,
        nc, 0.0, 0.0, d2 / nc,
    ]);
    let m = delta_e.try_inverse().expect("constant invertible matrix") * alpha_e;
    let mut mods: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let lam = [
        0.5 * (mods[0] + mods[1]),
        0.5 * (mods[2] + mods[3]),
    ];
    Ok(EnvEntropy {
        entropy: g_unchecked(lam[0] - 0.5) + g_unchecked(lam[1] - 0.5),
        lambda_abs: lam,
    })
}

/// Low-power asymptotics of the capacities and the gain of entanglement
/// assistance.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticGain {
    /// N k^2 log2((N'_0 + 1) / N'_0).
    pub c1_asym: f64,
    /// -N log2(N) / (N'_0 + 1).
    pub ce_asym: f64,
    /// Exact c1_lower divided by c1_asym.
    pub c1_ratio: f64,
    /// Exact c_e divided by ce_asym.
    pub ce_ratio: f64,
    pub gain_asym: f64,
    pub gain_exact: f64,
}

pub fn asymptotic_gain(params: OneModeParams, n_small: f64) -> Result<AsymptoticGain> {
    if !(n_small > 0.0 && n_small <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "asymptotics hold for 0 < n <= 1e-3, got {n_small}"
        )));
    }
    let rep = report(params, n_small)?;
    if rep.n0_prime <= 0.0 {
        return Err(Error::InvalidArgument(
            "asymptotic formulas need nonzero vacuum output noise".into(),
        ));
    }
    let k2 = params.k * params.k;
    let c1_asym = n_small * k2 * ((rep.n0_prime + 1.0) / rep.n0_prime).log2();
    let ce_asym = -n_small * n_small.log2() / (rep.n0_prime + 1.0);
    Ok(AsymptoticGain {
        c1_asym,
        ce_asym,
        c1_ratio: rep.c1_lower / c1_asym,
        ce_ratio: rep.c_e / ce_asym,
        gain_asym: ce_asym / c1_asym,
        gain_exact: rep.gain,
    })
}

/// Grid for figure generation: `steps` points over `primary` for the x
/// variable, `secondary` for the second axis of the two-parameter map,
/// and the list of input-noise curve parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub steps: usize,
    pub primary: (f64, f64),
    pub secondary: (f64, f64),
    pub n_values: Vec<f64>,
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 steps".into()));
        }
        for (a, b) in [self.primary, self.secondary] {
            if !(a < b) {
                return Err(Error::InvalidArgument(format!(
                    "grid range [{a}, {b}] is empty"
                )));
            }
        }
        Ok(())
    }

    fn points(&self, range: (f64, f64)) -> Vec<f64> {
        let (a, b) = range;
        (0..self.steps)
            .map(|i| a + (b - a) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Tool defaults per figure; the curve-parameter lists are defaults of
/// this tool, not published values.
pub fn default_grid(figure_id: u8) -> Result<GridSpec> {
    let spec = match figure_id {
        1 => GridSpec {
            steps: 300,
            primary: (0.05, 3.0),
            secondary: (0.0, 2.0),
            n_values: vec![0.1, 1.0, 10.0],
        },
        2 => GridSpec {
            steps: 300,
            primary: (1e-3, 2.0),
            secondary: (0.0, 2.0),
            n_values: vec![0.1, 1.0, 10.0],
        },
        3 => GridSpec {
            steps: 300,
            primary: (0.05, 3.0),
            secondary: (0.0, 2.0),
            n_values: vec![1.0],
        },
        4 => GridSpec {
            steps: 300,
            primary: (0.05, 3.0),
            secondary: (0.0, 2.0),
            n_values: vec![0.7],
        },
        5 => GridSpec {
            steps: 50,
            primary: (0.05, 3.0),
            secondary: (0.0, 2.0),
            n_values: vec![],
        },
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown figure id {other} (expected 1..5)"
            )))
        }
    };
    Ok(spec)
}

/// Column-labeled numeric table for one figure.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn n_label(n: f64) -> String {
    format!("n{}", format!("{n}").replace('-', "m"))
}

/// Figure data grids:
/// 1: gain vs k at nc = 0, one column per input noise N;
/// 2: gain vs nc at k = 1;
/// 3: output and exchange entropy vs k at nc = 0;
/// 4: coherent information (N = 0.7), q_g and q_theta vs k at nc = 0;
/// 5: q_g over the (k, nc) plane plus the q_theta > 0 mask, long format.
pub fn figure_data(figure_id: u8, grid: &GridSpec) -> Result<FigureTable> {
    grid.validate()?;
    match figure_id {
        1 | 2 => {
            let mut columns = vec![if figure_id == 1 { "k" } else { "nc" }.to_string()];
            for &n in &grid.n_values {
                columns.push(format!("gain_{}", n_label(n)));
            }
            let mut rows = Vec::with_capacity(grid.steps);
            for x in grid.points(grid.primary) {
                let params = if figure_id == 1 {
                    OneModeParams::new(x, 0.0)?
                } else {
                    OneModeParams::new(1.0, x)?
                };
                let mut row = vec![x];
                for &n in &grid.n_values {
                    row.push(report(params, n)?.gain);
                }
                rows.push(row);
            }
            Ok(FigureTable { columns, rows })
        }
        3 => {
            let mut columns = vec!["k".to_string()];
            for &n in &grid.n_values {
                columns.push(format!("h_out_{}", n_label(n)));
                columns.push(format!("h_exch_{}", n_label(n)));
            }
            let mut rows = Vec::with_capacity(grid.steps);
            for k in grid.points(grid.primary) {
                let params = OneModeParams::new(k, 0.0)?;
                let mut row = vec![k];
                for &n in &grid.n_values {
                    let rep = report(params, n)?;
                    row.push(rep.h_out);
                    row.push(rep.h_exch);
                }
                rows.push(row);
            }
            Ok(FigureTable { columns, rows })
        }
        4 => {
            let n = grid.n_values.first().copied().unwrap_or(0.7);
            let columns = vec![
                "k".to_string(),
                format!("j_{}", n_label(n)),
                "q_g".to_string(),
                "q_theta".to_string(),
            ];
            let mut rows = Vec::with_capacity(grid.steps);
            for k in grid.points(grid.primary) {
                let params = OneModeParams::new(k, 0.0)?;
                let rep = report(params, n)?;
                rows.push(vec![k, rep.j, rep.q_g, rep.q_theta]);
            }
            Ok(FigureTable { columns, rows })
        }
        5 => {
            let columns = ["k", "nc", "q_g_raw", "q_g_clamped", "q_theta_positive"]
                .map(String::from)
                .to_vec();
            let mut rows = Vec::with_capacity(grid.steps * grid.steps);
            for k in grid.points(grid.primary) {
                for nc in grid.points(grid.secondary) {
                    let params = OneModeParams::new(k, nc)?;
                    let qg = q_g(params)?;
                    let qt = q_theta_closed(params);
                    rows.push(vec![
                        k,
                        nc,
                        qg,
                        qg.max(0.0),
                        if qt > 0.0 { 1.0 } else { 0.0 },
                    ]);
                }
            }
            Ok(FigureTable { columns, rows })
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown figure id {other} (expected 1..5)"
        ))),
    }
}
