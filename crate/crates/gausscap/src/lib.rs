//! Entropy and capacity bounds for bosonic Gaussian channels, validated
//! against a truncated-Fock-space oracle.

pub mod cli;
pub mod error;
pub mod fock;
pub mod gaussian_channel;
pub mod gaussian_state;
pub mod onemode;
pub mod symplectic;

pub use error::{Error, Result};
pub use fock::{
    attenuate_fock, attenuate_fock_unitary, classical_noise_fock, exchange_entropy_fock,
    gauss_hermite, gaussian_maximality_probe, thermal_fock, trace_norm_fock, vn_entropy,
    FockDensity, FockOperator, OracleChannel, ProbeResult,
};
pub use gaussian_channel::{
    photon_number_form, Dilation, GaussianChannel, NoiseDecomposition,
};
pub use gaussian_state::{
    g_function, g_in, gauge_to_real, thermal_trace_norm, GaugeInvariantState, GaussianState,
    LogBase,
};
pub use onemode::{
    asymptotic_gain, default_grid, env_entropy_k1, figure_data, q_g, q_theta_closed, report,
    AsymptoticGain, EnvEntropy, FigureTable, GridSpec, OneModeParams, OneModeReport,
};
pub use symplectic::{
    check_uncertainty, matrix_function, symplectic_spectrum, symplectic_spectrum_eig,
    CovarianceMatrix, MatrixFunction, SymplecticForm, SymplecticSpectrum, UncertaintyReport,
};
