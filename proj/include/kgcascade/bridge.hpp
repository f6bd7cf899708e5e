#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kgcascade/lattice.hpp"
#include "kgcascade/nls.hpp"
#include "kgcascade/spectral.hpp"

namespace kgc {

// Small-amplitude scaling Q = mu^alpha q(t, mu j). The continuum variable
// y = mu j has period 2; the NLS solver works on the 2 pi torus z = pi y.
struct RegimeParams {
    int d = 1;
    int ell = 1;
    double beta = 1.0;
    double alpha = 0.75;
    double mu = 2.0 / 129.0;
    double eps_derived = 0.0; // mu^{2(1 - ell alpha)}
    double delta = 0.9;
    double m = 3.0;
    double s = 1.0;
    double lambda = 0.1;
    double nu_exp = 0.0;      // ell alpha - 1
    double alpha_tilde = 1.0 / 16.0; // alpha_1 = 1/ell - alpha_tilde

    static RegimeParams make(int d, int ell, double beta, double alpha, double mu, double delta, double m,
                             double s, double lambda, double alpha_tilde = -1.0);

    // Dispersion coefficient seen by the NLS solver on the 2 pi torus: pi^2 eps_derived.
    double eps_torus() const;
    // beta binom(2 ell + 2, ell + 1) / 2^{ell+1}: nonlinear coefficient in rescaled time.
    double beta_eff() const;
    double tau_of_t(double t) const;
    double t_of_tau(double tau) const;
    NLSParams nls_params() const;
    // mu^{-(1 - delta)}
    double low_cutoff() const;
    // T0 mu^{-2(nu lambda + ell alpha (1 - nu lambda))}, nu = 2 ell + 1/m
    double validity_horizon(double T0 = 1.0) const;
};

struct RegimeCheckItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct RegimeReport {
    std::vector<RegimeCheckItem> items;
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double delta0 = 0.0;
    bool all_pass() const;
};

// The four branches of the alpha0 lower bound, in order.
std::vector<double> alpha0_branches(double m, int d, int ell, double lambda);
double alpha0(double m, int d, int ell, double lambda);
double delta01(double m, int d, int ell, double lambda, double alpha1);
double delta02(double m, int d, int ell, double lambda, double alpha1);
RegimeReport regime_check(const RegimeParams& r);

// Continuum Fourier coefficients in lattice normalization, q_hat_K = mu^{d/2 - alpha} Q_hat_k,
// on a centered box that may extend past the lattice.
struct ContinuumModes {
    CenteredBox box;
    std::vector<cplx> qhat;
    std::vector<cplx> phat;
};

ContinuumModes lattice_to_continuum_modes(const ModeSpectrum& spec, const RegimeParams& r, const LatticeGrid& grid);
// Exact inverse of lattice_to_continuum_modes (box must equal the lattice box).
ModeSpectrum continuum_to_lattice_modes(const ContinuumModes& c, const RegimeParams& r, const LatticeGrid& grid);
// 1/2 sum_L |p_{K+L}|^2 + omega_k^2 |q_{K+L}|^2 over L in (2N+1) Z^d inside the data box: E_kappa/mu^{2 alpha}
// for the single lattice mode k = K.
double aliased_specific_energy(const ContinuumModes& c, const std::vector<int>& K, const RegimeParams& r,
                               const LatticeGrid& grid);

// xi~_K = q_K - i p_K = sqrt2 pi^{-d/2} e^{i t} xi^{nls}_K.
ContinuumModes continuum_from_nls(const NLSState& s, double t);
// Lattice state -> NLS coefficients on |h_i| <= H at the state's time (inverse of the above on the box).
NLSState nls_from_lattice(const LatticeState& s, const RegimeParams& r, const LatticeGrid& grid, int H);

struct ApproxLattice {
    LatticeState state;
    bool beyond_horizon = false;
    double max_imag = 0.0; // largest imaginary residue of the sampled fields
};
// Q_a = mu^alpha q_a(t, mu j), P_a likewise, with q_a + i... from psi = e^{it} phi(tau).
ApproxLattice build_approximate_lattice_solution(const NLSState& s, const RegimeParams& r, const LatticeGrid& grid,
                                                 double t, double T0 = 1.0);

// sup_j |Q_j - Qa_j| + |P_j - Pa_j|
double approximation_error(const LatticeState& a, const LatticeState& b);

// 1/2 sum over the sign orbit of K of |xi~|^2: the continuum prediction of E_kappa/mu^{2 alpha}.
double continuum_orbit_energy(const ContinuumModes& c, const std::vector<int>& K);

struct SpectralComparison {
    double low_mode_error_max = 0.0; // max over |K| <= cutoff of |E_kappa/mu^{2alpha} - orbit prediction|
    double high_mode_mass = 0.0;     // sum over |K| > cutoff of E_kappa / mu^{2 alpha}
};
SpectralComparison compare_spectra(const SpecificSpectrum& lattice_spec, const ContinuumModes& c,
                                   const RegimeParams& r, const LatticeGrid& grid);

struct CoevolveConfig {
    int N = 64;
    RegimeParams regime;
    double C0 = 1.0;
    std::vector<int> k0{1};
    int H_nls = 32;
    double tau_end = 1.0;
    int n_sync = 5;
    double dt = 0.0;     // 0 -> lattice default
    double dtau = 1e-3;
    double monitor_factor = 100.0; // abort when the l1_s norm of the NLS state grows past this factor
    double guard_tol = 1e-10;
    double T0 = 1.0;
};

struct SyncRecord {
    double t = 0.0;
    double tau = 0.0;
    double sup_error = 0.0;
    double low_mode_error_max = 0.0;
    double high_mode_mass = 0.0;
    double cascade_metric = 0.0;      // cutoff mu^{-(1-delta)}, weight m
    double cascade_metric_all = 0.0;  // same weight, no cutoff
    double energy = 0.0;
    double energy_drift = 0.0;        // |H(t) - H(0)|/|H(0)|
    double nls_l1s_ratio = 1.0;
    bool beyond_horizon = false;
};

// KG lattice in t against the NLS in tau = mu^{2 ell alpha} t/2 from the single-mode datum,
// compared at n_sync equally spaced tau points (t=0 record first).
std::vector<SyncRecord> coevolve(const CoevolveConfig& cfg,
                                 const std::function<void(const SyncRecord&)>& observer = {});

} // namespace kgc
