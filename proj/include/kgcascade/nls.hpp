#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "kgcascade/fft.hpp"
#include "kgcascade/numeric.hpp"

namespace kgc {

// -i phi_tau = -eps Lap phi + beta_eff |phi|^{2 ell} phi on the 2 pi torus (defocusing).
struct NLSParams {
    double eps = 1.0;
    int ell = 1;
    double beta_eff = 1.0;

    void validate() const;
};

// phi(z) = (2 pi)^{-d/2} sum_h xi_h e^{i h.z}, |h_i| <= H. On the real-field
// set eta_h = conj(xi_h), so only xi is stored.
struct NLSState {
    CenteredBox box;
    std::vector<cplx> xi;
    double tau = 0.0;

    static NLSState zeros(int H, int d);
    std::vector<cplx> eta() const;
};

double l2_norm(const NLSState& s);
// (sum_h max(1,|h|)^{2m} |xi_h|^2)^{1/2}
double sobolev_norm(const NLSState& s, double m);
// Odd-parity defect max_h |xi_h + xi_{-h}|.
double odd_parity_defect(const NLSState& s);

// Product of sines a prod_i sin(K0_i z_i) scaled to the requested L2 norm.
NLSState nls_single_mode(int H, const std::vector<int>& K0, double l2);
// A e^{i h.z}
NLSState nls_plane_wave(int H, const std::vector<int>& h, cplx A);

class NLSSolver {
public:
    // guard_tol: largest admissible fraction of L2 mass in the top third of the box.
    NLSSolver(int H, int d, const NLSParams& params, double guard_tol = 1e-10);

    NLSState split_step(const NLSState& s, double dtau);
    void advance(NLSState& s, double dtau, std::size_t n);
    // (eps/2) int |grad phi|^2 + beta_eff/(2 ell + 2) int |phi|^{2 ell + 2}
    double hamiltonian(const NLSState& s);
    // Field values on the uniform grid of M points per axis (row-major, z_s = 2 pi s/M).
    std::vector<cplx> physical(const NLSState& s, int M) const;
    // 0.002 / max(1, beta_eff max|phi|^{2 ell}).
    double default_dtau(const NLSState& s);
    double top_third_fraction(const NLSState& s) const;

    int padded_size() const { return Mp_; }
    const NLSParams& params() const { return params_; }
    const CenteredBox& box() const { return box_; }
    std::size_t steps_taken() const { return steps_; }

private:
    void dispersive(NLSState& s, double h);
    void nonlinear(NLSState& s, double h);
    void to_grid(const NLSState& s, FftNd& fft, const std::vector<std::size_t>& raw) const;

    CenteredBox box_;
    NLSParams params_;
    double guard_tol_;
    int Mp_;
    int Me_;
    FftNd pad_;
    FftNd energy_;
    std::vector<std::size_t> raw_pad_;
    std::vector<std::size_t> raw_energy_;
    std::vector<double> h2_;
    std::vector<bool> top_;
    std::vector<cplx> half_phase_;
    double cached_h_ = 0.0;
    std::size_t steps_ = 0;
};

// Threshold of the Kuksin set A: K^{-1/(1-2 ell lam)} eps^{-lam/(1-2 ell lam)} l2^{1/(1-2 ell lam)}.
double kuksin_threshold(double l2, double m, int ell, double lambda, double K, double eps);
bool kuksin_membership(const NLSState& s, double m, int ell, double lambda, double K, double eps);
// (1 - 2^{-2 ell (1 - nu lam)})^{-1} K^{-nu} eps^{-nu lam} r^{-2 ell (1 - nu lam)}, nu = 2 ell + 1/m.
double kuksin_time_bound(double m, int ell, double lambda, double K, double eps, double r);
// (l2 / (K r^{1 - 2 ell lam}))^{1/lam}
double kuksin_eps0(double l2, double r, int ell, double lambda, double K);
// (1/2ell)(1 - B0/(2 ell m)), B0 = d ell + 4 + a
double lambda_star(double m, int d, int ell, double a);
// (1/2) m/(1 + 2 ell m)
double lambda_cap_normalized(double m, int ell);

struct GrowthCertificate {
    enum class Status { Hit, Timeout };
    Status status = Status::Timeout;
    double m = 3.0;
    double lambda = 0.0;
    double K = 1.0;
    double eps = 0.0;
    double r0 = 0.0;
    double l2 = 0.0;
    double threshold = 0.0;
    double t_hit = -1.0;       // entry time into A (Hit only)
    double bound_T = 0.0;
    std::optional<double> t1;  // first time ||phi||_{H^m} >= 2 r0
    double max_norm = 0.0;
    std::optional<NLSState> snapshot; // state at t_hit
};

struct GrowthSample {
    double tau;
    double l2;
    double hm;
    bool in_A;
};

// Integrates until the state has entered A and its H^m norm has doubled, or the
// horizon is reached. The observer, if any, sees every sample_every-th step.
GrowthCertificate detect_growth(const NLSState& state0, const NLSParams& params, double m,
                                double lambda, double K, double horizon, double dtau,
                                const std::function<void(const GrowthSample&)>& observer = {},
                                std::size_t sample_every = 1, double guard_tol = 1e-10);

// Largest K on the grid 10^{j/10} for which a pilot run from state0 starts outside A and
// enters A no later than the time bound. Throws PreconditionError if no grid value qualifies.
double calibrate_kuksin_K(const NLSState& state0, const NLSParams& params, double m, double lambda,
                          double horizon, double dtau, double guard_tol = 1e-10);
// Frozen calibration per (d, ell, m); throws ParameterError for combinations never calibrated.
double frozen_kuksin_K(int d, int ell, double m);
// Pilot used for the frozen table: odd single mode K0 = (1,..,1), unit L2 norm, eps = 1e-4,
// lambda = 0.1, H = 64, dtau = 1e-3, horizon 50.
inline constexpr double kPilotEps = 1e-4;
inline constexpr double kPilotLambda = 0.1;

} // namespace kgc
