#include "kgcascade/nls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kgcascade/errors.hpp"

namespace kgc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::size_t> raw_positions(const CenteredBox& box, int M) {
    std::vector<std::size_t> raw(box.size());
    std::vector<int> h(std::size_t(box.dim()));
    for (std::size_t i = 0; i < box.size(); ++i) {
        box.coords(i, h.data());
        std::size_t r = 0;
        for (int a = 0; a < box.dim(); ++a) r = r * std::size_t(M) + std::size_t(((h[std::size_t(a)] % M) + M) % M);
        raw[i] = r;
    }
    return raw;
}
} // namespace

void NLSParams::validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("nls eps must be finite and > 0");
    if (ell < 1) throw ParameterError("nls ell must be >= 1");
    if (!(beta_eff > 0.0) || !std::isfinite(beta_eff)) throw ParameterError("nls beta_eff must be finite and > 0");
}

NLSState NLSState::zeros(int H, int d) {
    NLSState s;
    s.box = CenteredBox(H, d);
    s.xi.assign(s.box.size(), cplx(0.0, 0.0));
    return s;
}

std::vector<cplx> NLSState::eta() const {
    std::vector<cplx> e(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) e[i] = std::conj(xi[i]);
    return e;
}

double l2_norm(const NLSState& s) {
    KahanSum acc;
    for (const auto& x : s.xi) acc += std::norm(x);
    return std::sqrt(acc.value());
}

double sobolev_norm(const NLSState& s, double m) {
    if (!(m >= 0.0)) throw ParameterError("Sobolev index m must be >= 0");
    const int d = s.box.dim();
    std::vector<int> h(static_cast<std::size_t>(d));
    KahanSum acc;
    for (std::size_t i = 0; i < s.xi.size(); ++i) {
        const double a2 = std::norm(s.xi[i]);
        if (a2 == 0.0) continue;
        s.box.coords(i, h.data());
        acc += std::pow(weight_abs(h.data(), d), 2.0 * m) * a2;
    }
    return std::sqrt(acc.value());
}

double odd_parity_defect(const NLSState& s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.xi.size(); ++i)
        worst = std::max(worst, std::abs(s.xi[i] + s.xi[s.box.mirror(i)]));
    return worst;
}

NLSState nls_single_mode(int H, const std::vector<int>& K0, double l2) {
    const int d = int(K0.size());
    NLSState s = NLSState::zeros(H, d);
    for (int c : K0) {
        if (c == 0) throw InvalidModeError("odd sine datum needs every component of K0 nonzero");
        if (std::abs(c) > H) throw InvalidModeError("K0 lies outside the truncation box");
    }
    if (!(l2 >= 0.0)) throw ParameterError("L2 norm must be >= 0");
    // ||a prod sin||_{L2}^2 = a^2 pi^d
    const double a = l2 / std::pow(std::numbers::pi, 0.5 * d);
    const cplx base = std::pow(kTwoPi, 0.5 * d) * a * std::pow(cplx(0.0, 2.0), -d);
    std::vector<int> h(static_cast<std::size_t>(d));
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        double sign = 1.0;
        for (int i = 0; i < d; ++i) {
            const bool neg = (mask >> i) & 1u;
            h[std::size_t(i)] = neg ? -K0[std::size_t(i)] : K0[std::size_t(i)];
            if (neg) sign = -sign;
        }
        s.xi[s.box.flat(h.data())] = base * sign;
    }
    return s;
}

NLSState nls_plane_wave(int H, const std::vector<int>& h, cplx A) {
    const int d = int(h.size());
    NLSState s = NLSState::zeros(H, d);
    if (!s.box.contains(h.data())) throw InvalidModeError("plane-wave mode outside the truncation box");
    s.xi[s.box.flat(h.data())] = std::pow(kTwoPi, 0.5 * d) * A;
    return s;
}

NLSSolver::NLSSolver(int H, int d, const NLSParams& params, double guard_tol)
    : box_(H, d),
      params_(params),
      guard_tol_(guard_tol),
      // Box occupies (ell+1)/(2 ell+1) of the padded grid.
      Mp_(int(std::ceil(double(2 * H + 1) * double(2 * params.ell + 1) / double(params.ell + 1)))),
      // |phi|^{2 ell + 2} has degree (2 ell + 2) H: this grid integrates it exactly.
      Me_((2 * params.ell + 2) * H + 1),
      pad_(std::vector<int>(std::size_t(d), Mp_)),
      energy_(std::vector<int>(std::size_t(d), Me_)) {
    params_.validate();
    raw_pad_ = raw_positions(box_, Mp_);
    raw_energy_ = raw_positions(box_, Me_);
    h2_.resize(box_.size());
    top_.resize(box_.size());
    std::vector<int> h(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < box_.size(); ++i) {
        box_.coords(i, h.data());
        double s2 = 0.0;
        int mx = 0;
        for (int a = 0; a < d; ++a) {
            s2 += double(h[std::size_t(a)]) * double(h[std::size_t(a)]);
            mx = std::max(mx, std::abs(h[std::size_t(a)]));
        }
        h2_[i] = s2;
        top_[i] = 3 * mx > 2 * H;
    }
}

void NLSSolver::to_grid(const NLSState& s, FftNd& fft, const std::vector<std::size_t>& raw) const {
    cplx* b = fft.data();
    std::fill(b, b + fft.size(), cplx(0.0, 0.0));
    const double c = std::pow(kTwoPi, -0.5 * box_.dim());
    for (std::size_t i = 0; i < s.xi.size(); ++i) b[raw[i]] = s.xi[i] * c;
    fft.backward();
}

std::vector<cplx> NLSSolver::physical(const NLSState& s, int M) const {
    FftNd fft(std::vector<int>(std::size_t(box_.dim()), M));
    const auto raw = raw_positions(box_, M);
    to_grid(s, fft, raw);
    return std::vector<cplx>(fft.data(), fft.data() + fft.size());
}

void NLSSolver::dispersive(NLSState& s, double h) {
    if (h != cached_h_ || half_phase_.empty()) {
        half_phase_.resize(box_.size());
        for (std::size_t i = 0; i < box_.size(); ++i)
            half_phase_[i] = std::polar(1.0, params_.eps * h2_[i] * h);
        cached_h_ = h;
    }
    for (std::size_t i = 0; i < s.xi.size(); ++i) s.xi[i] *= half_phase_[i];
}

void NLSSolver::nonlinear(NLSState& s, double h) {
    to_grid(s, pad_, raw_pad_);
    cplx* b = pad_.data();
    const double bh = params_.beta_eff * h;
    for (std::size_t i = 0; i < pad_.size(); ++i) {
        const double a2 = std::norm(b[i]);
        double w = 1.0;
        for (int e = 0; e < params_.ell; ++e) w *= a2;
        b[i] *= std::polar(1.0, bh * w);
    }
    pad_.forward();
    const double c = std::pow(kTwoPi, 0.5 * box_.dim()) / double(pad_.size());
    for (std::size_t i = 0; i < s.xi.size(); ++i) s.xi[i] = b[raw_pad_[i]] * c;
}

void NLSSolver::advance(NLSState& s, double dtau, std::size_t n) {
    if (s.box != box_) throw StructuralError("NLS state box does not match the solver");
    if (!std::isfinite(dtau) || dtau == 0.0) throw ParameterError("dtau must be finite and nonzero");
    for (std::size_t it = 0; it < n; ++it) {
        dispersive(s, 0.5 * dtau);
        nonlinear(s, dtau);
        dispersive(s, 0.5 * dtau);
        s.tau += dtau;
        ++steps_;
        for (const auto& x : s.xi)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw BlowupError("non-finite NLS coefficient", steps_);
        const double frac = top_third_fraction(s);
        if (frac > guard_tol_)
            throw DealiasingError("top third of the NLS box holds a mass fraction " + std::to_string(frac) +
                                  " > " + std::to_string(guard_tol_) + " at step " + std::to_string(steps_) +
                                  "; enlarge the truncation box");
    }
}

NLSState NLSSolver::split_step(const NLSState& s, double dtau) {
    NLSState out = s;
    advance(out, dtau, 1);
    return out;
}

double NLSSolver::top_third_fraction(const NLSState& s) const {
    KahanSum top, all;
    for (std::size_t i = 0; i < s.xi.size(); ++i) {
        const double a2 = std::norm(s.xi[i]);
        all += a2;
        if (top_[i]) top += a2;
    }
    return all.value() > 0.0 ? top.value() / all.value() : 0.0;
}

double NLSSolver::hamiltonian(const NLSState& s) {
    if (s.box != box_) throw StructuralError("NLS state box does not match the solver");
    KahanSum kin;
    for (std::size_t i = 0; i < s.xi.size(); ++i) kin += h2_[i] * std::norm(s.xi[i]);
    to_grid(s, energy_, raw_energy_);
    KahanSum pot;
    const cplx* b = energy_.data();
    for (std::size_t i = 0; i < energy_.size(); ++i) {
        const double a2 = std::norm(b[i]);
        double w = 1.0;
        for (int e = 0; e <= params_.ell; ++e) w *= a2;
        pot += w;
    }
    const double cell = std::pow(kTwoPi / double(Me_), double(box_.dim()));
    return 0.5 * params_.eps * kin.value() +
           params_.beta_eff / double(2 * params_.ell + 2) * cell * pot.value();
}

double NLSSolver::default_dtau(const NLSState& s) {
    to_grid(s, pad_, raw_pad_);
    double amax = 0.0;
    for (std::size_t i = 0; i < pad_.size(); ++i) amax = std::max(amax, std::norm(pad_.data()[i]));
    const double rate = params_.beta_eff * std::pow(amax, double(params_.ell));
    return 0.002 / std::max(1.0, rate);
}

double kuksin_threshold(double l2, double m, int ell, double lambda, double K, double eps) {
    if (!(lambda > 0.0)) throw InvalidExponentError("lambda must be > 0");
    const double den = 1.0 - 2.0 * double(ell) * lambda;
    if (!(den > 0.0)) throw InvalidExponentError("2 ell lambda must be < 1");
    const double nu = 2.0 * double(ell) + 1.0 / m;
    if (!(lambda < 1.0 / nu)) throw ParameterError("lambda must be < 1/nu with nu = 2 ell + 1/m");
    if (!(K > 0.0)) throw ParameterError("Kuksin constant K must be > 0");
    if (!(eps > 0.0)) throw ParameterError("eps must be > 0");
    return std::pow(K, -1.0 / den) * std::pow(eps, -lambda / den) * std::pow(l2, 1.0 / den);
}

bool kuksin_membership(const NLSState& s, double m, int ell, double lambda, double K, double eps) {
    const double thr = kuksin_threshold(l2_norm(s), m, ell, lambda, K, eps);
    return sobolev_norm(s, m) > thr;
}

double kuksin_time_bound(double m, int ell, double lambda, double K, double eps, double r) {
    const double nu = 2.0 * double(ell) + 1.0 / m;
    const double g = 2.0 * double(ell) * (1.0 - nu * lambda);
    return 1.0 / (1.0 - std::pow(2.0, -g)) * std::pow(K, -nu) * std::pow(eps, -nu * lambda) * std::pow(r, -g);
}

double kuksin_eps0(double l2, double r, int ell, double lambda, double K) {
    return std::pow(l2 / (K * std::pow(r, 1.0 - 2.0 * double(ell) * lambda)), 1.0 / lambda);
}

double lambda_star(double m, int d, int ell, double a) {
    if (!(m >= 3.0)) throw DomainError("lambda_star needs m >= 3");
    const double B0 = double(d) * double(ell) + 4.0 + a;
    return (1.0 / (2.0 * ell)) * (1.0 - B0 / (2.0 * ell * m));
}

double lambda_cap_normalized(double m, int ell) { return 0.5 * m / (1.0 + 2.0 * ell * m); }

GrowthCertificate detect_growth(const NLSState& state0, const NLSParams& params, double m,
                                double lambda, double K, double horizon, double dtau,
                                const std::function<void(const GrowthSample&)>& observer,
                                std::size_t sample_every, double guard_tol) {
    params.validate();
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("horizon must be finite and > 0");
    if (!(dtau > 0.0)) throw ParameterError("dtau must be > 0");
    GrowthCertificate cert;
    cert.m = m;
    cert.lambda = lambda;
    cert.K = K;
    cert.eps = params.eps;
    cert.l2 = l2_norm(state0);
    cert.r0 = sobolev_norm(state0, m);
    cert.threshold = kuksin_threshold(cert.l2, m, params.ell, lambda, K, params.eps);
    if (cert.r0 > cert.threshold)
        throw PreconditionError("initial datum already lies in the Kuksin set (eps above eps0)");
    cert.bound_T = kuksin_time_bound(m, params.ell, lambda, K, params.eps, cert.r0);
    cert.max_norm = cert.r0;

    NLSSolver solver(state0.box.half(), state0.box.dim(), params, guard_tol);
    NLSState s = state0;
    if (observer) observer({s.tau, cert.l2, cert.r0, false});
    const std::size_t nsteps = std::size_t(std::ceil(horizon / dtau - 1e-9));
    double prev = cert.r0;
    bool hit = false;
    for (std::size_t it = 1; it <= nsteps; ++it) {
        solver.advance(s, dtau, 1);
        const double hm = sobolev_norm(s, m);
        cert.max_norm = std::max(cert.max_norm, hm);
        const bool inA = hm > cert.threshold;
        if (inA && !hit) {
            hit = true;
            cert.status = GrowthCertificate::Status::Hit;
            cert.t_hit = s.tau;
            cert.snapshot = s;
        }
        if (!cert.t1 && hm >= 2.0 * cert.r0) {
            const double frac = (2.0 * cert.r0 - prev) / (hm - prev);
            cert.t1 = s.tau - dtau + frac * dtau;
        }
        if (observer && (it % sample_every == 0 || it == nsteps)) observer({s.tau, l2_norm(s), hm, inA});
        prev = hm;
        if (hit && cert.t1) break;
    }
    return cert;
}

double calibrate_kuksin_K(const NLSState& state0, const NLSParams& params, double m, double lambda,
                          double horizon, double dtau, double guard_tol) {
    const double l2 = l2_norm(state0);
    const double r0 = sobolev_norm(state0, m);
    // state0 lies outside A iff K <= l2 eps^{-lam} r0^{-(1 - 2 ell lam)}.
    const double edge = l2 * std::pow(params.eps, -lambda) * std::pow(r0, -(1.0 - 2.0 * params.ell * lambda));
    int j = int(std::floor(10.0 * std::log10(edge)));
    if (std::pow(10.0, j / 10.0) >= edge) --j;
    for (int lo = j - 60; j >= lo; --j) {
        const double K = std::pow(10.0, j / 10.0);
        const GrowthCertificate c = detect_growth(state0, params, m, lambda, K, horizon, dtau, {}, 1, guard_tol);
        if (c.status == GrowthCertificate::Status::Hit && c.t_hit <= c.bound_T) return K;
    }
    throw PreconditionError("no K on the calibration grid lets the pilot enter A within the time bound");
}

double frozen_kuksin_K(int d, int ell, double m) {
    if (d == 1 && ell == 1 && m == 3.0) return 1.9952623149688795; // 10^{3/10}
    throw ParameterError("no frozen Kuksin constant for d=" + std::to_string(d) + ", ell=" + std::to_string(ell) +
                         ", m=" + std::to_string(m) + "; set regime.K explicitly");
}

} // namespace kgc
