#include "kgcascade/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kgcascade/errors.hpp"

namespace kgc {

LatticeGrid LatticeGrid::make(int N, int d) {
    if (N < 1) throw ParameterError("grid.N must be >= 1, got " + std::to_string(N));
    if (d < 1 || d > 3) throw ParameterError("grid.d must be 1, 2 or 3, got " + std::to_string(d));
    LatticeGrid g;
    g.N = N;
    g.d = d;
    g.box = CenteredBox(N, d);
    g.Nd = g.box.size();
    g.mu = 2.0 / double(2 * N + 1);
    return g;
}

void KGParams::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ParameterError("beta must be finite and >= 0");
    if (ell < 1) throw ParameterError("ell must be >= 1");
}

double KGParams::potential(double x) const {
    const int deg = 2 * ell + 2;
    return 0.5 * x * x + beta * ipow(x, deg) / double(deg);
}

LatticeState LatticeState::zeros(const LatticeGrid& grid) {
    LatticeState s;
    s.Q.assign(grid.Nd, 0.0);
    s.P.assign(grid.Nd, 0.0);
    return s;
}

void check_state(const LatticeState& s, const LatticeGrid& grid) {
    if (s.Q.size() != grid.Nd || s.P.size() != grid.Nd)
        throw StructuralError("lattice state has " + std::to_string(s.Q.size()) + "/" +
                              std::to_string(s.P.size()) + " entries, grid expects " +
                              std::to_string(grid.Nd));
}

std::vector<double> discrete_laplacian(const std::vector<double>& f, const LatticeGrid& grid) {
    if (f.size() != grid.Nd)
        throw StructuralError("field size " + std::to_string(f.size()) + " does not match grid");
    const int n = grid.side();
    std::vector<double> out(grid.Nd, 0.0);
    std::size_t stride = 1;
    for (int axis = grid.d - 1; axis >= 0; --axis) {
        const std::size_t block = stride * std::size_t(n);
        for (std::size_t idx = 0; idx < grid.Nd; ++idx) {
            const std::size_t c = (idx / stride) % std::size_t(n);
            const std::size_t base = idx - c * stride;
            const std::size_t up = base + ((c + 1) % std::size_t(n)) * stride;
            const std::size_t dn = base + ((c + std::size_t(n) - 1) % std::size_t(n)) * stride;
            out[idx] += f[up] - 2.0 * f[idx] + f[dn];
        }
        stride = block;
    }
    return out;
}

double quadratic_energy(const LatticeState& s, const LatticeGrid& grid) {
    check_state(s, grid);
    const auto lap = discrete_laplacian(s.Q, grid);
    KahanSum h;
    for (std::size_t i = 0; i < grid.Nd; ++i) {
        h += 0.5 * s.P[i] * s.P[i];
        h += -0.5 * s.Q[i] * lap[i];
        h += 0.5 * s.Q[i] * s.Q[i];
    }
    return h.value();
}

double hamiltonian_energy(const LatticeState& s, const KGParams& p, const LatticeGrid& grid) {
    check_state(s, grid);
    const auto lap = discrete_laplacian(s.Q, grid);
    KahanSum h;
    for (std::size_t i = 0; i < grid.Nd; ++i) {
        h += 0.5 * s.P[i] * s.P[i];
        h += -0.5 * s.Q[i] * lap[i];
        h += p.potential(s.Q[i]);
    }
    return h.value();
}

double omega_squared(const int* k, const LatticeGrid& grid) {
    double w2 = 1.0;
    for (int i = 0; i < grid.d; ++i) {
        const double sn = std::sin(double(k[i]) * std::numbers::pi / double(grid.side()));
        w2 += 4.0 * sn * sn;
    }
    return w2;
}

double max_frequency(const LatticeGrid& grid) {
    std::vector<int> k(std::size_t(grid.d), grid.N);
    return std::sqrt(omega_squared(k.data(), grid));
}

double default_dt(const LatticeGrid& grid) { return 0.05 / max_frequency(grid); }

bool cfl_warning(double dt, const LatticeGrid& grid) {
    return std::abs(dt) * max_frequency(grid) > kCflWarn;
}

KGIntegrator::KGIntegrator(const LatticeGrid& grid, const KGParams& params)
    : grid_(grid), params_(params), fft_(std::vector<int>(std::size_t(grid.d), grid.side())) {
    params_.validate();
    const int n = grid.side();
    omega_.resize(grid.Nd);
    partner_.resize(grid.Nd);
    std::vector<int> k(std::size_t(grid.d));
    for (std::size_t r = 0; r < grid.Nd; ++r) {
        std::size_t rem = r;
        std::size_t mirror = 0;
        std::size_t mult = 1;
        for (int i = grid.d - 1; i >= 0; --i) {
            const int ri = int(rem % std::size_t(n));
            rem /= std::size_t(n);
            k[std::size_t(i)] = ri <= grid.N ? ri : ri - n;
            mirror += std::size_t((n - ri) % n) * mult;
            mult *= std::size_t(n);
        }
        omega_[r] = std::sqrt(omega_squared(k.data(), grid));
        partner_[r] = mirror;
    }
    CenteredDft probe(grid.box);
    site_raw_.resize(grid.Nd);
    for (std::size_t i = 0; i < grid.Nd; ++i) site_raw_[i] = probe.raw_of(i);
}

void KGIntegrator::prepare(double dt) {
    if (dt == cached_dt_ && !cos_.empty()) return;
    cos_.resize(grid_.Nd);
    sin_.resize(grid_.Nd);
    for (std::size_t r = 0; r < grid_.Nd; ++r) {
        cos_[r] = std::cos(omega_[r] * dt);
        sin_[r] = std::sin(omega_[r] * dt);
    }
    cached_dt_ = dt;
}

void KGIntegrator::kick(LatticeState& s, double h) const {
    if (params_.beta == 0.0) return;
    for (std::size_t i = 0; i < grid_.Nd; ++i) s.P[i] += h * params_.force(s.Q[i]);
}

void KGIntegrator::rotate(LatticeState& s, double dt) {
    prepare(dt);
    cplx* b = fft_.data();
    for (std::size_t i = 0; i < grid_.Nd; ++i) b[site_raw_[i]] = cplx(s.Q[i], s.P[i]);
    fft_.forward();
    // Z = Q + iP; Qhat_k = (Z_k + conj Z_{-k})/2, Phat_k = (Z_k - conj Z_{-k})/(2i).
    for (std::size_t r = 0; r < grid_.Nd; ++r) {
        const std::size_t m = partner_[r];
        if (m < r) continue;
        const cplx zr = b[r];
        const cplx zm = b[m];
        const double c = cos_[r], sn = sin_[r], w = omega_[r];
        const cplx qr = 0.5 * (zr + std::conj(zm));
        const cplx pr = cplx(0.0, -0.5) * (zr - std::conj(zm));
        const cplx qr2 = c * qr + (sn / w) * pr;
        const cplx pr2 = -w * sn * qr + c * pr;
        b[r] = qr2 + cplx(0.0, 1.0) * pr2;
        if (m != r) {
            const cplx qm = std::conj(qr);
            const cplx pm = std::conj(pr);
            const cplx qm2 = c * qm + (sn / w) * pm;
            const cplx pm2 = -w * sn * qm + c * pm;
            b[m] = qm2 + cplx(0.0, 1.0) * pm2;
        }
    }
    fft_.backward();
    const double inv = 1.0 / double(grid_.Nd);
    for (std::size_t i = 0; i < grid_.Nd; ++i) {
        const cplx z = b[site_raw_[i]] * inv;
        s.Q[i] = z.real();
        s.P[i] = z.imag();
    }
}

void KGIntegrator::advance(LatticeState& s, double dt, std::size_t n) {
    check_state(s, grid_);
    if (!(std::isfinite(dt)) || dt == 0.0) throw ParameterError("dt must be finite and nonzero");
    for (std::size_t it = 0; it < n; ++it) {
        kick(s, 0.5 * dt);
        rotate(s, dt);
        kick(s, 0.5 * dt);
        s.t += dt;
        ++steps_;
        for (std::size_t i = 0; i < grid_.Nd; ++i) {
            if (!std::isfinite(s.Q[i]) || !std::isfinite(s.P[i]))
                throw BlowupError("non-finite lattice field", steps_);
        }
    }
}

LatticeState KGIntegrator::step(const LatticeState& s, double dt) {
    LatticeState out = s;
    advance(out, dt, 1);
    return out;
}

LatticeState step(const LatticeState& s, double dt, const KGParams& p, const LatticeGrid& grid) {
    KGIntegrator integ(grid, p);
    return integ.step(s, dt);
}

LatticeState make_single_mode_datum(const std::vector<int>& k0, double C0, double alpha,
                                    const LatticeGrid& grid, const KGParams& params) {
    params.validate();
    if (int(k0.size()) != grid.d) throw StructuralError("k0 must have d components");
    bool all_zero = true;
    for (int c : k0) {
        if (c != 0) all_zero = false;
        if (std::abs(c) > grid.N) throw InvalidModeError("k0 component out of range |k| <= N");
    }
    if (all_zero) throw InvalidModeError("k0 = 0 is not an admissible mode");
    for (int c : k0)
        if (c == 0)
            throw InvalidModeError("odd sine datum needs every component of k0 nonzero");
    if (!(C0 >= 0.0)) throw ParameterError("C0 must be >= 0");
    if (!(alpha > 0.0) || alpha > 1.0 / double(params.ell))
        throw ParameterError("alpha must lie in (0, 1/ell]");

    LatticeState s = LatticeState::zeros(grid);
    if (C0 == 0.0) return s;
    const double w = std::sqrt(omega_squared(k0.data(), grid));
    // Orbit specific energy of the sine product equals omega^2 A^2 / 2 for every d.
    const double A = std::pow(grid.mu, alpha) * std::sqrt(2.0 * C0) / w;
    if (!std::isfinite(A)) throw ParameterError("single-mode amplitude is not finite");
    const double n = double(grid.side());
    std::vector<int> j(std::size_t(grid.d));
    for (std::size_t idx = 0; idx < grid.Nd; ++idx) {
        grid.box.coords(idx, j.data());
        double v = A;
        for (int i = 0; i < grid.d; ++i)
            v *= std::sin(2.0 * std::numbers::pi * double(k0[std::size_t(i)]) * double(j[std::size_t(i)]) / n);
        s.Q[idx] = v;
    }
    return s;
}

double odd_symmetry_defect(const LatticeState& s, const LatticeGrid& grid) {
    check_state(s, grid);
    double worst = 0.0;
    std::vector<int> j(std::size_t(grid.d));
    for (std::size_t idx = 0; idx < grid.Nd; ++idx) {
        grid.box.coords(idx, j.data());
        for (int i = 0; i < grid.d; ++i) {
            j[std::size_t(i)] = -j[std::size_t(i)];
            const std::size_t r = grid.box.flat(j.data());
            j[std::size_t(i)] = -j[std::size_t(i)];
            worst = std::max(worst, std::abs(s.Q[idx] + s.Q[r]));
            worst = std::max(worst, std::abs(s.P[idx] + s.P[r]));
        }
    }
    return worst;
}

} // namespace kgc
