#include "kgcascade/spectral.hpp"

#include <cmath>
#include <string>

#include "kgcascade/errors.hpp"
#include "kgcascade/fft.hpp"

namespace kgc {

void fill_mode_energies(ModeSpectrum& spec, const LatticeGrid& grid) {
    spec.omega.resize(spec.box.size());
    spec.E.resize(spec.box.size());
    std::vector<int> k(std::size_t(grid.d));
    for (std::size_t i = 0; i < spec.box.size(); ++i) {
        spec.box.coords(i, k.data());
        const double w2 = omega_squared(k.data(), grid);
        spec.omega[i] = std::sqrt(w2);
        spec.E[i] = 0.5 * (std::norm(spec.Phat[i]) + w2 * std::norm(spec.Qhat[i]));
    }
}

ModeSpectrum dft_modes(const LatticeState& s, const LatticeGrid& grid) {
    check_state(s, grid);
    CenteredDft dft(grid.box);
    std::vector<cplx> q(s.Q.begin(), s.Q.end());
    std::vector<cplx> p(s.P.begin(), s.P.end());
    ModeSpectrum spec;
    spec.box = grid.box;
    spec.Qhat = dft.forward(q);
    spec.Phat = dft.forward(p);
    spec.t = s.t;
    fill_mode_energies(spec, grid);
    return spec;
}

LatticeState inverse_dft(const ModeSpectrum& spec, const LatticeGrid& grid) {
    if (spec.box != grid.box || spec.Qhat.size() != grid.Nd || spec.Phat.size() != grid.Nd)
        throw StructuralError("spectrum does not match grid");
    CenteredDft dft(grid.box);
    const auto q = dft.inverse(spec.Qhat);
    const auto p = dft.inverse(spec.Phat);
    LatticeState s = LatticeState::zeros(grid);
    for (std::size_t i = 0; i < grid.Nd; ++i) {
        s.Q[i] = q[i].real();
        s.P[i] = p[i].real();
    }
    s.t = spec.t;
    return s;
}

double mode_frequency(const std::vector<int>& k, const LatticeGrid& grid) {
    if (int(k.size()) != grid.d) throw StructuralError("mode index must have d components");
    for (int c : k)
        if (std::abs(c) > grid.N)
            throw InvalidModeError("mode component " + std::to_string(c) + " outside |k| <= N");
    return std::sqrt(omega_squared(k.data(), grid));
}

const SpecificEntry& SpecificSpectrum::at(const std::vector<int>& k) const {
    if (int(k.size()) != d) throw StructuralError("mode index must have d components");
    std::size_t idx = 0;
    for (int c : k) {
        if (c < 0 || c > N) throw InvalidModeError("specific spectrum index outside Z^d_{N,+}");
        idx = idx * std::size_t(N + 1) + std::size_t(c);
    }
    return entries[idx];
}

double SpecificSpectrum::total() const {
    KahanSum s;
    for (const auto& e : entries) s += e.E_kappa;
    return s.value();
}

SpecificSpectrum specific_spectrum(const ModeSpectrum& spec, const LatticeGrid& grid) {
    if (spec.box != grid.box || spec.E.size() != grid.Nd) throw StructuralError("spectrum does not match grid");
    SpecificSpectrum out;
    out.N = grid.N;
    out.d = grid.d;
    out.t = spec.t;
    std::size_t count = 1;
    for (int i = 0; i < grid.d; ++i) count *= std::size_t(grid.N + 1);
    out.entries.resize(count);
    const double scale = std::pow(double(grid.N) + 0.5, -double(grid.d));
    std::vector<int> k(std::size_t(grid.d)), f(std::size_t(grid.d));
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rem = idx;
        for (int i = grid.d - 1; i >= 0; --i) {
            k[std::size_t(i)] = int(rem % std::size_t(grid.N + 1));
            rem /= std::size_t(grid.N + 1);
        }
        SpecificEntry& e = out.entries[idx];
        e.k = k;
        e.kappa.resize(std::size_t(grid.d));
        for (int i = 0; i < grid.d; ++i) e.kappa[std::size_t(i)] = double(k[std::size_t(i)]) / (double(grid.N) + 0.5);
        const std::size_t self = grid.box.flat(k.data());
        e.omega = spec.omega[self];
        e.E_k = spec.E[self];
        // Distinct sign flips of the nonzero components.
        KahanSum agg;
        for (unsigned mask = 0; mask < (1u << grid.d); ++mask) {
            bool dup = false;
            for (int i = 0; i < grid.d; ++i) {
                const bool flip = (mask >> i) & 1u;
                if (flip && k[std::size_t(i)] == 0) dup = true;
                f[std::size_t(i)] = flip ? -k[std::size_t(i)] : k[std::size_t(i)];
            }
            if (dup) continue;
            agg += spec.E[grid.box.flat(f.data())];
        }
        e.E_kappa = agg.value() * scale;
    }
    return out;
}

double cascade_metric(const SpecificSpectrum& spec, double m, double cutoff, const LatticeGrid& grid) {
    if (!(m >= 0.0)) throw ParameterError("cascade weight m must be >= 0");
    if (!(cutoff > 0.0)) throw ParameterError("cascade cutoff must be > 0");
    if (spec.N != grid.N || spec.d != grid.d) throw StructuralError("specific spectrum does not match grid");
    KahanSum s;
    for (const auto& e : spec.entries) {
        const double K = euclid(e.k.data(), grid.d);
        if (K > cutoff) continue;
        if (K == 0.0) {
            if (m == 0.0) s += e.E_kappa;
            continue;
        }
        s += std::pow(K, 2.0 * m) * e.E_kappa;
    }
    return s.value();
}

double weighted_norm(const WeightedSeq& seq) {
    if (seq.p != 1 && seq.p != 2)
        throw UnsupportedNormError("weighted norm flavor p must be 1 or 2, got " + std::to_string(seq.p));
    if (seq.values.size() != seq.box.size()) throw StructuralError("sequence size does not match its box");
    const int d = seq.box.dim();
    std::vector<int> n(static_cast<std::size_t>(d));
    KahanSum acc;
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        const double a = std::abs(seq.values[i]);
        if (a == 0.0) continue;
        seq.box.coords(i, n.data());
        const double w = std::pow(weight_abs(n.data(), d), seq.s);
        acc += seq.p == 1 ? w * a : (w * a) * (w * a);
    }
    return seq.p == 1 ? acc.value() : std::sqrt(acc.value());
}

namespace {
WeightedSeq project(const WeightedSeq& seq, double M, bool keep_low) {
    if (!(M >= 0.0)) throw ParameterError("projection cutoff M must be >= 0");
    WeightedSeq out = seq;
    const int d = seq.box.dim();
    std::vector<int> n(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        seq.box.coords(i, n.data());
        const bool low = weight_abs(n.data(), d) <= M;
        if (low != keep_low) out.values[i] = 0.0;
    }
    return out;
}
} // namespace

WeightedSeq project_low(const WeightedSeq& seq, double M) { return project(seq, M, true); }
WeightedSeq project_high(const WeightedSeq& seq, double M) { return project(seq, M, false); }

} // namespace kgc
