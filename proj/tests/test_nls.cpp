#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kgcascade/errors.hpp"
#include "kgcascade/nls.hpp"

using namespace kgc;

namespace {

NLSState random_smooth(int H, int d, std::mt19937_64& rng, double decay = 1.5) {
    NLSState s = NLSState::zeros(H, d);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<int> h(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < s.xi.size(); ++i) {
        s.box.coords(i, h.data());
        const double w = std::exp(-decay * euclid(h.data(), d));
        s.xi[i] = w * cplx(n(rng), n(rng));
    }
    return s;
}

double max_diff(const NLSState& a, const NLSState& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.xi.size(); ++i) m = std::max(m, std::abs(a.xi[i] - b.xi[i]));
    return m;
}

} // namespace

TEST_CASE("params validation") {
    CHECK_NOTHROW((NLSParams{0.1, 1, 1.0}.validate()));
    CHECK_THROWS_AS((NLSParams{0.0, 1, 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((NLSParams{0.1, 0, 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((NLSParams{0.1, 1, -1.0}.validate()), ParameterError);
}

TEST_CASE("sobolev norm") {
    auto s = NLSState::zeros(4, 1);
    s.xi[s.box.flat(std::vector<int>{2})] = 1.0;
    CHECK(sobolev_norm(s, 3.0) == doctest::Approx(8.0).epsilon(1e-15));
    std::mt19937_64 rng(3);
    const auto r = random_smooth(6, 2, rng);
    CHECK(sobolev_norm(r, 0.0) == doctest::Approx(l2_norm(r)).epsilon(1e-15));
    double ref = 0.0;
    std::vector<int> h(2);
    for (std::size_t i = 0; i < r.xi.size(); ++i) {
        r.box.coords(i, h.data());
        ref += std::pow(std::max(1.0, euclid(h.data(), 2)), 6.0) * std::norm(r.xi[i]);
    }
    CHECK(std::abs(sobolev_norm(r, 3.0) - std::sqrt(ref)) <= 1e-12 * std::sqrt(ref));
    CHECK_THROWS_AS(sobolev_norm(r, -1.0), ParameterError);
}

TEST_CASE("single-mode and plane-wave data") {
    const auto s = nls_single_mode(8, {1}, 1.0);
    CHECK(l2_norm(s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(odd_parity_defect(s) == 0.0);
    const auto s2 = nls_single_mode(5, {1, 2}, 2.0);
    CHECK(l2_norm(s2) == doctest::Approx(2.0).epsilon(1e-15));
    // Odd in each coordinate, hence even under the full reflection when d = 2.
    for (std::size_t i = 0; i < s2.xi.size(); ++i) {
        auto h = s2.box.coords(i);
        h[0] = -h[0];
        CHECK(s2.xi[s2.box.flat(h)] == -s2.xi[i]);
    }
    CHECK_THROWS_AS(nls_single_mode(4, {0}, 1.0), InvalidModeError);
    CHECK_THROWS_AS(nls_single_mode(4, {5}, 1.0), InvalidModeError);
    CHECK_THROWS_AS(nls_plane_wave(4, {5}, 1.0), InvalidModeError);
    NLSSolver solver(8, 1, NLSParams{0.1, 1, 1.0});
    const auto pw = nls_plane_wave(8, {3}, cplx(0.5, 0.0));
    for (const auto& v : solver.physical(pw, 16)) CHECK(std::abs(v) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("plane wave phase") {
    for (int ell = 1; ell <= 2; ++ell) {
        const NLSParams p{0.3, ell, 1.2};
        const std::vector<int> h{2};
        const cplx A(0.4, 0.1);
        NLSSolver solver(8, 1, p);
        auto s = nls_plane_wave(8, h, A);
        const auto s0 = s;
        const double dtau = 1e-3;
        solver.advance(s, dtau, 1000);
        const double omega = -(p.eps * 4.0 + p.beta_eff * std::pow(std::abs(A), 2.0 * ell));
        const double tau = 1000 * dtau;
        const std::size_t i = s.box.flat(h);
        CHECK(std::abs(s.xi[i] - s0.xi[i] * std::polar(1.0, -omega * tau)) <= 1e-10);
    }
}

TEST_CASE("L2 norm is conserved per step") {
    std::mt19937_64 rng(5);
    for (int d = 1; d <= 2; ++d) {
        const auto s0 = random_smooth(d == 1 ? 32 : 12, d, rng, 2.0);
        NLSSolver solver(s0.box.half(), d, NLSParams{0.05, 1, 1.0}, 1.0);
        NLSState s = s0;
        double worst = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double before = l2_norm(s);
            s = solver.split_step(s, 1e-3);
            worst = std::max(worst, std::abs(l2_norm(s) - before) / before);
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("hamiltonian drift and its second-order convergence") {
    const NLSParams p{0.05, 1, 1.0};
    const auto s0 = nls_single_mode(32, {1}, 1.0);
    auto drift = [&](double dtau, std::size_t n) {
        NLSSolver solver(32, 1, p);
        NLSState s = s0;
        const double H0 = solver.hamiltonian(s);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            solver.advance(s, dtau, n / 10);
            worst = std::max(worst, std::abs(solver.hamiltonian(s) - H0) / H0);
        }
        return worst;
    };
    NLSSolver probe(32, 1, p);
    const double dtau = probe.default_dtau(s0);
    CHECK(dtau > 0.0);
    CHECK(drift(dtau, 5000) <= 1e-6);
    const double e1 = drift(0.02, 100), e2 = drift(0.01, 200);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("hamiltonian of a plane wave") {
    const NLSParams p{0.2, 1, 1.5};
    NLSSolver solver(6, 1, p);
    const auto s = nls_plane_wave(6, {2}, 0.7);
    const double L = 2 * std::numbers::pi;
    const double expect = 0.5 * p.eps * 4.0 * 0.49 * L + p.beta_eff / 4.0 * std::pow(0.7, 4) * L;
    CHECK(solver.hamiltonian(s) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("odd parity is preserved") {
    auto s = nls_single_mode(32, {1}, 1.0);
    NLSSolver solver(32, 1, NLSParams{0.05, 1, 1.0});
    solver.advance(s, 1e-3, 2000);
    CHECK(odd_parity_defect(s) <= 1e-10);
}

TEST_CASE("gauge covariance") {
    std::mt19937_64 rng(7);
    const auto s0 = random_smooth(24, 1, rng, 2.0);
    const cplx u = std::polar(1.0, 0.7);
    auto a = s0, b = s0;
    for (auto& x : b.xi) x *= u;
    NLSSolver sa(24, 1, NLSParams{0.1, 1, 1.0}, 1.0), sb(24, 1, NLSParams{0.1, 1, 1.0}, 1.0);
    sa.advance(a, 1e-3, 500);
    sb.advance(b, 1e-3, 500);
    for (auto& x : a.xi) x *= u;
    CHECK(max_diff(a, b) <= 1e-10);
}

TEST_CASE("split step returns a new state and checks its input") {
    NLSSolver solver(8, 1, NLSParams{0.1, 1, 1.0});
    const auto s0 = nls_single_mode(8, {1}, 1.0);
    const auto s1 = solver.split_step(s0, 1e-2);
    CHECK(s0.tau == 0.0);
    CHECK(s1.tau == doctest::Approx(1e-2));
    CHECK_THROWS_AS(solver.split_step(NLSState::zeros(4, 1), 1e-2), StructuralError);
    CHECK_THROWS_AS(solver.split_step(s0, 0.0), ParameterError);
    auto bad = s0;
    bad.xi[1] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(solver.split_step(bad, 1e-2), BlowupError);
}

TEST_CASE("aliasing guard") {
    NLSSolver solver(9, 1, NLSParams{0.1, 1, 1.0});
    const auto s = nls_plane_wave(9, {8}, 1.0);
    CHECK(solver.top_third_fraction(s) == 1.0);
    CHECK_THROWS_AS(solver.split_step(s, 1e-3), DealiasingError);
}

TEST_CASE("kuksin threshold and membership") {
    auto s = nls_single_mode(8, {1}, 1.0);
    CHECK(kuksin_threshold(1.0, 3.0, 1, 0.1, 1.0, 1e-4) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK_FALSE(kuksin_membership(NLSState::zeros(4, 1), 3.0, 1, 0.1, 1.0, 1e-4));
    CHECK_FALSE(kuksin_membership(s, 3.0, 1, 0.1, 1.0, 1e-4));
    s.xi[s.box.flat(std::vector<int>{6})] = 0.1;
    CHECK(kuksin_membership(s, 3.0, 1, 0.1, 1.0, 1e-4));
    double prev = INFINITY;
    for (double e = 1e-6; e <= 1.0; e *= 3.0) {
        const double t = kuksin_threshold(1.0, 3.0, 1, 0.1, 1.0, e);
        CHECK(t < prev);
        prev = t;
    }
    CHECK_THROWS_AS(kuksin_threshold(1.0, 3.0, 1, 0.5, 1.0, 1e-4), InvalidExponentError);
    CHECK_THROWS_AS(kuksin_threshold(1.0, 3.0, 1, 0.0, 1.0, 1e-4), InvalidExponentError);
    CHECK_THROWS_AS(kuksin_threshold(1.0, 3.0, 1, 0.45, 1.0, 1e-4), ParameterError);
}

TEST_CASE("kuksin time bound") {
    const double m = 3, lam = 0.1, K = 2.0, eps = 1e-4, r = 5.0;
    const double nu = 2 + 1 / m, g = 2 * (1 - nu * lam);
    CHECK(kuksin_time_bound(m, 1, lam, K, eps, r) ==
          doctest::Approx(std::pow(K, -nu) * std::pow(eps, -nu * lam) * std::pow(r, -g) / (1 - std::pow(2, -g))).epsilon(1e-14));
    const double e0 = kuksin_eps0(1.0, r, 1, lam, K);
    CHECK(kuksin_threshold(1.0, m, 1, lam, K, e0) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("lambda star") {
    CHECK(lambda_star(12, 1, 1, 1.0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(lambda_star(1e12, 1, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(lambda_star(2.0, 1, 1, 1.0), DomainError);
    // The asymptotic value sits under the normalized-datum cap for small m and above it past a crossover.
    bool above = false;
    for (double m = 3; m <= 60; m += 1) {
        const bool v = lambda_star(m, 1, 1, 1.0) > lambda_cap_normalized(m, 1);
        CHECK((v || !above));
        above = above || v;
    }
    CHECK(lambda_star(3, 1, 1, 1.0) <= lambda_cap_normalized(3, 1));
    CHECK(above);
}

TEST_CASE("growth detection precondition") {
    const auto s = nls_single_mode(32, {3}, 1.0);
    CHECK_THROWS_AS(detect_growth(s, NLSParams{10.0, 1, 1.0}, 3.0, 0.1, 1.0, 1.0, 1e-3), PreconditionError);
    const auto q = nls_single_mode(32, {1}, 1.0);
    CHECK_THROWS_AS(detect_growth(q, NLSParams{1e-4, 1, 1.0}, 3.0, 0.1, 1.0, 0.0, 1e-3), ParameterError);
}

TEST_CASE("growth detection times out honestly") {
    const auto s = nls_single_mode(32, {1}, 1.0);
    const auto c = detect_growth(s, NLSParams{1e-4, 1, 1.0}, 3.0, 0.1, 1.0, 0.05, 1e-3);
    CHECK(c.status == GrowthCertificate::Status::Timeout);
    CHECK(c.t_hit < 0.0);
    CHECK(c.max_norm >= c.r0);
}

TEST_CASE("growth detection with the frozen constant") {
    const auto s = nls_single_mode(64, {1}, 1.0);
    const NLSParams p{1e-4, 1, 1.0};
    const double K = frozen_kuksin_K(1, 1, 3.0);
    std::size_t samples = 0;
    const auto c = detect_growth(s, p, 3.0, 0.1, K, 50.0, 1e-3, [&](const GrowthSample&) { ++samples; }, 100);
    REQUIRE(c.status == GrowthCertificate::Status::Hit);
    CHECK(c.t_hit <= c.bound_T);
    REQUIRE(c.snapshot);
    CHECK(kuksin_membership(*c.snapshot, 3.0, 1, 0.1, K, 1e-4));
    REQUIRE(c.t1);
    CHECK(*c.t1 > 0.0);
    CHECK(samples > 1);
}

TEST_CASE("frozen constant table") {
    CHECK(frozen_kuksin_K(1, 1, 3.0) == doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-15));
    CHECK_THROWS_AS(frozen_kuksin_K(2, 1, 3.0), ParameterError);
}

TEST_CASE("calibration reproduces the frozen constant") {
    const auto s = nls_single_mode(64, {1}, 1.0);
    const double K = calibrate_kuksin_K(s, NLSParams{kPilotEps, 1, 1.0}, 3.0, kPilotLambda, 50.0, 1e-3);
    CHECK(K == frozen_kuksin_K(1, 1, 3.0));
}
