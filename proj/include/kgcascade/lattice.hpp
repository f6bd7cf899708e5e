#pragma once

#include <cstddef>
#include <vector>

#include "kgcascade/fft.hpp"
#include "kgcascade/numeric.hpp"

namespace kgc {

// Periodic grid Z_N^d = {-N..N}^d.
struct LatticeGrid {
    int N = 1;
    int d = 1;
    std::size_t Nd = 3;
    double mu = 2.0 / 3.0;
    CenteredBox box;

    static LatticeGrid make(int N, int d);
    int side() const { return 2 * N + 1; }
};

// U(x) = x^2/2 + beta x^{2 ell + 2}/(2 ell + 2). beta = 0 is allowed (linear lattice).
struct KGParams {
    double beta = 1.0;
    int ell = 1;

    void validate() const;
    double potential(double x) const;
    double force(double x) const { return -beta * ipow(x, 2 * ell + 1); }
};

struct LatticeState {
    std::vector<double> Q;
    std::vector<double> P;
    double t = 0.0;

    static LatticeState zeros(const LatticeGrid& grid);
};

void check_state(const LatticeState& s, const LatticeGrid& grid);

// (Delta_1 f)_j = sum_i f_{j+e_i} - 2 f_j + f_{j-e_i}, periodic.
std::vector<double> discrete_laplacian(const std::vector<double>& f, const LatticeGrid& grid);

double hamiltonian_energy(const LatticeState& s, const KGParams& p, const LatticeGrid& grid);
// Quadratic (beta-independent) part of the Hamiltonian.
double quadratic_energy(const LatticeState& s, const LatticeGrid& grid);

// omega_k^2 = 1 + 4 sum_i sin^2(k_i pi/(2N+1)); no range check.
double omega_squared(const int* k, const LatticeGrid& grid);
double max_frequency(const LatticeGrid& grid);
// 0.05 / max omega.
double default_dt(const LatticeGrid& grid);
// dt * max omega above this triggers the stability warning.
inline constexpr double kCflWarn = 0.5;
bool cfl_warning(double dt, const LatticeGrid& grid);

// Strang splitting: half kick, exact linear rotation in Fourier space, half kick.
// Owns its FFT scratch; not shareable across threads.
class KGIntegrator {
public:
    KGIntegrator(const LatticeGrid& grid, const KGParams& params);

    LatticeState step(const LatticeState& s, double dt);
    // In place, n steps; throws BlowupError with the global step counter.
    void advance(LatticeState& s, double dt, std::size_t n);
    std::size_t steps_taken() const { return steps_; }

    const LatticeGrid& grid() const { return grid_; }
    const KGParams& params() const { return params_; }

private:
    void kick(LatticeState& s, double h) const;
    void rotate(LatticeState& s, double dt);
    void prepare(double dt);

    LatticeGrid grid_;
    KGParams params_;
    FftNd fft_;
    std::vector<double> omega_;       // by raw FFT index
    std::vector<std::size_t> partner_; // raw index of -k
    std::vector<std::size_t> site_raw_; // centered site -> raw
    std::vector<double> cos_, sin_;
    double cached_dt_ = 0.0;
    std::size_t steps_ = 0;
};

LatticeState step(const LatticeState& s, double dt, const KGParams& p, const LatticeGrid& grid);

// Real odd datum A prod_i sin(2 pi k0_i j_i/(2N+1)), P = 0, with amplitude
// fixed so that the specific energy of the orbit of k0 equals C0 mu^{2 alpha}.
LatticeState make_single_mode_datum(const std::vector<int>& k0, double C0, double alpha,
                                    const LatticeGrid& grid, const KGParams& params);

// max over sites and axes of |F(j) + F(reflect_i j)| for F in {Q, P}.
double odd_symmetry_defect(const LatticeState& s, const LatticeGrid& grid);

} // namespace kgc
