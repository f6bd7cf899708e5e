#pragma once

#include <cstddef>
#include <vector>

#include "kgcascade/lattice.hpp"
#include "kgcascade/numeric.hpp"

namespace kgc {

// Normal-mode data of a lattice state, indexed by centered k in Z_N^d.
struct ModeSpectrum {
    CenteredBox box;
    std::vector<cplx> Qhat;
    std::vector<cplx> Phat;
    std::vector<double> omega;
    std::vector<double> E;
    double t = 0.0;
};

ModeSpectrum dft_modes(const LatticeState& s, const LatticeGrid& grid);
// Inverse transform; imaginary parts are dropped (zero for spectra of real states).
LatticeState inverse_dft(const ModeSpectrum& spec, const LatticeGrid& grid);
// Recomputes omega and E from Qhat, Phat.
void fill_mode_energies(ModeSpectrum& spec, const LatticeGrid& grid);

// Throws InvalidModeError when some |k_i| > N.
double mode_frequency(const std::vector<int>& k, const LatticeGrid& grid);

struct SpecificEntry {
    std::vector<int> k;        // representative in Z^d_{N,+} (all k_i >= 0)
    std::vector<double> kappa; // k/(N+1/2)
    double omega = 1.0;
    double E_k = 0.0;          // energy of the representative mode alone
    double E_kappa = 0.0;      // orbit-aggregated specific energy
};

struct SpecificSpectrum {
    int N = 0;
    int d = 1;
    double t = 0.0;
    std::vector<SpecificEntry> entries; // row-major over {0..N}^d

    const SpecificEntry& at(const std::vector<int>& k) const;
    double total() const;
};

SpecificSpectrum specific_spectrum(const ModeSpectrum& spec, const LatticeGrid& grid);

// sum over K = kappa/mu with |K| <= cutoff of |K|^{2m} E_kappa (plain Euclidean |K|).
double cascade_metric(const SpecificSpectrum& spec, double m, double cutoff, const LatticeGrid& grid);

// Complex sequence on a centered box with weight exponent s and flavor p.
struct WeightedSeq {
    double s = 0.0;
    int p = 2;
    CenteredBox box;
    std::vector<cplx> values;
};

// (sum |n|^{p s} |v_n|^p)^{1/p} with |n| = max(1, Euclidean norm); p in {1, 2}.
double weighted_norm(const WeightedSeq& seq);
// Keeps entries with |n| <= M.
WeightedSeq project_low(const WeightedSeq& seq, double M);
// Complement of project_low.
WeightedSeq project_high(const WeightedSeq& seq, double M);

} // namespace kgc
