#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "kgcascade/numeric.hpp"

namespace kgc::nf {

// sigma = +1 is xi_a, sigma = -1 is eta_a.
struct Var {
    std::array<int, 3> a{0, 0, 0};
    int sigma = 1;

    bool operator==(const Var& o) const { return a == o.a && sigma == o.sigma; }
    bool operator!=(const Var& o) const { return !(*this == o); }
    // Canonical order: sigma descending, then a lexicographic.
    bool operator<(const Var& o) const {
        if (sigma != o.sigma) return sigma > o.sigma;
        return a < o.a;
    }
    Var conj() const { return Var{a, -sigma}; }
};

Var xi(std::vector<int> a);
Var eta(std::vector<int> a);

// Sorted list of variables; the canonical signed multi-index of a monomial.
using Monomial = std::vector<Var>;

Monomial canonical(Monomial m);
std::array<int, 3> momentum(const Monomial& m);
// (#sigma=+1) - (#sigma=-1): the monomial picks up e^{i r t} under the flow of h0.
int winding(const Monomial& m);
// Number of distinct orderings of the multiset: deg!/prod mult!.
double orderings(const Monomial& m);
Monomial conj(const Monomial& m);

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int d) : d_(d) {}

    int dim() const { return d_; }
    // Adds c to the coefficient of m (canonicalized). Throws StructuralError if m
    // has nonzero momentum or degree < 2. Exact cancellations are erased.
    void add(const Monomial& m, cplx c);
    cplx coeff(const Monomial& m) const;
    const std::map<Monomial, cplx>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    int max_degree() const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial scaled(cplx c) const;
    bool operator==(const Polynomial& o) const { return d_ == o.d_ && terms_ == o.terms_; }

    // Value at a point given by xi_a, eta_a lookups (missing variables are zero).
    cplx evaluate(const std::map<Var, cplx>& point) const;
    bool is_real() const; // a_{conj j} == conj(a_j)

    // Raw insertion without the momentum check; used by the KG expansion builder.
    void add_unchecked(const Monomial& canonical_m, cplx c);

private:
    int d_ = 1;
    std::map<Monomial, cplx> terms_;
};

// sum over degrees of sup |a_j|, a_j the permutation-symmetric coefficients
// (monomial coefficient divided by its number of orderings).
double poly_norm(const Polynomial& p);

// {F,G} = i sum_a (dF/dxi_a dG/deta_a - dF/deta_a dG/dxi_a)
Polynomial poisson_bracket(const Polynomial& F, const Polynomial& G);
// Keeps the monomials with zero winding.
Polynomial flow_average(const Polynomial& P);
// sum_a xi_a eta_a over the box |a_i| <= H.
Polynomial h0(int H, int d);

struct HomologicalSolution {
    Polynomial Z;
    Polynomial chi;
};
// {chi, h0} + G = Z with Z = <G> and chi_j = (i/r) G_j for winding r != 0.
HomologicalSolution homological_solution(const Polynomial& G);
inline constexpr double kPeriod = 2.0 * std::numbers::pi; // T

struct LieResult {
    Polynomial value;
    bool truncated = false; // some G_l monomials exceeded max_degree and were dropped
};
// sum_{l=0}^{order} G_l, G_0 = G, G_l = (1/l){chi, G_{l-1}}.
LieResult lie_transform_truncated(const Polynomial& chi, const Polynomial& G, int order, int max_degree);

struct KgNlsCoefficients {
    int ell = 1;
    int d = 1;
    int box = 2;
    double alpha = 0.0;
    double mu = 0.0;
    double beta = 1.0;
    // F = F_quad + prefactor * F_count, prefactor = mu^{2(ell alpha - 1)} beta/(2^{ell+1}(2 ell + 2)).
    double prefactor = 0.0;
    Polynomial F_quad;
    Polynomial F_count;   // integer coefficients: orderings of each zero-momentum monomial
    Polynomial avg_quad;
    Polynomial avg_count;
    // (h, coefficient of xi_h eta_h in <F_quad>) for every h in the box.
    std::vector<std::pair<std::vector<int>, double>> dispersive;
    // Coefficient of |psi|^{2 ell} psi in -i psi_t with the mu^{2 ell alpha} factor removed.
    double nonlinear = 0.0;
    // Every monomial of <F_count> has ell+1 xi's, ell+1 eta's and sum_xi h = sum_eta h.
    bool resonance_ok = false;
};
KgNlsCoefficients kg_nls_coefficients(int ell, double alpha, double mu, double beta = 1.0, int box = 2, int d = 1);
double binomial(int n, int k);

// Line format: "re im [(a,s),...]" with a = "n" (d=1) or "(n1,n2,..)" and s in {+1,-1}.
void write_polynomial(std::ostream& os, const Polynomial& p);
Polynomial read_polynomial(std::istream& is, int d);
std::string format_monomial(const Monomial& m, int d);

} // namespace kgc::nf
