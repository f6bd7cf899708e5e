#include "kgcascade/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "kgcascade/errors.hpp"

namespace kgc::nf {

namespace {

Var make_var(const std::vector<int>& a, int sigma) {
    if (a.empty() || a.size() > 3) throw StructuralError("mode vector must have 1..3 components");
    Var v;
    for (std::size_t i = 0; i < a.size(); ++i) v.a[i] = a[i];
    v.sigma = sigma;
    return v;
}

// m with one copy of v removed (m sorted, v present).
Monomial remove_one(const Monomial& m, const Var& v) {
    Monomial r;
    r.reserve(m.size() - 1);
    bool done = false;
    for (const auto& x : m) {
        if (!done && x == v) {
            done = true;
            continue;
        }
        r.push_back(x);
    }
    return r;
}

Monomial merge(const Monomial& a, const Monomial& b) {
    Monomial r;
    r.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

// Distinct variables of a sorted monomial with multiplicities.
std::vector<std::pair<Var, int>> runs(const Monomial& m) {
    std::vector<std::pair<Var, int>> out;
    for (const auto& v : m) {
        if (!out.empty() && out.back().first == v)
            ++out.back().second;
        else
            out.emplace_back(v, 1);
    }
    return out;
}

// sum_a dF/dxi_a * dG/deta_a
Polynomial pairing(const Polynomial& F, const Polynomial& G) {
    Polynomial out(F.dim());
    std::map<Var, std::vector<std::pair<const Monomial*, std::pair<int, cplx>>>> by_eta;
    for (const auto& [m, c] : G.terms())
        for (const auto& [v, k] : runs(m))
            if (v.sigma < 0) by_eta[v].push_back({&m, {k, c}});
    for (const auto& [m1, c1] : F.terms()) {
        for (const auto& [v, k1] : runs(m1)) {
            if (v.sigma < 0) continue;
            const auto it = by_eta.find(v.conj());
            if (it == by_eta.end()) continue;
            const Monomial rest1 = remove_one(m1, v);
            for (const auto& [m2p, kc] : it->second) {
                const Monomial rest2 = remove_one(*m2p, v.conj());
                out.add(merge(rest1, rest2), double(k1) * double(kc.first) * c1 * kc.second);
            }
        }
    }
    return out;
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

Var xi(std::vector<int> a) { return make_var(a, +1); }
Var eta(std::vector<int> a) { return make_var(a, -1); }

Monomial canonical(Monomial m) {
    std::sort(m.begin(), m.end());
    return m;
}

std::array<int, 3> momentum(const Monomial& m) {
    std::array<int, 3> s{0, 0, 0};
    for (const auto& v : m)
        for (int i = 0; i < 3; ++i) s[std::size_t(i)] += v.a[std::size_t(i)] * v.sigma;
    return s;
}

int winding(const Monomial& m) {
    int r = 0;
    for (const auto& v : m) r += v.sigma;
    return r;
}

double orderings(const Monomial& m) {
    double n = 1.0;
    for (std::size_t i = 2; i <= m.size(); ++i) n *= double(i);
    for (const auto& [v, k] : runs(canonical(m)))
        for (int i = 2; i <= k; ++i) n /= double(i);
    return n;
}

Monomial conj(const Monomial& m) {
    Monomial r;
    r.reserve(m.size());
    for (const auto& v : m) r.push_back(v.conj());
    return canonical(r);
}

void Polynomial::add_unchecked(const Monomial& m, cplx c) {
    if (c == cplx(0.0, 0.0)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
    }
}

void Polynomial::add(const Monomial& m0, cplx c) {
    const Monomial m = std::is_sorted(m0.begin(), m0.end()) ? m0 : canonical(m0);
    if (m.size() < 2) throw StructuralError("polynomial monomials must have degree >= 2");
    if (momentum(m) != std::array<int, 3>{0, 0, 0})
        throw StructuralError("monomial " + format_monomial(m, d_) + " has nonzero momentum");
    for (const auto& v : m)
        for (int i = d_; i < 3; ++i)
            if (v.a[std::size_t(i)] != 0) throw StructuralError("mode has more components than d");
    add_unchecked(m, c);
}

cplx Polynomial::coeff(const Monomial& m) const {
    const auto it = terms_.find(canonical(m));
    return it == terms_.end() ? cplx(0.0, 0.0) : it->second;
}

int Polynomial::max_degree() const {
    int k = 0;
    for (const auto& [m, c] : terms_) k = std::max(k, int(m.size()));
    return k;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_unchecked(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_unchecked(m, -c);
    return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial r = *this;
    r += o;
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    Polynomial r = *this;
    r -= o;
    return r;
}

Polynomial Polynomial::scaled(cplx c) const {
    Polynomial r(d_);
    for (const auto& [m, x] : terms_) r.add_unchecked(m, x * c);
    return r;
}

cplx Polynomial::evaluate(const std::map<Var, cplx>& point) const {
    cplx total(0.0, 0.0);
    for (const auto& [m, c] : terms_) {
        cplx v = c;
        for (const auto& x : m) {
            const auto it = point.find(x);
            v *= it == point.end() ? cplx(0.0, 0.0) : it->second;
        }
        total += v;
    }
    return total;
}

bool Polynomial::is_real() const {
    for (const auto& [m, c] : terms_)
        if (coeff(conj(m)) != std::conj(c)) return false;
    return true;
}

double poly_norm(const Polynomial& p) {
    std::map<std::size_t, double> sup;
    for (const auto& [m, c] : p.terms()) {
        double& s = sup[m.size()];
        s = std::max(s, std::abs(c) / orderings(m));
    }
    double total = 0.0;
    for (const auto& [deg, s] : sup) total += s;
    return total;
}

Polynomial poisson_bracket(const Polynomial& F, const Polynomial& G) {
    if (F.dim() != G.dim()) throw StructuralError("bracket of polynomials of different dimension");
    // i (A(F,G) - A(G,F)) evaluated symmetrically so that {G,F} = -{F,G} exactly.
    return (pairing(F, G) - pairing(G, F)).scaled(cplx(0.0, 1.0));
}

Polynomial flow_average(const Polynomial& P) {
    Polynomial out(P.dim());
    for (const auto& [m, c] : P.terms())
        if (winding(m) == 0) out.add_unchecked(m, c);
    return out;
}

Polynomial h0(int H, int d) {
    CenteredBox box(H, d);
    Polynomial p(d);
    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto a = box.coords(i);
        p.add({xi(a), eta(a)}, 1.0);
    }
    return p;
}

HomologicalSolution homological_solution(const Polynomial& G) {
    HomologicalSolution s{Polynomial(G.dim()), Polynomial(G.dim())};
    for (const auto& [m, c] : G.terms()) {
        const int r = winding(m);
        if (r == 0)
            s.Z.add_unchecked(m, c);
        else
            // (1/T) int_0^T t (0 - e^{irt}) dt = i/r for integer r != 0.
            s.chi.add_unchecked(m, cplx(0.0, 1.0) * (c / double(r)));
    }
    return s;
}

LieResult lie_transform_truncated(const Polynomial& chi, const Polynomial& G, int order, int max_degree) {
    if (order < 0) throw ParameterError("Lie series order must be >= 0");
    LieResult res{G, false};
    Polynomial Gl = G;
    for (int l = 1; l <= order; ++l) {
        Polynomial next = poisson_bracket(chi, Gl).scaled(1.0 / double(l));
        Polynomial kept(G.dim());
        for (const auto& [m, c] : next.terms()) {
            if (int(m.size()) > max_degree)
                res.truncated = true;
            else
                kept.add_unchecked(m, c);
        }
        res.value += kept;
        Gl = std::move(kept);
    }
    return res;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

KgNlsCoefficients kg_nls_coefficients(int ell, double alpha, double mu, double beta, int box, int d) {
    if (ell < 1) throw ParameterError("ell must be >= 1");
    if (!(alpha > 0.0) || alpha > 1.0 / double(ell))
        throw RegimeError("alpha must lie in (0, 1/ell] for the small-amplitude scaling Q = mu^alpha q(t, mu j)");
    if (!(mu > 0.0)) throw ParameterError("mu must be > 0");
    if (box < 0) throw ParameterError("normal-form box must be >= 0");

    KgNlsCoefficients out;
    out.ell = ell;
    out.d = d;
    out.box = box;
    out.alpha = alpha;
    out.mu = mu;
    out.beta = beta;
    out.prefactor = std::pow(mu, 2.0 * (ell * alpha - 1.0)) * beta / (std::ldexp(1.0, ell + 1) * double(2 * ell + 2));

    CenteredBox B(box, d);
    // 1/4 sum_h (xi_h + eta_{-h}) |h|^2 (xi_{-h} + eta_h)
    out.F_quad = Polynomial(d);
    for (std::size_t i = 0; i < B.size(); ++i) {
        const auto h = B.coords(i);
        std::vector<int> mh(h.size());
        double h2 = 0.0;
        for (std::size_t c = 0; c < h.size(); ++c) {
            mh[c] = -h[c];
            h2 += double(h[c]) * double(h[c]);
        }
        if (h2 == 0.0) continue;
        const Var left[2] = {xi(h), eta(mh)};
        const Var right[2] = {xi(mh), eta(h)};
        for (const auto& l : left)
            for (const auto& r : right) out.F_quad.add({l, r}, 0.25 * h2);
    }

    // sum over ordered h-tuples with sum h = 0 of prod (xi_{h_j} + eta_{-h_j}) equals
    // sum over zero-momentum multisets J of orderings(J) zeta_J.
    std::vector<Var> vars;
    for (std::size_t i = 0; i < B.size(); ++i) vars.push_back(xi(B.coords(i)));
    for (std::size_t i = 0; i < B.size(); ++i) vars.push_back(eta(B.coords(i)));
    std::sort(vars.begin(), vars.end());
    const int deg = 2 * ell + 2;
    out.F_count = Polynomial(d);
    Monomial cur;
    std::vector<std::size_t> pick(std::size_t(deg), 0);
    // Nondecreasing index sequences enumerate multisets.
    std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
        if (left == 0) {
            if (momentum(cur) == std::array<int, 3>{0, 0, 0}) out.F_count.add_unchecked(cur, orderings(cur));
            return;
        }
        for (std::size_t v = from; v < vars.size(); ++v) {
            cur.push_back(vars[v]);
            rec(v, left - 1);
            cur.pop_back();
        }
    };
    rec(0, deg);

    out.avg_quad = flow_average(out.F_quad);
    out.avg_count = flow_average(out.F_count);

    for (std::size_t i = 0; i < B.size(); ++i) {
        const auto h = B.coords(i);
        out.dispersive.emplace_back(h, out.avg_quad.coeff({xi(h), eta(h)}).real());
    }

    // d/deta_0 of eta_0^{ell+1} xi_0^{ell+1} brings a factor ell+1; mu^2 mu^{2(ell alpha-1)}
    // = mu^{2 ell alpha} is kept symbolic so the integer arithmetic below stays exact.
    Monomial diag;
    const std::vector<int> zero(std::size_t(d), 0);
    for (int i = 0; i <= ell; ++i) diag.push_back(xi(zero));
    for (int i = 0; i <= ell; ++i) diag.push_back(eta(zero));
    const double count = out.avg_count.coeff(diag).real();
    out.nonlinear = beta * ((count * double(ell + 1)) / (std::ldexp(1.0, ell + 1) * double(2 * ell + 2)));

    bool ok = true;
    for (const auto& [m, c] : out.avg_count.terms()) {
        int nx = 0;
        std::array<int, 3> sx{0, 0, 0}, se{0, 0, 0};
        for (const auto& v : m) {
            auto& acc = v.sigma > 0 ? sx : se;
            if (v.sigma > 0) ++nx;
            for (int c2 = 0; c2 < 3; ++c2) acc[std::size_t(c2)] += v.a[std::size_t(c2)];
        }
        if (nx != ell + 1 || sx != se || c.real() != orderings(m)) ok = false;
    }
    out.resonance_ok = ok;
    return out;
}

std::string format_monomial(const Monomial& m, int d) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ",";
        s += "(";
        if (d == 1) {
            s += std::to_string(m[i].a[0]);
        } else {
            s += "(";
            for (int c = 0; c < d; ++c) {
                if (c) s += ",";
                s += std::to_string(m[i].a[std::size_t(c)]);
            }
            s += ")";
        }
        s += m[i].sigma > 0 ? ",+1)" : ",-1)";
    }
    return s + "]";
}

void write_polynomial(std::ostream& os, const Polynomial& p) {
    for (const auto& [m, c] : p.terms())
        os << fmt_double(c.real()) << ' ' << fmt_double(c.imag()) << ' ' << format_monomial(m, p.dim()) << '\n';
}

Polynomial read_polynomial(std::istream& is, int d) {
    Polynomial p(d);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        std::string rest;
        if (!(ls >> re >> im)) throw StructuralError("polynomial line " + std::to_string(lineno) + ": bad coefficient");
        std::getline(ls, rest);
        // Strip everything except digits, signs and separators, then parse groups.
        std::vector<int> nums;
        std::string tok;
        for (char ch : rest) {
            if ((ch >= '0' && ch <= '9') || ch == '-' || ch == '+') {
                tok += ch;
            } else if (!tok.empty()) {
                nums.push_back(std::stoi(tok));
                tok.clear();
            }
        }
        if (!tok.empty()) nums.push_back(std::stoi(tok));
        if (nums.size() % std::size_t(d + 1) != 0)
            throw StructuralError("polynomial line " + std::to_string(lineno) + ": malformed index list");
        Monomial m;
        for (std::size_t i = 0; i < nums.size(); i += std::size_t(d + 1)) {
            std::vector<int> a(nums.begin() + long(i), nums.begin() + long(i) + d);
            const int sg = nums[i + std::size_t(d)];
            if (sg != 1 && sg != -1) throw StructuralError("polynomial line " + std::to_string(lineno) + ": sign must be +1 or -1");
            m.push_back(make_var(a, sg));
        }
        p.add(m, cplx(re, im));
    }
    return p;
}

} // namespace kgc::nf
