#ifndef RH3_MODEL_HPP
#define RH3_MODEL_HPP

// The exact multiple-Laguerre oracle: weights x^{a_j} e^{-n x} on (0, inf),
// closed-form moments, the Gram solve for the monic type II polynomial
// P_{n1,n2} = Y_11, evaluation, and zero finding.

#include "linalg.hpp"
#include "precision.hpp"
#include "quadrature.hpp"
#include "special.hpp"

#include <json.hpp>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rh3 {

struct ModelDescriptor {
    Real alpha1, alpha2;     // weight exponents, both > -1
    int n1 = 0, n2 = 0;      // multi-index
    int n() const { return n1 + n2; }
    Real ratio() const { return n() > 0 ? Real(n1) / n() : Real(1) / 2; }
    // diagonal exponent triple of z^{n Lambda}: (n, -n1, -n2)
    std::array<int, 3> lambda() const { return {n(), -n1, -n2}; }

    ModelDescriptor() : alpha1(0), alpha2(Real(1) / 2) {}
    ModelDescriptor(const Real& a1, const Real& a2, int m1, int m2)
        : alpha1(a1), alpha2(a2), n1(m1), n2(m2) {
        if (!(alpha1 > -1) || !(alpha2 > -1))
            throw std::invalid_argument("ModelDescriptor: weight exponents must exceed -1");
        if (n1 < 0 || n2 < 0)
            throw std::invalid_argument("ModelDescriptor: multi-index must be non-negative");
    }

    Real weight(int j, const Real& x) const {
        const Real& a = (j == 1) ? alpha1 : alpha2;
        return pow(x, a) * exp(-Real(n()) * x);
    }
};

struct MonicPolynomial {
    int degree = 0;
    std::vector<Cx> coeff;  // ascending powers, coeff[degree] == 1 exactly

    MonicPolynomial() : coeff{Cx(1)} {}
};

// int_0^inf x^{k+a_j} e^{-n x} dx = Gamma(k + a_j + 1) / n^{k + a_j + 1}
inline Real moment(int j, int k, const ModelDescriptor& m) {
    if (k < 0) throw std::invalid_argument("moment: k must be non-negative");
    const Real& a = (j == 1) ? m.alpha1 : m.alpha2;
    Real p = Real(k) + a + 1;
    return gamma(p) / pow(Real(m.n()), p);
}

struct MopSolveInfo {
    Real cond_lower_bound;
    Real max_rel_residual;
};

// The unique monic P of degree n with all n orthogonality conditions
//   int P(x) x^k w_j(x) dx = 0,  k < n_j.
// Fully pivoted elimination at working precision; residuals are recomputed
// afterwards from the closed-form moments and reported relative to the
// cancellation scale of each condition.
inline MonicPolynomial solve_mop(const ModelDescriptor& m, MopSolveInfo* info = nullptr) {
    const int n = m.n();
    MonicPolynomial p;
    p.degree = n;
    p.coeff.assign(static_cast<size_t>(n) + 1, Cx(0));
    p.coeff[static_cast<size_t>(n)] = Cx(1);
    if (n == 0) {
        if (info) { info->cond_lower_bound = 1; info->max_rel_residual = 0; }
        return p;
    }

    // cache moments m_j(q) for q = 0 .. 2n-1
    std::vector<Real> m1(static_cast<size_t>(2 * n)), m2(static_cast<size_t>(2 * n));
    for (int q = 0; q < 2 * n; ++q) {
        m1[static_cast<size_t>(q)] = moment(1, q, m);
        m2[static_cast<size_t>(q)] = moment(2, q, m);
    }

    MatX A(n, n);
    std::vector<Cx> b(static_cast<size_t>(n));
    int row = 0;
    for (int j = 1; j <= 2; ++j) {
        const auto& mm = (j == 1) ? m1 : m2;
        int nj = (j == 1) ? m.n1 : m.n2;
        for (int k = 0; k < nj; ++k, ++row) {
            for (int i = 0; i < n; ++i) A(row, i) = Cx(mm[static_cast<size_t>(k + i)]);
            b[static_cast<size_t>(row)] = Cx(-mm[static_cast<size_t>(k + n)]);
        }
    }

    LuResult lu;
    try {
        lu = solve_full_pivot(A, b);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "solve_mop: singular Gram system (multi-index/exponents violate the AT property, "
            "or precision too low)");
    }
    for (int i = 0; i < n; ++i) p.coeff[static_cast<size_t>(i)] = lu.x[static_cast<size_t>(i)];

    // residuals from scratch
    Real worst(0);
    for (int j = 1; j <= 2; ++j) {
        const auto& mm = (j == 1) ? m1 : m2;
        int nj = (j == 1) ? m.n1 : m.n2;
        for (int k = 0; k < nj; ++k) {
            Cx acc = Cx(mm[static_cast<size_t>(k + n)]);
            Real scale = mm[static_cast<size_t>(k + n)];
            for (int i = 0; i < n; ++i) {
                Cx term = p.coeff[static_cast<size_t>(i)] * Cx(mm[static_cast<size_t>(k + i)]);
                acc += term;
                Real t = abs(term);
                if (t > scale) scale = t;
            }
            Real rel = abs(acc) / scale;
            if (rel > worst) worst = rel;
        }
    }
    if (info) {
        info->cond_lower_bound = lu.cond_lower_bound;
        info->max_rel_residual = worst;
    }
    return p;
}

inline Cx poly_eval(const MonicPolynomial& p, const Cx& z) {
    Cx acc = p.coeff[static_cast<size_t>(p.degree)];
    for (int i = p.degree - 1; i >= 0; --i) acc = acc * z + p.coeff[static_cast<size_t>(i)];
    return acc;
}

inline Cx poly_eval_deriv(const MonicPolynomial& p, const Cx& z) {
    Cx acc = Cx(Real(p.degree)) * p.coeff[static_cast<size_t>(p.degree)];
    for (int i = p.degree - 1; i >= 1; --i)
        acc = acc * z + Cx(Real(i)) * p.coeff[static_cast<size_t>(i)];
    return acc;
}

namespace detail {

// Aberth-Ehrlich simultaneous iteration in double precision for seeds.
inline std::vector<std::complex<double>> aberth_double(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    auto eval = [&](std::complex<double> z, std::complex<double>& d) {
        std::complex<double> p = c[static_cast<size_t>(n)];
        d = 0;
        for (int i = n - 1; i >= 0; --i) {
            d = d * z + p;
            p = p * z + c[static_cast<size_t>(i)];
        }
        return p;
    };
    // radius from coefficient bound
    double r = 0;
    for (int i = 0; i < n; ++i)
        r = std::max(r, 2.0 * std::pow(std::abs(c[static_cast<size_t>(i)]), 1.0 / (n - i)));
    if (!(r > 0) || !std::isfinite(r)) r = 1.0;
    std::vector<std::complex<double>> zs(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double th = 2 * 3.14159265358979 * (k + 0.35) / n + 0.4;
        zs[static_cast<size_t>(k)] = std::polar(r * (0.3 + 0.7 * (k + 1.0) / n), th);
    }
    for (int iter = 0; iter < 600; ++iter) {
        double moved = 0;
        for (int k = 0; k < n; ++k) {
            std::complex<double> d;
            std::complex<double> pv = eval(zs[static_cast<size_t>(k)], d);
            std::complex<double> newton = pv / d;
            std::complex<double> rep = 0;
            for (int j = 0; j < n; ++j)
                if (j != k) rep += 1.0 / (zs[static_cast<size_t>(k)] - zs[static_cast<size_t>(j)]);
            std::complex<double> step = newton / (1.0 - newton * rep);
            zs[static_cast<size_t>(k)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-13 * (1.0 + r)) break;
    }
    return zs;
}

}  // namespace detail

struct ZeroResult {
    std::vector<Cx> zeros;
    bool all_converged = true;
};

// All roots: double-precision simultaneous iteration for seeds, then Newton
// at working precision to ~0.5 * significand_bits.
inline ZeroResult poly_zeros(const MonicPolynomial& p) {
    ZeroResult res;
    const int n = p.degree;
    if (n == 0) return res;

    std::vector<double> cd(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        cd[static_cast<size_t>(i)] = static_cast<double>(p.coeff[static_cast<size_t>(i)].re);
        if (!std::isfinite(cd[static_cast<size_t>(i)]))
            throw std::runtime_error("poly_zeros: coefficients overflow double seeds");
    }
    auto seeds = detail::aberth_double(cd);

    res.zeros.resize(static_cast<size_t>(n));
    Real target = ldexp(Real(1), -static_cast<long>(precision_bits() / 2));
    for (int k = 0; k < n; ++k) {
        Cx z(seeds[static_cast<size_t>(k)].real(), seeds[static_cast<size_t>(k)].imag());
        bool ok = false;
        for (int iter = 0; iter < 120; ++iter) {
            Cx pv = poly_eval(p, z);
            Cx dv = poly_eval_deriv(p, z);
            // Aberth correction keeps multiple-seed collisions apart
            Cx rep(Real(0));
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                Cx other = (j < k) ? res.zeros[static_cast<size_t>(j)]
                                   : Cx(seeds[static_cast<size_t>(j)].real(), seeds[static_cast<size_t>(j)].imag());
                Cx diff = z - other;
                if (abs(diff) > 0) rep += Cx(1) / diff;
            }
            Cx newton = pv / dv;
            Cx denom = Cx(1) - newton * rep;
            Cx step = (abs(denom) > Real(1) / 1000) ? newton / denom : newton;
            z -= step;
            if (abs(step) <= target * (abs(z) + 1)) { ok = true; break; }
        }
        if (!ok) res.all_converged = false;
        res.zeros[static_cast<size_t>(k)] = z;
    }
    std::sort(res.zeros.begin(), res.zeros.end(), [](const Cx& a, const Cx& b) {
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    });
    return res;
}

// First row of the exact RHP solution: Y_11 = P and the weighted Cauchy
// transforms Y_{1,1+j}(z) = (1/2 pi i) int_0^inf P(x) w_j(x) / (x - z) dx.
// Quadrature: x = u^2 substitution absorbs the x^alpha endpoint factor, and
// the e^{-n x} tail is truncated once it is dead at working precision.
inline std::array<Cx, 3> oracle_row1(const ModelDescriptor& m, const MonicPolynomial& p,
                                     const Cx& z) {
    std::array<Cx, 3> row;
    row[0] = poly_eval(p, z);
    const int n = m.n();
    Real cutoff = (Real(precision_bits()) * log(Real(2)) + 60) / n + 6;
    // integrate over [0, cutoff] with x = u^2
    Real umax = sqrt(cutoff);
    const int panels = 24, nodes = 24;
    const auto& rule = gauss_legendre(nodes);
    for (int j = 1; j <= 2; ++j) {
        Cx acc(Real(0));
        for (int pn = 0; pn < panels; ++pn) {
            Real ua = umax * pn / panels, ub = umax * (pn + 1) / panels;
            Real half = (ub - ua) / 2, mid = (ua + ub) / 2;
            for (size_t k = 0; k < rule.x.size(); ++k) {
                Real u = mid + half * rule.x[k];
                Real x = u * u;
                Real w = m.weight(j, x) * 2 * u;
                acc += Cx(rule.w[k] * half * w) * poly_eval(p, Cx(x)) / (Cx(x) - z);
            }
        }
        row[static_cast<size_t>(j)] = acc / Cx(Real(0), 2 * pi_real());
    }
    return row;
}

// JSON export: degree + decimal coefficient strings at full precision.
inline nlohmann::json poly_to_json(const MonicPolynomial& p) {
    nlohmann::json j;
    j["degree"] = p.degree;
    auto& arr = j["coefficients"] = nlohmann::json::array();
    for (const auto& c : p.coeff) {
        if (c.im == 0) arr.push_back(to_string(c.re));
        else arr.push_back(nlohmann::json::array({to_string(c.re), to_string(c.im)}));
    }
    return j;
}

inline MonicPolynomial poly_from_json(const nlohmann::json& j) {
    MonicPolynomial p;
    p.degree = j.at("degree").get<int>();
    p.coeff.clear();
    for (const auto& c : j.at("coefficients")) {
        if (c.is_string()) p.coeff.push_back(Cx(Real(c.get<std::string>())));
        else p.coeff.push_back(Cx(Real(c[0].get<std::string>()), Real(c[1].get<std::string>())));
    }
    return p;
}

}  // namespace rh3

#endif
