#ifndef RH3_SPECIAL_HPP
#define RH3_SPECIAL_HPP

// Special functions at working precision: Gamma on the complex plane,
// modified Bessel I_nu / K_nu, and Airy Ai / Ai'.  Small arguments go
// through power series evaluated with cancellation guard bits; large
// arguments through the classical asymptotic expansions, with the switch
// radius tied to the active precision so the two regimes overlap.

#include "precision.hpp"

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rh3 {

// RAII bump of the working precision (used internally for guard bits).
class PrecGuard {
    unsigned saved_bits_;
    unsigned saved_digits_;
  public:
    explicit PrecGuard(unsigned extra_bits) {
        saved_bits_ = precision_bits();
        saved_digits_ = Real::default_precision();
        unsigned nb = saved_bits_ + extra_bits;
        mpfr_set_default_prec(nb);
        Real::default_precision(static_cast<unsigned>(nb * 0.3010299957) + 2);
    }
    ~PrecGuard() {
        mpfr_set_default_prec(saved_bits_);
        Real::default_precision(saved_digits_);
    }
    PrecGuard(const PrecGuard&) = delete;
    PrecGuard& operator=(const PrecGuard&) = delete;
};

// Round a value computed under a PrecGuard back to the ambient precision.
inline Real round_to_active(const Real& x) {
    Real y;
    mpfr_set(y.backend().data(), x.backend().data(), MPFR_RNDN);
    return y;
}
inline Cx round_to_active(const Cx& z) {
    return Cx(round_to_active(z.re), round_to_active(z.im));
}

namespace detail {

// Bernoulli numbers B_{2k} as exact rationals, grown on demand.
// B_m from  sum_{j=0}^{m} C(m+1, j) B_j = 0.
inline const mpq_class& bernoulli2k(unsigned k) {
    static std::vector<mpq_class> all{mpq_class(1), mpq_class(-1, 2)};  // B_0, B_1
    unsigned need = 2 * k;
    while (all.size() <= need) {
        unsigned m = static_cast<unsigned>(all.size());
        mpq_class s(0);
        mpz_class binom(1);  // C(m+1, 0)
        for (unsigned j = 0; j < m; ++j) {
            s += mpq_class(binom) * all[j];
            binom *= (m + 1 - j);
            binom /= (j + 1);
        }
        // here binom == C(m+1, m) == m+1
        all.push_back(-s / mpq_class(binom));
    }
    return all[need];
}

inline Real to_real(const mpq_class& q) {
    Real num, den;
    mpfr_set_z(num.backend().data(), q.get_num().get_mpz_t(), MPFR_RNDN);
    mpfr_set_z(den.backend().data(), q.get_den().get_mpz_t(), MPFR_RNDN);
    return num / den;
}

// log Gamma by the Stirling series; requires |z| large enough for the
// active precision (caller shifts first).
inline Cx loggamma_stirling(const Cx& z) {
    Real pi = pi_real();
    Cx lg = (z - Cx(Real(1) / 2)) * log(z) - z + Cx(log(2 * pi) / 2);
    Cx z2 = z * z;
    Cx zp = z;  // z^{2k-1}
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 8);
    Real scale = abs(lg) + 1;
    Real prev_mag(-1);
    for (unsigned k = 1; k < 4096; ++k) {
        Real b = to_real(bernoulli2k(k));
        Cx term = Cx(b / (2 * k * (2 * k - 1))) / zp;
        Real mag = abs(term);
        if (prev_mag >= 0 && mag > prev_mag)
            throw std::runtime_error("loggamma_stirling: divergent tail, |z| too small");
        lg += term;
        if (mag < tol * scale) return lg;
        prev_mag = mag;
        zp = zp * z2;
    }
    throw std::runtime_error("loggamma_stirling: series did not settle");
}

}  // namespace detail

// Gamma(x) for complex x, relative error within a few ulps of the active
// precision.  Real arguments go straight to MPFR.
inline Cx gamma(const Cx& x) {
    if (x.im == 0) {
        if (x.re <= 0 && floor(x.re) == x.re)
            throw std::domain_error("gamma: pole at non-positive integer");
        Real g;
        mpfr_gamma(g.backend().data(), x.re.backend().data(), MPFR_RNDN);
        return Cx(g);
    }
    unsigned bits = precision_bits();
    PrecGuard guard(96);
    Cx z = round_to_active(x);  // lift to the guarded precision
    Real pi = pi_real();
    bool reflected = false;
    if (z.re < Real(1) / 2) {
        reflected = true;
        z = Cx(Real(1) - z.re, -z.im);
    }
    // shift until Stirling converges comfortably
    Real z0 = Real(static_cast<unsigned>(bits * 0.125) + 12);
    Cx shift_prod(Real(1));
    while (abs(z) < z0) {
        shift_prod *= z;
        z.re += 1;
    }
    Cx g = exp(detail::loggamma_stirling(z)) / shift_prod;
    if (reflected) {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        Cx s = sin(Cx(pi) * Cx(x.re, x.im));
        g = Cx(pi) / (s * g);
    }
    return round_to_active(g);
}

inline Real gamma(const Real& x) { return gamma(Cx(x)).re; }

// ---------------------------------------------------------------------------
// Modified Bessel functions

enum class BesselKind { I, K };

namespace detail {

// I_nu by the ascending series, with guard bits against the alternating-term
// cancellation that appears once zeta leaves the positive axis.
inline Cx bessel_i_series(const Real& nu_in, const Cx& zeta_in) {
    double az = static_cast<double>(abs(zeta_in));
    unsigned guard = static_cast<unsigned>(2.9 * az) + 64;
    PrecGuard g(guard);
    Cx zeta = round_to_active(zeta_in);
    Real nu = round_to_active(nu_in);
    Cx half = Cx(zeta.re / 2, zeta.im / 2);
    Cx q = half * half;
    Cx term = pow(half, nu) / gamma(Cx(nu + 1));
    Cx sum = term;
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 8);
    Real peak = abs(term);
    for (unsigned k = 1; k < 100000; ++k) {
        term = term * q / Cx(Real(k) * (nu + Real(k)));
        sum += term;
        Real m = abs(term);
        if (m > peak) peak = m;
        if (m < tol * (abs(sum) + peak * ldexp(Real(1), -64))) break;
    }
    return sum;
}

// K_n for integer order n >= 0 via the logarithmic series.
inline Cx bessel_k_int_series(unsigned n, const Cx& zeta_in) {
    double az = static_cast<double>(abs(zeta_in));
    unsigned guard = static_cast<unsigned>(2.9 * az) + 64;
    PrecGuard g(guard);
    Cx zeta = round_to_active(zeta_in);
    Cx half(zeta.re / 2, zeta.im / 2);
    Cx q = half * half;
    Real gam = euler_gamma_real();

    // finite part: (1/2) (z/2)^{-n} sum_{k<n} ((n-k-1)!/k!) (-q)^k
    Cx finite(Real(0));
    if (n > 0) {
        Real factk(1);
        Cx mqk(Real(1));
        for (unsigned k = 0; k < n; ++k) {
            Real fact_nk(1);
            for (unsigned j = 1; j <= n - k - 1; ++j) fact_nk *= j;
            finite += Cx(fact_nk / factk) * mqk;
            mqk = mqk * (Cx(Real(0)) - q);
            factk *= (k + 1);
        }
        finite = Cx(Real(1) / 2) * pow(half, Real(-(double)n)) * finite;
    }

    // log part: (-1)^{n+1} log(z/2) I_n(z)
    Cx lg = log(half);
    Cx In = bessel_i_series(Real(n), zeta);
    Cx logpart = ((n % 2 == 0) ? Cx(-1) : Cx(1)) * lg * In;

    // psi series: (-1)^n (1/2)(z/2)^n sum_k (psi(k+1)+psi(n+k+1)) q^k/(k!(n+k)!)
    Real H1(0), H2(0);
    for (unsigned j = 1; j <= n; ++j) H2 += Real(1) / j;
    Real factk(1), factnk(1);
    for (unsigned j = 1; j <= n; ++j) factnk *= j;
    Cx qk(Real(1));
    Cx psum(Real(0));
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 8);
    Real peak(0);
    for (unsigned k = 0; k < 100000; ++k) {
        Cx term = Cx((H1 + H2 - 2 * gam) / (factk * factnk)) * qk;
        psum += term;
        Real m = abs(term);
        if (m > peak) peak = m;
        if (k > 2 && m < tol * (abs(psum) + peak * ldexp(Real(1), -64))) break;
        qk = qk * q;
        factk *= (k + 1);
        factnk *= (n + k + 1);
        H1 += Real(1) / (k + 1);
        H2 += Real(1) / (n + k + 1);
    }
    Cx psipart = ((n % 2 == 0) ? Cx(Real(1)) : Cx(Real(-1))) * Cx(Real(1) / 2) * pow(half, Real((double)n)) * psum;
    return finite + logpart + psipart;
}

// Asymptotic sums for large |zeta|.
inline void bessel_asym_sums(const Real& nu, const Cx& zeta, Cx& sum_plus, Cx& sum_minus) {
    // sum_minus = sum a_k(nu)/zeta^k       (goes with e^{-zeta}, K-type)
    // sum_plus  = sum (-1)^k a_k(nu)/zeta^k (goes with e^{+zeta})
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 6);
    Cx ak(Real(1));
    sum_plus = Cx(Real(1));
    sum_minus = Cx(Real(1));
    Real mu = 4 * nu * nu;
    Real prev(-1);
    for (unsigned k = 1; k < 4096; ++k) {
        Real num = mu - Real((2 * k - 1)) * Real((2 * k - 1));
        ak = ak * Cx(num / (8 * k)) / zeta;
        Real m = abs(ak);
        if (prev >= 0 && m > prev) break;  // optimal truncation
        sum_minus += ak;
        sum_plus += (k % 2 == 0) ? ak : Cx(Real(0)) - ak;
        if (m < tol) break;
        prev = m;
    }
}

inline Cx bessel_k_asym(const Real& nu, const Cx& zeta) {
    Cx sp, sm;
    bessel_asym_sums(nu, zeta, sp, sm);
    Real pi = pi_real();
    return sqrt(Cx(pi) / (Cx(2) * zeta)) * exp(Cx(Real(0)) - zeta) * sm;
}

inline Cx bessel_i_asym(const Real& nu, const Cx& zeta) {
    Cx sp, sm;
    bessel_asym_sums(nu, zeta, sp, sm);
    Real pi = pi_real();
    Cx lead = exp(zeta) * sp / sqrt(Cx(2) * Cx(pi) * zeta);
    // reflected exponential, sign of the Stokes multiplier set by Im(zeta)
    Real s = (zeta.im >= 0) ? Real(1) : Real(-1);
    Cx phase = exp(Cx(Real(0), s * pi * (nu + Real(1) / 2)));
    Cx sub = phase * exp(Cx(Real(0)) - zeta) * sm / sqrt(Cx(2) * Cx(pi) * zeta);
    return lead + sub;
}

inline double bessel_series_radius() {
    return 0.36 * precision_bits() + 12.0;
}

}  // namespace detail

// I_nu(zeta) or K_nu(zeta).  K on its cut (negative real axis) is refused.
inline Cx bessel_mod(BesselKind kind, const Real& order_in, const Cx& zeta) {
    Real order = order_in;
    if (order < 0) {
        // K is even in the order; I_{-n} = I_n at integer orders
        if (kind == BesselKind::K || floor(order) == order) order = -order;
    }
    if (kind == BesselKind::K && zeta.im == 0 && zeta.re <= 0)
        throw std::domain_error("bessel_mod: K evaluated on its branch cut");
    if (zeta.re == 0 && zeta.im == 0) {
        if (kind == BesselKind::K) throw std::domain_error("bessel_mod: K singular at 0");
        if (order == 0) return Cx(Real(1));
        if (order > 0) return Cx(Real(0));
        throw std::domain_error("bessel_mod: I_nu(0) singular for nu < 0");
    }
    double az = static_cast<double>(abs(zeta));
    bool use_series = az < detail::bessel_series_radius();
    if (kind == BesselKind::I) {
        Cx r = use_series ? detail::bessel_i_series(order, zeta) : detail::bessel_i_asym(order, zeta);
        return round_to_active(r);
    }
    if (use_series) {
        Real rn = round(order);
        if (rn == order) {
            if (order < 0) return bessel_mod(BesselKind::K, -order, zeta);  // K_{-n} = K_n
            return round_to_active(detail::bessel_k_int_series(
                static_cast<unsigned>(static_cast<long>(rn)), zeta));
        }
        // K_nu = pi/(2 sin(pi nu)) (I_{-nu} - I_nu); guard against near-integer orders
        Real pi = pi_real();
        Real s = sin(pi * order);
        unsigned guard = 64;
        double closeness = static_cast<double>(abs(s));
        if (closeness < 1e-2) guard += static_cast<unsigned>(-std::log2(closeness)) + 32;
        PrecGuard g(guard);
        Cx im1 = detail::bessel_i_series(-order, zeta);
        Cx ip1 = detail::bessel_i_series(order, zeta);
        return round_to_active(Cx(pi / (2 * s)) * (im1 - ip1));
    }
    return round_to_active(detail::bessel_k_asym(order, zeta));
}

// d/dzeta of I_nu / K_nu via the stable recurrences
//   I' = (I_{nu-1} + I_{nu+1})/2,  K' = -(K_{nu-1} + K_{nu+1})/2.
inline Cx bessel_mod_deriv(BesselKind kind, const Real& order, const Cx& zeta) {
    Cx a = bessel_mod(kind, order - 1, zeta);
    Cx b = bessel_mod(kind, order + 1, zeta);
    Cx h = (a + b) / Cx(2);
    return (kind == BesselKind::I) ? h : Cx(Real(0)) - h;
}

// ---------------------------------------------------------------------------
// Airy function

namespace detail {

inline void airy_series(const Cx& zeta_in, Cx& ai, Cx& aip) {
    double az = static_cast<double>(abs(zeta_in));
    unsigned guard = static_cast<unsigned>(2.0 * std::pow(az, 1.5)) + 64;
    PrecGuard g(guard);
    Cx zeta = round_to_active(zeta_in);
    Real third = Real(1) / 3;
    Real c1 = pow(Real(3), -Real(2) / 3) / gamma(Real(2) / 3);  // Ai(0)
    Real c2 = pow(Real(3), -third) / gamma(third);              // -Ai'(0)

    Cx z3 = zeta * zeta * zeta;
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 8);

    // f = sum u_k, u_0 = 1, u_k = u_{k-1} z^3 / ((3k-1)(3k))
    // g = sum v_k, v_0 = z, v_k = v_{k-1} z^3 / ((3k)(3k+1))
    Cx u(Real(1)), v = zeta;
    Cx f = u, gg = v;
    Cx fp(Real(0)), gp(Real(1));  // f' and g' accumulated term-wise
    Real peak(1);
    for (unsigned k = 1; k < 100000; ++k) {
        u = u * z3 / Cx(Real((3 * k - 1)) * Real(3 * k));
        v = v * z3 / Cx(Real(3 * k) * Real((3 * k + 1)));
        f += u;
        gg += v;
        // derivative terms: u_k' = u_{k-1} z^2 * 3k/((3k-1)(3k)) = u_k * 3k / z
        Cx du = u * Cx(Real(3 * k));
        Cx dv = v * Cx(Real(3 * k + 1));
        if (!(zeta.re == 0 && zeta.im == 0)) {
            fp += du / zeta;
            gp += dv / zeta;
        }
        Real m = abs(u) + abs(v);
        if (m > peak) peak = m;
        if (m < tol * (abs(f) + abs(gg) + peak * ldexp(Real(1), -64))) break;
    }
    ai = Cx(c1) * f - Cx(c2) * gg;
    aip = Cx(c1) * fp - Cx(c2) * gp;
}

inline void airy_asym_core(const Cx& zeta, Cx& ai, Cx& aip) {
    // valid in |arg zeta| <= 2pi/3 with optimal truncation
    Real pi = pi_real();
    Cx zq = pow(zeta, Real(1) / 4);
    Cx w = Cx(Real(2) / 3) * zeta * sqrt(zeta);
    Real tol = ldexp(Real(1), -static_cast<long>(precision_bits()) - 6);
    Cx uk(Real(1)), s_ai(Real(1)), s_aip(Real(1));
    Real prev(-1);
    Cx wk(Real(1));
    for (unsigned k = 1; k < 4096; ++k) {
        uk = uk * Cx(Real((6 * k - 5)) * Real((6 * k - 1)) / (72 * k));
        wk = wk * w;
        Cx term = uk / wk;
        Real m = abs(term);
        if (prev >= 0 && m > prev) break;
        Cx sgn = (k % 2 == 0) ? Cx(Real(1)) : Cx(Real(-1));
        s_ai += sgn * term;
        Real vfac = Real(6 * k + 1) / Real(1 - static_cast<long>(6 * k));
        s_aip += sgn * term * Cx(vfac);
        if (m < tol) break;
        prev = m;
    }
    Cx em = exp(Cx(Real(0)) - w);
    ai = em * s_ai / (Cx(2 * sqrt(pi)) * zq);
    aip = Cx(Real(-1)) * zq * em * s_aip / Cx(2 * sqrt(pi));
}

}  // namespace detail

// Returns (Ai(zeta), Ai'(zeta)).
inline std::pair<Cx, Cx> airy(const Cx& zeta) {
    double az = static_cast<double>(abs(zeta));
    double sw = std::pow(0.62 * precision_bits(), 2.0 / 3.0) + 6.0;
    if (az < sw) {
        Cx ai, aip;
        detail::airy_series(zeta, ai, aip);
        return {round_to_active(ai), round_to_active(aip)};
    }
    Real a = arg(zeta);
    Real two_thirds_pi = 2 * pi_real() / 3;
    if (abs(a) <= two_thirds_pi) {
        Cx ai, aip;
        detail::airy_asym_core(zeta, ai, aip);
        return {round_to_active(ai), round_to_active(aip)};
    }
    // rotate out of the sector:  Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z),
    //                            Ai'(z) = -w^2 Ai'(wz) - w Ai'(w^2 z)
    Real pi = pi_real();
    Cx w = polar(Real(1), 2 * pi / 3);
    Cx w2 = polar(Real(1), -2 * pi / 3);
    Cx a1, a1p, a2, a2p;
    detail::airy_asym_core(w * zeta, a1, a1p);
    detail::airy_asym_core(w2 * zeta, a2, a2p);
    Cx ai = Cx(Real(0)) - w * a1 - w2 * a2;
    Cx aip = Cx(Real(0)) - w2 * a1p - w * a2p;
    return {round_to_active(ai), round_to_active(aip)};
}

}  // namespace rh3

#endif
