#ifndef RH3_PRECISION_HPP
#define RH3_PRECISION_HPP

// Arbitrary-precision real and complex scalar types used by every module.
// Reals are MPFR floats with runtime-selectable significand size; complex
// numbers are a plain re/im pair on top of them.  One PrecisionContext is
// fixed per run; everything downstream inherits it.

#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rh3 {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

struct PrecisionContext {
    unsigned significand_bits = 256;
    long exponent_range = 1L << 30;  // |exponent| bound, far above any e^{nG} we form

    void activate() const {
        if (significand_bits < 64)
            throw std::invalid_argument("PrecisionContext: significand_bits must be >= 64");
        const unsigned digits10 =
            static_cast<unsigned>(significand_bits * 0.3010299956639812) + 2;
        Real::default_precision(digits10);
        mpfr_set_default_prec(significand_bits);
        mpfr_set_emax(exponent_range);
        mpfr_set_emin(-exponent_range);
    }
    static PrecisionContext active() {
        PrecisionContext c;
        c.significand_bits = static_cast<unsigned>(mpfr_get_default_prec());
        c.exponent_range = mpfr_get_emax();
        return c;
    }
};

inline void set_precision_bits(unsigned bits) {
    PrecisionContext c;
    c.significand_bits = bits;
    c.activate();
}

inline unsigned precision_bits() {
    return static_cast<unsigned>(mpfr_get_default_prec());
}

// Machine epsilon of the active precision, 2^(1-bits).
inline Real eps_active() {
    return ldexp(Real(1), 1 - static_cast<long>(precision_bits()));
}

inline Real pi_real() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

inline Real euler_gamma_real() {
    Real g;
    mpfr_const_euler(g.backend().data(), MPFR_RNDN);
    return g;
}

// ---------------------------------------------------------------------------
// Complex scalar

struct Cx {
    Real re, im;

    Cx() : re(0), im(0) {}
    Cx(const Real& r) : re(r), im(0) {}
    Cx(const Real& r, const Real& i) : re(r), im(i) {}
    Cx(double r) : re(r), im(0) {}
    Cx(double r, double i) : re(r), im(i) {}
    Cx(int r) : re(r), im(0) {}
    Cx(long r) : re(r), im(0) {}

    Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
    Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
    Cx& operator*=(const Cx& o) {
        Real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cx& operator/=(const Cx& o);
};

inline Cx operator+(const Cx& a, const Cx& b) { return Cx(a.re + b.re, a.im + b.im); }
inline Cx operator-(const Cx& a, const Cx& b) { return Cx(a.re - b.re, a.im - b.im); }
inline Cx operator-(const Cx& a) { return Cx(-a.re, -a.im); }
inline Cx operator*(const Cx& a, const Cx& b) {
    return Cx(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}
inline Cx operator*(const Real& a, const Cx& b) { return Cx(a * b.re, a * b.im); }
inline Cx operator*(const Cx& a, const Real& b) { return Cx(a.re * b, a.im * b); }
inline Cx operator/(const Cx& a, const Cx& b) {
    // Smith's scheme keeps intermediate magnitudes tame
    if (abs(b.re) >= abs(b.im)) {
        Real r = b.im / b.re;
        Real d = b.re + b.im * r;
        return Cx((a.re + a.im * r) / d, (a.im - a.re * r) / d);
    }
    Real r = b.re / b.im;
    Real d = b.re * r + b.im;
    return Cx((a.re * r + a.im) / d, (a.im * r - a.re) / d);
}
inline Cx operator/(const Cx& a, const Real& b) { return Cx(a.re / b, a.im / b); }
inline Cx operator/(const Real& a, const Cx& b) { return Cx(a) / b; }
inline Cx& Cx::operator/=(const Cx& o) { *this = *this / o; return *this; }
inline bool operator==(const Cx& a, const Cx& b) { return a.re == b.re && a.im == b.im; }
inline bool operator!=(const Cx& a, const Cx& b) { return !(a == b); }

inline Real abs(const Cx& z) { return hypot(z.re, z.im); }
inline Real norm2(const Cx& z) { return z.re * z.re + z.im * z.im; }
inline Cx conj(const Cx& z) { return Cx(z.re, -z.im); }
inline Real arg(const Cx& z) { return atan2(z.im, z.re); }

inline Cx sqrt(const Cx& z) {
    // principal branch, cut along the negative real axis
    Real m = abs(z);
    if (m == 0) return Cx(Real(0), Real(0));
    Real u = sqrt((m + abs(z.re)) / 2);
    Real v = z.im / (2 * u);
    if (z.re >= 0) return Cx(u, v);
    if (z.im >= 0) return Cx(v, u);
    return Cx(-v, u);
}

inline Cx exp(const Cx& z) {
    Real e = exp(z.re);
    return Cx(e * cos(z.im), e * sin(z.im));
}

inline Cx log(const Cx& z) {  // principal branch
    return Cx(log(abs(z)), arg(z));
}

// log with an explicit cut descriptor: the branch cut is the ray
// arg = cut_angle, and arguments are taken in (cut_angle, cut_angle + 2*pi].
inline Cx log_cut(const Cx& z, const Real& cut_angle) {
    Real a = arg(z);
    Real two_pi = 2 * pi_real();
    while (a <= cut_angle) a += two_pi;
    while (a > cut_angle + two_pi) a -= two_pi;
    return Cx(log(abs(z)), a);
}

inline Cx pow(const Cx& z, const Real& p) {
    if (z.re == 0 && z.im == 0) return Cx(Real(0), Real(0));
    return exp(p * log(z));
}
inline Cx pow(const Cx& z, const Cx& p) { return exp(p * log(z)); }

inline Cx pow_cut(const Cx& z, const Real& p, const Real& cut_angle) {
    if (z.re == 0 && z.im == 0) return Cx(Real(0), Real(0));
    return exp(p * log_cut(z, cut_angle));
}

inline Cx sin(const Cx& z) {
    return Cx(sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im));
}
inline Cx cos(const Cx& z) {
    return Cx(cos(z.re) * cosh(z.im), -sin(z.re) * sinh(z.im));
}

inline Cx polar(const Real& r, const Real& theta) {
    return Cx(r * cos(theta), r * sin(theta));
}

inline bool isfinite(const Cx& z) {
    return mpfr_number_p(z.re.backend().data()) && mpfr_number_p(z.im.backend().data());
}

std::string to_string(const Real& x, int digits = 0);
inline std::string to_string(const Cx& z, int digits = 0) {
    return "(" + to_string(z.re, digits) + ", " + to_string(z.im, digits) + ")";
}

inline std::string to_string(const Real& x, int digits) {
    if (digits <= 0) digits = static_cast<int>(precision_bits() * 0.30103) + 2;
    return x.str(digits);
}

inline Real real_from_string(const std::string& s) { return Real(s); }

}  // namespace rh3

#endif
