#ifndef RH3_LINALG_HPP
#define RH3_LINALG_HPP

// Dense complex linear algebra at working precision: a fixed 3x3 matrix type
// for the Riemann-Hilbert fields and a dynamic matrix with pivoted LU for the
// Gram and collocation systems.  Sizes here are small (n <= a few thousand),
// so plain O(n^3) with full or partial pivoting is all we need.

#include "precision.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rh3 {

struct Mat3 {
    std::array<Cx, 9> a{};  // row-major

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = Cx(1); m(1, 1) = Cx(1); m(2, 2) = Cx(1);
        return m;
    }
    static Mat3 zero() { return Mat3(); }

    Cx& operator()(int i, int j) { return a[static_cast<size_t>(3 * i + j)]; }
    const Cx& operator()(int i, int j) const { return a[static_cast<size_t>(3 * i + j)]; }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (size_t k = 0; k < 9; ++k) r.a[k] = x.a[k] + y.a[k];
    return r;
}
inline Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (size_t k = 0; k < 9; ++k) r.a[k] = x.a[k] - y.a[k];
    return r;
}
inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Cx s = x(i, 0) * y(0, j);
            s += x(i, 1) * y(1, j);
            s += x(i, 2) * y(2, j);
            r(i, j) = s;
        }
    return r;
}
inline Mat3 operator*(const Cx& c, const Mat3& x) {
    Mat3 r;
    for (size_t k = 0; k < 9; ++k) r.a[k] = c * x.a[k];
    return r;
}

inline Cx det(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
         - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
         + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline Mat3 inverse(const Mat3& m) {
    Cx d = det(m);
    if (abs(d) == 0) throw std::runtime_error("Mat3: singular matrix");
    Mat3 r;
    r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
    r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
    r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
    r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
    r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
    r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
    r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
    r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
    r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
    return r;
}

// max-row-sum norm
inline Real norm_inf(const Mat3& m) {
    Real best(0);
    for (int i = 0; i < 3; ++i) {
        Real s = abs(m(i, 0)) + abs(m(i, 1)) + abs(m(i, 2));
        if (s > best) best = s;
    }
    return best;
}

inline Real max_abs_entry(const Mat3& m) {
    Real best(0);
    for (size_t k = 0; k < 9; ++k) {
        Real v = abs(m.a[k]);
        if (v > best) best = v;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Dynamic complex matrix + pivoted LU

struct MatX {
    int n = 0, m = 0;
    std::vector<Cx> a;

    MatX() = default;
    MatX(int rows, int cols) : n(rows), m(cols), a(static_cast<size_t>(rows) * cols) {}

    Cx& operator()(int i, int j) { return a[static_cast<size_t>(i) * m + j]; }
    const Cx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * m + j]; }
};

struct LuResult {
    std::vector<Cx> x;
    Real cond_lower_bound;  // max |diag growth| ratio, a cheap conditioning signal
};

// Solve A x = b by LU with full pivoting (column swaps tracked).  Full
// pivoting because the Gram systems are severely graded; the extra O(n^3)
// comparisons are irrelevant at these sizes.
inline LuResult solve_full_pivot(MatX A, std::vector<Cx> b) {
    const int n = A.n;
    if (A.m != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_full_pivot: shape mismatch");
    std::vector<int> colperm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) colperm[static_cast<size_t>(i)] = i;

    Real max_piv(0), min_piv(0);
    for (int k = 0; k < n; ++k) {
        int pi = k, pj = k;
        Real best(-1);
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j) {
                Real v = abs(A(i, j));
                if (v > best) { best = v; pi = i; pj = j; }
            }
        if (best <= 0) throw std::runtime_error("solve_full_pivot: singular system");
        if (pi != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(pi, j));
            std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(pi)]);
        }
        if (pj != k) {
            for (int i = 0; i < n; ++i) std::swap(A(i, k), A(i, pj));
            std::swap(colperm[static_cast<size_t>(k)], colperm[static_cast<size_t>(pj)]);
        }
        if (k == 0) { max_piv = best; min_piv = best; }
        else { if (best > max_piv) max_piv = best; if (best < min_piv) min_piv = best; }

        Cx piv = A(k, k);
        for (int i = k + 1; i < n; ++i) {
            Cx f = A(i, k) / piv;
            if (f.re == 0 && f.im == 0) continue;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
        }
    }
    std::vector<Cx> y(static_cast<size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        Cx s = b[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s / A(i, i);
    }
    LuResult r;
    r.x.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) r.x[static_cast<size_t>(colperm[static_cast<size_t>(i)])] = y[static_cast<size_t>(i)];
    r.cond_lower_bound = (min_piv > 0) ? max_piv / min_piv : Real(0);
    return r;
}

// Partial-pivot LU solve for many right-hand sides (collocation systems).
inline void solve_partial_pivot_inplace(MatX& A, std::vector<std::vector<Cx>>& rhs) {
    const int n = A.n;
    for (int k = 0; k < n; ++k) {
        int p = k;
        Real best = abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            Real v = abs(A(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best <= 0) throw std::runtime_error("solve_partial_pivot: singular system");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            for (auto& b : rhs) std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(p)]);
        }
        Cx piv = A(k, k);
        for (int i = k + 1; i < n; ++i) {
            Cx f = A(i, k) / piv;
            if (f.re == 0 && f.im == 0) continue;
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            for (auto& b : rhs) b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
        }
    }
    for (auto& b : rhs) {
        for (int i = n - 1; i >= 0; --i) {
            Cx s = b[static_cast<size_t>(i)];
            for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[static_cast<size_t>(j)];
            b[static_cast<size_t>(i)] = s / A(i, i);
        }
    }
}

}  // namespace rh3

#endif
