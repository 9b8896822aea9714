#ifndef RH3_CURVE_HPP
#define RH3_CURVE_HPP

// The cubic spectral curve F(theta, z) = theta^3 + c2(z) theta^2 + c1(z) theta
// + c0(z), its labeled branches by analytic continuation along canonical
// paths, the g-function, the channel phases, local conformal coordinates, and
// sign-chart checks.  Coefficients are rational functions of z supplied by a
// preset (built-in or loaded from a preset file).

#include "model.hpp"
#include "precision.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rh3 {

// ---------------------------------------------------------------------------
// Rational coefficient functions

struct RationalFn {
    std::vector<Real> num;  // ascending powers of z
    std::vector<Real> den;

    Cx eval(const Cx& z) const {
        auto horner = [&](const std::vector<Real>& c) {
            Cx acc(Real(0));
            for (size_t i = c.size(); i-- > 0;) acc = acc * z + Cx(c[i]);
            return acc;
        };
        return horner(num) / horner(den);
    }
    Cx eval_deriv(const Cx& z) const {
        auto horner = [&](const std::vector<Real>& c) {
            Cx acc(Real(0));
            for (size_t i = c.size(); i-- > 0;) acc = acc * z + Cx(c[i]);
            return acc;
        };
        auto horner_d = [&](const std::vector<Real>& c) {
            Cx acc(Real(0));
            for (size_t i = c.size(); i-- > 1;) acc = acc * z + Cx(c[i] * Real(static_cast<double>(i)));
            return acc;
        };
        Cx n = horner(num), d = horner(den);
        Cx nd = horner_d(num), dd = horner_d(den);
        return (nd * d - n * dd) / (d * d);
    }
    static RationalFn constant(const Real& v) { return {{v}, {Real(1)}}; }
};

// ---------------------------------------------------------------------------
// Preset description

struct ConductorSpec {
    std::string name;       // "Gamma" or "Delta"
    Real a, b;              // real segment [a, b], a < b
    int sheet_shared;       // 0-based sheet indices of the swapped pair
    int sheet_partner;
    Real base;              // phase base point (the tested edge on this arc)
    int gap_dir;            // +1: gap to the right of base, -1: to the left, 0: none
    bool lensed;            // whether lenses open around this conductor
    int edge_order;         // 2: square-root pair at base, 3: three-sheet edge
    int phase_sign = +1;    // phi = sign * (1/2) int (theta_shared - theta_partner);
                            // fixed so the coordinate-mode phase is gap-positive
};

struct CurvePreset {
    std::string name;
    RationalFn c2, c1, c0;
    Real z_ref;                      // label anchor point (real, right of all cuts)
    std::array<Cx, 3> anchor_theta;  // labeled sheet values at z_ref: (+, -, *)
    std::vector<Real> branch_points; // all finite discriminant zeros, declared
    std::vector<ConductorSpec> conductors;  // [0] = Gamma channel, [1] = Delta channel
    Real x0;                         // the tested soft edge (Airy disk center)
    Real hard_edge;                  // the tested hard edge (disk center), = 0
    bool has_g = false;              // true when sheet '+' is a unit-mass resolvent
    // large-z expansion of theta_+ through 1/z^2 (for the g tail), valid
    // when has_g: theta_+ ~ g1/z + g2/z^2
    Real g_tail1, g_tail2;
    Real disk_radius_hard, disk_radius_soft;
    Real lip_offset;
    // lip span fractions per lensed conductor: lips cover
    // [a + span_lo*(b-a), a + span_hi*(b-a)]
    Real lip_span_lo = Real(0), lip_span_hi = Real(1);

    CurvePreset() : z_ref(40), x0(0), hard_edge(0), g_tail1(0), g_tail2(0),
                    disk_radius_hard(0), disk_radius_soft(0), lip_offset(0) {}
};

// ---------------------------------------------------------------------------
// Cubic root machinery

namespace detail {

inline std::array<Cx, 3> cubic_roots_polished(const Cx& c2, const Cx& c1, const Cx& c0) {
    // double-precision seeds via the closed form, then Newton at working
    // precision with a final Vieta consistency pass
    std::complex<double> b(static_cast<double>(c2.re), static_cast<double>(c2.im));
    std::complex<double> c(static_cast<double>(c1.re), static_cast<double>(c1.im));
    std::complex<double> d(static_cast<double>(c0.re), static_cast<double>(c0.im));
    // depressed cubic t^3 + p t + q, theta = t - b/3
    std::complex<double> p = c - b * b / 3.0;
    std::complex<double> q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    std::complex<double> disc = q * q / 4.0 + p * p * p / 27.0;
    std::complex<double> u = std::pow(-q / 2.0 + std::sqrt(disc), 1.0 / 3.0);
    if (std::abs(u) < 1e-30) u = std::pow(-q / 2.0 - std::sqrt(disc), 1.0 / 3.0);
    std::complex<double> v = (std::abs(u) > 0) ? -p / (3.0 * u) : 0.0;
    std::complex<double> om(-0.5, 0.8660254037844386);
    std::array<std::complex<double>, 3> seeds{u + v, u * om + v * std::conj(om),
                                              u * std::conj(om) + v * om};
    std::array<Cx, 3> r;
    for (int k = 0; k < 3; ++k)
        r[static_cast<size_t>(k)] = Cx(seeds[static_cast<size_t>(k)].real() - b.real() / 3,
                                       seeds[static_cast<size_t>(k)].imag() - b.imag() / 3);
    // Newton with Aberth repulsion
    Real tol = ldexp(Real(1), 24 - static_cast<long>(precision_bits()));
    for (int k = 0; k < 3; ++k) {
        Cx& z = r[static_cast<size_t>(k)];
        for (int iter = 0; iter < 80; ++iter) {
            Cx pv = ((z + c2) * z + c1) * z + c0;
            Cx dv = (Cx(3) * z + Cx(2) * c2) * z + c1;
            Cx rep(Real(0));
            for (int j = 0; j < 3; ++j)
                if (j != k && abs(z - r[static_cast<size_t>(j)]) > 0)
                    rep += Cx(1) / (z - r[static_cast<size_t>(j)]);
            Cx nw = pv / dv;
            Cx den = Cx(1) - nw * rep;
            Cx step = (abs(den) > Real(1) / 1000) ? nw / den : nw;
            z -= step;
            if (abs(step) <= tol * (abs(z) + 1)) break;
        }
    }
    return r;
}

}  // namespace detail

// Labeled triple of branch values, indices: 0 = '+', 1 = '-', 2 = '*'.
using SheetTriple = std::array<Cx, 3>;

class SpectralCurve {
  public:
    explicit SpectralCurve(CurvePreset preset) : p_(std::move(preset)) {
        // structural guard: declared branch points must kill the discriminant
        for (const auto& bp : p_.branch_points) {
            if (bp == 0) continue;  // coefficient poles sit at 0; checked via limits
            Real d = abs(discriminant(Cx(bp)));
            Real scale = abs(discriminant(Cx(bp + Real(1) / 50))) + abs(discriminant(Cx(bp - Real(1) / 50)));
            if (!(d < scale / 100))
                throw std::runtime_error("SpectralCurve: declared branch point fails the discriminant check (preset degenerate?)");
        }
        anchor_ = refine_labels_at(p_.z_ref, p_.anchor_theta);
    }

    const CurvePreset& preset() const { return p_; }

    Cx c2(const Cx& z) const { return p_.c2.eval(z); }
    Cx c1(const Cx& z) const { return p_.c1.eval(z); }
    Cx c0(const Cx& z) const { return p_.c0.eval(z); }

    Cx discriminant(const Cx& z) const {
        Cx a = c2(z), b = c1(z), c = c0(z);
        return Cx(18) * a * b * c - Cx(4) * a * a * a * c + a * a * b * b
             - Cx(4) * b * b * b - Cx(27) * c * c;
    }

    std::array<Cx, 3> roots_at(const Cx& z) const {
        return detail::cubic_roots_polished(c2(z), c1(z), c0(z));
    }

    // F_theta(theta, z) = 3 theta^2 + 2 c2 theta + c1
    Cx f_theta(const Cx& theta, const Cx& z) const {
        return (Cx(3) * theta + Cx(2) * c2(z)) * theta + c1(z);
    }

    // dF/dz and the implicit branch derivative dtheta/dz = -F_z / F_theta
    Cx f_z(const Cx& theta, const Cx& z) const {
        return (p_.c2.eval_deriv(z) * theta + p_.c1.eval_deriv(z)) * theta + p_.c0.eval_deriv(z);
    }
    Cx branch_deriv(const Cx& theta, const Cx& z) const {
        return (Cx(0) - f_z(theta, z)) / f_theta(theta, z);
    }

    // ---- continuation -----------------------------------------------------

    // Continue a labeled triple along the straight segment z0 -> z1; steps
    // halve whenever two roots approach within 10x the step-induced motion.
    SheetTriple continue_triple(Cx z0, SheetTriple th, const Cx& z1, int max_steps = 100000) const {
        int steps_taken = 0;
        Cx target = z1;
        Cx cur = z0;
        Real full = abs(target - cur);
        if (full == 0) return th;
        Real h = full / 24;
        while (abs(target - cur) > 0) {
            if (++steps_taken > max_steps)
                throw std::runtime_error("continue_triple: step budget exhausted (branch point straddled?)");
            Cx dir = (target - cur) / Cx(abs(target - cur));
            Real step = h;
            if (step > abs(target - cur)) step = abs(target - cur);
            Cx nxt = cur + Cx(step) * dir;
            auto rts = roots_at(nxt);
            // greedy proximity pairing
            std::array<int, 3> pick{-1, -1, -1};
            std::array<bool, 3> used{false, false, false};
            Real worst_motion(0);
            for (int i = 0; i < 3; ++i) {
                int best = -1;
                Real bd(0);
                for (int j = 0; j < 3; ++j) {
                    if (used[static_cast<size_t>(j)]) continue;
                    Real d = abs(rts[static_cast<size_t>(j)] - th[static_cast<size_t>(i)]);
                    if (best < 0 || d < bd) { best = j; bd = d; }
                }
                pick[static_cast<size_t>(i)] = best;
                used[static_cast<size_t>(best)] = true;
                if (bd > worst_motion) worst_motion = bd;
            }
            // separation of the matched configuration
            Real min_gap(-1);
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j) {
                    Real g = abs(rts[static_cast<size_t>(pick[static_cast<size_t>(i)])]
                                 - rts[static_cast<size_t>(pick[static_cast<size_t>(j)])]);
                    if (min_gap < 0 || g < min_gap) min_gap = g;
                }
            if (min_gap < 10 * worst_motion && step > full * ldexp(Real(1), -46)) {
                h = step / 2;
                continue;  // retry with a shorter step
            }
            for (int i = 0; i < 3; ++i)
                th[static_cast<size_t>(i)] = rts[static_cast<size_t>(pick[static_cast<size_t>(i)])];
            cur = nxt;
            if (h < full / 24) h = h * 2;  // relax after a forced refinement
        }
        return th;
    }

    // Canonical evaluation path from the anchor to z.  Cuts are real
    // segments, so route through the half plane of z (descending onto real
    // targets from above by convention, or from `side` when given).
    std::vector<Cx> canonical_path(const Cx& z, int side = 0) const {
        Real H = Real(3) + abs(z.im);
        Real s = (z.im > 0) ? Real(1) : (z.im < 0 ? Real(-1) : (side < 0 ? Real(-1) : Real(1)));
        std::vector<Cx> w;
        w.push_back(Cx(p_.z_ref));
        w.push_back(Cx(p_.z_ref, s * H));
        w.push_back(Cx(z.re, s * H));
        w.push_back(z);
        return w;
    }

    // Labeled branches at z; `side` picks the approach side for real z on a
    // cut (+1 from above, -1 from below).
    SheetTriple branches_at(const Cx& z, int side = 0) const {
        auto w = canonical_path(z, side);
        SheetTriple th = anchor_;
        Cx cur = w.front();
        for (size_t i = 1; i < w.size(); ++i) {
            th = continue_triple(cur, th, w[i]);
            cur = w[i];
        }
        return th;
    }

    // Monodromy of a small loop: returns the permutation p with
    // continued[i] = start[p[i]].
    std::array<int, 3> monodromy_loop(const Cx& center, const Real& radius) const {
        Cx start = center + Cx(Real(0), radius);  // start off any real cut
        SheetTriple th0 = branches_at(start, +1);
        SheetTriple th = th0;
        Cx cur = start;
        const int legs = 24;
        for (int k = 1; k <= legs; ++k) {
            Real ang = pi_real() / 2 + 2 * pi_real() * k / legs;
            Cx nxt = center + polar(radius, ang);
            th = continue_triple(cur, th, nxt);
            cur = nxt;
        }
        std::array<int, 3> perm{};
        for (int i = 0; i < 3; ++i) {
            int best = 0;
            Real bd = abs(th[static_cast<size_t>(i)] - th0[0]);
            for (int j = 1; j < 3; ++j) {
                Real d = abs(th[static_cast<size_t>(i)] - th0[static_cast<size_t>(j)]);
                if (d < bd) { bd = d; best = j; }
            }
            perm[static_cast<size_t>(i)] = best;
        }
        return perm;
    }

    // ---- path-threaded integration -----------------------------------------

    // Integrate fn(s, labeled triple at s) along waypoints with continuation
    // threaded through the quadrature nodes in order.
    Cx integrate_tracked(const std::vector<Cx>& waypoints, SheetTriple th_start,
                         const std::function<Cx(const Cx&, const SheetTriple&)>& fn,
                         int nodes_per_panel = 20, int geometric_levels_at_end = 0) const {
        const auto& rule = gauss_legendre(nodes_per_panel);
        Cx total(Real(0));
        SheetTriple th = th_start;
        Cx cur = waypoints.front();
        for (size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
            Cx a = waypoints[leg], b = waypoints[leg + 1];
            std::vector<Real> breaks{Real(0)};
            double len = static_cast<double>(abs(b - a));
            int subdiv = (len > 1 && len <= 64) ? static_cast<int>(len) + 1 : 1;
            for (int k = 1; k < subdiv; ++k) breaks.push_back(Real(k) / subdiv);
            if (leg + 2 == waypoints.size() && geometric_levels_at_end > 0)
                for (int k = 1; k <= geometric_levels_at_end; ++k)
                    breaks.push_back(Real(1) - ldexp(Real(1), -k));
            breaks.push_back(Real(1));
            std::sort(breaks.begin(), breaks.end());
            breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
            for (size_t pnl = 0; pnl + 1 < breaks.size(); ++pnl) {
                Real half = (breaks[pnl + 1] - breaks[pnl]) / 2;
                Real mid = (breaks[pnl + 1] + breaks[pnl]) / 2;
                for (size_t k = 0; k < rule.x.size(); ++k) {
                    Real t = mid + half * rule.x[k];
                    Cx s = a + t * (b - a);
                    th = continue_triple(cur, th, s);
                    cur = s;
                    total += Cx(rule.w[k] * half) * (b - a) * fn(s, th);
                }
            }
            th = continue_triple(cur, th, b);
            cur = b;
        }
        return total;
    }

    // ---- g-function ---------------------------------------------------------

    // G(z) = log z + int_inf^z (theta_+ - 1/s - g2/s^2) ds - g2/z, normalized
    // so exp(n G)/z^n -> 1.  Defined for presets with a resolvent sheet.
    Cx g_eval(const Cx& z, int side = 0) const {
        if (!p_.has_g)
            throw std::runtime_error("g_eval: preset has no polynomial-normalized sheet");
        ensure_g_ref();
        auto w = canonical_path(z, side);
        SheetTriple th = anchor_;
        auto integrand = [this](const Cx& s, const SheetTriple& t) {
            return t[0] - Cx(1) / s - Cx(p_.g_tail2) / (s * s);
        };
        Cx tail = integrate_tracked(w, th, integrand, 20, 24);
        return log(z) - Cx(p_.g_tail2) / z + g_ref_const_ + tail;
    }

    // ---- phases -------------------------------------------------------------

    // Coordinate-mode phase of conductor `ci`:
    //   phi(z) = (1/2) int_base^z (theta_shared - theta_partner) ds,
    // branch continued from the adjacent gap (real positive there).
    Cx phi_coord(size_t ci, const Cx& z) const {
        const ConductorSpec& cs = p_.conductors[ci];
        if (cs.gap_dir == 0)
            return phi_vertical_base(ci, z);
        // stage the path: base -> (substituted leg) -> gap point -> half-plane -> z
        Real gap_step = gap_leg_length(ci);
        Real dir = Real(cs.gap_dir);
        Cx gap_pt = Cx(cs.base + dir * gap_step);

        Cx leg1 = edge_leg_integral(ci, gap_pt);  // int over [base, gap_pt]

        if (z.re == gap_pt.re && z.im == 0) return leg1;
        // remaining path from gap_pt to z through the half-plane of z
        Real H = Real(1) + abs(z.im) + gap_step;
        Real s = (z.im > 0) ? Real(1) : (z.im < 0 ? Real(-1) : Real(1));
        std::vector<Cx> w{gap_pt, Cx(gap_pt.re, s * H), Cx(z.re, s * H), z};
        SheetTriple th = branches_at(gap_pt);
        auto integrand = [&cs](const Cx&, const SheetTriple& t) {
            return Cx(Real(cs.phase_sign)) * (t[static_cast<size_t>(cs.sheet_shared)]
                    - t[static_cast<size_t>(cs.sheet_partner)]) / Cx(2);
        };
        Cx leg2 = integrate_tracked(w, th, integrand, 20, 12);
        return leg1 + leg2;
    }

    // Sign-chart mode: equals phi_coord off the lens sectors; inside the lens
    // sectors (off-axis points over the band) the sign is flipped so that
    // positive real part encodes lip decay.
    Cx phi_signmode(size_t ci, const Cx& z) const {
        const ConductorSpec& cs = p_.conductors[ci];
        Cx v = phi_coord(ci, z);
        bool over_band = (z.re > cs.a && z.re < cs.b);
        if (over_band && z.im != 0) return Cx(Real(0)) - v;
        return v;
    }

    // boundary phase on the conductor (purely imaginary up to quadrature
    // tolerance); the path lands exactly on the cut from `side`
    Cx phi_on_conductor(size_t ci, const Real& x, int side) const {
        return phi_coord(ci, Cx(x, Real(0)), side);
    }

    // ---- conformal coordinates ----------------------------------------------

    // f0 = phi_Gamma^2 / 4, analytic at the hard edge
    Cx conf_coord_hard(const Cx& z) const {
        Cx phi = phi_coord(0, z);
        return phi * phi / Cx(4);
    }

    // f_{x0} = ((3/2) phi_Delta)^{2/3}, branch real-positive on the gap side
    Cx conf_coord_soft(const Cx& z) const {
        Cx phi = phi_coord(1, z);
        Cx w = Cx(Real(3) / 2) * phi;
        // w is real positive on the gap and behaves like (z-x0)^{3/2}; take
        // the branch of w^{2/3} cut along the band (negative w axis image)
        return pow(w, Real(2) / 3);
    }

    // ---- density (resolvent presets) -----------------------------------------

    // limiting zero density on the Delta band, rho(x) = -Im theta_+^+(x)/pi
    Real density(const Real& x) const {
        const ConductorSpec& cs = p_.conductors[1];
        if (!(x > cs.a && x < cs.b)) return Real(0);
        auto th = branches_at(Cx(x, (cs.b - cs.a) / 100000), +1);
        Real v = -th[0].im / pi_real();
        return v > 0 ? v : Real(0);
    }

    // ---- misc ---------------------------------------------------------------

    struct SignChartReport {
        Real min_re_phi_lips;     // over sampled lip nodes outside the disks
        Real max_abs_re_phi_cond; // over conductor samples
        bool pass;
    };

    SignChartReport sign_chart_check(int samples_per_arc = 40) const;

    const SheetTriple& anchor_values() const { return anchor_; }

  private:
    CurvePreset p_;
    SheetTriple anchor_;
    mutable std::optional<Cx> g_ref_cache_;
    mutable Cx g_ref_const_;

    SheetTriple refine_labels_at(const Real& zr, const std::array<Cx, 3>& approx) const {
        auto rts = detail::cubic_roots_polished(p_.c2.eval(Cx(zr)), p_.c1.eval(Cx(zr)),
                                                p_.c0.eval(Cx(zr)));
        SheetTriple out;
        std::array<bool, 3> used{false, false, false};
        for (int i = 0; i < 3; ++i) {
            int best = -1;
            Real bd(0);
            for (int j = 0; j < 3; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                Real d = abs(rts[static_cast<size_t>(j)] - approx[static_cast<size_t>(i)]);
                if (best < 0 || d < bd) { best = j; bd = d; }
            }
            out[static_cast<size_t>(i)] = rts[static_cast<size_t>(best)];
            used[static_cast<size_t>(best)] = true;
        }
        return out;
    }

    void ensure_g_ref() const {
        if (g_ref_cache_) return;
        // C_ref = int_inf^{z_ref} (theta_+ - 1/s - g2/s^2) ds along the real
        // axis from a large radius, plus the analytic tail beyond it
        Real Rbig = Real("1e10");
        std::vector<Cx> w{Cx(Rbig), Cx(p_.z_ref)};
        SheetTriple th = refine_labels_at(Real(0) + Rbig, theta_asymptotic(Rbig));
        auto integrand = [this](const Cx& s, const SheetTriple& t) {
            return t[0] - Cx(1) / s - Cx(p_.g_tail2) / (s * s);
        };
        Cx c = integrate_tracked(w, th, integrand, 24, 48);
        g_ref_const_ = c;
        g_ref_cache_ = c;
    }

    std::array<Cx, 3> theta_asymptotic(const Real& R) const {
        // crude labeled guesses at a very large radius from the anchor labels
        // continued outward (cheap because no cut lies beyond z_ref)
        SheetTriple th = anchor_;
        return continue_triple(Cx(p_.z_ref), th, Cx(R));
    }

    Real gap_leg_length(size_t ci) const {
        const ConductorSpec& cs = p_.conductors[ci];
        // stay well inside the adjacent gap
        Real len = (cs.b - cs.a) / 8;
        for (const auto& bp : p_.branch_points) {
            Real d = abs(bp - cs.base);
            if (d > 0 && d / 2 < len) len = d / 2;
        }
        return len;
    }

    // integral of the half branch difference over [base, base + dir*L] using
    // the edge substitution s = base + dir * u^p (p = edge_order)
    Cx edge_leg_integral(size_t ci, const Cx& gap_pt) const {
        const ConductorSpec& cs = p_.conductors[ci];
        Real L = abs(gap_pt - Cx(cs.base));
        Real dir = Real(cs.gap_dir);
        int p = cs.edge_order;
        Real umax = pow(L, Real(1) / p);
        const auto& rule = gauss_legendre(24);
        // start labels at the far (regular) end and march toward the edge
        SheetTriple th = branches_at(gap_pt);
        Cx total(Real(0));
        Cx cur = gap_pt;
        int panels = 10;
        for (int pnl = 0; pnl < panels; ++pnl) {
            // u runs from umax down toward 0 in geometric panels
            Real ua = umax * ldexp(Real(1), -pnl - 1);
            Real ub = umax * ldexp(Real(1), -pnl);
            if (pnl == panels - 1) ua = Real(0);
            Real half = (ub - ua) / 2, mid = (ua + ub) / 2;
            // rule.x is stored descending, so ascending k walks u toward the edge
            for (size_t k = 0; k < rule.x.size(); ++k) {
                Real u = mid + half * rule.x[k];
                Cx s = Cx(cs.base + dir * pow(u, p));
                th = continue_triple(cur, th, s);
                cur = s;
                Cx diff = Cx(Real(cs.phase_sign)) * (th[static_cast<size_t>(cs.sheet_shared)]
                           - th[static_cast<size_t>(cs.sheet_partner)]) / Cx(2);
                Cx ds_du = Cx(dir * p * pow(u, p - 1));
                total += Cx(rule.w[k] * half) * ds_du * diff;
            }
        }
        // the GL sums assemble int_{u=0}^{umax}, i.e. base -> gap_pt
        return total;
    }

    // phase for a conductor whose base has no adjacent gap (the laguerre hard
    // edge): branch continued straight up from the base
    Cx phi_vertical_base(size_t ci, const Cx& z, int side = 0) const {
        const ConductorSpec& cs = p_.conductors[ci];
        Real L = gap_leg_length(ci);
        Real sgn = (z.im < 0 || (z.im == 0 && side < 0)) ? Real(-1) : Real(1);
        Cx up_pt = Cx(cs.base, sgn * L);
        // leg 1: base -> up_pt with the edge substitution in the vertical direction
        int p = cs.edge_order;
        Real umax = pow(L, Real(1) / p);
        const auto& rule = gauss_legendre(24);
        SheetTriple th = branches_at(up_pt);
        Cx total(Real(0));
        Cx cur = up_pt;
        int panels = 10;
        for (int pnl = 0; pnl < panels; ++pnl) {
            Real ua = umax * ldexp(Real(1), -pnl - 1);
            Real ub = umax * ldexp(Real(1), -pnl);
            if (pnl == panels - 1) ua = Real(0);
            Real half = (ub - ua) / 2, mid = (ua + ub) / 2;
            for (size_t k = 0; k < rule.x.size(); ++k) {
                Real u = mid + half * rule.x[k];
                Cx s = Cx(cs.base, sgn * pow(u, p));
                th = continue_triple(cur, th, s);
                cur = s;
                Cx diff = Cx(Real(cs.phase_sign)) * (th[static_cast<size_t>(cs.sheet_shared)]
                           - th[static_cast<size_t>(cs.sheet_partner)]) / Cx(2);
                Cx ds_du = Cx(Real(0), sgn * p * pow(u, p - 1));
                total += Cx(rule.w[k] * half) * ds_du * diff;
            }
        }
        Cx leg1 = total;  // base -> up_pt
        if (abs(z - up_pt) == 0) return leg1;
        Real H = Real(1) + abs(z.im) + L;
        std::vector<Cx> w{up_pt, Cx(cs.base, sgn * H), Cx(z.re, sgn * H), z};
        SheetTriple th2 = branches_at(up_pt);
        auto integrand = [&cs](const Cx&, const SheetTriple& t) {
            return Cx(Real(cs.phase_sign)) * (t[static_cast<size_t>(cs.sheet_shared)]
                    - t[static_cast<size_t>(cs.sheet_partner)]) / Cx(2);
        };
        return leg1 + integrate_tracked(w, th2, integrand, 20, 12);
    }
};

// ---------------------------------------------------------------------------
// Sign chart

inline SpectralCurve::SignChartReport SpectralCurve::sign_chart_check(int samples_per_arc) const {
    SignChartReport rep;
    rep.min_re_phi_lips = Real(0);
    rep.max_abs_re_phi_cond = Real(0);
    bool first = true;
    for (size_t ci = 0; ci < p_.conductors.size(); ++ci) {
        const auto& cs = p_.conductors[ci];
        // conductor nodes: Re phi ~ 0
        for (int k = 1; k < samples_per_arc; ++k) {
            Real x = cs.a + (cs.b - cs.a) * Real(k) / samples_per_arc;
            if (abs(x - p_.hard_edge) < p_.disk_radius_hard) continue;
            if (abs(x - p_.x0) < p_.disk_radius_soft) continue;
            if (!cs.lensed && ci == 0 && x < cs.a + (cs.b - cs.a) / 10) continue;
            Cx v = phi_on_conductor(ci, x, +1);
            Real a = abs(v.re);
            if (a > rep.max_abs_re_phi_cond) rep.max_abs_re_phi_cond = a;
        }
        if (!cs.lensed) continue;
        // lip nodes outside the disks
        Real lo = cs.a + (cs.b - cs.a) * p_.lip_span_lo;
        Real hi = cs.a + (cs.b - cs.a) * p_.lip_span_hi;
        for (int k = 0; k <= samples_per_arc; ++k) {
            Real x = lo + (hi - lo) * Real(k) / samples_per_arc;
            if (abs(x - p_.hard_edge) < p_.disk_radius_hard) continue;
            if (abs(x - p_.x0) < p_.disk_radius_soft) continue;
            for (int side : {+1, -1}) {
                Cx zlip(x, Real(side) * p_.lip_offset);
                Real re = phi_signmode(ci, zlip).re;
                if (first || re < rep.min_re_phi_lips) { rep.min_re_phi_lips = re; first = false; }
            }
        }
    }
    rep.pass = rep.min_re_phi_lips > 0;
    return rep;
}

// ---------------------------------------------------------------------------
// Built-in presets

// The symmetric multiple-Laguerre curve, derived from the saddle-point
// analysis of the Rodrigues double integral and validated against the exact
// oracle:  theta^3 - 2 theta^2 + (1 + 1/z) theta - 1/z + 1/(4 z^2) = 0.
// Bands: [0, 27/8] swapping sheets (+,-) and (-inf, 0] swapping (-,*); the
// hard edge at 0 joins all three sheets (cube-root type), the soft edge at
// x0 = 27/8 is a square-root (+,-) edge.
inline CurvePreset laguerre_symmetric_preset() {
    CurvePreset p;
    p.name = "laguerre-sym";
    p.c2 = RationalFn::constant(Real(-2));
    p.c1 = {{Real(1), Real(1)}, {Real(0), Real(1)}};                    // (1 + z)/z
    p.c0 = {{Real(1) / 4, Real(-1)}, {Real(0), Real(0), Real(1)}};      // (1/4 - z)/z^2
    p.z_ref = 40;
    p.x0 = Real(27) / 8;
    p.hard_edge = 0;
    p.branch_points = {Real(0), Real(27) / 8};
    p.has_g = true;
    p.g_tail1 = 1;
    p.g_tail2 = Real(3) / 4;
    // labeled anchors at z_ref = 40 (coarse; refined at construction):
    // theta_+ ~ 1/z, theta_-/theta_* ~ 1 -+ sqrt(1/z)-ish splitting
    p.anchor_theta = {Cx(Real("0.0257"), Real(0)), Cx(Real("0.847"), Real(0)),
                      Cx(Real("1.127"), Real(0))};
    ConductorSpec gamma;  // (2,3)-type cut on the negative axis; no lens
    gamma.name = "Gamma";
    gamma.a = Real(-40);
    gamma.b = Real(0);
    gamma.sheet_shared = 1;   // '-'
    gamma.sheet_partner = 2;  // '*'
    gamma.base = Real(0);
    gamma.gap_dir = 0;  // no adjacent gap at the triple edge
    gamma.lensed = false;
    gamma.edge_order = 3;
    gamma.phase_sign = +1;
    ConductorSpec delta;  // main band [0, x0] in the (+,-) channel
    delta.name = "Delta";
    delta.a = Real(0);
    delta.b = Real(27) / 8;
    delta.sheet_shared = 0;   // '+'
    delta.sheet_partner = 1;  // '-'
    delta.base = Real(27) / 8;
    delta.gap_dir = +1;
    delta.lensed = true;
    delta.edge_order = 2;
    delta.phase_sign = -1;  // theta_- exceeds theta_+ on the right gap
    p.conductors = {gamma, delta};
    p.disk_radius_hard = p.x0 / 8;
    p.disk_radius_soft = p.x0 / 8;
    p.lip_offset = p.x0 / 16;
    p.lip_span_lo = Real(15) / 100;  // keep lips clear of the cube-type edge at 0
    p.lip_span_hi = Real(1);
    return p;
}

// A curve realizing the regular two-edge phase portrait exactly as assumed by
// the steepest-descent scheme: simple (+,*) hard edge at 0 with
// theta ~ +-3 z^{-1/2}, a simple (+,-) soft edge at x0 = 1, and two far
// inactive edges at -27/8 and 1/8.  Derived from the rational uniformization
// z = (9 s/7 + 2)/(s^3 - (12/7) s):
//     theta^3 - (12/7) theta - ((9/7) theta + 2)/z = 0.
inline CurvePreset two_edge_preset() {
    CurvePreset p;
    p.name = "two-edge";
    p.c2 = RationalFn::constant(Real(0));
    // c1 = -12/7 - (9/7)/z = (-12 z - 9)/(7 z)
    p.c1 = {{Real(-9) / 7, Real(-12) / 7}, {Real(0), Real(1)}};
    // c0 = -2/z
    p.c0 = {{Real(-2)}, {Real(0), Real(1)}};
    p.z_ref = 40;
    p.x0 = Real(1);
    p.hard_edge = 0;
    p.branch_points = {Real(-27) / 8, Real(0), Real(1) / 8, Real(1)};
    p.has_g = false;
    p.g_tail1 = 0;
    p.g_tail2 = 0;
    // sheets at infinity sit near the poles {0, +-sqrt(12/7)} of the
    // uniformizing map; labels fixed below by continuation tests:
    //   '+' shared sheet, '-' the (1,2) partner, '*' the (1,3) partner
    p.anchor_theta = {Cx(Real("-0.0286"), Real(0)), Cx(Real("-1.3070"), Real(0)),
                      Cx(Real("1.3356"), Real(0))};
    ConductorSpec gamma;  // [-27/8, 0], swaps (+,*), Bessel edge at 0
    gamma.name = "Gamma";
    gamma.a = Real(-27) / 8;
    gamma.b = Real(0);
    gamma.sheet_shared = 0;   // '+'
    gamma.sheet_partner = 2;  // '*'
    gamma.base = Real(0);
    gamma.gap_dir = +1;       // gap (0, 1/8) on the right
    gamma.lensed = true;
    gamma.edge_order = 2;     // theta-pair ~ z^{-1/2}: substitution order 2
    gamma.phase_sign = -1;    // theta_* is the upper Bessel branch on the gap
    ConductorSpec delta;  // [1/8, 1], swaps (+,-), Airy edge at x0 = 1
    delta.name = "Delta";
    delta.a = Real(1) / 8;
    delta.b = Real(1);
    delta.sheet_shared = 0;   // '+'
    delta.sheet_partner = 1;  // '-'
    delta.base = Real(1);
    delta.gap_dir = +1;       // gap (1, inf) on the right
    delta.lensed = true;
    delta.edge_order = 2;
    delta.phase_sign = +1;
    p.conductors = {gamma, delta};
    p.disk_radius_hard = Real(6) / 100;
    p.disk_radius_soft = Real(1) / 8;
    p.lip_offset = Real(1) / 32;
    p.lip_span_lo = Real(0);
    p.lip_span_hi = Real(1);
    return p;
}

// ---------------------------------------------------------------------------
// Preset file round trip (structured text interface)

inline nlohmann::json rationalfn_to_json(const RationalFn& f) {
    nlohmann::json j;
    for (const auto& c : f.num) j["num"].push_back(to_string(c));
    for (const auto& c : f.den) j["den"].push_back(to_string(c));
    return j;
}
inline RationalFn rationalfn_from_json(const nlohmann::json& j) {
    RationalFn f;
    for (const auto& c : j.at("num")) f.num.push_back(Real(c.get<std::string>()));
    for (const auto& c : j.at("den")) f.den.push_back(Real(c.get<std::string>()));
    return f;
}

inline nlohmann::json preset_to_json(const CurvePreset& p) {
    nlohmann::json j;
    j["name"] = p.name;
    j["c2"] = rationalfn_to_json(p.c2);
    j["c1"] = rationalfn_to_json(p.c1);
    j["c0"] = rationalfn_to_json(p.c0);
    j["z_ref"] = to_string(p.z_ref);
    for (const auto& t : p.anchor_theta)
        j["anchor_theta"].push_back({to_string(t.re), to_string(t.im)});
    for (const auto& b : p.branch_points) j["branch_points"].push_back(to_string(b));
    j["x0"] = to_string(p.x0);
    j["hard_edge"] = to_string(p.hard_edge);
    j["has_g"] = p.has_g;
    j["g_tail1"] = to_string(p.g_tail1);
    j["g_tail2"] = to_string(p.g_tail2);
    j["disk_radius_hard"] = to_string(p.disk_radius_hard);
    j["disk_radius_soft"] = to_string(p.disk_radius_soft);
    j["lip_offset"] = to_string(p.lip_offset);
    j["lip_span_lo"] = to_string(p.lip_span_lo);
    j["lip_span_hi"] = to_string(p.lip_span_hi);
    for (const auto& c : p.conductors) {
        nlohmann::json cj;
        cj["name"] = c.name;
        cj["a"] = to_string(c.a);
        cj["b"] = to_string(c.b);
        cj["sheet_shared"] = c.sheet_shared;
        cj["sheet_partner"] = c.sheet_partner;
        cj["base"] = to_string(c.base);
        cj["gap_dir"] = c.gap_dir;
        cj["lensed"] = c.lensed;
        cj["edge_order"] = c.edge_order;
        cj["phase_sign"] = c.phase_sign;
        j["conductors"].push_back(cj);
    }
    return j;
}

inline CurvePreset preset_from_json(const nlohmann::json& j) {
    CurvePreset p;
    p.name = j.at("name").get<std::string>();
    p.c2 = rationalfn_from_json(j.at("c2"));
    p.c1 = rationalfn_from_json(j.at("c1"));
    p.c0 = rationalfn_from_json(j.at("c0"));
    p.z_ref = Real(j.at("z_ref").get<std::string>());
    for (int i = 0; i < 3; ++i)
        p.anchor_theta[static_cast<size_t>(i)] =
            Cx(Real(j.at("anchor_theta")[static_cast<size_t>(i)][0].get<std::string>()),
               Real(j.at("anchor_theta")[static_cast<size_t>(i)][1].get<std::string>()));
    for (const auto& b : j.at("branch_points")) p.branch_points.push_back(Real(b.get<std::string>()));
    p.x0 = Real(j.at("x0").get<std::string>());
    p.hard_edge = Real(j.at("hard_edge").get<std::string>());
    p.has_g = j.at("has_g").get<bool>();
    p.g_tail1 = Real(j.at("g_tail1").get<std::string>());
    p.g_tail2 = Real(j.at("g_tail2").get<std::string>());
    p.disk_radius_hard = Real(j.at("disk_radius_hard").get<std::string>());
    p.disk_radius_soft = Real(j.at("disk_radius_soft").get<std::string>());
    p.lip_offset = Real(j.at("lip_offset").get<std::string>());
    p.lip_span_lo = Real(j.at("lip_span_lo").get<std::string>());
    p.lip_span_hi = Real(j.at("lip_span_hi").get<std::string>());
    for (const auto& cj : j.at("conductors")) {
        ConductorSpec c;
        c.name = cj.at("name").get<std::string>();
        c.a = Real(cj.at("a").get<std::string>());
        c.b = Real(cj.at("b").get<std::string>());
        c.sheet_shared = cj.at("sheet_shared").get<int>();
        c.sheet_partner = cj.at("sheet_partner").get<int>();
        c.base = Real(cj.at("base").get<std::string>());
        c.gap_dir = cj.at("gap_dir").get<int>();
        c.lensed = cj.at("lensed").get<bool>();
        c.edge_order = cj.at("edge_order").get<int>();
        c.phase_sign = cj.at("phase_sign").get<int>();
        p.conductors.push_back(c);
    }
    return p;
}

inline CurvePreset load_preset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_preset: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return preset_from_json(j);
}

inline void save_preset(const CurvePreset& p, const std::string& path) {
    std::ofstream out(path);
    out << preset_to_json(p).dump(2) << "\n";
}

inline CurvePreset builtin_preset(const std::string& name) {
    if (name == "laguerre-sym") return laguerre_symmetric_preset();
    if (name == "two-edge") return two_edge_preset();
    throw std::invalid_argument("unknown preset: " + name);
}

// build_curve: descriptor + preset.  The symmetric Laguerre preset requires
// the equal-ratio regime.
inline SpectralCurve build_curve(const ModelDescriptor& m, const CurvePreset& preset) {
    if (preset.name == "laguerre-sym" && m.n1 != m.n2)
        throw std::invalid_argument(
            "build_curve: laguerre-sym preset requires the equal-ratio multi-index n1 = n2");
    return SpectralCurve(preset);
}

}  // namespace rh3

#endif
