#ifndef RH3_QUADRATURE_HPP
#define RH3_QUADRATURE_HPP

// Oriented arcs, composite Gauss-Legendre quadrature with endpoint grading,
// and Cauchy transforms.  Near-contour targets are handled by adaptive panel
// refinement (density re-sampled through the panel's polynomial interpolant),
// and boundary values by the offset-limit rule with Richardson extrapolation.

#include "precision.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rh3 {

struct GaussLegendreRule {
    std::vector<Real> x;     // nodes on [-1, 1]
    std::vector<Real> w;
    std::vector<Real> bary;  // barycentric weights for interpolation at x
};

inline const GaussLegendreRule& gauss_legendre(int n) {
    static std::map<std::pair<int, unsigned>, GaussLegendreRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(n, precision_bits());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    GaussLegendreRule r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    Real pi = pi_real();
    for (int k = 0; k < n; ++k) {
        Real x = cos(pi * (Real(k) + Real(3) / 4) / (Real(n) + Real(1) / 2));
        Real dp(0);
        for (int iter = 0; iter < 200; ++iter) {
            Real p0(1), p1 = x;
            for (int j = 2; j <= n; ++j) {
                Real p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) < ldexp(Real(1), -static_cast<long>(precision_bits()))) break;
        }
        r.x[static_cast<size_t>(k)] = x;
        r.w[static_cast<size_t>(k)] = 2 / ((1 - x * x) * dp * dp);
    }
    r.bary.assign(static_cast<size_t>(n), Real(1));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (k != j) r.bary[static_cast<size_t>(j)] /= (r.x[static_cast<size_t>(j)] - r.x[static_cast<size_t>(k)]);
    return cache.emplace(key, std::move(r)).first->second;
}

// ---------------------------------------------------------------------------
// Oriented arcs

enum class Grading { none, toward_start, toward_end, toward_both };

struct OrientedArc {
    std::function<Cx(const Real&)> z;   // injective smooth map [0,1] -> C
    std::function<Cx(const Real&)> dz;  // derivative of the map
    bool reversed = false;              // traverse the map backwards
    int panels = 8;
    int nodes_per_panel = 16;
    Grading grading = Grading::none;
    int grading_levels = 10;

    static OrientedArc segment(const Cx& a, const Cx& b) {
        OrientedArc arc;
        arc.z = [a, b](const Real& t) { return a + t * (b - a); };
        arc.dz = [a, b](const Real&) { return b - a; };
        return arc;
    }
    static OrientedArc circle(const Cx& center, const Real& radius, bool ccw = true) {
        OrientedArc arc;
        Real two_pi = 2 * pi_real();
        Real sgn = ccw ? Real(1) : Real(-1);
        arc.z = [center, radius, two_pi, sgn](const Real& t) {
            return center + polar(radius, sgn * two_pi * t);
        };
        arc.dz = [radius, two_pi, sgn](const Real& t) {
            Cx e = polar(radius, sgn * two_pi * t);
            return Cx(Real(0), sgn * two_pi) * e;
        };
        arc.panels = 16;
        return arc;
    }
};

struct ArcNode {
    Real t;      // parameter in the UNDERLYING map (orientation applied)
    Cx z;
    Cx wdz;      // GL weight * dz * panel scale, orientation included
    Real warc;   // positive arclength weight
    Cx tangent;  // unit tangent in arc orientation
};

struct ArcPanel {
    Real ta, tb;       // oriented parameter interval of the panel
    size_t first, count;  // node range in the node array
    Real length;       // chord-based size estimate
    Cx za, zb;
};

// Discretized arc retaining panel structure and the parametrization, so the
// Cauchy kernel can be refined near a target without re-sampling the density.
struct ArcQuadrature {
    std::function<Cx(const Real&)> z;
    std::function<Cx(const Real&)> dz;
    bool reversed = false;
    int nodes_per_panel = 16;
    std::vector<ArcNode> nodes;
    std::vector<ArcPanel> panels;

    Cx map(const Real& t_oriented) const {
        return z(reversed ? 1 - t_oriented : t_oriented);
    }
    Cx map_deriv(const Real& t_oriented) const {
        Cx d = dz(reversed ? 1 - t_oriented : t_oriented);
        return reversed ? Cx(Real(0)) - d : d;
    }
};

inline std::vector<Real> panel_breaks(const OrientedArc& arc) {
    std::vector<Real> raw;
    raw.push_back(Real(0));
    switch (arc.grading) {
        case Grading::none:
            for (int k = 1; k < arc.panels; ++k) raw.push_back(Real(k) / arc.panels);
            break;
        case Grading::toward_start: {
            for (int k = arc.grading_levels; k >= 1; --k)
                raw.push_back(ldexp(Real(1), -k));
            int rest = std::max(arc.panels - 2, 1);
            for (int k = 1; k < rest; ++k) raw.push_back(Real(1) / 2 + Real(k) / (2 * rest));
            break;
        }
        case Grading::toward_end: {
            int rest = std::max(arc.panels - 2, 1);
            for (int k = 1; k < rest; ++k) raw.push_back(Real(k) / (2 * rest));
            for (int k = 1; k <= arc.grading_levels; ++k)
                raw.push_back(Real(1) - ldexp(Real(1), -k) / 2);
            break;
        }
        case Grading::toward_both: {
            for (int k = arc.grading_levels; k >= 1; --k)
                raw.push_back(ldexp(Real(1), -k) / 2);
            int rest = std::max(arc.panels - 2, 2);
            for (int k = 1; k < rest; ++k) raw.push_back(Real(1) / 4 + Real(k) / (2 * rest));
            for (int k = 1; k <= arc.grading_levels; ++k)
                raw.push_back(Real(1) - ldexp(Real(1), -k) / 2);
            break;
        }
    }
    raw.push_back(Real(1));
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    return raw;
}

inline ArcQuadrature discretize(const OrientedArc& arc) {
    ArcQuadrature q;
    q.z = arc.z;
    q.dz = arc.dz;
    q.reversed = arc.reversed;
    q.nodes_per_panel = arc.nodes_per_panel;
    const auto& rule = gauss_legendre(arc.nodes_per_panel);
    auto breaks = panel_breaks(arc);
    for (size_t p = 0; p + 1 < breaks.size(); ++p) {
        ArcPanel pan;
        pan.ta = breaks[p];
        pan.tb = breaks[p + 1];
        pan.first = q.nodes.size();
        pan.count = rule.x.size();
        Real half = (pan.tb - pan.ta) / 2, mid = (pan.ta + pan.tb) / 2;
        for (size_t k = 0; k < rule.x.size(); ++k) {
            Real t = mid + half * rule.x[k];
            ArcNode nd;
            nd.t = t;
            nd.z = q.map(t);
            Cx d = q.map_deriv(t);
            nd.wdz = Cx(rule.w[k] * half) * d;
            nd.warc = rule.w[k] * half * abs(d);
            Real ad = abs(d);
            nd.tangent = (ad > 0) ? d / ad : Cx(Real(1));
            q.nodes.push_back(nd);
        }
        pan.za = q.map(pan.ta);
        pan.zb = q.map(pan.tb);
        pan.length = abs(pan.zb - pan.za);
        q.panels.push_back(pan);
    }
    return q;
}

namespace detail {

// Barycentric interpolation of panel samples at local coordinate u in [-1,1].
inline Cx bary_eval(const GaussLegendreRule& rule, const Cx* fvals, const Real& u) {
    Cx num(Real(0));
    Real den(0);
    for (size_t j = 0; j < rule.x.size(); ++j) {
        Real d = u - rule.x[j];
        if (abs(d) < ldexp(Real(1), -static_cast<long>(precision_bits()) + 8))
            return fvals[j];
        Real c = rule.bary[j] / d;
        num += Cx(c) * fvals[j];
        den += c;
    }
    return num / Cx(den);
}

// Integral over the sub-interval [ua,ub] (local coords of one panel) of
// f(s)/(s - zt) ds with f given by the panel interpolant; recursive bisection
// until the target is comfortably resolved.
inline Cx panel_cauchy_refined(const ArcQuadrature& q, const ArcPanel& pan,
                               const GaussLegendreRule& rule, const Cx* fvals,
                               const Real& ua, const Real& ub, const Cx& zt, int depth) {
    Real tmid_a = (pan.ta + pan.tb) / 2, thalf = (pan.tb - pan.ta) / 2;
    auto to_t = [&](const Real& u) { return tmid_a + thalf * u; };

    Cx za = q.map(to_t(ua)), zb = q.map(to_t(ub));
    Cx zc = q.map(to_t((ua + ub) / 2));
    Real len = abs(zb - za) + abs(zc - (za + zb) / Cx(2));
    Real dist = abs(zt - zc);
    dist = std::min(dist, abs(zt - za));
    dist = std::min(dist, abs(zt - zb));

    if (depth <= 0 || dist > 2 * len) {
        Cx s(Real(0));
        Real half = (ub - ua) / 2, mid = (ua + ub) / 2;
        for (size_t k = 0; k < rule.x.size(); ++k) {
            Real u = mid + half * rule.x[k];
            Real t = to_t(u);
            Cx d = q.map_deriv(t) * Cx(thalf);  // dz/du on the panel
            Cx f = bary_eval(rule, fvals, u);
            s += Cx(rule.w[k] * half) * d * f / (q.map(t) - zt);
        }
        return s;
    }
    Real um = (ua + ub) / 2;
    return panel_cauchy_refined(q, pan, rule, fvals, ua, um, zt, depth - 1)
         + panel_cauchy_refined(q, pan, rule, fvals, um, ub, zt, depth - 1);
}

}  // namespace detail

// (1/2 pi i) int f(s)/(s - zt) ds over the discretized arc.  Panels close to
// the target are re-integrated through their interpolant.
inline Cx cauchy_transform(const ArcQuadrature& q, const std::vector<Cx>& f, const Cx& zt,
                           int max_depth = 48) {
    if (f.size() != q.nodes.size())
        throw std::invalid_argument("cauchy_transform: node/value size mismatch");
    const auto& rule = gauss_legendre(q.nodes_per_panel);
    Cx s(Real(0));
    for (const auto& pan : q.panels) {
        Real dist = abs(zt - pan.za);
        dist = std::min(dist, abs(zt - pan.zb));
        for (size_t k = 0; k < pan.count; ++k)
            dist = std::min(dist, abs(zt - q.nodes[pan.first + k].z));
        if (dist > Real(15) / 10 * pan.length) {
            for (size_t k = 0; k < pan.count; ++k) {
                const auto& nd = q.nodes[pan.first + k];
                s += nd.wdz * f[pan.first + k] / (nd.z - zt);
            }
        } else {
            s += detail::panel_cauchy_refined(q, pan, rule, f.data() + pan.first,
                                              Real(-1), Real(1), zt, max_depth);
        }
    }
    return s / Cx(Real(0), 2 * pi_real());
}

inline Cx cauchy_transform(const OrientedArc& arc, const std::function<Cx(const Cx&)>& fn,
                           const Cx& zt) {
    auto q = discretize(arc);
    std::vector<Cx> vals(q.nodes.size());
    for (size_t k = 0; k < q.nodes.size(); ++k) vals[k] = fn(q.nodes[k].z);
    return cauchy_transform(q, vals, zt);
}

// ---------------------------------------------------------------------------
// Boundary values by offset limits + Richardson

struct OffsetLimitOptions {
    Real eps0;       // base offset; <= 0 means auto (fraction of panel size)
    int levels = 4;
    OffsetLimitOptions() : eps0(Real(0)) {}
};

// Multi-arc contour support: a value of the transform summed over arcs.
inline Cx cauchy_transform_multi(const std::vector<ArcQuadrature>& arcs,
                                 const std::vector<std::vector<Cx>>& f, const Cx& zt) {
    Cx s(Real(0));
    for (size_t a = 0; a < arcs.size(); ++a) s += cauchy_transform(arcs[a], f[a], zt);
    return s;
}

inline Cx cauchy_side_limit_multi(const std::vector<ArcQuadrature>& arcs,
                                  const std::vector<std::vector<Cx>>& f, size_t arc_index,
                                  size_t node_index, int side,
                                  const OffsetLimitOptions& opt = OffsetLimitOptions()) {
    const ArcQuadrature& q = arcs[arc_index];
    const ArcNode& nd = q.nodes[node_index];
    Real eps = opt.eps0;
    if (eps <= 0) {
        // fraction of the local panel length
        Real plen(0);
        for (const auto& pan : q.panels)
            if (node_index >= pan.first && node_index < pan.first + pan.count) plen = pan.length;
        eps = plen / 6;
        if (eps <= 0) eps = Real(1) / 100;
    }
    std::vector<Cx> vals(static_cast<size_t>(opt.levels));
    for (int j = 0; j < opt.levels; ++j) {
        Cx zoff = nd.z + Cx(Real(0), Real(side)) * Cx(ldexp(eps, -j)) * nd.tangent;
        vals[static_cast<size_t>(j)] = cauchy_transform_multi(arcs, f, zoff);
    }
    for (int m = 1; m < opt.levels; ++m)
        for (int j = opt.levels - 1; j >= m; --j) {
            Real pw = ldexp(Real(1), m);
            vals[static_cast<size_t>(j)] =
                (Cx(pw) * vals[static_cast<size_t>(j)] - vals[static_cast<size_t>(j - 1)]) / Cx(pw - 1);
        }
    return vals[static_cast<size_t>(opt.levels - 1)];
}

inline Cx cauchy_side_limit(const ArcQuadrature& q, const std::vector<Cx>& f,
                            size_t node_index, int side,
                            const OffsetLimitOptions& opt = OffsetLimitOptions()) {
    std::vector<ArcQuadrature> arcs{q};
    std::vector<std::vector<Cx>> ff{f};
    return cauchy_side_limit_multi(arcs, ff, 0, node_index, side, opt);
}

// Side limit at an arbitrary on-contour point (target and unit tangent given
// explicitly); eps0 must be supplied or defaults to 1/64.
inline Cx cauchy_side_limit_at(const ArcQuadrature& q, const std::vector<Cx>& f,
                               const Cx& target, const Cx& unit_tangent, int side,
                               const OffsetLimitOptions& opt = OffsetLimitOptions()) {
    Real eps = opt.eps0 > 0 ? opt.eps0 : Real(1) / 64;
    std::vector<Cx> vals(static_cast<size_t>(opt.levels));
    for (int j = 0; j < opt.levels; ++j) {
        Cx zoff = target + Cx(Real(0), Real(side)) * Cx(ldexp(eps, -j)) * unit_tangent;
        vals[static_cast<size_t>(j)] = cauchy_transform(q, f, zoff);
    }
    for (int m = 1; m < opt.levels; ++m)
        for (int j = opt.levels - 1; j >= m; --j) {
            Real pw = ldexp(Real(1), m);
            vals[static_cast<size_t>(j)] =
                (Cx(pw) * vals[static_cast<size_t>(j)] - vals[static_cast<size_t>(j - 1)]) / Cx(pw - 1);
        }
    return vals[static_cast<size_t>(opt.levels - 1)];
}

// Minus-side boundary values at every node of a single-arc contour.
inline std::vector<Cx> cauchy_minus(const ArcQuadrature& q, const std::vector<Cx>& f,
                                    const OffsetLimitOptions& opt = OffsetLimitOptions()) {
    std::vector<Cx> out(q.nodes.size());
    for (size_t k = 0; k < q.nodes.size(); ++k) out[k] = cauchy_side_limit(q, f, k, -1, opt);
    return out;
}
inline std::vector<Cx> cauchy_plus(const ArcQuadrature& q, const std::vector<Cx>& f,
                                   const OffsetLimitOptions& opt = OffsetLimitOptions()) {
    std::vector<Cx> out(q.nodes.size());
    for (size_t k = 0; k < q.nodes.size(); ++k) out[k] = cauchy_side_limit(q, f, k, +1, opt);
    return out;
}

// Plain path integral along waypoints; optional geometric refinement toward
// the final endpoint.
inline Cx integrate_polyline(const std::function<Cx(const Cx&)>& f,
                             const std::vector<Cx>& waypoints, int nodes_per_panel = 24,
                             int geometric_levels = 0) {
    Cx total(Real(0));
    const auto& rule = gauss_legendre(nodes_per_panel);
    for (size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
        Cx a = waypoints[leg], b = waypoints[leg + 1];
        std::vector<Real> breaks{Real(0)};
        bool last_leg = (leg + 2 == waypoints.size());
        if (last_leg && geometric_levels > 0)
            for (int k = 1; k <= geometric_levels; ++k)
                breaks.push_back(Real(1) - ldexp(Real(1), -k));
        breaks.push_back(Real(1));
        std::sort(breaks.begin(), breaks.end());
        for (size_t p = 0; p + 1 < breaks.size(); ++p) {
            Real half = (breaks[p + 1] - breaks[p]) / 2;
            Real mid = (breaks[p + 1] + breaks[p]) / 2;
            for (size_t k = 0; k < rule.x.size(); ++k) {
                Real t = mid + half * rule.x[k];
                total += Cx(rule.w[k] * half) * (b - a) * f(a + t * (b - a));
            }
        }
    }
    return total;
}

}  // namespace rh3

#endif
