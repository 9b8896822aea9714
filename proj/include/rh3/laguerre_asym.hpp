#ifndef RH3_LAGUERRE_ASYM_HPP
#define RH3_LAGUERRE_ASYM_HPP

// Strong-asymptotics machinery for the symmetric multiple-Laguerre model:
// the outer prefactor A(z) (the (1,1) entry of the model's outer parametrix)
// from the two-dimensional saddle-point analysis of the Rodrigues double
// integral, its second-sheet partner, and the uniform soft-edge (Airy) and
// hard-edge (multi-saddle) descriptions of Y_11.
//
// Saddle system for P_{m,m}(n z) n^{-n}, n = 2m:
//   E(s,t;z) = z - s + (1/2)(log s + log t - log(s-t) - log(t-z)),
//   stationary points: 4 s^3 = z (2s-1)^2,  t = z(2s-1)/(2s),
// and the prefactor
//   A = g / (2 sqrt(det Hess E)),   g = t^{a1-a2} s^{a2} z^{-a1} / ((s-t)(t-z)),
// with all fractional powers continued from the positive axis along the same
// canonical paths used for the branches (A(inf) = 1 fixes the constant).

#include "curve.hpp"

#include <array>
#include <stdexcept>

namespace rh3 {

class LaguerreAsymptotics {
  public:
    LaguerreAsymptotics(const SpectralCurve& curve, const ModelDescriptor& m)
        : c_(curve), m_(m) {
        if (curve.preset().name != "laguerre-sym")
            throw std::invalid_argument("LaguerreAsymptotics requires the laguerre-sym preset");
        if (m.n1 != m.n2)
            throw std::invalid_argument("LaguerreAsymptotics: equal-ratio multi-index required");
    }

    // Outer prefactor on sheet '+' (0) or its continuation to sheet '-' (1).
    // side picks the approach half-plane for real z.
    Cx outer_prefactor(const Cx& z, int sheet = 0, int side = 0) const {
        LogState st = walk_logs(z, side);
        return assemble(st, sheet);
    }

    // N_11 of the model's outer parametrix.
    Cx N11(const Cx& z, int side = 0) const { return outer_prefactor(z, 0, side); }

    // Uniform soft-edge description of Y_11 e^{-n G} near x0 (valid on the
    // whole disk minus the contour, reducing to A(z) away from the edge):
    //   Y11 e^{-nG} ~ e^{n phi} sqrt(pi) [ u n^{1/6} Ai(zeta) + v n^{-1/6} Ai'(zeta) ],
    //   zeta = n^{2/3} f_{x0}(z),  u = f^{1/4}(A+ + kappa A-),  v = (kappa A- - A+)/f^{1/4}.
    Cx soft_edge_Y11_over_expG(const Cx& z, int n, int side = 0) const {
        ensure_kappa();
        Cx phi = c_.phi_coord(1, z);
        Cx f = c_.conf_coord_soft(z);
        Cx f4 = pow(f, Real(1) / 4);  // principal: f is off the negative axis on the disk minus the band
        Cx Ap = outer_prefactor(z, 0, side);
        Cx Am = outer_prefactor(z, 1, side);
        Cx u = f4 * (Ap + kappa_ * Am);
        Cx v = (kappa_ * Am - Ap) / f4;
        Cx zeta = Cx(pow(Real(n), Real(2) / 3)) * f;
        auto [ai, aip] = airy(zeta);
        Real n16 = pow(Real(n), Real(1) / 6);
        Cx bracket = Cx(n16) * u * ai + v * aip / Cx(n16);
        return exp(Cx(Real(n)) * phi) * Cx(sqrt(pi_real())) * bracket;
    }

    // Hard-edge description at fixed probes: the dominant saddle plus the two
    // subdominant saddle contributions weighted by their phase gaps from the
    // edge (all three sheet exponents agree at 0).
    Cx hard_edge_Y11_over_expG(const Cx& z, int n, int side = 0) const {
        Cx total = outer_prefactor(z, 0, side);
        for (int sheet : {1, 2}) {
            Cx gap = edge_phase_gap(sheet, z, side);  // int_0^z (theta_j - theta_+) ds
            Real re = gap.re;
            if (re > 0) continue;  // never amplify; wrong-side guard
            Cx amp = outer_prefactor(z, sheet, side);
            total += amp * exp(Cx(Real(n)) * gap);
        }
        return total;
    }

    const Cx& kappa() const { ensure_kappa(); return kappa_; }

  private:
    const SpectralCurve& c_;
    ModelDescriptor m_;
    mutable bool kappa_set_ = false;
    mutable Cx kappa_;

    struct LogState {
        SheetTriple theta;
        // per sheet: continuous logs of sigma, tau, s-t, t-z, det Hess
        std::array<Cx, 3> Lsig, Ltau, Lst, Ltz, Ldet;
        Cx Lz;
        Cx z;
    };

    static Cx sigma_of(const Cx& z, const Cx& theta) { return z * (Cx(1) - theta); }

    static void saddle_parts(const Cx& z, const Cx& theta, Cx& sig, Cx& tau, Cx& st, Cx& tz,
                             Cx& det) {
        sig = sigma_of(z, theta);
        tau = z * (Cx(2) * sig - Cx(1)) / (Cx(2) * sig);
        st = sig - tau;
        tz = tau - z;
        Cx Ess = Cx(-1) / (Cx(2) * sig * sig) + Cx(1) / (Cx(2) * st * st);
        Cx Ett = Cx(-1) / (Cx(2) * tau * tau) + Cx(1) / (Cx(2) * st * st)
               + Cx(1) / (Cx(2) * tz * tz);
        Cx Est = Cx(-1) / (Cx(2) * st * st);
        det = Ess * Ett - Est * Est;
    }

    // update a continuous log by the principal increment (valid for small steps)
    static void upd(Cx& L, const Cx& neu, const Cx& alt) { L += log(neu / alt); }

    LogState walk_logs(const Cx& z, int side) const {
        auto w = c_.canonical_path(z, side);
        LogState st;
        st.z = w.front();
        st.theta = c_.anchor_values();
        for (int j = 0; j < 3; ++j) {
            Cx sig, tau, d1, d2, det;
            saddle_parts(st.z, st.theta[static_cast<size_t>(j)], sig, tau, d1, d2, det);
            st.Lsig[static_cast<size_t>(j)] = log(sig);
            st.Ltau[static_cast<size_t>(j)] = log(tau);
            st.Lst[static_cast<size_t>(j)] = log(d1);
            st.Ltz[static_cast<size_t>(j)] = log(d2);
            st.Ldet[static_cast<size_t>(j)] = log(det);
        }
        st.Lz = log(st.z);
        for (size_t i = 1; i < w.size(); ++i) advance(st, w[i]);
        return st;
    }

    void advance(LogState& st, const Cx& target) const {
        // march with the same halving discipline as the curve continuation
        Cx cur = st.z;
        Real full = abs(target - cur);
        if (full == 0) return;
        Real h = full / 2;
        int guard = 0;
        while (abs(target - cur) > 0) {
            if (++guard > 100000) throw std::runtime_error("LaguerreAsymptotics: walk stalled");
            Cx dir = (target - cur) / Cx(abs(target - cur));
            Real step = h;
            if (step > abs(target - cur)) step = abs(target - cur);
            Cx nxt = cur + Cx(step) * dir;
            SheetTriple th_new = c_.continue_triple(cur, st.theta, nxt);
            // require every log increment to be small; otherwise halve
            bool ok = true;
            LogState trial = st;
            trial.theta = th_new;
            trial.z = nxt;
            upd(trial.Lz, nxt, cur);
            for (int j = 0; j < 3 && ok; ++j) {
                Cx so, to, d1o, d2o, deto, sn, tn, d1n, d2n, detn;
                saddle_parts(cur, st.theta[static_cast<size_t>(j)], so, to, d1o, d2o, deto);
                saddle_parts(nxt, th_new[static_cast<size_t>(j)], sn, tn, d1n, d2n, detn);
                auto small = [](const Cx& a, const Cx& b) {
                    return abs(a - b) < abs(b) / 2;
                };
                if (!(small(sn, so) && small(tn, to) && small(d1n, d1o) && small(d2n, d2o)
                      && small(detn, deto))) { ok = false; break; }
                upd(trial.Lsig[static_cast<size_t>(j)], sn, so);
                upd(trial.Ltau[static_cast<size_t>(j)], tn, to);
                upd(trial.Lst[static_cast<size_t>(j)], d1n, d1o);
                upd(trial.Ltz[static_cast<size_t>(j)], d2n, d2o);
                upd(trial.Ldet[static_cast<size_t>(j)], detn, deto);
            }
            if (!ok && step > full * ldexp(Real(1), -48)) {
                h = step / 2;
                continue;
            }
            st = trial;
            cur = nxt;
            h = h * 2;
        }
    }

    Cx assemble(const LogState& st, int sheet) const {
        size_t j = static_cast<size_t>(sheet);
        Real a1 = m_.alpha1, a2 = m_.alpha2;
        // log g = (a1-a2) log tau + a2 log sigma - a1 log z - log(s-t) - log(t-z)
        Cx lg = Cx(a1 - a2) * st.Ltau[j] + Cx(a2) * st.Lsig[j] - Cx(a1) * st.Lz
              - st.Lst[j] - st.Ltz[j];
        return exp(lg - st.Ldet[j] / Cx(2)) / Cx(2);
    }

    // int_0^z (theta_sheet - theta_+) ds, all exponents vanish at the hard edge
    Cx edge_phase_gap(int sheet, const Cx& z, int side) const {
        const auto& cs = c_.preset().conductors[0];
        (void)cs;
        // reuse the curve's vertical-base machinery through a small custom
        // integral: base at 0 with the cube-edge substitution
        Real L = Real(1) / 4;
        Real sgn = (z.im < 0 || (z.im == 0 && side < 0)) ? Real(-1) : Real(1);
        Cx up_pt = Cx(Real(0), sgn * L);
        const auto& rule = gauss_legendre(24);
        SheetTriple th = c_.branches_at(up_pt);
        Cx total(Real(0));
        Cx cur = up_pt;
        int panels = 10;
        Real umax = pow(L, Real(1) / 3);
        for (int pnl = 0; pnl < panels; ++pnl) {
            Real ua = umax * ldexp(Real(1), -pnl - 1);
            Real ub = umax * ldexp(Real(1), -pnl);
            if (pnl == panels - 1) ua = Real(0);
            Real half = (ub - ua) / 2, mid = (ua + ub) / 2;
            for (size_t k = 0; k < rule.x.size(); ++k) {
                Real u = mid + half * rule.x[k];
                Cx s = Cx(Real(0), sgn * u * u * u);
                th = c_.continue_triple(cur, th, s);
                cur = s;
                Cx diff = th[static_cast<size_t>(sheet)] - th[0];
                Cx ds_du = Cx(Real(0), sgn * 3 * u * u);
                total += Cx(rule.w[k] * half) * ds_du * diff;
            }
        }
        Cx leg1 = total;  // 0 -> up_pt
        if (abs(z - up_pt) == 0) return leg1;
        Real H = Real(1) + abs(z.im) + L;
        std::vector<Cx> w{up_pt, Cx(Real(0), sgn * H), Cx(z.re, sgn * H), z};
        SheetTriple th2 = c_.branches_at(up_pt);
        auto integrand = [sheet](const Cx&, const SheetTriple& t) {
            return t[static_cast<size_t>(sheet)] - t[0];
        };
        return leg1 + c_.integrate_tracked(w, th2, integrand, 20, 12);
    }

    void ensure_kappa() const {
        if (kappa_set_) return;
        // kappa makes (kappa A- - A+) vanish at the soft edge: pick the
        // unimodular candidate minimizing the residual just off x0
        Cx z = Cx(c_.preset().x0 + Real(1) / 1000);
        Cx Ap = outer_prefactor(z, 0);
        Cx Am = outer_prefactor(z, 1);
        Cx best;
        Real bestv(-1);
        for (Cx cand : {Cx(1), Cx(-1), Cx(Real(0), Real(1)), Cx(Real(0), Real(-1))}) {
            Real v = abs(cand * Am - Ap);
            if (bestv < 0 || v < bestv) { bestv = v; best = cand; }
        }
        kappa_ = best;
        kappa_set_ = true;
    }
};

}  // namespace rh3

#endif
