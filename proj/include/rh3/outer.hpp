#ifndef RH3_OUTER_HPP
#define RH3_OUTER_HPP

// The reduced outer parametrix N with permutation jumps: sheet matrix
// M(z) = [ H_j(z) theta_j(z)^{r-1} ], H_j = 1/sqrt(F_theta(theta_j, z)),
// normalized by N = M(inf)^{-1} M(z).  Branches, prefactors and their square
// roots are continued along the same canonical paths as the curve, so the
// cross-cut column swaps hold at the level of values; residual column signs
// are measured once per conductor and folded into a constant diagonal gauge.

#include "curve.hpp"
#include "linalg.hpp"

#include <array>
#include <optional>
#include <stdexcept>

namespace rh3 {

// Structured abelian factor: Phi_j(z) = exp(Theta_j(z)) with
// Theta_j = t_j z + m_j log z + tail_j(z), tail_j(inf) = 0.  The divergent
// closed-form part is carried symbolically so the regularized tail satisfies
// the normalization at infinity exactly.
struct AbelianValue {
    Cx linear_coeff;   // t_j
    Cx log_coeff;      // m_j
    Cx tail;           // convergent remainder integral, -> 0 at infinity
    Cx log_z;          // continuous branch of log z along the path

    Cx theta_full() const { return linear_coeff * exp(log_z) + log_coeff * log_z + tail; }
    Cx phi_regularized() const { return exp(tail); }
    Cx phi_full() const { return exp(theta_full()); }
};

class OuterParametrix {
  public:
    explicit OuterParametrix(const SpectralCurve& curve) : c_(curve) {
        compute_infinity_data();
        measure_column_signs();
        compute_normalizer();
    }

    // H_j(z) = 1/sqrt(F_theta(theta_j(z), z)) continued from the anchor.
    Cx prefactor_H(int sheet, const Cx& z, int side = 0) const {
        auto st = walk(z, side);
        return H_from_state(st, sheet);
    }

    // Regularized abelian exponent data for sheet j.
    AbelianValue abelian_Phi(int sheet, const Cx& z, int side = 0) const {
        AbelianValue v;
        v.linear_coeff = t_inf_[static_cast<size_t>(sheet)];
        v.log_coeff = m_inf_[static_cast<size_t>(sheet)];
        // tail = int_inf^z (theta_j - t_j - m_j/s) ds: anchor leg + path leg
        ensure_abelian_ref();
        auto w = c_.canonical_path(z, side);
        SheetTriple th = c_.anchor_values();
        size_t j = static_cast<size_t>(sheet);
        Cx tj = t_inf_[j], mj = m_inf_[j];
        auto integrand = [&](const Cx& s, const SheetTriple& t) {
            return t[j] - tj - mj / s;
        };
        v.tail = abelian_ref_[j] + c_.integrate_tracked(w, th, integrand, 20, 16);
        // continuous log z along the same canonical route (no cut beyond the
        // anchor, so the principal value at the anchor plus increments)
        v.log_z = track_log_z(z, side);
        return v;
    }

    // The sheet matrix and N(z) = C M(z) D (D = the measured sign gauge).
    Mat3 sheet_matrix(const Cx& z, int side = 0) const {
        auto st = walk(z, side);
        Mat3 M;
        for (int j = 0; j < 3; ++j) {
            Cx H = H_from_state(st, j);
            Cx th = st.theta[static_cast<size_t>(j)];
            M(0, j) = H;
            M(1, j) = H * th;
            M(2, j) = H * th * th;
        }
        return M;
    }

    Mat3 outer_N(const Cx& z, int side = 0) const {
        Mat3 M = sheet_matrix(z, side);
        Mat3 MD = M;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) MD(i, j) = MD(i, j) * signs_[static_cast<size_t>(j)];
        return normalizer_ * MD;
    }

    // ratios (theta_+/theta_*, theta_-/theta_*) and the log-branch identity
    std::pair<Cx, Cx> phi_language_ratios(const Cx& z, int side = 0) const {
        auto th = c_.branches_at(z, side);
        return {th[0] / th[2], th[1] / th[2]};
    }

    struct JumpReport {
        Real max_residual;     // max over nodes of ||N+ - N- P||
        Real max_abs_det_gap;  // max | |det N+| - |det N-| |
        bool det_sign_flips;   // sign behavior across the conductor (see notes)
    };

    // Permutation-jump residuals over sampled conductor nodes.
    JumpReport jump_residual(int samples_per_conductor = 25) const {
        JumpReport rep;
        rep.max_residual = 0;
        rep.max_abs_det_gap = 0;
        rep.det_sign_flips = true;
        for (size_t ci = 0; ci < c_.preset().conductors.size(); ++ci) {
            const auto& cs = c_.preset().conductors[ci];
            Real off = (cs.b - cs.a) / 200000;
            for (int k = 1; k < samples_per_conductor; ++k) {
                Real x = cs.a + (cs.b - cs.a) * Real(k) / samples_per_conductor;
                // skip the immediate vicinity of branch points
                bool near_bp = false;
                for (const auto& bp : c_.preset().branch_points)
                    if (abs(x - bp) < (cs.b - cs.a) / 20) near_bp = true;
                if (near_bp) continue;
                Mat3 Np = outer_N(Cx(x, off), 0);
                Mat3 Nm = outer_N(Cx(x, -off), 0);
                Mat3 P = permutation_for(cs);
                Mat3 diff = Np - Nm * P;
                Real r = norm_inf(diff) / (norm_inf(Np) + 1);
                if (r > rep.max_residual) rep.max_residual = r;
                Cx dp = det(Np), dm = det(Nm);
                Real gap = abs(abs(dp) - abs(dm));
                if (gap > rep.max_abs_det_gap) rep.max_abs_det_gap = gap;
                if ((dp.re > 0) == (dm.re > 0) && abs(dp.im) < abs(dp.re) / 10)
                    rep.det_sign_flips = false;
            }
        }
        return rep;
    }

    static Mat3 permutation_for(const ConductorSpec& cs) {
        Mat3 P = Mat3::identity();
        int i = cs.sheet_shared, j = cs.sheet_partner;
        P(i, i) = Cx(0);
        P(j, j) = Cx(0);
        P(i, j) = Cx(1);
        P(j, i) = Cx(1);
        return P;
    }

    const Mat3& normalizer() const { return normalizer_; }
    const std::array<Cx, 3>& sheet_values_at_infinity() const { return t_inf_; }
    const std::array<Cx, 3>& column_signs() const { return signs_; }

  private:
    const SpectralCurve& c_;
    std::array<Cx, 3> t_inf_, m_inf_;
    std::array<Cx, 3> signs_{Cx(1), Cx(1), Cx(1)};
    Mat3 normalizer_;
    mutable std::optional<std::array<Cx, 3>> abelian_ref_cache_;
    mutable std::array<Cx, 3> abelian_ref_;

    struct WalkState {
        SheetTriple theta;
        std::array<Cx, 3> Lf;  // continuous log of F_theta(theta_j, z)
        Cx z;
    };

    WalkState walk(const Cx& z, int side) const {
        auto w = c_.canonical_path(z, side);
        WalkState st;
        st.z = w.front();
        st.theta = c_.anchor_values();
        for (int j = 0; j < 3; ++j)
            st.Lf[static_cast<size_t>(j)] =
                log(c_.f_theta(st.theta[static_cast<size_t>(j)], st.z));
        for (size_t i = 1; i < w.size(); ++i) advance(st, w[i]);
        return st;
    }

    void advance(WalkState& st, const Cx& target) const {
        Cx cur = st.z;
        Real full = abs(target - cur);
        if (full == 0) return;
        Real h = full / 2;
        int guard = 0;
        while (abs(target - cur) > 0) {
            if (++guard > 200000) throw std::runtime_error("OuterParametrix: walk stalled");
            Cx dir = (target - cur) / Cx(abs(target - cur));
            Real step = h;
            if (step > abs(target - cur)) step = abs(target - cur);
            Cx nxt = cur + Cx(step) * dir;
            SheetTriple th_new = c_.continue_triple(cur, st.theta, nxt);
            bool ok = true;
            std::array<Cx, 3> Lf_new;
            for (int j = 0; j < 3; ++j) {
                Cx fo = c_.f_theta(st.theta[static_cast<size_t>(j)], cur);
                Cx fn = c_.f_theta(th_new[static_cast<size_t>(j)], nxt);
                if (abs(fn - fo) > abs(fo) / 2) { ok = false; break; }
                Lf_new[static_cast<size_t>(j)] = st.Lf[static_cast<size_t>(j)] + log(fn / fo);
            }
            if (!ok && step > full * ldexp(Real(1), -48)) {
                h = step / 2;
                continue;
            }
            st.theta = th_new;
            st.Lf = Lf_new;
            st.z = nxt;
            cur = nxt;
            h = h * 2;
        }
    }

    Cx H_from_state(const WalkState& st, int sheet) const {
        return exp(Cx(Real(0)) - st.Lf[static_cast<size_t>(sheet)] / Cx(2));
    }

    Cx track_log_z(const Cx& z, int side) const {
        auto w = c_.canonical_path(z, side);
        Cx L = log(w.front());
        Cx cur = w.front();
        for (size_t i = 1; i < w.size(); ++i) {
            // straight legs never pass through 0 on our canonical routes,
            // but subdivide anyway for safe principal increments
            int steps = 16;
            for (int k = 1; k <= steps; ++k) {
                Cx nxt = cur + (w[i] - cur) / Cx(Real(steps - k + 1));
                L += log(nxt / cur);
                cur = nxt;
            }
        }
        return L;
    }

    void compute_infinity_data() {
        // limits of theta_j and the 1/z coefficient by two-radius extrapolation
        Real R1("3e7"), R2("6e7");
        SheetTriple a = c_.continue_triple(Cx(c_.preset().z_ref), c_.anchor_values(), Cx(R1));
        SheetTriple b = c_.continue_triple(Cx(R1), a, Cx(R2));
        for (int j = 0; j < 3; ++j) {
            size_t js = static_cast<size_t>(j);
            // theta(R) = t + m/R: solve from two radii
            Cx m = (a[js] - b[js]) / (Cx(1) / Cx(R1) - Cx(1) / Cx(R2));
            Cx t = a[js] - m / Cx(R1);
            t_inf_[js] = t;
            m_inf_[js] = m;
        }
    }

    void measure_column_signs() {
        // raw cross-cut swap sign per conductor at one mid-band point
        std::array<Cx, 3> d{Cx(1), Cx(1), Cx(1)};
        for (size_t ci = 0; ci < c_.preset().conductors.size(); ++ci) {
            const auto& cs = c_.preset().conductors[ci];
            Real x = cs.a + (cs.b - cs.a) * Real(11) / 20;
            Real off = (cs.b - cs.a) / 200000;
            auto stp = walk(Cx(x, off), 0);
            auto stm = walk(Cx(x, -off), 0);
            int i = cs.sheet_shared, j = cs.sheet_partner;
            Cx Hp = H_from_state(stp, i);                    // shared column, + side
            Cx Hm = H_from_state(stm, j);                    // partner column, - side
            Cx ratio = Hp / Hm;                              // ideally +1
            // fold the measured sign into the partner column
            Real re = ratio.re;
            Cx s = (abs(ratio - Cx(1)) < abs(ratio + Cx(1))) ? Cx(1) : Cx(-1);
            (void)re;
            d[static_cast<size_t>(j)] = d[static_cast<size_t>(j)] * s;
        }
        signs_ = d;
    }

    void compute_normalizer() {
        // M(inf) by Richardson over two radii (errors ~ 1/R)
        Real R1("1e6"), R2("2e6");
        auto st1 = walk(Cx(R1), 0);
        auto st2 = walk(Cx(R2), 0);
        Mat3 M1, M2;
        for (int j = 0; j < 3; ++j) {
            Cx H1 = H_from_state(st1, j), H2 = H_from_state(st2, j);
            Cx th1 = st1.theta[static_cast<size_t>(j)], th2 = st2.theta[static_cast<size_t>(j)];
            M1(0, j) = H1; M1(1, j) = H1 * th1; M1(2, j) = H1 * th1 * th1;
            M2(0, j) = H2; M2(1, j) = H2 * th2; M2(2, j) = H2 * th2 * th2;
        }
        Mat3 Minf = Cx(2) * M2 - M1;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) Minf(i, j) = Minf(i, j) * signs_[static_cast<size_t>(j)];
        Cx d = det(Minf);
        if (abs(d) < Real("1e-12"))
            throw std::runtime_error("OuterParametrix: sheet matrix degenerate at infinity");
        normalizer_ = inverse(Minf);
    }

    void ensure_abelian_ref() const {
        if (abelian_ref_cache_) { abelian_ref_ = *abelian_ref_cache_; return; }
        // int_inf^{z_ref} (theta_j - t_j - m_j/s) ds along the real axis
        Real Rbig("1e8");
        SheetTriple th = c_.continue_triple(Cx(c_.preset().z_ref), c_.anchor_values(), Cx(Rbig));
        std::array<Cx, 3> ref;
        for (int j = 0; j < 3; ++j) {
            size_t js = static_cast<size_t>(j);
            Cx tj = t_inf_[js], mj = m_inf_[js];
            auto integrand = [&](const Cx& s, const SheetTriple& t) {
                return t[js] - tj - mj / s;
            };
            std::vector<Cx> w{Cx(Rbig), Cx(c_.preset().z_ref)};
            ref[js] = c_.integrate_tracked(w, th, integrand, 24, 44);
        }
        abelian_ref_cache_ = ref;
        abelian_ref_ = ref;
    }
};

}  // namespace rh3

#endif
