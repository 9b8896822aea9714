#include <catch2/catch_amalgamated.hpp>

#include <rh3/curve.hpp>

#include <random>

using namespace rh3;

namespace {
struct PrecisionInit {
    PrecisionInit() { set_precision_bits(256); }
} init_;

const SpectralCurve& laguerre_curve() {
    static SpectralCurve c(laguerre_symmetric_preset());
    return c;
}
const SpectralCurve& two_edge_curve() {
    static SpectralCurve c(two_edge_preset());
    return c;
}
}  // namespace

TEST_CASE("Vieta identities at random points, both presets") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-4.0, 6.0);
    for (const SpectralCurve* c : {&laguerre_curve(), &two_edge_curve()}) {
        for (int t = 0; t < 6; ++t) {
            Cx z(u(rng), u(rng) / 2 + 0.7);
            auto th = c->roots_at(z);
            Cx s1 = th[0] + th[1] + th[2];
            Cx s2 = th[0] * th[1] + th[0] * th[2] + th[1] * th[2];
            Cx s3 = th[0] * th[1] * th[2];
            CHECK(abs(s1 + c->c2(z)) < Real("1e-60") * (abs(s1) + 1));
            CHECK(abs(s2 - c->c1(z)) < Real("1e-60") * (abs(s2) + 1));
            CHECK(abs(s3 + c->c0(z)) < Real("1e-60") * (abs(s3) + 1));
        }
    }
}

TEST_CASE("branch asymptotics distinct at z = 1e4") {
    // paper-structure preset: all three sheets separated by O(1) at infinity
    {
        auto th = two_edge_curve().branches_at(Cx(Real("1e4")));
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                CHECK(abs(th[static_cast<size_t>(i)] - th[static_cast<size_t>(j)]) > Real("1e-3"));
    }
    // laguerre curve: infinity is itself a (-,*) branch point, so that pair
    // separates only like z^{-3/2}; '+' stays O(1) away from both
    {
        auto th = laguerre_curve().branches_at(Cx(Real("1e4")));
        CHECK(abs(th[0] - th[1]) > Real(1) / 2);
        CHECK(abs(th[0] - th[2]) > Real(1) / 2);
        Real split = abs(th[1] - th[2]);
        CHECK(split > Real("1e-7"));
        CHECK(split < Real("1e-5"));
    }
}

TEST_CASE("labels stable under path perturbation") {
    const auto& c = two_edge_curve();
    Cx z(Real(5), Real(2));
    auto a = c.branches_at(z);
    SheetTriple b = c.continue_triple(Cx(c.preset().z_ref), c.anchor_values(), z);
    for (int i = 0; i < 3; ++i)
        CHECK(abs(a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) < Real("1e-50"));
}

TEST_CASE("two-edge preset monodromy matches the declared pairings") {
    const auto& c = two_edge_curve();
    // indices: 0='+', 1='-', 2='*'
    auto p0 = c.monodromy_loop(Cx(0), Real(1) / 40);
    CHECK(p0 == std::array<int, 3>{2, 1, 0});  // swaps (+, *)
    auto px0 = c.monodromy_loop(Cx(1), Real(1) / 20);
    CHECK(px0 == std::array<int, 3>{1, 0, 2});  // swaps (+, -)
    auto pfar = c.monodromy_loop(Cx(Real(1) / 8), Real(1) / 30);
    CHECK(pfar == std::array<int, 3>{1, 0, 2});
    auto pneg = c.monodromy_loop(Cx(Real(-27) / 8), Real(1) / 10);
    CHECK(pneg == std::array<int, 3>{2, 1, 0});
}

TEST_CASE("laguerre preset monodromy: soft edge swaps (+,-), negative axis swaps (-,*)") {
    const auto& c = laguerre_curve();
    auto px0 = c.monodromy_loop(Cx(Real(27) / 8), Real(1) / 10);
    CHECK(px0 == std::array<int, 3>{1, 0, 2});
    auto pneg = c.monodromy_loop(Cx(Real(-2)), Real(1) / 10);
    CHECK(pneg == std::array<int, 3>{0, 2, 1});  // swaps (-, *)
    // the hard edge joins all three sheets: a small loop around 0 is a 3-cycle
    auto p0 = c.monodromy_loop(Cx(0), Real(1) / 50);
    bool is_three_cycle = (p0 == std::array<int, 3>{1, 2, 0}) || (p0 == std::array<int, 3>{2, 0, 1});
    CHECK(is_three_cycle);
}

TEST_CASE("boundary values interchange across the laguerre band") {
    const auto& c = laguerre_curve();
    Real x(Real(3) / 2);
    auto above = c.branches_at(Cx(x, Real(0)), +1);
    auto below = c.branches_at(Cx(x, Real(0)), -1);
    CHECK(abs(above[0] - below[1]) < Real("1e-45"));
    CHECK(abs(above[1] - below[0]) < Real("1e-45"));
    CHECK(abs(above[2] - below[2]) < Real("1e-45"));
}

TEST_CASE("laguerre g normalization and single-valuedness") {
    const auto& c = laguerre_curve();
    Cx z(Real("1e4"));
    Cx G = c.g_eval(z);
    CHECK(abs(exp(G) / z - Cx(1)) < Real("1e-3"));

    Cx z2(Real(5));
    Cx Ga = c.g_eval(z2, +1);
    Cx Gb = c.g_eval(z2, -1);
    CHECK(abs(Ga - Gb) < Real("1e-30"));
}

TEST_CASE("laguerre G against the exact oracle magnitude") {
    const auto& c = laguerre_curve();
    ModelDescriptor m(Real(0.3), Real(0.8), 8, 8);
    auto p = solve_mop(m);
    Cx z = Cx(Real(27) / 8 + 2);
    Cx G = c.g_eval(z);
    Real ratio = abs(poly_eval(p, z)) / abs(exp(Cx(Real(16)) * G));
    CHECK(ratio > Real(1) / 100);
    CHECK(ratio < Real(100));
}

TEST_CASE("phases vanish at their base points and are imaginary on conductors") {
    for (const SpectralCurve* cp : {&laguerre_curve(), &two_edge_curve()}) {
        const auto& c = *cp;
        for (size_t ci = 0; ci < 2; ++ci) {
            const auto& cs = c.preset().conductors[ci];
            if (cs.gap_dir == 0) continue;
            Cx near_base = c.phi_coord(ci, Cx(cs.base + Real(cs.gap_dir) / 1000));
            CHECK(abs(near_base) < Real(1) / 20);
            Real mid = (cs.a + cs.b) / 2;
            Cx bv = c.phi_on_conductor(ci, mid, +1);
            CHECK(abs(bv.re) < Real("1e-8") * (abs(bv) + 1));
        }
    }
}

TEST_CASE("two-edge coordinate phases are gap-positive") {
    const auto& c = two_edge_curve();
    Cx pg = c.phi_coord(0, Cx(Real(6) / 100));
    CHECK(pg.im == 0);
    CHECK(pg.re > 0);
    Cx pd = c.phi_coord(1, Cx(Real(14) / 10));
    CHECK(abs(pd.im) < Real("1e-25"));
    CHECK(pd.re > 0);
}

TEST_CASE("conformal coordinates at the tested edges (two-edge preset)") {
    const auto& c = two_edge_curve();

    Real h(Real(1) / 400);
    Cx f0_p = c.conf_coord_hard(Cx(h));
    Cx f0_m = c.conf_coord_hard(Cx(h / 2));
    CHECK(abs(f0_m) < abs(f0_p));
    Real d1 = (f0_p.re / h), d2 = (f0_m.re / (h / 2));
    CHECK(d1 > 0);
    CHECK(d2 > 0);
    CHECK(abs(d1 - d2) < abs(d1) / 4);
    CHECK(abs(f0_p.im) < abs(f0_p.re) / 1000);

    Cx fx_p = c.conf_coord_soft(Cx(Real(1) + h));
    Cx fx_m = c.conf_coord_soft(Cx(Real(1) + h / 2));
    CHECK(fx_p.re > 0);
    CHECK((fx_p.re / h) > 0);
    CHECK(abs(fx_p.re / h - fx_m.re / (h / 2)) < (fx_p.re / h) / 4);
    CHECK(abs(fx_p.im) < fx_p.re / 1000);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Cx> imgs;
    Real rad = c.preset().disk_radius_hard;
    for (int t = 0; t < 40; ++t) {
        Cx z(u(rng) * static_cast<double>(rad), u(rng) * static_cast<double>(rad));
        if (abs(z) > rad * 9 / 10 || abs(z) < rad / 20) continue;
        imgs.push_back(c.conf_coord_hard(z));
    }
    for (size_t i = 0; i < imgs.size(); ++i)
        for (size_t j = i + 1; j < imgs.size(); ++j)
            CHECK(abs(imgs[i] - imgs[j]) > Real("1e-12"));
}

TEST_CASE("soft-edge Airy scaling relation n phi ~ (2/3) zeta^{3/2}") {
    const auto& c = two_edge_curve();
    for (Cx z : {Cx(Real("1.12")), Cx(Real("1.05"), Real("0.04"))}) {
        Cx phi = c.phi_coord(1, z);
        Cx f = c.conf_coord_soft(z);
        Cx lhs = Cx(Real(16)) * phi;
        Cx zeta = Cx(pow(Real(16), Real(2) / 3)) * f;
        Cx rhs = Cx(Real(2) / 3) * zeta * sqrt(zeta);
        CHECK(abs(lhs - rhs) < Real("1e-20") * abs(lhs));
    }
}

TEST_CASE("sign charts pass on both presets") {
    for (const SpectralCurve* cp : {&laguerre_curve(), &two_edge_curve()}) {
        auto rep = cp->sign_chart_check(24);
        INFO(cp->preset().name << ": min Re phi on lips = "
                               << static_cast<double>(rep.min_re_phi_lips)
                               << ", max |Re phi| on conductors = "
                               << static_cast<double>(rep.max_abs_re_phi_cond));
        CHECK(rep.pass);
        CHECK(rep.max_abs_re_phi_cond < Real("1e-8"));
    }
}

TEST_CASE("shrinking lens width sends min Re phi toward 0") {
    auto p = two_edge_preset();
    auto narrow = p;
    narrow.lip_offset = p.lip_offset / 4;
    SpectralCurve cw(p), cn(narrow);
    auto rw = cw.sign_chart_check(16);
    auto rn = cn.sign_chart_check(16);
    CHECK(rn.min_re_phi_lips > 0);
    CHECK(rn.min_re_phi_lips < rw.min_re_phi_lips);
}

TEST_CASE("laguerre x0 matches the Richardson-extrapolated largest oracle zero") {
    ModelDescriptor m16(Real(0.3), Real(0.8), 8, 8);
    ModelDescriptor m32(Real(0.3), Real(0.8), 16, 16);
    ModelDescriptor m64(Real(0.3), Real(0.8), 32, 32);
    Real z16 = poly_zeros(solve_mop(m16)).zeros.back().re;
    Real z32 = poly_zeros(solve_mop(m32)).zeros.back().re;
    Real z64 = poly_zeros(solve_mop(m64)).zeros.back().re;
    Real r = pow(Real(2), -Real(2) / 3);
    Real x0a = (z32 - r * z16) / (1 - r);
    Real x0b = (z64 - r * z32) / (1 - r);
    Real x0 = laguerre_curve().preset().x0;
    INFO("extrapolated: " << static_cast<double>(x0a) << ", " << static_cast<double>(x0b)
                          << " target " << static_cast<double>(x0));
    CHECK(abs(x0b - x0) < abs(x0a - x0));
    CHECK(abs(x0b - x0) < Real(27) / 8 / 20);
}

TEST_CASE("laguerre curve density integrates to one") {
    const auto& c = laguerre_curve();
    Real x0 = c.preset().x0;
    Real mid = x0 / 2;
    const auto& rule = gauss_legendre(32);
    Real mass(0);
    {   // [0, mid]: x = u^3 handles the x^{-2/3} blow-up
        Real umax = pow(mid, Real(1) / 3);
        for (size_t k = 0; k < rule.x.size(); ++k) {
            Real u = umax / 2 + umax / 2 * rule.x[k];
            mass += rule.w[k] * (umax / 2) * 3 * u * u * c.density(u * u * u);
        }
    }
    {   // [mid, x0]: x = x0 - u^2
        Real umax = sqrt(x0 - mid);
        for (size_t k = 0; k < rule.x.size(); ++k) {
            Real u = umax / 2 + umax / 2 * rule.x[k];
            mass += rule.w[k] * (umax / 2) * 2 * u * c.density(x0 - u * u);
        }
    }
    CHECK(abs(mass - 1) < Real("1e-6"));
}

TEST_CASE("preset JSON file round trip") {
    auto p = two_edge_preset();
    save_preset(p, "two_edge_roundtrip.json");
    auto q = load_preset("two_edge_roundtrip.json");
    CHECK(q.name == p.name);
    CHECK(abs(q.x0 - p.x0) == 0);
    CHECK(q.conductors.size() == p.conductors.size());
    CHECK(q.conductors[0].sheet_partner == p.conductors[0].sheet_partner);
    CHECK(q.conductors[0].phase_sign == p.conductors[0].phase_sign);
    SpectralCurve c(q);
    auto a = c.branches_at(Cx(Real(5), Real(1)));
    auto b = two_edge_curve().branches_at(Cx(Real(5), Real(1)));
    for (int i = 0; i < 3; ++i)
        CHECK(abs(a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) < Real("1e-50"));
}

TEST_CASE("build_curve guards the equal-ratio precondition") {
    ModelDescriptor bad(Real(0.3), Real(0.8), 5, 3);
    CHECK_THROWS_AS(build_curve(bad, laguerre_symmetric_preset()), std::invalid_argument);
    ModelDescriptor good(Real(0.3), Real(0.8), 4, 4);
    auto c = build_curve(good, laguerre_symmetric_preset());
    CHECK(c.preset().name == "laguerre-sym");
}

TEST_CASE("degenerate preset is rejected by the discriminant guard") {
    auto p = two_edge_preset();
    p.branch_points.push_back(Real(2));  // not a discriminant zero
    CHECK_THROWS_AS(SpectralCurve(p), std::runtime_error);
}
