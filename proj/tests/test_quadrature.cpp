#include <catch2/catch_amalgamated.hpp>

#include <rh3/quadrature.hpp>

#include <random>

using namespace rh3;

namespace {
struct PrecisionInit {
    PrecisionInit() { set_precision_bits(256); }
} init_;
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const auto& r = gauss_legendre(12);
    for (int k = 0; k <= 23; ++k) {
        Real s(0);
        for (size_t j = 0; j < r.x.size(); ++j) s += r.w[j] * pow(r.x[j], k);
        Real exact = (k % 2 == 1) ? Real(0) : Real(2) / (k + 1);
        CHECK(abs(s - exact) < Real("1e-70"));
    }
}

TEST_CASE("cauchy_transform trivial and closed-form cases") {
    auto arc = OrientedArc::segment(Cx(0), Cx(1));
    arc.panels = 12;
    arc.nodes_per_panel = 24;
    auto q = discretize(arc);

    std::vector<Cx> zero(q.nodes.size(), Cx(0));
    CHECK(abs(cauchy_transform(q, zero, Cx(-1))) == 0);

    // density 1 on [0,1], z=-1: (1/2pi i) log((1-z)/(-z)) = log(2)/(2 pi i)
    std::vector<Cx> one(q.nodes.size(), Cx(1));
    Cx got = cauchy_transform(q, one, Cx(-1));
    Cx expect = Cx(log(Real(2))) / Cx(Real(0), 2 * pi_real());
    CHECK(abs(got - expect) < Real("1e-60"));

    // density s on the ccw unit circle at z=0: analytic integrand over a
    // closed contour vanishes
    auto circ = OrientedArc::circle(Cx(0), Real(1), true);
    auto cq = discretize(circ);
    std::vector<Cx> dens(cq.nodes.size());
    for (size_t k = 0; k < cq.nodes.size(); ++k) dens[k] = cq.nodes[k].z;
    CHECK(abs(cauchy_transform(cq, dens, Cx(0))) < Real("1e-70"));
}

TEST_CASE("Plemelj identity on the unit circle") {
    auto circ = OrientedArc::circle(Cx(0), Real(1), true);
    circ.panels = 16;
    auto q = discretize(circ);

    std::vector<Cx> one(q.nodes.size(), Cx(1));
    Cx plus = cauchy_side_limit(q, one, 3, +1);
    Cx minus = cauchy_side_limit(q, one, 3, -1);
    CHECK(abs(plus - minus - Cx(1)) < Real("1e-25"));
    CHECK(abs(plus - Cx(1)) < Real("1e-25"));  // ccw circle: plus side is the interior
    CHECK(abs(minus) < Real("1e-25"));

    // clockwise circle: the minus side is the interior and carries the -1
    auto cwc = OrientedArc::circle(Cx(0), Real(1), false);
    cwc.panels = 16;
    auto cw = discretize(cwc);
    std::vector<Cx> onecw(cw.nodes.size(), Cx(1));
    Cx mcw = cauchy_side_limit(cw, onecw, 3, -1);
    CHECK(abs(mcw + Cx(1)) < Real("1e-25"));

    // random polynomial densities: C+ - C- = f at several nodes
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 2; ++trial) {
        std::vector<Cx> f(q.nodes.size());
        Cx c0(u(rng), u(rng)), c1(u(rng), u(rng)), c2(u(rng), u(rng));
        for (size_t k = 0; k < q.nodes.size(); ++k) {
            Cx s = q.nodes[k].z;
            f[k] = c0 + c1 * s + c2 * s * s;
        }
        for (size_t probe : {size_t(5), size_t(100), size_t(200)}) {
            Cx p = cauchy_side_limit(q, f, probe, +1);
            Cx m = cauchy_side_limit(q, f, probe, -1);
            CHECK(abs(p - m - f[probe]) < Real("1e-20"));
        }
    }
}

TEST_CASE("cauchy side limit self-convergence under node doubling") {
    auto mk = [](int panels) {
        auto arc = OrientedArc::segment(Cx(Real(0), Real(0)), Cx(Real(1), Real(0)));
        arc.panels = panels;
        arc.nodes_per_panel = 4;  // coarse on purpose: stay above the accuracy floor
        return discretize(arc);
    };
    auto density = [](const Cx& z) { return exp(z) * Cx(Real(1), Real(1)) + z * z; };

    Cx target(Real("0.503"), Real(0));
    Cx tangent(Real(1), Real(0));
    OffsetLimitOptions opt;
    opt.eps0 = Real(1) / 32;
    auto eval = [&](int panels) {
        auto q = mk(panels);
        std::vector<Cx> f(q.nodes.size());
        for (size_t k = 0; k < q.nodes.size(); ++k) f[k] = density(q.nodes[k].z);
        return cauchy_side_limit_at(q, f, target, tangent, -1, opt);
    };
    Cx v_coarse = eval(4), v_mid = eval(8), v_fine = eval(16);
    Real change1 = abs(v_mid - v_coarse);
    Real change2 = abs(v_fine - v_mid);
    CHECK(change2 * 4 <= change1);
}

TEST_CASE("integrate_polyline with geometric tail refinement") {
    // int from R down to 1 of ds/s^2 = -(1 - 1/R), R = 1e6
    auto f = [](const Cx& z) { return Cx(1) / (z * z); };
    Cx got = integrate_polyline(f, {Cx(Real("1e6")), Cx(1)}, 24, 40);
    Cx expect = Cx(Real(1) - Real("1e-6"));
    CHECK(abs(got + expect) < Real("1e-33"));
}
