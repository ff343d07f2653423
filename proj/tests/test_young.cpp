#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "snowflake/errors.hpp"
#include "snowflake/field.hpp"
#include "snowflake/oracle.hpp"
#include "snowflake/young.hpp"

using namespace snowflake;
namespace yg = snowflake::young;

namespace {

FieldTuple identity_tuple(const Box& box) {
    FieldTuple g;
    g.domain = box;
    for (int a = 0; a < box.dim(); ++a) g.fields.push_back(coordinate_field(a, box.dim()));
    return g;
}

FieldTuple lacunary_tuple(const Box& box, std::span<const double> betas, int terms) {
    FieldTuple g;
    g.domain = box;
    for (int a = 0; a < box.dim(); ++a)
        g.fields.push_back(lacunary_series(betas[a], terms, LacunaryKind::cosine_1d, a,
                                           box.dim()));
    return g;
}

}  // namespace

TEST_CASE("error constants follow the recursion") {
    double b1[] = {0.7};
    CHECK(yg::error_constants(1, 0.9, b1).cprime == 1.0);

    double b11[] = {1.0};
    auto c1 = yg::error_constants(1, 1.0, b11);
    CHECK(c1.csum == doctest::Approx(2.0));  // 1/(1 - 2^-1)

    double b2[] = {1.0, 1.0};
    auto c2 = yg::error_constants(2, 1.0, b2);
    CHECK(c2.cprime == doctest::Approx(12.0));  // 4 (1 + 2)
    CHECK(c2.csum == doctest::Approx(24.0));    // 12 / (1 - 2^-1)

    CHECK_THROWS_WITH_AS(yg::error_constants(1, 0.5, std::array<double, 1>{0.5}),
                         doctest::Contains("exponent sum too small"), ExponentError);
    CHECK_THROWS_AS(yg::error_constants(2, 0.9, std::array<double, 2>{0.5, 0.6}),
                    ExponentError);
    CHECK_THROWS_AS(yg::error_constants(1, 1.5, std::array<double, 1>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("refinement bound formula") {
    double betas[] = {1.0};
    auto c = yg::error_constants(1, 1.0, betas);
    double hg[] = {1.0};
    // n=1, alpha=beta=1, diam=1, k=0: C_1 = 2
    CHECK(yg::apriori_bound(c, 0, 1.0, 1.0, hg) == doctest::Approx(2.0));
    // halves per level (2^(k(n-gamma)) with gamma = 2)
    CHECK(yg::apriori_bound(c, 3, 1.0, 1.0, hg) == doctest::Approx(2.0 / 8.0));
    // H_f = 0 -> 0
    CHECK(yg::apriori_bound(c, 2, 1.0, 0.0, hg) == 0.0);
    // monotone decreasing in k
    double prev = yg::apriori_bound(c, 0, 2.0, 1.0, hg);
    for (int k = 1; k <= 12; ++k) {
        const double cur = yg::apriori_bound(c, k, 2.0, 1.0, hg);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("thin box bound") {
    // n=1 reduction: (sup_f eps^beta + C_1 H_f eps^gamma) * H_g
    double betas[] = {0.8};
    auto c = yg::error_constants(1, 0.7, betas);
    const Box box = Box::interval(0.0, 0.25);
    double hg[] = {2.0};
    const double eps = 0.25;
    const double expect =
        (1.0 * 3.0 * std::pow(eps, 0.8) + c.csum * 0.5 * std::pow(eps, 1.5)) * 0.25 / eps *
        2.0;
    CHECK(yg::thin_box_bound(box, c, 3.0, 0.5, hg) == doctest::Approx(expect));

    // thin 2-D slabs: bound vanishes as the short edge shrinks (beta_bar > n-1)
    double b2[] = {0.95, 0.95};
    auto c2 = yg::error_constants(2, 0.9, b2);
    double hg2[] = {1.0, 1.0};
    double prev = std::numeric_limits<double>::infinity();
    for (double eps2 : {0.1, 0.01, 0.001}) {
        Box slab({{0.0, 1.0}, {0.0, eps2}});
        const double b = yg::thin_box_bound(slab, c2, 1.0, 1.0, hg2);
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("boundary integral base cases") {
    FieldTuple g1 = identity_tuple(Box::interval(0.0, 1.0));
    CHECK(yg::boundary_integral(Box::interval(0.0, 1.0), g1, 3) == doctest::Approx(1.0));

    const Box sq = Box::unit(2);
    CHECK(yg::boundary_integral(sq, identity_tuple(sq), 4) == doctest::Approx(1.0));

    FieldTuple swapped;
    swapped.domain = sq;
    swapped.fields.push_back(coordinate_field(1, 2));
    swapped.fields.push_back(coordinate_field(0, 2));
    CHECK(yg::boundary_integral(sq, swapped, 4) == doctest::Approx(-1.0));

    // beta_bar must exceed n-1
    FieldTuple weak;
    weak.domain = sq;
    weak.fields.push_back(lacunary_series(0.4, 3, LacunaryKind::cosine_1d, 0, 2));
    weak.fields.push_back(lacunary_series(0.5, 3, LacunaryKind::cosine_1d, 1, 2));
    CHECK_THROWS_AS(yg::boundary_integral(sq, weak, 3), ExponentError);
}

TEST_CASE("telescoping: riemann_sum of 1 equals the boundary integral") {
    ScalarField one = constant_field(1.0, 2);
    const Box sq = Box::unit(2);
    double betas[] = {0.9, 0.9};
    for (int k : {1, 3, 5}) {
        auto g = lacunary_tuple(sq, betas, 5);
        const double lhs = yg::riemann_sum(one, g, sq, k);
        const double rhs = yg::boundary_integral(sq, g, k);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // 3-D as well
    const Box cube = Box::unit(3);
    ScalarField one3 = constant_field(1.0, 3);
    FieldTuple g3;
    g3.domain = cube;
    g3.fields.push_back(coordinate_field(0, 3));
    ScalarField s1;
    s1.eval = [](std::span<const double> x) { return std::sin(x[1] + 0.5 * x[0]); };
    s1.exponent = 1.0;
    s1.holder_bound = 1.2;
    s1.certified = true;
    g3.fields.push_back(s1);
    g3.fields.push_back(coordinate_field(2, 3));
    for (int k : {1, 2, 3}) {
        const double lhs = yg::riemann_sum(one3, g3, cube, k);
        const double rhs = yg::boundary_integral(cube, g3, k);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("riemann sum basics") {
    const Box box = Box::interval(0.0, 1.0);
    ScalarField zero = constant_field(0.0, 1);
    CHECK(yg::riemann_sum(zero, identity_tuple(box), box, 4) == 0.0);

    // midpoint symmetry makes f=x, g=x exact at every level
    ScalarField fx = coordinate_field(0, 1);
    CHECK(yg::riemann_sum(fx, identity_tuple(box), box, 3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate: volume, products and the 1-D trig oracle") {
    // f == 1, identity tuple -> volume
    for (int n : {1, 2, 3}) {
        const Box box = Box::unit(n);
        auto r = yg::integrate(constant_field(1.0, n), identity_tuple(box), box, {});
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.certified);
    }

    // f = sin, g = cos on [0, 2pi]: compare against the quadrature oracle
    const Box circle = Box::interval(0.0, 2.0 * std::numbers::pi);
    ScalarField fs;
    fs.eval = [](std::span<const double> x) { return std::sin(x[0]); };
    fs.exponent = 1.0;
    fs.holder_bound = 1.0;
    fs.sup_bound = 1.0;
    fs.certified = true;
    ScalarField gc;
    gc.eval = [](std::span<const double> x) { return std::cos(x[0]); };
    gc.exponent = 1.0;
    gc.holder_bound = 1.0;
    gc.sup_bound = 1.0;
    gc.certified = true;
    FieldTuple g;
    g.domain = circle;
    g.fields.push_back(gc);
    yg::IntegrateOptions opt;
    opt.tol = 1e-6;
    opt.k_max = 14;
    auto r = yg::integrate(fs, g, circle, opt);
    const double oracle = oracle::det_quadrature_integral(
        fs, g, circle, oracle::QuadratureSpec::uniform(4096, 1));
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(r.value == doctest::Approx(-std::numbers::pi).epsilon(1e-5));

    // f == 1, g = (x1^2, x2): exact at level 0
    const Box sq = Box::unit(2);
    FieldTuple gq;
    gq.domain = sq;
    ScalarField x1sq;
    x1sq.eval = [](std::span<const double> x) { return x[0] * x[0]; };
    x1sq.exponent = 1.0;
    x1sq.holder_bound = 2.0;
    x1sq.certified = true;
    gq.fields.push_back(x1sq);
    gq.fields.push_back(coordinate_field(1, 2));
    auto r2 = yg::integrate(constant_field(1.0, 2), gq, sq, {});
    CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate rejects gamma <= n and honors the budget") {
    const Box box = Box::unit(1);
    FieldTuple g;
    g.domain = box;
    g.fields.push_back(lacunary_series(0.5, 3, LacunaryKind::cosine_1d, 0, 1));
    auto f = lacunary_series(0.5, 3, LacunaryKind::cosine_1d, 0, 1);
    CHECK_THROWS_WITH_AS(yg::integrate(f, g, box, {}),
                         doctest::Contains("exponent sum too small"), ExponentError);

    // unreachable tolerance within k_max -> budget, value still returned
    auto f2 = lacunary_series(0.8, 6, LacunaryKind::cosine_1d, 0, 1);
    FieldTuple g2;
    g2.domain = box;
    g2.fields.push_back(lacunary_series(0.8, 6, LacunaryKind::cosine_1d, 0, 1));
    yg::IntegrateOptions opt;
    opt.tol = 1e-14;
    opt.k_max = 4;
    auto r = yg::integrate(f2, g2, box, opt);
    CHECK(r.reason == yg::StopReason::Budget);
    CHECK(r.level == 4);
    CHECK(std::isfinite(r.value));
    CHECK(r.apriori > 0.0);
}

TEST_CASE("certified stopping requires declared constants") {
    const Box box = Box::unit(1);
    ScalarField f;
    f.eval = [](std::span<const double> x) { return std::cos(3.0 * x[0]); };
    f.exponent = 1.0;  // no holder_bound on purpose
    FieldTuple g = identity_tuple(box);
    yg::IntegrateOptions opt;
    opt.stopping = yg::Stopping::Certified;
    CHECK_THROWS_AS(yg::integrate(f, g, box, opt), ConfigError);
}

TEST_CASE("results are identical for any worker count") {
    const Box sq = Box::unit(2);
    double betas[] = {0.85, 0.9};
    auto g = lacunary_tuple(sq, betas, 6);
    auto f = lacunary_series(0.8, 6, LacunaryKind::cosine_1d, 0, 2);
    yg::EngineOptions w1, w3;
    w1.workers = 1;
    w3.workers = 3;
    const double v1 = yg::riemann_sum(f, g, sq, 5, w1);
    const double v3 = yg::riemann_sum(f, g, sq, 5, w3);
    CHECK(v1 == v3);  // bitwise
    const double b1 = yg::boundary_integral(sq, g, 5, w1);
    const double b3 = yg::boundary_integral(sq, g, 5, w3);
    CHECK(b1 == b3);
}

TEST_CASE("Cauchy rate certificate on lacunary fields") {
    // |I_k - I_{k-1}| <= C'_n diam^gamma 2^(k(n-gamma)) H^{alpha,beta}
    const Box box = Box::unit(1);
    const double alpha = 0.8, beta = 0.8;
    auto f = lacunary_series(alpha, 6, LacunaryKind::cosine_1d, 0, 1);
    FieldTuple g;
    g.domain = box;
    g.fields.push_back(lacunary_series(beta, 6, LacunaryKind::cosine_1d, 0, 1));
    double b[] = {beta};
    auto c = yg::error_constants(1, alpha, b);
    const double h = *f.holder_bound * *g.fields[0].holder_bound;
    double prev = yg::riemann_sum(f, g, box, 0);
    for (int k = 1; k <= 6; ++k) {
        const double cur = yg::riemann_sum(f, g, box, k);
        const double bound = c.cprime * std::pow(box.diameter(), c.gamma) *
                             std::pow(2.0, k * (1 - c.gamma)) * h;
        CHECK(std::abs(cur - prev) <= bound);
        prev = cur;
    }
}

TEST_CASE("intermediate points move the sum within the certificate") {
    const Box box = Box::unit(2);
    double betas[] = {0.9, 0.95};
    auto g = lacunary_tuple(box, betas, 5);
    auto f = lacunary_series(0.85, 5, LacunaryKind::cosine_1d, 1, 2);
    auto c = yg::error_constants(2, 0.85, betas);
    const double h = *f.holder_bound * g.holder_product().value();
    for (int k : {2, 4}) {
        yg::EngineOptions mid, rnd;
        rnd.tags = yg::TagRule::Random;
        rnd.seed = 42;
        const double vm = yg::riemann_sum(f, g, box, k, mid);
        const double vr = yg::riemann_sum(f, g, box, k, rnd);
        const double bound = c.cprime * std::pow(box.diameter(), c.gamma) *
                             std::pow(2.0, k * (2 - c.gamma)) * h;
        CHECK(std::abs(vm - vr) <= bound);
        // deterministic for a fixed seed
        CHECK(yg::riemann_sum(f, g, box, k, rnd) == vr);
    }
}

TEST_CASE("algebraic laws hold within the certificates") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uexp(0.85, 0.99);
    const Box box = Box::unit(1);
    yg::IntegrateOptions opt;
    opt.tol = 1e-5;
    opt.k_max = 10;

    for (int trial = 0; trial < 5; ++trial) {
        const double alpha = uexp(rng), beta = uexp(rng);
        auto f = lacunary_series(alpha, 5, LacunaryKind::cosine_1d, 0, 1);
        FieldTuple g;
        g.domain = box;
        g.fields.push_back(lacunary_series(beta, 5, LacunaryKind::cosine_1d, 0, 1));

        // additivity over the dyadic split
        auto whole = yg::integrate(f, g, box, opt);
        double parts = 0.0, parts_bound = 0.0;
        for (const auto& half : dyadic_partition(box, 1)) {
            FieldTuple gh = g;
            gh.domain = half;
            auto r = yg::integrate(f, gh, half, opt);
            parts += r.value;
            parts_bound += r.apriori;
        }
        CHECK(std::abs(whole.value - parts) <= whole.apriori + parts_bound + 1e-12);

        // locality: constant integrator annihilates exactly
        FieldTuple gc;
        gc.domain = box;
        gc.fields.push_back(constant_field(0.37, 1));
        auto rl = yg::integrate(f, gc, box, opt);
        CHECK(rl.value == 0.0);
    }

    // alternating in 2-D: duplicated integrator stays within the certificate
    const Box sq = Box::unit(2);
    auto h = lacunary_series(0.95, 4, LacunaryKind::cosine_1d, 0, 2);
    FieldTuple dup;
    dup.domain = sq;
    dup.fields.push_back(h);
    dup.fields.push_back(h);
    auto f2 = lacunary_series(0.9, 4, LacunaryKind::cosine_1d, 1, 2);
    yg::IntegrateOptions o2;
    o2.tol = 1e-4;
    o2.k_max = 7;
    auto ra = yg::integrate(f2, dup, sq, o2);
    CHECK(std::abs(ra.value) <= std::max(ra.apriori, 1e-12));

    // product rule in 1-D: d(hh') = h dh' + h' dh against summed certificates
    auto hh = lacunary_series(0.9, 4, LacunaryKind::cosine_1d, 0, 1);
    auto hp = lacunary_series(0.95, 4, LacunaryKind::cosine_1d, 0, 1);
    auto fr = lacunary_series(0.85, 4, LacunaryKind::cosine_1d, 0, 1);
    FieldTuple g_prod;
    g_prod.domain = box;
    g_prod.fields.push_back(field_product(hh, hp, box));
    FieldTuple g_h;
    g_h.domain = box;
    g_h.fields.push_back(hp);
    FieldTuple g_hp;
    g_hp.domain = box;
    g_hp.fields.push_back(hh);
    auto lhs = yg::integrate(fr, g_prod, box, opt);
    auto r1 = yg::integrate(field_product(fr, hh, box), g_h, box, opt);
    auto r2 = yg::integrate(field_product(fr, hp, box), g_hp, box, opt);
    CHECK(std::abs(lhs.value - r1.value - r2.value) <=
          lhs.apriori + r1.apriori + r2.apriori + 1e-12);
}

TEST_CASE("parametrized integration") {
    // identity chart reproduces the direct integral
    const Box box = Box::interval(0.0, 1.0);
    HolderMap id;
    id.in_dim = 1;
    id.out_dim = 1;
    id.eval = [](std::span<const double> t, std::span<double> out) { out[0] = t[0]; };
    id.exponent = 1.0;
    id.holder_bound = 1.0;
    id.certified = true;
    auto f = lacunary_series(0.9, 4, LacunaryKind::cosine_1d, 0, 1);
    FieldTuple g;
    g.domain = box;
    g.fields.push_back(lacunary_series(0.95, 4, LacunaryKind::cosine_1d, 0, 1));
    yg::IntegrateOptions opt;
    opt.tol = 1e-5;
    auto direct = yg::integrate(f, g, box, opt);
    auto pulled = yg::parametrized_integrate(f, {g.fields[0]}, id, box, opt);
    CHECK(pulled.value == doctest::Approx(direct.value).epsilon(1e-12));

    // closed curve: x-coordinate differences telescope to zero
    HolderMap circle;
    circle.in_dim = 1;
    circle.out_dim = 2;
    circle.eval = [](std::span<const double> t, std::span<double> out) {
        out[0] = std::cos(2.0 * std::numbers::pi * t[0]);
        out[1] = std::sin(2.0 * std::numbers::pi * t[0]);
    };
    circle.exponent = 1.0;
    circle.holder_bound = 2.0 * std::numbers::pi;
    circle.certified = true;
    auto one2 = constant_field(1.0, 2);
    auto gx = coordinate_field(0, 2);
    auto rc = yg::parametrized_integrate(one2, {gx}, circle, Box::unit(1), opt);
    CHECK(std::abs(rc.value) <= 1e-12);
}

TEST_CASE("adaptive flag returns a heuristic refinement") {
    const Box box = Box::interval(0.0, 2.0 * std::numbers::pi);
    ScalarField fs;
    fs.eval = [](std::span<const double> x) { return std::sin(x[0]); };
    fs.exponent = 1.0;
    fs.holder_bound = 1.0;
    fs.certified = true;
    FieldTuple g;
    g.domain = box;
    ScalarField gc;
    gc.eval = [](std::span<const double> x) { return std::cos(x[0]); };
    gc.exponent = 1.0;
    gc.holder_bound = 1.0;
    gc.certified = true;
    g.fields.push_back(gc);
    yg::IntegrateOptions opt;
    opt.adaptive = true;
    opt.tol = 1e-7;
    opt.k_max = 16;
    auto r = yg::integrate(fs, g, box, opt);
    CHECK_FALSE(r.certified);
    CHECK(r.value == doctest::Approx(-std::numbers::pi).epsilon(1e-4));
}
