#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dipolar/gn_solver.hpp"
#include "helpers.hpp"
#include "oracles/townes.hpp"

using namespace dipolar;

namespace {

// Small single-scene options keep the unit tests fast; the acceptance
// gate runs the full refinement trail.
GNOptions quick() {
    GNOptions o;
    o.scenes = {{96, 20.0}};
    o.extra_scene = {0, 0.0};
    return o;
}

} // namespace

TEST_CASE("trivial regime is rejected") {
    CHECK_THROWS_AS(compute_gn_constant(-1, 0), GNConditionViolated);
    CHECK_THROWS_AS(compute_gn_constant(0, 0), GNConditionViolated);
    CHECK_THROWS_AS(compute_gn_constant(-2, 2), GNConditionViolated); // a+b/2=-1, a-b/2=-3
}

TEST_CASE("radial shooting oracle sanity") {
    oracles::TownesOracle t = oracles::townes_oracle();
    CHECK(t.mass_sq == Catch::Approx(11.7009).epsilon(1e-3));
    CHECK(t.C_gn > 0.1704);
    CHECK(t.C_gn < 0.1714);
}

TEST_CASE("classical constant matches the shooting oracle") {
    GNResult r = compute_gn_constant(1, 0, quick());
    oracles::TownesOracle t = oracles::townes_oracle();
    CHECK(r.C == Catch::Approx(t.C_gn).epsilon(0.01));
    CHECK(r.residual < 1e-5);
}

TEST_CASE("homogeneity in (a, b)") {
    GNOptions o = quick();
    GNResult r1 = compute_gn_constant(1, 0, o);
    GNResult r2 = compute_gn_constant(2, 0, o);
    CHECK(r2.C / r1.C == Catch::Approx(2.0).epsilon(1e-6));
    GNResult r3 = compute_gn_constant(0.65, 0.91, o);
    GNResult r4 = compute_gn_constant(1.3, 1.82, o);
    CHECK(r4.C / r3.C == Catch::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("axis-swap symmetry in b") {
    GNOptions o = quick();
    GNResult rp = compute_gn_constant(1, 1, o);
    GNResult rm = compute_gn_constant(1, -1, o);
    CHECK(rp.C == Catch::Approx(rm.C).epsilon(1e-6));
}

TEST_CASE("monotone in a at fixed b") {
    GNOptions o = quick();
    double prev = 0.0;
    for (double a : {0.8, 1.0, 1.2}) {
        GNResult r = compute_gn_constant(a, 1.0, o);
        CHECK(r.C > prev);
        prev = r.C;
    }
}

TEST_CASE("optimizer normalization and saturation") {
    GNResult r = compute_gn_constant(1, 0.6, quick());
    double M = mass(r.optimizer);
    double T = grad_norm_sq(forward_transform(r.optimizer));
    CHECK(M == Catch::Approx(1.0).epsilon(1e-8));
    CHECK(T == Catch::Approx(1.0).epsilon(1e-8));
    // equality case of the inequality at the optimizer
    double F = fab_energy(density(r.optimizer), 1, 0.6);
    CHECK(F == Catch::Approx(r.C).epsilon(1e-6));
    CHECK(F > 0);
    double margin = verify_inequality(r.optimizer, 1, 0.6, r.C);
    CHECK(std::abs(margin) < 1e-6);
}

TEST_CASE("inequality holds on random fields with the computed constant") {
    GNResult r = compute_gn_constant(1, 0, quick());
    Grid2D g = make_grid(64, 64, 16, 16);
    std::mt19937 seeds(55);
    for (int trial = 0; trial < 100; ++trial) {
        WaveField u = helpers::random_smooth(g, seeds());
        CHECK(verify_inequality(u, 1, 0, r.C) >= -1e-6);
    }
}

TEST_CASE("Gaussian is strictly inside the inequality") {
    // quotient of e^{-|x|^2/2} is exactly 1/(2 pi), about 7% below C(1,0)
    Grid2D g = make_grid(128, 128, 20, 20);
    WaveField u = helpers::gaussian(g, 1, 1);
    double M = mass(u);
    double T = grad_norm_sq(forward_transform(u));
    double F = fab_energy(density(u), 1, 0);
    CHECK(F / (T * M) == Catch::Approx(1.0 / (2 * M_PI)).epsilon(1e-9));
    GNResult r = compute_gn_constant(1, 0, quick());
    CHECK(r.C - F / (T * M) == Catch::Approx(0.0118).margin(0.001));
}

TEST_CASE("refinement trail is recorded") {
    GNOptions o;
    o.scenes = {{64, 18.0}, {96, 20.0}};
    o.extra_scene = {0, 0.0};
    GNResult r = compute_gn_constant(1, 0, o);
    REQUIRE(r.grid_study.size() >= 2);
    CHECK(r.grid_study.front().n == 64);
    CHECK(r.err >= 0.0);
    CHECK(r.err < 1e-3 * r.C);
}

TEST_CASE("repeated runs are bit-identical") {
    GNOptions o = quick();
    GNResult r1 = compute_gn_constant(1.1, -0.7, o);
    GNResult r2 = compute_gn_constant(1.1, -0.7, o);
    CHECK(r1.C == r2.C);
    CHECK(r1.residual == r2.residual);
}

TEST_CASE("verify_inequality input validation") {
    Grid2D g = make_grid(16, 16, 8, 8);
    WaveField z(g);
    CHECK_THROWS_AS(verify_inequality(z, 1, 0, 0.17), std::invalid_argument);
}
