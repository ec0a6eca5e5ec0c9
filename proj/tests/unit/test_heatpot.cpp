#include <gtest/gtest.h>

#include <cmath>

#include "hucai/error.hpp"
#include "hucai/heatpot.hpp"
#include "hucai/profiles.hpp"

using namespace hucai;

namespace {

HeatSource manufactured(double w, double alpha, double res_factor) {
    return manufactured_duhamel_source(w, alpha, res_factor);
}

}  // namespace

TEST(HeatPot, KernelNormalization) {
    HeatPotentialConfig cfg;
    const HeatSource c = HeatSource::constant({1.0, -2.0});
    for (double t : {1e-3, 0.1, 1.0}) {
        const PotentialValue v = heat_potential_at(c, 0.3, 0.4, t, cfg);
        EXPECT_NEAR(v.u.x / t, 1.0, 1e-6);
        EXPECT_NEAR(v.u.y / t, -2.0, 2e-6);
        EXPECT_LE(frobenius(v.grad_u), 1e-6);
    }
}

TEST(HeatPot, MatchesManufacturedSolution) {
    HeatPotentialConfig cfg;
    const HeatSource s = manufactured(0.1, 1.0, 3.0);
    const double t = 0.2, x = 0.53, y = 0.46;
    const double exact = manufactured_duhamel_solution(x, y, t, 0.1).x;
    const PotentialValue v = heat_potential_at(s, x, y, t, cfg);
    EXPECT_NEAR(v.u.x, exact, 2e-3 * exact);
    EXPECT_NEAR(v.u.y, -0.5 * exact, 2e-3 * exact);
    // analytic gradient of t g
    const double gx = -2.0 * (x - 0.5) / 0.01 * exact;
    EXPECT_NEAR(v.grad_u.a11, gx, 5e-3 * std::abs(gx));
}

TEST(HeatPot, ResidualDecreasesUnderRefinement) {
    const std::vector<Vec2> pts{{0.5, 0.5}, {0.58, 0.46}};
    const std::vector<double> ts{0.2};
    double prev = 0.0;
    for (int l = 0; l < 3; ++l) {
        HeatPotentialConfig cfg;
        cfg.panels_per_octave = 4 << l;
        cfg.points_per_sigma = 2.0 * (1 << l);
        const HeatSource s = manufactured(0.1, 1.0, 1.5 * (1 << l));
        const double r = heat_residual_check(s, cfg, pts, ts, 0.02 / (1 << l), 0.01 / (1 << l));
        if (l > 0) EXPECT_GE(prev / r, 2.0) << "level " << l;
        prev = r;
    }
}

TEST(HeatPot, ZeroSourceAndLinearity) {
    HeatPotentialConfig cfg;
    cfg.panels_per_octave = 4;
    const HeatSource zero = HeatSource::constant({0.0, 0.0});
    const PotentialValue z = heat_potential_at(zero, 0.4, 0.6, 0.3, cfg);
    EXPECT_EQ(z.u.x, 0.0);
    EXPECT_EQ(z.u.y, 0.0);

    const HeatSource a = manufactured(0.1, 1.0, 2.0);
    HeatSource b = HeatSource::constant({0.7, 1.3});
    b.resolution = a.resolution;  // same quadrature nodes for all three
    HeatSource sum = a;
    sum.f = [fa = a.f, fb = b.f](double x, double y, double t) { return 2.0 * fa(x, y, t) - 3.0 * fb(x, y, t); };
    sum.support.reset();
    HeatSource a_whole = a;
    a_whole.support.reset();
    const double t = 0.05;
    const Vec2 ua = heat_potential_at(a_whole, 0.45, 0.55, t, cfg).u;
    const Vec2 ub = heat_potential_at(b, 0.45, 0.55, t, cfg).u;
    const Vec2 us = heat_potential_at(sum, 0.45, 0.55, t, cfg).u;
    EXPECT_NEAR(us.x, 2.0 * ua.x - 3.0 * ub.x, 1e-12);
    EXPECT_NEAR(us.y, 2.0 * ua.y - 3.0 * ub.y, 1e-12);
}

TEST(HeatPot, FramesInterpolateBilinearly) {
    const Grid2D g = Grid2D::unit_square(4);
    VectorField2 a(g), b(g);
    for (std::size_t k = 0; k < a.c1.size(); ++k) {
        a.c1[k] = 1.0;
        b.c1[k] = 3.0;
        b.c2[k] = g.x(static_cast<int>(k % 5));
    }
    const HeatSource s = HeatSource::from_frames({a, b}, {0.0, 1.0});
    EXPECT_DOUBLE_EQ(s.f(0.3, 0.6, 0.5).x, 2.0);
    EXPECT_NEAR(s.f(0.3, 0.6, 1.0).y, 0.3, 1e-15);
    EXPECT_DOUBLE_EQ(s.f(0.3, 0.6, 5.0).x, 3.0);
    EXPECT_EQ(s.f(1.2, 0.6, 0.5).x, 0.0);
    ASSERT_TRUE(s.support.has_value());
    EXPECT_DOUBLE_EQ(s.resolution, 0.25);
    EXPECT_THROW(HeatSource::from_frames({a}, {0.0, 1.0}), InvalidArgument);
    EXPECT_THROW(HeatSource::from_frames({a, b}, {1.0, 1.0}), InvalidArgument);
}

TEST(HeatPot, ZeroSourceGivesUndefinedScaling) {
    HeatSource z = HeatSource::constant({0.0, 0.0});
    HeatPotentialConfig cfg;
    cfg.panels_per_octave = 2;
    const ScalingReport r = potential_gradient_scaling(z, cfg, {1e-3, 1e-2, 1e-1, 1.0}, {{0.5, 0.5}});
    EXPECT_FALSE(r.defined);
    EXPECT_EQ(r.c_fit, 0.0);
}

TEST(HeatPot, ScalingRequiresEnoughTimes) {
    const HeatSource c = HeatSource::constant({1.0, 0.0});
    HeatPotentialConfig cfg;
    EXPECT_THROW(potential_gradient_scaling(c, cfg, {0.1, 0.2, 0.3}, {{0.5, 0.5}}), InvalidArgument);
    EXPECT_THROW(potential_gradient_scaling(c, cfg, {0.1, 0.2, 0.3, 0.4}, {{0.5, 0.5}}), InvalidArgument);
}

TEST(HeatPot, ScalingSlopeForSteadySource) {
    // a compact time-independent source gives |grad u| ~ t for small t
    const HeatSource s = manufactured(0.1, 1.0, 2.0);
    HeatSource steady = s;
    steady.f = [f = s.f](double x, double y, double) { return f(x, y, 0.0); };
    HeatPotentialConfig cfg;
    cfg.panels_per_octave = 4;
    const ScalingReport r =
        potential_gradient_scaling(steady, cfg, {1e-6, 1e-5, 1e-4, 1e-3}, {{0.55, 0.5}});
    ASSERT_TRUE(r.defined);
    EXPECT_NEAR(r.slope, 1.0, 0.05);
    EXPECT_GT(r.c_fit, 0.0);
}

TEST(HeatPot, ConfigValidation) {
    const HeatSource c = HeatSource::constant({1.0, 0.0});
    HeatPotentialConfig cfg;
    EXPECT_THROW(heat_potential_at(c, 0.5, 0.5, 0.0, cfg), InvalidArgument);
    cfg.delta = 3.0;
    EXPECT_THROW(heat_potential_at(c, 0.5, 0.5, 1.0, cfg), InvalidArgument);
    cfg = {};
    cfg.truncation = 3.0;
    EXPECT_THROW(heat_potential_at(c, 0.5, 0.5, 1.0, cfg), InvalidArgument);
}

TEST(HeatPot, ForcingFieldVanishesForZeroConductance) {
    const Grid2D g = Grid2D::unit_square(8);
    const VectorField2 f = forcing_field(VectorField2(g), source_profile("bump", g), Params{});
    EXPECT_EQ(max_abs(magnitude(f)), 0.0);
}

TEST(HeatPot, FixedPointG) {
    const FixedPointG r = fixed_point_g(1e-3, 2.0, 0.0);
    EXPECT_NEAR(r.tau0, std::pow(4e-3, -1.0 / 3.0), 1e-12);
    EXPECT_DOUBLE_EQ(r.g_tau0, g_function(r.tau0, 1e-3, 2.0, 0.0));
    EXPECT_TRUE(r.condition_holds);
    EXPECT_TRUE(r.bound_holds);
    ASSERT_TRUE(r.lower_crossing && r.upper_crossing);
    EXPECT_NEAR(g_function(*r.lower_crossing, 1e-3, 2.0, 0.0), 0.0, 1e-12);
    EXPECT_LT(*r.lower_crossing, r.tau0);
    EXPECT_GT(*r.upper_crossing, r.tau0);

    const FixedPointG bad = fixed_point_g(0.5, 2.0, 1.0);
    EXPECT_FALSE(bad.condition_holds);
    EXPECT_FALSE(bad.lower_crossing.has_value());
    EXPECT_THROW(fixed_point_g(0.0, 2.0, 0.0), InvalidArgument);
    EXPECT_THROW(fixed_point_g(0.1, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(fixed_point_g(0.1, 2.0, -1.0), InvalidArgument);
}
