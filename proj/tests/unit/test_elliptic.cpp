#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hucai/elliptic.hpp"
#include "hucai/error.hpp"
#include "hucai/model.hpp"
#include "hucai/profiles.hpp"

using namespace hucai;
namespace {

constexpr double kPi = std::numbers::pi;

double l2_error(const ScalarField& p, const std::function<double(double, double)>& exact) {
    ScalarField d = p;
    for (int j = 0; j < p.grid.ny; ++j)
        for (int i = 0; i < p.grid.nx; ++i) d(i, j) -= exact(p.grid.x(i), p.grid.y(j));
    return lp_norm(d, 2.0);
}

// p* = x(1-x)y(1-y), m* = (0.6 sin(pi x) sin(pi y), x y)
struct Mms {
    static double p(double x, double y) { return x * (1 - x) * y * (1 - y); }
    static double s(double x, double y) {
        const double px = (1 - 2 * x) * y * (1 - y), py = x * (1 - x) * (1 - 2 * y);
        const double pxx = -2 * y * (1 - y), pyy = -2 * x * (1 - x), pxy = (1 - 2 * x) * (1 - 2 * y);
        const double m1 = 0.6 * std::sin(kPi * x) * std::sin(kPi * y), m2 = x * y;
        const double m1x = 0.6 * kPi * std::cos(kPi * x) * std::sin(kPi * y);
        const double m1y = 0.6 * kPi * std::sin(kPi * x) * std::cos(kPi * y);
        const double m2x = y, m2y = x;
        const double divm = m1x + m2y;
        const double c1 = divm * m1 + m1 * m1x + m2 * m1y;
        const double c2 = divm * m2 + m1 * m2x + m2 * m2y;
        const double a11 = 1 + m1 * m1, a12 = m1 * m2, a22 = 1 + m2 * m2;
        return -(a11 * pxx + 2 * a12 * pxy + a22 * pyy + c1 * px + c2 * py);
    }
    static Matrix2Field A(const Grid2D& g) {
        return conductivity(VectorField2::sample(g, [](double x, double y) {
                   return Vec2{0.6 * std::sin(kPi * x) * std::sin(kPi * y), x * y};
               })).A;
    }
};

}  // namespace

TEST(Pressure, ZeroSourceGivesZero) {
    const Grid2D g = Grid2D::unit_square(16);
    const PressureSolution sol = solve_pressure(assemble_pressure_system(Mms::A(g), ScalarField(g)));
    EXPECT_EQ(max_abs(sol.p), 0.0);
    const InitialPressure ip = solve_p0(VectorField2(g), ScalarField(g));
    EXPECT_EQ(ip.sup_grad_p0, 0.0);
}

TEST(Pressure, PoissonSecondOrder) {
    auto exact = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = Grid2D::unit_square(n);
        const ScalarField s = ScalarField::sample(g, [&](double x, double y) { return 2 * kPi * kPi * exact(x, y); });
        const InitialPressure ip = solve_p0(VectorField2(g), s);
        EXPECT_LE(ip.relative_residual, 1e-10);
        const double e = l2_error(ip.p0, exact);
        if (prev > 0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
        prev = e;
    }
}

TEST(Pressure, ManufacturedAnisotropicSecondOrder) {
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = Grid2D::unit_square(n);
        const PressureSolution sol =
            solve_pressure(assemble_pressure_system(Mms::A(g), ScalarField::sample(g, Mms::s)));
        EXPECT_LE(sol.relative_residual, 1e-10);
        for (int i = 0; i < g.nx; ++i) EXPECT_EQ(sol.p(i, 0), 0.0);
        const double e = l2_error(sol.p, Mms::p);
        if (prev > 0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
        prev = e;
    }
}

TEST(Pressure, MaximumPrincipleAndEnergy) {
    const Grid2D g = Grid2D::unit_square(32);
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return std::exp(-20 * ((x - .4) * (x - .4) + (y - .6) * (y - .6))); });
    const Matrix2Field A = Mms::A(g);
    SolverOptions opt;
    const PressureSolution sol = solve_pressure(assemble_pressure_system(A, s, opt));
    double pmin = 0;
    for (double v : sol.p.values) pmin = std::min(pmin, v);
    EXPECT_GE(pmin, -10 * opt.tol);
    EXPECT_NEAR(anisotropic_energy(A, sol.p), inner(s, sol.p), 1e-8 * inner(s, sol.p));
}

TEST(Pressure, ReflectionSymmetry) {
    const Grid2D g = Grid2D::unit_square(24);
    // m symmetric under x -> 1 - x  means m1 odd, m2 even about x = 1/2
    const VectorField2 m = conductance_profile("sine", g, 1.0);
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return std::exp(-10 * ((x - .5) * (x - .5) + (y - .3) * (y - .3))); });
    const InitialPressure ip = solve_p0(m, s);
    double asym = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) asym = std::max(asym, std::abs(ip.p0(i, j) - ip.p0(g.nx - 1 - i, j)));
    EXPECT_LE(asym, 1e-9 * max_abs(ip.p0));
}

TEST(Pressure, IterationLimitReportsHistory) {
    const Grid2D g = Grid2D::unit_square(32);
    SolverOptions opt;
    opt.max_iter = 3;
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return 1.0 + x * y; });
    try {
        solve_pressure(assemble_pressure_system(Mms::A(g), s, opt));
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.residual_history().size(), 3u);
    }
}

TEST(Pressure, ResidualIsTrueResidual) {
    const Grid2D g = Grid2D::unit_square(64);
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return 1.0 + x * y; });
    const LinearSystem sys = assemble_pressure_system(Mms::A(g), s);
    const PressureSolution sol = solve_pressure(sys);
    ScalarField r = sys.op.apply(sol.p);
    for (std::size_t k = 0; k < r.values.size(); ++k) r[k] = sys.rhs[k] - r[k];
    const double true_res = std::sqrt(interior_dot(r, r) / interior_dot(sys.rhs, sys.rhs));
    EXPECT_LE(true_res, sys.options.tol);
    EXPECT_NEAR(true_res, sol.relative_residual, 1e-14);
}

TEST(Pressure, UnreachableToleranceStopsEarly) {
    const Grid2D g = Grid2D::unit_square(64);
    SolverOptions opt;
    opt.tol = 1e-17;  // below round-off
    const ScalarField s = ScalarField::sample(g, [](double x, double y) { return 1.0 + x * y; });
    try {
        solve_pressure(assemble_pressure_system(Mms::A(g), s, opt));
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_NE(std::string(e.what()).find("stagnated"), std::string::npos) << e.what();
        EXPECT_LT(e.residual_history().size(), 5000u);
    }
}

TEST(Pressure, RejectsNonzeroBoundaryConductance) {
    const Grid2D g = Grid2D::unit_square(8);
    const VectorField2 m(g, 0.1);
    EXPECT_THROW(solve_p0(m, ScalarField(g)), InvalidArgument);
}
