#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hucai/error.hpp"
#include "hucai/grid.hpp"

using namespace hucai;
namespace {

constexpr double kPi = std::numbers::pi;

double max_err(const ScalarField& a, const std::function<double(double, double)>& exact,
               bool interior_only = false) {
    const Grid2D& g = a.grid;
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (interior_only && g.on_boundary(i, j)) continue;
            e = std::max(e, std::abs(a(i, j) - exact(g.x(i), g.y(j))));
        }
    return e;
}

Matrix2Field smooth_spd(const Grid2D& g) {
    return Matrix2Field::sample(g, [](double x, double y) {
        const Vec2 m{std::sin(kPi * x) * std::cos(y), 0.5 + x * y};
        return Mat2::identity() + Mat2::outer(m, m);
    }, true);
}

ScalarField random_interior(const Grid2D& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) f(i, j) = u(rng);
    return f;
}

}  // namespace

TEST(Grid, IndexingIsRowMajor) {
    const Grid2D g = Grid2D::unit_square(4);
    EXPECT_EQ(g.nx, 5);
    EXPECT_DOUBLE_EQ(g.hx, 0.25);
    EXPECT_EQ(g.index(2, 3), 3u * 5u + 2u);
    EXPECT_TRUE(g.on_boundary(0, 2));
    EXPECT_FALSE(g.on_boundary(2, 2));
}

TEST(Grid, RejectsDegenerateGrids) {
    EXPECT_THROW(Grid2D::unit_square(1).validate(), InvalidArgument);
    EXPECT_THROW(Grid2D::rectangle(2, 5, 1.0, 1.0).validate(), InvalidArgument);
    EXPECT_THROW(gradient(ScalarField(Grid2D{2, 2, 1.0, 1.0})), InvalidArgument);
}

TEST(Grid, AffineFieldsAreDifferentiatedExactly) {
    const Grid2D g = Grid2D::rectangle(7, 9, 1.5, 2.0, -0.3, 0.1);
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return 3 * x - 2 * y + 1; });
    const VectorField2 gr = gradient(f);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(gr.c1[k], 3.0, 1e-12);
        EXPECT_NEAR(gr.c2[k], -2.0, 1e-12);
    }
    EXPECT_LT(max_abs(magnitude(hessian(f))), 1e-9);
}

TEST(Grid, QuadraticHessianIsExact) {
    const Grid2D g = Grid2D::unit_square(8);
    const ScalarField f = ScalarField::sample(g, [](double x, double y) { return x * x + 3 * x * y - y * y; });
    const Matrix2Field H = hessian(f);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(H.a11[k], 2.0, 1e-9);
        EXPECT_NEAR(H.a12[k], 3.0, 1e-9);
        EXPECT_NEAR(H.a21[k], 3.0, 1e-9);
        EXPECT_NEAR(H.a22[k], -2.0, 1e-9);
    }
}

TEST(Grid, DerivativesAreSecondOrder) {
    auto f = [](double x, double y) { return std::sin(2 * x + 1) * std::exp(y); };
    auto fx = [](double x, double y) { return 2 * std::cos(2 * x + 1) * std::exp(y); };
    auto fxy = [](double x, double y) { return 2 * std::cos(2 * x + 1) * std::exp(y); };
    auto fxx = [](double x, double y) { return -4 * std::sin(2 * x + 1) * std::exp(y); };
    double prev_g = 0, prev_h = 0, prev_m = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = Grid2D::unit_square(n);
        const ScalarField s = ScalarField::sample(g, f);
        const double eg = max_err(gradient(s).component(1), fx);
        const Matrix2Field H = hessian(s);
        ScalarField hxx(g), hxy(g);
        hxx.values = H.a11;
        hxy.values = H.a12;
        const double eh = max_err(hxx, fxx);
        const double em = max_err(hxy, fxy);
        if (prev_g > 0) {
            EXPECT_NEAR(std::log2(prev_g / eg), 2.0, 0.25);
            EXPECT_NEAR(std::log2(prev_h / eh), 2.0, 0.25);
            EXPECT_NEAR(std::log2(prev_m / em), 2.0, 0.25);
        }
        prev_g = eg, prev_h = eh, prev_m = em;
    }
}

TEST(Grid, JacobianConvention) {
    const Grid2D g = Grid2D::unit_square(6);
    const VectorField2 F = VectorField2::sample(g, [](double x, double y) { return Vec2{2 * x, 5 * x + 7 * y}; });
    const Mat2 J = jacobian(F).at(3, 3);
    EXPECT_NEAR(J.a11, 2.0, 1e-12);  // d F1 / dx
    EXPECT_NEAR(J.a12, 5.0, 1e-12);  // d F2 / dx
    EXPECT_NEAR(J.a21, 0.0, 1e-12);
    EXPECT_NEAR(J.a22, 7.0, 1e-12);
}

TEST(Stencil, IdentityGivesFivePointLaplacian) {
    const Grid2D g = Grid2D::unit_square(8);
    const Stencil9 st = anisotropic_stencil(Matrix2Field::identity(g));
    const std::size_t k = g.index(4, 4);
    const double h2 = g.hx * g.hx;
    EXPECT_NEAR(st.coef(k, Stencil9::C), 4.0 / h2, 1e-9);
    for (auto s : {Stencil9::W, Stencil9::E, Stencil9::S, Stencil9::N}) EXPECT_NEAR(st.coef(k, s), -1.0 / h2, 1e-9);
    for (auto s : {Stencil9::SW, Stencil9::SE, Stencil9::NW, Stencil9::NE}) EXPECT_EQ(st.coef(k, s), 0.0);
}

TEST(Stencil, SymmetricAndCoercive) {
    const Grid2D g = Grid2D::rectangle(21, 17, 1.0, 0.8);
    const Stencil9 M = anisotropic_stencil(smooth_spd(g));
    const Stencil9 L = anisotropic_stencil(Matrix2Field::identity(g));
    std::mt19937 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarField x = random_interior(g, rng);
        const ScalarField y = random_interior(g, rng);
        const ScalarField Mx = M.apply(x), My = M.apply(y), Lx = L.apply(x);
        double xMy = 0, yMx = 0, xMx = 0, xLx = 0, nx = 0, ny = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            xMy += x[k] * My[k];
            yMx += y[k] * Mx[k];
            xMx += x[k] * Mx[k];
            xLx += x[k] * Lx[k];
            nx += x[k] * x[k];
            ny += y[k] * y[k];
        }
        EXPECT_LE(std::abs(xMy - yMx), 1e-12 * std::sqrt(nx * ny));
        EXPECT_GE(xMx, xLx * (1.0 - 1e-12));
    }
}

TEST(Stencil, EnergyMatchesOperator) {
    const Grid2D g = Grid2D::unit_square(12);
    const Matrix2Field A = smooth_spd(g);
    std::mt19937 rng(3);
    const ScalarField x = random_interior(g, rng);
    const ScalarField Mx = anisotropic_stencil(A).apply(x);
    double q = 0;
    for (std::size_t k = 0; k < g.size(); ++k) q += x[k] * Mx[k];
    EXPECT_NEAR(q * g.hx * g.hy, anisotropic_energy(A, x), 1e-10 * std::abs(q * g.hx * g.hy));
}

TEST(Stencil, RejectsNonElliptic) {
    const Grid2D g = Grid2D::unit_square(4);
    Matrix2Field A = Matrix2Field::identity(g);
    A.a11[g.index(2, 2)] = 0.5;
    EXPECT_THROW(anisotropic_stencil(A), InvalidArgument);
    Matrix2Field B = Matrix2Field::identity(g);
    B.a12[g.index(2, 2)] = 0.1;
    EXPECT_THROW(anisotropic_stencil(B), InvalidArgument);
}

TEST(Stencil, DivAnisotropicSecondOrder) {
    auto f = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
    // A = I + m m^T with m = (x, y): div(A grad f) computed symbolically below
    auto exact = [](double x, double y) {
        const double s1 = std::sin(kPi * x), c1 = std::cos(kPi * x);
        const double s2 = std::sin(kPi * y), c2 = std::cos(kPi * y);
        const double fx = kPi * c1 * s2, fy = kPi * s1 * c2;
        const double fxx = -kPi * kPi * s1 * s2, fyy = fxx, fxy = kPi * kPi * c1 * c2;
        const double a11 = 1 + x * x, a12 = x * y, a22 = 1 + y * y;
        // column divergences of A: (3x, 3y)
        return a11 * fxx + 2 * a12 * fxy + a22 * fyy + 3 * x * fx + 3 * y * fy;
    };
    double prev = 0;
    for (int n : {32, 64, 128}) {
        const Grid2D g = Grid2D::unit_square(n);
        const Matrix2Field A = Matrix2Field::sample(g, [](double x, double y) {
            return Mat2::identity() + Mat2::outer({x, y}, {x, y});
        }, true);
        const double e = max_err(div_anisotropic(A, ScalarField::sample(g, f)), exact);
        if (prev > 0) EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
        prev = e;
    }
}

TEST(Norms, TrapezoidQuadrature) {
    const Grid2D g = Grid2D::unit_square(10);
    const ScalarField one(g, 1.0);
    EXPECT_NEAR(integrate(one), 1.0, 1e-14);
    EXPECT_NEAR(lp_norm(one, 3.0), 1.0, 1e-14);
    const ScalarField f = ScalarField::sample(g, [](double x, double) { return x - 0.7; });
    EXPECT_NEAR(lp_norm(f, kInfinity), 0.7, 1e-14);
    EXPECT_THROW(lp_norm(f, 0.5), InvalidArgument);
    NodeMask none(g.size(), 0);
    EXPECT_THROW(lp_norm(f, 2.0, none), InvalidArgument);
}

TEST(Norms, InterpolationInequalityHolds) {
    const Grid2D g = Grid2D::unit_square(32);
    const ScalarField u = ScalarField::sample(g, [](double x, double y) { return std::exp(-10 * ((x - .3) * (x - .3) + y * y)); });
    for (double eps : {0.1, 0.5, 1.0, 2.0}) {
        const InterpolationSides s = interpolation_inequality(u, 1.0, 2.0, 4.0, eps);
        EXPECT_LE(s.lhs, s.rhs);
    }
}

TEST(Calculus, ProductRulesConverge) {
    double prev = 0;
    for (int n : {16, 32, 64}) {
        const Grid2D g = Grid2D::unit_square(n);
        const VectorField2 F = VectorField2::sample(g, [](double x, double y) { return Vec2{std::sin(x + y), x * y * y}; });
        const VectorField2 G = VectorField2::sample(g, [](double x, double y) { return Vec2{std::cos(2 * x), std::exp(y)}; });
        const Matrix2Field A = Matrix2Field::sample(g, [](double x, double y) {
            return Mat2{1 + x * x, std::sin(y), std::sin(y), 2 + y};
        }, true);
        const ScalarField p = ScalarField::sample(g, [](double x, double y) { return x * std::cos(y); });
        const CalculusResiduals r = calculus_identities_check(F, G, A, p);
        const double e = std::max({r.form1, r.form2, r.form3, r.form4});
        if (prev > 0) EXPECT_GT(prev / e, 3.0);
        prev = e;
    }
}
