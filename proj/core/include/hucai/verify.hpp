#pragma once

// Numerical verification of the gradient-equation derivation: pointwise
// algebraic identities, Cramer reconstruction of the Hessian, weak residuals
// of the v- and ln v-equations, the De Giorgi level-set profile and the
// recursive-sequence lemma, plus an operator convergence harness.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hucai/grid.hpp"
#include "hucai/model.hpp"

namespace hucai {

/// Analytic p*, m* with closed-form first and second derivatives. The source
/// s* = -div(A(m*) grad p*) is derived from them, so the pressure equation
/// holds exactly. `box` is a subdomain on which v* >= v_floor.
struct ManufacturedCase {
    std::string name;
    std::function<double(double, double)> p;
    std::function<Vec2(double, double)> grad_p;
    std::function<Mat2(double, double)> hess_p;
    std::function<Vec2(double, double)> m;
    std::function<Mat2(double, double)> grad_m;  ///< entry (i,j) = d m_j / d x_i
    double box_x0 = 0.0, box_x1 = 1.0, box_y0 = 0.0, box_y1 = 1.0;
    double v_floor = 1e-2;
    bool vanishes_on_boundary = true;

    PointJet jet(double x, double y) const;
    double s(double x, double y) const;
    double v(double x, double y) const;

    ScalarField sample_p(const Grid2D& g) const;
    VectorField2 sample_m(const Grid2D& g) const;
    ScalarField sample_s(const Grid2D& g) const;

    /// p* = sin(pi x) sin(pi y) exp(a x + b y),
    /// m* = (c1 sin(pi x) sin(pi y), c2 sin(2 pi x) sin(pi y)).
    static ManufacturedCase smooth(double a = 0.3, double b = -0.2, double c1 = 0.8, double c2 = 0.5);
    /// m constant, p affine (does not vanish on the boundary); v is constant.
    static ManufacturedCase affine(Vec2 m, Vec2 grad_p, double p0 = 0.0);
    /// m constant, p quadratic with the given Hessian and gradient at the origin.
    static ManufacturedCase quadratic(Vec2 m, Mat2 hess, Vec2 grad0);
};

/// Uniform random points in [x0,x1] x [y0,y1] (std::mt19937_64 with `seed`).
std::vector<Vec2> random_points(std::size_t n, std::uint64_t seed, double x0 = 0.0, double x1 = 1.0,
                                double y0 = 0.0, double y1 = 1.0);

/// Max relative error of A hess(p) A = w A + det(A) M with w = A : hess(p)
/// and M = [[-p_yy, p_xy], [p_xy, -p_xx]], evaluated with analytic derivatives.
double hessian_identity_check(const ManufacturedCase& c, const std::vector<Vec2>& points);

/// Coefficient matrix of the linear system for (p_xx, p_xy, p_yy):
///   2 nu1 p_xx + 2 nu2 p_xy            = e1
///            2 nu1 p_xy + 2 nu2 p_yy   = e2
///   a11 p_xx + 2 a12 p_xy + a22 p_yy   = w
struct HessianSystem {
    double M[3][3];
    double rhs[3];
};
HessianSystem hessian_system(const PointAux& aux);
/// The same system with the second row read as 2 nu1 p_xy + 2 nu2 = e2.
HessianSystem hessian_system_printed(const PointAux& aux);
/// Cramer's rule; throws InvalidArgument when the determinant vanishes.
std::array<double, 3> cramer_solve(const HessianSystem& sys);

struct CramerReport {
    double det_rel_error = 0.0;            ///< det E vs 4 det(A) v
    double reconstruction_rel_error = 0.0; ///< Hessian from the consistent system
    double printed_rel_error = 0.0;        ///< Hessian from the printed second row
    std::size_t points_used = 0;
};
/// Points with v < v_floor are skipped.
CramerReport cramer_check(const ManufacturedCase& c, const std::vector<Vec2>& points, double v_floor = 1e-2);

/// Smooth compactly supported tensor-product bump exp(1 - 1/(1-t^2)) per axis.
struct TestFunction {
    double cx, cy, r;
    double value(double x, double y) const;
    Vec2 gradient(double x, double y) const;
};
/// Five bumps at three scales inside the case's box.
std::vector<TestFunction> box_test_functions(const ManufacturedCase& c);

struct ResidualLevel {
    int cells = 0;
    double residual = 0.0;  ///< max over test functions of |R(psi)| / (sum of |terms|)
    double gradient_identity_error = 0.0;  ///< max |grad ln v - G - E/v| over the box (phi only)
};

struct ResidualStudy {
    std::vector<ResidualLevel> levels;
    std::vector<double> orders;         ///< log2 ratio of successive residuals
    std::vector<double> gradient_ratios;///< successive ratios of gradient_identity_error
    double min_order() const;
};

/// Weak residual of div((1/v) A grad v) = (1/v) H.grad v + h + div K:
///   R(psi) = int (1/v) A grad v . grad psi + (1/v)(H . grad v) psi + h psi - K . grad psi
/// on sampled p*, m*, s* with every derivative taken discretely.
/// Throws InvalidArgument if v < v_floor somewhere in the box.
ResidualStudy v_equation_residual(const ManufacturedCase& c, const std::vector<int>& cells);

/// Same for phi = ln v:  R(psi) = int A grad phi . grad psi + (H . grad phi) psi + h psi - K . grad psi,
/// and the pointwise error of grad phi = G + E/v over the box.
ResidualStudy phi_equation_residual(const ManufacturedCase& c, const std::vector<int>& cells);

/// Inputs of the Gamma constant: m and the auxiliary H, h, K fields.
struct GammaInputs {
    VectorField2 m;
    VectorField2 H;
    ScalarField h;
    VectorField2 K;
};

struct DeGiorgiLevel {
    int n = 0;
    double R_n = 0.0;
    double K_n = 0.0;
    double measure = 0.0;  ///< |S_n|: area of {x in B_{R_{n-1}} : v >= K_n} (n >= 1), of B_{R_0} ∩ {v >= K_0} for n = 0
    double y_n = 0.0;
};

struct DeGiorgiReport {
    Vec2 x0;
    double R = 0.0;
    double r = 0.0;
    double K = 0.0;
    double c = 1.0;            ///< constant used in the K formula
    bool K_from_formula = false;
    double Gamma = 0.0;
    double y0 = 0.0;
    double sup_half_ball = 0.0;
    bool sup_bounded = false;  ///< sup over B_{R/2} of v <= K
    std::vector<DeGiorgiLevel> levels;
    /// Fit of log y_{n+1} - (1+alpha) log y_n = log c + n log b with alpha = 1.
    double fit_c = 0.0;
    double fit_b = 0.0;
    double fit_alpha = 1.0;
    std::size_t fit_points = 0;
    bool nonincreasing = true; ///< y_n nonincreasing for n >= 1
};

/// De Giorgi profile of v on B_R(x0). Without K, K solves
///   K = c/R^2 y0(K) (Gamma(K) + R^(2(r-1)/r)) + 2
/// and c is doubled from 1 until y_N < 1e-12 (at most 60 doublings).
/// `gamma` may be null, in which case Gamma = 0.
/// Throws InvalidArgument if the ball leaves the grid or {v >= K_0} ∩ B_R is empty.
DeGiorgiReport de_giorgi_profile(const ScalarField& v, Vec2 x0, double R, const Params& params,
                                 std::optional<double> K = std::nullopt,
                                 const GammaInputs* gamma = nullptr, int N = 40);

void write_degiorgi_csv(const std::filesystem::path& path, const DeGiorgiReport& rep);

enum class SequenceVerdict { Converges, Diverges, Undetermined };
const char* to_string(SequenceVerdict v);

struct SequenceReport {
    std::vector<double> y;  ///< y_0 .. y_N, iterated as equality
    double threshold = 0.0; ///< c^(-1/alpha) b^(-1/alpha^2)
    bool below_threshold = false;
    SequenceVerdict verdict = SequenceVerdict::Undetermined;
    double raw_rel_diff = 0.0;  ///< first terms: normalized vs direct iteration
};

/// y_{n+1} = c b^n y_n^(1+alpha). Iterated through z_n = y_n b^(n/alpha) / threshold,
/// which obeys z_{n+1} = z_n^(1+alpha) and stays exact at the threshold.
SequenceReport ynb_sequence(double c, double b, double alpha, double y0, int N = 200);

struct OrderRow {
    std::string name;
    std::vector<int> cells;
    std::vector<double> errors;
    std::vector<double> orders;
};

/// Observed orders for gradient, hessian, div_anisotropic, the pressure solve
/// and one coupled step (the last by self-convergence against the next grid).
std::vector<OrderRow> mms_convergence(const ManufacturedCase& c, const std::vector<int>& cells);

/// log2(e[k] / e[k+1]) for successive entries; 0 errors give +inf.
std::vector<double> observed_orders(const std::vector<double>& errors);

}  // namespace hucai
