#pragma once

// Structured rectangular grid, nodal fields and the finite-difference
// operators used throughout the library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hucai/tensor2.hpp"

namespace hucai {

/// Node-centred rectangular grid. Node (i, j) sits at (x0 + i*hx, y0 + j*hy)
/// and is stored at linear index j*nx + i (row-major, x fastest).
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;

    /// [0,1]^2 split into `cells` intervals per axis (cells+1 nodes).
    static Grid2D unit_square(int cells);
    /// [x0, x0+lx] x [y0, y0+ly] with the given node counts.
    static Grid2D rectangle(int nx, int ny, double lx, double ly, double x0 = 0.0,
                            double y0 = 0.0);

    /// Throws InvalidArgument unless nx, ny >= 3 and hx, hy > 0.
    void validate() const;

    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }
    double x(int i) const { return x0 + hx * i; }
    double y(int j) const { return y0 + hy * j; }
    double x_max() const { return x(nx - 1); }
    double y_max() const { return y(ny - 1); }
    bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == nx - 1 || j == ny - 1; }

    /// Trapezoidal quadrature weight of node (i, j).
    double weight(int i, int j) const;

    bool operator==(const Grid2D&) const = default;
};

/// Per-node selection flags (1 = selected).
using NodeMask = std::vector<std::uint8_t>;

struct ScalarField {
    Grid2D grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    /// Samples f(x, y) at every node.
    static ScalarField sample(const Grid2D& g, const std::function<double(double, double)>& f);

    /// Throws InvalidArgument on a size mismatch or a non-finite value.
    void validate() const;
};

struct VectorField2 {
    Grid2D grid;
    std::vector<double> c1;
    std::vector<double> c2;

    VectorField2() = default;
    explicit VectorField2(const Grid2D& g, double fill = 0.0)
        : grid(g), c1(g.size(), fill), c2(g.size(), fill) {}

    Vec2 at(std::size_t k) const { return {c1[k], c2[k]}; }
    Vec2 at(int i, int j) const { return at(grid.index(i, j)); }
    void set(std::size_t k, const Vec2& v) { c1[k] = v.x; c2[k] = v.y; }

    /// Component 1 or 2.
    ScalarField component(int which) const;
    static VectorField2 sample(const Grid2D& g, const std::function<Vec2(double, double)>& f);
    void validate() const;
};

struct Matrix2Field {
    Grid2D grid;
    std::vector<double> a11, a12, a21, a22;
    /// When set, a12 and a21 are required to agree exactly.
    bool symmetric = false;

    Matrix2Field() = default;
    explicit Matrix2Field(const Grid2D& g, bool sym = false)
        : grid(g), a11(g.size(), 0.0), a12(g.size(), 0.0), a21(g.size(), 0.0),
          a22(g.size(), 0.0), symmetric(sym) {}

    Mat2 at(std::size_t k) const { return {a11[k], a12[k], a21[k], a22[k]}; }
    Mat2 at(int i, int j) const { return at(grid.index(i, j)); }
    void set(std::size_t k, const Mat2& m) {
        a11[k] = m.a11; a12[k] = m.a12; a21[k] = m.a21; a22[k] = m.a22;
    }

    static Matrix2Field sample(const Grid2D& g, const std::function<Mat2(double, double)>& f,
                               bool sym = false);
    static Matrix2Field identity(const Grid2D& g);
    void validate() const;
};

// -- first and second derivatives --------------------------------------------
//
// Central differences at interior nodes, second-order one-sided differences
// on the boundary. All of these throw InvalidArgument on grids smaller than
// 3x3.

VectorField2 gradient(const ScalarField& f);
ScalarField divergence(const VectorField2& F);
/// Symmetric Hessian. The mixed derivative is the composition of the x- and
/// y-derivative stencils; pure second derivatives use the 3-point stencil in
/// the interior and the 4-point one-sided stencil on the boundary (3-point
/// when only three nodes exist along an axis).
Matrix2Field hessian(const ScalarField& f);
/// 5-point Laplacian at interior nodes, trace of `hessian` on the boundary.
ScalarField laplacian(const ScalarField& f);
/// Jacobian of a vector field, entry (i,j) = d F_j / d x_i.
Matrix2Field jacobian(const VectorField2& F);
/// Row vector whose j-th entry is the divergence of the j-th column of A.
VectorField2 matrix_divergence(const Matrix2Field& A);

ScalarField x_derivative(const ScalarField& f);
ScalarField y_derivative(const ScalarField& f);

// -- conservative anisotropic operator ---------------------------------------

/// Nine-point stencil stored per node. Only interior rows carry coefficients.
class Stencil9 {
public:
    enum Slot : int { C = 0, W, E, S, N, SW, SE, NW, NE, kSlots };
    static constexpr std::array<int, kSlots> kDi = {0, -1, 1, 0, 0, -1, 1, -1, 1};
    static constexpr std::array<int, kSlots> kDj = {0, 0, 0, -1, 1, -1, -1, 1, 1};

    explicit Stencil9(const Grid2D& g) : grid_(g), coef_(g.size() * kSlots, 0.0) {}

    const Grid2D& grid() const { return grid_; }
    double& coef(std::size_t node, Slot s) { return coef_[node * kSlots + s]; }
    double coef(std::size_t node, Slot s) const { return coef_[node * kSlots + s]; }
    static Slot slot_for(int di, int dj);

    /// y = S x on interior nodes, 0 on the boundary. Boundary values of x
    /// enter through the neighbour coefficients.
    void apply(const ScalarField& x, ScalarField& y) const;
    ScalarField apply(const ScalarField& x) const;

    /// Adds the operator I*shift + scale*S in place, i.e. S <- shift*I + scale*S.
    void scale_and_shift(double scale, double shift);

private:
    Grid2D grid_;
    std::vector<double> coef_;
};

/// Stencil of -div(A grad .) at interior nodes.
///
/// The operator is the Galerkin-style matrix of the bilinear form
///   B(f,g) = sum_faces hx*hy (df)(dg)/h^2 + sum_cells hx*hy (C_c G_c f).(G_c g)
/// where the first sum is the identity part on cell faces (the classical
/// 5-point Laplacian), C_c = A - I averaged arithmetically over the four
/// corners of cell c, and G_c is the cell gradient obtained by averaging the
/// two edge differences in each direction. Symmetric by construction and
/// B(f,f) >= B_I(f,f) whenever A - I is positive semidefinite.
///
/// Throws InvalidArgument if A is not symmetric or has an eigenvalue below
/// 1 - 1e-12 at some node.
Stencil9 anisotropic_stencil(const Matrix2Field& A);

/// Throws InvalidArgument unless A is symmetric with eigenvalues >= 1 - 1e-12.
void require_elliptic(const Matrix2Field& A);

/// div(A grad f): -(anisotropic_stencil(A) f) at interior nodes; on the
/// boundary the expanded form A:grad^2 f + divA . grad f with one-sided
/// stencils.
ScalarField div_anisotropic(const Matrix2Field& A, const ScalarField& f);

/// Discrete Dirichlet energy  sum_faces hx*hy |df/h|^2  (the identity part of B).
double dirichlet_energy(const ScalarField& f);
/// Cell part of B(f,f) for the coefficient A - I given here as `C`.
double cell_energy(const Matrix2Field& C, const ScalarField& f);
/// B(f, f) for the operator of `anisotropic_stencil(A)`.
double anisotropic_energy(const Matrix2Field& A, const ScalarField& f);
/// sum_cells hx*hy * mean_corners (m . G_c f)^2, the discrete integral of (m . grad f)^2.
double projected_gradient_energy(const VectorField2& m, const ScalarField& f);

// -- norms and quadrature ----------------------------------------------------

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Trapezoid-weighted discrete L^p norm over `mask` (all nodes when empty).
/// p = kInfinity returns max |f| over the mask. Throws InvalidArgument for
/// p < 1 or an empty mask.
double lp_norm(const ScalarField& f, double p, const NodeMask& mask = {});

/// Trapezoid-weighted integral of f.
double integrate(const ScalarField& f);
/// Trapezoid-weighted integral of f*g.
double inner(const ScalarField& f, const ScalarField& g);
double max_abs(const ScalarField& f);
/// Pointwise Euclidean norm of a vector field.
ScalarField magnitude(const VectorField2& F);
/// Pointwise Frobenius norm of a matrix field.
ScalarField magnitude(const Matrix2Field& M);

/// Interpolation inequality ||u||_q <= eps ||u||_r + eps^-mu ||u||_l with
/// mu = (1/l - 1/q)/(1/q - 1/r). Returns the two sides.
struct InterpolationSides {
    double lhs;
    double rhs;
    double mu;
};
InterpolationSides interpolation_inequality(const ScalarField& u, double l, double q, double r,
                                            double eps);

// -- product-rule identities -------------------------------------------------

/// Max pointwise residuals of the four product rules
///   (1) grad(F.G)   = gradF G + gradG F
///   (2) div(AF)     = A:gradF + divA F
///   (3) grad(AF)    = gradF A^T + (A_x1 F, A_x2 F)^T
///   (4) div(pA)     = p divA + (grad p)^T A
/// with the left side differentiated as a whole and the right side built from
/// derivatives of the factors.
struct CalculusResiduals {
    double form1 = 0.0;
    double form2 = 0.0;
    double form3 = 0.0;
    double form4 = 0.0;
};

/// Optional analytic derivatives of the factors. Empty fields are replaced by
/// the discrete derivatives.
struct FactorDerivatives {
    Matrix2Field grad_F;
    Matrix2Field grad_G;
    Matrix2Field A_x1;
    Matrix2Field A_x2;
    VectorField2 grad_p;
};

CalculusResiduals calculus_identities_check(const VectorField2& F, const VectorField2& G,
                                            const Matrix2Field& A, const ScalarField& p,
                                            const FactorDerivatives& analytic = {});

}  // namespace hucai
