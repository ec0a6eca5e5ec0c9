#include "hucai/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai {

namespace {

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
    if (!(a == b)) {
        throw InvalidArgument(std::string(what) + ": fields live on different grids");
    }
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw InvalidArgument(std::string(what) + ": non-finite value");
        }
    }
}

// First derivative along one axis. `at(k)` returns the sample k nodes along
// the axis, n is the number of nodes on that axis and pos the position.
template <class At>
double d1(const At& at, int n, int pos, double h) {
    if (pos == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (pos == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    return (at(pos + 1) - at(pos - 1)) / (2.0 * h);
}

template <class At>
double d2(const At& at, int n, int pos, double h) {
    const double h2 = h * h;
    if (pos > 0 && pos < n - 1) return (at(pos + 1) - 2.0 * at(pos) + at(pos - 1)) / h2;
    if (n == 3) return (at(0) - 2.0 * at(1) + at(2)) / h2;
    if (pos == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
    return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
}

ScalarField axis_derivative(const ScalarField& f, bool along_x, bool second) {
    f.grid.validate();
    const Grid2D& g = f.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double value;
            if (along_x) {
                auto at = [&](int k) { return f(k, j); };
                value = second ? d2(at, g.nx, i, g.hx) : d1(at, g.nx, i, g.hx);
            } else {
                auto at = [&](int k) { return f(i, k); };
                value = second ? d2(at, g.ny, j, g.hy) : d1(at, g.ny, j, g.hy);
            }
            out(i, j) = value;
        }
    }
    return out;
}

ScalarField entry(const Matrix2Field& A, const std::vector<double> Matrix2Field::*member) {
    ScalarField f(A.grid);
    f.values = A.*member;
    return f;
}

}  // namespace

// -- Grid2D ------------------------------------------------------------------

Grid2D Grid2D::unit_square(int cells) {
    if (cells < 2) throw InvalidArgument("unit_square: need at least 2 cells per axis");
    return rectangle(cells + 1, cells + 1, 1.0, 1.0);
}

Grid2D Grid2D::rectangle(int nx, int ny, double lx, double ly, double x0, double y0) {
    if (nx < 3 || ny < 3) throw InvalidArgument("Grid2D: nx and ny must be >= 3");
    if (!(lx > 0.0) || !(ly > 0.0)) throw InvalidArgument("Grid2D: extents must be positive");
    Grid2D g;
    g.nx = nx;
    g.ny = ny;
    g.hx = lx / (nx - 1);
    g.hy = ly / (ny - 1);
    g.x0 = x0;
    g.y0 = y0;
    return g;
}

void Grid2D::validate() const {
    if (nx < 3 || ny < 3) {
        std::ostringstream os;
        os << "Grid2D: grid too small (" << nx << "x" << ny << "), need at least 3x3 nodes";
        throw InvalidArgument(os.str());
    }
    if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
        throw InvalidArgument("Grid2D: spacings must be positive and finite");
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) throw InvalidArgument("Grid2D: non-finite origin");
}

double Grid2D::weight(int i, int j) const {
    double w = hx * hy;
    if (i == 0 || i == nx - 1) w *= 0.5;
    if (j == 0 || j == ny - 1) w *= 0.5;
    return w;
}

// -- fields ------------------------------------------------------------------

ScalarField ScalarField::sample(const Grid2D& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

void ScalarField::validate() const {
    grid.validate();
    if (values.size() != grid.size()) throw InvalidArgument("ScalarField: value count != nx*ny");
    require_finite(values, "ScalarField");
}

ScalarField VectorField2::component(int which) const {
    if (which != 1 && which != 2) throw InvalidArgument("VectorField2::component: index must be 1 or 2");
    ScalarField out(grid);
    out.values = which == 1 ? c1 : c2;
    return out;
}

VectorField2 VectorField2::sample(const Grid2D& g, const std::function<Vec2(double, double)>& f) {
    VectorField2 out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.set(g.index(i, j), f(g.x(i), g.y(j)));
    return out;
}

void VectorField2::validate() const {
    grid.validate();
    if (c1.size() != grid.size() || c2.size() != grid.size()) {
        throw InvalidArgument("VectorField2: component count != nx*ny");
    }
    require_finite(c1, "VectorField2");
    require_finite(c2, "VectorField2");
}

Matrix2Field Matrix2Field::sample(const Grid2D& g, const std::function<Mat2(double, double)>& f,
                                  bool sym) {
    Matrix2Field out(g, sym);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.set(g.index(i, j), f(g.x(i), g.y(j)));
    return out;
}

Matrix2Field Matrix2Field::identity(const Grid2D& g) {
    Matrix2Field out(g, true);
    std::fill(out.a11.begin(), out.a11.end(), 1.0);
    std::fill(out.a22.begin(), out.a22.end(), 1.0);
    return out;
}

void Matrix2Field::validate() const {
    grid.validate();
    const auto n = grid.size();
    if (a11.size() != n || a12.size() != n || a21.size() != n || a22.size() != n) {
        throw InvalidArgument("Matrix2Field: entry count != nx*ny");
    }
    require_finite(a11, "Matrix2Field");
    require_finite(a12, "Matrix2Field");
    require_finite(a21, "Matrix2Field");
    require_finite(a22, "Matrix2Field");
    if (symmetric && a12 != a21) throw InvalidArgument("Matrix2Field: flagged symmetric but a12 != a21");
}

// -- derivatives -------------------------------------------------------------

ScalarField x_derivative(const ScalarField& f) { return axis_derivative(f, true, false); }
ScalarField y_derivative(const ScalarField& f) { return axis_derivative(f, false, false); }

VectorField2 gradient(const ScalarField& f) {
    VectorField2 out(f.grid);
    out.c1 = x_derivative(f).values;
    out.c2 = y_derivative(f).values;
    return out;
}

ScalarField divergence(const VectorField2& F) {
    ScalarField dx = x_derivative(F.component(1));
    const ScalarField dy = y_derivative(F.component(2));
    for (std::size_t k = 0; k < dx.values.size(); ++k) dx[k] += dy[k];
    return dx;
}

Matrix2Field hessian(const ScalarField& f) {
    const ScalarField fxx = axis_derivative(f, true, true);
    const ScalarField fyy = axis_derivative(f, false, true);
    const ScalarField fxy = y_derivative(x_derivative(f));
    Matrix2Field out(f.grid, true);
    out.a11 = fxx.values;
    out.a12 = fxy.values;
    out.a21 = fxy.values;
    out.a22 = fyy.values;
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const Matrix2Field H = hessian(f);
    ScalarField out(f.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k) out[k] = H.a11[k] + H.a22[k];
    return out;
}

Matrix2Field jacobian(const VectorField2& F) {
    const ScalarField f1 = F.component(1);
    const ScalarField f2 = F.component(2);
    Matrix2Field out(F.grid);
    out.a11 = x_derivative(f1).values;
    out.a12 = x_derivative(f2).values;
    out.a21 = y_derivative(f1).values;
    out.a22 = y_derivative(f2).values;
    return out;
}

VectorField2 matrix_divergence(const Matrix2Field& A) {
    // column j: (a1j, a2j); its divergence is d_x a1j + d_y a2j.
    const ScalarField d11 = x_derivative(entry(A, &Matrix2Field::a11));
    const ScalarField d21 = y_derivative(entry(A, &Matrix2Field::a21));
    const ScalarField d12 = x_derivative(entry(A, &Matrix2Field::a12));
    const ScalarField d22 = y_derivative(entry(A, &Matrix2Field::a22));
    VectorField2 out(A.grid);
    for (std::size_t k = 0; k < out.c1.size(); ++k) {
        out.c1[k] = d11[k] + d21[k];
        out.c2[k] = d12[k] + d22[k];
    }
    return out;
}

// -- stencil -----------------------------------------------------------------

Stencil9::Slot Stencil9::slot_for(int di, int dj) {
    for (int s = 0; s < kSlots; ++s) {
        if (kDi[s] == di && kDj[s] == dj) return static_cast<Slot>(s);
    }
    throw InvalidArgument("Stencil9: offset outside the 3x3 neighbourhood");
}

void Stencil9::apply(const ScalarField& x, ScalarField& y) const {
    const Grid2D& g = grid_;
    if (y.values.size() != g.size()) y = ScalarField(g);
    const double* xv = x.values.data();
    const std::ptrdiff_t nx = g.nx;
    for (int j = 0; j < g.ny; ++j) {
        double* yrow = y.values.data() + g.index(0, j);
        if (j == 0 || j == g.ny - 1) {
            std::fill(yrow, yrow + g.nx, 0.0);
            continue;
        }
        yrow[0] = 0.0;
        yrow[g.nx - 1] = 0.0;
        for (int i = 1; i < g.nx - 1; ++i) {
            const std::size_t k = g.index(i, j);
            const double* c = coef_.data() + k * kSlots;
            const double* p = xv + k;
            yrow[i] = c[C] * p[0] + c[W] * p[-1] + c[E] * p[1] + c[S] * p[-nx] + c[N] * p[nx] +
                      c[SW] * p[-nx - 1] + c[SE] * p[-nx + 1] + c[NW] * p[nx - 1] +
                      c[NE] * p[nx + 1];
        }
    }
}

ScalarField Stencil9::apply(const ScalarField& x) const {
    ScalarField y(grid_);
    apply(x, y);
    return y;
}

void Stencil9::scale_and_shift(double scale, double shift) {
    for (int j = 1; j < grid_.ny - 1; ++j) {
        for (int i = 1; i < grid_.nx - 1; ++i) {
            const std::size_t k = grid_.index(i, j);
            for (int s = 0; s < kSlots; ++s) coef_[k * kSlots + s] *= scale;
            coef_[k * kSlots + C] += shift;
        }
    }
}

void require_elliptic(const Matrix2Field& A) {
    A.validate();
    for (std::size_t k = 0; k < A.grid.size(); ++k) {
        const double scale = std::max({1.0, std::abs(A.a12[k]), std::abs(A.a21[k])});
        if (std::abs(A.a12[k] - A.a21[k]) > 1e-12 * scale) {
            throw InvalidArgument("anisotropic operator: coefficient matrix is not symmetric");
        }
        double lo, hi;
        symmetric_eigenvalues(A.at(k), lo, hi);
        if (lo < 1.0 - 1e-12) {
            std::ostringstream os;
            os << "anisotropic operator: eigenvalue " << lo << " < 1 at node " << k;
            throw InvalidArgument(os.str());
        }
    }
}

namespace {

// Cell-averaged symmetric matrix of (A - I) or of a given coefficient field.
struct CellCoef {
    double c11, c12, c22;
};

CellCoef cell_average(const Matrix2Field& A, std::size_t k00, std::size_t k10, std::size_t k01,
                      std::size_t k11, double shift) {
    auto avg = [&](const std::vector<double>& a) {
        return 0.25 * (a[k00] + a[k10] + a[k01] + a[k11]);
    };
    const double c12 = 0.5 * (avg(A.a12) + avg(A.a21));
    return {avg(A.a11) - shift, c12, avg(A.a22) - shift};
}

// Gradient weights of the four cell corners: 00, 10, 01, 11.
struct CornerWeights {
    std::array<Vec2, 4> d;
};

CornerWeights corner_weights(const Grid2D& g) {
    const double ax = 0.5 / g.hx;
    const double ay = 0.5 / g.hy;
    return {{Vec2{-ax, -ay}, Vec2{ax, -ay}, Vec2{-ax, ay}, Vec2{ax, ay}}};
}

constexpr std::array<int, 4> kCornerDi = {0, 1, 0, 1};
constexpr std::array<int, 4> kCornerDj = {0, 0, 1, 1};

Vec2 cell_gradient(const ScalarField& f, int i, int j) {
    const double f00 = f(i, j), f10 = f(i + 1, j), f01 = f(i, j + 1), f11 = f(i + 1, j + 1);
    return {0.5 * ((f10 - f00) + (f11 - f01)) / f.grid.hx,
            0.5 * ((f01 - f00) + (f11 - f10)) / f.grid.hy};
}

}  // namespace

Stencil9 anisotropic_stencil(const Matrix2Field& A) {
    require_elliptic(A);
    const Grid2D& g = A.grid;
    Stencil9 st(g);

    // identity part on faces
    const double wx = 1.0 / (g.hx * g.hx);
    const double wy = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            if (!g.on_boundary(i, j)) {
                st.coef(g.index(i, j), Stencil9::C) += wx;
                st.coef(g.index(i, j), Stencil9::E) -= wx;
            }
            if (!g.on_boundary(i + 1, j)) {
                st.coef(g.index(i + 1, j), Stencil9::C) += wx;
                st.coef(g.index(i + 1, j), Stencil9::W) -= wx;
            }
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!g.on_boundary(i, j)) {
                st.coef(g.index(i, j), Stencil9::C) += wy;
                st.coef(g.index(i, j), Stencil9::N) -= wy;
            }
            if (!g.on_boundary(i, j + 1)) {
                st.coef(g.index(i, j + 1), Stencil9::C) += wy;
                st.coef(g.index(i, j + 1), Stencil9::S) -= wy;
            }
        }
    }

    // A - I on cells
    const CornerWeights cw = corner_weights(g);
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            std::array<std::size_t, 4> idx;
            for (int c = 0; c < 4; ++c) idx[c] = g.index(i + kCornerDi[c], j + kCornerDj[c]);
            const CellCoef cc = cell_average(A, idx[0], idx[1], idx[2], idx[3], 1.0);
            if (cc.c11 == 0.0 && cc.c12 == 0.0 && cc.c22 == 0.0) continue;
            for (int a = 0; a < 4; ++a) {
                const int ia = i + kCornerDi[a];
                const int ja = j + kCornerDj[a];
                if (g.on_boundary(ia, ja)) continue;
                const Vec2 da = cw.d[a];
                const Vec2 cda{cc.c11 * da.x + cc.c12 * da.y, cc.c12 * da.x + cc.c22 * da.y};
                for (int b = 0; b < 4; ++b) {
                    const Stencil9::Slot s =
                        Stencil9::slot_for(kCornerDi[b] - kCornerDi[a], kCornerDj[b] - kCornerDj[a]);
                    st.coef(idx[a], s) += dot(cda, cw.d[b]);
                }
            }
        }
    }
    return st;
}

ScalarField div_anisotropic(const Matrix2Field& A, const ScalarField& f) {
    require_same_grid(A.grid, f.grid, "div_anisotropic");
    const Stencil9 st = anisotropic_stencil(A);
    ScalarField out = st.apply(f);
    for (double& v : out.values) v = -v;

    // boundary: A:grad^2 f + divA . grad f
    const Grid2D& g = f.grid;
    const Matrix2Field H = hessian(f);
    const VectorField2 gf = gradient(f);
    const VectorField2 dA = matrix_divergence(A);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (!g.on_boundary(i, j)) continue;
            const std::size_t k = g.index(i, j);
            out[k] = contract(A.at(k), H.at(k)) + dot(dA.at(k), gf.at(k));
        }
    }
    return out;
}

double dirichlet_energy(const ScalarField& f) {
    const Grid2D& g = f.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double wj = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double d = (f(i + 1, j) - f(i, j)) / g.hx;
            sum += wj * d * d;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double wi = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
            const double d = (f(i, j + 1) - f(i, j)) / g.hy;
            sum += wi * d * d;
        }
    }
    return sum * g.hx * g.hy;
}

double cell_energy(const Matrix2Field& C, const ScalarField& f) {
    require_same_grid(C.grid, f.grid, "cell_energy");
    const Grid2D& g = f.grid;
    double sum = 0.0;
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const CellCoef cc = cell_average(C, g.index(i, j), g.index(i + 1, j),
                                             g.index(i, j + 1), g.index(i + 1, j + 1), 0.0);
            const Vec2 gr = cell_gradient(f, i, j);
            sum += cc.c11 * gr.x * gr.x + 2.0 * cc.c12 * gr.x * gr.y + cc.c22 * gr.y * gr.y;
        }
    }
    return sum * g.hx * g.hy;
}

double anisotropic_energy(const Matrix2Field& A, const ScalarField& f) {
    Matrix2Field C = A;
    for (std::size_t k = 0; k < C.a11.size(); ++k) {
        C.a11[k] -= 1.0;
        C.a22[k] -= 1.0;
    }
    return dirichlet_energy(f) + cell_energy(C, f);
}

double projected_gradient_energy(const VectorField2& m, const ScalarField& f) {
    require_same_grid(m.grid, f.grid, "projected_gradient_energy");
    const Grid2D& g = f.grid;
    double sum = 0.0;
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const Vec2 gr = cell_gradient(f, i, j);
            double acc = 0.0;
            for (int c = 0; c < 4; ++c) {
                const double proj = dot(m.at(i + kCornerDi[c], j + kCornerDj[c]), gr);
                acc += proj * proj;
            }
            sum += 0.25 * acc;
        }
    }
    return sum * g.hx * g.hy;
}

// -- norms -------------------------------------------------------------------

double lp_norm(const ScalarField& f, double p, const NodeMask& mask) {
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
    const Grid2D& g = f.grid;
    if (!mask.empty() && mask.size() != g.size()) throw InvalidArgument("lp_norm: mask size mismatch");
    const bool inf = std::isinf(p);
    double acc = 0.0;
    bool any = false;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (!mask.empty() && !mask[k]) continue;
            any = true;
            const double a = std::abs(f[k]);
            if (inf) {
                acc = std::max(acc, a);
            } else if (a > 0.0) {
                acc += g.weight(i, j) * std::pow(a, p);
            }
        }
    }
    if (!any) throw InvalidArgument("lp_norm: empty mask");
    return inf ? acc : std::pow(acc, 1.0 / p);
}

double integrate(const ScalarField& f) {
    const Grid2D& g = f.grid;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) acc += g.weight(i, j) * f(i, j);
    return acc;
}

double inner(const ScalarField& f, const ScalarField& h) {
    require_same_grid(f.grid, h.grid, "inner");
    const Grid2D& g = f.grid;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) acc += g.weight(i, j) * f(i, j) * h(i, j);
    return acc;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

ScalarField magnitude(const VectorField2& F) {
    ScalarField out(F.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k) out[k] = std::hypot(F.c1[k], F.c2[k]);
    return out;
}

ScalarField magnitude(const Matrix2Field& M) {
    ScalarField out(M.grid);
    for (std::size_t k = 0; k < out.values.size(); ++k) out[k] = frobenius(M.at(k));
    return out;
}

InterpolationSides interpolation_inequality(const ScalarField& u, double l, double q, double r,
                                            double eps) {
    if (!(l >= 1.0 && l <= q && q < r)) {
        throw InvalidArgument("interpolation_inequality: need 1 <= l <= q < r");
    }
    if (!(eps > 0.0)) throw InvalidArgument("interpolation_inequality: eps must be positive");
    const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
    const double mu = (1.0 / l - 1.0 / q) / (1.0 / q - inv_r);
    const double lhs = lp_norm(u, q);
    const double rhs = eps * lp_norm(u, r) + std::pow(eps, -mu) * lp_norm(u, l);
    return {lhs, rhs, mu};
}

// -- product rules -----------------------------------------------------------

CalculusResiduals calculus_identities_check(const VectorField2& F, const VectorField2& G,
                                            const Matrix2Field& A, const ScalarField& p,
                                            const FactorDerivatives& analytic) {
    require_same_grid(F.grid, G.grid, "calculus_identities_check");
    require_same_grid(F.grid, A.grid, "calculus_identities_check");
    require_same_grid(F.grid, p.grid, "calculus_identities_check");
    const Grid2D& g = F.grid;
    const std::size_t n = g.size();

    const Matrix2Field gF = analytic.grad_F.a11.empty() ? jacobian(F) : analytic.grad_F;
    const Matrix2Field gG = analytic.grad_G.a11.empty() ? jacobian(G) : analytic.grad_G;
    Matrix2Field Ax1 = analytic.A_x1;
    Matrix2Field Ax2 = analytic.A_x2;
    if (Ax1.a11.empty() || Ax2.a11.empty()) {
        Ax1 = Matrix2Field(g);
        Ax2 = Matrix2Field(g);
        Ax1.a11 = x_derivative(entry(A, &Matrix2Field::a11)).values;
        Ax1.a12 = x_derivative(entry(A, &Matrix2Field::a12)).values;
        Ax1.a21 = x_derivative(entry(A, &Matrix2Field::a21)).values;
        Ax1.a22 = x_derivative(entry(A, &Matrix2Field::a22)).values;
        Ax2.a11 = y_derivative(entry(A, &Matrix2Field::a11)).values;
        Ax2.a12 = y_derivative(entry(A, &Matrix2Field::a12)).values;
        Ax2.a21 = y_derivative(entry(A, &Matrix2Field::a21)).values;
        Ax2.a22 = y_derivative(entry(A, &Matrix2Field::a22)).values;
    }
    const VectorField2 gp = analytic.grad_p.c1.empty() ? gradient(p) : analytic.grad_p;

    ScalarField FG(g);
    VectorField2 AF(g);
    Matrix2Field pA(g);
    for (std::size_t k = 0; k < n; ++k) {
        FG[k] = dot(F.at(k), G.at(k));
        AF.set(k, A.at(k) * F.at(k));
        pA.set(k, p[k] * A.at(k));
    }
    const VectorField2 lhs1 = gradient(FG);
    const ScalarField lhs2 = divergence(AF);
    const Matrix2Field lhs3 = jacobian(AF);
    const VectorField2 lhs4 = matrix_divergence(pA);

    CalculusResiduals res;
    for (std::size_t k = 0; k < n; ++k) {
        const Mat2 dF = gF.at(k), dG = gG.at(k), a = A.at(k), a1 = Ax1.at(k), a2 = Ax2.at(k);
        const Vec2 f = F.at(k), gv = G.at(k);
        // (grad F) G has entry i = sum_j dF_ij G_j
        const Vec2 rhs1 = dF * gv + dG * f;
        res.form1 = std::max({res.form1, std::abs(lhs1.c1[k] - rhs1.x), std::abs(lhs1.c2[k] - rhs1.y)});

        const Vec2 divA{a1.a11 + a2.a21, a1.a12 + a2.a22};
        const double rhs2 = contract(a, dF) + dot(divA, f);
        res.form2 = std::max(res.form2, std::abs(lhs2[k] - rhs2));

        const Vec2 r1 = a1 * f;
        const Vec2 r2 = a2 * f;
        const Mat2 rhs3 = dF * a.transposed() + Mat2{r1.x, r1.y, r2.x, r2.y};
        res.form3 = std::max(res.form3, frobenius(lhs3.at(k) - rhs3));

        const Vec2 gpk = gp.at(k);
        const Vec2 rhs4 = p[k] * divA + a.transposed() * gpk;
        res.form4 = std::max({res.form4, std::abs(lhs4.c1[k] - rhs4.x), std::abs(lhs4.c2[k] - rhs4.y)});
    }
    return res;
}

}  // namespace hucai
