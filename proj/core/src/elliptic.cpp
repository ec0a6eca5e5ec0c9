#include "hucai/elliptic.hpp"

#include <cmath>
#include <sstream>

#include "hucai/error.hpp"
#include "hucai/model.hpp"

namespace hucai {

double interior_dot(const ScalarField& a, const ScalarField& b) {
    const Grid2D& g = a.grid;
    double acc = 0.0;
    for (int j = 1; j < g.ny - 1; ++j) {
        const std::size_t row = g.index(0, j);
        for (int i = 1; i < g.nx - 1; ++i) acc += a[row + i] * b[row + i];
    }
    return acc;
}

LinearSystem assemble_pressure_system(const Matrix2Field& A, const ScalarField& s,
                                      SolverOptions options) {
    if (!(A.grid == s.grid)) throw InvalidArgument("assemble_pressure_system: grid mismatch");
    s.validate();
    LinearSystem sys{anisotropic_stencil(A), s, options};
    const Grid2D& g = s.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.on_boundary(i, j)) sys.rhs(i, j) = 0.0;
    return sys;
}

CgResult conjugate_gradient(const Stencil9& op, const ScalarField& b, ScalarField& x,
                            const SolverOptions& options) {
    const Grid2D& g = op.grid();
    if (!(b.grid == g)) throw InvalidArgument("conjugate_gradient: rhs grid mismatch");
    if (x.values.size() != g.size()) x = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.on_boundary(i, j)) x(i, j) = 0.0;

    const double bnorm = std::sqrt(interior_dot(b, b));
    if (bnorm == 0.0) {
        std::fill(x.values.begin(), x.values.end(), 0.0);
        return {0, 0.0};
    }

    ScalarField inv_diag(g);
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 1; i < g.nx - 1; ++i) {
            const double d = op.coef(g.index(i, j), Stencil9::C);
            if (!(d > 0.0)) throw SolverError("conjugate_gradient: non-positive diagonal", {});
            inv_diag(i, j) = 1.0 / d;
        }
    }

    ScalarField r(g);
    auto true_residual = [&] {
        op.apply(x, r);
        for (std::size_t k = 0; k < r.values.size(); ++k) r[k] = b[k] - r[k];
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.on_boundary(i, j)) r(i, j) = 0.0;
        return std::sqrt(interior_dot(r, r)) / bnorm;
    };

    double res = true_residual();
    std::vector<double> history;
    if (res <= options.tol) return {0, res};

    ScalarField z(g), p(g), q(g);
    for (std::size_t k = 0; k < z.values.size(); ++k) z[k] = inv_diag[k] * r[k];
    p = z;
    double rz = interior_dot(r, z);
    double last_true = res;
    for (int it = 1; it <= options.max_iter; ++it) {
        op.apply(p, q);
        const double pq = interior_dot(p, q);
        if (!(pq > 0.0)) {
            throw SolverError("conjugate_gradient: operator not positive definite", history);
        }
        const double a = rz / pq;
        for (std::size_t k = 0; k < x.values.size(); ++k) {
            x[k] += a * p[k];
            r[k] -= a * q[k];
        }
        res = std::sqrt(interior_dot(r, r)) / bnorm;
        history.push_back(res);
        if (!std::isfinite(res)) throw SolverError("conjugate_gradient: residual is not finite", history);
        if (res <= options.tol) {
            // The recursive residual drifts from b - Ax; accept only the true one.
            res = true_residual();
            if (res <= options.tol) return {it, res};
            if (!(res < 0.5 * last_true)) {
                std::ostringstream os;
                os << "conjugate_gradient: stagnated at true relative residual " << res << " above tol "
                   << options.tol;
                throw SolverError(os.str(), history);
            }
            last_true = res;
            for (std::size_t k = 0; k < z.values.size(); ++k) z[k] = inv_diag[k] * r[k];
            p = z;
            rz = interior_dot(r, z);
            continue;
        }
        for (std::size_t k = 0; k < z.values.size(); ++k) z[k] = inv_diag[k] * r[k];
        const double rz_new = interior_dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < p.values.size(); ++k) p[k] = z[k] + beta * p[k];
    }
    std::ostringstream os;
    os << "conjugate_gradient: no convergence after " << options.max_iter
       << " iterations (relative residual " << res << ", tol " << options.tol << ")";
    throw SolverError(os.str(), history);
}

PressureSolution solve_pressure(const LinearSystem& sys, const ScalarField* initial_guess) {
    PressureSolution out;
    out.p = initial_guess ? *initial_guess : ScalarField(sys.rhs.grid);
    const CgResult r = conjugate_gradient(sys.op, sys.rhs, out.p, sys.options);
    out.iterations = r.iterations;
    out.relative_residual = r.relative_residual;
    return out;
}

InitialPressure solve_p0(const VectorField2& m0, const ScalarField& s, SolverOptions options) {
    const Grid2D& g = m0.grid;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (g.on_boundary(i, j) && (m0.at(i, j).x != 0.0 || m0.at(i, j).y != 0.0)) {
                throw InvalidArgument("solve_p0: m0 must vanish on the boundary");
            }
        }
    }
    const Conductivity c = conductivity(m0);
    const PressureSolution sol = solve_pressure(assemble_pressure_system(c.A, s, options));
    InitialPressure out;
    out.p0 = sol.p;
    out.iterations = sol.iterations;
    out.relative_residual = sol.relative_residual;
    out.sup_grad_p0 = max_abs(magnitude(gradient(out.p0)));
    return out;
}

}  // namespace hucai
