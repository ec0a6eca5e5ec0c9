#pragma once

// Discrete pressure problem -div(A grad p) = s with homogeneous Dirichlet
// data, and the preconditioned conjugate-gradient driver shared with the
// implicit diffusion solve.

#include <vector>

#include "hucai/grid.hpp"

namespace hucai {

struct SolverOptions {
    double tol = 1e-10;   ///< relative residual ||b - Mx|| / ||b||
    int max_iter = 50000;
};

/// SPD system on the interior nodes. Boundary entries of every vector are 0.
struct LinearSystem {
    Stencil9 op;
    ScalarField rhs;
    SolverOptions options;
};

LinearSystem assemble_pressure_system(const Matrix2Field& A, const ScalarField& s,
                                      SolverOptions options = {});

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Jacobi-preconditioned CG, stopped on the true residual b - Sx. `x` holds
/// the initial guess on entry; its boundary entries are reset to 0. Throws
/// SolverError with the residual history when max_iter is reached or the true
/// residual stalls above tol (round-off floor).
CgResult conjugate_gradient(const Stencil9& op, const ScalarField& b, ScalarField& x,
                            const SolverOptions& options);

/// Euclidean inner product over interior nodes.
double interior_dot(const ScalarField& a, const ScalarField& b);

struct PressureSolution {
    ScalarField p;
    int iterations = 0;
    double relative_residual = 0.0;
};

PressureSolution solve_pressure(const LinearSystem& sys, const ScalarField* initial_guess = nullptr);

struct InitialPressure {
    ScalarField p0;
    double sup_grad_p0 = 0.0;  ///< max over nodes of |grad p0|
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Pressure belonging to the initial conductance m0 (m0 must vanish on the boundary).
InitialPressure solve_p0(const VectorField2& m0, const ScalarField& s, SolverOptions options = {});

}  // namespace hucai
