#pragma once

// Pointwise model coefficients of the pressure/conductance system and the
// auxiliary fields of the gradient-equation machinery.

#include "hucai/grid.hpp"
#include "hucai/tensor2.hpp"

namespace hucai {

struct Params {
    double alpha = 1.0;      ///< diffusion coefficient (enters as alpha^2)
    double beta = 1.0;       ///< forcing strength (enters as beta^2)
    double gamma = 1.0;      ///< relaxation exponent, > 1/2
    double eps_reg = 0.0;    ///< reaction regularisation (|m|^2 + eps)^(gamma-1) m
    double v_min = 1.0;      ///< cutoff for fields carrying 1/v
    double r_exp = 2.0;      ///< level-set norm exponent r > 1
    double delta_exp = 2.5;  ///< heat-potential exponent in (2, 3)

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

/// Conductance m, pressure p, time t. Boundary nodes of p and m are zero.
struct State {
    VectorField2 m;
    ScalarField p;
    double t = 0.0;

    /// Throws InvalidArgument if a boundary value is nonzero or a value is not finite.
    void validate() const;
};

struct Conductivity {
    Matrix2Field A;     ///< I + m m^T
    ScalarField detA;   ///< 1 + |m|^2
};

Conductivity conductivity(const VectorField2& m);

/// v = A grad p . grad p = |grad p|^2 + (m . grad p)^2 with the nodal gradient.
ScalarField compute_v(const VectorField2& m, const ScalarField& p);

/// w = -(divA grad p + s). divA is the row vector of column divergences of
/// A = I + m m^T, expanded as (div m) m + (m . grad) m.
ScalarField compute_w(const VectorField2& m, const ScalarField& p, const ScalarField& s);

/// Values of m, p and their derivatives at one point. grad_m(i,j) = d m_j / d x_i.
struct PointJet {
    Vec2 m;
    Mat2 grad_m;
    Vec2 grad_p;
    Mat2 hess_p;
    double s = 0.0;
};

/// All auxiliary quantities at one point.
struct PointAux {
    Mat2 A;
    double detA = 0.0;
    double v = 0.0;
    double w = 0.0;
    Vec2 nu;         ///< A grad p
    Vec2 E;          ///< 2 hess(p) A grad p
    Vec2 G;          ///< v^-1 (A_x1 grad p . grad p, A_x2 grad p . grad p)
    Mat2 A1, A2, A3;
    Vec2 H;
    Vec2 K;
    double h = 0.0;
    double d = 0.0;  ///< (1+|m|^2) |m| |grad m|
    bool on_mask = false;
};

/// divA grad p evaluated from the jet.
double div_A_dot_grad_p(const PointJet& jet);
/// Evaluates every auxiliary quantity. Quantities carrying 1/v (G, H, K, h)
/// are computed only when v >= v_min and are zero otherwise.
PointAux evaluate_aux(const PointJet& jet, double w, double v_min);

struct AuxFields {
    Matrix2Field A;
    ScalarField detA;
    ScalarField v;
    ScalarField w;
    VectorField2 nu;
    VectorField2 E;
    VectorField2 G;
    Matrix2Field A1, A2, A3;
    VectorField2 H;
    VectorField2 K;
    ScalarField h;
    ScalarField d;
    NodeMask mask;  ///< v >= v_min
};

/// Nodal jets from discrete derivatives of p and m.
std::vector<PointJet> nodal_jets(const VectorField2& m, const ScalarField& p, const ScalarField& s);

AuxFields compute_aux(const VectorField2& m, const ScalarField& p, const ScalarField& s,
                      const Params& params);

/// (|m|^2 + eps_reg)^(gamma-1) m. Throws InvalidArgument when eps_reg = 0 and
/// gamma < 1.
VectorField2 reaction_term(const VectorField2& m, const Params& params);
Vec2 reaction_at(const Vec2& m, const Params& params);

/// beta^2 (m . grad p) grad p with the nodal gradient.
VectorField2 forcing_term(const VectorField2& m, const ScalarField& p, const Params& params);

/// Largest values over {v >= v_min} of |H|/d, |K|/(d + (1+|m|^2)^(3/2)|s|) and
/// |h|/(d^2 + (1+|m|^2)s^2). Nodes where a denominator vanishes are skipped.
struct CoefficientRatios {
    double H_ratio = 0.0;
    double K_ratio = 0.0;
    double h_ratio = 0.0;
    std::size_t nodes = 0;
};
CoefficientRatios coefficient_ratios(const AuxFields& aux, const VectorField2& m,
                                     const ScalarField& s);

}  // namespace hucai
