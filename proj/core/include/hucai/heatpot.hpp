#pragma once

// Heat-kernel (Duhamel) potentials
//   u(x,t) = int_0^t int_R2 G(x - y, t - tau) f(y, tau) dy dtau,
//   G(z, s) = exp(-|z|^2 / (4 alpha^2 s)) / (4 pi alpha^2 s),
// evaluated by quadrature, and the scalar continuation function g.

#include <functional>
#include <optional>
#include <vector>

#include "hucai/grid.hpp"
#include "hucai/model.hpp"

namespace hucai {

/// beta^2 (m.grad p) grad p - reaction(m), i.e. forcing_term - reaction_term.
VectorField2 forcing_field(const VectorField2& m, const ScalarField& p, const Params& params);

/// A space-time source f(x, y, tau). When `support` is set, f vanishes outside
/// that box (zero extension); `resolution` is the length scale on which f
/// varies, which caps the quadrature spacing (0: no cap).
struct HeatSource {
    std::function<Vec2(double, double, double)> f;
    struct Box {
        double x0, x1, y0, y1;
    };
    std::optional<Box> support;
    double resolution = 0.0;

    /// Constant source on the whole plane.
    static HeatSource constant(Vec2 F);
    /// Bilinear interpolation of nodal frames, piecewise linear in time
    /// (constant beyond the last frame), zero outside the grid.
    static HeatSource from_frames(std::vector<VectorField2> frames, std::vector<double> times);
};

/// Whole-plane oracle u*(x, t) = t g(x) with g = exp(-|x - (1/2, 1/2)|^2 / width^2),
/// so f = g - alpha^2 t Lap g, in both components (the second scaled by -1/2).
/// Support is cut where g < 1e-32; resolution = width / resolution_factor.
HeatSource manufactured_duhamel_source(double width, double alpha, double resolution_factor = 3.0);
Vec2 manufactured_duhamel_solution(double x, double y, double t, double width);

struct HeatPotentialConfig {
    double alpha = 1.0;
    int panels_per_octave = 8;   ///< geometric panels in s = t - tau, ratio 2^(1/k)
    int octaves = 30;            ///< panels cover [t 2^-octaves, t]; one more panel down to 0
    double points_per_sigma = 4.0;
    double truncation = 6.0;     ///< kernel truncation radius in standard deviations
    double delta = 2.5;          ///< gradient-scaling exponent in (2, 3)

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

struct PotentialValue {
    Vec2 u;
    Mat2 grad_u;  ///< entry (i,j) = d u_j / d x_i
};

/// Midpoint rule in s on the geometric panels above; tensor rule in y anchored at x with
/// spacing min(sigma / points_per_sigma, resolution), sigma = alpha sqrt(2 s),
/// cut at truncation * sigma and at the support box. The gradient uses the
/// analytic kernel gradient. Throws InvalidArgument for t <= 0.
PotentialValue heat_potential_at(const HeatSource& src, double x, double y, double t,
                                 const HeatPotentialConfig& cfg);

/// Potential at every node of a grid.
VectorField2 heat_potential(const HeatSource& src, const Grid2D& g, double t, const HeatPotentialConfig& cfg);

/// max over points and times of |(u(t+dt) - u(t-dt))/(2 dt) - alpha^2 Lap_h u - f|,
/// with the 5-point Laplacian of spacing h around each point.
double heat_residual_check(const HeatSource& src, const HeatPotentialConfig& cfg,
                           const std::vector<Vec2>& points, const std::vector<double>& times,
                           double dt, double h);

struct ScalingRow {
    double t;
    double sup_grad_u;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    bool defined = false;  ///< false when fewer than 4 times have sup_grad_u > 0
    double slope = 0.0;    ///< least-squares slope of log sup|grad u| against log t
    double c_fit = 0.0;    ///< max_t sup|grad u| / t^(-1 + delta/2)
};

/// Throws InvalidArgument when fewer than 4 times are given or they span
/// less than 1.5 decades.
ScalingReport potential_gradient_scaling(const HeatSource& src, const HeatPotentialConfig& cfg,
                                         const std::vector<double>& times,
                                         const std::vector<Vec2>& points);

struct FixedPointG {
    double tau0 = 0.0;
    double g_tau0 = 0.0;
    double cond_lhs = 0.0;  ///< (c + 2 eps) eps^(1/(2r-1))
    double cond_rhs = 0.0;  ///< (2r-1) / (2r)^(2r/(2r-1))
    bool condition_holds = false;
    bool bound_holds = false;  ///< g(tau0) <= -eps
    /// Zeros of g on either side of tau0 when g(tau0) < 0.
    std::optional<double> lower_crossing, upper_crossing;
};

/// g(tau) = eps tau^(2r) - tau + eps + c, minimised at tau0 = (2 eps r)^(-1/(2r-1)).
/// Throws InvalidArgument unless eps > 0, r > 1 and c >= 0.
FixedPointG fixed_point_g(double eps_hat, double r, double c);
double g_function(double tau, double eps_hat, double r, double c);

}  // namespace hucai
