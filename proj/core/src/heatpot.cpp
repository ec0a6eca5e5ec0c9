#include "hucai/heatpot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> panel_edges(double t, const HeatPotentialConfig& cfg) {
    // Edges scale with t, so the quadrature error is smooth in t.
    const int n = cfg.panels_per_octave * cfg.octaves;
    std::vector<double> e{0.0};
    for (int k = n; k >= 0; --k) e.push_back(t * std::exp2(-static_cast<double>(k) / cfg.panels_per_octave));
    return e;
}

}  // namespace

VectorField2 forcing_field(const VectorField2& m, const ScalarField& p, const Params& params) {
    params.validate();
    VectorField2 f = forcing_term(m, p, params);
    const VectorField2 r = reaction_term(m, params);
    for (std::size_t k = 0; k < f.c1.size(); ++k) {
        f.c1[k] -= r.c1[k];
        f.c2[k] -= r.c2[k];
    }
    return f;
}

HeatSource HeatSource::constant(Vec2 F) {
    HeatSource s;
    s.f = [F](double, double, double) { return F; };
    return s;
}

HeatSource HeatSource::from_frames(std::vector<VectorField2> frames, std::vector<double> times) {
    if (frames.empty() || frames.size() != times.size()) {
        throw InvalidArgument("HeatSource::from_frames: need one time per frame");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw InvalidArgument("HeatSource::from_frames: times must increase");
        if (!(frames[k].grid == frames[0].grid)) throw InvalidArgument("HeatSource::from_frames: grid mismatch");
    }
    const Grid2D g = frames[0].grid;
    g.validate();
    HeatSource s;
    s.support = Box{g.x0, g.x_max(), g.y0, g.y_max()};
    s.resolution = std::min(g.hx, g.hy);
    auto shared = std::make_shared<std::pair<std::vector<VectorField2>, std::vector<double>>>(
        std::move(frames), std::move(times));
    s.f = [shared, g](double x, double y, double tau) -> Vec2 {
        const auto& [fr, ts] = *shared;
        const double fx = (x - g.x0) / g.hx, fy = (y - g.y0) / g.hy;
        if (fx < 0.0 || fy < 0.0 || fx > g.nx - 1 || fy > g.ny - 1) return {0.0, 0.0};
        const int i = std::min(static_cast<int>(fx), g.nx - 2);
        const int j = std::min(static_cast<int>(fy), g.ny - 2);
        const double ax = fx - i, ay = fy - j;
        auto bilinear = [&](const VectorField2& F) {
            return (1 - ax) * (1 - ay) * F.at(i, j) + ax * (1 - ay) * F.at(i + 1, j) +
                   (1 - ax) * ay * F.at(i, j + 1) + ax * ay * F.at(i + 1, j + 1);
        };
        if (tau <= ts.front()) return bilinear(fr.front());
        if (tau >= ts.back()) return bilinear(fr.back());
        const std::size_t hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), tau) - ts.begin());
        const double w = (tau - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
        return (1 - w) * bilinear(fr[hi - 1]) + w * bilinear(fr[hi]);
    };
    return s;
}

HeatSource manufactured_duhamel_source(double width, double alpha, double resolution_factor) {
    if (!(width > 0.0) || !(alpha > 0.0) || !(resolution_factor > 0.0)) {
        throw InvalidArgument("manufactured_duhamel_source: width, alpha and resolution_factor must be > 0");
    }
    const double w2 = width * width, a2 = alpha * alpha;
    HeatSource s;
    s.f = [=](double x, double y, double tau) {
        const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
        const double g = std::exp(-r2 / w2);
        const double f = g - a2 * tau * g * (4.0 * r2 / (w2 * w2) - 4.0 / w2);
        return Vec2{f, -0.5 * f};
    };
    const double L = std::sqrt(32.0 * std::log(10.0)) * width;
    s.support = HeatSource::Box{0.5 - L, 0.5 + L, 0.5 - L, 0.5 + L};
    s.resolution = width / resolution_factor;
    return s;
}

Vec2 manufactured_duhamel_solution(double x, double y, double t, double width) {
    const double u = t * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / (width * width));
    return {u, -0.5 * u};
}

void HeatPotentialConfig::validate() const {
    if (!(alpha > 0.0)) throw InvalidArgument("HeatPotentialConfig.alpha must be positive");
    if (panels_per_octave < 1) throw InvalidArgument("HeatPotentialConfig.panels_per_octave must be >= 1");
    if (octaves < 1) throw InvalidArgument("HeatPotentialConfig.octaves must be >= 1");
    if (!(points_per_sigma >= 1.0)) throw InvalidArgument("HeatPotentialConfig.points_per_sigma must be >= 1");
    if (!(truncation >= 6.0)) throw InvalidArgument("HeatPotentialConfig.truncation must be >= 6");
    if (!(delta > 2.0 && delta < 3.0)) throw InvalidArgument("HeatPotentialConfig.delta must lie in (2, 3)");
}

PotentialValue heat_potential_at(const HeatSource& src, double x, double y, double t,
                                 const HeatPotentialConfig& cfg) {
    cfg.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("heat_potential: t must be > 0");
    if (!src.f) throw InvalidArgument("heat_potential: empty source");
    const double a2 = cfg.alpha * cfg.alpha;
    const std::vector<double> edges = panel_edges(t, cfg);

    PotentialValue out;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double s = 0.5 * (edges[k] + edges[k + 1]);
        const double width = edges[k + 1] - edges[k];
        const double sigma = cfg.alpha * std::sqrt(2.0 * s);
        double hq = sigma / cfg.points_per_sigma;
        if (src.resolution > 0.0) hq = std::min(hq, src.resolution);
        const double L = cfg.truncation * sigma;
        double xlo = x - L, xhi = x + L, ylo = y - L, yhi = y + L;
        if (src.support) {
            xlo = std::max(xlo, src.support->x0);
            xhi = std::min(xhi, src.support->x1);
            ylo = std::max(ylo, src.support->y0);
            yhi = std::min(yhi, src.support->y1);
            if (xlo > xhi || ylo > yhi) continue;
        }
        const long i0 = static_cast<long>(std::ceil((xlo - x) / hq));
        const long i1 = static_cast<long>(std::floor((xhi - x) / hq));
        const long j0 = static_cast<long>(std::ceil((ylo - y) / hq));
        const long j1 = static_cast<long>(std::floor((yhi - y) / hq));
        const double inv4 = 1.0 / (4.0 * a2 * s);
        const double norm_w = width * hq * hq / (4.0 * kPi * a2 * s);
        const double tau = t - s;
        Vec2 u{};
        Mat2 gu{};
        for (long j = j0; j <= j1; ++j) {
            const double zy = j * hq;
            for (long i = i0; i <= i1; ++i) {
                const double zx = i * hq;
                const double G = std::exp(-(zx * zx + zy * zy) * inv4);
                if (G == 0.0) continue;
                const Vec2 f = src.f(x + zx, y + zy, tau);
                u += G * f;
                // d/dx_i G(x - y) = z_i / (2 alpha^2 s) G with z = y - x
                const double gx = 2.0 * inv4 * zx * G, gy = 2.0 * inv4 * zy * G;
                gu += Mat2{gx * f.x, gx * f.y, gy * f.x, gy * f.y};
            }
        }
        out.u += norm_w * u;
        out.grad_u += norm_w * gu;
    }
    return out;
}

VectorField2 heat_potential(const HeatSource& src, const Grid2D& g, double t, const HeatPotentialConfig& cfg) {
    g.validate();
    VectorField2 out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.set(g.index(i, j), heat_potential_at(src, g.x(i), g.y(j), t, cfg).u);
    return out;
}

double heat_residual_check(const HeatSource& src, const HeatPotentialConfig& cfg,
                           const std::vector<Vec2>& points, const std::vector<double>& times,
                           double dt, double h) {
    if (!(dt > 0.0) || !(h > 0.0)) throw InvalidArgument("heat_residual_check: dt and h must be positive");
    const double a2 = cfg.alpha * cfg.alpha;
    double worst = 0.0;
    for (double t : times) {
        if (!(t - dt > 0.0)) throw InvalidArgument("heat_residual_check: need t - dt > 0");
        for (const Vec2& p : points) {
            auto u = [&](double x, double y, double tt) { return heat_potential_at(src, x, y, tt, cfg).u; };
            const Vec2 uc = u(p.x, p.y, t);
            const Vec2 ut = (1.0 / (2.0 * dt)) * (u(p.x, p.y, t + dt) - u(p.x, p.y, t - dt));
            const Vec2 lap = (1.0 / (h * h)) * (u(p.x + h, p.y, t) + u(p.x - h, p.y, t) + u(p.x, p.y + h, t) +
                                                u(p.x, p.y - h, t) - 4.0 * uc);
            const Vec2 r = ut - a2 * lap - src.f(p.x, p.y, t);
            worst = std::max(worst, norm(r));
        }
    }
    return worst;
}

ScalingReport potential_gradient_scaling(const HeatSource& src, const HeatPotentialConfig& cfg,
                                         const std::vector<double>& times,
                                         const std::vector<Vec2>& points) {
    cfg.validate();
    if (times.size() < 4) throw InvalidArgument("potential_gradient_scaling: need at least 4 times");
    const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    if (!(*lo > 0.0) || std::log10(*hi / *lo) < 1.5) {
        throw InvalidArgument("potential_gradient_scaling: times must be positive and span >= 1.5 decades");
    }
    if (points.empty()) throw InvalidArgument("potential_gradient_scaling: no sample points");
    ScalingReport rep;
    const double expo = -1.0 + 0.5 * cfg.delta;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double t : times) {
        double sup = 0.0;
        for (const Vec2& p : points) sup = std::max(sup, frobenius(heat_potential_at(src, p.x, p.y, t, cfg).grad_u));
        rep.rows.push_back({t, sup});
        rep.c_fit = std::max(rep.c_fit, sup / std::pow(t, expo));
        if (sup > 0.0) {
            const double X = std::log(t), Y = std::log(sup);
            sx += X; sy += Y; sxx += X * X; sxy += X * Y;
            ++n;
        }
    }
    if (n >= 4) {
        rep.defined = true;
        rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        rep.slope = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

double g_function(double tau, double eps, double r, double c) {
    return eps * std::pow(tau, 2.0 * r) - tau + eps + c;
}

FixedPointG fixed_point_g(double eps, double r, double c) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("fixed_point_g: eps_hat must be > 0");
    if (!(r > 1.0) || !std::isfinite(r)) throw InvalidArgument("fixed_point_g: r must be > 1");
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("fixed_point_g: c must be >= 0");
    FixedPointG out;
    const double q = 2.0 * r - 1.0;
    out.tau0 = std::pow(2.0 * eps * r, -1.0 / q);
    out.g_tau0 = g_function(out.tau0, eps, r, c);
    out.cond_lhs = (c + 2.0 * eps) * std::pow(eps, 1.0 / q);
    out.cond_rhs = q / std::pow(2.0 * r, 2.0 * r / q);
    out.condition_holds = out.cond_lhs <= out.cond_rhs;
    out.bound_holds = out.g_tau0 <= -eps;

    if (out.g_tau0 < 0.0) {
        auto bisect = [&](double a, double b) {
            // g(a) and g(b) have opposite signs
            const bool a_pos = g_function(a, eps, r, c) > 0.0;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if ((g_function(m, eps, r, c) > 0.0) == a_pos) a = m; else b = m;
            }
            return 0.5 * (a + b);
        };
        out.lower_crossing = bisect(0.0, out.tau0);
        double hi = 2.0 * out.tau0;
        while (g_function(hi, eps, r, c) < 0.0) hi *= 2.0;
        out.upper_crossing = bisect(out.tau0, hi);
    }
    return out;
}

}  // namespace hucai
