#include "checks.hpp"

#include <cmath>

namespace hucai::app {

SweepResult ynb_sweep() {
    SweepResult r;
    for (double c : {0.1, 0.5, 1.0, 2.0, 10.0})
        for (double b : {1.5, 2.0, 4.0, 8.0, 16.0})
            for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
                const double thr = std::pow(c, -1.0 / alpha) * std::pow(b, -1.0 / (alpha * alpha));
                for (double f : {0.5, 0.9, 1.0}) {
                    const SequenceReport s = ynb_sequence(c, b, alpha, f == 1.0 ? thr : f * thr);
                    ++r.evaluated;
                    if (!s.below_threshold) continue;
                    ++r.qualifying;
                    if (s.verdict != SequenceVerdict::Converges) ++r.violations;
                }
            }
    return r;
}

SweepResult fixed_point_sweep() {
    SweepResult r;
    for (int k = 0; k <= 12; ++k) {
        const double eps = std::pow(10.0, -6.0 + 0.5 * k);
        for (double rr : {1.25, 1.5, 2.0, 3.0, 4.0})
            for (double c : {0.0, 0.01, 0.1, 0.5, 1.0}) {
                const FixedPointG f = fixed_point_g(eps, rr, c);
                ++r.evaluated;
                if (!f.condition_holds) continue;
                ++r.qualifying;
                const bool bracket = f.lower_crossing && f.upper_crossing && *f.lower_crossing < f.tau0 &&
                                     *f.upper_crossing > f.tau0;
                if (!(f.g_tau0 <= -eps) || !bracket) ++r.violations;
            }
    }
    return r;
}

double kernel_normalization_error(const HeatPotentialConfig& cfg) {
    const Vec2 F{1.0, -2.0};
    const HeatSource src = HeatSource::constant(F);
    double worst = 0.0;
    for (double t : {1e-3, 0.1, 1.0}) {
        const PotentialValue v = heat_potential_at(src, 0.3, 0.4, t, cfg);
        worst = std::max(worst, norm((1.0 / t) * v.u - F) / norm(F));
    }
    return worst;
}

std::vector<double> duhamel_refinement(int levels, const HeatPotentialConfig& base) {
    const std::vector<Vec2> pts{{0.5, 0.5}, {0.58, 0.46}, {0.44, 0.6}};
    const std::vector<double> ts{0.2};
    std::vector<double> out;
    for (int l = 0; l < levels; ++l) {
        HeatPotentialConfig cfg = base;
        cfg.panels_per_octave = 4 << l;
        cfg.points_per_sigma = 2.0 * (1 << l);
        const HeatSource s = manufactured_duhamel_source(0.1, base.alpha, 1.5 * (1 << l));
        const double step = 0.01 / (1 << l);
        out.push_back(heat_residual_check(s, cfg, pts, ts, 2.0 * step, step));
    }
    return out;
}

}  // namespace hucai::app
