#include "hucai/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hucai/error.hpp"

namespace hucai {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double rel_gap(double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

Stencil9 heat_operator(const Grid2D& g, double dt, double alpha) {
    Stencil9 op = anisotropic_stencil(Matrix2Field::identity(g));
    op.scale_and_shift(dt * alpha * alpha, 1.0);
    return op;
}

State advance(const State& st, const ScalarField& s, const Params& params, double dt,
              const Stencil9& heat, const SolverOptions& solver, StepStats* stats) {
    const Grid2D& g = st.p.grid;
    const VectorField2 force = forcing_term(st.m, st.p, params);
    const VectorField2 react = reaction_term(st.m, params);

    State next;
    next.t = st.t + dt;
    next.m = VectorField2(g);
    int diffusion_iters = 0;
    for (int c = 0; c < 2; ++c) {
        const std::vector<double>& mc = c == 0 ? st.m.c1 : st.m.c2;
        const std::vector<double>& fc = c == 0 ? force.c1 : force.c2;
        const std::vector<double>& rc = c == 0 ? react.c1 : react.c2;
        ScalarField rhs(g), x(g);
        for (int j = 1; j < g.ny - 1; ++j) {
            for (int i = 1; i < g.nx - 1; ++i) {
                const std::size_t k = g.index(i, j);
                rhs[k] = mc[k] + dt * (fc[k] - rc[k]);
                x[k] = mc[k];
            }
        }
        if (!all_finite(rhs.values)) {
            throw InstabilityError("step_conductance: non-finite explicit terms; reduce dt", st.t);
        }
        diffusion_iters += conjugate_gradient(heat, rhs, x, solver).iterations;
        (c == 0 ? next.m.c1 : next.m.c2) = std::move(x.values);
    }
    if (!all_finite(next.m.c1) || !all_finite(next.m.c2)) {
        throw InstabilityError("step_conductance: non-finite conductance; reduce dt", next.t);
    }

    const Conductivity cond = conductivity(next.m);
    const PressureSolution ps =
        solve_pressure(assemble_pressure_system(cond.A, s, solver), &st.p);
    if (!all_finite(ps.p.values)) {
        throw InstabilityError("step_conductance: non-finite pressure", next.t);
    }
    next.p = ps.p;
    if (stats) {
        stats->pressure_iterations = ps.iterations;
        stats->diffusion_iterations = diffusion_iters;
    }
    return next;
}

double sup_jacobian(const VectorField2& m) { return max_abs(magnitude(jacobian(m))); }

// Linear interpolation of a per-step sequence at tau.
struct Bracket {
    std::size_t lo = 0;
    double w = 0.0;  // weight of lo + 1
};

Bracket locate(const std::vector<double>& times, double tau) {
    if (times.empty()) throw InvalidArgument("energy identity: empty trajectory");
    const double tol = 1e-12 * std::max(1.0, times.back());
    if (!(tau >= -tol && tau <= times.back() + tol)) {
        std::ostringstream os;
        os << "energy identity: tau = " << tau << " lies outside [0, " << times.back() << "]";
        throw InvalidArgument(os.str());
    }
    if (times.size() == 1 || tau <= times.front()) return {0, 0.0};
    if (tau >= times.back()) return {times.size() - 2, 1.0};
    const auto it = std::upper_bound(times.begin(), times.end(), tau);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    return {lo, (tau - times[lo]) / (times[hi] - times[lo])};
}

template <class F>
double at(const Bracket& b, std::size_t n, F value) {
    if (b.w == 0.0 || b.lo + 1 >= n) return value(b.lo);
    return (1.0 - b.w) * value(b.lo) + b.w * value(b.lo + 1);
}

// Cumulative trapezoid integral of value(n) over the step times, evaluated at tau.
template <class F>
double time_integral(const std::vector<double>& times, const Bracket& b, F value) {
    double acc = 0.0;
    for (std::size_t n = 0; n < b.lo; ++n) {
        acc += 0.5 * (times[n + 1] - times[n]) * (value(n) + value(n + 1));
    }
    if (b.w > 0.0 && b.lo + 1 < times.size()) {
        const double dt = times[b.lo + 1] - times[b.lo];
        const double end = (1.0 - b.w) * value(b.lo) + b.w * value(b.lo + 1);
        acc += 0.5 * b.w * dt * (value(b.lo) + end);
    }
    return acc;
}

}  // namespace

State step_conductance(const State& state, const ScalarField& s, const Params& params, double dt,
                       const SolverOptions& solver, StepStats* stats) {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("step_conductance: dt must be > 0");
    if (!(s.grid == state.p.grid)) throw InvalidArgument("step_conductance: grid mismatch");
    return advance(state, s, params, dt, heat_operator(state.p.grid, dt, params.alpha), solver, stats);
}

EnergyTerms energy_terms(const State& state, const ScalarField& s, const Params& params) {
    const Grid2D& g = state.p.grid;
    EnergyTerms e;
    ScalarField m2(g), work(g), pot(g);
    const double gam = params.gamma;
    const double eps = params.eps_reg;
    const double eps_pow = eps > 0.0 ? std::pow(eps, gam) : 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double q = norm2(state.m.at(k));
        m2[k] = q;
        if (gam == 1.0) {
            work[k] = q;
            pot[k] = 0.5 * q;
        } else {
            const double base = q + eps;
            work[k] = base > 0.0 ? std::pow(base, gam - 1.0) * q : 0.0;
            pot[k] = (std::pow(base, gam) - eps_pow) / (2.0 * gam);
        }
    }
    e.m_sq = integrate(m2);
    e.grad_m_sq = dirichlet_energy(state.m.component(1)) + dirichlet_energy(state.m.component(2));
    e.mp_sq = projected_gradient_energy(state.m, state.p);
    e.grad_p_sq = dirichlet_energy(state.p);
    e.reaction_work = integrate(work);
    e.potential = integrate(pot);
    e.source_work = inner(s, state.p);
    return e;
}

const std::vector<std::string>& monitor_columns() {
    static const std::vector<std::string> cols = {
        "t",           "sup_grad_p",  "sup_grad_m",  "sup_v",
        "l2_m",        "l2_grad_m",   "l2gamma_m",   "energy5_lhs",
        "energy5_rhs", "energy5_rel_residual",       "energy6_lhs",
        "energy6_rhs", "energy6_rel_residual",       "cg_iters"};
    return cols;
}

void write_monitor_csv(const std::filesystem::path& path, const std::vector<MonitorRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("write_monitor_csv: cannot open " + path.string());
    const auto& cols = monitor_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    char buf[64];
    for (const MonitorRecord& r : records) {
        const double vals[] = {r.t,           r.sup_grad_p,  r.sup_grad_m,
                               r.sup_v,       r.l2_m,        r.l2_grad_m,
                               r.l2gamma_m,   r.energy5_lhs, r.energy5_rhs,
                               r.energy5_rel_residual,       r.energy6_lhs,
                               r.energy6_rhs, r.energy6_rel_residual};
        for (double v : vals) {
            std::snprintf(buf, sizeof buf, "%.17g,", v);
            out << buf;
        }
        out << r.cg_iters << '\n';
    }
    if (!out) throw Error("write_monitor_csv: write failed for " + path.string());
}

std::vector<MonitorRecord> read_monitor_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("read_monitor_csv: cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    std::string expected;
    for (const auto& c : monitor_columns()) expected += (expected.empty() ? "" : ",") + c;
    if (line != expected) throw InvalidArgument("read_monitor_csv: line 1: unexpected header");
    std::vector<MonitorRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw InvalidArgument("read_monitor_csv: line " + std::to_string(lineno) +
                                      ": bad number '" + cell + "'");
            }
        }
        if (v.size() != monitor_columns().size()) {
            throw InvalidArgument("read_monitor_csv: line " + std::to_string(lineno) +
                                  ": wrong column count");
        }
        MonitorRecord r;
        double* fields[] = {&r.t,           &r.sup_grad_p,  &r.sup_grad_m,
                            &r.sup_v,       &r.l2_m,        &r.l2_grad_m,
                            &r.l2gamma_m,   &r.energy5_lhs, &r.energy5_rhs,
                            &r.energy5_rel_residual,        &r.energy6_lhs,
                            &r.energy6_rhs, &r.energy6_rel_residual};
        for (std::size_t c = 0; c < 13; ++c) *fields[c] = v[c];
        r.cg_iters = static_cast<int>(v[13]);
        out.push_back(r);
    }
    return out;
}

Trajectory run_simulation(const SimulationConfig& config) {
    const Params& params = config.params;
    params.validate();
    const Grid2D& g = config.s.grid;
    g.validate();
    config.s.validate();
    config.m0.validate();
    if (!(config.m0.grid == g)) throw InvalidArgument("run_simulation: s and m0 grids differ");
    if (!(config.T >= 0.0) || !std::isfinite(config.T)) {
        throw InvalidArgument("run_simulation: T must be finite and >= 0");
    }
    if (config.dt < 0.0 || !std::isfinite(config.dt)) {
        throw InvalidArgument("run_simulation: dt must be > 0 (or 0 for the default)");
    }
    if (config.snapshot_stride < 0) throw InvalidArgument("run_simulation: snapshot_stride must be >= 0");

    const double dt_req = config.dt > 0.0 ? config.dt : 0.25 * std::min(g.hx, g.hy);
    const long nsteps =
        config.T == 0.0 ? 0 : std::max(1L, static_cast<long>(std::ceil(config.T / dt_req - 1e-9)));
    const double dt = nsteps ? config.T / static_cast<double>(nsteps) : dt_req;

    Trajectory traj;
    traj.params = params;
    traj.s = config.s;
    traj.dt = dt;

    const InitialPressure init = solve_p0(config.m0, config.s, config.solver);
    State st{config.m0, init.p0, 0.0};

    double cum_grad_m = 0.0, cum_mp = 0.0, cum_react = 0.0, cum_grad_p = 0.0, cum_sp = 0.0;
    double cum_mt = 0.0;
    EnergyTerms prev;
    EnergyTerms first;

    auto record = [&](const State& state, int iters, double mt_sq) {
        const EnergyTerms e = energy_terms(state, config.s, params);
        const bool start = traj.times.empty();
        if (start) {
            first = e;
        } else {
            const double h = state.t - traj.times.back();
            cum_grad_m += 0.5 * h * (prev.grad_m_sq + e.grad_m_sq);
            cum_mp += 0.5 * h * (prev.mp_sq + e.mp_sq);
            cum_react += 0.5 * h * (prev.reaction_work + e.reaction_work);
            cum_grad_p += 0.5 * h * (prev.grad_p_sq + e.grad_p_sq);
            cum_sp += 0.5 * h * (prev.source_work + e.source_work);
            cum_mt += h * mt_sq;
        }
        prev = e;
        const double a2 = params.alpha * params.alpha;
        const double b2 = params.beta * params.beta;

        MonitorRecord r;
        r.t = state.t;
        r.sup_grad_p = max_abs(magnitude(gradient(state.p)));
        r.sup_grad_m = sup_jacobian(state.m);
        r.sup_v = max_abs(compute_v(state.m, state.p));
        r.l2_m = std::sqrt(e.m_sq);
        r.l2_grad_m = std::sqrt(e.grad_m_sq);
        r.l2gamma_m = lp_norm(magnitude(state.m), 2.0 * params.gamma);
        r.energy5_lhs = 0.5 * e.m_sq + a2 * cum_grad_m + b2 * cum_mp + cum_react + 2.0 * b2 * cum_grad_p;
        r.energy5_rhs = 0.5 * first.m_sq + 2.0 * b2 * cum_sp;
        r.energy5_rel_residual = rel_gap(r.energy5_lhs, r.energy5_rhs);
        r.energy6_lhs = cum_mt + 0.5 * a2 * e.grad_m_sq + 0.5 * b2 * (e.mp_sq + e.grad_p_sq) + e.potential;
        r.energy6_rhs = 0.5 * a2 * first.grad_m_sq + 0.5 * b2 * (first.mp_sq + first.grad_p_sq) +
                        first.potential;
        r.energy6_rel_residual = rel_gap(r.energy6_lhs, r.energy6_rhs);
        r.cg_iters = iters;

        traj.times.push_back(state.t);
        traj.records.push_back(r);
        traj.terms.push_back(e);
        traj.mt_sq.push_back(mt_sq);
    };

    record(st, init.iterations, 0.0);
    traj.states.push_back(st);
    traj.state_steps.push_back(0);

    if (nsteps == 0) return traj;
    const Stencil9 heat = heat_operator(g, dt, params.alpha);
    for (long n = 1; n <= nsteps; ++n) {
        State next;
        StepStats stats;
        try {
            next = advance(st, config.s, params, dt, heat, config.solver, &stats);
        } catch (const Error& e) {
            traj.completed = false;
            traj.failure = e.what();
            if (traj.state_steps.back() != static_cast<std::size_t>(n - 1)) {
                traj.states.push_back(st);
                traj.state_steps.push_back(static_cast<std::size_t>(n - 1));
            }
            return traj;
        }
        if (n == nsteps) next.t = config.T;  // no round-off drift at the end
        double mt = 0.0;
        {
            ScalarField d2(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                const double a = (next.m.c1[k] - st.m.c1[k]) / dt;
                const double b = (next.m.c2[k] - st.m.c2[k]) / dt;
                d2[k] = a * a + b * b;
            }
            mt = integrate(d2);
        }
        st = std::move(next);
        record(st, stats.pressure_iterations + stats.diffusion_iterations, mt);
        const bool keep = n == nsteps ||
                          (config.snapshot_stride > 0 && n % config.snapshot_stride == 0);
        if (keep) {
            traj.states.push_back(st);
            traj.state_steps.push_back(static_cast<std::size_t>(n));
        }
    }
    return traj;
}

IdentityReport energy_identity_5(const Trajectory& traj, double tau) {
    const Bracket b = locate(traj.times, tau);
    const auto& T = traj.terms;
    const std::size_t n = T.size();
    const double a2 = traj.params.alpha * traj.params.alpha;
    const double b2 = traj.params.beta * traj.params.beta;
    auto ti = [&](auto member) {
        return time_integral(traj.times, b, [&](std::size_t k) { return T[k].*member; });
    };
    IdentityReport r;
    r.tau = tau;
    r.lhs = 0.5 * at(b, n, [&](std::size_t k) { return T[k].m_sq; }) +
            a2 * ti(&EnergyTerms::grad_m_sq) + b2 * ti(&EnergyTerms::mp_sq) +
            ti(&EnergyTerms::reaction_work) + 2.0 * b2 * ti(&EnergyTerms::grad_p_sq);
    r.rhs = 0.5 * T.front().m_sq + 2.0 * b2 * ti(&EnergyTerms::source_work);
    r.rel_residual = rel_gap(r.lhs, r.rhs);
    return r;
}

IdentityReport energy_identity_6(const Trajectory& traj, double tau) {
    const Bracket b = locate(traj.times, tau);
    const auto& T = traj.terms;
    const std::size_t n = T.size();
    const double a2 = traj.params.alpha * traj.params.alpha;
    const double b2 = traj.params.beta * traj.params.beta;

    // piecewise-constant backward difference on each step
    double mt = 0.0;
    for (std::size_t k = 1; k <= b.lo && k < n; ++k) mt += (traj.times[k] - traj.times[k - 1]) * traj.mt_sq[k];
    if (b.w > 0.0 && b.lo + 1 < n) {
        mt += b.w * (traj.times[b.lo + 1] - traj.times[b.lo]) * traj.mt_sq[b.lo + 1];
    }
    auto state_part = [&](std::size_t k) {
        return 0.5 * a2 * T[k].grad_m_sq + 0.5 * b2 * (T[k].mp_sq + T[k].grad_p_sq) + T[k].potential;
    };
    IdentityReport r;
    r.tau = tau;
    r.lhs = mt + at(b, n, state_part);
    r.rhs = state_part(0);
    r.rel_residual = rel_gap(r.lhs, r.rhs);
    return r;
}

BoundReport gradient_bound_monitor(const Trajectory& traj, const Params& params) {
    BoundReport rep;
    const double two_r = 2.0 * params.r_exp;
    for (const MonitorRecord& rec : traj.records) {
        rep.samples.push_back({rec.t, rec.sup_v, rec.sup_grad_m, rec.sup_grad_p});
        rep.c1 = std::max(rep.c1, rec.sup_v / (std::pow(rec.sup_grad_m, two_r) + 1.0));
        rep.run_sup_grad_m = std::max(rep.run_sup_grad_m, rec.sup_grad_m);
        rep.run_sup_grad_p = std::max(rep.run_sup_grad_p, rec.sup_grad_p);
        rep.run_sup_v = std::max(rep.run_sup_v, rec.sup_v);
    }
    const double T = traj.times.empty() ? 0.0 : traj.times.back();
    if (T > 0.0) {
        const double scale = std::pow(T, -1.0 + 0.5 * params.delta_exp);
        rep.c2 = rep.run_sup_grad_m / (scale * (rep.run_sup_grad_p * rep.run_sup_grad_p + 1.0) + 1.0);
    }
    return rep;
}

}  // namespace hucai
