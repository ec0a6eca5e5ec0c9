#include "modes.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "hucai/dynamics.hpp"
#include "hucai/error.hpp"
#include "hucai/field_io.hpp"
#include "hucai/heatpot.hpp"
#include "hucai/profiles.hpp"
#include "hucai/verify.hpp"

namespace hucai::app {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// NaN and inf are not JSON numbers
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// Records checks for the report and the log; tracks overall status.
struct Checks {
    std::ostream& log;
    json list = json::array();
    bool ok = true;

    void add(const std::string& name, bool pass, double max_error, std::optional<double> order = std::nullopt,
             json extra = json::object()) {
        json c;
        c["name"] = name;
        c["status"] = pass ? "pass" : "fail";
        c["max_error"] = num(max_error);
        c["observed_order"] = order ? num(*order) : json(nullptr);
        for (auto& [k, v] : extra.items()) c[k] = v;
        list.push_back(c);
        ok = ok && pass;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-4s %-24s max_error=%.3e", pass ? "PASS" : "FAIL", name.c_str(), max_error);
        log << buf;
        if (order) log << " order=" << *order;
        log << '\n';
    }
    void info(const std::string& name, double value) {
        json c;
        c["name"] = name;
        c["status"] = "info";
        c["max_error"] = num(value);
        c["observed_order"] = nullptr;
        list.push_back(c);
        char buf[256];
        std::snprintf(buf, sizeof buf, "INFO %-24s value=%.3e", name.c_str(), value);
        log << buf << '\n';
    }
};

constexpr const char* kFilePrefix = "file:";

bool is_file_ref(const std::string& s) { return s.rfind(kFilePrefix, 0) == 0; }

struct Inputs {
    ScalarField s;
    VectorField2 m0;
};

Inputs load_inputs(const RunConfig& cfg, int cells) {
    std::optional<Snapshot> s_file, m_file;
    if (is_file_ref(cfg.source)) s_file = read_snapshot(cfg.source.substr(5));
    if (is_file_ref(cfg.m0)) m_file = read_snapshot(cfg.m0.substr(5));
    Grid2D g = Grid2D::unit_square(cells);
    if (s_file) g = s_file->grid;
    else if (m_file) g = m_file->grid;
    if (s_file && m_file && !(s_file->grid == m_file->grid)) {
        throw InvalidArgument("config: source and m0 files live on different grids");
    }
    Inputs in;
    in.s = s_file ? s_file->scalar("s") : source_profile(cfg.source, g, cfg.source_amplitude, cfg.source_width);
    in.m0 = m_file ? m_file->vector("m1", "m2") : conductance_profile(cfg.m0, g, cfg.m0_amplitude);
    return in;
}

SimulationConfig simulation_config(const RunConfig& cfg, const Inputs& in, double T) {
    SimulationConfig sc;
    sc.params = cfg.params;
    sc.s = in.s;
    sc.m0 = in.m0;
    sc.T = T;
    sc.dt = cfg.dt;
    sc.snapshot_stride = cfg.snapshot_stride;
    sc.solver.tol = cfg.tol;
    sc.solver.max_iter = cfg.max_iter;
    return sc;
}

json identity_json(const IdentityReport& r) {
    return json{{"tau", num(r.tau)}, {"lhs", num(r.lhs)}, {"rhs", num(r.rhs)}, {"rel_residual", num(r.rel_residual)}};
}

json record_json(const MonitorRecord& r) {
    return json{{"t", num(r.t)}, {"sup_grad_p", num(r.sup_grad_p)}, {"sup_grad_m", num(r.sup_grad_m)},
                {"sup_v", num(r.sup_v)}, {"l2_m", num(r.l2_m)}};
}

bool records_finite(const std::vector<MonitorRecord>& rs) {
    for (const MonitorRecord& r : rs) {
        for (double x : {r.sup_grad_p, r.sup_grad_m, r.sup_v, r.l2_m, r.energy5_rel_residual, r.energy6_rel_residual})
            if (!std::isfinite(x)) return false;
    }
    return true;
}

// -- simulate ------------------------------------------------------------

int run_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const Inputs in = load_inputs(cfg, cfg.cells);
    const Trajectory tr = run_simulation(simulation_config(cfg, in, cfg.T));

    write_monitor_csv(out / "monitor.csv", tr.records);
    fs::create_directories(out / "snapshots");
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "state_%06zu.csv", tr.state_steps[k]);
        write_snapshot(out / "snapshots" / name, make_state_snapshot(tr.states[k].p, tr.states[k].m));
    }

    Checks checks{log};
    checks.add("run_completed", tr.completed, tr.completed ? 0.0 : 1.0);
    checks.add("monitors_finite", records_finite(tr.records), 0.0);

    json j;
    j["mode"] = "simulate";
    j["cells"] = in.s.grid.nx - 1;
    j["completed"] = tr.completed;
    j["failure"] = tr.failure;
    j["dt"] = num(tr.dt);
    j["steps"] = tr.times.size() - 1;
    j["final_time"] = num(tr.final_time());
    j["initial"] = record_json(tr.records.front());
    j["final"] = record_json(tr.records.back());
    if (tr.times.size() > 1) {
        j["identity5"] = identity_json(energy_identity_5(tr, tr.final_time()));
        j["identity6"] = identity_json(energy_identity_6(tr, tr.final_time()));
    }
    const BoundReport b = gradient_bound_monitor(tr, cfg.params);
    j["bounds"] = json{{"c1", num(b.c1)}, {"c2", num(b.c2)}, {"run_sup_grad_m", num(b.run_sup_grad_m)},
                       {"run_sup_grad_p", num(b.run_sup_grad_p)}, {"run_sup_v", num(b.run_sup_v)}};
    j["checks"] = checks.list;
    write_json(out / "summary.json", j);
    return checks.ok ? 0 : 1;
}

// -- verify --------------------------------------------------------------

int run_verify(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ManufacturedCase mc = ManufacturedCase::smooth();
    const auto pts = random_points(static_cast<std::size_t>(cfg.verify_points), cfg.seed);
    Checks checks{log};

    const double hid = hessian_identity_check(mc, pts);
    checks.add("hessian_identity", hid <= 1e-12, hid);

    const CramerReport cr = cramer_check(mc, pts, mc.v_floor);
    checks.add("det_E", cr.det_rel_error <= 1e-12 && cr.points_used > 0, cr.det_rel_error);
    checks.add("cramer_hessian", cr.reconstruction_rel_error <= 1e-10 && cr.points_used > 0,
               cr.reconstruction_rel_error, std::nullopt, json{{"points_used", cr.points_used}});
    checks.info("cramer_printed_row", cr.printed_rel_error);

    const ResidualStudy phi = phi_equation_residual(mc, cfg.residual_cells);
    double ratio_lo = std::numeric_limits<double>::infinity(), ratio_hi = 0.0;
    for (double r : phi.gradient_ratios) {
        ratio_lo = std::min(ratio_lo, r);
        ratio_hi = std::max(ratio_hi, r);
    }
    checks.add("grad_ln_v_identity", ratio_lo >= 3.0 && ratio_hi <= 5.0,
               phi.levels.back().gradient_identity_error, std::log2(ratio_lo),
               json{{"error_ratios", vec(phi.gradient_ratios)}});
    checks.add("phi_weak_residual", phi.min_order() >= 0.8, phi.levels.back().residual, phi.min_order(),
               json{{"orders", vec(phi.orders)}});

    const ResidualStudy vr = v_equation_residual(mc, cfg.residual_cells);
    checks.add("v_weak_residual", vr.min_order() >= 0.8, vr.levels.back().residual, vr.min_order(),
               json{{"orders", vec(vr.orders)}});

    const ManufacturedCase aff = ManufacturedCase::affine({0.3, -0.4}, {1.0, 2.0}, 0.5);
    const ResidualStudy ar = v_equation_residual(aff, {16, 32});
    double aff_err = 0.0;
    for (const auto& l : ar.levels) aff_err = std::max(aff_err, l.residual);
    checks.add("affine_v_residual", aff_err <= 1e-12, aff_err);

    const SweepResult ys = ynb_sweep();
    checks.add("ynb_sweep", ys.violations == 0 && ys.qualifying > 0, ys.violations, std::nullopt,
               json{{"evaluated", ys.evaluated}, {"qualifying", ys.qualifying}});

    json j;
    j["mode"] = "verify";
    j["case"] = mc.name;
    j["seed"] = cfg.seed;
    j["points"] = cfg.verify_points;
    j["checks"] = checks.list;
    write_json(out / "verify_report.json", j);
    return checks.ok ? 0 : 1;
}

// -- mms -----------------------------------------------------------------

int run_mms(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const auto rows = mms_convergence(ManufacturedCase::smooth(), cfg.mms_cells);
    Checks checks{log};
    std::ofstream csv(out / "mms_orders.csv");
    if (!csv) throw Error("cannot write mms_orders.csv");
    csv << "operator,cells,error,order\n";
    for (const OrderRow& r : rows) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = 0; k < r.cells.size(); ++k) {
            char buf[160];
            if (k == 0) {
                std::snprintf(buf, sizeof buf, "%s,%d,%.17g,\n", r.name.c_str(), r.cells[k], r.errors[k]);
            } else {
                std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g\n", r.name.c_str(), r.cells[k], r.errors[k],
                              r.orders[k - 1]);
            }
            csv << buf;
        }
        for (double o : r.orders) {
            lo = std::min(lo, o);
            hi = std::max(hi, o);
        }
        checks.add(r.name, lo >= 1.8 && hi <= 2.2, r.errors.back(), lo, json{{"orders", vec(r.orders)}});
    }
    json j;
    j["mode"] = "mms";
    j["cells"] = cfg.mms_cells;
    j["checks"] = checks.list;
    write_json(out / "mms_summary.json", j);
    return checks.ok ? 0 : 1;
}

// -- degiorgi ------------------------------------------------------------

int run_degiorgi(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    VectorField2 m;
    ScalarField p, s;
    json origin;
    if (!cfg.degiorgi_snapshot.empty()) {
        const Snapshot snap = read_snapshot(cfg.degiorgi_snapshot);
        m = snap.vector("m1", "m2");
        p = snap.scalar("p");
        bool has_s = false;
        for (const auto& n : snap.names) has_s = has_s || n == "s";
        if (has_s) {
            s = snap.scalar("s");
        } else if (is_file_ref(cfg.source)) {
            s = read_snapshot(cfg.source.substr(5)).scalar("s");
        } else {
            s = source_profile(cfg.source, snap.grid, cfg.source_amplitude, cfg.source_width);
        }
        origin = json{{"snapshot", cfg.degiorgi_snapshot}};
    } else {
        const Inputs in = load_inputs(cfg, cfg.cells);
        const Trajectory tr = run_simulation(simulation_config(cfg, in, cfg.T));
        if (!tr.completed) throw Error("degiorgi: simulation failed: " + tr.failure);
        m = tr.final_state().m;
        p = tr.final_state().p;
        s = in.s;
        origin = json{{"simulation_T", num(tr.final_time())}, {"cells", in.s.grid.nx - 1}};
    }
    const AuxFields aux = compute_aux(m, p, s, cfg.params);
    const GammaInputs gin{m, aux.H, aux.h, aux.K};
    const DeGiorgiReport rep = de_giorgi_profile(aux.v, {*cfg.ball_x, *cfg.ball_y}, *cfg.ball_r, cfg.params,
                                                 cfg.degiorgi_K, &gin, cfg.degiorgi_levels);
    write_degiorgi_csv(out / "degiorgi.csv", rep);

    Checks checks{log};
    const double yN = rep.levels.back().y_n;
    checks.add("y_N_below_1e-12", yN < 1e-12, yN);
    checks.add("sup_half_ball_le_K", rep.sup_bounded, rep.sup_half_ball / rep.K);

    json j;
    j["mode"] = "degiorgi";
    j["field"] = origin;
    j["x0"] = {rep.x0.x, rep.x0.y};
    j["R"] = rep.R;
    j["r"] = rep.r;
    j["K"] = num(rep.K);
    j["K_from_formula"] = rep.K_from_formula;
    j["c"] = num(rep.c);
    j["Gamma"] = num(rep.Gamma);
    j["y0"] = num(rep.y0);
    j["y_N"] = num(yN);
    j["levels"] = rep.levels.size() - 1;
    j["sup_half_ball"] = num(rep.sup_half_ball);
    j["nonincreasing"] = rep.nonincreasing;
    j["fit"] = json{{"c", num(rep.fit_c)}, {"b", num(rep.fit_b)}, {"alpha", rep.fit_alpha}, {"points", rep.fit_points}};
    if (std::isfinite(rep.fit_c) && rep.fit_c > 0.0 && std::isfinite(rep.fit_b) && rep.fit_b > 1.0 && rep.y0 > 0.0) {
        const SequenceReport sq = ynb_sequence(rep.fit_c, rep.fit_b, 1.0, rep.y0, cfg.degiorgi_levels);
        j["fitted_sequence"] = json{{"threshold", num(sq.threshold)}, {"below_threshold", sq.below_threshold},
                                    {"verdict", to_string(sq.verdict)}};
    }
    j["checks"] = checks.list;
    write_json(out / "degiorgi_summary.json", j);
    return checks.ok ? 0 : 1;
}

// -- heatpot -------------------------------------------------------------

int run_heatpot(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    HeatPotentialConfig hc;
    hc.alpha = cfg.params.alpha;
    hc.panels_per_octave = cfg.heat_panels_per_octave;
    hc.octaves = cfg.heat_octaves;
    hc.points_per_sigma = cfg.heat_points_per_sigma;
    hc.truncation = cfg.heat_truncation;
    hc.delta = cfg.params.delta_exp;
    hc.validate();
    Checks checks{log};

    const double norm_err = kernel_normalization_error(hc);
    checks.add("kernel_normalization", norm_err <= 1e-6, norm_err);

    const std::vector<double> res = duhamel_refinement(3, hc);
    double min_ratio = std::numeric_limits<double>::infinity();
    std::vector<double> ratios;
    for (std::size_t k = 0; k + 1 < res.size(); ++k) {
        ratios.push_back(res[k] / res[k + 1]);
        min_ratio = std::min(min_ratio, ratios.back());
    }
    checks.add("duhamel_residual", min_ratio >= 2.0, res.back(), std::log2(min_ratio),
               json{{"residuals", vec(res)}, {"ratios", vec(ratios)}});

    const SweepResult fs_ = fixed_point_sweep();
    checks.add("fixed_point_sweep", fs_.violations == 0 && fs_.qualifying > 0, fs_.violations, std::nullopt,
               json{{"evaluated", fs_.evaluated}, {"qualifying", fs_.qualifying}});
    const FixedPointG fp = fixed_point_g(cfg.heat_eps, cfg.params.r_exp, cfg.heat_c);

    // Forcing field of a short simulation, frozen into a space-time source.
    RunConfig sim = cfg;
    sim.snapshot_stride = 1;
    const Inputs in = load_inputs(sim, cfg.heat_cells);
    const Trajectory tr = run_simulation(simulation_config(sim, in, cfg.heat_T));
    if (!tr.completed) throw Error("heatpot: simulation failed: " + tr.failure);
    std::vector<VectorField2> frames;
    std::vector<double> times;
    for (const State& st : tr.states) {
        frames.push_back(forcing_field(st.m, st.p, cfg.params));
        times.push_back(st.t);
    }
    const HeatSource src = HeatSource::from_frames(std::move(frames), std::move(times));
    std::vector<double> ts;
    for (int k = 0; k <= 4; ++k) ts.push_back(cfg.heat_T * std::pow(10.0, -2.0 + 0.5 * k));
    const std::vector<Vec2> pts{{0.5, 0.5}, {0.25, 0.25}, {0.75, 0.5}, {0.5, 0.25}, {0.3, 0.7}};

    std::ofstream csv(out / "heat_scaling.csv");
    if (!csv) throw Error("cannot write heat_scaling.csv");
    csv << "level,t,sup_grad_u,fitted_exponent\n";
    json levels = json::array();
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    bool defined = true;
    for (int l = 0; l < 3; ++l) {
        HeatPotentialConfig q = hc;
        q.panels_per_octave = hc.panels_per_octave << l;
        q.points_per_sigma = hc.points_per_sigma * (1 << l);
        const ScalingReport sr = potential_gradient_scaling(src, q, ts, pts);
        for (const ScalingRow& row : sr.rows) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", l, row.t, row.sup_grad_u, sr.slope);
            csv << buf;
        }
        levels.push_back(json{{"level", l}, {"defined", sr.defined}, {"slope", num(sr.slope)}, {"c_fit", num(sr.c_fit)}});
        defined = defined && sr.defined;
        cmin = std::min(cmin, sr.c_fit);
        cmax = std::max(cmax, sr.c_fit);
    }
    const double spread = cmin > 0.0 ? cmax / cmin : std::numeric_limits<double>::infinity();
    checks.add("c_fit_stability", defined && spread <= 2.0, spread, std::nullopt, json{{"levels", levels}});

    json j;
    j["mode"] = "heatpot";
    j["alpha"] = hc.alpha;
    j["delta"] = hc.delta;
    j["fixed_point"] = json{{"eps_hat", cfg.heat_eps}, {"r", cfg.params.r_exp}, {"c", cfg.heat_c},
                            {"tau0", num(fp.tau0)}, {"g_tau0", num(fp.g_tau0)},
                            {"condition_holds", fp.condition_holds}, {"bound_holds", fp.bound_holds},
                            {"lower_crossing", fp.lower_crossing ? num(*fp.lower_crossing) : json(nullptr)},
                            {"upper_crossing", fp.upper_crossing ? num(*fp.upper_crossing) : json(nullptr)}};
    j["checks"] = checks.list;
    write_json(out / "heatpot_summary.json", j);
    return checks.ok ? 0 : 1;
}

}  // namespace

int run(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    cfg.validate();
    fs::create_directories(out_dir);
    switch (cfg.mode) {
        case Mode::Simulate: return run_simulate(cfg, out_dir, log);
        case Mode::Verify: return run_verify(cfg, out_dir, log);
        case Mode::Mms: return run_mms(cfg, out_dir, log);
        case Mode::DeGiorgi: return run_degiorgi(cfg, out_dir, log);
        case Mode::HeatPot: return run_heatpot(cfg, out_dir, log);
    }
    return 1;
}

}  // namespace hucai::app
