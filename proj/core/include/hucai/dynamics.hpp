#pragma once

// Time integration of the conductance equation coupled to the pressure
// solve, energy-balance monitors and gradient-bound tracking.

#include <filesystem>
#include <string>
#include <vector>

#include "hucai/elliptic.hpp"
#include "hucai/grid.hpp"
#include "hucai/model.hpp"

namespace hucai {

struct StepStats {
    int pressure_iterations = 0;
    int diffusion_iterations = 0;
};

/// One IMEX Euler step:
///   (I - dt alpha^2 Lap_h) m^{n+1} = m^n + dt (forcing(m^n, p^n) - reaction(m^n))
/// followed by the pressure solve with A(m^{n+1}), warm-started from p^n.
/// Throws InstabilityError on non-finite values and SolverError when a linear
/// solve fails.
State step_conductance(const State& state, const ScalarField& s, const Params& params, double dt,
                       const SolverOptions& solver = {}, StepStats* stats = nullptr);

/// Instantaneous integrals entering the two energy balances.
struct EnergyTerms {
    double m_sq = 0.0;           ///< int |m|^2
    double grad_m_sq = 0.0;      ///< int |grad m|^2
    double mp_sq = 0.0;          ///< int (m . grad p)^2
    double grad_p_sq = 0.0;      ///< int |grad p|^2
    double reaction_work = 0.0;  ///< int reaction(m) . m   (= int |m|^(2 gamma) unregularised)
    double potential = 0.0;      ///< int Phi(m), Phi' = reaction (= |m|^(2 gamma)/(2 gamma))
    double source_work = 0.0;    ///< int s p
};

EnergyTerms energy_terms(const State& state, const ScalarField& s, const Params& params);

struct MonitorRecord {
    double t = 0.0;
    double sup_grad_p = 0.0;
    double sup_grad_m = 0.0;
    double sup_v = 0.0;
    double l2_m = 0.0;
    double l2_grad_m = 0.0;
    double l2gamma_m = 0.0;  ///< ||m||_{2 gamma}
    double energy5_lhs = 0.0;
    double energy5_rhs = 0.0;
    double energy5_rel_residual = 0.0;
    double energy6_lhs = 0.0;
    double energy6_rhs = 0.0;
    double energy6_rel_residual = 0.0;
    int cg_iters = 0;
};

/// Column names of the monitor CSV, in file order.
const std::vector<std::string>& monitor_columns();
void write_monitor_csv(const std::filesystem::path& path, const std::vector<MonitorRecord>& records);
std::vector<MonitorRecord> read_monitor_csv(const std::filesystem::path& path);

struct SimulationConfig {
    Params params;
    ScalarField s;
    VectorField2 m0;
    double T = 1.0;
    double dt = 0.0;          ///< 0 selects 0.25 * min(hx, hy)
    int snapshot_stride = 0;  ///< keep every k-th state; 0 keeps first and last only
    SolverOptions solver;
};

struct Trajectory {
    Params params;
    ScalarField s;
    double dt = 0.0;
    std::vector<double> times;              ///< one entry per step, starting at 0
    std::vector<MonitorRecord> records;     ///< aligned with times
    std::vector<EnergyTerms> terms;         ///< aligned with times
    std::vector<double> mt_sq;              ///< int |(m^n - m^{n-1})/dt|^2, 0 at n = 0
    std::vector<State> states;              ///< strided snapshots, strictly increasing t
    std::vector<std::size_t> state_steps;   ///< step index of each snapshot
    bool completed = true;
    std::string failure;                    ///< set when the run aborted

    const State& initial() const { return states.front(); }
    const State& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

/// Initial pressure from m0, then repeated step_conductance. Step failures
/// stop the run; the partial trajectory is returned with completed = false.
Trajectory run_simulation(const SimulationConfig& config);

struct IdentityReport {
    double tau = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_residual = 0.0;
};

/// Mass/dissipation balance at time tau (time integrals by the trapezoid rule):
///   1/2 int|m(tau)|^2 + alpha^2 II|grad m|^2 + beta^2 II(m.grad p)^2 + II reaction(m).m
///     + 2 beta^2 II|grad p|^2  =  1/2 int|m0|^2 + 2 beta^2 II s p
/// Throws InvalidArgument when tau lies outside the trajectory.
IdentityReport energy_identity_5(const Trajectory& traj, double tau);

/// Time-derivative balance at time tau, d_t m by backward differences:
///   II|d_t m|^2 + alpha^2/2 int|grad m|^2 + beta^2/2 int(m.grad p)^2 + beta^2/2 int|grad p|^2
///     + int Phi(m)   evaluated at tau  =  the last four terms at t = 0.
IdentityReport energy_identity_6(const Trajectory& traj, double tau);

struct BoundSample {
    double t = 0.0;
    double sup_v = 0.0;
    double sup_grad_m = 0.0;
    double sup_grad_p = 0.0;
};

/// Smallest constants with
///   sup_v(t) <= c1 (sup_grad_m(t)^(2r) + 1)                      at every recorded t
///   sup_grad_m <= c2 T^(-1+delta/2) (sup_grad_p^2 + 1) + c2       over the whole run
struct BoundReport {
    std::vector<BoundSample> samples;
    double c1 = 0.0;
    double c2 = 0.0;
    double run_sup_grad_m = 0.0;
    double run_sup_grad_p = 0.0;
    double run_sup_v = 0.0;
};

BoundReport gradient_bound_monitor(const Trajectory& traj, const Params& params);

}  // namespace hucai
