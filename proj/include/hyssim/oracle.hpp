#pragma once

// Exact provisioning optimizer over a slotted demand model, used to bound
// what any allocator could achieve. Provides integer FPGA fleet scheduling by
// dynamic programming on small horizons, a closed-form CPU completion, a
// canonical objective evaluator shared with enumeration-based checks, Pareto
// sweeps over energy/cost blends, and an LP/MILP emitter for external solvers.

#include <cstdint>
#include <string>
#include <vector>

#include "hyssim/model.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim {

struct MilpInstance {
  int T = 0;                   // number of slots
  double delta_s = 0;          // slot length in seconds
  std::vector<double> demand;  // X_t: requests that must be served in slot t

  double r_cpu = 0;   // requests one busy CPU serves per slot
  double r_fpga = 0;  // requests one busy FPGA serves per slot
  int n_cpu = 0;      // CPU fleet ceiling
  int n_fpga = 0;     // FPGA fleet ceiling
  int s_f = 0;        // FPGA allocation lead in slots (solver supports 0 or 1)

  // Per-slot energy (J) of one worker in each state.
  double e_cpu_busy = 0, e_fpga_busy = 0;
  double e_cpu_idle = 0, e_fpga_idle = 0;
  // Boundary energy (J) per worker allocated / deallocated.
  double a_cpu = 0, a_fpga = 0;
  double d_cpu = 0, d_fpga = 0;
  // Per-slot rental cost ($) of one worker.
  double c_cpu = 0, c_fpga = 0;

  double w_energy = 0;  // objective weight on joules
  double w_cost = 0;    // objective weight on dollars
  bool rate_geq = false;  // emit demand rows as >= instead of ==
};

struct MilpAssignment {
  std::vector<double> y_fpga;  // fleet size per slot (integer-valued)
  std::vector<double> y_cpu;   // fleet size per slot (may be fractional)
};

struct EvalResult {
  double objective = 0;
  double energy_j = 0;
  double cost_usd = 0;
  bool feasible = false;
};

struct MilpSolution {
  MilpAssignment assignment;
  double objective = 0;
  double energy_j = 0;
  double cost_usd = 0;
};

struct ParetoPoint {
  double alpha = 0;
  double energy_j = 0;
  double cost_usd = 0;
};

struct OracleConfig {
  double interval_s = 10;  // slot length for instances built from rate traces
  int n_fpga = 12;
  int n_cpu = 64;
  bool rate_geq = false;
  double d_cpu_j = 0;   // deallocation energy per worker
  double d_fpga_j = 0;
  int s_f = -1;         // -1: derive from the FPGA spin-up latency
};

// Tiny worked single-slot default: one FPGA beats the CPU fleet at 1000 J
// against 3001.5 J.
MilpInstance motivation_instance();

// Solver envelope and model-contract checks; throws UsageError (with a
// pointer at the LP emitter when only the envelope is exceeded) or
// ProvisioningError when demand exceeds total capacity.
void validate_instance(const MilpInstance& in);

// The cheapest CPU schedule for fixed FPGA counts: FPGA-first busy split plus
// single-slot keep-idle bridging when holding beats cycling.
MilpAssignment complete_assignment(const MilpInstance& in,
                                   const std::vector<double>& y_fpga);

// Canonical feasibility + objective/breakdown evaluation of a complete
// assignment. Every optimizer and checker scores through this one function so
// equal assignments produce bitwise-equal numbers.
EvalResult evaluate_assignment(const MilpInstance& in, const MilpAssignment& a);

// Exact minimizer; ties broken toward the lexicographically smallest FPGA
// schedule.
MilpSolution solve_exact(const MilpInstance& in);

// Normalized blend weights: w_energy = alpha / (FPGA busy J per slot),
// w_cost = (1 - alpha) / (FPGA rental $ per slot); the endpoints zero the
// other weight exactly.
void set_alpha_weights(MilpInstance& in, double alpha);

std::vector<ParetoPoint> pareto_sweep(const MilpInstance& base,
                                      const std::vector<double>& alphas);

// Same instance with the other class's ceiling forced to zero.
MilpInstance restrict_homogeneous(const MilpInstance& in, WorkerClass keep);

// Slot the rate trace into demand volumes and derive worker coefficients.
MilpInstance instance_from_rates(const RateTrace& rt, const OracleConfig& cfg,
                                 const WorkerClassParams& cpu,
                                 const WorkerClassParams& fpga);

// CPLEX-LP text of the instance (integer FPGA counts, continuous CPU counts).
std::string emit_lp(const MilpInstance& in);

// Several applications sharing one pool: per-application copies of all rows
// plus per-slot capacity rows coupling their fleet sizes.
std::string emit_lp_multi(const std::vector<MilpInstance>& apps,
                          int shared_n_cpu, int shared_n_fpga);

}  // namespace hyssim
