#include "hyssim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <string>

#include "hyssim/text.hpp"

namespace hyssim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double x) { return x > 0 ? x : 0.0; }

// FPGA-first busy split: FPGA fleet serves what it can, CPUs take the rest.
void busy_split(const MilpInstance& in, int t, double yf, double* bf, double* bc) {
  const double x = in.demand[t];
  double b = 0;
  double served = 0;
  if (yf > 0 && in.r_fpga > 0) {
    b = std::min(yf, x / in.r_fpga);
    // Compare in demand units so a demand-limited slot leaves an exact zero
    // residual; the divide-then-multiply round trip can round to either side
    // of x and a stray 1e-12 would make a CPU-less instance look infeasible.
    served = std::min(yf * in.r_fpga, x);
  }
  *bf = b;
  const double residual = x - served;
  *bc = residual > 0 ? residual / in.r_cpu : 0.0;
}

double hold_rate(const MilpInstance& in) {
  return in.w_energy * in.e_cpu_idle + in.w_cost * in.c_cpu;
}

double cycle_cost(const MilpInstance& in) {
  return in.w_energy * (in.a_cpu + in.d_cpu);
}

// Cheapest CPU fleet size for a slot given its busy level and the busy levels
// of the neighbouring slots: hold idle workers across a one-slot dip when a
// slot of holding is cheaper than a dealloc/alloc cycle. A pure min/max
// lattice expression so enumerators can reproduce the value bitwise.
double yc_opt(const MilpInstance& in, double bc_prev, double bc, double bc_next) {
  if (!(hold_rate(in) < cycle_cost(in))) return bc;
  const double bridge_to =
      std::min(std::min(bc_prev, bc_next), static_cast<double>(in.n_cpu));
  return std::max(bc, bridge_to);
}

struct StepTerms {
  double energy_j = 0;
  double cost_usd = 0;
};

// Objective contribution of step k: the FPGA fleet boundary k, both classes'
// slot k-1, and the CPU fleet boundary k-1 (between slots k-2 and k-1).
// yf1/yf0 are the FPGA counts around boundary k; bf1/bc1 the busy split of
// slot k-1; yc2/yc1 the CPU counts of slots k-2 and k-1. Out-of-range slots
// contribute zeros. One fixed term order shared by the solver and the
// evaluator keeps equal assignments bitwise-equal in objective.
double step_objective(const MilpInstance& in, int k, double yf1, double yf0,
                      double bf1, double bc1, double yc2, double yc1,
                      StepTerms* out) {
  double e = 0;
  double c = 0;
  if (k <= in.T) {
    e += in.a_fpga * pos(yf0 - yf1) + in.d_fpga * pos(yf1 - yf0);
  }
  if (k >= 1 && k <= in.T) {
    e += in.e_fpga_busy * bf1 + in.e_fpga_idle * (yf1 - bf1);
    c += in.c_fpga * yf1;
    e += in.e_cpu_busy * bc1 + in.e_cpu_idle * (yc1 - bc1);
    c += in.c_cpu * yc1;
  }
  if (k >= 1) {
    e += in.a_cpu * pos(yc1 - yc2) + in.d_cpu * pos(yc2 - yc1);
  }
  if (out) {
    out->energy_j = e;
    out->cost_usd = c;
  }
  return in.w_energy * e + in.w_cost * c;
}

// Allocation-lead window at step k: counts rising into recent boundaries are
// not yet serviceable, so the standing fleet must cover them.
bool window_ok(const MilpInstance& in, int k, double yf2, double yf1, double yf0) {
  if (k < 1) return true;
  if (in.s_f == 0) return yf1 >= pos(yf0 - yf1);
  return yf1 >= pos(yf1 - yf2) + pos(yf0 - yf1);
}

void check_coeff(double v, const char* name) {
  if (std::isnan(v) || std::isinf(v) || v < 0) {
    throw UsageError(std::string("oracle instance: ") + name +
                     " must be finite and non-negative");
  }
}

}  // namespace

MilpInstance motivation_instance() {
  MilpInstance in;
  in.T = 1;
  in.delta_s = 10;
  in.demand = {2.0};
  in.r_cpu = 1;
  in.r_fpga = 2;
  in.n_cpu = 2;
  in.n_fpga = 1;
  in.s_f = 1;
  in.e_cpu_busy = 1500;
  in.e_fpga_busy = 500;
  in.e_cpu_idle = 300;
  in.e_fpga_idle = 200;
  in.a_cpu = 0.75;
  in.a_fpga = 500;
  in.d_cpu = 0;
  in.d_fpga = 0;
  in.c_cpu = 0;
  in.c_fpga = 0;
  in.w_energy = 1;
  in.w_cost = 0;
  return in;
}

void validate_instance(const MilpInstance& in) {
  if (in.T < 1) throw UsageError("oracle instance: need at least one slot");
  if (static_cast<size_t>(in.T) != in.demand.size()) {
    throw UsageError("oracle instance: demand length does not match T");
  }
  if (!(in.delta_s > 0)) throw UsageError("oracle instance: slot length must be positive");
  if (in.n_cpu < 0 || in.n_fpga < 0) {
    throw UsageError("oracle instance: fleet ceilings must be non-negative");
  }
  if (in.n_cpu > 0 && !(in.r_cpu > 0)) {
    throw UsageError("oracle instance: CPU service rate must be positive");
  }
  if (in.n_fpga > 0 && !(in.r_fpga > 0)) {
    throw UsageError("oracle instance: FPGA service rate must be positive");
  }
  check_coeff(in.e_cpu_busy, "e_cpu_busy");
  check_coeff(in.e_fpga_busy, "e_fpga_busy");
  check_coeff(in.e_cpu_idle, "e_cpu_idle");
  check_coeff(in.e_fpga_idle, "e_fpga_idle");
  check_coeff(in.a_cpu, "a_cpu");
  check_coeff(in.a_fpga, "a_fpga");
  check_coeff(in.d_cpu, "d_cpu");
  check_coeff(in.d_fpga, "d_fpga");
  check_coeff(in.c_cpu, "c_cpu");
  check_coeff(in.c_fpga, "c_fpga");
  check_coeff(in.w_energy, "w_energy");
  check_coeff(in.w_cost, "w_cost");
  for (int t = 0; t < in.T; ++t) {
    if (std::isnan(in.demand[t]) || in.demand[t] < 0) {
      throw UsageError("oracle instance: demand must be non-negative");
    }
  }
  if (in.T > 48) {
    throw UsageError(
        "oracle instance: the exact solver handles at most 48 slots; use "
        "--emit-lp and an external solver for longer horizons");
  }
  if (in.n_fpga > 12) {
    throw UsageError(
        "oracle instance: the exact solver handles FPGA ceilings up to 12; "
        "use --emit-lp and an external solver for larger fleets");
  }
  if (in.s_f < 0 || in.s_f > 1) {
    throw UsageError(
        "oracle instance: the exact solver handles allocation leads of 0 or 1 "
        "slots; pick a slot length of at least the FPGA spin-up latency, or "
        "use --emit-lp and an external solver");
  }
  if (in.w_energy > 0 && in.n_fpga > 0 && in.n_cpu > 0 && in.r_fpga > 0 &&
      in.r_cpu > 0) {
    // FPGA-first busy assignment is only optimal when serving one request
    // costs no more active energy on an FPGA than on a CPU.
    const double fpga_premium = (in.e_fpga_busy - in.e_fpga_idle) / in.r_fpga;
    const double cpu_premium = (in.e_cpu_busy - in.e_cpu_idle) / in.r_cpu;
    if (fpga_premium > cpu_premium) {
      throw UsageError(
          "oracle instance: active energy per request is higher on FPGAs than "
          "on CPUs, so the FPGA-first service split is not optimal; use "
          "--emit-lp and an external solver");
    }
  }
  if (2 * hold_rate(in) < cycle_cost(in)) {
    throw UsageError(
        "oracle instance: holding an idle CPU for two slots is cheaper than "
        "an alloc/dealloc cycle, which is outside the closed-form CPU "
        "completion; use --emit-lp and an external solver");
  }
  for (int t = 0; t < in.T; ++t) {
    const double cap = in.r_fpga * static_cast<double>(in.n_fpga) +
                       in.r_cpu * static_cast<double>(in.n_cpu);
    if (in.demand[t] > cap) {
      throw ProvisioningError(
          "oracle instance: slot " + std::to_string(t) + " demand " +
          fmt_g6(in.demand[t]) + " exceeds total service capacity " +
          fmt_g6(cap));
    }
  }
}

MilpAssignment complete_assignment(const MilpInstance& in,
                                   const std::vector<double>& y_fpga) {
  if (static_cast<size_t>(in.T) != y_fpga.size()) {
    throw UsageError("oracle assignment: FPGA schedule length does not match T");
  }
  MilpAssignment a;
  a.y_fpga = y_fpga;
  std::vector<double> bc(in.T);
  for (int t = 0; t < in.T; ++t) {
    double bf;
    busy_split(in, t, y_fpga[t], &bf, &bc[t]);
  }
  a.y_cpu.resize(in.T);
  for (int t = 0; t < in.T; ++t) {
    const double prev = t > 0 ? bc[t - 1] : 0.0;
    const double next = t + 1 < in.T ? bc[t + 1] : 0.0;
    a.y_cpu[t] = yc_opt(in, prev, bc[t], next);
  }
  return a;
}

EvalResult evaluate_assignment(const MilpInstance& in, const MilpAssignment& a) {
  if (a.y_fpga.size() != static_cast<size_t>(in.T) ||
      a.y_cpu.size() != static_cast<size_t>(in.T)) {
    throw UsageError("oracle assignment: schedule lengths do not match T");
  }
  auto yf = [&](int t) {
    return t >= 0 && t < in.T ? a.y_fpga[static_cast<size_t>(t)] : 0.0;
  };
  auto yc = [&](int t) {
    return t >= 0 && t < in.T ? a.y_cpu[static_cast<size_t>(t)] : 0.0;
  };
  EvalResult r;
  r.feasible = true;
  for (int t = 0; t < in.T && r.feasible; ++t) {
    const double y = yf(t);
    if (y < 0 || y > in.n_fpga || std::abs(y - std::nearbyint(y)) > 1e-9) {
      r.feasible = false;
      break;
    }
    double bf, bc;
    busy_split(in, t, y, &bf, &bc);
    if (bc > in.n_cpu) r.feasible = false;
    if (yc(t) < bc || yc(t) > in.n_cpu) r.feasible = false;
  }
  for (int k = 1; k <= in.T + 1 && r.feasible; ++k) {
    if (!window_ok(in, k, yf(k - 2), yf(k - 1), yf(k))) r.feasible = false;
  }
  if (!r.feasible) {
    r.objective = kInf;
    return r;
  }
  double obj = 0, e = 0, c = 0;
  for (int k = in.T + 1; k >= 0; --k) {
    const int t = k - 1;
    double bf1 = 0, bc1 = 0;
    if (t >= 0 && t < in.T) busy_split(in, t, yf(t), &bf1, &bc1);
    StepTerms st;
    const double s =
        step_objective(in, k, yf(k - 1), yf(k), bf1, bc1, yc(k - 2), yc(k - 1), &st);
    obj = s + obj;
    e = st.energy_j + e;
    c = st.cost_usd + c;
  }
  r.objective = obj;
  r.energy_j = e;
  r.cost_usd = c;
  return r;
}

MilpSolution solve_exact(const MilpInstance& in) {
  validate_instance(in);
  const int T = in.T;
  const int V = in.n_fpga + 1;
  const int K = T + 2;  // decision steps: fleet boundaries 0..T+1

  // Busy splits for every (slot, fleet size).
  std::vector<double> bc_tab(static_cast<size_t>(T) * V);
  std::vector<char> ok_tab(static_cast<size_t>(T) * V);
  for (int t = 0; t < T; ++t) {
    for (int y = 0; y < V; ++y) {
      double bf;
      busy_split(in, t, static_cast<double>(y), &bf, &bc_tab[t * V + y]);
      ok_tab[t * V + y] = bc_tab[t * V + y] > in.n_cpu ? 0 : 1;
    }
  }
  auto bc_at = [&](int t, int y) {
    return t >= 0 && t < T ? bc_tab[t * V + y] : 0.0;
  };
  auto yc_at = [&](int t, int y_prev, int y, int y_next) {
    if (t < 0 || t >= T) return 0.0;
    return yc_opt(in, bc_at(t - 1, y_prev), bc_at(t, y), bc_at(t + 1, y_next));
  };
  // State entering step k holds (Y_{k-3}, Y_{k-2}, Y_{k-1}); choosing Y_k
  // supplies everything the step's charges depend on.
  auto step_for = [&](int k, int y3, int y2, int y1, int y0) {
    double bf1 = 0, bc1 = 0;
    if (k >= 1 && k <= T) busy_split(in, k - 1, static_cast<double>(y1), &bf1, &bc1);
    const double yc1 = yc_at(k - 1, y2, y1, y0);
    const double yc2 = yc_at(k - 2, y3, y2, y1);
    return step_objective(in, k, static_cast<double>(y1), static_cast<double>(y0),
                          bf1, bc1, yc2, yc1, nullptr);
  };
  auto sidx = [&](int y3, int y2, int y1) { return (y3 * V + y2) * V + y1; };

  std::vector<std::vector<double>> g(static_cast<size_t>(K) + 1);
  g[K].assign(static_cast<size_t>(V) * V * V, 0.0);
  for (int k = K - 1; k >= 0; --k) {
    g[k].assign(static_cast<size_t>(V) * V * V, kInf);
    const int y0max = k < T ? V - 1 : 0;
    const bool slot_in_range = k - 1 >= 0 && k - 1 < T;
    for (int y3 = 0; y3 < V; ++y3) {
      for (int y2 = 0; y2 < V; ++y2) {
        for (int y1 = 0; y1 < V; ++y1) {
          if (slot_in_range && !ok_tab[(k - 1) * V + y1]) continue;
          double best = kInf;
          for (int y0 = 0; y0 <= y0max; ++y0) {
            if (!window_ok(in, k, y2, y1, y0)) continue;
            const double tot =
                step_for(k, y3, y2, y1, y0) + g[k + 1][sidx(y2, y1, y0)];
            if (tot < best) best = tot;
          }
          g[k][sidx(y3, y2, y1)] = best;
        }
      }
    }
  }
  if (!(g[0][sidx(0, 0, 0)] < kInf)) {
    throw ProvisioningError(
        "oracle instance: no feasible schedule within the fleet ceilings");
  }

  // Forward reconstruction: smallest choice that reproduces the optimum
  // bitwise, yielding the lexicographically smallest optimal FPGA schedule.
  std::vector<double> y_fpga;
  y_fpga.reserve(static_cast<size_t>(T));
  int y3 = 0, y2 = 0, y1 = 0;
  for (int k = 0; k < K; ++k) {
    const double target = g[k][sidx(y3, y2, y1)];
    const int y0max = k < T ? V - 1 : 0;
    int chosen = -1;
    for (int y0 = 0; y0 <= y0max; ++y0) {
      if (!window_ok(in, k, y2, y1, y0)) continue;
      if (step_for(k, y3, y2, y1, y0) + g[k + 1][sidx(y2, y1, y0)] == target) {
        chosen = y0;
        break;
      }
    }
    if (chosen < 0) {
      throw ContractViolationError("oracle solver: path reconstruction failed");
    }
    if (k < T) y_fpga.push_back(static_cast<double>(chosen));
    y3 = y2;
    y2 = y1;
    y1 = chosen;
  }

  MilpAssignment asg = complete_assignment(in, y_fpga);
  const EvalResult ev = evaluate_assignment(in, asg);
  if (!ev.feasible || ev.objective != g[0][sidx(0, 0, 0)]) {
    throw ContractViolationError(
        "oracle solver: canonical evaluation disagrees with the optimum");
  }
  MilpSolution sol;
  sol.assignment = std::move(asg);
  sol.objective = ev.objective;
  sol.energy_j = ev.energy_j;
  sol.cost_usd = ev.cost_usd;
  return sol;
}

void set_alpha_weights(MilpInstance& in, double alpha) {
  if (std::isnan(alpha) || alpha < 0 || alpha > 1) {
    throw UsageError("alpha must lie in [0, 1]");
  }
  if (alpha > 0 && !(in.e_fpga_busy > 0)) {
    throw UsageError(
        "alpha > 0 needs a positive FPGA busy energy to normalize against");
  }
  if (alpha < 1 && !(in.c_fpga > 0)) {
    throw UsageError(
        "alpha < 1 needs a positive FPGA rental cost to normalize against");
  }
  in.w_energy = alpha == 0 ? 0.0 : alpha / in.e_fpga_busy;
  in.w_cost = alpha == 1 ? 0.0 : (1.0 - alpha) / in.c_fpga;
}

std::vector<ParetoPoint> pareto_sweep(const MilpInstance& base,
                                      const std::vector<double>& alphas) {
  std::vector<ParetoPoint> points;
  points.reserve(alphas.size());
  for (double alpha : alphas) {
    MilpInstance in = base;
    set_alpha_weights(in, alpha);
    const MilpSolution sol = solve_exact(in);
    points.push_back({alpha, sol.energy_j, sol.cost_usd});
  }
  return points;
}

MilpInstance restrict_homogeneous(const MilpInstance& in, WorkerClass keep) {
  MilpInstance out = in;
  if (keep == WorkerClass::CPU) {
    out.n_fpga = 0;
  } else {
    out.n_cpu = 0;
  }
  return out;
}

MilpInstance instance_from_rates(const RateTrace& rt, const OracleConfig& cfg,
                                 const WorkerClassParams& cpu,
                                 const WorkerClassParams& fpga) {
  if (!(cfg.interval_s > 0)) {
    throw UsageError("oracle.interval_s must be positive");
  }
  const double horizon = rt.horizon();
  if (!(horizon > 0)) {
    throw UsageError("rate trace has no horizon to build an instance from");
  }
  if (!(rt.base_size_s > 0)) {
    throw UsageError("rate trace must carry a positive request size");
  }
  MilpInstance in;
  in.delta_s = cfg.interval_s;
  in.T = static_cast<int>(std::ceil(horizon / cfg.interval_s));
  in.demand.resize(static_cast<size_t>(in.T));
  for (int t = 0; t < in.T; ++t) {
    const double t0 = std::min(static_cast<double>(t) * cfg.interval_s, horizon);
    const double t1 =
        std::min(static_cast<double>(t + 1) * cfg.interval_s, horizon);
    in.demand[static_cast<size_t>(t)] = rate_slot_volume(rt, t0, t1);
  }
  in.r_cpu = cfg.interval_s / rt.base_size_s;
  in.r_fpga = fpga.speedup * cfg.interval_s / rt.base_size_s;
  in.n_cpu = cfg.n_cpu;
  in.n_fpga = cfg.n_fpga;
  in.e_cpu_busy = cpu.busy_power_w * cfg.interval_s;
  in.e_fpga_busy = fpga.busy_power_w * cfg.interval_s;
  in.e_cpu_idle = cpu.idle_power_w * cfg.interval_s;
  in.e_fpga_idle = fpga.idle_power_w * cfg.interval_s;
  in.a_cpu = cpu.busy_power_w * cpu.spin_up_latency_s;
  in.a_fpga = fpga.busy_power_w * fpga.spin_up_latency_s;
  in.d_cpu = cfg.d_cpu_j;
  in.d_fpga = cfg.d_fpga_j;
  in.c_cpu = cpu.price_per_hour * cfg.interval_s / 3600.0;
  in.c_fpga = fpga.price_per_hour * cfg.interval_s / 3600.0;
  if (cfg.s_f >= 0) {
    in.s_f = cfg.s_f;
  } else {
    in.s_f = static_cast<int>(
        std::floor(fpga.spin_up_latency_s / cfg.interval_s + 0.5));
  }
  in.rate_geq = cfg.rate_geq;
  return in;
}

// --------------------------------------------------------------------------
// LP emission.

namespace {

struct LpWriter {
  std::string out;
  std::string row;  // terms of the line being built

  void add_term(double coef, const std::string& var) {
    if (coef == 0 && !row.empty()) return;
    char buf[64];
    if (row.empty()) {
      std::snprintf(buf, sizeof buf, "%.17g ", coef);
    } else if (coef >= 0) {
      std::snprintf(buf, sizeof buf, "+ %.17g ", coef);
    } else {
      std::snprintf(buf, sizeof buf, "- %.17g ", -coef);
    }
    row += buf;
    row += var;
    row += ' ';
  }
  void objective_row() {
    out += " obj: ";
    out += row;
    out += '\n';
    row.clear();
  }
  void constraint(const std::string& name, const char* rel, double rhs) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s %.17g\n", rel, rhs);
    out += ' ';
    out += name;
    out += ": ";
    out += row;
    out += buf;
    row.clear();
  }
};

std::string idxname(const char* stem, const std::string& suffix, int i) {
  return std::string(stem) + suffix + "_" + std::to_string(i);
}

// Emits one application's objective terms into `w` (rows are emitted by
// emit_app_rows). `suffix` distinguishes applications in the shared case.
void emit_app_objective(LpWriter& w, const MilpInstance& in,
                        const std::string& suffix) {
  for (int t = 0; t < in.T; ++t) {
    w.add_term(in.w_energy * in.e_fpga_busy, idxname("Bf", suffix, t));
    w.add_term(in.w_energy * in.e_fpga_idle, idxname("If", suffix, t));
    w.add_term(in.w_energy * in.e_cpu_busy, idxname("Bc", suffix, t));
    w.add_term(in.w_energy * in.e_cpu_idle, idxname("Ic", suffix, t));
    w.add_term(in.w_cost * in.c_fpga, idxname("Yf", suffix, t));
    w.add_term(in.w_cost * in.c_cpu, idxname("Yc", suffix, t));
  }
  for (int b = 0; b <= in.T; ++b) {
    w.add_term(in.w_energy * in.a_fpga, idxname("uf", suffix, b));
    w.add_term(in.w_energy * in.d_fpga, idxname("vf", suffix, b));
    w.add_term(in.w_energy * in.a_cpu, idxname("uc", suffix, b));
    w.add_term(in.w_energy * in.d_cpu, idxname("vc", suffix, b));
  }
}

void emit_app_rows(LpWriter& w, const MilpInstance& in, const std::string& suffix) {
  for (int t = 0; t < in.T; ++t) {
    w.add_term(in.r_fpga, idxname("Bf", suffix, t));
    w.add_term(in.r_cpu, idxname("Bc", suffix, t));
    w.constraint(idxname("rate", suffix, t), in.rate_geq ? ">=" : "=",
                 in.demand[static_cast<size_t>(t)]);

    w.add_term(1, idxname("Yf", suffix, t));
    w.add_term(-1, idxname("Bf", suffix, t));
    w.add_term(-1, idxname("If", suffix, t));
    w.constraint(idxname("splitf", suffix, t), "=", 0);

    w.add_term(1, idxname("Yc", suffix, t));
    w.add_term(-1, idxname("Bc", suffix, t));
    w.add_term(-1, idxname("Ic", suffix, t));
    w.constraint(idxname("splitc", suffix, t), "=", 0);
  }
  // Boundary linearization: u_b >= Y_b - Y_{b-1}, v_b >= Y_{b-1} - Y_b, with
  // the fleet empty outside [0, T).
  for (int b = 0; b <= in.T; ++b) {
    for (const char* cls : {"f", "c"}) {
      const std::string y = std::string("Y") + cls;
      w.add_term(1, idxname((std::string("u") + cls).c_str(), suffix, b));
      if (b < in.T) w.add_term(-1, idxname(y.c_str(), suffix, b));
      if (b > 0) w.add_term(1, idxname(y.c_str(), suffix, b - 1));
      w.constraint(idxname((std::string("alloc") + cls).c_str(), suffix, b),
                   ">=", 0);

      w.add_term(1, idxname((std::string("v") + cls).c_str(), suffix, b));
      if (b > 0) w.add_term(-1, idxname(y.c_str(), suffix, b - 1));
      if (b < in.T) w.add_term(1, idxname(y.c_str(), suffix, b));
      w.constraint(idxname((std::string("dealloc") + cls).c_str(), suffix, b),
                   ">=", 0);
    }
  }
  // Allocation-lead windows: FPGAs rising into the last s_f+1 boundaries are
  // not serviceable yet, so the standing fleet must cover them.
  for (int t = -in.s_f; t <= in.T - in.s_f; ++t) {
    const int yi = t + in.s_f;
    bool any = false;
    for (int b = std::max(0, t + 1); b <= std::min(in.T, t + in.s_f + 1); ++b) {
      w.add_term(1, idxname("uf", suffix, b));
      any = true;
    }
    if (!any) continue;
    if (yi >= 0 && yi < in.T) w.add_term(-1, idxname("Yf", suffix, yi));
    w.constraint(idxname("windowf", suffix, yi), "<=", 0);
  }
}

void emit_app_bounds(LpWriter& w, const MilpInstance& in,
                     const std::string& suffix, int n_cpu, int n_fpga) {
  for (int t = 0; t < in.T; ++t) {
    w.out += " 0 <= " + idxname("Yf", suffix, t) +
             " <= " + std::to_string(n_fpga) + "\n";
    w.out += " 0 <= " + idxname("Yc", suffix, t) +
             " <= " + std::to_string(n_cpu) + "\n";
  }
}

void emit_app_integers(LpWriter& w, const MilpInstance& in,
                       const std::string& suffix) {
  for (int t = 0; t < in.T; ++t) {
    w.out += ' ' + idxname("Yf", suffix, t) + '\n';
  }
}

}  // namespace

std::string emit_lp(const MilpInstance& in) {
  if (in.T < 1 || static_cast<size_t>(in.T) != in.demand.size()) {
    throw UsageError("oracle instance: demand length does not match T");
  }
  if (in.s_f < 0) throw UsageError("oracle instance: negative allocation lead");
  LpWriter w;
  w.out += "Minimize\n";
  emit_app_objective(w, in, "");
  if (w.row.empty()) w.add_term(0, "Yf_0");
  w.objective_row();
  w.out += "Subject To\n";
  emit_app_rows(w, in, "");
  w.out += "Bounds\n";
  emit_app_bounds(w, in, "", in.n_cpu, in.n_fpga);
  w.out += "General\n";
  emit_app_integers(w, in, "");
  w.out += "End\n";
  return w.out;
}

std::string emit_lp_multi(const std::vector<MilpInstance>& apps,
                          int shared_n_cpu, int shared_n_fpga) {
  if (apps.empty()) throw UsageError("need at least one application to emit");
  if (shared_n_cpu < 0 || shared_n_fpga < 0) {
    throw UsageError("shared fleet ceilings must be non-negative");
  }
  LpWriter w;
  w.out += "Minimize\n";
  for (size_t j = 0; j < apps.size(); ++j) {
    emit_app_objective(w, apps[j], "_a" + std::to_string(j));
  }
  if (w.row.empty()) w.add_term(0, "Yf_a0_0");
  w.objective_row();
  w.out += "Subject To\n";
  int max_t = 0;
  for (size_t j = 0; j < apps.size(); ++j) {
    emit_app_rows(w, apps[j], "_a" + std::to_string(j));
    max_t = std::max(max_t, apps[j].T);
  }
  // Shared pool: the applications' fleets never exceed the physical ceilings.
  for (int t = 0; t < max_t; ++t) {
    for (size_t j = 0; j < apps.size(); ++j) {
      if (t < apps[j].T) w.add_term(1, idxname("Yf", "_a" + std::to_string(j), t));
    }
    w.constraint(idxname("capf", "", t), "<=", shared_n_fpga);
    for (size_t j = 0; j < apps.size(); ++j) {
      if (t < apps[j].T) w.add_term(1, idxname("Yc", "_a" + std::to_string(j), t));
    }
    w.constraint(idxname("capc", "", t), "<=", shared_n_cpu);
  }
  w.out += "Bounds\n";
  for (size_t j = 0; j < apps.size(); ++j) {
    emit_app_bounds(w, apps[j], "_a" + std::to_string(j), shared_n_cpu,
                    shared_n_fpga);
  }
  w.out += "General\n";
  for (size_t j = 0; j < apps.size(); ++j) {
    emit_app_integers(w, apps[j], "_a" + std::to_string(j));
  }
  w.out += "End\n";
  return w.out;
}

}  // namespace hyssim
