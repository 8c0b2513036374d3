#include "hyssim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyssim/spork.hpp"

namespace hyssim {

namespace {

struct NoOpHooks : SchedulerHooks {};

struct WarmStartHooks : SchedulerHooks {
  int64_t count = 0;
  double at = 0;
  void on_start(Simulation& sim) override {
    if (count > 0) sim.allocate_workers_at(WorkerClass::FPGA, count, at);
  }
};

int64_t needed_plain(double native_s, double interval_s) {
  // Threshold 0: any remainder rounds up to a whole worker.
  return needed_fpgas(native_s, 0.0, 1.0, interval_s, 0.0);
}

}  // namespace

SimReport run_cpu_dynamic(const ArrivalTrace& trace, const SimConfig& cfg,
                          DispatchPolicy policy) {
  NoOpHooks hooks;
  DispatchConfig d;
  d.policy = policy;
  d.allow_cpu = true;
  d.allow_fpga = false;
  d.reactive_cpu = true;
  Simulation sim(trace, cfg, hooks, d);
  return sim.run();
}

std::pair<bool, SimReport> fpga_static_probe(const ArrivalTrace& trace,
                                             const SimConfig& cfg, int64_t n,
                                             DispatchPolicy policy) {
  SimConfig c = cfg;
  c.abort_on_miss = true;
  c.idle_timeout_fpga_s = std::numeric_limits<double>::infinity();
  WarmStartHooks hooks;
  hooks.count = n;
  hooks.at = -c.fpga.spin_up_latency_s;
  DispatchConfig d;
  d.policy = policy;
  d.allow_cpu = false;
  d.allow_fpga = true;
  d.reactive_cpu = false;
  Simulation sim(trace, c, hooks, d);
  SimReport r = sim.run();
  return {!sim.infeasible(), r};
}

StaticProvision run_fpga_static(const ArrivalTrace& trace, const SimConfig& cfg,
                                int64_t n_max, DispatchPolicy policy) {
  if (trace.count() == 0) {
    auto [ok, rep] = fpga_static_probe(trace, cfg, 0, policy);
    return {0, rep};
  }
  if (n_max < 1) throw UsageError("baseline.n_max must be at least 1");
  // A fleet of zero can never start a request, so 0 is known-infeasible.
  int64_t lo = 0;  // largest known-infeasible size
  int64_t hi = 1;
  SimReport best_report;
  int64_t best_n = -1;
  for (;;) {
    if (hi > n_max) {
      throw ProvisioningError(
          "no static FPGA fleet of up to " + std::to_string(n_max) +
          " workers serves this trace without deadline misses "
          "(baseline.n_max caps the search)");
    }
    auto [ok, rep] = fpga_static_probe(trace, cfg, hi, policy);
    if (ok) {
      best_report = rep;
      best_n = hi;
      break;
    }
    lo = hi;
    hi = std::min(hi * 2, n_max + (hi == n_max ? 1 : 0));
  }
  while (lo + 1 < best_n) {
    const int64_t mid = lo + (best_n - lo) / 2;
    auto [ok, rep] = fpga_static_probe(trace, cfg, mid, policy);
    if (ok) {
      best_report = rep;
      best_n = mid;
    } else {
      lo = mid;
    }
  }
  return {best_n, best_report};
}

int64_t demand_delta_max(const ArrivalTrace& trace, const RateTrace* rate,
                         const SimConfig& cfg) {
  const double T = cfg.interval_s;
  const double speedup = cfg.fpga.speedup;
  double horizon = trace.horizon_s;
  if (rate) horizon = std::max(horizon, rate->horizon());
  if (!(horizon > 0)) return 0;
  const auto intervals = static_cast<int64_t>(std::ceil(horizon / T));
  int64_t delta = 0;
  int64_t prev = 0;
  for (int64_t i = 0; i < intervals; ++i) {
    const double t0 = static_cast<double>(i) * T;
    const double t1 = static_cast<double>(i + 1) * T;
    double native;
    if (rate) {
      native = rate_slot_volume(*rate, t0, t1) * rate->base_size_s / speedup;
    } else {
      double base;
      {
        const auto& a = trace.arrivals;
        auto lo = std::lower_bound(a.begin(), a.end(), t0);
        auto hi2 = std::lower_bound(a.begin(), a.end(), t1);
        if (trace.sizes.empty()) {
          base = trace.base_size_s * static_cast<double>(hi2 - lo);
        } else {
          base = 0;
          for (auto it = lo; it != hi2; ++it) {
            base += trace.sizes[static_cast<size_t>(it - a.begin())];
          }
        }
      }
      native = base / speedup;
    }
    const int64_t n = needed_plain(native, T);
    if (i > 0) delta = std::max(delta, n - prev);
    prev = n;
  }
  return delta;
}

namespace {

struct FpgaDynamicHooks : SchedulerHooks {
  int64_t k = 0;
  int64_t delta_max = 0;
  const RateTrace* rate = nullptr;

  bool wants_ticks() const override { return true; }

  // Demand over [t0, t1) in FPGA-busy seconds. With a rate trace the fleet
  // follows the published request rates (the same source that sized
  // delta_max); without one it falls back to the arrivals it has seen.
  double demand_native(Simulation& sim, double t0, double t1) const {
    if (rate != nullptr) {
      return rate_slot_volume(*rate, t0, t1) * rate->base_size_s /
             sim.config().fpga.speedup;
    }
    return sim.arrival_demand_native_seconds(WorkerClass::FPGA, t0, t1);
  }

  int64_t target_for(Simulation& sim, double t0, double t1) const {
    return needed_plain(demand_native(sim, t0, t1), sim.config().interval_s) +
           k * delta_max;
  }

  void on_start(Simulation& sim) override {
    const double T = sim.config().interval_s;
    const int64_t target = target_for(sim, 0.0, T);
    if (target > 0) {
      sim.allocate_workers_at(WorkerClass::FPGA, target,
                              -sim.config().fpga.spin_up_latency_s);
    }
  }

  void on_tick(Simulation& sim, double now, int64_t tick_index) override {
    const double T = sim.config().interval_s;
    // The tick at t=0 has no trailing interval yet; it re-affirms the
    // warm-start target instead of shedding the fleet against an empty
    // window.
    const int64_t target = tick_index == 0 ? target_for(sim, 0.0, T)
                                           : target_for(sim, now - T, now);
    const int64_t alive = sim.alive_count(WorkerClass::FPGA);
    if (target > alive) {
      sim.allocate_workers(WorkerClass::FPGA, target - alive);
    }
    // Headroom inside the target stays warm between ticks; only the excess
    // above it rides out its idle timeout and drains.
    sim.keep_warm(WorkerClass::FPGA, target);
  }
};

std::pair<bool, SimReport> fpga_dynamic_probe(const ArrivalTrace& trace,
                                              const SimConfig& cfg, int64_t k,
                                              int64_t delta_max,
                                              const RateTrace* rate,
                                              DispatchPolicy policy) {
  SimConfig c = cfg;
  c.abort_on_miss = true;
  FpgaDynamicHooks hooks;
  hooks.k = k;
  hooks.delta_max = delta_max;
  hooks.rate = rate;
  DispatchConfig d;
  d.policy = policy;
  d.allow_cpu = false;
  d.allow_fpga = true;
  d.reactive_cpu = false;
  Simulation sim(trace, c, hooks, d);
  SimReport r = sim.run();
  return {!sim.infeasible(), r};
}

}  // namespace

DynamicProvision run_fpga_dynamic(const ArrivalTrace& trace, const SimConfig& cfg,
                                  const RateTrace* rate, int64_t k_max,
                                  DispatchPolicy policy) {
  if (k_max < 0) throw UsageError("baseline.k_max must be non-negative");
  const int64_t delta_max = demand_delta_max(trace, rate, cfg);
  for (int64_t k = 0; k <= k_max; ++k) {
    auto [ok, rep] = fpga_dynamic_probe(trace, cfg, k, delta_max, rate, policy);
    if (ok) return {k, delta_max, rep};
    if (delta_max == 0) {
      throw ProvisioningError(
          "demand-following FPGA fleet misses deadlines and the trace shows "
          "no interval-over-interval demand growth, so padding cannot help");
    }
  }
  throw ProvisioningError(
      "demand-following FPGA fleet misses deadlines for every padding "
      "multiplier k in [0, " +
      std::to_string(k_max) + "] (baseline.k_max caps the search)");
}

namespace {

struct MarkIdealHooks : SchedulerHooks {
  double threshold = 0;

  bool wants_ticks() const override { return true; }

  void on_start(Simulation& sim) override {
    SporkObjective obj;
    obj.mode = SporkMode::Cost;
    threshold = breakeven_threshold(obj, sim.config().cpu, sim.config().fpga,
                                    sim.config().interval_s);
  }

  void on_tick(Simulation& sim, double now, int64_t) override {
    const double T = sim.config().interval_s;
    const double speedup = sim.config().fpga.speedup;
    auto needed_in = [&](double t0, double t1) {
      const double native =
          sim.arrival_demand_native_seconds(WorkerClass::FPGA, t0, t1);
      return needed_fpgas(native, 0.0, speedup, T, threshold);
    };
    const int64_t n =
        std::min(needed_in(now + T, now + 2 * T), needed_in(now + 2 * T, now + 3 * T));
    const int64_t alive = sim.alive_count(WorkerClass::FPGA);
    if (n > alive) sim.allocate_workers(WorkerClass::FPGA, n - alive);
  }
};

}  // namespace

SimReport run_mark_ideal(const ArrivalTrace& trace, const SimConfig& cfg,
                         DispatchPolicy policy) {
  MarkIdealHooks hooks;
  DispatchConfig d;
  d.policy = policy;
  d.allow_cpu = true;
  d.allow_fpga = true;
  d.reactive_cpu = true;
  Simulation sim(trace, cfg, hooks, d);
  return sim.run();
}

}  // namespace hyssim
