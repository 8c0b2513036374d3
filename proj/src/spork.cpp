#include "hyssim/spork.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyssim/text.hpp"

namespace hyssim {

SporkMode parse_spork_mode(const std::string& name) {
  const std::string v = lower(trim(name));
  if (v == "energy") return SporkMode::Energy;
  if (v == "cost") return SporkMode::Cost;
  if (v == "balanced") return SporkMode::Balanced;
  throw UsageError("unknown spork mode '" + name +
                   "' (expected energy, cost, or balanced)");
}

const char* spork_mode_name(SporkMode m) {
  switch (m) {
    case SporkMode::Energy: return "energy";
    case SporkMode::Cost: return "cost";
    case SporkMode::Balanced: return "balanced";
  }
  return "?";
}

double spork_alpha_effective(const SporkObjective& obj) {
  switch (obj.mode) {
    case SporkMode::Energy: return 1.0;
    case SporkMode::Cost: return 0.0;
    case SporkMode::Balanced:
      if (obj.alpha < 0 || obj.alpha > 1 || std::isnan(obj.alpha)) {
        throw UsageError("spork.alpha must lie in [0, 1]");
      }
      return obj.alpha;
  }
  return 1.0;
}

namespace {

// Leftover work of x native seconds per interval can run on one extra FPGA
// (costing its idle remainder) or on S CPUs (costing busy CPU power minus the
// FPGA busy/idle differential). Equating the two yields the threshold.
double energy_breakeven(const WorkerClassParams& cpu, const WorkerClassParams& fpga,
                        double interval_s) {
  const double denom =
      cpu.busy_power_w - (fpga.busy_power_w - fpga.idle_power_w) / fpga.speedup;
  if (!(denom > 0)) {
    throw UsageError(
        "FPGA service is unconditionally cheaper than CPU service under the "
        "energy objective; thresholding does not apply - round every "
        "nonzero remainder up to a full FPGA");
  }
  return interval_s * fpga.idle_power_w / denom;
}

double cost_breakeven(const WorkerClassParams& cpu, const WorkerClassParams& fpga,
                      double interval_s) {
  const double denom = fpga.speedup * cpu.price_per_hour;
  if (!(denom > 0)) {
    throw UsageError(
        "FPGA service is unconditionally cheaper than CPU service under the "
        "cost objective; thresholding does not apply - round every nonzero "
        "remainder up to a full FPGA");
  }
  return interval_s * fpga.price_per_hour / denom;
}

}  // namespace

double breakeven_threshold(const SporkObjective& obj, const WorkerClassParams& cpu,
                           const WorkerClassParams& fpga, double interval_s) {
  const double a = spork_alpha_effective(obj);
  double t;
  if (a == 1.0) {
    t = energy_breakeven(cpu, fpga, interval_s);
  } else if (a == 0.0) {
    t = cost_breakeven(cpu, fpga, interval_s);
  } else {
    // Both objectives normalized by the per-FPGA per-interval scale before
    // blending: busy joules for energy, rental dollars for cost.
    const double rho_e = fpga.busy_power_w * interval_s;
    const double rho_c = fpga.price_per_hour * interval_s / 3600.0;
    const double e_denom =
        cpu.busy_power_w - (fpga.busy_power_w - fpga.idle_power_w) / fpga.speedup;
    const double num = a * interval_s * fpga.idle_power_w / rho_e +
                       (1.0 - a) * (interval_s * fpga.price_per_hour / 3600.0) / rho_c;
    const double den = a * e_denom / rho_e +
                       (1.0 - a) * (fpga.speedup * cpu.price_per_hour / 3600.0) / rho_c;
    if (!(den > 0)) {
      throw UsageError(
          "FPGA service is unconditionally cheaper than CPU service under the "
          "blended objective; thresholding does not apply - round every "
          "nonzero remainder up to a full FPGA");
    }
    t = num / den;
  }
  return std::min(std::max(t, 0.0), interval_s);
}

int64_t needed_fpgas(double fpga_native_s, double cpu_base_s, double speedup,
                     double interval_s, double threshold) {
  const double lambda = fpga_native_s + cpu_base_s / speedup;
  if (!(lambda > 0)) return 0;
  double full = std::floor(lambda / interval_s);
  double rem = lambda - full * interval_s;
  if (rem < 0) {  // floor rounding put us a hair past lambda
    full -= 1;
    rem = lambda - full * interval_s;
  }
  int64_t n = static_cast<int64_t>(full);
  if (rem > threshold) n += 1;
  return n;
}

namespace {

// Amortization horizon for a new worker's spin-up: expected lifetime in
// whole intervals, at least one. `context` is how many same-class workers
// are already alive when this one is requested.
double amortize_epochs(const LifetimeMap& lifetimes, int64_t context,
                       double interval_s) {
  if (!lifetimes.has(context)) return 1.0;
  return std::max(1.0, std::ceil(lifetimes.mean(context) / interval_s));
}

}  // namespace

double spork_expected_energy_j(const Histogram& dist, int64_t n_hat,
                               int64_t n_curr, const SporkCostModel& model,
                               const LifetimeMap& lifetimes) {
  const WorkerClassParams& f = model.fpga;
  const WorkerClassParams& c = model.cpu;
  const double T = model.interval_s;
  double e = 0;
  for (int64_t j = n_curr; j < n_hat; ++j) {
    e += f.busy_power_w * f.spin_up_latency_s / amortize_epochs(lifetimes, j, T);
  }
  for (const auto& [n, count] : dist.bins()) {
    const double p =
        static_cast<double>(count) / static_cast<double>(dist.total());
    double term;
    if (n_hat > n) {
      term = static_cast<double>(n_hat - n) * f.idle_power_w * T +
             static_cast<double>(n) * f.busy_power_w * T;
    } else if (n_hat < n) {
      term = static_cast<double>(n_hat) * f.busy_power_w * T +
             static_cast<double>(n - n_hat) * f.speedup * c.busy_power_w * T;
    } else {
      term = static_cast<double>(n) * f.busy_power_w * T;
    }
    e += p * term;
  }
  return e;
}

double spork_expected_dollars(const Histogram& dist, int64_t n_hat,
                              int64_t n_curr, const SporkCostModel& model,
                              const LifetimeMap& lifetimes) {
  const WorkerClassParams& f = model.fpga;
  const WorkerClassParams& c = model.cpu;
  const double T = model.interval_s;
  const double fpga_interval_usd = f.price_per_hour * T / 3600.0;
  const double cpu_interval_usd = c.price_per_hour * T / 3600.0;
  double d = 0;
  for (int64_t j = n_curr; j < n_hat; ++j) {
    d += (f.price_per_hour / 3600.0) * f.spin_up_latency_s /
         amortize_epochs(lifetimes, j, T);
  }
  for (const auto& [n, count] : dist.bins()) {
    const double p =
        static_cast<double>(count) / static_cast<double>(dist.total());
    double term = static_cast<double>(n_hat) * fpga_interval_usd;
    if (n_hat < n) {
      term += static_cast<double>(n - n_hat) * f.speedup * cpu_interval_usd;
    }
    d += p * term;
  }
  return d;
}

double spork_candidate_score(const Histogram& dist, int64_t n_hat,
                             int64_t n_curr, const SporkCostModel& model,
                             const LifetimeMap& lifetimes) {
  const double a = spork_alpha_effective(model.objective);
  const double rho_e = model.fpga.busy_power_w * model.interval_s;
  const double rho_c = model.fpga.price_per_hour * model.interval_s / 3600.0;
  const double e =
      spork_expected_energy_j(dist, n_hat, n_curr, model, lifetimes);
  const double d = spork_expected_dollars(dist, n_hat, n_curr, model, lifetimes);
  return a * (e / rho_e) + (1.0 - a) * (d / rho_c);
}

int64_t spork_predict(const Histogram& dist, int64_t n_prev, int64_t n_curr,
                      const SporkCostModel& model, const LifetimeMap& lifetimes) {
  if (dist.empty()) return n_prev;
  int64_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int64_t cand = dist.min_bin(); cand <= dist.max_bin(); ++cand) {
    const double s = spork_candidate_score(dist, cand, n_curr, model, lifetimes);
    if (s < best_score) {
      best_score = s;
      best = cand;
    }
  }
  return best;
}

void SporkScheduler::on_start(Simulation& sim) {
  model_.objective = cfg_.objective;
  model_.cpu = sim.config().cpu;
  model_.fpga = sim.config().fpga;
  model_.interval_s = sim.config().interval_s;
  threshold_ = breakeven_threshold(cfg_.objective, model_.cpu, model_.fpga,
                                   model_.interval_s);
}

void SporkScheduler::on_service_start(Simulation&, WorkerClass cls,
                                      double base_size, double /*now*/) {
  if (cls == WorkerClass::FPGA) {
    acc_fpga_native_s_ += base_size / model_.fpga.speedup;
  } else {
    acc_cpu_base_s_ += base_size;
  }
}

void SporkScheduler::on_worker_dead(Simulation&, const Worker& w, double now) {
  if (w.cls == WorkerClass::FPGA) {
    lifetimes_.add(w.alloc_context, now - w.alloc_start);
  }
}

void SporkScheduler::on_tick(Simulation& sim, double now, int64_t tick_index) {
  const double T = model_.interval_s;
  const int64_t n_last = needed_fpgas(acc_fpga_native_s_, acc_cpu_base_s_,
                                      model_.fpga.speedup, T, threshold_);
  if (tick_index >= 3) history_[n2_].add(n_last);

  const int64_t alive = sim.alive_count(WorkerClass::FPGA);
  int64_t n_next;
  if (cfg_.ideal) {
    // Exact demand of the interval after next, all served natively.
    const double native =
        sim.arrival_demand_native_seconds(WorkerClass::FPGA, now + T, now + 2 * T);
    n_next = needed_fpgas(native, 0.0, model_.fpga.speedup, T, threshold_);
  } else {
    auto hit = history_.find(n_last);
    if (hit == history_.end() || hit->second.empty()) {
      n_next = n_last;
    } else {
      const auto key = std::make_pair(n_last, alive);
      auto cit = cache_.find(key);
      if (cit != cache_.end() &&
          cit->second.hist_version == hit->second.version() &&
          cit->second.lifetime_version == lifetimes_.version()) {
        n_next = cit->second.answer;
      } else {
        n_next = spork_predict(hit->second, n_last, alive, model_, lifetimes_);
        cache_[key] = {n_next, hit->second.version(), lifetimes_.version()};
      }
    }
  }

  if (n_next > alive) {
    sim.allocate_workers(WorkerClass::FPGA, n_next - alive);
  }
  n2_ = n1_;
  n1_ = n_last;
  acc_fpga_native_s_ = 0;
  acc_cpu_base_s_ = 0;
}

}  // namespace hyssim
