#pragma once

// Predictive FPGA allocator. Each interval it converts the observed service
// demand into "FPGAs needed", learns the conditional distribution of demand
// two intervals ahead, and allocates the fleet size that minimizes the
// expected energy/cost penalty of over- vs under-provisioning.

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "hyssim/model.hpp"
#include "hyssim/simengine.hpp"

namespace hyssim {

enum class SporkMode { Energy, Cost, Balanced };

SporkMode parse_spork_mode(const std::string& name);  // throws UsageError
const char* spork_mode_name(SporkMode m);

struct SporkObjective {
  SporkMode mode = SporkMode::Energy;
  double alpha = 0.5;  // Balanced: weight on the energy term, in [0, 1]
};

// Weight on the normalized energy term implied by the objective
// (Energy -> 1, Cost -> 0, Balanced -> alpha).
double spork_alpha_effective(const SporkObjective& obj);

// Native seconds of leftover per-interval work at which one extra FPGA and
// the equivalent CPU capacity break even under the objective. Clamped to
// [0, interval_s]. Throws UsageError when the parameters make FPGAs
// unconditionally cheaper (non-positive denominator): round every remainder
// up to a full FPGA instead of thresholding.
double breakeven_threshold(const SporkObjective& obj, const WorkerClassParams& cpu,
                           const WorkerClassParams& fpga, double interval_s);

// FPGAs needed to serve the interval's demand: lambda = fpga_native_s +
// cpu_base_s / speedup native seconds; floor(lambda / interval_s) fully
// loaded FPGAs, plus one more when the remainder exceeds the threshold.
int64_t needed_fpgas(double fpga_native_s, double cpu_base_s, double speedup,
                     double interval_s, double threshold);

// Integer histogram; probabilities are derived from counts on demand.
class Histogram {
 public:
  void add(int64_t v) {
    bins_[v] += 1;
    total_ += 1;
    version_ += 1;
  }
  bool empty() const { return total_ == 0; }
  uint64_t total() const { return total_; }
  int64_t min_bin() const { return bins_.begin()->first; }
  int64_t max_bin() const { return bins_.rbegin()->first; }
  double probability(int64_t v) const {
    auto it = bins_.find(v);
    if (it == bins_.end() || total_ == 0) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(total_);
  }
  uint64_t version() const { return version_; }
  const std::map<int64_t, uint64_t>& bins() const { return bins_; }

 private:
  std::map<int64_t, uint64_t> bins_;
  uint64_t total_ = 0;
  uint64_t version_ = 0;
};

// Mean observed FPGA worker lifetime keyed by the allocation context (how
// many same-class workers were alive when the worker was requested).
class LifetimeMap {
 public:
  void add(int64_t context, double lifetime_s) {
    Acc& a = acc_[context];
    a.sum += lifetime_s;
    a.n += 1;
    version_ += 1;
  }
  bool has(int64_t context) const { return acc_.count(context) != 0; }
  double mean(int64_t context) const {
    const Acc& a = acc_.at(context);
    return a.sum / static_cast<double>(a.n);
  }
  uint64_t version() const { return version_; }

 private:
  struct Acc {
    double sum = 0;
    uint64_t n = 0;
  };
  std::map<int64_t, Acc> acc_;
  uint64_t version_ = 0;
};

struct SporkCostModel {
  SporkObjective objective;
  WorkerClassParams cpu;
  WorkerClassParams fpga;
  double interval_s = 10.0;
};

// Expected joules burned over the next interval if n_hat FPGAs are kept while
// true demand is distributed per `dist`; includes amortized spin-up energy
// for fleet growth beyond n_curr.
double spork_expected_energy_j(const Histogram& dist, int64_t n_hat,
                               int64_t n_curr, const SporkCostModel& model,
                               const LifetimeMap& lifetimes);

// Expected dollars over the next interval under the same provisioning choice.
double spork_expected_dollars(const Histogram& dist, int64_t n_hat,
                              int64_t n_curr, const SporkCostModel& model,
                              const LifetimeMap& lifetimes);

// Objective blend of the two expectations, each normalized by the per-FPGA
// per-interval scale (busy joules / rental dollars).
double spork_candidate_score(const Histogram& dist, int64_t n_hat,
                             int64_t n_curr, const SporkCostModel& model,
                             const LifetimeMap& lifetimes);

// Minimizing candidate over [dist.min_bin(), dist.max_bin()], smallest on
// ties; n_prev when the distribution is empty.
int64_t spork_predict(const Histogram& dist, int64_t n_prev, int64_t n_curr,
                      const SporkCostModel& model, const LifetimeMap& lifetimes);

struct SporkConfig {
  SporkObjective objective;
  bool ideal = false;  // replace the prediction with exact future demand
};

class SporkScheduler : public SchedulerHooks {
 public:
  explicit SporkScheduler(const SporkConfig& cfg) : cfg_(cfg) {}

  bool wants_ticks() const override { return true; }
  void on_start(Simulation& sim) override;
  void on_tick(Simulation& sim, double now, int64_t tick_index) override;
  void on_service_start(Simulation& sim, WorkerClass cls, double base_size,
                        double now) override;
  void on_worker_dead(Simulation& sim, const Worker& w, double now) override;

  const std::map<int64_t, Histogram>& history() const { return history_; }
  const LifetimeMap& lifetimes() const { return lifetimes_; }
  double threshold() const { return threshold_; }

 private:
  SporkConfig cfg_;
  SporkCostModel model_;
  double threshold_ = 0;

  double acc_fpga_native_s_ = 0;  // native seconds started on FPGAs this interval
  double acc_cpu_base_s_ = 0;     // base seconds started on CPUs this interval
  int64_t n1_ = 0;                // needed count of the last finished interval
  int64_t n2_ = 0;                // needed count of the interval before that

  std::map<int64_t, Histogram> history_;
  LifetimeMap lifetimes_;

  struct CacheEntry {
    int64_t answer = 0;
    uint64_t hist_version = 0;
    uint64_t lifetime_version = 0;
  };
  std::map<std::pair<int64_t, int64_t>, CacheEntry> cache_;
};

}  // namespace hyssim
