#pragma once

// Reference scheduling strategies: CPU-only reactive serving, statically
// provisioned FPGA fleets (smallest size with zero deadline misses),
// demand-following FPGA fleets with padded headroom, and a foresight-driven
// hybrid allocator.

#include <cstdint>

#include "hyssim/dispatch.hpp"
#include "hyssim/model.hpp"
#include "hyssim/simengine.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim {

// CPU-only serving: no allocator ticks; a CPU is brought up whenever no
// existing one can meet a request's deadline, and idle CPUs time out.
SimReport run_cpu_dynamic(const ArrivalTrace& trace, const SimConfig& cfg,
                          DispatchPolicy policy = DispatchPolicy::EfficientFirst);

// One probe of the static FPGA fleet: N workers requested at -spin_up so
// they are ready at t=0, no idle timeout, no CPU fallback, run aborted at the
// first deadline miss. Returns (feasible, report); the report is finalized
// only when feasible.
std::pair<bool, SimReport> fpga_static_probe(
    const ArrivalTrace& trace, const SimConfig& cfg, int64_t n,
    DispatchPolicy policy = DispatchPolicy::EfficientFirst);

struct StaticProvision {
  int64_t n_star = 0;  // smallest zero-miss fleet size
  SimReport report;    // the n_star run
};

// Exponential + binary search for the smallest zero-miss static fleet.
// Throws ProvisioningError when even n_max workers miss deadlines.
StaticProvision run_fpga_static(const ArrivalTrace& trace, const SimConfig& cfg,
                                int64_t n_max = 4096,
                                DispatchPolicy policy = DispatchPolicy::EfficientFirst);

// Largest interval-over-interval increase of the "FPGAs needed" series
// (threshold 0), taken from the rate trace when one is supplied and from the
// realized arrivals otherwise. This is the headroom unit k multiplies.
int64_t demand_delta_max(const ArrivalTrace& trace, const RateTrace* rate,
                         const SimConfig& cfg);

struct DynamicProvision {
  int64_t k_star = 0;     // smallest zero-miss padding multiplier
  int64_t delta_max = 0;  // headroom unit
  SimReport report;       // the k_star run
};

// Demand-following FPGA fleet: each interval, target
// needed(trailing interval) + k * delta_max workers (threshold 0), with the
// trailing demand measured from the rate trace when one is supplied and from
// realized arrivals otherwise; warm-started before t=0 from the first
// interval's demand. Workers inside the target are kept warm; the excess
// rides out its idle timeout. k is the smallest value in [0, k_max] with
// zero misses. Throws ProvisioningError when no k in range is feasible.
DynamicProvision run_fpga_dynamic(const ArrivalTrace& trace, const SimConfig& cfg,
                                  const RateTrace* rate = nullptr,
                                  int64_t k_max = 20,
                                  DispatchPolicy policy = DispatchPolicy::EfficientFirst);

// Foresight-driven hybrid: each interval allocates FPGAs for
// min(needed(next interval), needed(interval after)) using the cost
// break-even threshold, dispatches round-robin across both classes, and
// falls back to reactive CPUs.
SimReport run_mark_ideal(const ArrivalTrace& trace, const SimConfig& cfg,
                         DispatchPolicy policy = DispatchPolicy::RoundRobin);

}  // namespace hyssim
