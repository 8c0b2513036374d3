#pragma once

// Shared scaffolding for the unit suites: tiny hand-built traces and a
// callback-driven scheduler hook so tests can script allocations.

#include <functional>
#include <vector>

#include "hyssim/dispatch.hpp"
#include "hyssim/model.hpp"
#include "hyssim/simengine.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim::testing {

inline ArrivalTrace make_trace(std::vector<double> arrivals, double base_size_s,
                               double horizon_s) {
  ArrivalTrace t;
  t.arrivals = std::move(arrivals);
  t.base_size_s = base_size_s;
  t.horizon_s = horizon_s;
  return t;
}

// Hooks whose behavior is supplied by the test as callables.
struct ScriptedHooks : SchedulerHooks {
  bool ticks = false;
  std::function<void(Simulation&)> start;
  std::function<void(Simulation&, double, int64_t)> tick;

  bool wants_ticks() const override { return ticks; }
  void on_start(Simulation& sim) override {
    if (start) start(sim);
  }
  void on_tick(Simulation& sim, double now, int64_t i) override {
    if (tick) tick(sim, now, i);
  }
};

// Pre-warms `n` workers of a class so they are Idle exactly at t=0.
inline ScriptedHooks warm_fleet(WorkerClass cls, int64_t n) {
  ScriptedHooks h;
  h.start = [cls, n](Simulation& sim) {
    sim.allocate_workers_at(cls, n,
                            -sim.config().params(cls).spin_up_latency_s);
  };
  return h;
}

inline DispatchConfig fpga_only(DispatchPolicy p = DispatchPolicy::EfficientFirst) {
  DispatchConfig d;
  d.policy = p;
  d.allow_cpu = false;
  d.reactive_cpu = false;
  return d;
}

inline DispatchConfig cpu_only(DispatchPolicy p = DispatchPolicy::EfficientFirst) {
  DispatchConfig d;
  d.policy = p;
  d.allow_fpga = false;
  return d;
}

}  // namespace hyssim::testing
