#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <vector>

#include "helpers.hpp"
#include "hyssim/dispatch.hpp"
#include "hyssim/simengine.hpp"

using namespace hyssim;
using namespace hyssim::testing;

namespace {

// Busy-segment count per worker id, the observable footprint of a policy.
std::map<uint64_t, int> busy_counts(const std::vector<WorkerSegment>& segs) {
  std::map<uint64_t, int> counts;
  for (const auto& s : segs)
    if (s.state == WorkerState::Busy) counts[s.worker] += 1;
  return counts;
}

ScriptedHooks warm_pair() {
  ScriptedHooks h;
  h.start = [](Simulation& sim) {
    sim.allocate_workers_at(WorkerClass::CPU, 1,
                            -sim.config().cpu.spin_up_latency_s);
    sim.allocate_workers_at(WorkerClass::FPGA, 1,
                            -sim.config().fpga.spin_up_latency_s);
  };
  return h;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_dispatch_policy("efficient-first") == DispatchPolicy::EfficientFirst);
  CHECK(parse_dispatch_policy("round-robin") == DispatchPolicy::RoundRobin);
  CHECK(parse_dispatch_policy("index-packing") == DispatchPolicy::IndexPacking);
  CHECK_THROWS_AS(parse_dispatch_policy("fifo"), UsageError);
  CHECK(dispatch_policy_name(DispatchPolicy::RoundRobin) ==
        std::string("round-robin"));
}

TEST_CASE("deadline gate boundary is inclusive") {
  Worker w;
  w.state = WorkerState::Idle;
  w.ready_at = 0;
  w.committed_until = 0;
  WorkerClassParams p = default_cpu_params();
  Request r{0, 0.0, 1.0, 1.0};  // service exactly fills the deadline
  CHECK(can_meet_deadline(w, p, r, 0.0));
  r.deadline = 0.999;
  CHECK_FALSE(can_meet_deadline(w, p, r, 0.0));
  // Commitments push the finish time past the deadline.
  r.deadline = 1.5;
  w.committed_until = 1.0;
  CHECK_FALSE(can_meet_deadline(w, p, r, 0.0));
}

TEST_CASE("a bare fleet spins up a reactive cpu") {
  const ArrivalTrace trace = make_trace({0.0}, 0.010, 1.0);
  SimConfig cfg;
  ScriptedHooks hooks;
  DispatchConfig d;  // both classes allowed, reactive fallback on
  Simulation sim(trace, cfg, hooks, d);
  const SimReport r = sim.run();
  CHECK(r.cpu_spin_ups == 1);
  CHECK(r.fpga_spin_ups == 0);
  CHECK(r.requests_on_cpu == 1);
  CHECK(r.deadline_misses == 0);
}

TEST_CASE("efficient-first prefers the fpga class") {
  const ArrivalTrace trace = make_trace({0.0}, 0.2, 5.0);
  SimConfig cfg;
  ScriptedHooks hooks = warm_pair();
  DispatchConfig d;
  Simulation sim(trace, cfg, hooks, d);
  const SimReport r = sim.run();
  CHECK(r.requests_on_fpga == 1);
  CHECK(r.requests_on_cpu == 0);
}

TEST_CASE("efficient-first packs the busiest feasible worker") {
  // Two warm FPGAs, two quick requests: the second lands on the worker that
  // is already busy, leaving the other untouched.
  const ArrivalTrace trace = make_trace({0.0, 0.001}, 0.1, 5.0);
  SimConfig cfg;
  std::vector<WorkerSegment> segs;
  cfg.debug_segments = &segs;
  ScriptedHooks hooks = warm_fleet(WorkerClass::FPGA, 2);
  Simulation sim(trace, cfg, hooks, fpga_only(DispatchPolicy::EfficientFirst));
  const SimReport r = sim.run();
  CHECK(r.deadline_misses == 0);
  CHECK(r.requests_on_fpga == 2);
  // Only one of the two workers ever runs anything; back-to-back service
  // keeps it in a single contiguous busy stretch.
  const auto counts = busy_counts(segs);
  CHECK(counts.size() == 1);
}

TEST_CASE("round-robin spreads across the fleet") {
  const ArrivalTrace trace = make_trace({0.0, 0.001}, 0.1, 5.0);
  SimConfig cfg;
  std::vector<WorkerSegment> segs;
  cfg.debug_segments = &segs;
  ScriptedHooks hooks = warm_fleet(WorkerClass::FPGA, 2);
  Simulation sim(trace, cfg, hooks, fpga_only(DispatchPolicy::RoundRobin));
  const SimReport r = sim.run();
  CHECK(r.deadline_misses == 0);
  const auto counts = busy_counts(segs);
  REQUIRE(counts.size() == 2);
  for (const auto& [id, n] : counts) CHECK(n == 1);
}

TEST_CASE("index-packing merges classes and orders by load") {
  // One warm CPU (lower id) and one warm FPGA. With every load at zero the
  // merged scan takes the lowest id — the CPU — and then keeps packing it
  // while it stays the most loaded worker.
  const ArrivalTrace trace = make_trace({0.0, 0.01}, 0.2, 5.0);
  SimConfig cfg;
  ScriptedHooks hooks = warm_pair();
  DispatchConfig d;
  d.policy = DispatchPolicy::IndexPacking;
  Simulation sim(trace, cfg, hooks, d);
  const SimReport r = sim.run();
  CHECK(r.requests_on_cpu == 2);
  CHECK(r.requests_on_fpga == 0);
}

TEST_CASE("gate failure falls back to a reactive cpu") {
  // With a tight deadline multiplier the third simultaneous request cannot
  // finish in time behind two queued services on the only FPGA, so the
  // dispatcher brings up a CPU for it — which still makes the deadline.
  const ArrivalTrace trace = make_trace({0.0, 0.0, 0.0}, 0.5, 20.0);
  SimConfig cfg;
  cfg.deadline_mult = 1.2;
  ScriptedHooks hooks = warm_fleet(WorkerClass::FPGA, 1);
  DispatchConfig d;  // efficient-first with reactive fallback
  Simulation sim(trace, cfg, hooks, d);
  const SimReport r = sim.run();
  CHECK(r.requests_on_fpga == 2);
  CHECK(r.requests_on_cpu == 1);
  CHECK(r.cpu_spin_ups == 1);
  CHECK(r.deadline_misses == 0);
}

TEST_CASE("reactive fallback meets deadlines at default settings") {
  RateTrace rt = bmodel_rates(200.0, 4, 0.75, 3);
  const ArrivalTrace trace = poisson_arrivals(rt, rt.horizon(), 12);
  SimConfig cfg;
  ScriptedHooks hooks;
  for (DispatchPolicy p : {DispatchPolicy::EfficientFirst,
                           DispatchPolicy::RoundRobin,
                           DispatchPolicy::IndexPacking}) {
    DispatchConfig d;
    d.policy = p;
    ScriptedHooks h;
    Simulation sim(trace, cfg, h, d);
    const SimReport r = sim.run();
    CHECK(r.deadline_misses == 0);
    CHECK(r.requests_total == trace.count());
  }
}
