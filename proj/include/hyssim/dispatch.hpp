#pragma once

// Request-to-worker assignment policies. The efficient-first policy prefers
// FPGAs and packs the busiest feasible worker; round-robin rotates a cursor
// over all allocated workers; index-packing scans one merged list of both
// classes by decreasing load. All policies are deadline-gated.

#include <string>

#include "hyssim/model.hpp"

namespace hyssim {

class Simulation;

enum class DispatchPolicy { EfficientFirst, RoundRobin, IndexPacking };

DispatchPolicy parse_dispatch_policy(const std::string& name);  // throws UsageError
const char* dispatch_policy_name(DispatchPolicy p);

struct DispatchConfig {
  DispatchPolicy policy = DispatchPolicy::EfficientFirst;
  bool allow_cpu = true;
  bool allow_fpga = true;
  // On a full gate failure, spin up one CPU reactively and pre-queue the
  // request on it. Disabled for FPGA-only schedulers, which instead assign to
  // the earliest-available FPGA (a recorded miss) or hold the request until
  // capacity exists.
  bool reactive_cpu = true;
};

// True iff the worker could finish the request by its deadline if assigned
// now: max(now, ready_at, committed_until) + base_size/speedup <= deadline.
// The boundary is inclusive.
bool can_meet_deadline(const Worker& w, const WorkerClassParams& params,
                       const Request& r, double now);

// Policy scan over the simulation's live worker tables. Returns the chosen
// worker id, or 0 when no worker passes the deadline gate.
uint64_t find_available_worker(Simulation& sim, const Request& r);

}  // namespace hyssim
