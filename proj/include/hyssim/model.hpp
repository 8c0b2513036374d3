#pragma once

// Domain types shared by every module: worker classes and their physical /
// economic parameters, requests, worker lifecycle state, energy and cost
// ledgers, and the normalized simulation report.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyssim {

// ---------------------------------------------------------------------------
// Error taxonomy (mapped to CLI exit codes: usage=2, provisioning=3, io=4).

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProvisioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractViolationError : std::logic_error {
  using std::logic_error::logic_error;
};
struct NotDrainedError : std::logic_error {
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Worker classes.

enum class WorkerClass : uint8_t { CPU = 0, FPGA = 1 };

inline const char* class_name(WorkerClass c) {
  return c == WorkerClass::CPU ? "cpu" : "fpga";
}

struct WorkerClassParams {
  WorkerClass class_tag = WorkerClass::CPU;
  double spin_up_latency_s = 0;   // time from allocation to ready
  double spin_down_latency_s = 0; // time from spin-down start to gone
  double busy_power_w = 0;        // also drawn during spin-up/spin-down
  double idle_power_w = 0;
  double price_per_hour = 0;      // occupancy price, charged for the full lifetime
  double speedup = 1;             // service time on this class = base_size / speedup
};

WorkerClassParams default_cpu_params();
WorkerClassParams default_fpga_params();

// Throws UsageError when a parameter is out of its legal range.
void validate_params(const WorkerClassParams& p);

// ---------------------------------------------------------------------------
// Requests.

struct Request {
  uint64_t id = 0;
  double arrival = 0;    // seconds
  double base_size = 0;  // service seconds on a speedup-1 worker
  double deadline = 0;   // absolute seconds
};

// ---------------------------------------------------------------------------
// Worker lifecycle.

enum class WorkerState : uint8_t { SpinningUp, Idle, Busy, SpinningDown, Dead };

inline const char* state_name(WorkerState s) {
  switch (s) {
    case WorkerState::SpinningUp: return "spinning_up";
    case WorkerState::Idle: return "idle";
    case WorkerState::Busy: return "busy";
    case WorkerState::SpinningDown: return "spinning_down";
    case WorkerState::Dead: return "dead";
  }
  return "?";
}

struct Worker {
  uint64_t id = 0;
  WorkerClass cls = WorkerClass::CPU;
  WorkerState state = WorkerState::SpinningUp;
  double alloc_start = 0;      // allocation request time
  double ready_at = 0;         // alloc_start + spin_up_latency
  double idle_since = 0;       // valid while Idle
  double committed_until = 0;  // earliest time all assigned work completes
  double state_since = 0;      // start of the current state segment (accounting)
  uint32_t alloc_context = 0;  // same-class workers already allocated at request time
  uint32_t timeout_epoch = 0;  // invalidates stale idle-timeout events
  std::deque<uint32_t> queue;  // assigned request indices; front is running when Busy
};

// ---------------------------------------------------------------------------
// Ledgers.

struct ClassEnergy {
  double busy_j = 0;
  double idle_j = 0;
  double spin_up_j = 0;
  double spin_down_j = 0;
  double total() const { return busy_j + idle_j + spin_up_j + spin_down_j; }
};

struct EnergyLedger {
  ClassEnergy cpu;
  ClassEnergy fpga;
  ClassEnergy& of(WorkerClass c) { return c == WorkerClass::CPU ? cpu : fpga; }
  const ClassEnergy& of(WorkerClass c) const {
    return c == WorkerClass::CPU ? cpu : fpga;
  }
  double busy_j() const { return cpu.busy_j + fpga.busy_j; }
  double idle_j() const { return cpu.idle_j + fpga.idle_j; }
  double spin_j() const {
    return cpu.spin_up_j + cpu.spin_down_j + fpga.spin_up_j + fpga.spin_down_j;
  }
  double total() const { return cpu.total() + fpga.total(); }
};

struct CostLedger {
  double cpu_dollars = 0;
  double fpga_dollars = 0;
  double& of(WorkerClass c) { return c == WorkerClass::CPU ? cpu_dollars : fpga_dollars; }
  double total() const { return cpu_dollars + fpga_dollars; }
};

// ---------------------------------------------------------------------------
// Report.

struct SimReport {
  EnergyLedger energy;
  CostLedger cost;
  uint64_t requests_total = 0;
  uint64_t requests_on_fpga = 0;
  uint64_t requests_on_cpu = 0;
  uint64_t deadline_misses = 0;
  uint64_t fpga_spin_ups = 0;
  uint64_t cpu_spin_ups = 0;
  int peak_fpgas = 0;
  int peak_cpus = 0;
  double efficiency_pct = 0;   // 100 * ideal_energy / actual_energy
  double relative_cost = 0;    // actual_cost / ideal_cost
  uint64_t event_log_hash = 0; // order-sensitive hash of the processed event stream
};

// Best-case reference platform: every request served back-to-back on FPGAs
// with zero idling and zero spin-up overhead. Returns (joules, dollars).
std::pair<double, double> ideal_reference(const std::vector<Request>& requests,
                                          const WorkerClassParams& fpga);

// Same reference computed from raw service sizes (avoids materializing
// Request objects for very large traces).
std::pair<double, double> ideal_reference_from_sizes(
    const std::vector<double>& sizes, size_t count, double constant_size,
    const WorkerClassParams& fpga);

// Fill in efficiency_pct / relative_cost on a raw report. `ideal` is the
// (energy, cost) pair from ideal_reference. Throws NotDrainedError when the
// simulation did not fully drain.
void finalize_report(SimReport& report, std::pair<double, double> ideal,
                     bool drained);

}  // namespace hyssim
