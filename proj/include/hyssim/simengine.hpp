#pragma once

// Deterministic discrete-event core. Advances time over a merged stream of
// trace arrivals and scheduled events, drives worker lifecycles
// (SpinningUp -> Idle/Busy -> SpinningDown -> Dead), invokes scheduler hooks
// (periodic allocation ticks, service-start notifications, worker deaths),
// and accrues the energy/cost ledgers.

#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "hyssim/dispatch.hpp"
#include "hyssim/model.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim {

// Processing order at equal timestamps: completions free capacity before
// same-time arrivals dispatch; spin-downs settle before spin-ups; allocation
// ticks observe a settled fleet before new arrivals; idle timeouts run last.
enum class EventKind : uint8_t {
  RequestComplete = 0,
  SpinDownComplete = 1,
  SpinUpComplete = 2,
  IntervalTick = 3,
  RequestArrival = 4,
  IdleTimeout = 5,
};

const char* event_kind_name(EventKind k);

struct Event {
  double time = 0;
  EventKind kind = EventKind::RequestArrival;
  uint64_t subject = 0;   // request index or worker id (tick index for ticks)
  uint64_t sequence = 0;  // monotone; breaks remaining ties
};

// Per-worker state segment, exported when a debug collector is configured;
// lets tests integrate power over segments independently of the ledgers.
struct WorkerSegment {
  uint64_t worker = 0;
  WorkerClass cls = WorkerClass::CPU;
  WorkerState state = WorkerState::SpinningUp;
  double t0 = 0;
  double t1 = 0;
};

struct SimConfig {
  WorkerClassParams cpu = default_cpu_params();
  WorkerClassParams fpga = default_fpga_params();
  double interval_s = 10.0;            // allocator tick period
  double idle_timeout_cpu_s = -1.0;    // < 0: default to the class spin-up latency
  double idle_timeout_fpga_s = -1.0;   // may be +infinity (never time out)
  double deadline_mult = 10.0;
  uint64_t seed = 0;                   // echoed into reports; the engine is RNG-free
  bool abort_on_miss = false;          // provisioning searches stop at the first miss
  std::string event_log_path;          // empty: no event log
  std::vector<WorkerSegment>* debug_segments = nullptr;

  const WorkerClassParams& params(WorkerClass c) const {
    return c == WorkerClass::CPU ? cpu : fpga;
  }
  double idle_timeout(WorkerClass c) const {
    const double v = c == WorkerClass::CPU ? idle_timeout_cpu_s : idle_timeout_fpga_s;
    return v < 0 ? params(c).spin_up_latency_s : v;
  }
  void validate() const;
};

class Simulation;

// Scheduler integration points. Allocation is requested through the
// simulation handle; dispatch is engine-driven per DispatchConfig.
struct SchedulerHooks {
  virtual ~SchedulerHooks() = default;
  virtual bool wants_ticks() const { return false; }
  // Called once before any event is processed; may pre-allocate workers.
  virtual void on_start(Simulation&) {}
  // Called at t = tick_index * interval_s while arrivals or held requests remain.
  virtual void on_tick(Simulation&, double /*now*/, int64_t /*tick_index*/) {}
  // Called when a request begins executing on a worker of the given class;
  // base_size is the request's speedup-1 service time.
  virtual void on_service_start(Simulation&, WorkerClass, double /*base_size*/,
                                double /*now*/) {}
  virtual void on_worker_dead(Simulation&, const Worker&, double /*now*/) {}
};

class Simulation {
 public:
  Simulation(const ArrivalTrace& trace, const SimConfig& cfg,
             SchedulerHooks& hooks, const DispatchConfig& dcfg);
  ~Simulation();

  // Runs to drain and returns the finalized report. Throws ProvisioningError
  // when requests are permanently starved of capacity. With abort_on_miss the
  // run instead stops at the first miss/starvation and infeasible() is set
  // (the returned report is not finalized in that case).
  SimReport run();
  bool infeasible() const { return infeasible_; }

  // --- scheduler-facing API ------------------------------------------------
  void allocate_workers(WorkerClass cls, int64_t count);
  void allocate_workers_at(WorkerClass cls, int64_t count, double t);
  int alive_count(WorkerClass cls) const { return idx_[static_cast<int>(cls)].alive; }
  double now() const { return now_; }
  const SimConfig& config() const { return cfg_; }
  const ArrivalTrace& trace() const { return trace_; }
  double horizon() const { return trace_.horizon_s; }
  // Sum of native service seconds (base/speedup) of requests arriving in
  // [t0, t1), as served by the given class. Foresight helper for schedulers
  // with perfect trace knowledge.
  double arrival_demand_native_seconds(WorkerClass cls, double t0, double t1) const;
  // Re-arms the idle timers of the most recently idled workers so that up to
  // `target` of the class stays alive; workers beyond the target keep their
  // old timers and drain normally. No-op for classes that never time out.
  void keep_warm(WorkerClass cls, int64_t target);

  // --- dispatch-facing internals -------------------------------------------
  struct OrderKey {
    double key;
    uint64_t id;
  };
  // Descending key, ascending id: busy lists scan highest committed load
  // first, idle lists scan the most recently idled worker first.
  struct DescKeyAscId {
    bool operator()(const OrderKey& a, const OrderKey& b) const {
      if (a.key != b.key) return a.key > b.key;
      return a.id < b.id;
    }
  };
  struct ClassIndex {
    std::set<OrderKey, DescKeyAscId> busy;  // key = committed_until
    std::set<OrderKey, DescKeyAscId> idle;  // key = idle_since
    std::vector<uint64_t> spinning;         // SpinningUp worker ids
    int alive = 0;                          // SpinningUp + Idle + Busy
    int existing = 0;                       // all non-Dead workers
  };
  ClassIndex& index(WorkerClass cls) { return idx_[static_cast<int>(cls)]; }
  const std::map<uint64_t, Worker>& workers() const { return workers_; }
  Worker& worker(uint64_t id) { return workers_.at(id); }
  const DispatchConfig& dispatch_config() const { return dcfg_; }
  uint64_t rr_cursor() const { return rr_cursor_; }
  void set_rr_cursor(uint64_t c) { rr_cursor_ = c; }
  Request make_request(size_t i) const {
    return trace_.request(i, cfg_.deadline_mult);
  }

 private:
  struct HeapEvent {
    Event e;
    uint32_t epoch = 0;  // idle-timeout staleness guard
  };
  struct HeapAfter {
    bool operator()(const HeapEvent& a, const HeapEvent& b) const {
      if (a.e.time != b.e.time) return a.e.time > b.e.time;
      if (a.e.kind != b.e.kind) return a.e.kind > b.e.kind;
      return a.e.sequence > b.e.sequence;
    }
  };

  void push_event(double t, EventKind kind, uint64_t subject, uint32_t epoch = 0);
  void record_event(const Event& e);
  void process_arrival_batch();
  void dispatch_one(uint32_t req_idx);
  void assign_request(uint64_t worker_id, uint32_t req_idx, const Request& r);
  void force_assign(uint32_t req_idx, const Request& r);
  void retry_pending();
  void start_service(Worker& w, uint32_t req_idx);
  void handle_request_complete(uint64_t worker_id, double t);
  void handle_spin_up_complete(uint64_t worker_id);
  void handle_idle_timeout(uint64_t worker_id, uint32_t epoch);
  void handle_spin_down_complete(uint64_t worker_id);
  void handle_tick(int64_t tick_index);
  void go_idle(Worker& w);
  void accrue(Worker& w, double t);
  void forced_drain();
  void note_miss();
  SimReport build_report(bool drained);

  const ArrivalTrace& trace_;
  SimConfig cfg_;
  SchedulerHooks& hooks_;
  DispatchConfig dcfg_;

  std::map<uint64_t, Worker> workers_;
  ClassIndex idx_[2];
  std::priority_queue<HeapEvent, std::vector<HeapEvent>, HeapAfter> events_;
  std::vector<double> size_prefix_;  // prefix sums when sizes vary per request

  size_t next_arrival_ = 0;
  uint64_t seq_ = 0;
  uint64_t next_worker_id_ = 1;
  uint64_t rr_cursor_ = 1;
  double now_ = -std::numeric_limits<double>::infinity();
  bool ran_ = false;
  bool aborted_ = false;
  bool infeasible_ = false;

  EnergyLedger energy_;
  CostLedger cost_;
  SimReport counters_;  // count fields filled during the run
  std::vector<uint32_t> pending_;  // held requests (no capacity at all)
  std::vector<uint32_t> batch_;
  uint64_t hash_ = 1469598103934665603ull;  // FNV-1a offset basis
  std::FILE* elog_ = nullptr;
};

}  // namespace hyssim
