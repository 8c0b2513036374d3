#include "hyssim/simengine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "hyssim/text.hpp"

namespace hyssim {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::RequestComplete: return "request_complete";
    case EventKind::SpinDownComplete: return "spin_down_complete";
    case EventKind::SpinUpComplete: return "spin_up_complete";
    case EventKind::IntervalTick: return "interval_tick";
    case EventKind::RequestArrival: return "request_arrival";
    case EventKind::IdleTimeout: return "idle_timeout";
  }
  return "?";
}

void SimConfig::validate() const {
  validate_params(cpu);
  validate_params(fpga);
  if (cpu.class_tag != WorkerClass::CPU || fpga.class_tag != WorkerClass::FPGA) {
    throw UsageError("worker class parameters carry the wrong class tag");
  }
  if (!(interval_s > 0) || !std::isfinite(interval_s)) {
    throw UsageError("sim.interval_s must be positive and finite");
  }
  if (interval_s < fpga.spin_up_latency_s) {
    throw UsageError(
        "sim.interval_s must be at least the FPGA spin-up latency (" +
        std::to_string(fpga.spin_up_latency_s) +
        " s); shorter intervals would allocate against a fleet that cannot "
        "materialize within one interval");
  }
  if (!(deadline_mult > 0) || !std::isfinite(deadline_mult)) {
    throw UsageError("sim.deadline_mult must be positive and finite");
  }
  auto check_timeout = [](double v, const char* key) {
    // Negative means "use the class spin-up latency"; +infinity means never.
    if (std::isnan(v)) throw UsageError(std::string(key) + " must not be NaN");
  };
  check_timeout(idle_timeout_cpu_s, "sim.idle_timeout_cpu_s");
  check_timeout(idle_timeout_fpga_s, "sim.idle_timeout_fpga_s");
}

Simulation::Simulation(const ArrivalTrace& trace, const SimConfig& cfg,
                       SchedulerHooks& hooks, const DispatchConfig& dcfg)
    : trace_(trace), cfg_(cfg), hooks_(hooks), dcfg_(dcfg) {
  cfg_.validate();
  if (!dcfg_.allow_cpu && !dcfg_.allow_fpga) {
    throw UsageError("dispatch must allow at least one worker class");
  }
  if (!trace_.sizes.empty()) {
    size_prefix_.reserve(trace_.sizes.size() + 1);
    size_prefix_.push_back(0);
    double acc = 0;
    for (double s : trace_.sizes) {
      acc += s;
      size_prefix_.push_back(acc);
    }
  }
}

Simulation::~Simulation() {
  if (elog_) std::fclose(elog_);
}

double Simulation::arrival_demand_native_seconds(WorkerClass cls, double t0,
                                                 double t1) const {
  const auto& a = trace_.arrivals;
  auto lo = std::lower_bound(a.begin(), a.end(), t0);
  auto hi = std::lower_bound(a.begin(), a.end(), t1);
  double base;
  if (trace_.sizes.empty()) {
    base = trace_.base_size_s * static_cast<double>(hi - lo);
  } else {
    base = size_prefix_[static_cast<size_t>(hi - a.begin())] -
           size_prefix_[static_cast<size_t>(lo - a.begin())];
  }
  return base / cfg_.params(cls).speedup;
}

void Simulation::push_event(double t, EventKind kind, uint64_t subject,
                            uint32_t epoch) {
  HeapEvent he;
  he.e.time = t;
  he.e.kind = kind;
  he.e.subject = subject;
  he.e.sequence = seq_++;
  he.epoch = epoch;
  events_.push(he);
}

void Simulation::record_event(const Event& e) {
  uint64_t tb;
  static_assert(sizeof(tb) == sizeof(e.time));
  std::memcpy(&tb, &e.time, sizeof(tb));
  auto mix = [this](const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      hash_ ^= b[i];
      hash_ *= 1099511628211ull;
    }
  };
  mix(&tb, sizeof(tb));
  const auto kb = static_cast<unsigned char>(e.kind);
  mix(&kb, 1);
  mix(&e.subject, sizeof(e.subject));
  if (elog_) {
    std::fprintf(elog_, "%.17g,%s,%llu\n", e.time, event_kind_name(e.kind),
                 static_cast<unsigned long long>(e.subject));
  }
}

void Simulation::accrue(Worker& w, double t) {
  const double dt = t - w.state_since;
  if (dt < 0) throw ContractViolationError("accounting moved backwards in time");
  if (dt > 0) {
    const auto& p = cfg_.params(w.cls);
    ClassEnergy& ce = energy_.of(w.cls);
    switch (w.state) {
      case WorkerState::SpinningUp: ce.spin_up_j += p.busy_power_w * dt; break;
      case WorkerState::Idle: ce.idle_j += p.idle_power_w * dt; break;
      case WorkerState::Busy: ce.busy_j += p.busy_power_w * dt; break;
      case WorkerState::SpinningDown: ce.spin_down_j += p.busy_power_w * dt; break;
      case WorkerState::Dead:
        throw ContractViolationError("dead worker cannot accrue energy");
    }
    if (cfg_.debug_segments) {
      cfg_.debug_segments->push_back({w.id, w.cls, w.state, w.state_since, t});
    }
  }
  w.state_since = t;
}

void Simulation::allocate_workers(WorkerClass cls, int64_t count) {
  allocate_workers_at(cls, count, now_);
  retry_pending();
}

void Simulation::allocate_workers_at(WorkerClass cls, int64_t count, double t) {
  if (count <= 0) return;
  const auto& p = cfg_.params(cls);
  ClassIndex& ix = index(cls);
  for (int64_t i = 0; i < count; ++i) {
    Worker w;
    w.id = next_worker_id_++;
    w.cls = cls;
    w.state = WorkerState::SpinningUp;
    w.alloc_start = t;
    w.ready_at = t + p.spin_up_latency_s;
    w.committed_until = w.ready_at;
    w.state_since = t;
    w.alloc_context = static_cast<uint32_t>(ix.alive);
    ix.spinning.push_back(w.id);
    ix.alive += 1;
    ix.existing += 1;
    if (cls == WorkerClass::FPGA) {
      counters_.fpga_spin_ups += 1;
      counters_.peak_fpgas = std::max(counters_.peak_fpgas, ix.existing);
    } else {
      counters_.cpu_spin_ups += 1;
      counters_.peak_cpus = std::max(counters_.peak_cpus, ix.existing);
    }
    push_event(w.ready_at, EventKind::SpinUpComplete, w.id);
    workers_.emplace(w.id, w);
  }
}

void Simulation::retry_pending() {
  if (pending_.empty() || aborted_) return;
  std::vector<uint32_t> held;
  held.swap(pending_);
  std::sort(held.begin(), held.end(), [this](uint32_t a, uint32_t b) {
    const Request ra = make_request(a);
    const Request rb = make_request(b);
    if (ra.deadline != rb.deadline) return ra.deadline < rb.deadline;
    return a < b;
  });
  for (uint32_t i : held) {
    if (aborted_) {
      pending_.push_back(i);
      continue;
    }
    dispatch_one(i);
  }
}

void Simulation::start_service(Worker& w, uint32_t req_idx) {
  const double st = trace_.size_of(req_idx) / cfg_.params(w.cls).speedup;
  // Pushed as now + st: bitwise-identical to the committed_until stacking,
  // which computed the same two-operand sum at assignment time.
  push_event(now_ + st, EventKind::RequestComplete, w.id);
  if (w.cls == WorkerClass::FPGA) {
    counters_.requests_on_fpga += 1;
  } else {
    counters_.requests_on_cpu += 1;
  }
  hooks_.on_service_start(*this, w.cls, trace_.size_of(req_idx), now_);
}

void Simulation::assign_request(uint64_t worker_id, uint32_t req_idx,
                                const Request& r) {
  Worker& w = worker(worker_id);
  ClassIndex& ix = index(w.cls);
  const double st = r.base_size / cfg_.params(w.cls).speedup;
  const bool was_idle = w.state == WorkerState::Idle;
  if (w.state == WorkerState::Busy) {
    ix.busy.erase({w.committed_until, w.id});
  } else if (was_idle) {
    ix.idle.erase({w.idle_since, w.id});
    accrue(w, now_);
    w.state = WorkerState::Busy;
    w.timeout_epoch += 1;  // cancel any scheduled idle timeout
  }
  const double start = std::max(w.committed_until, std::max(now_, w.ready_at));
  w.committed_until = start + st;
  w.queue.push_back(req_idx);
  if (w.state == WorkerState::Busy) {
    ix.busy.insert({w.committed_until, w.id});
  }
  if (was_idle) start_service(w, req_idx);
}

void Simulation::force_assign(uint32_t req_idx, const Request& r) {
  // Every alive worker fails the deadline gate: the request is assigned to
  // the worker able to start it earliest and the miss surfaces at completion.
  if (cfg_.abort_on_miss) {
    aborted_ = true;
    infeasible_ = true;
    pending_.push_back(req_idx);
    return;
  }
  uint64_t best = 0;
  double best_start = 0;
  for (int c = 0; c < 2; ++c) {
    const auto cls = static_cast<WorkerClass>(c);
    if (cls == WorkerClass::CPU && !dcfg_.allow_cpu) continue;
    if (cls == WorkerClass::FPGA && !dcfg_.allow_fpga) continue;
    const ClassIndex& ix = idx_[c];
    auto consider = [&](uint64_t id) {
      const Worker& w = workers_.at(id);
      const double start = std::max(w.committed_until, std::max(now_, w.ready_at));
      if (best == 0 || start < best_start ||
          (start == best_start && id < best)) {
        best = id;
        best_start = start;
      }
    };
    for (const auto& k : ix.busy) consider(k.id);
    for (const auto& k : ix.idle) consider(k.id);
    for (uint64_t id : ix.spinning) consider(id);
  }
  if (best == 0) {
    throw ContractViolationError("force_assign called with no alive worker");
  }
  assign_request(best, req_idx, r);
}

void Simulation::dispatch_one(uint32_t req_idx) {
  const Request r = make_request(req_idx);
  const uint64_t wid = find_available_worker(*this, r);
  if (wid != 0) {
    assign_request(wid, req_idx, r);
    return;
  }
  if (dcfg_.reactive_cpu && dcfg_.allow_cpu) {
    // Reactive fallback: bring up one CPU and queue the request on it.
    const uint64_t before = next_worker_id_;
    allocate_workers_at(WorkerClass::CPU, 1, now_);
    assign_request(before, req_idx, r);
    return;
  }
  const bool any_alive =
      (dcfg_.allow_cpu && idx_[0].alive > 0) || (dcfg_.allow_fpga && idx_[1].alive > 0);
  if (any_alive) {
    force_assign(req_idx, r);
  } else {
    pending_.push_back(req_idx);
  }
}

void Simulation::process_arrival_batch() {
  const double t = trace_.arrivals[next_arrival_];
  now_ = t;
  batch_.clear();
  while (next_arrival_ < trace_.count() && trace_.arrivals[next_arrival_] == t) {
    const auto i = static_cast<uint32_t>(next_arrival_++);
    Event e;
    e.time = t;
    e.kind = EventKind::RequestArrival;
    e.subject = i;
    e.sequence = seq_++;
    record_event(e);
    counters_.requests_total += 1;
    batch_.push_back(i);
  }
  if (batch_.size() > 1) {
    std::sort(batch_.begin(), batch_.end(), [this](uint32_t a, uint32_t b) {
      const double da = trace_.size_of(a);
      const double db = trace_.size_of(b);
      if (da != db) return da < db;  // equal arrival time: deadline order
      return a < b;
    });
  }
  for (uint32_t i : batch_) {
    if (aborted_) {
      pending_.push_back(i);
      continue;
    }
    dispatch_one(i);
  }
}

void Simulation::keep_warm(WorkerClass cls, int64_t target) {
  const double timeout = cfg_.idle_timeout(cls);
  if (!std::isfinite(timeout)) return;
  ClassIndex& ix = index(cls);
  const int64_t excess = static_cast<int64_t>(ix.alive) - target;
  int64_t refresh = static_cast<int64_t>(ix.idle.size());
  if (excess > 0) refresh -= excess;
  if (refresh <= 0) return;
  std::vector<uint64_t> ids;
  ids.reserve(static_cast<size_t>(refresh));
  for (auto it = ix.idle.begin(); refresh > 0 && it != ix.idle.end();
       ++it, --refresh)
    ids.push_back(it->id);
  for (uint64_t id : ids) {
    Worker& w = worker(id);
    ix.idle.erase({w.idle_since, w.id});
    w.idle_since = now_;
    ix.idle.insert({now_, w.id});
    w.timeout_epoch += 1;
    push_event(now_ + timeout, EventKind::IdleTimeout, w.id, w.timeout_epoch);
  }
}

void Simulation::go_idle(Worker& w) {
  accrue(w, now_);
  w.state = WorkerState::Idle;
  w.idle_since = now_;
  index(w.cls).idle.insert({now_, w.id});
  const double timeout = cfg_.idle_timeout(w.cls);
  if (std::isfinite(timeout)) {
    w.timeout_epoch += 1;
    push_event(now_ + timeout, EventKind::IdleTimeout, w.id, w.timeout_epoch);
  }
}

void Simulation::note_miss() {
  counters_.deadline_misses += 1;
  if (cfg_.abort_on_miss) {
    aborted_ = true;
    infeasible_ = true;
  }
}

void Simulation::handle_request_complete(uint64_t worker_id, double t) {
  Worker& w = worker(worker_id);
  if (w.state != WorkerState::Busy || w.queue.empty()) {
    throw ContractViolationError("completion for a worker that is not running");
  }
  const uint32_t i = w.queue.front();
  w.queue.pop_front();
  const Request r = make_request(i);
  if (t > r.deadline) note_miss();
  if (!w.queue.empty()) {
    // committed_until covers the whole queue; the busy-set key is unchanged.
    start_service(w, w.queue.front());
  } else {
    index(w.cls).busy.erase({w.committed_until, w.id});
    go_idle(w);
  }
}

void Simulation::handle_spin_up_complete(uint64_t worker_id) {
  Worker& w = worker(worker_id);
  if (w.state != WorkerState::SpinningUp) {
    throw ContractViolationError("spin-up completion for a worker not spinning up");
  }
  ClassIndex& ix = index(w.cls);
  auto it = std::find(ix.spinning.begin(), ix.spinning.end(), worker_id);
  if (it == ix.spinning.end()) {
    throw ContractViolationError("spinning worker missing from its index");
  }
  ix.spinning.erase(it);
  if (!w.queue.empty()) {
    accrue(w, now_);
    w.state = WorkerState::Busy;
    ix.busy.insert({w.committed_until, w.id});
    start_service(w, w.queue.front());
  } else {
    go_idle(w);
  }
}

void Simulation::handle_idle_timeout(uint64_t worker_id, uint32_t /*epoch*/) {
  Worker& w = worker(worker_id);
  ClassIndex& ix = index(w.cls);
  accrue(w, now_);
  ix.idle.erase({w.idle_since, w.id});
  ix.alive -= 1;
  w.state = WorkerState::SpinningDown;
  push_event(now_ + cfg_.params(w.cls).spin_down_latency_s,
             EventKind::SpinDownComplete, w.id);
}

void Simulation::handle_spin_down_complete(uint64_t worker_id) {
  Worker& w = worker(worker_id);
  if (w.state != WorkerState::SpinningDown) {
    throw ContractViolationError("spin-down completion for a worker not spinning down");
  }
  accrue(w, now_);
  w.state = WorkerState::Dead;
  const auto& p = cfg_.params(w.cls);
  cost_.of(w.cls) += p.price_per_hour * (now_ - w.alloc_start) / 3600.0;
  index(w.cls).existing -= 1;
  hooks_.on_worker_dead(*this, w, now_);
  workers_.erase(worker_id);
}

void Simulation::handle_tick(int64_t tick_index) {
  hooks_.on_tick(*this, now_, tick_index);
  if (next_arrival_ < trace_.count() || !pending_.empty()) {
    const double next_t = static_cast<double>(tick_index + 1) * cfg_.interval_s;
    push_event(next_t, EventKind::IntervalTick,
               static_cast<uint64_t>(tick_index + 1));
  }
}

void Simulation::forced_drain() {
  if (!pending_.empty()) {
    if (cfg_.abort_on_miss) {
      aborted_ = true;
      infeasible_ = true;
      return;
    }
    throw ProvisioningError(
        std::to_string(pending_.size()) +
        " request(s) were never started: no worker of an allowed class was "
        "ever alive to take them");
  }
  if (workers_.empty()) return;
  // All remaining workers must be idle: busy and spinning workers always hold
  // a pending completion event, so an empty queue implies a quiet fleet.
  const double t_force = std::max(now_, trace_.horizon_s);
  for (auto& [id, w] : workers_) {
    if (w.state != WorkerState::Idle) {
      throw ContractViolationError("non-idle worker at drain time");
    }
    accrue(w, t_force);
    index(w.cls).idle.erase({w.idle_since, id});
    index(w.cls).alive -= 1;
    w.state = WorkerState::SpinningDown;
    w.timeout_epoch += 1;  // invalidate any scheduled (infinite-horizon) timeout
    push_event(t_force + cfg_.params(w.cls).spin_down_latency_s,
               EventKind::SpinDownComplete, id);
  }
  now_ = t_force;
}

SimReport Simulation::build_report(bool drained) {
  SimReport rep = counters_;
  rep.energy = energy_;
  rep.cost = cost_;
  rep.event_log_hash = hash_;
  if (drained) {
    const auto ideal = ideal_reference_from_sizes(
        trace_.sizes, trace_.count(), trace_.base_size_s, cfg_.fpga);
    finalize_report(rep, ideal, true);
  }
  return rep;
}

SimReport Simulation::run() {
  if (ran_) throw ContractViolationError("a simulation can only run once");
  ran_ = true;
  if (!cfg_.event_log_path.empty()) {
    elog_ = std::fopen(cfg_.event_log_path.c_str(), "wb");
    if (!elog_) throw IoError(cfg_.event_log_path + ": cannot open for writing");
    std::fprintf(elog_, "time_s,kind,subject\n");
  }
  hooks_.on_start(*this);
  if (hooks_.wants_ticks() && trace_.count() > 0) {
    push_event(0.0, EventKind::IntervalTick, 0);
  }
  for (;;) {
    if (aborted_) break;
    const bool have_arrival = next_arrival_ < trace_.count();
    if (events_.empty() && !have_arrival) {
      forced_drain();
      if (events_.empty()) break;
      continue;
    }
    if (have_arrival) {
      const double at = trace_.arrivals[next_arrival_];
      const bool arrival_first =
          events_.empty() || at < events_.top().e.time ||
          (at == events_.top().e.time &&
           events_.top().e.kind == EventKind::IdleTimeout);
      if (arrival_first) {
        if (at < now_) {
          throw ContractViolationError("arrival stream moved backwards in time");
        }
        process_arrival_batch();
        continue;
      }
    }
    const HeapEvent he = events_.top();
    events_.pop();
    if (he.e.time < now_) {
      throw ContractViolationError("event heap moved backwards in time");
    }
    if (he.e.kind == EventKind::IdleTimeout) {
      // Staleness is resolved before the event becomes observable.
      auto it = workers_.find(he.e.subject);
      if (it == workers_.end() || it->second.state != WorkerState::Idle ||
          it->second.timeout_epoch != he.epoch) {
        continue;
      }
    }
    now_ = he.e.time;
    record_event(he.e);
    switch (he.e.kind) {
      case EventKind::RequestComplete:
        handle_request_complete(he.e.subject, he.e.time);
        break;
      case EventKind::SpinDownComplete:
        handle_spin_down_complete(he.e.subject);
        break;
      case EventKind::SpinUpComplete:
        handle_spin_up_complete(he.e.subject);
        break;
      case EventKind::IntervalTick:
        handle_tick(static_cast<int64_t>(he.e.subject));
        break;
      case EventKind::RequestArrival:
        throw ContractViolationError("arrivals are merged, never queued");
      case EventKind::IdleTimeout:
        handle_idle_timeout(he.e.subject, he.epoch);
        break;
    }
  }
  if (elog_) {
    std::fclose(elog_);
    elog_ = nullptr;
  }
  if (aborted_) return build_report(false);
  const bool drained = workers_.empty() && pending_.empty() && events_.empty() &&
                       next_arrival_ == trace_.count();
  return build_report(drained);
}

}  // namespace hyssim
