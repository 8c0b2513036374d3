#include "hyssim/dispatch.hpp"

#include <algorithm>

#include "hyssim/simengine.hpp"
#include "hyssim/text.hpp"

namespace hyssim {

DispatchPolicy parse_dispatch_policy(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "efficient-first") return DispatchPolicy::EfficientFirst;
  if (v == "round-robin") return DispatchPolicy::RoundRobin;
  if (v == "index-packing") return DispatchPolicy::IndexPacking;
  throw UsageError("unknown dispatch policy '" + s +
                   "' (expected efficient-first, round-robin, or index-packing)");
}

const char* dispatch_policy_name(DispatchPolicy p) {
  switch (p) {
    case DispatchPolicy::EfficientFirst: return "efficient-first";
    case DispatchPolicy::RoundRobin: return "round-robin";
    case DispatchPolicy::IndexPacking: return "index-packing";
  }
  return "?";
}

bool can_meet_deadline(const Worker& w, const WorkerClassParams& p,
                       const Request& r, double now) {
  const double st = r.base_size / p.speedup;
  const double start = std::max(w.committed_until, std::max(now, w.ready_at));
  return start + st <= r.deadline;
}

namespace {

bool class_allowed(const DispatchConfig& d, WorkerClass c) {
  return c == WorkerClass::CPU ? d.allow_cpu : d.allow_fpga;
}

// Most-loaded busy worker that still meets the deadline. The busy set is
// ordered by committed_until descending; entries at or below the probe bound
// are the candidates, rechecked with the exact gate against rounding at the
// boundary.
uint64_t pick_busy(Simulation& sim, WorkerClass cls, const Request& r) {
  const auto& p = sim.config().params(cls);
  auto& set = sim.index(cls).busy;
  if (set.empty()) return 0;
  const double st = r.base_size / p.speedup;
  const double bound = r.deadline - st;
  auto it = set.lower_bound({bound, 0});
  for (; it != set.end(); ++it) {
    const Worker& w = sim.worker(it->id);
    if (can_meet_deadline(w, p, r, sim.now())) return w.id;
  }
  return 0;
}

// All idle workers of a class can start immediately, so the gate outcome is
// identical across them; the set is ordered most-recently-idled first.
uint64_t pick_idle(Simulation& sim, WorkerClass cls, const Request& r) {
  const auto& p = sim.config().params(cls);
  auto& set = sim.index(cls).idle;
  if (set.empty()) return 0;
  const Worker& w = sim.worker(set.begin()->id);
  if (can_meet_deadline(w, p, r, sim.now())) return w.id;
  return 0;
}

// Most-loaded spinning-up worker (queued seconds beyond its ready time) that
// still meets the deadline; ties broken by lowest id.
uint64_t pick_spinning(Simulation& sim, WorkerClass cls, const Request& r) {
  const auto& p = sim.config().params(cls);
  uint64_t best = 0;
  double best_load = 0;
  for (uint64_t id : sim.index(cls).spinning) {
    const Worker& w = sim.worker(id);
    if (!can_meet_deadline(w, p, r, sim.now())) continue;
    const double load = w.committed_until - w.ready_at;
    if (best == 0 || load > best_load || (load == best_load && id < best)) {
      best = id;
      best_load = load;
    }
  }
  return best;
}

uint64_t find_efficient_first(Simulation& sim, const Request& r) {
  static constexpr WorkerClass kOrder[2] = {WorkerClass::FPGA, WorkerClass::CPU};
  for (WorkerClass cls : kOrder) {
    if (!class_allowed(sim.dispatch_config(), cls)) continue;
    if (uint64_t id = pick_busy(sim, cls, r)) return id;
    if (uint64_t id = pick_idle(sim, cls, r)) return id;
    if (uint64_t id = pick_spinning(sim, cls, r)) return id;
  }
  return 0;
}

uint64_t find_round_robin(Simulation& sim, const Request& r) {
  const auto& workers = sim.workers();
  if (workers.empty()) return 0;
  auto usable = [&](const Worker& w) {
    if (w.state == WorkerState::SpinningDown || w.state == WorkerState::Dead) {
      return false;
    }
    if (!class_allowed(sim.dispatch_config(), w.cls)) return false;
    return can_meet_deadline(w, sim.config().params(w.cls), r, sim.now());
  };
  auto start = workers.lower_bound(sim.rr_cursor());
  for (auto it = start; it != workers.end(); ++it) {
    if (usable(it->second)) {
      sim.set_rr_cursor(it->first + 1);
      return it->first;
    }
  }
  for (auto it = workers.begin(); it != start; ++it) {
    if (usable(it->second)) {
      sim.set_rr_cursor(it->first + 1);
      return it->first;
    }
  }
  return 0;
}

uint64_t find_index_packing(Simulation& sim, const Request& r) {
  uint64_t best = 0;
  double best_load = 0;
  auto consider = [&](uint64_t id, WorkerClass cls) {
    const Worker& w = sim.worker(id);
    if (!can_meet_deadline(w, sim.config().params(cls), r, sim.now())) return;
    const double load =
        std::max(0.0, w.committed_until - std::max(sim.now(), w.ready_at));
    if (best == 0 || load > best_load || (load == best_load && id < best)) {
      best = id;
      best_load = load;
    }
  };
  for (int c = 0; c < 2; ++c) {
    const auto cls = static_cast<WorkerClass>(c);
    if (!class_allowed(sim.dispatch_config(), cls)) continue;
    const auto& ix = sim.index(cls);
    for (const auto& k : ix.busy) consider(k.id, cls);
    for (const auto& k : ix.idle) consider(k.id, cls);
    for (uint64_t id : ix.spinning) consider(id, cls);
  }
  return best;
}

}  // namespace

uint64_t find_available_worker(Simulation& sim, const Request& r) {
  switch (sim.dispatch_config().policy) {
    case DispatchPolicy::EfficientFirst: return find_efficient_first(sim, r);
    case DispatchPolicy::RoundRobin: return find_round_robin(sim, r);
    case DispatchPolicy::IndexPacking: return find_index_packing(sim, r);
  }
  return 0;
}

}  // namespace hyssim
