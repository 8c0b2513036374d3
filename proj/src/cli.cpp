#include "hyssim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hyssim/baselines.hpp"
#include "hyssim/dispatch.hpp"
#include "hyssim/model.hpp"
#include "hyssim/oracle.hpp"
#include "hyssim/simengine.hpp"
#include "hyssim/spork.hpp"
#include "hyssim/text.hpp"

namespace hyssim {

SynthTrace synth_trace(const TraceSpec& spec) {
  const double horizon_s = spec.hours * 3600.0;
  int slots = 1;
  while (static_cast<double>(slots) * spec.slot_s < horizon_s) {
    if (slots > (1 << 20))
      throw UsageError("trace horizon needs more than 2^20 rate slots");
    slots *= 2;
  }
  const double size_s = sample_request_size(spec.bucket, spec.seed);
  RateTrace rt = bmodel_rates(static_cast<double>(slots), slots,
                              spec.burstiness, spec.seed, spec.slot_s, size_s);
  rt = scale_to_workers(rt, spec.avg_workers, size_s);
  rt.horizon_s = horizon_s;
  SynthTrace st;
  st.arrivals = poisson_arrivals(rt, horizon_s, spec.seed);
  st.rate = std::move(rt);
  st.size_s = size_s;
  return st;
}

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing.

struct CommonFlags {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& cf) {
  cmd->add_option("--config", cf.config_files,
                  "config file with key=value lines, '#' comments; repeatable");
  cmd->add_option("--set", cf.overrides,
                  "KEY=VALUE override, applied after config files; repeatable");
}

Config build_config(const CommonFlags& cf) {
  Config cfg;
  for (const auto& f : cf.config_files) cfg.load_file(f);
  for (const auto& kv : cf.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw UsageError("--set expects KEY=VALUE, got '" + kv + "'");
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  return cfg;
}

// Scheduler naming: spork, sporkE, sporkC, sporkB (each optionally with an
// "-ideal" suffix that swaps the predictor for exact next-interval demand),
// plus cpu-dynamic, fpga-static, fpga-dynamic, and mark-ideal.
struct SchedulerChoice {
  enum class Kind { Spork, CpuDynamic, FpgaStatic, FpgaDynamic, MarkIdeal };
  std::string name;  // echoed into result rows exactly as given
  Kind kind = Kind::Spork;
  bool has_mode = false;
  SporkMode mode = SporkMode::Energy;
  bool force_ideal = false;
};

SchedulerChoice parse_scheduler(const std::string& raw) {
  const std::string name = trim(raw);
  SchedulerChoice sc;
  sc.name = name;
  if (name == "cpu-dynamic") {
    sc.kind = SchedulerChoice::Kind::CpuDynamic;
    return sc;
  }
  if (name == "fpga-static") {
    sc.kind = SchedulerChoice::Kind::FpgaStatic;
    return sc;
  }
  if (name == "fpga-dynamic") {
    sc.kind = SchedulerChoice::Kind::FpgaDynamic;
    return sc;
  }
  if (name == "mark-ideal") {
    sc.kind = SchedulerChoice::Kind::MarkIdeal;
    return sc;
  }
  std::string core = name;
  const std::string suffix = "-ideal";
  if (core.size() > suffix.size() &&
      core.compare(core.size() - suffix.size(), suffix.size(), suffix) == 0) {
    sc.force_ideal = true;
    core.erase(core.size() - suffix.size());
  }
  sc.kind = SchedulerChoice::Kind::Spork;
  if (core == "spork") return sc;  // mode comes from spork.mode
  sc.has_mode = true;
  if (core == "sporkE") {
    sc.mode = SporkMode::Energy;
    return sc;
  }
  if (core == "sporkC") {
    sc.mode = SporkMode::Cost;
    return sc;
  }
  if (core == "sporkB") {
    sc.mode = SporkMode::Balanced;
    return sc;
  }
  throw UsageError(
      "unknown scheduler '" + name +
      "'; expected one of cpu-dynamic, fpga-static, fpga-dynamic, mark-ideal, "
      "spork, sporkE, sporkC, sporkB (spork names accept an -ideal suffix)");
}

// Explicit dispatch.policy applies to every scheduler; otherwise mark-ideal
// keeps its native round-robin placement and everything else packs
// efficient-first.
DispatchPolicy resolve_policy(const Config& cfg, SchedulerChoice::Kind kind) {
  if (!cfg.is_explicit("dispatch.policy") &&
      kind == SchedulerChoice::Kind::MarkIdeal)
    return DispatchPolicy::RoundRobin;
  return parse_dispatch_policy(cfg.get_string("dispatch.policy"));
}

struct RunResult {
  std::string scheduler;
  SimReport report;
  DispatchPolicy policy = DispatchPolicy::EfficientFirst;
  bool has_n_star = false;
  int64_t n_star = 0;
  bool has_k_star = false;
  int64_t k_star = 0;
  int64_t delta_max = 0;
};

RunResult run_scheduler(const SchedulerChoice& sc, const ArrivalTrace& trace,
                        const RateTrace* rate, const Config& cfg,
                        const std::string& event_log) {
  RunResult rr;
  rr.scheduler = sc.name;
  rr.policy = resolve_policy(cfg, sc.kind);
  SimConfig sim_cfg = cfg.sim_config();
  sim_cfg.event_log_path = event_log;
  switch (sc.kind) {
    case SchedulerChoice::Kind::Spork: {
      SporkConfig spc = cfg.spork_config();
      if (sc.has_mode) spc.objective.mode = sc.mode;
      if (sc.force_ideal) spc.ideal = true;
      SporkScheduler hooks(spc);
      DispatchConfig dc;
      dc.policy = rr.policy;
      Simulation sim(trace, sim_cfg, hooks, dc);
      rr.report = sim.run();
      break;
    }
    case SchedulerChoice::Kind::CpuDynamic:
      rr.report = run_cpu_dynamic(trace, sim_cfg, rr.policy);
      break;
    case SchedulerChoice::Kind::FpgaStatic: {
      // The search probes many fleet sizes; keep the event log out of the
      // probes and replay only the winning size into it.
      SimConfig probe_cfg = sim_cfg;
      probe_cfg.event_log_path.clear();
      StaticProvision sp = run_fpga_static(
          trace, probe_cfg, cfg.get_int("baseline.n_max"), rr.policy);
      rr.report = sp.report;
      rr.has_n_star = true;
      rr.n_star = sp.n_star;
      if (!event_log.empty()) {
        auto replay = fpga_static_probe(trace, sim_cfg, sp.n_star, rr.policy);
        rr.report = replay.second;
      }
      break;
    }
    case SchedulerChoice::Kind::FpgaDynamic: {
      DynamicProvision dp = run_fpga_dynamic(
          trace, sim_cfg, rate, cfg.get_int("baseline.k_max"), rr.policy);
      rr.report = dp.report;
      rr.has_k_star = true;
      rr.k_star = dp.k_star;
      rr.delta_max = dp.delta_max;
      break;
    }
    case SchedulerChoice::Kind::MarkIdeal:
      rr.report = run_mark_ideal(trace, sim_cfg, rr.policy);
      break;
  }
  return rr;
}

// ---------------------------------------------------------------------------
// Result CSV.

constexpr const char* kReportHeader =
    "scheduler,seed,efficiency_pct,relative_cost,deadline_misses,fpga_spinups,"
    "cpu_spinups,energy_busy_j,energy_idle_j,energy_spin_j,cost_usd";

std::string report_cells(const SimReport& r) {
  std::ostringstream s;
  s << fmt_g6(r.efficiency_pct) << ',' << fmt_g6(r.relative_cost) << ','
    << r.deadline_misses << ',' << r.fpga_spin_ups << ',' << r.cpu_spin_ups
    << ',' << fmt_g6(r.energy.busy_j()) << ',' << fmt_g6(r.energy.idle_j())
    << ',' << fmt_g6(r.energy.spin_j()) << ',' << fmt_g6(r.cost.total());
  return s.str();
}

bool file_nonempty(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  return in.good() && in.tellg() > 0;
}

void write_config_comments(std::ostream& out, const Config& cfg) {
  for (const auto& kv : cfg.entries())
    out << "# " << kv.first << "=" << kv.second << "\n";
}

void append_report_row(const std::string& path, const Config& cfg,
                       const std::string& trace_path, const std::string& row) {
  const bool fresh = !file_nonempty(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot write " + path);
  if (fresh) {
    out << "# trace=" << trace_path << "\n";
    write_config_comments(out, cfg);
    out << kReportHeader << "\n";
  }
  out << row << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::string hash_hex(uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void print_summary(std::ostream& out, const RunResult& rr) {
  const SimReport& r = rr.report;
  out << "scheduler      " << rr.scheduler << " (dispatch "
      << dispatch_policy_name(rr.policy) << ")\n";
  out << "requests       " << r.requests_total << " (fpga "
      << r.requests_on_fpga << ", cpu " << r.requests_on_cpu << ")\n";
  out << "efficiency     " << fmt_g6(r.efficiency_pct) << " %\n";
  out << "relative_cost  " << fmt_g6(r.relative_cost) << "\n";
  out << "misses         " << r.deadline_misses << "\n";
  out << "energy_j       busy " << fmt_g6(r.energy.busy_j()) << ", idle "
      << fmt_g6(r.energy.idle_j()) << ", spin " << fmt_g6(r.energy.spin_j())
      << ", total " << fmt_g6(r.energy.total()) << "\n";
  out << "cost_usd       " << fmt_g6(r.cost.total()) << "\n";
  out << "peaks          " << r.peak_fpgas << " fpga, " << r.peak_cpus
      << " cpu\n";
  out << "spin_ups       " << r.fpga_spin_ups << " fpga, " << r.cpu_spin_ups
      << " cpu\n";
  out << "event_hash     " << hash_hex(r.event_log_hash) << "\n";
  if (rr.has_n_star) out << "n_star         " << rr.n_star << "\n";
  if (rr.has_k_star)
    out << "k_star         " << rr.k_star << " (delta_max " << rr.delta_max
        << ")\n";
}

// ---------------------------------------------------------------------------
// gen

struct GenFlags {
  CommonFlags common;
  std::string bucket, burstiness, hours, avg_workers, seed, slot;
  std::string out_path;
};

std::string arrivals_sibling(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return path + "_arrivals";
  return path.substr(0, dot) + "_arrivals" + path.substr(dot);
}

int do_gen(const GenFlags& fl, std::ostream& out) {
  Config cfg = build_config(fl.common);
  if (!fl.bucket.empty()) cfg.set("trace.bucket", fl.bucket);
  if (!fl.burstiness.empty()) cfg.set("trace.burstiness", fl.burstiness);
  if (!fl.hours.empty()) cfg.set("trace.hours", fl.hours);
  if (!fl.avg_workers.empty()) cfg.set("trace.avg_workers", fl.avg_workers);
  if (!fl.seed.empty()) cfg.set("trace.seed", fl.seed);
  if (!fl.slot.empty()) cfg.set("trace.slot_s", fl.slot);
  const TraceSpec spec = cfg.trace_spec();
  if (spec.burstiness < 0.5 || spec.burstiness >= 1.0)
    throw UsageError("trace.burstiness must lie in [0.5, 1)");
  const SynthTrace st = synth_trace(spec);
  write_rate_csv(fl.out_path, st.rate);
  const std::string arr_path = arrivals_sibling(fl.out_path);
  write_arrival_csv(arr_path, st.arrivals);
  out << "wrote " << fl.out_path << " (" << st.rate.rates.size()
      << " slots of " << fmt_g6(st.rate.slot_length_s) << " s)\n";
  out << "wrote " << arr_path << " (" << st.arrivals.count()
      << " arrivals, request size " << fmt_g6(st.size_s) << " s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// run

struct RunFlags {
  CommonFlags common;
  std::string trace_path;
  std::string scheduler;
  std::string out_path;
  std::string event_log;
};

struct LoadedTrace {
  ArrivalTrace arrivals;
  RateTrace rate;
  bool has_rate = false;
};

// Arrival CSVs replay as-is; rate CSVs are realized into Poisson arrivals
// with the configured seed (the rate curve is kept for headroom estimation).
LoadedTrace load_trace_file(const std::string& path, uint64_t seed) {
  LoadedTrace t;
  if (is_arrival_csv(path)) {
    t.arrivals = ingest_arrival_csv(path);
    return t;
  }
  t.rate = ingest_rate_csv(path);
  t.has_rate = true;
  t.arrivals = poisson_arrivals(t.rate, t.rate.horizon(), seed);
  return t;
}

int do_run(const RunFlags& fl, std::ostream& out) {
  Config cfg = build_config(fl.common);
  if (!fl.scheduler.empty()) cfg.set("run.scheduler", fl.scheduler);
  const SchedulerChoice sc = parse_scheduler(cfg.get_string("run.scheduler"));
  const uint64_t seed = static_cast<uint64_t>(cfg.get_int("trace.seed"));
  const LoadedTrace t = load_trace_file(fl.trace_path, seed);
  const RunResult rr = run_scheduler(sc, t.arrivals,
                                     t.has_rate ? &t.rate : nullptr, cfg,
                                     fl.event_log);
  print_summary(out, rr);
  if (!fl.out_path.empty()) {
    append_report_row(fl.out_path, cfg, fl.trace_path,
                      rr.scheduler + "," + std::to_string(seed) + "," +
                          report_cells(rr.report));
    out << "appended 1 row to " << fl.out_path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepFlags {
  CommonFlags common;
  std::vector<std::string> axes;
  std::string schedulers;
  std::string reps;
  std::string out_path;
};

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

struct MetricRow {
  std::string scheduler;
  uint64_t seed = 0;
  double eff = 0, rc = 0;
  uint64_t misses = 0, fspin = 0, cspin = 0;
  double ebusy = 0, eidle = 0, espin = 0, cost = 0;
};

MetricRow to_metric_row(const RunResult& rr, uint64_t seed) {
  const SimReport& r = rr.report;
  MetricRow m;
  m.scheduler = rr.scheduler;
  m.seed = seed;
  m.eff = r.efficiency_pct;
  m.rc = r.relative_cost;
  m.misses = r.deadline_misses;
  m.fspin = r.fpga_spin_ups;
  m.cspin = r.cpu_spin_ups;
  m.ebusy = r.energy.busy_j();
  m.eidle = r.energy.idle_j();
  m.espin = r.energy.spin_j();
  m.cost = r.cost.total();
  return m;
}

std::string metric_cells(const MetricRow& m) {
  std::ostringstream s;
  s << m.scheduler << ',' << m.seed << ',' << fmt_g6(m.eff) << ','
    << fmt_g6(m.rc) << ',' << m.misses << ',' << m.fspin << ',' << m.cspin
    << ',' << fmt_g6(m.ebusy) << ',' << fmt_g6(m.eidle) << ','
    << fmt_g6(m.espin) << ',' << fmt_g6(m.cost);
  return s.str();
}

std::string mean_cells(const std::string& scheduler,
                       const std::vector<const MetricRow*>& rows) {
  double eff = 0, rc = 0, misses = 0, fs = 0, cs = 0;
  double eb = 0, ei = 0, es = 0, cost = 0;
  for (const MetricRow* m : rows) {
    eff += m->eff;
    rc += m->rc;
    misses += static_cast<double>(m->misses);
    fs += static_cast<double>(m->fspin);
    cs += static_cast<double>(m->cspin);
    eb += m->ebusy;
    ei += m->eidle;
    es += m->espin;
    cost += m->cost;
  }
  const double n = static_cast<double>(rows.size());
  std::ostringstream s;
  s << scheduler << ",mean," << fmt_g6(eff / n) << ',' << fmt_g6(rc / n) << ','
    << fmt_g6(misses / n) << ',' << fmt_g6(fs / n) << ',' << fmt_g6(cs / n)
    << ',' << fmt_g6(eb / n) << ',' << fmt_g6(ei / n) << ',' << fmt_g6(es / n)
    << ',' << fmt_g6(cost / n);
  return s.str();
}

int do_sweep(const SweepFlags& fl, std::ostream& out) {
  Config base = build_config(fl.common);
  if (!fl.reps.empty()) base.set("sweep.reps", fl.reps);

  std::vector<SweepAxis> axes;
  for (const auto& a : fl.axes) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      throw UsageError("--sweep expects KEY=V1,V2,..., got '" + a + "'");
    SweepAxis ax;
    ax.key = trim(a.substr(0, eq));
    for (const auto& v : split(a.substr(eq + 1), ',')) {
      const std::string t = trim(v);
      if (t.empty())
        throw UsageError("empty value in --sweep axis '" + ax.key + "'");
      ax.values.push_back(t);
    }
    Config probe = base;  // rejects unknown keys and bad first values early
    probe.set(ax.key, ax.values[0]);
    axes.push_back(std::move(ax));
  }

  std::vector<SchedulerChoice> scheds;
  const std::string sched_csv =
      fl.schedulers.empty() ? base.get_string("run.scheduler") : fl.schedulers;
  for (const auto& s : split(sched_csv, ','))
    scheds.push_back(parse_scheduler(s));

  const int64_t reps = base.get_int("sweep.reps");
  if (reps <= 0) throw UsageError("sweep.reps must be positive");

  size_t n_points = 1;
  for (const auto& ax : axes) n_points *= ax.values.size();
  const auto axis_value = [&](size_t point, size_t axis) -> const std::string& {
    size_t stride = 1;
    for (size_t i = axes.size(); i-- > axis + 1;) stride *= axes[i].values.size();
    return axes[axis].values[(point / stride) % axes[axis].values.size()];
  };

  const size_t n_tasks = n_points * static_cast<size_t>(reps);
  std::vector<std::vector<MetricRow>> results(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);

  const auto run_task = [&](size_t task) {
    const size_t point = task / static_cast<size_t>(reps);
    const int64_t rep = static_cast<int64_t>(task % static_cast<size_t>(reps));
    Config cfg = base;
    for (size_t i = 0; i < axes.size(); ++i)
      cfg.set(axes[i].key, axis_value(point, i));
    const uint64_t seed0 = static_cast<uint64_t>(cfg.get_int("trace.seed"));
    cfg.set("trace.seed", std::to_string(seed0 + static_cast<uint64_t>(rep)));
    const TraceSpec spec = cfg.trace_spec();
    const SynthTrace st = synth_trace(spec);
    std::vector<MetricRow> rows;
    rows.reserve(scheds.size());
    for (const auto& sc : scheds)
      rows.push_back(to_metric_row(
          run_scheduler(sc, st.arrivals, &st.rate, cfg, ""), spec.seed));
    results[task] = std::move(rows);
  };

  // Worker pool over (point, rep) tasks; rows land in task order, so output
  // is deterministic regardless of completion order.
  std::atomic<size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      try {
        run_task(task);
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::thread::hardware_concurrency();
  const size_t n_threads =
      std::min({static_cast<size_t>(hw == 0 ? 1 : hw), n_tasks, size_t{8}});
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ofstream o(fl.out_path, std::ios::binary);
  if (!o) throw IoError("cannot write " + fl.out_path);
  for (const auto& ax : axes) {
    o << "# sweep " << ax.key << "=";
    for (size_t i = 0; i < ax.values.size(); ++i)
      o << (i ? "," : "") << ax.values[i];
    o << "\n";
  }
  o << "# schedulers=" << sched_csv << "\n";
  write_config_comments(o, base);
  for (const auto& ax : axes) o << ax.key << ",";
  o << kReportHeader << "\n";

  size_t data_rows = 0, mean_rows = 0;
  for (size_t p = 0; p < n_points; ++p) {
    std::string prefix;
    for (size_t i = 0; i < axes.size(); ++i) prefix += axis_value(p, i) + ",";
    for (size_t si = 0; si < scheds.size(); ++si) {
      std::vector<const MetricRow*> group;
      group.reserve(static_cast<size_t>(reps));
      for (int64_t r = 0; r < reps; ++r) {
        const MetricRow& m =
            results[p * static_cast<size_t>(reps) + static_cast<size_t>(r)][si];
        o << prefix << metric_cells(m) << "\n";
        group.push_back(&m);
        ++data_rows;
      }
      o << prefix << mean_cells(scheds[si].name, group) << "\n";
      ++mean_rows;
    }
  }
  if (!o) throw IoError("write failed: " + fl.out_path);
  out << "wrote " << data_rows << " rows + " << mean_rows << " mean rows ("
      << n_points << " points x " << scheds.size() << " schedulers x " << reps
      << " reps) to " << fl.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleFlags {
  CommonFlags common;
  std::string trace_path;
  std::string alphas = "0,0.25,0.5,0.75,1";
  std::string interval;
  std::string platform = "hybrid";
  std::string out_path;
  std::string emit_lp_path;
};

int do_oracle(const OracleFlags& fl, std::ostream& out) {
  Config cfg = build_config(fl.common);
  if (!fl.interval.empty()) cfg.set("oracle.interval_s", fl.interval);

  std::vector<double> alphas;
  for (const auto& c : split(fl.alphas, ',')) {
    double a = 0;
    if (!parse_double(c, a))
      throw UsageError("--alphas: non-numeric weight '" + trim(c) + "'");
    if (a < 0 || a > 1)
      throw UsageError("--alphas weights must lie in [0, 1]");
    alphas.push_back(a);
  }

  if (is_arrival_csv(fl.trace_path))
    throw UsageError("the oracle consumes rate traces; '" + fl.trace_path +
                     "' is an arrival trace");
  const RateTrace rt = ingest_rate_csv(fl.trace_path);
  MilpInstance in = instance_from_rates(rt, cfg.oracle_config(),
                                        cfg.cpu_params(), cfg.fpga_params());
  const std::string platform = lower(trim(fl.platform));
  if (platform == "fpga-only")
    in = restrict_homogeneous(in, WorkerClass::FPGA);
  else if (platform == "cpu-only")
    in = restrict_homogeneous(in, WorkerClass::CPU);
  else if (platform != "hybrid")
    throw UsageError("--platform must be hybrid, fpga-only, or cpu-only");

  if (!fl.emit_lp_path.empty()) {
    set_alpha_weights(in, alphas.front());
    const std::string lp = emit_lp(in);
    std::ofstream o(fl.emit_lp_path, std::ios::binary);
    if (!o) throw IoError("cannot write " + fl.emit_lp_path);
    o << lp;
    if (!o) throw IoError("write failed: " + fl.emit_lp_path);
    out << "wrote LP (alpha=" << fmt_g6(alphas.front()) << ", " << in.T
        << " slots, platform " << platform << ") to " << fl.emit_lp_path
        << "\n";
    return 0;
  }

  const std::vector<ParetoPoint> points = pareto_sweep(in, alphas);
  if (!fl.out_path.empty()) {
    std::ofstream o(fl.out_path, std::ios::binary);
    if (!o) throw IoError("cannot write " + fl.out_path);
    o << "# trace=" << fl.trace_path << "\n";
    o << "# platform=" << platform << "\n";
    write_config_comments(o, cfg);
    o << "alpha,energy_j,cost_usd\n";
    for (const auto& p : points)
      o << fmt_g6(p.alpha) << "," << fmt_g6(p.energy_j) << ","
        << fmt_g6(p.cost_usd) << "\n";
    if (!o) throw IoError("write failed: " + fl.out_path);
  }
  out << "alpha,energy_j,cost_usd\n";
  for (const auto& p : points)
    out << fmt_g6(p.alpha) << "," << fmt_g6(p.energy_j) << ","
        << fmt_g6(p.cost_usd) << "\n";
  if (!fl.out_path.empty())
    out << "wrote " << points.size() << " points to " << fl.out_path << "\n";
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"hybrid FPGA/CPU scheduling simulator and experiment harness",
               "hyssim"};
  app.require_subcommand(1);

  GenFlags gf;
  RunFlags rf;
  SweepFlags wf;
  OracleFlags of;

  CLI::App* gen =
      app.add_subcommand("gen", "generate a synthetic rate + arrival trace pair");
  add_common_flags(gen, gf.common);
  gen->add_option("--bucket", gf.bucket, "request size bucket: short, medium, long");
  gen->add_option("--burstiness", gf.burstiness, "self-similar bias in [0.5, 1)");
  gen->add_option("--hours", gf.hours, "trace length in hours");
  gen->add_option("--avg-workers", gf.avg_workers,
                  "average concurrent speedup-1 workers the load keeps busy");
  gen->add_option("--seed", gf.seed, "generator seed");
  gen->add_option("--slot", gf.slot, "rate slot length in seconds");
  gen->add_option("--out", gf.out_path,
                  "rate CSV path; arrivals go to <stem>_arrivals<ext>")
      ->required();

  CLI::App* run = app.add_subcommand("run", "simulate one scheduler on one trace");
  add_common_flags(run, rf.common);
  run->add_option("--trace", rf.trace_path, "rate or arrival CSV")->required();
  run->add_option("--scheduler", rf.scheduler,
                  "cpu-dynamic | fpga-static | fpga-dynamic | mark-ideal | "
                  "spork[E|C|B][-ideal]");
  run->add_option("--out", rf.out_path, "append one result row to this CSV");
  run->add_option("--event-log", rf.event_log,
                  "write the processed-event CSV (time_s,kind,subject) here");

  CLI::App* sweep =
      app.add_subcommand("sweep", "cross-product experiment grid with mean rows");
  add_common_flags(sweep, wf.common);
  sweep->add_option("--sweep", wf.axes,
                    "axis KEY=V1,V2,...; repeatable, axes form a cartesian grid");
  sweep->add_option("--schedulers", wf.schedulers,
                    "comma-separated scheduler names");
  sweep->add_option("--reps", wf.reps,
                    "repetitions per point (trace seeds seed..seed+reps-1)");
  sweep->add_option("--out", wf.out_path, "results CSV")->required();

  CLI::App* oracle =
      app.add_subcommand("oracle", "provisioning oracle pareto sweep on a rate trace");
  add_common_flags(oracle, of.common);
  oracle->add_option("--trace", of.trace_path, "rate CSV")->required();
  oracle->add_option("--alphas", of.alphas,
                     "comma-separated energy weights in [0, 1]");
  oracle->add_option("--interval", of.interval, "slot length in seconds");
  oracle->add_option("--platform", of.platform,
                     "hybrid | fpga-only | cpu-only");
  oracle->add_option("--out", of.out_path, "pareto CSV (alpha,energy_j,cost_usd)");
  oracle->add_option("--emit-lp", of.emit_lp_path,
                     "write an LP file for the first alpha instead of solving");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hyssim");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (gen->parsed()) return do_gen(gf, out);
    if (run->parsed()) return do_run(rf, out);
    if (sweep->parsed()) return do_sweep(wf, out);
    if (oracle->parsed()) return do_oracle(of, out);
    throw UsageError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ProvisioningError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hyssim
