#include "hyssim/config.hpp"

#include <cstdio>
#include <fstream>

#include "hyssim/text.hpp"

namespace hyssim {

namespace {

const std::map<std::string, std::string>& registry() {
  static const std::map<std::string, std::string> kDefaults = {
      {"trace.bucket", "short"},
      {"trace.burstiness", "0.6"},
      {"trace.hours", "2"},
      {"trace.avg_workers", "100"},
      {"trace.seed", "1"},
      {"trace.slot_s", "60"},

      {"sim.interval_s", "10"},
      {"sim.deadline_mult", "10"},
      {"sim.idle_timeout_cpu_s", "-1"},
      {"sim.idle_timeout_fpga_s", "-1"},

      {"cpu.spin_up_s", "0.005"},
      {"cpu.spin_down_s", "0.005"},
      {"cpu.busy_w", "150"},
      {"cpu.idle_w", "30"},
      {"cpu.cost_hr", "0.668"},
      {"cpu.speedup", "1"},

      {"fpga.spin_up_s", "10"},
      {"fpga.spin_down_s", "0.1"},
      {"fpga.busy_w", "50"},
      {"fpga.idle_w", "20"},
      {"fpga.cost_hr", "0.982"},
      {"fpga.speedup", "2"},

      {"spork.mode", "energy"},
      {"spork.alpha", "0.5"},
      {"spork.ideal", "0"},

      {"baseline.k_max", "20"},
      {"baseline.n_max", "4096"},

      {"dispatch.policy", "efficient-first"},
      {"run.scheduler", "sporkE"},

      {"oracle.interval_s", "10"},
      {"oracle.n_f", "12"},
      {"oracle.n_c", "64"},
      {"oracle.rate_semantics", "eq"},
      {"oracle.d_c_j", "0"},
      {"oracle.d_f_j", "0"},
      {"oracle.s_f", "-1"},

      {"sweep.reps", "10"},
  };
  return kDefaults;
}

}  // namespace

Config::Config() {
  for (const auto& kv : registry()) values_[kv.first] = Entry{kv.second, false};
}

const Config::Entry& Config::find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end())
    throw UsageError("unknown config key '" + key + "'");
  it->second.value = value;
  it->second.explicit_set = true;
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("malformed config line (expected key=value) at " + path +
                       ":" + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw UsageError("empty config key at " + path + ":" +
                       std::to_string(lineno));
    if (values_.find(key) == values_.end())
      throw UsageError("unknown config key '" + key + "' at " + path + ":" +
                       std::to_string(lineno));
    set(key, value);
  }
}

bool Config::is_explicit(const std::string& key) const {
  return find(key).explicit_set;
}

const std::string& Config::get_string(const std::string& key) const {
  return find(key).value;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = find(key).value;
  double out = 0;
  if (!parse_double(v, out))
    throw UsageError("config key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

int64_t Config::get_int(const std::string& key) const {
  const std::string& v = find(key).value;
  long long out = 0;
  if (!parse_i64(v, out))
    throw UsageError("config key '" + key + "' expects an integer, got '" + v +
                     "'");
  return out;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = lower(trim(find(key).value));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + key + "' expects a boolean, got '" +
                   find(key).value + "'");
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.emplace_back(kv.first, kv.second.value);
  return out;  // std::map iteration is already key-sorted
}

TraceSpec Config::trace_spec() const {
  TraceSpec spec;
  spec.bucket = parse_bucket(get_string("trace.bucket"));
  spec.burstiness = get_double("trace.burstiness");
  spec.hours = get_double("trace.hours");
  spec.avg_workers = get_double("trace.avg_workers");
  spec.seed = static_cast<uint64_t>(get_int("trace.seed"));
  spec.slot_s = get_double("trace.slot_s");
  if (spec.hours <= 0) throw UsageError("trace.hours must be positive");
  if (spec.avg_workers <= 0)
    throw UsageError("trace.avg_workers must be positive");
  if (spec.slot_s <= 0) throw UsageError("trace.slot_s must be positive");
  return spec;
}

WorkerClassParams Config::class_params(WorkerClass cls,
                                       const std::string& prefix) const {
  WorkerClassParams p;
  p.class_tag = cls;
  p.spin_up_latency_s = get_double(prefix + ".spin_up_s");
  p.spin_down_latency_s = get_double(prefix + ".spin_down_s");
  p.busy_power_w = get_double(prefix + ".busy_w");
  p.idle_power_w = get_double(prefix + ".idle_w");
  p.price_per_hour = get_double(prefix + ".cost_hr");
  p.speedup = get_double(prefix + ".speedup");
  return p;
}

WorkerClassParams Config::cpu_params() const {
  return class_params(WorkerClass::CPU, "cpu");
}

WorkerClassParams Config::fpga_params() const {
  return class_params(WorkerClass::FPGA, "fpga");
}

SimConfig Config::sim_config() const {
  SimConfig cfg;
  cfg.cpu = cpu_params();
  cfg.fpga = fpga_params();
  cfg.interval_s = get_double("sim.interval_s");
  cfg.idle_timeout_cpu_s = get_double("sim.idle_timeout_cpu_s");
  cfg.idle_timeout_fpga_s = get_double("sim.idle_timeout_fpga_s");
  cfg.deadline_mult = get_double("sim.deadline_mult");
  cfg.seed = static_cast<uint64_t>(get_int("trace.seed"));
  return cfg;
}

SporkConfig Config::spork_config() const {
  SporkConfig cfg;
  cfg.objective.mode = parse_spork_mode(get_string("spork.mode"));
  cfg.objective.alpha = get_double("spork.alpha");
  if (cfg.objective.alpha < 0 || cfg.objective.alpha > 1)
    throw UsageError("spork.alpha must be in [0, 1]");
  cfg.ideal = get_bool("spork.ideal");
  return cfg;
}

OracleConfig Config::oracle_config() const {
  OracleConfig cfg;
  cfg.interval_s = get_double("oracle.interval_s");
  cfg.n_fpga = static_cast<int>(get_int("oracle.n_f"));
  cfg.n_cpu = static_cast<int>(get_int("oracle.n_c"));
  const std::string sem = lower(get_string("oracle.rate_semantics"));
  if (sem == "eq")
    cfg.rate_geq = false;
  else if (sem == "geq")
    cfg.rate_geq = true;
  else
    throw UsageError("oracle.rate_semantics must be 'eq' or 'geq'");
  cfg.d_cpu_j = get_double("oracle.d_c_j");
  cfg.d_fpga_j = get_double("oracle.d_f_j");
  cfg.s_f = static_cast<int>(get_int("oracle.s_f"));
  return cfg;
}

}  // namespace hyssim
