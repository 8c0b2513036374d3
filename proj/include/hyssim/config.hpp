#pragma once

// Layered key=value configuration: a fixed registry of known keys with
// defaults, overlaid by config files and command-line --set pairs (last
// writer wins). Every consumer-facing knob lives here so that effective
// settings can be echoed verbatim into result-file headers.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hyssim/model.hpp"
#include "hyssim/oracle.hpp"
#include "hyssim/simengine.hpp"
#include "hyssim/spork.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim {

// Synthetic workload description, assembled from the trace.* keys.
struct TraceSpec {
  SizeBucket bucket = SizeBucket::Short;
  double burstiness = 0.6;
  double hours = 2.0;
  double avg_workers = 100.0;
  uint64_t seed = 1;
  double slot_s = 60.0;
};

class Config {
 public:
  Config();  // installs the registry defaults

  // `key = value` lines, '#' starts a comment, blank lines ignored.
  // Unknown keys and malformed lines raise UsageError naming file:line.
  void load_file(const std::string& path);

  // Single override (CLI --set). Unknown keys raise UsageError.
  void set(const std::string& key, const std::string& value);

  bool is_explicit(const std::string& key) const;  // set beyond its default?

  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;   // UsageError names the key
  int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;       // 1/0/true/false/yes/no/on/off

  // Every key with its current value, sorted by key.
  std::vector<std::pair<std::string, std::string>> entries() const;

  // Typed assemblies of related keys.
  TraceSpec trace_spec() const;
  WorkerClassParams cpu_params() const;
  WorkerClassParams fpga_params() const;
  SimConfig sim_config() const;      // event log / abort flags left to the caller
  SporkConfig spork_config() const;
  OracleConfig oracle_config() const;

 private:
  struct Entry {
    std::string value;
    bool explicit_set = false;
  };
  std::map<std::string, Entry> values_;

  const Entry& find(const std::string& key) const;
  WorkerClassParams class_params(WorkerClass cls, const std::string& prefix) const;
};

}  // namespace hyssim
