#pragma once

// Command-line harness: trace generation, single runs, cross-product sweeps,
// and the provisioning oracle, all writing fixed-format CSV.

#include <iostream>
#include <string>
#include <vector>

#include "hyssim/config.hpp"
#include "hyssim/tracegen.hpp"

namespace hyssim {

// Deterministic synthetic workload assembled from a TraceSpec: self-similar
// per-slot rates over the smallest power-of-two slot count covering the
// horizon, one log-uniform request size for the whole trace, and Poisson
// arrivals thinned from the interpolated rates. Every draw derives from
// spec.seed, so equal specs give bitwise-equal traces.
struct SynthTrace {
  RateTrace rate;
  ArrivalTrace arrivals;
  double size_s = 0;  // the constant per-request service size
};
SynthTrace synth_trace(const TraceSpec& spec);

// Entry point; args excludes the program name. Exit codes: 0 success,
// 2 usage, 3 provisioning/infeasibility, 4 I/O, 1 internal invariant failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

}  // namespace hyssim
