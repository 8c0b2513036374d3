#pragma once

// Workload generation and ingestion: self-similar per-slot rate traces
// (recursive bisection generator), rescaling to a target mean worker count,
// non-homogeneous Poisson arrival sampling, request size buckets, and the
// CSV trace formats.

#include <cstdint>
#include <string>
#include <vector>

#include "hyssim/model.hpp"

namespace hyssim {

struct RateTrace {
  double slot_length_s = 60.0;
  std::vector<double> rates;  // requests per second, one per slot
  double base_size_s = 0.01;  // service seconds of one request on a speedup-1 worker
  double horizon_s = 0;       // 0 -> slots * slot_length
  double horizon() const {
    return horizon_s > 0 ? horizon_s
                         : slot_length_s * static_cast<double>(rates.size());
  }
};

struct ArrivalTrace {
  std::vector<double> arrivals;  // sorted, within [0, horizon)
  std::vector<double> sizes;     // empty -> every request has base_size_s
  double base_size_s = 0.01;
  double horizon_s = 0;
  size_t count() const { return arrivals.size(); }
  double size_of(size_t i) const { return sizes.empty() ? base_size_s : sizes[i]; }
  double total_base_seconds() const;
  Request request(size_t i, double deadline_mult) const {
    const double sz = size_of(i);
    return Request{i, arrivals[i], sz, arrivals[i] + deadline_mult * sz};
  }
};

enum class SizeBucket { Short, Medium, Long };
SizeBucket parse_bucket(const std::string& name);  // throws UsageError

// Self-similar rate trace: the total volume is split recursively into
// (bias, 1-bias) fractions, with the orientation of each split drawn from the
// seeded generator. num_slots must be a power of two; bias in [0.5, 1).
RateTrace bmodel_rates(double total_volume, int num_slots, double bias,
                       uint64_t seed, double slot_length_s = 60.0,
                       double base_size_s = 0.01);

// Rescale rates so that mean(rate) * base_size == avg_workers.
RateTrace scale_to_workers(const RateTrace& rt, double avg_workers,
                           double base_size_s);

// Instantaneous rate of the piecewise-linear interpolation through the
// per-slot rates (values anchored at slot midpoints, constant in the first
// and last half slots), and its integral over [t0, t1).
double rate_at(const RateTrace& rt, double t);
double rate_pl_integral(const RateTrace& rt, double t0, double t1);

// Per-slot constant-rate volume (requests) over [t0, t1); used for demand
// bucketing where the slot volumes themselves are the ground truth.
double rate_slot_volume(const RateTrace& rt, double t0, double t1);

// Non-homogeneous Poisson sampling of the interpolated rate via thinning
// against the per-slot maximum. Deterministic per (trace, horizon, seed).
ArrivalTrace poisson_arrivals(const RateTrace& rt, double horizon_s,
                              uint64_t seed);

// One log-uniform sample from the bucket's bounds: short 10ms-100ms,
// medium 100ms-1s, long 1s-10s. One size per trace (sizes are constant
// within a workload).
double sample_request_size(SizeBucket bucket, uint64_t seed);

// CSV formats. Rate files: comment sidecar (`# size_ms=`, `# slot_s=`,
// `# horizon_s=`) followed by a `minute,rate` table. Arrival files:
// `# horizon_s=` followed by an `arrival_s,size_s` table.
RateTrace ingest_rate_csv(const std::string& path);
ArrivalTrace ingest_arrival_csv(const std::string& path);
void write_rate_csv(const std::string& path, const RateTrace& rt);
void write_arrival_csv(const std::string& path, const ArrivalTrace& at);

// True if the file's first data header is an arrival table.
bool is_arrival_csv(const std::string& path);

}  // namespace hyssim
