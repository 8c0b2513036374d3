#include "hyssim/model.hpp"

namespace hyssim {

WorkerClassParams default_cpu_params() {
  WorkerClassParams p;
  p.class_tag = WorkerClass::CPU;
  p.spin_up_latency_s = 0.005;
  p.spin_down_latency_s = 0.005;
  p.busy_power_w = 150.0;
  p.idle_power_w = 30.0;
  p.price_per_hour = 0.668;
  p.speedup = 1.0;
  return p;
}

WorkerClassParams default_fpga_params() {
  WorkerClassParams p;
  p.class_tag = WorkerClass::FPGA;
  p.spin_up_latency_s = 10.0;
  p.spin_down_latency_s = 0.1;
  p.busy_power_w = 50.0;
  p.idle_power_w = 20.0;
  p.price_per_hour = 0.982;
  p.speedup = 2.0;
  return p;
}

void validate_params(const WorkerClassParams& p) {
  if (p.spin_up_latency_s < 0 || p.spin_down_latency_s < 0)
    throw UsageError("worker latencies must be >= 0");
  if (p.idle_power_w < 0 || p.busy_power_w < p.idle_power_w)
    throw UsageError("worker powers must satisfy busy >= idle >= 0");
  if (p.price_per_hour < 0) throw UsageError("worker price must be >= 0");
  if (!(p.speedup > 0)) throw UsageError("worker speedup must be > 0");
}

std::pair<double, double> ideal_reference(const std::vector<Request>& requests,
                                          const WorkerClassParams& fpga) {
  double fpga_seconds = 0;
  for (const Request& r : requests) fpga_seconds += r.base_size / fpga.speedup;
  return {fpga_seconds * fpga.busy_power_w,
          fpga_seconds * fpga.price_per_hour / 3600.0};
}

std::pair<double, double> ideal_reference_from_sizes(
    const std::vector<double>& sizes, size_t count, double constant_size,
    const WorkerClassParams& fpga) {
  double fpga_seconds = 0;
  if (sizes.empty()) {
    fpga_seconds = static_cast<double>(count) * (constant_size / fpga.speedup);
  } else {
    for (double s : sizes) fpga_seconds += s / fpga.speedup;
  }
  return {fpga_seconds * fpga.busy_power_w,
          fpga_seconds * fpga.price_per_hour / 3600.0};
}

void finalize_report(SimReport& report, std::pair<double, double> ideal,
                     bool drained) {
  if (!drained)
    throw NotDrainedError("report refused: simulation not drained");
  const double actual_energy = report.energy.total();
  const double actual_cost = report.cost.total();
  // Degenerate empty run: define the ratios as their no-overhead values.
  report.efficiency_pct =
      actual_energy > 0 ? 100.0 * ideal.first / actual_energy : 100.0;
  report.relative_cost = ideal.second > 0 ? actual_cost / ideal.second : 1.0;
}

}  // namespace hyssim
