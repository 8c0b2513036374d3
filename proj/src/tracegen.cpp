#include "hyssim/tracegen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hyssim/rng.hpp"
#include "hyssim/text.hpp"

namespace hyssim {

namespace {

constexpr uint64_t kStreamShape = 11;
constexpr uint64_t kStreamArrivals = 22;
constexpr uint64_t kStreamSizes = 33;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void bmodel_split(std::vector<double>& slots, int lo, int hi, double volume,
                  double bias, Rng& rng) {
  if (hi - lo == 1) {
    slots[lo] = volume;
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  const double big = bias * volume;
  const double small = (1.0 - bias) * volume;
  const bool big_left = rng.u01() < 0.5;
  bmodel_split(slots, lo, mid, big_left ? big : small, bias, rng);
  bmodel_split(slots, mid, hi, big_left ? small : big, bias, rng);
}

}  // namespace

double ArrivalTrace::total_base_seconds() const {
  if (sizes.empty()) return static_cast<double>(arrivals.size()) * base_size_s;
  double s = 0;
  for (double v : sizes) s += v;
  return s;
}

SizeBucket parse_bucket(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "short") return SizeBucket::Short;
  if (n == "medium") return SizeBucket::Medium;
  if (n == "long") return SizeBucket::Long;
  throw UsageError("unknown size bucket '" + name +
                   "' (expected short|medium|long)");
}

RateTrace bmodel_rates(double total_volume, int num_slots, double bias,
                       uint64_t seed, double slot_length_s,
                       double base_size_s) {
  if (!is_power_of_two(num_slots))
    throw UsageError("slot count must be a power of two");
  if (!(bias >= 0.5 && bias < 1.0))
    throw UsageError("burstiness bias must be in [0.5, 1)");
  if (!(total_volume >= 0)) throw UsageError("volume must be >= 0");
  if (!(slot_length_s > 0)) throw UsageError("slot length must be > 0");

  std::vector<double> volumes(num_slots, 0.0);
  Rng rng(derive_seed(seed, kStreamShape));
  bmodel_split(volumes, 0, num_slots, total_volume, bias, rng);

  RateTrace rt;
  rt.slot_length_s = slot_length_s;
  rt.base_size_s = base_size_s;
  rt.rates.resize(num_slots);
  for (int i = 0; i < num_slots; ++i) rt.rates[i] = volumes[i] / slot_length_s;
  return rt;
}

RateTrace scale_to_workers(const RateTrace& rt, double avg_workers,
                           double base_size_s) {
  if (!(avg_workers > 0)) throw UsageError("avg_workers must be > 0");
  if (rt.rates.empty()) throw UsageError("rate trace is empty");
  double mean = 0;
  for (double r : rt.rates) mean += r;
  mean /= static_cast<double>(rt.rates.size());
  if (!(mean > 0)) throw UsageError("cannot rescale a zero-rate trace");
  const double factor = avg_workers / (mean * base_size_s);
  RateTrace out = rt;
  out.base_size_s = base_size_s;
  for (double& r : out.rates) r *= factor;
  return out;
}

double rate_at(const RateTrace& rt, double t) {
  const size_t n = rt.rates.size();
  if (n == 0) return 0;
  if (n == 1) return rt.rates[0];
  const double L = rt.slot_length_s;
  const double first_mid = 0.5 * L;
  const double last_mid = (static_cast<double>(n) - 0.5) * L;
  if (t <= first_mid) return rt.rates[0];
  if (t >= last_mid) return rt.rates[n - 1];
  const double pos = (t - first_mid) / L;
  size_t i = static_cast<size_t>(pos);
  if (i >= n - 1) i = n - 2;
  const double frac = pos - static_cast<double>(i);
  return rt.rates[i] + (rt.rates[i + 1] - rt.rates[i]) * frac;
}

double rate_pl_integral(const RateTrace& rt, double t0, double t1) {
  if (!(t1 > t0) || rt.rates.empty()) return 0;
  const size_t n = rt.rates.size();
  const double L = rt.slot_length_s;
  // Node list of the piecewise-linear rate: start, slot midpoints, end.
  std::vector<double> xs;
  xs.reserve(n + 2);
  xs.push_back(0.0);
  for (size_t i = 0; i < n; ++i) xs.push_back((static_cast<double>(i) + 0.5) * L);
  xs.push_back(static_cast<double>(n) * L);
  double total = 0;
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    const double a = std::max(t0, xs[k]);
    const double b = std::min(t1, xs[k + 1]);
    if (b > a) total += 0.5 * (rate_at(rt, a) + rate_at(rt, b)) * (b - a);
  }
  // Constant extrapolation beyond the trace end.
  if (t1 > xs.back()) {
    const double a = std::max(t0, xs.back());
    total += rt.rates[n - 1] * (t1 - a);
  }
  return total;
}

double rate_slot_volume(const RateTrace& rt, double t0, double t1) {
  if (!(t1 > t0)) return 0;
  const double L = rt.slot_length_s;
  double total = 0;
  for (size_t i = 0; i < rt.rates.size(); ++i) {
    const double lo = static_cast<double>(i) * L;
    const double hi = lo + L;
    const double a = std::max(t0, lo);
    const double b = std::min(t1, hi);
    if (b > a) total += rt.rates[i] * (b - a);
  }
  return total;
}

ArrivalTrace poisson_arrivals(const RateTrace& rt, double horizon_s,
                              uint64_t seed) {
  const double trace_span =
      rt.slot_length_s * static_cast<double>(rt.rates.size());
  if (horizon_s > trace_span + 1e-9)
    throw UsageError("horizon exceeds the rate trace span");
  ArrivalTrace at;
  at.base_size_s = rt.base_size_s;
  at.horizon_s = horizon_s;
  Rng rng(derive_seed(seed, kStreamArrivals));

  // Rough capacity reservation from the total expected volume.
  const double expected = rate_pl_integral(rt, 0, horizon_s);
  if (expected > 0 && expected < 5e8)
    at.arrivals.reserve(static_cast<size_t>(expected * 1.05) + 64);

  const double L = rt.slot_length_s;
  for (size_t i = 0; i < rt.rates.size(); ++i) {
    const double lo = static_cast<double>(i) * L;
    if (lo >= horizon_s) break;
    const double hi = std::min(lo + L, horizon_s);
    // The interpolated rate is linear between nodes, so its maximum over the
    // slot is attained at the slot edges or the midpoint anchor.
    const double lam_max =
        std::max({rate_at(rt, lo), rt.rates[i], rate_at(rt, hi)});
    if (!(lam_max > 0)) continue;
    double t = lo;
    while (true) {
      t += rng.exponential(lam_max);
      if (t >= hi) break;
      const double u = rng.u01();
      if (u * lam_max <= rate_at(rt, t)) at.arrivals.push_back(t);
    }
  }
  return at;
}

double sample_request_size(SizeBucket bucket, uint64_t seed) {
  double lo = 0.01, hi = 0.1;
  switch (bucket) {
    case SizeBucket::Short: lo = 0.01; hi = 0.1; break;
    case SizeBucket::Medium: lo = 0.1; hi = 1.0; break;
    case SizeBucket::Long: lo = 1.0; hi = 10.0; break;
  }
  Rng rng(derive_seed(seed, kStreamSizes));
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

namespace {

struct CsvReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;
  explicit CsvReader(const std::string& p) : in(p), path(p) {
    if (!in) throw IoError("cannot open " + p);
  }
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path + ": " + what + " at line " + std::to_string(line_no));
  }
};

// Reads sidecar comments until the header line; returns the header.
std::string read_preamble(CsvReader& r, double& size_ms, double& slot_s,
                          double& horizon_s) {
  std::string line;
  while (r.next(line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eat = [&](const char* key, double& out) {
        const std::string k = std::string("# ") + key + "=";
        const std::string k2 = std::string("#") + key + "=";
        std::string v;
        if (t.rfind(k, 0) == 0) v = t.substr(k.size());
        else if (t.rfind(k2, 0) == 0) v = t.substr(k2.size());
        else return;
        double d;
        if (!parse_double(v, d)) r.fail(std::string("bad ") + key + " comment");
        out = d;
      };
      eat("size_ms", size_ms);
      eat("slot_s", slot_s);
      eat("horizon_s", horizon_s);
      continue;
    }
    return t;
  }
  return "";
}

}  // namespace

bool is_arrival_csv(const std::string& path) {
  CsvReader r(path);
  double a = 0, b = 0, c = 0;
  const std::string header = read_preamble(r, a, b, c);
  return header == "arrival_s,size_s";
}

RateTrace ingest_rate_csv(const std::string& path) {
  CsvReader r(path);
  double size_ms = 10.0, slot_s = 60.0, horizon_s = 0.0;
  const std::string header = read_preamble(r, size_ms, slot_s, horizon_s);
  if (header != "minute,rate")
    throw IoError(path + ": missing 'minute,rate' header");
  RateTrace rt;
  rt.slot_length_s = slot_s;
  rt.base_size_s = size_ms / 1000.0;
  rt.horizon_s = horizon_s;
  std::string line;
  while (r.next(line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != 2) r.fail("expected two cells");
    long long idx;
    double rate;
    if (!parse_i64(cells[0], idx)) r.fail("non-numeric slot index");
    if (!parse_double(cells[1], rate)) r.fail("non-numeric rate");
    if (idx != static_cast<long long>(rt.rates.size()))
      r.fail("non-contiguous slot index");
    if (rate < 0) r.fail("negative rate");
    rt.rates.push_back(rate);
  }
  if (rt.rates.empty()) throw IoError(path + ": empty data section");
  return rt;
}

ArrivalTrace ingest_arrival_csv(const std::string& path) {
  CsvReader r(path);
  double size_ms = 0.0, slot_s = 0.0, horizon_s = 0.0;
  const std::string header = read_preamble(r, size_ms, slot_s, horizon_s);
  if (header != "arrival_s,size_s")
    throw IoError(path + ": missing 'arrival_s,size_s' header");
  std::vector<double> arrivals, sizes;
  std::string line;
  while (r.next(line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != 2) r.fail("expected two cells");
    double a, s;
    if (!parse_double(cells[0], a)) r.fail("non-numeric arrival");
    if (!parse_double(cells[1], s)) r.fail("non-numeric size");
    if (a < 0) r.fail("negative arrival");
    if (!(s > 0)) r.fail("non-positive size");
    arrivals.push_back(a);
    sizes.push_back(s);
  }
  if (arrivals.empty()) throw IoError(path + ": empty data section");
  // Stable sort by arrival (ingested files may be unsorted).
  std::vector<size_t> order(arrivals.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return arrivals[a] < arrivals[b];
  });
  ArrivalTrace at;
  at.arrivals.reserve(arrivals.size());
  at.sizes.reserve(sizes.size());
  for (size_t i : order) {
    at.arrivals.push_back(arrivals[i]);
    at.sizes.push_back(sizes[i]);
  }
  // Collapse constant sizes to the compact representation.
  bool constant = true;
  for (double s : at.sizes)
    if (s != at.sizes[0]) {
      constant = false;
      break;
    }
  if (constant) {
    at.base_size_s = at.sizes[0];
    at.sizes.clear();
  }
  const double last = at.arrivals.back();
  at.horizon_s = horizon_s > last ? horizon_s : last + at.size_of(at.count() - 1);
  return at;
}

void write_rate_csv(const std::string& path, const RateTrace& rt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "# size_ms=" << fmt_g17(rt.base_size_s * 1000.0) << "\n";
  out << "# slot_s=" << fmt_g17(rt.slot_length_s) << "\n";
  out << "# horizon_s=" << fmt_g17(rt.horizon()) << "\n";
  out << "minute,rate\n";
  for (size_t i = 0; i < rt.rates.size(); ++i)
    out << i << "," << fmt_g17(rt.rates[i]) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

void write_arrival_csv(const std::string& path, const ArrivalTrace& at) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "# horizon_s=" << fmt_g17(at.horizon_s) << "\n";
  out << "arrival_s,size_s\n";
  for (size_t i = 0; i < at.count(); ++i)
    out << fmt_g17(at.arrivals[i]) << "," << fmt_g17(at.size_of(i)) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hyssim
