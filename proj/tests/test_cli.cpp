// End-to-end tests of the command-line harness: every subcommand through
// run_cli() with an in-memory stream pair, real files in a scratch directory,
// documented exit codes, and byte-level reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hyssim/cli.hpp"
#include "hyssim/model.hpp"
#include "hyssim/tracegen.hpp"

using namespace hyssim;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hyssim_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

size_t count_substr(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

// A small but non-trivial workload: 36 seconds, about one speedup-1 worker
// of sustained load, bursty enough that the rate curve depends on the seed.
std::vector<std::string> gen_args(const fs::path& rate_csv,
                                  const std::string& seed) {
  return {"gen",       "--bucket", "short", "--burstiness", "0.65",
          "--hours",   "0.01",     "--avg-workers", "1",    "--seed",
          seed,        "--slot",   "6",     "--out", rate_csv.string()};
}

fs::path arrivals_of(const fs::path& rate_csv) {
  fs::path p = rate_csv;
  p.replace_filename(p.stem().string() + "_arrivals" + p.extension().string());
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen writes a rate/arrival pair that round-trips") {
  const fs::path dir = scratch("gen");
  const fs::path rate = dir / "t.csv";
  const CliResult r = cli(gen_args(rate, "5"));
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(count_substr(r.out, "wrote ") == 2);
  REQUIRE(fs::exists(rate));
  REQUIRE(fs::exists(arrivals_of(rate)));
  CHECK_FALSE(is_arrival_csv(rate.string()));
  CHECK(is_arrival_csv(arrivals_of(rate).string()));
  const RateTrace rt = ingest_rate_csv(rate.string());
  CHECK(rt.rates.size() >= 6);
  CHECK(rt.slot_length_s == doctest::Approx(6.0));
  const ArrivalTrace at = ingest_arrival_csv(arrivals_of(rate).string());
  CHECK(at.count() > 0);
  CHECK(at.base_size_s == doctest::Approx(rt.base_size_s));
}

TEST_CASE("gen is reproducible per seed and diverges across seeds") {
  const fs::path dir = scratch("gen_seeds");
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  const fs::path c = dir / "c.csv";
  REQUIRE(cli(gen_args(a, "5")).code == 0);
  REQUIRE(cli(gen_args(b, "5")).code == 0);
  REQUIRE(cli(gen_args(c, "6")).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(arrivals_of(a)) == slurp(arrivals_of(b)));
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("run prints a summary and appends result rows") {
  const fs::path dir = scratch("run");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  const fs::path res = dir / "results.csv";
  const fs::path ev = dir / "events.csv";
  const std::vector<std::string> args = {
      "run",   "--trace", rate.string(),      "--scheduler", "cpu-dynamic",
      "--set", "trace.seed=5", "--out", res.string(), "--event-log",
      ev.string()};
  const CliResult r = cli(args);
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("cpu-dynamic (dispatch efficient-first)") !=
        std::string::npos);
  CHECK(r.out.find("event_hash") != std::string::npos);
  CHECK(r.out.find("appended 1 row to") != std::string::npos);

  const std::string first = slurp(res);
  CHECK(first.find("# trace=") != std::string::npos);
  CHECK(first.find("# trace.seed=5") != std::string::npos);
  CHECK(first.find("scheduler,seed,efficiency_pct,relative_cost,"
                   "deadline_misses") != std::string::npos);
  CHECK(count_substr(first, "cpu-dynamic,5,") == 1);

  const std::string evtext = slurp(ev);
  CHECK(evtext.rfind("time_s,kind,subject", 0) == 0);

  // A second run appends one row and repeats neither preamble nor header.
  REQUIRE(cli(args).code == 0);
  const std::string second = slurp(res);
  CHECK(count_substr(second, "cpu-dynamic,5,") == 2);
  CHECK(count_substr(second, "efficiency_pct") == 1);
  CHECK(second.rfind(first, 0) == 0);  // strictly grew
}

TEST_CASE("identical runs are byte-identical") {
  const fs::path dir = scratch("repro");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "7")).code == 0);
  CliResult runs[2];
  std::string events[2];
  std::string results[2];
  // Reuse the same output paths (removing them between runs) so the echoed
  // file names in the summary match too.
  const fs::path res = dir / "res.csv";
  const fs::path ev = dir / "ev.csv";
  for (int i = 0; i < 2; ++i) {
    fs::remove(res);
    fs::remove(ev);
    runs[i] = cli({"run", "--trace", rate.string(), "--scheduler", "sporkE",
                   "--out", res.string(), "--event-log", ev.string()});
    REQUIRE(runs[i].code == 0);
    events[i] = slurp(ev);
    results[i] = slurp(res);
  }
  CHECK(runs[0].out == runs[1].out);
  CHECK(events[0] == events[1]);
  CHECK(results[0] == results[1]);
}

TEST_CASE("run handles arrival traces and every scheduler spelling") {
  const fs::path dir = scratch("schedulers");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  const fs::path arr = arrivals_of(rate);

  SUBCASE("arrival trace with the bare spork name and a configured mode") {
    const CliResult r = cli({"run", "--trace", arr.string(), "--scheduler",
                             "spork", "--set", "spork.mode=cost"});
    CAPTURE(r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("scheduler      spork ") != std::string::npos);
  }
  SUBCASE("ideal-variant suffix parses") {
    const CliResult r = cli({"run", "--trace", arr.string(), "--scheduler",
                             "sporkB-ideal", "--set", "spork.alpha=0.5"});
    CAPTURE(r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("misses         0") != std::string::npos);
  }
  SUBCASE("provisioning baselines report their searched level") {
    const CliResult st = cli(
        {"run", "--trace", rate.string(), "--scheduler", "fpga-static"});
    CAPTURE(st.err);
    CHECK(st.code == 0);
    CHECK(st.out.find("n_star") != std::string::npos);
    CHECK(st.out.find("misses         0") != std::string::npos);
    const CliResult dy = cli(
        {"run", "--trace", rate.string(), "--scheduler", "fpga-dynamic"});
    CAPTURE(dy.err);
    CHECK(dy.code == 0);
    CHECK(dy.out.find("k_star") != std::string::npos);
    CHECK(dy.out.find("misses         0") != std::string::npos);
  }
}

TEST_CASE("config files compose with --set and flags in that order") {
  const fs::path dir = scratch("config");
  const fs::path cfgf = dir / "exp.cfg";
  {
    std::ofstream o(cfgf);
    o << "# experiment defaults\n";
    o << "trace.seed = 9   # overridden below\n";
    o << "\n";
  }
  auto with = [&](std::vector<std::string> extra, const fs::path& out) {
    std::vector<std::string> args = gen_args(out, "ignored");
    args.erase(args.end() - 6, args.end() - 4);  // drop --seed <v>
    for (auto& e : extra) args.push_back(e);
    return cli(args);
  };
  const fs::path from_file = dir / "file.csv";
  const fs::path file_plus_set = dir / "set.csv";
  const fs::path set_plus_flag = dir / "flag.csv";
  const fs::path direct9 = dir / "direct9.csv";
  const fs::path direct11 = dir / "direct11.csv";
  REQUIRE(with({"--config", cfgf.string()}, from_file).code == 0);
  REQUIRE(with({"--config", cfgf.string(), "--set", "trace.seed=11"},
               file_plus_set)
              .code == 0);
  REQUIRE(with({"--config", cfgf.string(), "--set", "trace.seed=7", "--seed",
                "11"},
               set_plus_flag)
              .code == 0);
  REQUIRE(cli(gen_args(direct9, "9")).code == 0);
  REQUIRE(cli(gen_args(direct11, "11")).code == 0);
  CHECK(slurp(from_file) == slurp(direct9));        // file beats default
  CHECK(slurp(file_plus_set) == slurp(direct11));   // --set beats file
  CHECK(slurp(set_plus_flag) == slurp(direct11));   // flag beats --set
  CHECK(slurp(from_file) != slurp(file_plus_set));
}

TEST_CASE("config mistakes are reported with file and line") {
  const fs::path dir = scratch("config_errors");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);

  SUBCASE("unknown key in a file") {
    const fs::path bad = dir / "bad.cfg";
    {
      std::ofstream o(bad);
      o << "# comment only\n";
      o << "nope.key=3\n";
    }
    const CliResult r = cli({"run", "--trace", rate.string(), "--config",
                             bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("nope.key") != std::string::npos);
    CHECK(r.err.find(":2") != std::string::npos);
  }
  SUBCASE("malformed line") {
    const fs::path bad = dir / "mal.cfg";
    {
      std::ofstream o(bad);
      o << "just-a-word\n";
    }
    const CliResult r = cli({"run", "--trace", rate.string(), "--config",
                             bad.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(":1") != std::string::npos);
  }
  SUBCASE("unknown key and malformed pair via --set") {
    CHECK(cli({"run", "--trace", rate.string(), "--set", "bogus.key=1"})
              .code == 2);
    CHECK(cli({"run", "--trace", rate.string(), "--set", "no-equals"})
              .code == 2);
  }
}

TEST_CASE("usage errors exit with code 2") {
  const fs::path dir = scratch("usage");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"run", "--trace", rate.string(), "--scheduler", "warp9"}).code ==
        2);
  CHECK(cli({"gen", "--burstiness", "0.4", "--out",
             (dir / "x.csv").string()})
            .code == 2);
  CHECK(cli({"sweep", "--sweep", "oops", "--out", (dir / "s.csv").string()})
            .code == 2);
  CHECK(cli({"oracle", "--trace", rate.string(), "--alphas", "2"}).code == 2);
  CHECK(cli({"oracle", "--trace", arrivals_of(rate).string()}).code == 2);
}

TEST_CASE("I/O failures exit with code 4") {
  const fs::path dir = scratch("io");
  const CliResult missing =
      cli({"run", "--trace", (dir / "missing.csv").string()});
  CHECK(missing.code == 4);
  CHECK(missing.err.find("missing.csv") != std::string::npos);
  const CliResult unwritable =
      cli(gen_args(dir / "no_such_subdir" / "t.csv", "5"));
  CHECK(unwritable.code == 4);
}

TEST_CASE("provisioning dead-ends exit with code 3") {
  const fs::path dir = scratch("infeasible");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  const CliResult r = cli({"oracle", "--trace", rate.string(), "--platform",
                           "fpga-only", "--set", "oracle.n_f=0"});
  CHECK(r.code == 3);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("sweep writes the labeled grid with per-point mean rows") {
  const fs::path dir = scratch("sweep");
  const fs::path out = dir / "sweep.csv";
  const std::vector<std::string> args = {
      "sweep", "--sweep", "trace.burstiness=0.5,0.7",
      "--schedulers", "cpu-dynamic,sporkE", "--reps", "2",
      "--set", "trace.hours=0.01", "--set", "trace.avg_workers=1",
      "--set", "trace.slot_s=6", "--set", "trace.seed=3",
      "--out", out.string()};
  const CliResult r = cli(args);
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("wrote 8 rows + 4 mean rows (2 points x 2 schedulers x 2 "
                   "reps)") != std::string::npos);
  const std::string text = slurp(out);
  CHECK(text.find("# sweep trace.burstiness=0.5,0.7") != std::string::npos);
  CHECK(text.find("# schedulers=cpu-dynamic,sporkE") != std::string::npos);
  CHECK(text.find("trace.burstiness,scheduler,seed,efficiency_pct") !=
        std::string::npos);
  CHECK(count_substr(text, ",mean,") == 4);
  // Reps advance the trace seed from its base.
  CHECK(text.find("0.5,cpu-dynamic,3,") != std::string::npos);
  CHECK(text.find("0.5,cpu-dynamic,4,") != std::string::npos);
  CHECK(text.find("0.7,sporkE,4,") != std::string::npos);

  // Re-running truncates rather than appends, and is byte-identical.
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(out) == text);
}

TEST_CASE("oracle prints the pareto front and honors the platform switch") {
  const fs::path dir = scratch("oracle");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  const fs::path out = dir / "pareto.csv";
  const CliResult r =
      cli({"oracle", "--trace", rate.string(), "--alphas", "0,0.5,1",
           "--interval", "9", "--out", out.string()});
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("alpha,energy_j,cost_usd") != std::string::npos);
  CHECK(r.out.find("wrote 3 points to") != std::string::npos);

  const std::string text = slurp(out);
  CHECK(text.find("# platform=hybrid") != std::string::npos);
  std::istringstream lines(text);
  std::string line;
  std::vector<double> energy, cost;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'a') continue;
    double a = 0, e = 0, c = 0;
    char comma = 0;
    std::istringstream row(line);
    row >> a >> comma >> e >> comma >> c;
    energy.push_back(e);
    cost.push_back(c);
  }
  REQUIRE(energy.size() == 3);
  CHECK(energy[1] <= energy[0] + 1e-9);
  CHECK(energy[2] <= energy[1] + 1e-9);
  CHECK(cost[1] >= cost[0] - 1e-9);
  CHECK(cost[2] >= cost[1] - 1e-9);

  CHECK(cli({"oracle", "--trace", rate.string(), "--alphas", "0.5",
             "--interval", "9", "--platform", "cpu-only"})
            .code == 0);
  CHECK(cli({"oracle", "--trace", rate.string(), "--platform", "warp"})
            .code == 2);
}

TEST_CASE("oracle --emit-lp writes the model instead of solving it") {
  const fs::path dir = scratch("emit_lp");
  const fs::path rate = dir / "t.csv";
  REQUIRE(cli(gen_args(rate, "5")).code == 0);
  const fs::path lp = dir / "model.lp";
  const CliResult r =
      cli({"oracle", "--trace", rate.string(), "--alphas", "0.25",
           "--interval", "9", "--emit-lp", lp.string()});
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("wrote LP (alpha=0.25") != std::string::npos);
  const std::string text = slurp(lp);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.rfind("End\n") == text.size() - 4);
}

}  // TEST_SUITE
