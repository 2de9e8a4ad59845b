#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "freectl/error.hpp"
#include "freectl/io.hpp"
#include "freectl/runtime.hpp"

namespace fs = std::filesystem;
using namespace freectl;
using namespace freectl::cli;

namespace {

constexpr int kExitCheck = 1;
constexpr int kExitSchema = 2;
constexpr int kExitNumeric = 3;

struct RunFlags {
  std::size_t threads = 0;
  std::string output_dir;
  bool check = false;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io::SchemaError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw io::SchemaError(path + ": " + e.what());
  }
}

/// Resolution order: --output-dir, FREECTL_OUTPUT_DIR, the file's output_dir,
/// then freectl-out/<kind>.
fs::path output_dir_for(const json& cfg, const std::string& kind, const RunFlags& flags) {
  if (!flags.output_dir.empty()) return flags.output_dir;
  if (const char* env = std::getenv("FREECTL_OUTPUT_DIR"); env && *env) return env;
  if (cfg.contains("output_dir")) return io::field<std::string>(cfg, "output_dir", "experiment");
  return fs::path("freectl-out") / kind;
}

// Returns true when every check passes.
bool run_one(const std::string& path, const RunFlags& flags) {
  const json cfg = load_json(path);
  io::require_keys(cfg, {"kind", "seed", "output_dir", "params"}, "experiment");
  const auto kind = io::field<std::string>(cfg, "kind", "experiment");
  const Experiment* exp = find_experiment(kind);
  if (!exp) throw io::SchemaError("unknown experiment kind '" + kind + "'");
  const auto seed = io::field<std::uint64_t>(cfg, "seed", "experiment");
  const json params = merge_params(exp->defaults, cfg.value("params", json::object()), kind);

  RunContext ctx;
  ctx.seed = seed;
  ctx.threads = flags.threads;
  ctx.output_dir = output_dir_for(cfg, kind, flags);
  fs::create_directories(ctx.output_dir);

  ExperimentResult res;
  try {
    res = exp->run(params, ctx);
  } catch (const DimensionError& e) {
    throw io::SchemaError(e.what());
  } catch (const UnsupportedError& e) {
    throw io::SchemaError(e.what());
  }

  bool pass = true;
  json checks = json::array();
  for (const auto& c : res.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    pass = pass && c.pass;
  }
  // Only the resolved config and seed go in: no timings, paths or thread counts.
  const json resolved = {{"kind", kind}, {"seed", seed}, {"params", params}};
  const json results = {{"kind", kind},       {"seed", seed},     {"config", resolved},
                        {"results", res.results}, {"checks", checks}, {"pass", pass}};
  const std::string text = results.dump(2) + "\n";
  std::ofstream(ctx.output_dir / "results.json") << text;
  const json manifest = {{"artifact_version", std::string("freectl ") + FREECTL_VERSION},
                         {"kind", kind},
                         {"seed", seed},
                         {"config_hash", io::fnv1a_hex(resolved.dump())},
                         {"results_hash", io::fnv1a_hex(text)},
                         {"files", ctx.files}};
  std::ofstream(ctx.output_dir / "manifest.json") << manifest.dump(2) << "\n";

  std::cout << kind << ": " << (pass ? "all checks pass" : "CHECK FAILED") << " -> " << ctx.output_dir.string() << '\n';
  for (const auto& c : res.checks)
    std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name << ": " << c.value << " (tol " << c.tolerance << ")\n";
  return pass;
}

int guarded(const std::function<int()>& f) {
  try {
    return f();
  } catch (const io::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"freectl: free stochastic control experiments at finite matrix size"};
  app.require_subcommand(1);

  RunFlags flags;
  std::vector<std::string> files;
  auto* run = app.add_subcommand("run", "Run experiment files and write results.json, CSVs and a manifest");
  run->add_option("files", files, "experiment JSON files")->required();
  run->add_option("--threads", flags.threads, "worker threads (0 = all logical cores)");
  run->add_option("--output-dir", flags.output_dir, "output directory (overrides FREECTL_OUTPUT_DIR and the file)");
  run->add_flag("--check", flags.check, "exit 1 when any check fails");

  auto* check = app.add_subcommand("check", "Same as run --check");
  check->add_option("files", files, "experiment JSON files")->required();
  check->add_option("--threads", flags.threads, "worker threads (0 = all logical cores)");
  check->add_option("--output-dir", flags.output_dir, "output directory (overrides FREECTL_OUTPUT_DIR and the file)");

  auto* list = app.add_subcommand("list-experiments", "List experiment kinds");
  std::string kind;
  auto* describe = app.add_subcommand("describe", "Print the parameters of an experiment kind with their defaults");
  describe->add_option("kind", kind, "experiment kind")->required();

  app.footer(
      "Experiment file: {\"kind\": ..., \"seed\": <uint>, \"output_dir\": <optional>, \"params\": {...}}.\n"
      "Exit codes: 0 ok, 1 check failure (run --check / check), 2 schema error, 3 numerical failure.");
  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& e : experiments()) std::cout << e.kind << "\t" << e.summary << '\n';
    return 0;
  }
  if (*describe) {
    return guarded([&] {
      const Experiment* e = find_experiment(kind);
      if (!e) throw io::SchemaError("unknown experiment kind '" + kind + "'");
      std::cout << e->summary << "\n"
                << json{{"kind", e->kind}, {"seed", 0}, {"params", e->defaults}}.dump(2) << '\n';
      return 0;
    });
  }
  if (*check) flags.check = true;
  return guarded([&] {
    bool pass = true;
    for (const auto& f : files) pass = run_one(f, flags) && pass;
    return (flags.check && !pass) ? kExitCheck : 0;
  });
}
