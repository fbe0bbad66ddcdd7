// Command-line harness for nearest-neighbor Q-learning experiments.
//
//   nnql run-nnql --config cfg.txt --out results/ --seeds 20
//   nnql report results/

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nnql/config.hpp"
#include "nnql/experiment.hpp"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

struct RunFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> seeds;
  std::string out;
};

int run(const std::string& kind, const RunFlags& flags) {
  nnql::Config cfg = flags.config_path.empty() ? nnql::Config{} : nnql::Config::load(flags.config_path);
  if (cfg.has("kind") && cfg.get_string("kind") != kind)
    throw nnql::ConfigError("kind", "config is for '" + cfg.get_string("kind") +
                                        "' but the subcommand is '" + kind + "'");
  cfg.set("kind", kind);
  if (flags.seeds || flags.seed) {
    cfg.erase("seeds");
    cfg.set("seeds.count", std::to_string(flags.seeds.value_or(1)));
    if (flags.seed) cfg.set("seeds.base", std::to_string(*flags.seed));
  }
  if (!flags.out.empty()) cfg.set("out", flags.out);

  const auto experiment = nnql::ExperimentConfig::from_config(cfg);
  const auto records = nnql::run_experiment(experiment);
  std::cout << kind << ": " << records.size() << " records, config " << experiment.config_hash
            << " -> " << experiment.out_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nearest-neighbor Q-learning experiment harness"};
  app.require_subcommand(1);

  RunFlags flags;
  std::string chosen;
  for (const char* kind : {"run-nnql", "oracle-qstar", "cover-time", "sa-test", "sweep"}) {
    auto* sub = app.add_subcommand(kind);
    sub->add_option("--config", flags.config_path, "Experiment config (key = value lines)");
    sub->add_option("--seed", flags.seed, "First seed");
    sub->add_option("--seeds", flags.seeds, "Number of consecutive seeds");
    sub->add_option("--out", flags.out, "Output directory");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Aggregate every summary.json under a directory");
  rep->add_option("dir", report_dir)->required();
  rep->callback([&chosen] { chosen = "report"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (chosen == "report") {
      std::cout << nnql::report(report_dir);
      return 0;
    }
    return run(chosen, flags);
  } catch (const nnql::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
