#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nnql/config.hpp"
#include "nnql/explore.hpp"
#include "nnql/kernel.hpp"
#include "nnql/mdp.hpp"
#include "nnql/sa.hpp"

namespace nnql {

enum class ExperimentKind { RunNnql, OracleQStar, CoverTime, SaTest, Sweep };

ExperimentKind parse_experiment_kind(std::string_view name);
std::string_view experiment_kind_name(ExperimentKind kind);

/// Benchmark selection: "uniform-mixing" or "drift-1d".
struct MdpParams {
  std::string name = "uniform-mixing";
  double gamma = 0.5;
  std::size_t dim = 1;
  std::string reward = "linear";  // uniform-mixing: "linear" | "constant"
  double reward_value = 1.0;      // used by "constant"
  std::size_t n_actions = 2;
  DriftParams drift;
};

std::shared_ptr<const MdpSpec> make_benchmark(const MdpParams& params);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::RunNnql;
  MdpParams mdp;
  KernelKind kernel = KernelKind::OneNN;
  std::optional<double> h;
  std::optional<double> eps;  // routes through h_star when h is absent
  std::optional<std::uint64_t> t_max;
  bool planner_t = false;  // T from the sample-complexity formula
  double planner_delta = 0.1;
  std::optional<double> planner_l_cover;
  double planner_c0 = 1.0;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = "out";
  std::size_t probes = 1000;
  double policy_eps = 1.0;
  std::optional<std::filesystem::path> policy_checkpoint;
  std::optional<double> stop_error;
  std::uint64_t check_every = 10;

  std::string net_kind = "grid";  // cover-time: "grid" | "partition"
  std::size_t net_cells = 10;
  std::uint64_t step_cap = 10'000'000;
  std::optional<ErgodicityDecl> ergodicity;

  AffineHarnessConfig sa;

  double oracle_tol = 1e-8;
  std::size_t oracle_nodes = 10'000;
  double fine_h = 1e-3;
  double grid_tol = 1e-6;

  std::vector<double> sweep_h;

  std::string config_hash;

  /// Validates and converts; throws ConfigError naming the offending key.
  static ExperimentConfig from_config(const Config& config);
};

struct ResultRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;
  double wall_seconds = 0.0;
  std::vector<std::string> artifacts;

  double metric(std::string_view name) const;
};

/// Runs the experiment and writes `results.csv` (one row per record, header
/// first, 17 significant digits) and `summary.json` into config.out_dir.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

/// One CSV table aggregating every summary.json below `dir`.
std::string report(const std::filesystem::path& dir);

/// printf("%.17g"): the shortest format guaranteed to round-trip a double.
std::string format_double(double v);

}  // namespace nnql
