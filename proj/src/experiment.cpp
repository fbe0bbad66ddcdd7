#include "nnql/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nnql/checkpoint.hpp"
#include "nnql/hnet.hpp"
#include "nnql/learner.hpp"
#include "nnql/oracle.hpp"
#include "nnql/probes.hpp"

namespace nnql {

using nlohmann::json;

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "run-nnql") return ExperimentKind::RunNnql;
  if (name == "oracle-qstar") return ExperimentKind::OracleQStar;
  if (name == "cover-time") return ExperimentKind::CoverTime;
  if (name == "sa-test") return ExperimentKind::SaTest;
  if (name == "sweep") return ExperimentKind::Sweep;
  throw ConfigError("kind", "unknown experiment kind '" + std::string(name) + "'");
}

std::string_view experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::RunNnql: return "run-nnql";
    case ExperimentKind::OracleQStar: return "oracle-qstar";
    case ExperimentKind::CoverTime: return "cover-time";
    case ExperimentKind::SaTest: return "sa-test";
    case ExperimentKind::Sweep: return "sweep";
  }
  return "unknown";
}

std::shared_ptr<const MdpSpec> make_benchmark(const MdpParams& p) {
  if (p.name == "uniform-mixing") {
    RewardFunction reward;
    if (p.reward == "linear") {
      reward = RewardFunction::first_coordinate();
    } else if (p.reward == "constant") {
      reward = RewardFunction::constant(p.reward_value);
    } else {
      throw ConfigError("mdp.reward", "expected 'linear' or 'constant', got '" + p.reward + "'");
    }
    return std::make_shared<const MdpSpec>(make_uniform_mixing(p.gamma, reward, p.dim, p.n_actions));
  }
  if (p.name == "drift-1d") {
    if (p.dim != 1) throw ConfigError("mdp.dim", "drift-1d is one-dimensional");
    return std::make_shared<const MdpSpec>(make_drift_1d(p.gamma, p.drift));
  }
  throw ConfigError("mdp.name", "unknown benchmark '" + p.name + "'");
}

double ResultRecord::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics)
    if (k == name) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig ExperimentConfig::from_config(const Config& c) {
  ExperimentConfig e;
  e.kind = parse_experiment_kind(c.get_string("kind"));

  e.mdp.name = c.get_string("mdp.name", "uniform-mixing");
  e.mdp.gamma = c.get_double("mdp.gamma", 0.5);
  if (!(e.mdp.gamma > 0.0 && e.mdp.gamma < 1.0))
    throw ConfigError("mdp.gamma", "must lie strictly inside (0,1)");
  e.mdp.dim = c.get_u64("mdp.dim", 1);
  if (e.mdp.dim == 0) throw ConfigError("mdp.dim", "must be positive");
  e.mdp.reward = c.get_string("mdp.reward", "linear");
  e.mdp.reward_value = c.get_double("mdp.reward_value", 1.0);
  e.mdp.n_actions = c.get_u64("mdp.actions", 2);
  if (e.mdp.n_actions == 0) throw ConfigError("mdp.actions", "must be positive");
  e.mdp.drift.step = c.get_double("mdp.drift.step", e.mdp.drift.step);
  e.mdp.drift.sigma = c.get_double("mdp.drift.sigma", e.mdp.drift.sigma);

  try {
    e.kernel = parse_kernel(c.get_string("kernel", "one-nn"));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("kernel", ex.what());
  }
  if (c.has("h")) e.h = c.get_double("h");
  if (c.has("eps")) e.eps = c.get_double("eps");
  if (e.h && !(*e.h > 0.0)) throw ConfigError("h", "must be positive");

  if (c.has("t_max")) {
    if (c.get_string("t_max") == "planner") {
      e.planner_t = true;
    } else {
      e.t_max = c.get_u64("t_max");
      if (*e.t_max < 1) throw ConfigError("t_max", "must be at least 1");
    }
  }
  e.planner_delta = c.get_double("planner.delta", 0.1);
  if (c.has("planner.l_cover")) e.planner_l_cover = c.get_double("planner.l_cover");
  e.planner_c0 = c.get_double("planner.c0", 1.0);

  if (c.has("seeds")) {
    e.seeds = c.get_u64s("seeds");
  } else {
    const std::uint64_t count = c.get_u64("seeds.count", 1);
    const std::uint64_t base = c.get_u64("seeds.base", 1);
    if (count == 0) throw ConfigError("seeds.count", "must be positive");
    for (std::uint64_t i = 0; i < count; ++i) e.seeds.push_back(base + i);
  }
  e.out_dir = c.get_string("out", "out");
  e.probes = c.get_u64("probes", 1000);
  if (e.probes == 0) throw ConfigError("probes", "must be positive");
  e.policy_eps = c.get_double("policy.eps", 1.0);
  if (!(e.policy_eps > 0.0 && e.policy_eps <= 1.0))
    throw ConfigError("policy.eps", "must lie in (0,1]");
  if (c.has("policy.checkpoint")) e.policy_checkpoint = c.get_string("policy.checkpoint");
  if (e.policy_eps < 1.0 && !e.policy_checkpoint)
    throw ConfigError("policy.checkpoint", "epsilon-greedy exploration needs a value table");
  if (c.has("stop_error")) e.stop_error = c.get_double("stop_error");
  e.check_every = c.get_u64("check_every", 10);
  if (e.check_every == 0) throw ConfigError("check_every", "must be positive");

  e.net_kind = c.get_string("net.kind", "grid");
  if (e.net_kind != "grid" && e.net_kind != "partition")
    throw ConfigError("net.kind", "expected 'grid' or 'partition'");
  e.net_cells = c.get_u64("net.cells", 10);
  e.step_cap = c.get_u64("step_cap", e.step_cap);
  if (c.has("cover.nu_min")) {
    e.ergodicity = ErgodicityDecl{c.get_u64("cover.m", 1), c.get_double("cover.phi", 1.0),
                                  c.get_double("cover.nu_min")};
  }

  e.sa.gamma = c.get_double("sa.gamma", 0.5);
  e.sa.b = c.has("sa.b") ? c.get_doubles("sa.b") : std::vector<double>{1.0};
  e.sa.noise.m_noise = c.get_double("sa.m", 4.0);
  e.sa.noise.delta1 = c.get_double("sa.delta1", 0.0);
  e.sa.noise.delta2 = c.get_double("sa.delta2", 0.0);
  const std::string bias = c.get_string("sa.bias", "constant");
  if (bias == "constant") {
    e.sa.noise.bias = BiasMode::Constant;
  } else if (bias == "proportional") {
    e.sa.noise.bias = BiasMode::Proportional;
  } else {
    throw ConfigError("sa.bias", "expected 'constant' or 'proportional'");
  }
  if (c.has("sa.m_declared")) e.sa.m_declared = c.get_double("sa.m_declared");
  e.sa.v_bound = c.get_double("sa.v_bound", 2.0);
  e.sa.eps = c.get_double("sa.eps", 1.0);
  e.sa.delta = c.get_double("sa.delta", 0.1);
  e.sa.seeds = e.seeds;

  e.oracle_tol = c.get_double("oracle.tol", e.oracle_tol);
  e.oracle_nodes = c.get_u64("oracle.nodes", e.oracle_nodes);
  e.fine_h = c.get_double("oracle.fine_h", e.fine_h);
  e.grid_tol = c.get_double("oracle.grid_tol", e.grid_tol);

  if (e.kind == ExperimentKind::Sweep) {
    e.sweep_h = c.get_doubles("sweep.h");
    for (double h : e.sweep_h)
      if (!(h > 0.0)) throw ConfigError("sweep.h", "every h must be positive");
  }

  const bool needs_h = e.kind == ExperimentKind::RunNnql || e.kind == ExperimentKind::OracleQStar ||
                       (e.kind == ExperimentKind::CoverTime && e.net_kind == "grid");
  if (e.kind == ExperimentKind::RunNnql && e.h.has_value() == e.eps.has_value())
    throw ConfigError("h", "run-nnql needs exactly one of 'h' or 'eps'");
  if (needs_h && !e.h && !e.eps) throw ConfigError("h", "required (or give 'eps')");
  const bool needs_steps = e.kind == ExperimentKind::RunNnql || e.kind == ExperimentKind::Sweep;
  if (needs_steps && !e.t_max && !e.planner_t) throw ConfigError("t_max", "required key is missing");
  if (e.planner_t && !e.planner_l_cover)
    throw ConfigError("planner.l_cover", "planner-driven T needs a covering-time estimate");

  e.config_hash = c.hash_hex({"out"});
  return e;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Stat {
  double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
};

Stat summarize(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  return s;
}

json to_json_number(double v) {
  if (std::isnan(v) || std::isinf(v)) return nullptr;
  return v;
}

// Reference Q* for benchmark MDPs: analytic when available, grid otherwise.
QFunction reference_qstar(const MdpSpec& mdp, const ExperimentConfig& e, json& derived) {
  if (mdp.kind() == MdpKind::UniformMixing) {
    auto exact = std::make_shared<UniformMixingQStar>(mdp);
    derived["reference"] = "analytic";
    return [exact](std::span<const double> x, std::size_t a) { return (*exact)(x, a); };
  }
  auto grid = std::make_shared<GridQStar>(grid_qstar(mdp, e.fine_h, e.grid_tol));
  derived["reference"] = "grid";
  derived["reference_fine_h"] = e.fine_h;
  derived["reference_residual"] = grid->residual();
  return [grid](std::span<const double> x, std::size_t a) { return (*grid)(x, a); };
}

ExplorationPolicy make_policy(const ExperimentConfig& e, const MdpSpec& mdp) {
  if (!e.policy_checkpoint) return ExplorationPolicy::purely_random(mdp.n_actions());
  Checkpoint cp = read_checkpoint(*e.policy_checkpoint);
  if (cp.table.n_actions() != mdp.n_actions())
    throw ConfigError("policy.checkpoint", "table action count differs from the MDP");
  auto table = std::make_shared<const QTable>(std::move(cp.table));
  const KernelSpec kernel{cp.kernel, table->net().h()};
  return epsilon_greedy_policy(e.policy_eps, std::move(table), kernel);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
  }
  void header(const std::vector<std::string>& cols) { row_strings(cols); }
  void row(const std::string& hash, std::uint64_t seed, const std::vector<double>& values) {
    out_ << hash << ',' << seed;
    for (double v : values) out_ << ',' << format_double(v);
    out_ << '\n';
  }

 private:
  void row_strings(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

ResultRecord run_one_nnql(const MdpSpec& mdp, const ExplorationPolicy& policy, double h,
                          std::uint64_t t_max, std::uint64_t seed, const ExperimentConfig& e,
                          const QFunction& reference, const std::vector<Point>& probes,
                          const std::filesystem::path& checkpoint_path) {
  const auto start = Clock::now();
  const DerivedConstants constants = derived_constants(mdp);
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), h));
  const KernelSpec kernel{e.kernel, h};
  LearnerConfig lc{h, kernel, mdp.gamma(), t_max, constants.v_max};

  double steps_to_threshold = -1.0;
  IterationHook hook;
  if (e.stop_error) {
    hook = [&](const LearnerState& s) {
      if (s.k % e.check_every != 0) return true;
      const QFunction est = [&s](std::span<const double> x, std::size_t a) { return q_estimate(s, x, a); };
      if (sup_error(est, reference, probes, mdp.n_actions()) <= *e.stop_error) {
        steps_to_threshold = static_cast<double>(s.t);
        return false;
      }
      return true;
    };
  }
  NnqlRun run = run_nnql(mdp, policy, net, lc, seed, hook);
  const QFunction est = [&](std::span<const double> x, std::size_t a) {
    return nn_extend(run.q, x, a, kernel);
  };
  const double err = sup_error(est, reference, probes, mdp.n_actions());
  write_checkpoint(checkpoint_path, Checkpoint{run.q, e.kernel, run.stats.steps, run.stats.final_k});

  ResultRecord r;
  r.config_hash = e.config_hash;
  r.seed = seed;
  r.metrics = {{"h", h},
               {"n_centers", static_cast<double>(net->size())},
               {"sup_error", err},
               {"iterations", static_cast<double>(run.stats.final_k)},
               {"steps", static_cast<double>(run.stats.steps)},
               {"max_sup_norm", run.stats.max_sup_norm},
               {"stability_violations", static_cast<double>(run.stats.stability_violations)},
               {"steps_to_threshold", steps_to_threshold}};
  r.artifacts.push_back(checkpoint_path.filename().string());
  r.wall_seconds = seconds_since(start);
  return r;
}

std::uint64_t planned_steps(const ExperimentConfig& e, const MdpSpec& mdp, double h, json& derived) {
  if (!e.planner_t) return *e.t_max;
  const DerivedConstants constants = derived_constants(mdp);
  const double eps = e.eps.value_or(4.0 * constants.beta * constants.lip_c * h);
  PlannerInputs in{eps, e.planner_delta, *e.planner_l_cover,
                   covering_number_estimate(mdp.bounds(), h), mdp.n_actions(), constants,
                   e.planner_c0};
  const std::uint64_t T = sample_complexity_T(in);
  derived["planned_t"] = T;
  return T;
}

std::vector<ResultRecord> run_nnql_kind(const ExperimentConfig& e, const MdpSpec& mdp,
                                        json& derived, CsvWriter& csv) {
  const DerivedConstants constants = derived_constants(mdp);
  double h = 0.0;
  if (e.h) {
    h = *e.h;
  } else {
    const HStar hs = h_star(*e.eps, constants);
    h = hs.h;
    derived["h_star"] = hs.h;
    derived["h_star_degenerate"] = hs.degenerate;
    derived["eps"] = *e.eps;
  }
  derived["h"] = h;
  derived["discretization_bound"] = discretization_bound(h, constants);
  const std::uint64_t t_max = planned_steps(e, mdp, h, derived);
  const QFunction reference = reference_qstar(mdp, e, derived);
  const auto probes = halton_probes(mdp.bounds(), e.probes);
  const ExplorationPolicy policy = make_policy(e, mdp);

  csv.header({"config_hash", "seed", "h", "n_centers", "sup_error", "iterations", "steps",
              "max_sup_norm", "stability_violations", "steps_to_threshold"});
  std::vector<ResultRecord> out;
  for (std::uint64_t seed : e.seeds) {
    auto path = e.out_dir / ("qtable_seed" + std::to_string(seed) + ".ckpt");
    out.push_back(run_one_nnql(mdp, policy, h, t_max, seed, e, reference, probes, path));
    std::vector<double> values;
    for (const auto& [k, v] : out.back().metrics) values.push_back(v);
    csv.row(e.config_hash, seed, values);
  }
  return out;
}

std::vector<ResultRecord> run_sweep_kind(const ExperimentConfig& e, const MdpSpec& mdp,
                                         json& derived, CsvWriter& csv) {
  const DerivedConstants constants = derived_constants(mdp);
  const QFunction reference = reference_qstar(mdp, e, derived);
  const auto probes = halton_probes(mdp.bounds(), e.probes);
  const ExplorationPolicy policy = make_policy(e, mdp);
  csv.header({"config_hash", "seed", "h", "n_centers", "sup_error", "iterations", "steps",
              "max_sup_norm", "stability_violations", "steps_to_threshold"});
  std::vector<ResultRecord> out;
  json groups = json::array();
  for (double h : e.sweep_h) {
    json level;
    const std::uint64_t t_max = planned_steps(e, mdp, h, level);
    std::vector<double> errors;
    for (std::uint64_t seed : e.seeds) {
      auto path = e.out_dir / ("qtable_h" + format_double(h) + "_seed" + std::to_string(seed) + ".ckpt");
      out.push_back(run_one_nnql(mdp, policy, h, t_max, seed, e, reference, probes, path));
      std::vector<double> values;
      for (const auto& [k, v] : out.back().metrics) values.push_back(v);
      csv.row(e.config_hash, seed, values);
      errors.push_back(out.back().metric("sup_error"));
    }
    level["h"] = h;
    level["discretization_bound"] = discretization_bound(h, constants);
    level["mean_sup_error"] = summarize(errors).mean;
    groups.push_back(level);
  }
  derived["levels"] = groups;
  return out;
}

std::shared_ptr<const HNet> experiment_net(const ExperimentConfig& e, const MdpSpec& mdp, json& derived) {
  if (e.net_kind == "partition") {
    auto net = std::make_shared<const HNet>(build_partition_hnet(mdp.bounds(), e.net_cells));
    derived["h"] = net->h();
    return net;
  }
  const double h = e.h ? *e.h : h_star(*e.eps, derived_constants(mdp)).h;
  derived["h"] = h;
  return std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), h));
}

// Smallest uniform mass of a ball intersected with the box, from Halton probes.
double min_ball_mass(const HNet& net) {
  const auto probes = halton_probes(net.bounds(), 100'000);
  std::vector<std::size_t> hits(net.size(), 0);
  std::vector<std::size_t> balls;
  for (const auto& x : probes) {
    balls_containing(net, x, balls);
    for (std::size_t i : balls) ++hits[i];
  }
  return static_cast<double>(*std::min_element(hits.begin(), hits.end())) /
         static_cast<double>(probes.size());
}

std::vector<ResultRecord> run_cover_kind(const ExperimentConfig& e, const MdpSpec& mdp,
                                         json& derived, CsvWriter& csv) {
  auto net = experiment_net(e, mdp, derived);
  const ExplorationPolicy policy = make_policy(e, mdp);
  derived["n_centers"] = net->size();
  derived["pairs"] = net->size() * mdp.n_actions();

  std::optional<ErgodicityDecl> decl = e.ergodicity;
  if (!decl && mdp.kind() == MdpKind::UniformMixing) {
    // Next state is exactly uniform: one-step minorization with phi = 1.
    const double nu = e.net_kind == "partition"
                          ? 1.0 / static_cast<double>(net->size())
                          : min_ball_mass(*net);
    decl = ErgodicityDecl{1, 1.0, nu};
  }
  if (decl) {
    derived["nu_min"] = decl->nu_min;
    derived["cover_bound"] = cover_bound(*decl, net->size(), mdp.n_actions(), e.policy_eps);
  }
  if (e.net_kind == "partition" && mdp.kind() == MdpKind::UniformMixing && mdp.dim() == 1)
    derived["coupon_collector_mean"] = coupon_collector_mean(net->size() * mdp.n_actions());

  csv.header({"config_hash", "seed", "tau"});
  std::vector<ResultRecord> out;
  CoverOptions opts;
  opts.step_cap = e.step_cap;
  for (std::uint64_t seed : e.seeds) {
    const auto start = Clock::now();
    const CoverRun run = measure_cover_time(mdp, policy, *net, seed, opts);
    ResultRecord r;
    r.config_hash = e.config_hash;
    r.seed = seed;
    r.metrics = {{"tau", static_cast<double>(run.tau)}};
    r.wall_seconds = seconds_since(start);
    csv.row(e.config_hash, seed, {static_cast<double>(run.tau)});
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> run_sa_kind(const ExperimentConfig& e, json& derived, CsvWriter& csv) {
  const auto start = Clock::now();
  const auto results = run_affine_harness(e.sa);
  const double elapsed = seconds_since(start);
  csv.header({"config_hash", "seed", "final_error", "bound", "iterations"});
  std::vector<ResultRecord> out;
  std::size_t ok = 0;
  for (const auto& res : results) {
    ResultRecord r;
    r.config_hash = e.config_hash;
    r.seed = res.seed;
    r.metrics = {{"final_error", res.final_error},
                 {"bound", res.bound},
                 {"iterations", static_cast<double>(res.iterations)}};
    r.wall_seconds = elapsed / static_cast<double>(results.size());
    csv.row(e.config_hash, res.seed, {res.final_error, res.bound, static_cast<double>(res.iterations)});
    if (res.final_error <= res.bound) ++ok;
    out.push_back(std::move(r));
  }
  derived["success_fraction"] = static_cast<double>(ok) / static_cast<double>(results.size());
  if (!results.empty()) derived["iterations"] = results.front().iterations;
  return out;
}

std::vector<ResultRecord> run_oracle_kind(const ExperimentConfig& e, const MdpSpec& mdp,
                                          std::shared_ptr<const MdpSpec> mdp_ptr, json& derived,
                                          CsvWriter& csv) {
  const auto start = Clock::now();
  const DerivedConstants constants = derived_constants(mdp);
  const double h = e.h ? *e.h : h_star(*e.eps, constants).h;
  auto net = std::make_shared<const HNet>(build_grid_hnet(mdp.bounds(), h));
  const KernelSpec kernel{e.kernel, h};
  GApplier applier(std::move(mdp_ptr), net, kernel, Quadrature{e.oracle_nodes});
  FixedPointResult fp = fixed_point_qh(applier, e.oracle_tol);
  const QFunction reference = reference_qstar(mdp, e, derived);
  const auto probes = halton_probes(mdp.bounds(), e.probes);

  const auto ckpt = e.out_dir / "qstar_h.ckpt";
  write_checkpoint(ckpt, Checkpoint{fp.q, e.kernel, 0, fp.sweep_changes.size()});

  std::vector<std::string> cols{"config_hash", "seed", "probe"};
  for (std::size_t k = 0; k < mdp.dim(); ++k) cols.push_back("x" + std::to_string(k));
  cols.insert(cols.end(), {"action", "qh_extended", "reference", "abs_error"});
  csv.header(cols);
  std::vector<ResultRecord> out;
  double worst = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const double est = nn_extend(fp.q, probes[p], a, kernel);
      const double ref = reference(probes[p], a);
      const double err = std::abs(est - ref);
      worst = std::max(worst, err);
      std::vector<double> values{static_cast<double>(p)};
      values.insert(values.end(), probes[p].begin(), probes[p].end());
      values.insert(values.end(), {static_cast<double>(a), est, ref, err});
      csv.row(e.config_hash, 0, values);
      ResultRecord r;
      r.config_hash = e.config_hash;
      r.metrics = {{"probe", static_cast<double>(p)}, {"action", static_cast<double>(a)},
                   {"qh_extended", est}, {"reference", ref}, {"abs_error", err}};
      out.push_back(std::move(r));
    }
  }
  derived["h"] = h;
  derived["n_centers"] = net->size();
  derived["sweeps"] = fp.sweep_changes.size();
  derived["sup_error"] = worst;
  derived["discretization_bound"] = discretization_bound(h, constants);
  derived["qh_sup_norm"] = fp.q.sup_norm();
  if (!out.empty()) {
    const double per = seconds_since(start) / static_cast<double>(out.size());
    for (auto& r : out) r.wall_seconds = per;
    out.front().artifacts.push_back(ckpt.filename().string());
  }
  return out;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& e) {
  std::filesystem::create_directories(e.out_dir);
  const auto start = Clock::now();
  std::shared_ptr<const MdpSpec> mdp;
  if (e.kind != ExperimentKind::SaTest) mdp = make_benchmark(e.mdp);

  json derived = json::object();
  if (mdp) {
    const DerivedConstants c = derived_constants(*mdp);
    derived["beta"] = c.beta;
    derived["v_max"] = c.v_max;
    derived["lip_c"] = c.lip_c;
  }
  std::vector<ResultRecord> records;
  {
    CsvWriter csv(e.out_dir / "results.csv");
    switch (e.kind) {
      case ExperimentKind::RunNnql: records = run_nnql_kind(e, *mdp, derived, csv); break;
      case ExperimentKind::Sweep: records = run_sweep_kind(e, *mdp, derived, csv); break;
      case ExperimentKind::CoverTime: records = run_cover_kind(e, *mdp, derived, csv); break;
      case ExperimentKind::SaTest: records = run_sa_kind(e, derived, csv); break;
      case ExperimentKind::OracleQStar: records = run_oracle_kind(e, *mdp, mdp, derived, csv); break;
    }
  }

  std::map<std::string, std::vector<double>> columns;
  std::vector<std::string> order;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.metrics) {
      if (!columns.contains(k)) order.push_back(k);
      columns[k].push_back(v);
    }
  }
  json aggregates = json::object();
  for (const auto& k : order) {
    const Stat s = summarize(columns[k]);
    aggregates[k] = {{"mean", to_json_number(s.mean)}, {"std", to_json_number(s.stddev)},
                     {"min", to_json_number(s.min)}, {"max", to_json_number(s.max)}};
  }
  json artifacts = json::array();
  for (const auto& r : records)
    for (const auto& a : r.artifacts) artifacts.push_back(a);

  json summary;
  summary["kind"] = std::string(experiment_kind_name(e.kind));
  summary["config_hash"] = e.config_hash;
  summary["created_utc"] = timestamp_utc();
  summary["wall_seconds"] = seconds_since(start);
  summary["records"] = records.size();
  summary["seeds"] = e.seeds;
  if (mdp) summary["mdp"] = mdp->name();
  summary["derived"] = derived;
  summary["aggregates"] = aggregates;
  summary["artifacts"] = artifacts;
  std::ofstream out(e.out_dir / "summary.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write summary.json");
  out << summary.dump(2) << '\n';
  return records;
}

std::string report(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() == "summary.json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<json> summaries;
  std::set<std::string> metric_names;
  for (const auto& f : files) {
    std::ifstream in(f);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("aggregates")) continue;
    for (const auto& [k, v] : j["aggregates"].items()) metric_names.insert(k);
    j["__path"] = std::filesystem::relative(f.parent_path(), dir).string();
    summaries.push_back(std::move(j));
  }

  std::ostringstream out;
  out << "run,kind,config_hash,records";
  for (const auto& m : metric_names) out << ',' << m << "_mean";
  out << '\n';
  for (const auto& j : summaries) {
    out << j["__path"].get<std::string>() << ',' << j.value("kind", "") << ','
        << j.value("config_hash", "") << ',' << j.value("records", 0);
    for (const auto& m : metric_names) {
      out << ',';
      const auto& agg = j["aggregates"];
      if (agg.contains(m) && agg[m]["mean"].is_number()) out << format_double(agg[m]["mean"].get<double>());
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nnql
