#include "nnql/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nnql {

GApplier::GApplier(std::shared_ptr<const MdpSpec> mdp_, std::shared_ptr<const HNet> net_,
                   KernelSpec kernel_, Integration integration_)
    : mdp(std::move(mdp_)), net(std::move(net_)), kernel(kernel_), integration(integration_) {
  if (!mdp || !net) throw std::invalid_argument("GApplier needs an MDP and a net");
  if (!mdp->has_expected_reward())
    throw std::invalid_argument("applying G requires the MDP's expected reward");
  if (std::holds_alternative<Quadrature>(integration) && !mdp->has_transition_quadrature())
    throw std::invalid_argument("quadrature integration requires a transition quadrature rule");
  if (kernel.bandwidth != net->h())
    throw std::invalid_argument("kernel bandwidth must equal the net radius");
}

namespace {

struct NextValue {
  const QTable& q;
  const KernelSpec& kernel;
  Weights scratch;
  std::vector<double> values;

  NextValue(const QTable& q_, const KernelSpec& kernel_)
      : q(q_), kernel(kernel_), values(q_.n_actions()) {}

  double operator()(std::span<const double> x) {
    nn_extend_all(q, x, kernel, values, scratch);
    return *std::max_element(values.begin(), values.end());
  }
};

double expectation(NextValue& v, const std::vector<WeightedPoint>& nodes) {
  double e = 0.0;
  for (const auto& node : nodes) e += node.w * v(node.x);
  return e;
}

}  // namespace

GResult apply_G_detailed(const GApplier& applier, const QTable& q) {
  const MdpSpec& mdp = *applier.mdp;
  const HNet& net = *applier.net;
  if (q.n_centers() != net.size() || q.n_actions() != mdp.n_actions())
    throw std::invalid_argument("table does not live on the applier's net");
  GResult out{QTable(applier.net, q.actions()), 0.0};
  NextValue value(q, applier.kernel);
  const double gamma = mdp.gamma();

  if (const auto* quad = std::get_if<Quadrature>(&applier.integration)) {
    double shared = 0.0;
    if (mdp.state_independent_transitions()) {
      shared = expectation(value, mdp.transition_nodes(net.center(0), 0, quad->n_nodes));
    }
    for (std::size_t i = 0; i < net.size(); ++i) {
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const double e = mdp.state_independent_transitions()
                             ? shared
                             : expectation(value, mdp.transition_nodes(net.center(i), a,
                                                                       quad->n_nodes));
        out.q(i, a) = mdp.expected_reward(net.center(i), a) + gamma * e;
      }
    }
    return out;
  }

  const auto& mc = std::get<MonteCarlo>(applier.integration);
  if (mc.n_samples < 2) throw std::invalid_argument("Monte Carlo needs at least two samples");
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      Rng rng(mc.seed ^ (0x9E3779B97F4A7C15ULL * (i * mdp.n_actions() + a + 1)));
      double mean = 0.0;
      double m2 = 0.0;
      for (std::size_t s = 0; s < mc.n_samples; ++s) {
        const double v = value(mdp.sample_next(net.center(i), a, rng));
        const double delta = v - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (v - mean);
      }
      const double var = m2 / static_cast<double>(mc.n_samples - 1);
      out.max_std_error =
          std::max(out.max_std_error, gamma * std::sqrt(var / static_cast<double>(mc.n_samples)));
      out.q(i, a) = mdp.expected_reward(net.center(i), a) + gamma * mean;
    }
  }
  return out;
}

QTable apply_G(const GApplier& applier, const QTable& q) {
  return apply_G_detailed(applier, q).q;
}

FixedPointResult fixed_point_qh(const GApplier& applier, double tol, std::size_t max_sweeps) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double gamma = applier.mdp->gamma();
  const double stop = tol * (1.0 - gamma) / gamma;
  FixedPointResult out{QTable(applier.net, applier.mdp->actions()), {}};
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    QTable next = apply_G(applier, out.q);
    const double change = sup_distance(next, out.q);
    out.q = std::move(next);
    out.sweep_changes.push_back(change);
    if (change <= stop) return out;
  }
  throw std::runtime_error("fixed-point iteration did not converge within the sweep cap");
}

double integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box,
                     std::size_t panels) {
  static constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665,
                                                  0.5688888888888889, 0.4786286704993665,
                                                  0.2369268850561891};
  if (panels == 0) throw std::invalid_argument("need at least one panel");
  const std::size_t d = box.dim();
  const std::size_t per_axis = panels * kNodes.size();
  std::vector<double> xs(d * per_axis), ws(d * per_axis);
  for (std::size_t k = 0; k < d; ++k) {
    const double width = box.side(k) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = box.lo[k] + (static_cast<double>(p) + 0.5) * width;
      for (std::size_t j = 0; j < kNodes.size(); ++j) {
        xs[k * per_axis + p * kNodes.size() + j] = mid + 0.5 * width * kNodes[j];
        ws[k * per_axis + p * kNodes.size() + j] = 0.5 * width * kWeights[j];
      }
    }
  }
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = xs[k * per_axis + idx[k]];
      w *= ws[k * per_axis + idx[k]];
    }
    total += w * f(x);
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < per_axis) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  return total;
}

UniformMixingQStar::UniformMixingQStar(const MdpSpec& mdp) : gamma_(mdp.gamma()) {
  if (mdp.kind() != MdpKind::UniformMixing || !mdp.reward_function())
    throw std::invalid_argument("analytic Q* is only available for uniform-mixing MDPs");
  reward_ = *mdp.reward_function();
  const std::size_t d = mdp.dim();
  if (d > 4) throw std::invalid_argument("analytic Q* integrates the reward only for d <= 4");
  static constexpr std::array<std::size_t, 5> kPanels{0, 64, 32, 8, 4};
  integral_ = integrate_box(reward_.eval, mdp.bounds(), kPanels[d]) /
              [&] {
                double vol = 1.0;
                for (std::size_t k = 0; k < d; ++k) vol *= mdp.bounds().side(k);
                return vol;
              }();
}

double UniformMixingQStar::operator()(std::span<const double> x, std::size_t) const {
  return reward_.eval(x) + gamma_ / (1.0 - gamma_) * integral_;
}

double analytic_qstar_uniform_mixing(const MdpSpec& mdp, std::span<const double> x,
                                     std::size_t action) {
  if (action >= mdp.n_actions()) throw std::out_of_range("action index out of range");
  return UniformMixingQStar(mdp)(x, action);
}

namespace {

struct Stencil {
  std::array<std::size_t, 4> idx{};
  std::array<double, 4> w{};
  std::size_t count = 0;
};

Stencil make_stencil(const std::vector<std::vector<double>>& axes, std::span<const double> x) {
  std::array<std::size_t, 2> lo{};
  std::array<double, 2> t{};
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const auto& ax = axes[k];
    const double step = (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
    const double u = std::clamp(x[k], ax.front(), ax.back());
    auto j = static_cast<std::size_t>(std::floor((u - ax.front()) / step));
    j = std::min(j, ax.size() - 2);
    lo[k] = j;
    t[k] = std::clamp((u - ax[j]) / step, 0.0, 1.0);
  }
  Stencil s;
  if (axes.size() == 1) {
    s.idx = {lo[0], lo[0] + 1, 0, 0};
    s.w = {1.0 - t[0], t[0], 0.0, 0.0};
    s.count = 2;
  } else {
    const std::size_t n1 = axes[1].size();
    s.idx = {lo[0] * n1 + lo[1], lo[0] * n1 + lo[1] + 1, (lo[0] + 1) * n1 + lo[1],
             (lo[0] + 1) * n1 + lo[1] + 1};
    s.w = {(1 - t[0]) * (1 - t[1]), (1 - t[0]) * t[1], t[0] * (1 - t[1]), t[0] * t[1]};
    s.count = 4;
  }
  return s;
}

struct StencilNode {
  Stencil stencil;
  double w;
};

}  // namespace

double GridQStar::operator()(std::span<const double> x, std::size_t action) const {
  if (action >= n_actions_) throw std::out_of_range("action index out of range");
  const Stencil s = make_stencil(axes_, x);
  double v = 0.0;
  for (std::size_t k = 0; k < s.count; ++k) v += s.w[k] * values_[s.idx[k] * n_actions_ + action];
  return v;
}

GridQStar grid_qstar(const MdpSpec& mdp, double fine_h, double tol, std::size_t quad_resolution,
                     std::size_t point_budget) {
  const std::size_t d = mdp.dim();
  if (d > 2) throw std::invalid_argument("grid Q* supports d <= 2 only");
  if (!(fine_h > 0.0) || !(tol > 0.0)) throw std::invalid_argument("fine_h and tol must be positive");
  if (!mdp.has_expected_reward() || !mdp.has_transition_quadrature())
    throw std::invalid_argument("grid Q* needs the expected reward and a transition quadrature");

  GridQStar g;
  g.n_actions_ = mdp.n_actions();
  std::size_t n_points = 1;
  for (std::size_t k = 0; k < d; ++k) {
    const auto cells = static_cast<std::size_t>(std::ceil(mdp.bounds().side(k) / fine_h - 1e-9));
    const std::size_t n = std::max<std::size_t>(cells, 1) + 1;
    std::vector<double> ax(n);
    for (std::size_t j = 0; j < n; ++j)
      ax[j] = mdp.bounds().lo[k] + mdp.bounds().side(k) * static_cast<double>(j) /
                                       static_cast<double>(n - 1);
    n_points *= n;
    if (n_points > point_budget) throw std::length_error("grid Q* exceeds the point budget");
    g.axes_.push_back(std::move(ax));
  }

  std::vector<Point> points(n_points, Point(d));
  for (std::size_t p = 0; p < n_points; ++p) {
    std::size_t rem = p;
    for (std::size_t k = d; k-- > 0;) {
      points[p][k] = g.axes_[k][rem % g.axes_[k].size()];
      rem /= g.axes_[k].size();
    }
  }

  const std::size_t n_actions = g.n_actions_;
  auto to_stencils = [&](const std::vector<WeightedPoint>& nodes) {
    std::vector<StencilNode> out;
    out.reserve(nodes.size());
    for (const auto& node : nodes) out.push_back({make_stencil(g.axes_, node.x), node.w});
    return out;
  };
  const bool shared = mdp.state_independent_transitions();
  std::vector<std::vector<StencilNode>> stencils;
  if (shared) {
    stencils.push_back(to_stencils(mdp.transition_nodes(points[0], 0, quad_resolution)));
  } else {
    stencils.reserve(n_points * n_actions);
    for (std::size_t p = 0; p < n_points; ++p)
      for (std::size_t a = 0; a < n_actions; ++a)
        stencils.push_back(to_stencils(mdp.transition_nodes(points[p], a, quad_resolution)));
  }
  std::vector<double> reward(n_points * n_actions);
  for (std::size_t p = 0; p < n_points; ++p)
    for (std::size_t a = 0; a < n_actions; ++a)
      reward[p * n_actions + a] = mdp.expected_reward(points[p], a);

  g.values_.assign(n_points * n_actions, 0.0);
  std::vector<double> next(g.values_.size());
  auto max_value = [&](const Stencil& s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < n_actions; ++b) {
      double v = 0.0;
      for (std::size_t k = 0; k < s.count; ++k) v += s.w[k] * g.values_[s.idx[k] * n_actions + b];
      best = std::max(best, v);
    }
    return best;
  };
  auto expect = [&](const std::vector<StencilNode>& nodes) {
    double e = 0.0;
    for (const auto& n : nodes) e += n.w * max_value(n.stencil);
    return e;
  };

  const double gamma = mdp.gamma();
  constexpr std::size_t kSweepCap = 100'000;
  for (std::size_t sweep = 1; sweep <= kSweepCap; ++sweep) {
    const double shared_e = shared ? expect(stencils[0]) : 0.0;
    double change = 0.0;
    for (std::size_t idx = 0; idx < next.size(); ++idx) {
      const double e = shared ? shared_e : expect(stencils[idx]);
      next[idx] = reward[idx] + gamma * e;
      change = std::max(change, std::abs(next[idx] - g.values_[idx]));
    }
    g.values_.swap(next);
    g.residual_ = change;
    g.sweeps_ = sweep;
    if (change <= tol) return g;
  }
  throw std::length_error("grid Q* did not reach the residual tolerance within the sweep cap");
}

double sup_error(const QFunction& estimate, const QFunction& reference,
                 std::span<const Point> probes, std::size_t n_actions) {
  double worst = 0.0;
  for (const auto& x : probes)
    for (std::size_t a = 0; a < n_actions; ++a)
      worst = std::max(worst, std::abs(estimate(x, a) - reference(x, a)));
  return worst;
}

HStar h_star(double eps, const DerivedConstants& c, double fallback_h) {
  if (!(eps > 0.0 && eps < 4.0 * c.v_max * c.beta))
    throw std::domain_error("eps outside (0, 4 V_max beta)");
  if (c.lip_c == 0.0) return HStar{fallback_h, true};
  return HStar{eps / (4.0 * c.beta * c.lip_c), false};
}

std::uint64_t sample_complexity_T(const PlannerInputs& in) {
  const auto& c = in.constants;
  if (!(in.eps > 0.0 && in.eps < 4.0 * c.v_max * c.beta))
    throw std::domain_error("eps outside (0, 4 V_max beta)");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  if (!(in.l_cover > 0.0) || in.n_centers == 0 || in.n_actions == 0 || !(in.c0 > 0.0))
    throw std::domain_error("planner inputs must be positive");
  const double b4 = std::pow(c.beta, 4);
  const double lead = in.c0 * in.l_cover * std::pow(c.v_max, 3) * b4 / std::pow(in.eps, 3);
  const double log_arg = static_cast<double>(in.n_centers) * static_cast<double>(in.n_actions) *
                         c.v_max * c.v_max * b4 / (in.delta * in.eps * in.eps);
  return static_cast<std::uint64_t>(std::ceil(lead * std::log(2.0 / in.delta) * std::log(log_arg)));
}

double discretization_bound(double h, const DerivedConstants& c) {
  if (h < 0.0) throw std::domain_error("h must be nonnegative");
  return c.beta * c.lip_c * h;
}

}  // namespace nnql
