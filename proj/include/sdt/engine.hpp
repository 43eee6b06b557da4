#pragma once

// Monte Carlo risk evaluation of statistical decision functions.
//
// A rule maps a simulated sample to a decision: a prediction, or the
// fraction of the population allocated to treatment b (0 or 1 for a
// singleton rule). For each state the engine simulates T samples, one
// counter-based stream per (state, replicate), scores the decisions by the
// state's welfare function, and reports expected welfare, regret and the
// Monte Carlo standard error.
//
// Grid sweeps key streams by the coordinates of the parameters that govern
// sampling only. All states that differ in unsampled (counterfactual)
// parameters therefore see identical decisions, which lets the separable
// sweep simulate once per sampled sub-state and, for models whose regret is
// convex in the unsampled parameters, score only the corners of their
// feasible box. Both sweeps produce bit-identical numbers for every state
// they share.

#include "sdt/rng.hpp"
#include "sdt/types.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sdt {

struct ReplicationPlan {
  std::size_t replicates = 5000;
  std::uint64_t master_seed = 20191203;
  int n = 1;

  void validate() const;

  /// Same plan with the seed salted for one table cell.
  ReplicationPlan for_cell(std::uint64_t salt) const {
    ReplicationPlan out = *this;
    out.master_seed = mix_seed(master_seed, salt);
    return out;
  }
};

struct RiskEstimate {
  double expected_welfare = 0.0;
  double regret = 0.0;
  double mc_stderr = 0.0;
  std::size_t replicates_used = 0;
};

template <class Sample>
struct DecisionRule {
  std::string id;
  std::function<double(const Sample&, Stream&)> decide;
  /// E[decision | sample] for randomized rules. The exact oracle uses it in
  /// place of decide, which is valid when welfare is linear in the decision.
  std::function<double(const Sample&)> expected_decision;
  bool randomized = false;
};

/// A sampling model over a parameter grid. simulate() may read only the
/// parameters listed by sampled_parameters().
template <class M>
concept GridModel = requires(const M& m, std::span<const double> x, Stream& s, double d) {
  typename M::Sample;
  { m.sampled_parameters() } -> std::convertible_to<std::vector<std::size_t>>;
  { m.simulate(x, s) } -> std::same_as<typename M::Sample>;
  { m.welfare(d, x) } -> std::convertible_to<double>;
  { m.optimum(x) } -> std::convertible_to<double>;
};

/// Models whose samples are sequences of independent categorical units.
/// unit_probabilities() gives each unit's category distribution; assemble()
/// builds the sample from one category per unit.
template <class M>
concept EnumerableModel =
    GridModel<M> && requires(const M& m, std::span<const double> x, std::span<const std::uint8_t> cfg) {
      { m.unit_probabilities(x) } -> std::convertible_to<std::vector<std::vector<double>>>;
      { m.assemble(cfg, x) } -> std::same_as<typename M::Sample>;
    };

/// Models may expose sampler(x), a callable Sample(Stream&) with per-state
/// precomputation; otherwise simulate(x, stream) is called per replicate.
template <GridModel M>
auto simulator_for(const M& model, std::span<const double> x) {
  if constexpr (requires { model.sampler(x); }) {
    return model.sampler(x);
  } else {
    return [&model, x](Stream& s) { return model.simulate(x, s); };
  }
}

/// Models that declare regret convex in the unsampled parameters, so its
/// maximum over a box sits at a corner.
template <class M>
concept CornerSeparable = GridModel<M> && M::regret_convex_in_unsampled;

/// Runs the rule on T simulated samples. A throwing rule or a non-finite
/// decision aborts with the replicate index.
template <class Simulate, class Decide>
std::vector<double> simulate_decisions(Simulate&& simulate, Decide&& decide,
                                       const ReplicationPlan& plan, std::uint64_t state_index) {
  plan.validate();
  std::vector<double> decisions(plan.replicates);
  for (std::size_t t = 0; t < plan.replicates; ++t) {
    Stream stream = derive_stream(plan.master_seed, state_index, static_cast<std::uint32_t>(t));
    double d;
    try {
      auto sample = simulate(stream);
      d = decide(sample, stream);
    } catch (const std::exception& e) {
      throw NumericalError("rule failed at replicate " + std::to_string(t) + ": " + e.what());
    }
    if (!std::isfinite(d)) {
      throw NumericalError("rule returned a non-finite decision at replicate " + std::to_string(t));
    }
    decisions[t] = d;
  }
  return decisions;
}

/// Welford mean and variance of welfare over the decisions.
template <class Welfare>
RiskEstimate score_decisions(std::span<const double> decisions, Welfare&& welfare, double optimum) {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double d : decisions) {
    const double w = welfare(d);
    ++count;
    const double delta = w - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (w - mean);
  }
  RiskEstimate out;
  out.replicates_used = count;
  out.expected_welfare = mean;
  double regret = optimum - mean;
  if (regret < 0.0) {
    if (regret < -1e-12) throw NumericalError("expected welfare exceeds the state optimum");
    regret = 0.0;
  }
  out.regret = regret;
  out.mc_stderr = count > 1 ? std::sqrt(std::max(m2, 0.0) / static_cast<double>(count - 1)) /
                                  std::sqrt(static_cast<double>(count))
                            : 0.0;
  return out;
}

template <class Simulate, class Decide, class Welfare>
RiskEstimate estimate_risk(Simulate&& simulate, Decide&& decide, Welfare&& welfare, double optimum,
                           const ReplicationPlan& plan, std::uint64_t state_index) {
  const auto decisions = simulate_decisions(simulate, decide, plan, state_index);
  return score_decisions(std::span<const double>(decisions), welfare, optimum);
}

/// Risk of a rule in one state of a model.
template <GridModel M>
RiskEstimate estimate_risk(const DecisionRule<typename M::Sample>& rule, std::span<const double> state,
                           const ReplicationPlan& plan, const M& model, std::uint64_t state_index = 0) {
  return estimate_risk(simulator_for(model, state), rule.decide,
                       [&](double d) { return model.welfare(d, state); }, model.optimum(state), plan,
                       state_index);
}

inline constexpr std::size_t kExactUnitLimit = 12;

/// Exact risk by enumerating every configuration of the sample's units.
template <EnumerableModel M>
RiskEstimate exact_risk_small(const DecisionRule<typename M::Sample>& rule, std::span<const double> state,
                              const M& model) {
  const std::vector<std::vector<double>> units = model.unit_probabilities(state);
  if (units.size() > kExactUnitLimit) {
    throw InputError("exact enumeration is limited to " + std::to_string(kExactUnitLimit) +
                     " sampled units, got " + std::to_string(units.size()));
  }
  if (rule.randomized && !rule.expected_decision) {
    throw InputError("rule '" + rule.id + "' is randomized and has no conditional expectation");
  }
  Stream unused(0, 0, 0);
  std::vector<std::uint8_t> cfg(units.size(), 0);
  double expected = 0.0;
  for (;;) {
    double prob = 1.0;
    for (std::size_t u = 0; u < units.size() && prob > 0.0; ++u) prob *= units[u][cfg[u]];
    if (prob > 0.0) {
      const auto sample = model.assemble(std::span<const std::uint8_t>(cfg), state);
      const double d = rule.randomized ? rule.expected_decision(sample) : rule.decide(sample, unused);
      expected += prob * model.welfare(d, state);
    }
    std::size_t u = 0;
    while (u < units.size() && ++cfg[u] == units[u].size()) cfg[u++] = 0;
    if (u == units.size()) break;
  }
  RiskEstimate out;
  out.expected_welfare = expected;
  out.regret = std::max(0.0, model.optimum(state) - expected);
  return out;
}

/// Discretized state space: one value list per parameter and an optional
/// constraint. States are enumerated row-major (last parameter fastest).
class StateGrid {
 public:
  using Constraint = std::function<bool(std::span<const double>)>;

  StateGrid(std::vector<std::string> names, std::vector<std::vector<double>> values,
            Constraint constraint = {});

  std::size_t dimension() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& values(std::size_t d) const { return values_[d]; }
  const Constraint& constraint() const { return constraint_; }

  bool admits(std::span<const double> x) const { return !constraint_ || constraint_(x); }

  /// Grid coordinates of the admitted states, flattened with stride dimension().
  std::vector<std::uint32_t> admitted() const;

  std::vector<double> point(std::span<const std::uint32_t> coords) const;

  /// count values evenly spaced from lo to hi inclusive.
  static std::vector<double> uniform(std::size_t count, double lo = 0.0, double hi = 1.0);

  /// |x[i] - x[j]| <= width, with 1e-12 slack for grid rounding.
  static Constraint band(std::size_t i, std::size_t j, double width);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> values_;
  Constraint constraint_;
};

struct GridRow {
  std::vector<double> state;
  RiskEstimate risk;
};

struct GridResult {
  std::vector<std::string> parameter_names;
  std::vector<GridRow> rows;
  double max_regret = 0.0;
  std::size_t argmax = 0;

  const GridRow& argmax_row() const { return rows.at(argmax); }
};

enum class SweepMode { brute_force, separable };

struct SweepOptions {
  SweepMode mode = SweepMode::separable;
  unsigned workers = 1;
};

/// Runs body(i) for i in [0, count) on up to `workers` threads. If any calls
/// throw, the exception from the lowest index is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

/// One row per state: parameter columns, expected_welfare, regret, mc_stderr.
void write_grid_csv(std::ostream& out, const GridResult& result, bool full_precision = false);

namespace detail {

// Row-major index over the sampled parameters' grid coordinates.
inline std::uint64_t sampled_key(const StateGrid& grid, std::span<const std::size_t> sampled,
                                 std::span<const std::uint32_t> coords) {
  std::uint64_t key = 0;
  for (std::size_t d : sampled) key = key * grid.values(d).size() + coords[d];
  return key;
}

// States of one group to score: corners of the unsampled box when the group
// forms a full box of contiguous coordinates, every state otherwise.
std::vector<std::size_t> corner_states(std::span<const std::uint32_t> admitted, std::size_t dim,
                                       std::span<const std::size_t> unsampled,
                                       const std::vector<std::size_t>& group);

void finish(GridResult& result);

}  // namespace detail

/// Maximum regret of a rule over the admitted states of a grid.
///
/// brute_force scores every admitted state. separable simulates once per
/// sampled sub-state and, for CornerSeparable models, scores only the
/// corners of each unsampled box; its table lists the scored states only.
template <GridModel M>
GridResult max_regret_over_grid(const DecisionRule<typename M::Sample>& rule, const StateGrid& grid,
                                const ReplicationPlan& plan, const M& model, SweepOptions opts = {}) {
  plan.validate();
  const std::size_t dim = grid.dimension();
  const std::vector<std::uint32_t> admitted = grid.admitted();
  const std::size_t n_states = dim == 0 ? 0 : admitted.size() / dim;
  if (n_states == 0) throw InputError("state grid is empty after applying its constraint");

  const std::vector<std::size_t> sampled = model.sampled_parameters();
  std::vector<std::size_t> unsampled;
  for (std::size_t d = 0; d < dim; ++d) {
    if (std::find(sampled.begin(), sampled.end(), d) == sampled.end()) unsampled.push_back(d);
  }
  auto coords_of = [&](std::size_t s) {
    return std::span<const std::uint32_t>(admitted.data() + s * dim, dim);
  };

  GridResult result;
  result.parameter_names = grid.names();

  if (opts.mode == SweepMode::brute_force) {
    result.rows.resize(n_states);
    parallel_for(n_states, opts.workers, [&](std::size_t s) {
      const auto c = coords_of(s);
      GridRow row{grid.point(c), {}};
      row.risk = estimate_risk(rule, std::span<const double>(row.state), plan, model,
                               detail::sampled_key(grid, sampled, c));
      result.rows[s] = std::move(row);
    });
  } else {
    std::map<std::uint64_t, std::vector<std::size_t>> by_key;
    for (std::size_t s = 0; s < n_states; ++s) {
      by_key[detail::sampled_key(grid, sampled, coords_of(s))].push_back(s);
    }
    std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> groups(by_key.begin(), by_key.end());
    std::vector<std::vector<std::pair<std::size_t, GridRow>>> scored(groups.size());
    parallel_for(groups.size(), opts.workers, [&](std::size_t g) {
      const auto& [key, members] = groups[g];
      std::vector<std::size_t> targets = members;
      if constexpr (CornerSeparable<M>) {
        targets = detail::corner_states(admitted, dim, unsampled, members);
      }
      const std::vector<double> x0 = grid.point(coords_of(members.front()));
      const auto decisions =
          simulate_decisions(simulator_for(model, std::span<const double>(x0)), rule.decide, plan, key);
      for (std::size_t s : targets) {
        GridRow row{grid.point(coords_of(s)), {}};
        const std::span<const double> x(row.state);
        row.risk = score_decisions(std::span<const double>(decisions),
                                   [&](double d) { return model.welfare(d, x); }, model.optimum(x));
        scored[g].emplace_back(s, std::move(row));
      }
    });
    std::vector<std::pair<std::size_t, GridRow>> all;
    for (auto& v : scored) {
      for (auto& r : v) all.push_back(std::move(r));
    }
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (auto& r : all) result.rows.push_back(std::move(r.second));
  }
  detail::finish(result);
  return result;
}

/// Exact risk at every admitted state; rows carry mc_stderr = 0.
template <EnumerableModel M>
GridResult exact_regret_over_grid(const DecisionRule<typename M::Sample>& rule, const StateGrid& grid,
                                  const M& model, unsigned workers = 1) {
  const std::size_t dim = grid.dimension();
  const std::vector<std::uint32_t> admitted = grid.admitted();
  const std::size_t n_states = admitted.size() / dim;
  if (n_states == 0) throw InputError("state grid is empty after applying its constraint");
  GridResult result;
  result.parameter_names = grid.names();
  result.rows.resize(n_states);
  parallel_for(n_states, workers, [&](std::size_t s) {
    GridRow row{grid.point(std::span<const std::uint32_t>(admitted.data() + s * dim, dim)), {}};
    row.risk = exact_risk_small(rule, std::span<const double>(row.state), model);
    result.rows[s] = std::move(row);
  });
  detail::finish(result);
  return result;
}

}  // namespace sdt
