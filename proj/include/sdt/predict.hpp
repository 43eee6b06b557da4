#pragma once

// Prediction of a binary outcome under square loss when some outcomes are
// missing. Regret of a predictor is its mean square error as an estimate of
// E(y) = q1 * P(delta = 1) + q0 * P(delta = 0).

#include "sdt/engine.hpp"
#include "sdt/table.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sdt::predict {

struct PredictionState {
  double q1 = 0.5;     // P(y = 1 | delta = 1)
  double q0 = 0.5;     // P(y = 1 | delta = 0)
  double p_obs = 1.0;  // P(delta = 1)

  void validate() const;
  double mean() const { return q1 * p_obs + q0 * (1.0 - p_obs); }
};

struct PredictionSample {
  std::vector<std::uint8_t> delta;
  std::vector<std::uint8_t> y_obs;

  std::size_t k() const { return y_obs.size(); }
};

struct PredictionSummary {
  int n = 0;
  int k = 0;
  int successes = 0;

  /// Mean of observed outcomes; 1/2 when nothing is observed.
  double mu_resp() const { return k > 0 ? static_cast<double>(successes) / k : 0.5; }
  double p_hat() const { return static_cast<double>(k) / n; }

  static PredictionSummary of(const PredictionSample& sample);
};

/// N observability draws, then K outcome draws from P(y | delta = 1).
PredictionSample simulate_prediction_sample(const PredictionState& state, int n, Stream& stream);

/// Consumes the stream exactly like simulate_prediction_sample without
/// materializing the sample.
PredictionSummary draw_prediction_summary(const PredictionState& state, int n, Stream& stream);

/// Minimax-MSE estimate of a Bernoulli mean from N complete observations.
double predict_hodges_lehmann(double mu, int n);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Values of E(y) consistent with E(y | delta = 1) and P(delta = 1).
Interval identification_interval(double mean_resp, double p_obs);

double predict_midpoint_known_p(double mu_resp, double p_obs);

/// Maximum MSE of the known-p midpoint predictor with K observed outcomes:
/// squared-bias bound plus variance bound, 1/4 [p^2 / K + (1 - p)^2].
double midpoint_max_regret_known_p(double p_obs, int k);

double predict_midpoint(const PredictionSummary& summary);
double predict_sample_average(const PredictionSummary& summary);

enum class Predictor { midpoint, sample_average };

Predictor parse_predictor(const std::string& s);
std::string to_string(Predictor p);

DecisionRule<PredictionSummary> make_rule(Predictor p);

/// Random number of observed outcomes. Parameters (q1, q0); only q1 is
/// sampled and the squared error is convex in q0.
class MissingOutcomeModel {
 public:
  using Sample = PredictionSummary;
  static constexpr bool regret_convex_in_unsampled = true;

  MissingOutcomeModel(double p_obs, int n);

  std::vector<std::size_t> sampled_parameters() const { return {0}; }
  Sample simulate(std::span<const double> x, Stream& s) const;
  double welfare(double prediction, std::span<const double> x) const;
  double optimum(std::span<const double>) const { return 0.0; }

  std::vector<std::vector<double>> unit_probabilities(std::span<const double> x) const;
  Sample assemble(std::span<const std::uint8_t> cfg, std::span<const double> x) const;

  PredictionState state(std::span<const double> x) const { return {x[0], x[1], p_obs_}; }

 private:
  double p_obs_;
  int n_;
};

/// Known observability rate and a fixed number K of observed outcomes.
/// The sample is the success count among the K outcomes.
struct FixedKSample {
  int k = 0;
  int successes = 0;
  double mean() const { return static_cast<double>(successes) / k; }
};

class KnownRateModel {
 public:
  using Sample = FixedKSample;
  static constexpr bool regret_convex_in_unsampled = true;

  KnownRateModel(double p_obs, int k);

  std::vector<std::size_t> sampled_parameters() const { return {0}; }
  Sample simulate(std::span<const double> x, Stream& s) const;
  double welfare(double prediction, std::span<const double> x) const;
  double optimum(std::span<const double>) const { return 0.0; }

  std::vector<std::vector<double>> unit_probabilities(std::span<const double> x) const;
  Sample assemble(std::span<const std::uint8_t> cfg, std::span<const double> x) const;

  double p_obs() const { return p_obs_; }

 private:
  double p_obs_;
  int k_;
};

DecisionRule<FixedKSample> make_known_rate_midpoint_rule(double p_obs);

/// Fully observed Bernoulli outcomes with single parameter q.
class BernoulliMeanModel {
 public:
  using Sample = FixedKSample;

  explicit BernoulliMeanModel(int n);

  std::vector<std::size_t> sampled_parameters() const { return {0}; }
  Sample simulate(std::span<const double> x, Stream& s) const;
  double welfare(double prediction, std::span<const double> x) const;
  double optimum(std::span<const double>) const { return 0.0; }

  std::vector<std::vector<double>> unit_probabilities(std::span<const double> x) const;
  Sample assemble(std::span<const std::uint8_t> cfg, std::span<const double> x) const;

 private:
  int n_;
};

DecisionRule<FixedKSample> make_hodges_lehmann_rule();
DecisionRule<FixedKSample> make_sample_mean_rule();

/// (q1, q0) grid for a panel; panel B keeps |q1 - q0| <= 1/2.
StateGrid outcome_grid(Panel panel, const std::vector<double>& values);

/// Rows N in {25, 50, 75, 100}, columns P(delta = 1) in {0.1, ..., 1.0},
/// 100 outcome values per parameter from 0.01 to 0.99.
TableOptions default_table_options();

/// Maximum estimated MSE per (N, P(delta = 1)) cell.
CellTable max_mse_table(Predictor predictor, Panel panel, const TableOptions& options);

}  // namespace sdt::predict
