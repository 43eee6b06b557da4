#include "sdt/predict.hpp"

#include <cmath>

namespace sdt::predict {

void PredictionState::validate() const {
  require_unit_interval(q1, "q1");
  require_unit_interval(q0, "q0");
  require_unit_interval(p_obs, "p_obs");
}

PredictionSummary PredictionSummary::of(const PredictionSample& sample) {
  PredictionSummary s;
  s.n = static_cast<int>(sample.delta.size());
  for (auto d : sample.delta) s.k += d;
  for (auto y : sample.y_obs) s.successes += y;
  return s;
}

PredictionSample simulate_prediction_sample(const PredictionState& state, int n, Stream& stream) {
  state.validate();
  if (n < 1) throw InputError("sample size must be at least 1");
  PredictionSample out;
  out.delta.resize(static_cast<std::size_t>(n));
  const auto observe = Stream::bernoulli_threshold(state.p_obs);
  for (auto& d : out.delta) d = stream.below(observe) ? 1 : 0;
  const auto success = Stream::bernoulli_threshold(state.q1);
  for (auto d : out.delta) {
    if (d) out.y_obs.push_back(stream.below(success) ? 1 : 0);
  }
  return out;
}

PredictionSummary draw_prediction_summary(const PredictionState& state, int n, Stream& stream) {
  PredictionSummary out;
  out.n = n;
  const auto observe = Stream::bernoulli_threshold(state.p_obs);
  for (int i = 0; i < n; ++i) out.k += stream.below(observe);
  const auto success = Stream::bernoulli_threshold(state.q1);
  for (int i = 0; i < out.k; ++i) out.successes += stream.below(success);
  return out;
}

double predict_hodges_lehmann(double mu, int n) {
  require_unit_interval(mu, "sample mean");
  if (n < 1) throw InputError("sample size must be at least 1");
  const double root = std::sqrt(static_cast<double>(n));
  return (mu * root + 0.5) / (root + 1.0);
}

Interval identification_interval(double mean_resp, double p_obs) {
  require_unit_interval(mean_resp, "E(y | delta = 1)");
  require_unit_interval(p_obs, "P(delta = 1)");
  const double lo = mean_resp * p_obs;
  return {lo, lo + (1.0 - p_obs)};
}

double predict_midpoint_known_p(double mu_resp, double p_obs) {
  require_unit_interval(mu_resp, "E(y | delta = 1)");
  require_unit_interval(p_obs, "P(delta = 1)");
  return mu_resp * p_obs + 0.5 * (1.0 - p_obs);
}

double midpoint_max_regret_known_p(double p_obs, int k) {
  require_unit_interval(p_obs, "P(delta = 1)");
  if (k < 1) throw InputError("the number of observed outcomes must be at least 1");
  const double missing = 1.0 - p_obs;
  return 0.25 * (p_obs * p_obs / k + missing * missing);
}

double predict_midpoint(const PredictionSummary& s) {
  const double p_hat = s.p_hat();
  return s.mu_resp() * p_hat + 0.5 * (1.0 - p_hat);
}

double predict_sample_average(const PredictionSummary& s) { return s.mu_resp(); }

Predictor parse_predictor(const std::string& s) {
  if (s == "midpoint") return Predictor::midpoint;
  if (s == "sample_average" || s == "sample-average") return Predictor::sample_average;
  throw InputError("unknown predictor '" + s + "'");
}

std::string to_string(Predictor p) { return p == Predictor::midpoint ? "midpoint" : "sample_average"; }

DecisionRule<PredictionSummary> make_rule(Predictor p) {
  DecisionRule<PredictionSummary> rule;
  rule.id = to_string(p);
  if (p == Predictor::midpoint) {
    rule.decide = [](const PredictionSummary& s, Stream&) { return predict_midpoint(s); };
  } else {
    rule.decide = [](const PredictionSummary& s, Stream&) { return predict_sample_average(s); };
  }
  return rule;
}

MissingOutcomeModel::MissingOutcomeModel(double p_obs, int n) : p_obs_(p_obs), n_(n) {
  require_unit_interval(p_obs, "P(delta = 1)");
  if (n < 1) throw InputError("sample size must be at least 1");
}

PredictionSummary MissingOutcomeModel::simulate(std::span<const double> x, Stream& s) const {
  return draw_prediction_summary(state(x), n_, s);
}

double MissingOutcomeModel::welfare(double prediction, std::span<const double> x) const {
  const double err = prediction - state(x).mean();
  return -err * err;
}

std::vector<std::vector<double>> MissingOutcomeModel::unit_probabilities(std::span<const double> x) const {
  const double q1 = x[0];
  // missing, observed failure, observed success
  return std::vector<std::vector<double>>(
      static_cast<std::size_t>(n_), {1.0 - p_obs_, p_obs_ * (1.0 - q1), p_obs_ * q1});
}

PredictionSummary MissingOutcomeModel::assemble(std::span<const std::uint8_t> cfg,
                                                std::span<const double>) const {
  PredictionSummary s;
  s.n = static_cast<int>(cfg.size());
  for (auto c : cfg) {
    s.k += c > 0;
    s.successes += c == 2;
  }
  return s;
}

KnownRateModel::KnownRateModel(double p_obs, int k) : p_obs_(p_obs), k_(k) {
  require_unit_interval(p_obs, "P(delta = 1)");
  if (k < 1) throw InputError("the number of observed outcomes must be at least 1");
}

FixedKSample KnownRateModel::simulate(std::span<const double> x, Stream& s) const {
  FixedKSample out{k_, 0};
  const auto success = Stream::bernoulli_threshold(x[0]);
  for (int i = 0; i < k_; ++i) out.successes += s.below(success);
  return out;
}

double KnownRateModel::welfare(double prediction, std::span<const double> x) const {
  const double err = prediction - (x[0] * p_obs_ + x[1] * (1.0 - p_obs_));
  return -err * err;
}

std::vector<std::vector<double>> KnownRateModel::unit_probabilities(std::span<const double> x) const {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(k_), {1.0 - x[0], x[0]});
}

FixedKSample KnownRateModel::assemble(std::span<const std::uint8_t> cfg, std::span<const double>) const {
  FixedKSample out{static_cast<int>(cfg.size()), 0};
  for (auto c : cfg) out.successes += c;
  return out;
}

DecisionRule<FixedKSample> make_known_rate_midpoint_rule(double p_obs) {
  DecisionRule<FixedKSample> rule;
  rule.id = "midpoint_known_p";
  rule.decide = [p_obs](const FixedKSample& s, Stream&) { return predict_midpoint_known_p(s.mean(), p_obs); };
  return rule;
}

BernoulliMeanModel::BernoulliMeanModel(int n) : n_(n) {
  if (n < 1) throw InputError("sample size must be at least 1");
}

FixedKSample BernoulliMeanModel::simulate(std::span<const double> x, Stream& s) const {
  FixedKSample out{n_, 0};
  const auto success = Stream::bernoulli_threshold(x[0]);
  for (int i = 0; i < n_; ++i) out.successes += s.below(success);
  return out;
}

double BernoulliMeanModel::welfare(double prediction, std::span<const double> x) const {
  const double err = prediction - x[0];
  return -err * err;
}

std::vector<std::vector<double>> BernoulliMeanModel::unit_probabilities(std::span<const double> x) const {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(n_), {1.0 - x[0], x[0]});
}

FixedKSample BernoulliMeanModel::assemble(std::span<const std::uint8_t> cfg, std::span<const double>) const {
  FixedKSample out{static_cast<int>(cfg.size()), 0};
  for (auto c : cfg) out.successes += c;
  return out;
}

DecisionRule<FixedKSample> make_hodges_lehmann_rule() {
  DecisionRule<FixedKSample> rule;
  rule.id = "hodges_lehmann";
  rule.decide = [](const FixedKSample& s, Stream&) { return predict_hodges_lehmann(s.mean(), s.k); };
  return rule;
}

DecisionRule<FixedKSample> make_sample_mean_rule() {
  DecisionRule<FixedKSample> rule;
  rule.id = "sample_mean";
  rule.decide = [](const FixedKSample& s, Stream&) { return s.mean(); };
  return rule;
}

StateGrid outcome_grid(Panel panel, const std::vector<double>& values) {
  StateGrid::Constraint constraint;
  if (panel == Panel::B) constraint = StateGrid::band(0, 1, 0.5);
  return StateGrid({"q1", "q0"}, {values, values}, constraint);
}

TableOptions default_table_options() {
  TableOptions o;
  o.n_list = {25, 50, 75, 100};
  o.columns = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  o.grid_count = 100;
  o.grid_lo = 0.01;
  o.grid_hi = 0.99;
  return o;
}

CellTable max_mse_table(Predictor predictor, Panel panel, const TableOptions& options) {
  options.validate();
  CellTable table;
  table.id = std::string(predictor == Predictor::midpoint ? "1" : "2") + (panel == Panel::A ? "a" : "b");
  table.column_label = "P(delta=1)";
  table.rows = options.n_list;
  table.columns = options.columns;
  table.argmax_names = {"q1", "q0"};
  const auto rows = static_cast<Index>(table.rows.size());
  const auto cols = static_cast<Index>(table.columns.size());
  table.value.resize(rows, cols);
  table.mc_stderr.resize(rows, cols);
  table.argmax.resize(static_cast<std::size_t>(rows * cols));

  const StateGrid grid = outcome_grid(panel, options.grid_values());
  const auto rule = make_rule(predictor);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const int n = table.rows[static_cast<std::size_t>(i)];
      const double p = table.columns[static_cast<std::size_t>(j)];
      const MissingOutcomeModel model(p, n);
      const auto result = max_regret_over_grid(rule, grid, options.plan_for(n, p), model, options.sweep);
      table.value(i, j) = result.max_regret;
      table.mc_stderr(i, j) = result.argmax_row().risk.mc_stderr;
      table.argmax[static_cast<std::size_t>(i * cols + j)] = result.argmax_row().state;
    }
  }
  return table;
}

}  // namespace sdt::predict
