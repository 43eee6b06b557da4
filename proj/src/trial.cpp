#include "sdt/trial.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sdt::trial {

void TrialState::validate() const {
  require_unit_interval(p_a, "p_a");
  require_unit_interval(p_b, "p_b");
}

BinomialSampler::BinomialSampler(int n, double p) {
  if (n < 0) throw InputError("binomial size must be nonnegative");
  require_unit_interval(p, "binomial probability");
  cdf_.resize(static_cast<std::size_t>(n) + 1);
  if (p == 0.0 || p == 1.0) {
    std::fill(cdf_.begin(), cdf_.end(), p == 0.0 ? 1.0 : 0.0);
  } else {
    const boost::math::binomial_distribution<double> dist(n, p);
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      acc += boost::math::pdf(dist, k);
      cdf_[static_cast<std::size_t>(k)] = acc;
    }
  }
  cdf_.back() = 1.0;
}

int BinomialSampler::operator()(Stream& stream) const {
  const double u = stream.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(it - cdf_.begin());
}

TrialSample simulate_trial_sample(const TrialState& state, int n_a, int n_b, Stream& stream) {
  state.validate();
  if (n_a < 1 || n_b < 1) throw InputError("each arm needs at least one subject");
  TrialSample out{n_a, n_b, 0, 0};
  out.k_a = BinomialSampler(n_a, state.p_a)(stream);
  out.k_b = BinomialSampler(n_b, state.p_b)(stream);
  return out;
}

Treatment rule_es_trial(const TrialSample& s, TiePolicy tie, Stream& stream) {
  const long d = static_cast<long>(s.k_b) * s.n_a - static_cast<long>(s.k_a) * s.n_b;
  if (d > 0) return Treatment::b;
  if (d < 0) return Treatment::a;
  switch (tie) {
    case TiePolicy::choose_a: return Treatment::a;
    case TiePolicy::choose_b: return Treatment::b;
    case TiePolicy::randomize: return stream.uniform() < 0.5 ? Treatment::a : Treatment::b;
  }
  return Treatment::a;
}

std::optional<double> pooled_z_statistic(const TrialSample& s) {
  const double pooled = static_cast<double>(s.k_a + s.k_b) / (s.n_a + s.n_b);
  if (pooled <= 0.0 || pooled >= 1.0) return std::nullopt;
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / s.n_a + 1.0 / s.n_b));
  return (static_cast<double>(s.k_b) / s.n_b - static_cast<double>(s.k_a) / s.n_a) / se;
}

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha);
}

Treatment rule_np_test(const TrialSample& s, double alpha) {
  const double crit = critical_value(alpha);
  const auto z = pooled_z_statistic(s);
  return z && *z > crit ? Treatment::b : Treatment::a;
}

ErrorRegret regret_from_error_prob(const TrialState& state, double prob_choose_b) {
  state.validate();
  require_unit_interval(prob_choose_b, "P(choose b)");
  ErrorRegret out;
  if (state.p_a > state.p_b) {
    out.regret = prob_choose_b * (state.p_a - state.p_b);
  } else if (state.p_b > state.p_a) {
    out.regret = (1.0 - prob_choose_b) * (state.p_b - state.p_a);
  }
  out.expected_welfare = std::max(state.p_a, state.p_b) - out.regret;
  return out;
}

DecisionRule<TrialSample> make_es_rule(TiePolicy tie) {
  DecisionRule<TrialSample> rule;
  rule.id = "es";
  rule.decide = [tie](const TrialSample& s, Stream& st) { return rule_es_trial(s, tie, st) == Treatment::b ? 1.0 : 0.0; };
  rule.randomized = tie == TiePolicy::randomize;
  rule.expected_decision = [tie](const TrialSample& s) {
    const long d = static_cast<long>(s.k_b) * s.n_a - static_cast<long>(s.k_a) * s.n_b;
    if (d != 0) return d > 0 ? 1.0 : 0.0;
    return tie == TiePolicy::choose_b ? 1.0 : tie == TiePolicy::randomize ? 0.5 : 0.0;
  };
  return rule;
}

DecisionRule<TrialSample> make_np_rule(double alpha) {
  const double crit = critical_value(alpha);
  DecisionRule<TrialSample> rule;
  rule.id = "np_test";
  rule.decide = [crit](const TrialSample& s, Stream&) {
    const auto z = pooled_z_statistic(s);
    return z && *z > crit ? 1.0 : 0.0;
  };
  return rule;
}

TrialModel::TrialModel(int n_a, int n_b) : n_a_(n_a), n_b_(n_b) {
  if (n_a < 1 || n_b < 1) throw InputError("each arm needs at least one subject");
}

TrialSample TrialModel::simulate(std::span<const double> x, Stream& s) const {
  return sampler(x)(s);
}

std::vector<std::vector<double>> TrialModel::unit_probabilities(std::span<const double> x) const {
  std::vector<std::vector<double>> units(static_cast<std::size_t>(n_a_), {1.0 - x[0], x[0]});
  units.insert(units.end(), static_cast<std::size_t>(n_b_), {1.0 - x[1], x[1]});
  return units;
}

TrialSample TrialModel::assemble(std::span<const std::uint8_t> cfg, std::span<const double>) const {
  TrialSample out{n_a_, n_b_, 0, 0};
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    (static_cast<int>(i) < n_a_ ? out.k_a : out.k_b) += cfg[i];
  }
  return out;
}

StateGrid trial_grid(const std::vector<double>& values) { return StateGrid({"p_a", "p_b"}, {values, values}); }

TrialComparison compare_max_regret(int n_per_arm, double alpha, std::size_t grid_count,
                                   const ReplicationPlan& plan, SweepOptions sweep, TiePolicy tie) {
  if (n_per_arm < 1) throw InputError("n_per_arm must be at least 1");
  if (grid_count < 1) throw InputError("grid density must be at least 1");
  const TrialModel model(n_per_arm, n_per_arm);
  const StateGrid grid = trial_grid(StateGrid::uniform(grid_count));
  const auto es = make_es_rule(tie);
  const auto np = make_np_rule(alpha);
  TrialComparison out;
  out.exact = 2 * static_cast<std::size_t>(n_per_arm) <= kExactUnitLimit;
  if (out.exact) {
    out.es = exact_regret_over_grid(es, grid, model, sweep.workers);
    out.np = exact_regret_over_grid(np, grid, model, sweep.workers);
  } else {
    ReplicationPlan p = plan;
    p.n = 2 * n_per_arm;
    out.es = max_regret_over_grid(es, grid, p, model, sweep);
    out.np = max_regret_over_grid(np, grid, p, model, sweep);
  }
  return out;
}

void write_comparison_csv(std::ostream& out, const TrialComparison& c, bool full_precision) {
  const char* fmt = full_precision ? "%.17g" : "%.6f";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, fmt, v);
    out << buf;
  };
  out << "p_a,p_b,regret_es,regret_np\n";
  for (std::size_t i = 0; i < c.es.rows.size(); ++i) {
    put(c.es.rows[i].state[0]);
    out << ',';
    put(c.es.rows[i].state[1]);
    out << ',';
    put(c.es.rows[i].risk.regret);
    out << ',';
    put(c.np.rows[i].risk.regret);
    out << '\n';
  }
  out << "max,,";
  put(c.es.max_regret);
  out << ',';
  put(c.np.max_regret);
  out << '\n';
}

}  // namespace sdt::trial
