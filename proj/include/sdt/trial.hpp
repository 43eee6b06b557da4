#pragma once

// Choice between standard care a and innovation b with data from an ideal
// randomized trial: counterfactual and realized outcome distributions agree,
// so a state is just the pair of success probabilities (p_a, p_b).
//
// In a state where a is better, regret is P(choose b) times the welfare gap
// (a Type I error); where b is better it is P(choose a) times the gap
// (a Type II error).

#include "sdt/engine.hpp"

#include <optional>
#include <vector>

namespace sdt::trial {

struct TrialState {
  double p_a = 0.5;
  double p_b = 0.5;
  void validate() const;
};

struct TrialSample {
  int n_a = 0;
  int n_b = 0;
  int k_a = 0;
  int k_b = 0;
};

/// Binomial(n, p) by inversion of a precomputed CDF, one uniform per draw.
class BinomialSampler {
 public:
  BinomialSampler(int n, double p);
  int operator()(Stream& stream) const;

 private:
  std::vector<double> cdf_;
};

/// k_a ~ Binomial(n_a, p_a), then k_b ~ Binomial(n_b, p_b).
TrialSample simulate_trial_sample(const TrialState& state, int n_a, int n_b, Stream& stream);

/// Higher success rate wins; ties per policy (a randomized tie draws from the stream).
Treatment rule_es_trial(const TrialSample& sample, TiePolicy tie, Stream& stream);

/// One-sided pooled two-proportion z statistic for H0: p_b <= p_a; empty when
/// the pooled rate is 0 or 1.
std::optional<double> pooled_z_statistic(const TrialSample& sample);

/// Normal critical value Phi^-1(1 - alpha).
double critical_value(double alpha);

/// b iff the pooled z statistic exceeds Phi^-1(1 - alpha); a otherwise,
/// including when the statistic is undefined.
Treatment rule_np_test(const TrialSample& sample, double alpha);

struct ErrorRegret {
  double regret = 0.0;
  double expected_welfare = 0.0;
};

/// Regret and expected welfare from the probability of choosing b.
ErrorRegret regret_from_error_prob(const TrialState& state, double prob_choose_b);

enum class Rule { es, np_test };

DecisionRule<TrialSample> make_es_rule(TiePolicy tie = TiePolicy::choose_a);
DecisionRule<TrialSample> make_np_rule(double alpha = 0.05);

/// Parameters (p_a, p_b), both sampled, with fixed arm sizes.
class TrialModel {
 public:
  using Sample = TrialSample;

  TrialModel(int n_a, int n_b);

  std::vector<std::size_t> sampled_parameters() const { return {0, 1}; }
  Sample simulate(std::span<const double> x, Stream& s) const;
  double welfare(double allocation, std::span<const double> x) const {
    return allocation * x[1] + (1.0 - allocation) * x[0];
  }
  double optimum(std::span<const double> x) const { return std::max(x[0], x[1]); }

  /// Per-state sampler with both arms' CDFs precomputed.
  auto sampler(std::span<const double> x) const {
    return [na = n_a_, nb = n_b_, a = BinomialSampler(n_a_, x[0]), b = BinomialSampler(n_b_, x[1])](Stream& s) {
      TrialSample out{na, nb, 0, 0};
      out.k_a = a(s);
      out.k_b = b(s);
      return out;
    };
  }

  std::vector<std::vector<double>> unit_probabilities(std::span<const double> x) const;
  Sample assemble(std::span<const std::uint8_t> cfg, std::span<const double> x) const;

 private:
  int n_a_;
  int n_b_;
};

StateGrid trial_grid(const std::vector<double>& values);

struct TrialComparison {
  GridResult es;
  GridResult np;
  bool exact = false;
};

/// Maximum regret of the ES and test rules over a (p_a, p_b) grid with a
/// balanced design. Exact enumeration is used when 2 n_per_arm <= 12.
TrialComparison compare_max_regret(int n_per_arm, double alpha, std::size_t grid_count,
                                   const ReplicationPlan& plan, SweepOptions sweep = {},
                                   TiePolicy tie = TiePolicy::choose_a);

/// Columns p_a, p_b, regret_es, regret_np, then a row of maxima.
void write_comparison_csv(std::ostream& out, const TrialComparison& c, bool full_precision = false);

}  // namespace sdt::trial
