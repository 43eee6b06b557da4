#pragma once

// Choice between treatments a and b from observational data: realized
// outcomes are seen, counterfactual ones are not. p = P[delta(b) = 1] is the
// share of the study population that received b.

#include "sdt/engine.hpp"
#include "sdt/table.hpp"

#include <string>
#include <vector>

namespace sdt::treat {

struct TreatmentState {
  double e_a1 = 0.5;  // P[y(a) = 1 | delta(a) = 1], realized
  double e_a0 = 0.5;  // P[y(a) = 1 | delta(a) = 0], counterfactual
  double e_b1 = 0.5;  // P[y(b) = 1 | delta(b) = 1], realized
  double e_b0 = 0.5;  // P[y(b) = 1 | delta(b) = 0], counterfactual
  double p = 0.5;     // P[delta(b) = 1]

  void validate() const;
  /// Population success rates by the law of iterated expectations.
  double mean_a() const { return e_a1 * (1.0 - p) + e_a0 * p; }
  double mean_b() const { return e_b1 * p + e_b0 * (1.0 - p); }
};

struct ObservationalSample {
  std::vector<Treatment> treatment;
  std::vector<std::uint8_t> outcome;
};

struct ObservationalSummary {
  int n = 0;
  int k_b = 0;  // units that received b
  int successes_a = 0;
  int successes_b = 0;

  int n_a() const { return n - k_b; }
  bool empty(Treatment t) const { return t == Treatment::a ? n_a() == 0 : k_b == 0; }
  /// Arm success rates; 1/2 for an empty arm.
  double mean_a() const { return n_a() > 0 ? static_cast<double>(successes_a) / n_a() : 0.5; }
  double mean_b() const { return k_b > 0 ? static_cast<double>(successes_b) / k_b : 0.5; }
  double p_n() const { return static_cast<double>(k_b) / n; }

  static ObservationalSummary of(const ObservationalSample& sample);
};

/// N treatment indicators, then outcomes for the b units (in unit order),
/// then outcomes for the a units.
ObservationalSample simulate_observational_sample(const TreatmentState& state, int n, Stream& stream);

/// Same draws as simulate_observational_sample, summarized.
ObservationalSummary draw_observational_summary(const TreatmentState& state, int n, Stream& stream);

/// Minimax-regret fractional allocation to b with known realized outcomes.
double z_mmr(double e_a1, double e_b1, double p);

/// Maximum regret of allocation z over the counterfactual corners.
double fractional_max_regret(double z, double e_a1, double e_b1, double p);

struct SingletonChoice {
  Treatment choice = Treatment::a;
  double max_regret_a = 0.0;  // = z_mmr
  double max_regret_b = 0.0;  // = 1 - z_mmr
  bool tie = false;
};

SingletonChoice singleton_mmr_choice(double e_a1, double e_b1, double p);

/// Empirical success with known realized outcome distributions.
Treatment rule_es_known(double e_a1, double e_b1, Treatment on_tie = Treatment::a);

/// Maximum regret of a fixed singleton choice over the counterfactual corners.
double singleton_max_regret(Treatment choice, double e_a1, double e_b1, double p);

/// Sample analog of z_mmr, computed as (S_b - S_a + N_a) / N.
double rule_z_n(const ObservationalSummary& sample);

/// b iff u <= z_N for u uniform on (0, 1] drawn from the stream.
Treatment rule_z_nu(const ObservationalSummary& sample, Stream& stream);

/// b iff z_N > 1/2, a iff z_N < 1/2, tie policy at exactly 1/2.
Treatment rule_ammr(const ObservationalSummary& sample, TiePolicy tie, Stream& stream);

/// How the empirical-success rule treats an arm with no observations.
enum class EmptyArmPolicy {
  /// No comparison is possible; the tie policy decides.
  tie,
  /// The empty arm's mean is taken to be 1/2.
  half,
};

EmptyArmPolicy parse_empty_arm_policy(const std::string& s);
std::string to_string(EmptyArmPolicy p);

/// Higher observed success rate wins; ties and empty arms per policy.
Treatment rule_es_observational(const ObservationalSummary& sample, TiePolicy tie, Stream& stream,
                                EmptyArmPolicy empty = EmptyArmPolicy::tie);

enum class Rule { ammr, es, z_n, z_nu };

Rule parse_rule(const std::string& s);
std::string to_string(Rule r);

struct RuleOptions {
  TiePolicy tie = TiePolicy::choose_a;
  EmptyArmPolicy empty_arm = EmptyArmPolicy::tie;
};

DecisionRule<ObservationalSummary> make_rule(Rule rule, RuleOptions options = {});

/// Parameters (e_a1, e_a0, e_b1, e_b0) at fixed p and N; e_a1 and e_b1 are
/// sampled, and regret is convex in the counterfactual pair.
class ObservationalModel {
 public:
  using Sample = ObservationalSummary;
  static constexpr bool regret_convex_in_unsampled = true;

  ObservationalModel(double p, int n);

  std::vector<std::size_t> sampled_parameters() const { return {0, 2}; }
  Sample simulate(std::span<const double> x, Stream& s) const;
  double welfare(double allocation, std::span<const double> x) const;
  double optimum(std::span<const double> x) const;

  std::vector<std::vector<double>> unit_probabilities(std::span<const double> x) const;
  Sample assemble(std::span<const std::uint8_t> cfg, std::span<const double> x) const;

  TreatmentState state(std::span<const double> x) const { return {x[0], x[1], x[2], x[3], p_}; }

 private:
  double p_;
  int n_;
};

/// (e_a1, e_a0, e_b1, e_b0) grid; panel B keeps |e_t1 - e_t0| <= 1/2 per arm.
StateGrid outcome_grid(Panel panel, const std::vector<double>& values);

/// Rows N in {25, 50, 75, 100}, columns p in {0.5, ..., 0.9}, 25 values per
/// outcome parameter from 0 to 1 in steps of 1/24, so the panel B band edge
/// of 1/2 lies on the grid.
TableOptions default_table_options();

/// Maximum estimated regret per (N, p) cell.
CellTable max_regret_table(Rule rule, Panel panel, const TableOptions& options, RuleOptions rule_options = {});

struct SentencingReport {
  double e_a1 = 0.23;
  double e_b1 = 0.41;
  double p = 0.89;
  double z_mmr = 0.0;
  double max_regret_a = 0.0;
  double max_regret_b = 0.0;
  Treatment mmr_choice = Treatment::a;
  Treatment es_choice = Treatment::a;
  double fractional_allocation = 0.0;
  double fractional_max_regret = 0.0;
  std::vector<std::string> notes;
};

/// Confinement (a) versus no confinement (b) with success = no new offense:
/// P[y(a) | confined] = 0.23, P[y(b) | not confined] = 0.41, p = 0.89.
SentencingReport sentencing_example();

std::string format_report(const SentencingReport& report);

}  // namespace sdt::treat
