#pragma once

// Finite decision problems: actions c in C, states s in S and a welfare
// table w(c, s). Provides the Bayes, maximin and minimax-regret criteria,
// their restrictions to a subset of states (as-if optimization over a set
// estimate), dominance checks, and ranking of decision rules by their
// state-dependent risk profiles.
//
// Ties are broken by declared order; the full tie set is always reported.
// Values are compared after rounding to 12 significant digits.

#include "sdt/types.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdt {

/// Rounds to 12 significant digits; all criterion comparisons go through it.
double comparison_key(double x);

class DecisionProblem {
 public:
  /// welfare(i, j) is the welfare of actions[i] in states[j].
  DecisionProblem(std::vector<std::string> actions, std::vector<std::string> states,
                  Matrix<> welfare);

  /// Header row holds state labels (first cell ignored); each following row
  /// is an action label and its welfare values.
  static DecisionProblem from_csv(std::istream& in);
  static DecisionProblem load_csv(const std::string& path);

  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<std::string>& states() const { return states_; }
  const Matrix<>& welfare() const { return welfare_; }

  Index action_index(std::string_view label) const;
  Index state_index(std::string_view label) const;

  /// max_d w(d, s) for every state.
  Vector<> optimum() const { return welfare_.colwise().maxCoeff().transpose(); }

 private:
  std::vector<std::string> actions_;
  std::vector<std::string> states_;
  Matrix<> welfare_;
};

/// Subjective distribution over states.
class Prior {
 public:
  explicit Prior(Vector<> weights);
  const Vector<>& weights() const { return weights_; }
  Index size() const { return weights_.size(); }

 private:
  Vector<> weights_;
};

/// State-dependent performance of one rule.
struct RiskProfile {
  std::string rule_id;
  ArrayVector<> expected_welfare;
  ArrayVector<> regret;
  ArrayVector<> mc_stderr;

  Index size() const { return expected_welfare.size(); }
};

/// Outcome of a criterion: the winner (first in order among the best), its
/// criterion value, and every label attaining that value.
struct Choice {
  std::string label;
  double value = 0.0;
  std::vector<std::string> ties;
};

enum class Criterion { bayes, maximin, mmr };

Criterion parse_criterion(const std::string& s);

/// max_d w(d, state) - w(action, state).
double regret_of_action(const DecisionProblem& problem, std::string_view action,
                        std::string_view state);

/// True iff another action has welfare >= target's in every state and > in one.
bool weakly_dominated(const DecisionProblem& problem, std::string_view target);

/// Same test on rules, comparing expected welfare state by state.
bool weakly_dominated(std::span<const RiskProfile> profiles, std::string_view target);

/// Indices of the actions that are not weakly dominated, in declared order.
std::vector<std::string> undominated_actions(const DecisionProblem& problem);

using StateSubset = std::optional<std::vector<std::string>>;

/// argmax_c sum_s prior_s w(c, s); the prior is indexed like the subset when
/// one is given, like the full state list otherwise.
Choice choose_bayes(const DecisionProblem& problem, const Prior& prior,
                    const StateSubset& subset = std::nullopt);

/// argmax_c min_s w(c, s).
Choice choose_maximin(const DecisionProblem& problem, const StateSubset& subset = std::nullopt);

/// argmin_c max_s regret(c, s); value is the minimized maximum regret.
Choice choose_mmr(const DecisionProblem& problem, const StateSubset& subset = std::nullopt);

/// Ranks rules by a criterion applied to their expected-welfare vectors.
/// optimum_per_state supplies max_d w(d, s), used for regret under mmr.
Choice rank_rules(std::span<const RiskProfile> profiles, Criterion criterion,
                  const std::optional<Prior>& prior, const Vector<>& optimum_per_state);

}  // namespace sdt
