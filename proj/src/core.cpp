#include "sdt/core.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace sdt {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

void require_unique(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw InputError(std::string(what) + " list is empty");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw InputError(std::string("duplicate ") + what + " label '" + l + "'");
  }
}

// Column indices of the subset, or all states.
std::vector<Index> state_columns(const DecisionProblem& problem, const StateSubset& subset) {
  std::vector<Index> cols;
  if (!subset) {
    cols.resize(problem.states().size());
    for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = static_cast<Index>(j);
    return cols;
  }
  if (subset->empty()) throw InputError("state subset is empty");
  for (const auto& s : *subset) cols.push_back(problem.state_index(s));
  return cols;
}

// Picks the best of scores (higher is better after sign) by comparison key.
Choice pick_best(const std::vector<std::string>& labels, const std::vector<double>& scores,
                 bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const double ki = comparison_key(scores[i]);
    const double kb = comparison_key(scores[best]);
    if (maximize ? ki > kb : ki < kb) best = i;
  }
  Choice out{labels[best], scores[best], {}};
  const double kb = comparison_key(scores[best]);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (comparison_key(scores[i]) == kb) out.ties.push_back(labels[i]);
  }
  return out;
}

bool dominates(const ArrayVector<>& lhs, const ArrayVector<>& rhs) {
  bool strict = false;
  for (Index j = 0; j < lhs.size(); ++j) {
    const double l = comparison_key(lhs[j]);
    const double r = comparison_key(rhs[j]);
    if (l < r) return false;
    if (l > r) strict = true;
  }
  return strict;
}

}  // namespace

double comparison_key(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return std::strtod(buf, nullptr);
}

DecisionProblem::DecisionProblem(std::vector<std::string> actions, std::vector<std::string> states,
                                 Matrix<> welfare)
    : actions_(std::move(actions)), states_(std::move(states)), welfare_(std::move(welfare)) {
  require_unique(actions_, "action");
  require_unique(states_, "state");
  if (welfare_.rows() != static_cast<Index>(actions_.size()) ||
      welfare_.cols() != static_cast<Index>(states_.size())) {
    throw InputError("welfare table must be actions x states");
  }
  if (!welfare_.allFinite()) throw InputError("welfare table contains non-finite values");
}

DecisionProblem DecisionProblem::from_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (!trim(line).empty()) header = split_csv_line(line);
  }
  if (header.size() < 2) throw InputError("welfare CSV needs a header with at least one state");
  std::vector<std::string> states(header.begin() + 1, header.end());

  std::vector<std::string> actions;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("welfare CSV row for '" + (cells.empty() ? std::string() : cells[0]) +
                       "' has " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    actions.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      char* end = nullptr;
      const double v = std::strtod(cells[j].c_str(), &end);
      if (cells[j].empty() || *end != '\0') {
        throw InputError("welfare CSV cell '" + cells[j] + "' is not a number");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  Matrix<> w(static_cast<Index>(rows.size()), static_cast<Index>(states.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) w(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return DecisionProblem(std::move(actions), std::move(states), std::move(w));
}

DecisionProblem DecisionProblem::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open welfare table '" + path + "'");
  return from_csv(in);
}

Index DecisionProblem::action_index(std::string_view label) const {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (actions_[i] == label) return static_cast<Index>(i);
  }
  throw InputError("unknown action '" + std::string(label) + "'");
}

Index DecisionProblem::state_index(std::string_view label) const {
  for (std::size_t j = 0; j < states_.size(); ++j) {
    if (states_[j] == label) return static_cast<Index>(j);
  }
  throw InputError("unknown state '" + std::string(label) + "'");
}

Prior::Prior(Vector<> weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw InputError("prior is empty");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw InputError("prior weights must be finite and nonnegative");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) throw InputError("prior weights must sum to 1");
}

Criterion parse_criterion(const std::string& s) {
  if (s == "bayes") return Criterion::bayes;
  if (s == "maximin") return Criterion::maximin;
  if (s == "mmr") return Criterion::mmr;
  throw InputError("unknown criterion '" + s + "'");
}

double regret_of_action(const DecisionProblem& problem, std::string_view action,
                        std::string_view state) {
  const Index i = problem.action_index(action);
  const Index j = problem.state_index(state);
  return problem.welfare().col(j).maxCoeff() - problem.welfare()(i, j);
}

bool weakly_dominated(const DecisionProblem& problem, std::string_view target) {
  const Index t = problem.action_index(target);
  if (problem.actions().size() < 2) throw InputError("dominance needs at least two actions");
  const ArrayVector<> mine = problem.welfare().row(t).transpose().array();
  for (Index i = 0; i < problem.welfare().rows(); ++i) {
    if (i == t) continue;
    if (dominates(problem.welfare().row(i).transpose().array(), mine)) return true;
  }
  return false;
}

bool weakly_dominated(std::span<const RiskProfile> profiles, std::string_view target) {
  if (profiles.size() < 2) throw InputError("dominance needs at least two rules");
  const RiskProfile* mine = nullptr;
  for (const auto& p : profiles) {
    if (p.rule_id == target) mine = &p;
  }
  if (mine == nullptr) throw InputError("unknown rule '" + std::string(target) + "'");
  for (const auto& p : profiles) {
    if (&p == mine) continue;
    if (p.size() != mine->size()) throw InputError("risk profiles cover different state lists");
    if (dominates(p.expected_welfare, mine->expected_welfare)) return true;
  }
  return false;
}

std::vector<std::string> undominated_actions(const DecisionProblem& problem) {
  std::vector<std::string> out;
  for (const auto& a : problem.actions()) {
    if (problem.actions().size() < 2 || !weakly_dominated(problem, a)) out.push_back(a);
  }
  return out;
}

Choice choose_bayes(const DecisionProblem& problem, const Prior& prior, const StateSubset& subset) {
  const auto cols = state_columns(problem, subset);
  if (prior.size() != static_cast<Index>(cols.size())) {
    throw InputError("prior has " + std::to_string(prior.size()) + " weights for " +
                     std::to_string(cols.size()) + " states");
  }
  std::vector<double> scores(problem.actions().size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) {
      scores[i] += prior.weights()[static_cast<Index>(k)] * problem.welfare()(static_cast<Index>(i), cols[k]);
    }
  }
  return pick_best(problem.actions(), scores, true);
}

Choice choose_maximin(const DecisionProblem& problem, const StateSubset& subset) {
  const auto cols = state_columns(problem, subset);
  std::vector<double> scores(problem.actions().size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double worst = problem.welfare()(static_cast<Index>(i), cols[0]);
    for (Index c : cols) worst = std::min(worst, problem.welfare()(static_cast<Index>(i), c));
    scores[i] = worst;
  }
  return pick_best(problem.actions(), scores, true);
}

Choice choose_mmr(const DecisionProblem& problem, const StateSubset& subset) {
  const auto cols = state_columns(problem, subset);
  std::vector<double> scores(problem.actions().size(), 0.0);
  for (Index c : cols) {
    const double best = problem.welfare().col(c).maxCoeff();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = std::max(scores[i], best - problem.welfare()(static_cast<Index>(i), c));
    }
  }
  return pick_best(problem.actions(), scores, false);
}

Choice rank_rules(std::span<const RiskProfile> profiles, Criterion criterion,
                  const std::optional<Prior>& prior, const Vector<>& optimum_per_state) {
  if (profiles.empty()) throw InputError("no rules to rank");
  const Index n_states = profiles.front().size();
  for (const auto& p : profiles) {
    if (p.size() != n_states) throw InputError("risk profiles cover different state lists");
  }
  std::vector<std::string> labels;
  std::vector<double> scores;
  for (const auto& p : profiles) {
    labels.push_back(p.rule_id);
    switch (criterion) {
      case Criterion::bayes:
        if (!prior) throw InputError("the bayes criterion needs a prior");
        if (prior->size() != n_states) throw InputError("prior length does not match the state list");
        scores.push_back((prior->weights().array() * p.expected_welfare).sum());
        break;
      case Criterion::maximin:
        scores.push_back(p.expected_welfare.minCoeff());
        break;
      case Criterion::mmr:
        if (optimum_per_state.size() != n_states) {
          throw InputError("optimum_per_state length does not match the state list");
        }
        scores.push_back((optimum_per_state.array() - p.expected_welfare).maxCoeff());
        break;
    }
  }
  return pick_best(labels, scores, criterion != Criterion::mmr);
}

}  // namespace sdt
