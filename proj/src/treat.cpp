#include "sdt/treat.hpp"

#include "sdt/core.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

namespace sdt::treat {
namespace {

double as_decision(Treatment t) { return t == Treatment::b ? 1.0 : 0.0; }

Treatment resolve_tie(TiePolicy tie, Stream& stream) {
  switch (tie) {
    case TiePolicy::choose_a: return Treatment::a;
    case TiePolicy::choose_b: return Treatment::b;
    case TiePolicy::randomize: return stream.uniform() < 0.5 ? Treatment::a : Treatment::b;
  }
  return Treatment::a;
}

double tie_expectation(TiePolicy tie) {
  switch (tie) {
    case TiePolicy::choose_a: return 0.0;
    case TiePolicy::choose_b: return 1.0;
    case TiePolicy::randomize: return 0.5;
  }
  return 0.0;
}

// Sign of z_N - 1/2 from integers: 2 (S_b - S_a + N_a) - N.
int ammr_sign(const ObservationalSummary& s) {
  const long twice = 2L * (s.successes_b - s.successes_a + s.n_a()) - s.n;
  return (twice > 0) - (twice < 0);
}

// Sign of mean_b - mean_a, or nullopt when the policy leaves no comparison.
std::optional<int> es_sign(const ObservationalSummary& s, EmptyArmPolicy empty) {
  if (s.empty(Treatment::a) || s.empty(Treatment::b)) {
    if (empty == EmptyArmPolicy::tie) return std::nullopt;
    if (s.empty(Treatment::a) && s.empty(Treatment::b)) return 0;
    if (s.empty(Treatment::a)) {
      const long d = 2L * s.successes_b - s.k_b;  // mean_b vs 1/2
      return (d > 0) - (d < 0);
    }
    const long d = s.n_a() - 2L * s.successes_a;  // 1/2 vs mean_a
    return (d > 0) - (d < 0);
  }
  const long d = static_cast<long>(s.successes_b) * s.n_a() - static_cast<long>(s.successes_a) * s.k_b;
  return (d > 0) - (d < 0);
}

}  // namespace

void TreatmentState::validate() const {
  require_unit_interval(e_a1, "e_a1");
  require_unit_interval(e_a0, "e_a0");
  require_unit_interval(e_b1, "e_b1");
  require_unit_interval(e_b0, "e_b0");
  require_unit_interval(p, "p");
}

ObservationalSummary ObservationalSummary::of(const ObservationalSample& sample) {
  ObservationalSummary s;
  s.n = static_cast<int>(sample.treatment.size());
  for (std::size_t i = 0; i < sample.treatment.size(); ++i) {
    if (sample.treatment[i] == Treatment::b) {
      ++s.k_b;
      s.successes_b += sample.outcome[i];
    } else {
      s.successes_a += sample.outcome[i];
    }
  }
  return s;
}

ObservationalSample simulate_observational_sample(const TreatmentState& state, int n, Stream& stream) {
  state.validate();
  if (n < 1) throw InputError("sample size must be at least 1");
  ObservationalSample out;
  out.treatment.resize(static_cast<std::size_t>(n));
  out.outcome.resize(static_cast<std::size_t>(n));
  const auto to_b = Stream::bernoulli_threshold(state.p);
  for (auto& t : out.treatment) t = stream.below(to_b) ? Treatment::b : Treatment::a;
  const auto success_b = Stream::bernoulli_threshold(state.e_b1);
  for (std::size_t i = 0; i < out.treatment.size(); ++i) {
    if (out.treatment[i] == Treatment::b) out.outcome[i] = stream.below(success_b);
  }
  const auto success_a = Stream::bernoulli_threshold(state.e_a1);
  for (std::size_t i = 0; i < out.treatment.size(); ++i) {
    if (out.treatment[i] == Treatment::a) out.outcome[i] = stream.below(success_a);
  }
  return out;
}

ObservationalSummary draw_observational_summary(const TreatmentState& state, int n, Stream& stream) {
  ObservationalSummary s;
  s.n = n;
  const auto to_b = Stream::bernoulli_threshold(state.p);
  for (int i = 0; i < n; ++i) s.k_b += stream.below(to_b);
  const auto success_b = Stream::bernoulli_threshold(state.e_b1);
  for (int i = 0; i < s.k_b; ++i) s.successes_b += stream.below(success_b);
  const auto success_a = Stream::bernoulli_threshold(state.e_a1);
  for (int i = s.k_b; i < n; ++i) s.successes_a += stream.below(success_a);
  return s;
}

double z_mmr(double e_a1, double e_b1, double p) {
  require_unit_interval(e_a1, "e_a1");
  require_unit_interval(e_b1, "e_b1");
  require_unit_interval(p, "p");
  return e_b1 * p + (1.0 - e_a1) * (1.0 - p);
}

double fractional_max_regret(double z, double e_a1, double e_b1, double p) {
  require_unit_interval(z, "allocation");
  double worst = 0.0;
  for (double e_a0 : {0.0, 1.0}) {
    for (double e_b0 : {0.0, 1.0}) {
      const TreatmentState s{e_a1, e_a0, e_b1, e_b0, p};
      s.validate();
      const double ea = s.mean_a();
      const double eb = s.mean_b();
      worst = std::max(worst, std::max(ea, eb) - z * eb - (1.0 - z) * ea);
    }
  }
  return worst;
}

SingletonChoice singleton_mmr_choice(double e_a1, double e_b1, double p) {
  const double z = z_mmr(e_a1, e_b1, p);
  SingletonChoice out;
  out.max_regret_a = z;
  out.max_regret_b = 1.0 - z;
  const double key = comparison_key(z);
  out.tie = key == 0.5;
  out.choice = key > 0.5 ? Treatment::b : Treatment::a;
  return out;
}

Treatment rule_es_known(double e_a1, double e_b1, Treatment on_tie) {
  require_unit_interval(e_a1, "e_a1");
  require_unit_interval(e_b1, "e_b1");
  if (e_b1 > e_a1) return Treatment::b;
  if (e_a1 > e_b1) return Treatment::a;
  return on_tie;
}

double singleton_max_regret(Treatment choice, double e_a1, double e_b1, double p) {
  return fractional_max_regret(as_decision(choice), e_a1, e_b1, p);
}

double rule_z_n(const ObservationalSummary& s) {
  if (s.n < 1) throw InputError("empty sample");
  return static_cast<double>(s.successes_b - s.successes_a + s.n_a()) / s.n;
}

Treatment rule_z_nu(const ObservationalSummary& s, Stream& stream) {
  const double z = rule_z_n(s);
  return stream.uniform_open_closed() <= z ? Treatment::b : Treatment::a;
}

Treatment rule_ammr(const ObservationalSummary& s, TiePolicy tie, Stream& stream) {
  const int sign = ammr_sign(s);
  if (sign > 0) return Treatment::b;
  if (sign < 0) return Treatment::a;
  return resolve_tie(tie, stream);
}

EmptyArmPolicy parse_empty_arm_policy(const std::string& s) {
  if (s == "tie") return EmptyArmPolicy::tie;
  if (s == "half") return EmptyArmPolicy::half;
  throw InputError("unknown empty-arm policy '" + s + "' (expected tie or half)");
}

std::string to_string(EmptyArmPolicy p) { return p == EmptyArmPolicy::tie ? "tie" : "half"; }

Treatment rule_es_observational(const ObservationalSummary& s, TiePolicy tie, Stream& stream,
                                EmptyArmPolicy empty) {
  const auto sign = es_sign(s, empty);
  if (sign && *sign > 0) return Treatment::b;
  if (sign && *sign < 0) return Treatment::a;
  return resolve_tie(tie, stream);
}

Rule parse_rule(const std::string& s) {
  if (s == "ammr") return Rule::ammr;
  if (s == "es") return Rule::es;
  if (s == "z_n" || s == "zn" || s == "z-n") return Rule::z_n;
  if (s == "z_nu" || s == "znu" || s == "z-nu") return Rule::z_nu;
  throw InputError("unknown treatment rule '" + s + "'");
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::ammr: return "ammr";
    case Rule::es: return "es";
    case Rule::z_n: return "z_n";
    case Rule::z_nu: return "z_nu";
  }
  return "?";
}

DecisionRule<ObservationalSummary> make_rule(Rule rule, RuleOptions options) {
  DecisionRule<ObservationalSummary> out;
  out.id = to_string(rule);
  const TiePolicy tie = options.tie;
  const EmptyArmPolicy empty = options.empty_arm;
  switch (rule) {
    case Rule::ammr:
      out.decide = [tie](const ObservationalSummary& s, Stream& st) { return as_decision(rule_ammr(s, tie, st)); };
      out.randomized = tie == TiePolicy::randomize;
      out.expected_decision = [tie](const ObservationalSummary& s) {
        const int sign = ammr_sign(s);
        return sign > 0 ? 1.0 : sign < 0 ? 0.0 : tie_expectation(tie);
      };
      break;
    case Rule::es:
      out.decide = [tie, empty](const ObservationalSummary& s, Stream& st) {
        return as_decision(rule_es_observational(s, tie, st, empty));
      };
      out.randomized = tie == TiePolicy::randomize;
      out.expected_decision = [tie, empty](const ObservationalSummary& s) {
        const auto sign = es_sign(s, empty);
        if (sign && *sign != 0) return *sign > 0 ? 1.0 : 0.0;
        return tie_expectation(tie);
      };
      break;
    case Rule::z_n:
      out.decide = [](const ObservationalSummary& s, Stream&) { return rule_z_n(s); };
      break;
    case Rule::z_nu:
      out.decide = [](const ObservationalSummary& s, Stream& st) { return as_decision(rule_z_nu(s, st)); };
      out.randomized = true;
      out.expected_decision = [](const ObservationalSummary& s) { return rule_z_n(s); };
      break;
  }
  return out;
}

ObservationalModel::ObservationalModel(double p, int n) : p_(p), n_(n) {
  require_unit_interval(p, "p");
  if (n < 1) throw InputError("sample size must be at least 1");
}

ObservationalSummary ObservationalModel::simulate(std::span<const double> x, Stream& s) const {
  return draw_observational_summary(state(x), n_, s);
}

double ObservationalModel::welfare(double allocation, std::span<const double> x) const {
  const TreatmentState s = state(x);
  return allocation * s.mean_b() + (1.0 - allocation) * s.mean_a();
}

double ObservationalModel::optimum(std::span<const double> x) const {
  const TreatmentState s = state(x);
  return std::max(s.mean_a(), s.mean_b());
}

std::vector<std::vector<double>> ObservationalModel::unit_probabilities(std::span<const double> x) const {
  const double e_a1 = x[0];
  const double e_b1 = x[2];
  // (a, 0), (a, 1), (b, 0), (b, 1)
  return std::vector<std::vector<double>>(
      static_cast<std::size_t>(n_),
      {(1.0 - p_) * (1.0 - e_a1), (1.0 - p_) * e_a1, p_ * (1.0 - e_b1), p_ * e_b1});
}

ObservationalSummary ObservationalModel::assemble(std::span<const std::uint8_t> cfg,
                                                  std::span<const double>) const {
  ObservationalSummary s;
  s.n = static_cast<int>(cfg.size());
  for (auto c : cfg) {
    if (c >= 2) {
      ++s.k_b;
      s.successes_b += c == 3;
    } else {
      s.successes_a += c == 1;
    }
  }
  return s;
}

StateGrid outcome_grid(Panel panel, const std::vector<double>& values) {
  StateGrid::Constraint constraint;
  if (panel == Panel::B) {
    constraint = [a = StateGrid::band(0, 1, 0.5), b = StateGrid::band(2, 3, 0.5)](std::span<const double> x) {
      return a(x) && b(x);
    };
  }
  return StateGrid({"e_a1", "e_a0", "e_b1", "e_b0"}, {values, values, values, values}, constraint);
}

TableOptions default_table_options() {
  TableOptions o;
  o.n_list = {25, 50, 75, 100};
  o.columns = {0.5, 0.6, 0.7, 0.8, 0.9};
  o.grid_count = 25;
  o.grid_lo = 0.0;
  o.grid_hi = 1.0;
  return o;
}

CellTable max_regret_table(Rule rule, Panel panel, const TableOptions& options, RuleOptions rule_options) {
  options.validate();
  CellTable table;
  switch (rule) {
    case Rule::ammr: table.id = "3"; break;
    case Rule::es: table.id = "4"; break;
    default: table.id = to_string(rule) + "_"; break;
  }
  table.id += panel == Panel::A ? "a" : "b";
  table.column_label = "p";
  table.rows = options.n_list;
  table.columns = options.columns;
  table.argmax_names = {"e_a1", "e_a0", "e_b1", "e_b0"};
  const auto rows = static_cast<Index>(table.rows.size());
  const auto cols = static_cast<Index>(table.columns.size());
  table.value.resize(rows, cols);
  table.mc_stderr.resize(rows, cols);
  table.argmax.resize(static_cast<std::size_t>(rows * cols));

  const StateGrid grid = outcome_grid(panel, options.grid_values());
  const auto decision_rule = make_rule(rule, rule_options);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const int n = table.rows[static_cast<std::size_t>(i)];
      const double p = table.columns[static_cast<std::size_t>(j)];
      const ObservationalModel model(p, n);
      const auto result = max_regret_over_grid(decision_rule, grid, options.plan_for(n, p), model, options.sweep);
      table.value(i, j) = result.max_regret;
      table.mc_stderr(i, j) = result.argmax_row().risk.mc_stderr;
      table.argmax[static_cast<std::size_t>(i * cols + j)] = result.argmax_row().state;
    }
  }
  return table;
}

SentencingReport sentencing_example() {
  SentencingReport r;
  r.z_mmr = z_mmr(r.e_a1, r.e_b1, r.p);
  const auto singleton = singleton_mmr_choice(r.e_a1, r.e_b1, r.p);
  r.max_regret_a = singleton.max_regret_a;
  r.max_regret_b = singleton.max_regret_b;
  r.mmr_choice = singleton.choice;
  r.es_choice = rule_es_known(r.e_a1, r.e_b1);
  r.fractional_allocation = r.z_mmr;
  r.fractional_max_regret = fractional_max_regret(r.z_mmr, r.e_a1, r.e_b1, r.p);
  if (r.es_choice != r.mmr_choice) {
    std::ostringstream note;
    note << "empirical success picks " << to_char(r.es_choice) << " because "
         << (r.es_choice == Treatment::b ? "0.41 > 0.23" : "0.23 > 0.41")
         << "; that treatment has the larger maximum regret, so the rule is inferior under minimax regret";
    r.notes.push_back(note.str());
  }
  return r;
}

std::string format_report(const SentencingReport& r) {
  char buf[128];
  std::ostringstream out;
  out << "sentencing and recidivism (a = confinement, b = no confinement, success = no new offense)\n";
  std::snprintf(buf, sizeof buf, "P[y(a)=1|a] = %.2f  P[y(b)=1|b] = %.2f  p = P[b] = %.2f\n", r.e_a1, r.e_b1, r.p);
  out << buf;
  std::snprintf(buf, sizeof buf, "z_MMR = %.4f\n", r.z_mmr);
  out << buf;
  std::snprintf(buf, sizeof buf, "max regret of a = %.4f\nmax regret of b = %.4f\n", r.max_regret_a, r.max_regret_b);
  out << buf;
  out << "MMR singleton choice = " << to_char(r.mmr_choice) << '\n';
  out << "ES choice = " << to_char(r.es_choice) << '\n';
  std::snprintf(buf, sizeof buf, "fractional MMR allocation to b = %.4f, max regret = %.4f\n",
                r.fractional_allocation, r.fractional_max_regret);
  out << buf;
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  return out.str();
}

}  // namespace sdt::treat
