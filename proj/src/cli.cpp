#include "sdt/cli.hpp"

#include "sdt/predict.hpp"
#include "sdt/treat.hpp"
#include "sdt/trial.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sdt::cli {
namespace {

struct RunConfig {
  std::string command;
  std::string table_id;
  std::string family;
  std::string rule;
  std::string panel = "A";
  std::vector<int> n_list;
  std::vector<double> p_list;
  std::size_t grid = 0;  // 0 selects the command's default density
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::size_t replicates = 5000;
  std::uint64_t seed = 20191203;
  std::string tie = "a";
  std::string empty_arm = "tie";
  double alpha = 0.05;
  std::string out_path;
  unsigned workers = 1;
  std::string reference = SDT_REFERENCE_TABLES;
  bool no_reference = false;
  bool full_precision = false;
  bool brute_force = false;
  bool exact = false;
  std::vector<double> state;

  SweepOptions sweep() const {
    if (workers < 1) throw InputError("--workers must be at least 1");
    return {brute_force ? SweepMode::brute_force : SweepMode::separable, workers};
  }
  ReplicationPlan plan(int n) const {
    ReplicationPlan p{replicates, seed, n};
    p.validate();
    return p;
  }
  int single_n(int fallback) const {
    if (n_list.size() > 1) throw InputError("--n takes a single value for this command");
    return n_list.empty() ? fallback : n_list.front();
  }
  double single_p(double fallback) const {
    if (p_list.size() > 1) throw InputError("--p takes a single value for this command");
    return p_list.empty() ? fallback : p_list.front();
  }
};

// Writes through `emit` to --out when given, otherwise to `out`. Returns the
// stream that should carry the human-readable summary.
std::ostream& emit_csv(const RunConfig& cfg, std::ostream& out, std::ostream& err,
                       const std::function<void(std::ostream&)>& emit) {
  if (cfg.out_path.empty()) {
    emit(out);
    return err;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw InputError("cannot open '" + cfg.out_path + "' for writing");
  emit(file);
  file.close();
  if (!file) throw InputError("failed writing '" + cfg.out_path + "'");
  return out;
}

std::string format_state(const std::vector<std::string>& names, const std::vector<double>& x) {
  std::ostringstream s;
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4g", x[i]);
    s << (i ? ", " : "") << (i < names.size() ? names[i] : "x") << '=' << buf;
  }
  return s.str();
}

void apply_table_overrides(const RunConfig& cfg, TableOptions& o) {
  if (!cfg.n_list.empty()) o.n_list = cfg.n_list;
  if (!cfg.p_list.empty()) o.columns = cfg.p_list;
  if (cfg.grid) o.grid_count = cfg.grid;
  if (cfg.grid_lo) o.grid_lo = *cfg.grid_lo;
  if (cfg.grid_hi) o.grid_hi = *cfg.grid_hi;
  o.replicates = cfg.replicates;
  o.seed = cfg.seed;
  o.sweep = cfg.sweep();
}

int cmd_reproduce(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const char kind = cfg.table_id.at(0);
  const Panel panel = parse_panel(cfg.table_id.substr(1));
  CellTable table;
  TableOptions options;
  if (kind == '1' || kind == '2') {
    options = predict::default_table_options();
    apply_table_overrides(cfg, options);
    table = predict::max_mse_table(kind == '1' ? predict::Predictor::midpoint : predict::Predictor::sample_average,
                                   panel, options);
  } else {
    options = treat::default_table_options();
    apply_table_overrides(cfg, options);
    const treat::RuleOptions ro{parse_tie_policy(cfg.tie), treat::parse_empty_arm_policy(cfg.empty_arm)};
    table = treat::max_regret_table(kind == '3' ? treat::Rule::ammr : treat::Rule::es, panel, options, ro);
  }

  std::ostream& summary = emit_csv(cfg, out, err, [&](std::ostream& s) { write_table_csv(s, table, cfg.full_precision); });
  char buf[160];
  std::snprintf(buf, sizeof buf, "table %s: %zu x %zu cells, T=%zu, seed=%llu, grid=%zu values on [%g, %g]\n",
                table.id.c_str(), table.rows.size(), table.columns.size(), options.replicates,
                static_cast<unsigned long long>(options.seed), options.grid_count, options.grid_lo, options.grid_hi);
  summary << buf;
  if (!cfg.no_reference && !cfg.reference.empty() && std::filesystem::exists(cfg.reference)) {
    const auto ref = ReferenceTables::load(cfg.reference);
    if (ref.has(table.id)) {
      std::snprintf(buf, sizeof buf, "max |cell - reference| = %.4f\n", ref.max_abs_deviation(table));
      summary << buf;
    }
  }
  return ok;
}

template <class M>
int evaluate(const RunConfig& cfg, const DecisionRule<typename M::Sample>& rule, const StateGrid& grid,
             const M& model, int n_units, std::ostream& out, std::ostream& err) {
  GridResult result;
  if (!cfg.state.empty()) {
    if (cfg.state.size() != grid.dimension()) {
      std::string names;
      for (const auto& name : grid.names()) names += (names.empty() ? "" : ", ") + name;
      throw InputError("--state needs " + std::to_string(grid.dimension()) + " values (" + names + ")");
    }
    for (double v : cfg.state) require_unit_interval(v, "state value");
    result.parameter_names = grid.names();
    GridRow row{cfg.state, {}};
    row.risk = cfg.exact ? exact_risk_small(rule, std::span<const double>(row.state), model)
                         : estimate_risk(rule, std::span<const double>(row.state), cfg.plan(n_units), model);
    result.rows.push_back(std::move(row));
    detail::finish(result);
  } else if (cfg.exact) {
    result = exact_regret_over_grid(rule, grid, model, cfg.sweep().workers);
  } else {
    result = max_regret_over_grid(rule, grid, cfg.plan(n_units), model, cfg.sweep());
  }

  std::ostream& summary = emit_csv(cfg, out, err, [&](std::ostream& s) { write_grid_csv(s, result, cfg.full_precision); });
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", result.max_regret);
  summary << "rule " << rule.id << ": " << result.rows.size() << " state(s), max regret = " << buf << " at ("
          << format_state(result.parameter_names, result.argmax_row().state) << ")\n";
  return ok;
}

[[noreturn]] void mismatch(const RunConfig& cfg, const char* expected) {
  throw InputError("rule '" + cfg.rule + "' does not belong to family '" + cfg.family + "' (expected " + expected + ")");
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto values = StateGrid::uniform(cfg.grid ? cfg.grid : 11, cfg.grid_lo.value_or(0.0), cfg.grid_hi.value_or(1.0));
  const Panel panel = parse_panel(cfg.panel);
  const int n = cfg.single_n(25);
  if (n < 1) throw InputError("--n must be at least 1");

  if (cfg.family == "predict") {
    if (cfg.rule != "midpoint" && cfg.rule != "sample-average" && cfg.rule != "sample_average") {
      mismatch(cfg, "midpoint, sample-average");
    }
    const predict::MissingOutcomeModel model(cfg.single_p(0.5), n);
    return evaluate(cfg, predict::make_rule(predict::parse_predictor(cfg.rule)), predict::outcome_grid(panel, values),
                    model, n, out, err);
  }
  if (cfg.family == "bernoulli") {
    DecisionRule<predict::FixedKSample> rule;
    if (cfg.rule == "hodges-lehmann" || cfg.rule == "hodges_lehmann") {
      rule = predict::make_hodges_lehmann_rule();
    } else if (cfg.rule == "sample-mean" || cfg.rule == "sample_mean") {
      rule = predict::make_sample_mean_rule();
    } else {
      mismatch(cfg, "hodges-lehmann, sample-mean");
    }
    const predict::BernoulliMeanModel model(n);
    return evaluate(cfg, rule, StateGrid({"q"}, {values}), model, n, out, err);
  }
  if (cfg.family == "treat") {
    if (cfg.rule != "ammr" && cfg.rule != "es" && cfg.rule != "z_n" && cfg.rule != "z_nu") {
      mismatch(cfg, "ammr, es, z_n, z_nu");
    }
    const treat::RuleOptions ro{parse_tie_policy(cfg.tie), treat::parse_empty_arm_policy(cfg.empty_arm)};
    const treat::ObservationalModel model(cfg.single_p(0.5), n);
    return evaluate(cfg, treat::make_rule(treat::parse_rule(cfg.rule), ro), treat::outcome_grid(panel, values), model,
                    n, out, err);
  }
  if (cfg.family == "trial") {
    DecisionRule<trial::TrialSample> rule;
    if (cfg.rule == "es") {
      rule = trial::make_es_rule(parse_tie_policy(cfg.tie));
    } else if (cfg.rule == "np-test" || cfg.rule == "np_test") {
      rule = trial::make_np_rule(cfg.alpha);
    } else {
      mismatch(cfg, "es, np-test");
    }
    const trial::TrialModel model(n, n);
    return evaluate(cfg, rule, trial::trial_grid(values), model, 2 * n, out, err);
  }
  throw InputError("unknown problem family '" + cfg.family + "' (expected predict, bernoulli, treat or trial)");
}

int cmd_sentencing(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string report = treat::format_report(treat::sentencing_example());
  if (cfg.out_path.empty()) {
    out << report;
  } else {
    emit_csv(cfg, out, err, [&](std::ostream& s) { s << report; });
    out << "report written to " << cfg.out_path << '\n';
  }
  return ok;
}

std::string path_for_n(const std::string& path, int n, bool several) {
  if (!several) return path;
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_n" + std::to_string(n) + p.extension().string())).string();
}

int cmd_compare_trial(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{25, 50, 100} : cfg.n_list;
  const std::size_t grid = cfg.grid ? cfg.grid : 101;
  for (int n : ns) {
    const auto c = trial::compare_max_regret(n, cfg.alpha, grid, cfg.plan(2 * n), cfg.sweep(), parse_tie_policy(cfg.tie));
    RunConfig per_n = cfg;
    if (!cfg.out_path.empty()) per_n.out_path = path_for_n(cfg.out_path, n, ns.size() > 1);
    std::ostream& summary =
        emit_csv(per_n, out, err, [&](std::ostream& s) { trial::write_comparison_csv(s, c, cfg.full_precision); });
    char buf[160];
    std::snprintf(buf, sizeof buf, "n=%d per arm, alpha=%g, %zu^2 grid%s: max regret ES = %.6f, NP test = %.6f\n", n,
                  cfg.alpha, grid, c.exact ? " (exact)" : "", c.es.max_regret, c.np.max_regret);
    summary << buf;
  }
  return ok;
}

void add_common_options(CLI::App& app, RunConfig& cfg) {
  app.add_option("--replicates,-T", cfg.replicates, "Monte Carlo replicates per state")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--grid", cfg.grid, "values per outcome parameter");
  app.add_option("--grid-lo", cfg.grid_lo, "lowest outcome grid value");
  app.add_option("--grid-hi", cfg.grid_hi, "highest outcome grid value");
  app.add_option("--panel", cfg.panel, "A (unrestricted) or B (band-restricted)");
  app.add_option("--tie", cfg.tie, "tie policy: a, b or random");
  app.add_option("--empty-arm", cfg.empty_arm, "ES rule with an empty arm: tie or half");
  app.add_option("--alpha", cfg.alpha, "test size for the NP rule");
  app.add_option("--out,-o", cfg.out_path, "output CSV path");
  app.add_option("--workers,-j", cfg.workers, "worker threads");
  app.add_option("--reference", cfg.reference, "reference table CSV");
  app.add_flag("--no-reference", cfg.no_reference, "skip the reference comparison");
  app.add_flag("--full-precision", cfg.full_precision, "print full double precision");
  app.add_flag("--brute-force", cfg.brute_force, "score every grid state");
  app.add_flag("--exact", cfg.exact, "exact enumeration instead of simulation (small samples)");
  app.add_option("--n", cfg.n_list, "sample size(s)")->delimiter(',');
  app.add_option("--p", cfg.p_list, "observability rate(s) or treatment share(s)")->delimiter(',');
  app.add_option("--state", cfg.state, "single state, parameter values in order")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Statistical decision functions: risk evaluation and maximum-regret tables", "sdt"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  add_common_options(app, cfg);

  auto* reproduce = app.add_subcommand("reproduce", "compute one published maximum-regret table");
  reproduce->add_option("table", cfg.table_id, "1a, 1b, 2a, 2b, 3a, 3b, 4a or 4b")
      ->required()
      ->check(CLI::IsMember({"1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b"}));
  auto* eval = app.add_subcommand("eval", "risk of one rule at a state or over a grid");
  eval->add_option("family", cfg.family, "predict, bernoulli, treat or trial")->required();
  eval->add_option("rule", cfg.rule, "rule within the family")->required();
  auto* sentencing = app.add_subcommand("sentencing", "the sentencing and recidivism example");
  auto* compare = app.add_subcommand("compare-trial", "ES versus NP test rule in an ideal trial");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    if (reproduce->parsed()) return cmd_reproduce(cfg, out, err);
    if (eval->parsed()) return cmd_eval(cfg, out, err);
    if (sentencing->parsed()) return cmd_sentencing(cfg, out, err);
    if (compare->parsed()) return cmd_compare_trial(cfg, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return numerical;
  }
  return usage;
}

}  // namespace sdt::cli
