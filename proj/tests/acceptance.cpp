// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tables run at their defaults (T = 5000, seed 20191203).

#include "sdt/cli.hpp"
#include "sdt/predict.hpp"
#include "sdt/treat.hpp"
#include "sdt/trial.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace sdt;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const ReferenceTables& reference() {
  static const ReferenceTables ref = ReferenceTables::load(SDT_REFERENCE_TABLES);
  return ref;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Checks every reference cell of a table against a tolerance and reports
// the worst deviation.
Outcome within(const CellTable& t, double tol) {
  const double dev = reference().max_abs_deviation(t);
  return {dev <= tol, t.id + " max dev " + fmt("%.4f", dev) + " (tol " + fmt("%.3f", tol) + ")"};
}

Outcome merge(std::initializer_list<Outcome> parts) {
  Outcome o;
  for (const auto& p : parts) {
    o.pass = o.pass && p.pass;
    o.detail += (o.detail.empty() ? "" : "; ") + p.detail;
  }
  return o;
}

CellTable predict_table(predict::Predictor p, Panel panel) {
  return predict::max_mse_table(p, panel, predict::default_table_options());
}

CellTable treat_table(treat::Rule r, Panel panel) {
  return treat::max_regret_table(r, panel, treat::default_table_options());
}

Outcome c1_table_1a() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = predict_table(predict::Predictor::midpoint, Panel::A);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto o = within(t, 0.015);
  o.detail += ", " + fmt("%.1f", secs) + " s";
  return o;
}

Outcome c2_tables_1b_2a_2b() {
  return merge({within(predict_table(predict::Predictor::midpoint, Panel::B), 0.015),
                within(predict_table(predict::Predictor::sample_average, Panel::A), 0.015),
                within(predict_table(predict::Predictor::sample_average, Panel::B), 0.02)});
}

Outcome c3_tables_3a_3b() {
  return merge({within(treat_table(treat::Rule::ammr, Panel::A), 0.015),
                within(treat_table(treat::Rule::ammr, Panel::B), 0.015)});
}

Outcome c4_tables_4a_4b() {
  const auto a = treat_table(treat::Rule::es, Panel::A);
  double worst = 0.0;
  for (Index i = 0; i < a.value.rows(); ++i) {
    for (Index j = 0; j < a.value.cols(); ++j) {
      const double p = a.columns[static_cast<std::size_t>(j)];
      worst = std::max(worst, std::abs(a.value(i, j) - std::max(p, 1 - p)));
    }
  }
  const Outcome oa{worst <= 0.01, "4a max |cell - max(p, 1-p)| " + fmt("%.4f", worst) + " (tol 0.010)"};
  return merge({oa, within(treat_table(treat::Rule::es, Panel::B), 0.02)});
}

Outcome c5_sentencing() {
  const auto r = treat::sentencing_example();
  const bool ok = std::abs(r.z_mmr - 0.4496) <= 1e-12 && std::abs(r.max_regret_a - 0.4496) <= 1e-12 &&
                  std::abs(r.max_regret_b - 0.5504) <= 1e-12 && r.mmr_choice == Treatment::a;
  return {ok, "z_MMR " + fmt("%.17g", r.z_mmr) + ", max regrets (" + fmt("%.17g", r.max_regret_a) + ", " +
                  fmt("%.17g", r.max_regret_b) + "), choice " + to_char(r.mmr_choice)};
}

Outcome c6_known_p_midpoint() {
  const auto v = StateGrid::uniform(101);
  const StateGrid grid({"q1", "q0"}, {v, v});
  Outcome o;
  double worst_z = 0.0;
  int cells = 0;
  for (int k : {10, 25, 50}) {
    for (int i = 2; i <= 10; ++i) {
      const double p = i / 10.0;
      const predict::KnownRateModel model(p, k);
      const auto r = max_regret_over_grid(predict::make_known_rate_midpoint_rule(p), grid,
                                          ReplicationPlan{5000, 20191203, k}, model);
      const double z = std::abs(r.max_regret - predict::midpoint_max_regret_known_p(p, k)) / r.argmax_row().risk.mc_stderr;
      worst_z = std::max(worst_z, z);
      o.pass = o.pass && z <= 3.0;
      ++cells;
    }
  }
  o.detail = std::to_string(cells) + " cells, worst |MC - formula| = " + fmt("%.2f", worst_z) + " stderr (tol 3)";
  return o;
}

Outcome c7_hodges_lehmann() {
  double worst = 0.0;
  for (int n : {2, 4, 9}) {
    const double expected = 0.25 / std::pow(std::sqrt(static_cast<double>(n)) + 1.0, 2);
    const predict::BernoulliMeanModel model(n);
    for (int i = 0; i <= 10; ++i) {
      const std::vector<double> q{i / 10.0};
      const auto r = exact_risk_small(predict::make_hodges_lehmann_rule(), std::span<const double>(q), model);
      worst = std::max(worst, std::abs(r.regret - expected));
    }
  }
  return {worst <= 1e-12, "worst |MSE - 1/4/(sqrt(N)+1)^2| = " + fmt("%.2e", worst)};
}

Outcome c8_unbiased_z_n() {
  const auto rule = treat::make_rule(treat::Rule::z_n);
  double worst = 0.0;
  int states = 0;
  for (double p : {0.2, 0.5, 0.8}) {
    const treat::ObservationalModel model(p, 25);
    for (double ea : {0.2, 0.5, 0.8}) {
      for (double eb : {0.2, 0.5, 0.8}) {
        const std::vector<double> x{ea, 0.0, eb, 0.0};
        const auto d = simulate_decisions(simulator_for(model, std::span<const double>(x)), rule.decide,
                                          ReplicationPlan{100000, 20191203, 25}, static_cast<std::uint64_t>(states));
        const auto r = score_decisions(std::span<const double>(d), [](double z) { return z; }, 1.0);
        worst = std::max(worst, std::abs(r.expected_welfare - treat::z_mmr(ea, eb, p)) / r.mc_stderr);
        ++states;
      }
    }
  }
  return {worst <= 4.0, std::to_string(states) + " states, worst |mean z_N - z_MMR| = " + fmt("%.2f", worst) +
                            " stderr (tol 4)"};
}

Outcome c9_oracle_equivalence() {
  const ReplicationPlan plan{5000, 20191203, 1};
  int pairs = 0, bad = 0;
  const auto oracle = [&](const auto& rule, const auto& model, const StateGrid& grid) {
    const auto admitted = grid.admitted();
    const std::size_t dim = grid.dimension();
    for (std::size_t s = 0; s < admitted.size() / dim; ++s) {
      const auto x = grid.point(std::span<const std::uint32_t>(admitted.data() + s * dim, dim));
      const auto mc = estimate_risk(rule, std::span<const double>(x), plan, model, s);
      const auto ex = exact_risk_small(rule, std::span<const double>(x), model);
      ++pairs;
      bad += std::abs(mc.regret - ex.regret) > 4 * mc.mc_stderr + 1e-12;
    }
  };
  const auto v = StateGrid::uniform(3);
  for (auto rule : {treat::Rule::ammr, treat::Rule::es, treat::Rule::z_n, treat::Rule::z_nu}) {
    oracle(treat::make_rule(rule), treat::ObservationalModel(0.6, 6), treat::outcome_grid(Panel::B, v));
  }
  for (auto pred : {predict::Predictor::midpoint, predict::Predictor::sample_average}) {
    oracle(predict::make_rule(pred), predict::MissingOutcomeModel(0.5, 6), predict::outcome_grid(Panel::A, v));
  }
  oracle(predict::make_hodges_lehmann_rule(), predict::BernoulliMeanModel(9), StateGrid({"q"}, {StateGrid::uniform(5)}));
  oracle(predict::make_sample_mean_rule(), predict::BernoulliMeanModel(9), StateGrid({"q"}, {StateGrid::uniform(5)}));
  oracle(predict::make_known_rate_midpoint_rule(0.7), predict::KnownRateModel(0.7, 8), predict::outcome_grid(Panel::A, v));
  oracle(trial::make_es_rule(), trial::TrialModel(6, 6), trial::trial_grid(StateGrid::uniform(5)));
  oracle(trial::make_np_rule(0.05), trial::TrialModel(6, 6), trial::trial_grid(StateGrid::uniform(5)));
  Outcome mc{bad == 0, std::to_string(pairs - bad) + "/" + std::to_string(pairs) + " rule-state pairs within 4 stderr"};

  // Separable and brute-force tables on a 5-value grid, bit for bit.
  bool equal = true;
  auto po = predict::default_table_options();
  po.n_list = {10, 25};
  po.columns = {0.3, 0.8};
  po.grid_count = 5;
  po.grid_lo = 0.0;
  po.grid_hi = 1.0;
  auto to = treat::default_table_options();
  to.n_list = {10, 25};
  to.columns = {0.5, 0.8};
  to.grid_count = 5;
  for (auto panel : {Panel::A, Panel::B}) {
    for (auto pred : {predict::Predictor::midpoint, predict::Predictor::sample_average}) {
      po.sweep.mode = SweepMode::brute_force;
      const auto slow = predict::max_mse_table(pred, panel, po);
      po.sweep.mode = SweepMode::separable;
      equal = equal && (slow.value.array() == predict::max_mse_table(pred, panel, po).value.array()).all();
    }
    for (auto rule : {treat::Rule::ammr, treat::Rule::es, treat::Rule::z_n, treat::Rule::z_nu}) {
      to.sweep.mode = SweepMode::brute_force;
      const auto slow = treat::max_regret_table(rule, panel, to);
      to.sweep.mode = SweepMode::separable;
      equal = equal && (slow.value.array() == treat::max_regret_table(rule, panel, to).value.array()).all();
    }
  }
  return merge({mc, {equal, equal ? "separable tables equal brute force" : "separable tables differ from brute force"}});
}

Outcome c10_es_beats_np() {
  Outcome o;
  for (int n : {25, 50, 100}) {
    const auto c = trial::compare_max_regret(n, 0.05, 101, ReplicationPlan{});
    o.pass = o.pass && c.es.max_regret < c.np.max_regret;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + " ES " +
                fmt("%.4f", c.es.max_regret) + " < NP " + fmt("%.4f", c.np.max_regret);
  }
  return o;
}

Outcome c11_determinism() {
  const auto dir = std::filesystem::temp_directory_path();
  const auto one = dir / "sdt_acceptance_3a_w1.csv";
  const auto eight = dir / "sdt_acceptance_3a_w8.csv";
  std::ostringstream sink;
  const int r1 = cli::run({"reproduce", "3a", "--workers", "1", "--out", one.string()}, sink, sink);
  const int r8 = cli::run({"reproduce", "3a", "--workers", "8", "--out", eight.string()}, sink, sink);
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string a = slurp(one), b = slurp(eight);
  std::filesystem::remove(one);
  std::filesystem::remove(eight);
  const bool same = r1 == 0 && r8 == 0 && !a.empty() && a == b;
  return {same, same ? "workers 1 and 8 give byte-identical CSVs (" + std::to_string(a.size()) + " bytes)"
                     : "CSV outputs differ or a run failed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 table 1A reproduction", c1_table_1a},
      {"2 tables 1B, 2A, 2B reproduction", c2_tables_1b_2a_2b},
      {"3 tables 3A, 3B reproduction", c3_tables_3a_3b},
      {"4 tables 4A, 4B reproduction", c4_tables_4a_4b},
      {"5 sentencing example", c5_sentencing},
      {"6 known-p midpoint analytic maximum", c6_known_p_midpoint},
      {"7 Hodges-Lehmann constant risk", c7_hodges_lehmann},
      {"8 z_N unbiasedness", c8_unbiased_z_n},
      {"9 oracle equivalence", c9_oracle_equivalence},
      {"10 ES beats the NP test rule", c10_es_beats_np},
      {"11 determinism across worker counts", c11_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << name << "] " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
