#include "sdt/treat.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sdt;
using namespace sdt::treat;

TEST_CASE("z_mmr and its regret") {
  CHECK(z_mmr(0.23, 0.41, 0.89) == doctest::Approx(0.4496).epsilon(1e-12));
  CHECK(z_mmr(0.5, 0.5, 0.3) == doctest::Approx(0.5));
  CHECK(z_mmr(1.0, 0.0, 0.5) == 0.0);

  const double z = z_mmr(0.23, 0.41, 0.89);
  CHECK(fractional_max_regret(z, 0.23, 0.41, 0.89) == doctest::Approx(z * (1 - z)).epsilon(1e-12));
  CHECK(fractional_max_regret(z_mmr(0.5, 0.5, 0.5), 0.5, 0.5, 0.5) == doctest::Approx(0.25));
  // All of a: the worst corner has b succeeding everywhere and a failing where it is unseen.
  CHECK(fractional_max_regret(0.0, 0.4, 0.6, 0.5) == doctest::Approx(0.6 * 0.5 + 0.5 - 0.4 * 0.5));
}

TEST_CASE("singleton minimax-regret choice") {
  auto c = singleton_mmr_choice(0.23, 0.41, 0.89);
  CHECK(c.choice == Treatment::a);
  CHECK(c.max_regret_a == doctest::Approx(0.4496).epsilon(1e-12));
  CHECK(c.max_regret_b == doctest::Approx(0.5504).epsilon(1e-12));
  CHECK_FALSE(c.tie);

  c = singleton_mmr_choice(0.5, 0.5, 0.5);
  CHECK(c.tie);
  CHECK(c.choice == Treatment::a);

  c = singleton_mmr_choice(0.0, 1.0, 0.5);
  CHECK(c.choice == Treatment::b);
  CHECK(c.max_regret_a == 1.0);
  CHECK(c.max_regret_b == 0.0);
}

TEST_CASE("empirical success with known realized outcomes") {
  CHECK(rule_es_known(0.23, 0.41) == Treatment::b);
  CHECK(rule_es_known(0.41, 0.23) == Treatment::a);
  CHECK(rule_es_known(0.3, 0.3) == Treatment::a);
  CHECK(rule_es_known(0.3, 0.3, Treatment::b) == Treatment::b);

  for (double ea : {0.1, 0.3, 0.6}) {
    for (double eb : {0.2, 0.5, 0.9}) {
      for (double p : {0.2, 0.5, 0.8}) {
        const double z = z_mmr(ea, eb, p);
        const auto choice = rule_es_known(ea, eb);
        CHECK(singleton_max_regret(choice, ea, eb, p) == doctest::Approx(choice == Treatment::a ? z : 1 - z));
      }
    }
  }
}

TEST_CASE("z_N and the rules built on it") {
  const ObservationalSummary two{2, 1, 0, 1};
  CHECK(rule_z_n(two) == 1.0);

  const ObservationalSummary all_b{4, 4, 0, 2};
  CHECK(all_b.empty(Treatment::a));
  CHECK(rule_z_n(all_b) == 0.5);

  for (int ka = 0; ka <= 1; ++ka) {
    for (int kb = 0; kb <= 1; ++kb) {
      const ObservationalSummary one{1, kb, kb ? 0 : ka, kb ? ka : 0};
      const double z = rule_z_n(one);
      CHECK((z == 0.0 || z == 1.0));
      auto st = derive_stream(1, 0, 0);
      CHECK((rule_ammr(one, TiePolicy::choose_a, st) == Treatment::b) == (z == 1.0));
    }
  }

  auto st = derive_stream(1, 0, 0);
  const ObservationalSummary high{4, 4, 0, 4};  // z = 1
  const ObservationalSummary low{4, 0, 4, 0};   // z = 0
  for (int i = 0; i < 200; ++i) {
    CHECK(rule_z_nu(high, st) == Treatment::b);
    CHECK(rule_z_nu(low, st) == Treatment::a);
  }
  const ObservationalSummary mid{4, 2, 1, 1};  // z = 0.5
  CHECK(rule_z_n(mid) == 0.5);
  int b = 0;
  for (std::uint32_t r = 0; r < 100000; ++r) {
    auto s = derive_stream(77, 0, r);
    b += rule_z_nu(mid, s) == Treatment::b;
  }
  CHECK(std::abs(b / 1e5 - 0.5) < 0.01);

  CHECK(rule_ammr(mid, TiePolicy::choose_a, st) == Treatment::a);
  CHECK(rule_ammr(mid, TiePolicy::choose_b, st) == Treatment::b);
  CHECK(rule_ammr(ObservationalSummary{5, 1, 4, 0}, TiePolicy::choose_a, st) == Treatment::a);
}

TEST_CASE("observational empirical success rule") {
  auto st = derive_stream(1, 0, 0);
  CHECK(rule_es_observational({10, 5, 1, 4}, TiePolicy::choose_a, st) == Treatment::b);
  CHECK(rule_es_observational({10, 5, 2, 2}, TiePolicy::choose_a, st) == Treatment::a);
  CHECK(rule_es_observational({10, 5, 2, 2}, TiePolicy::choose_b, st) == Treatment::b);

  const ObservationalSummary a_empty{10, 10, 0, 9};
  CHECK(rule_es_observational(a_empty, TiePolicy::choose_a, st, EmptyArmPolicy::half) == Treatment::b);
  CHECK(rule_es_observational(a_empty, TiePolicy::choose_a, st, EmptyArmPolicy::tie) == Treatment::a);
  const ObservationalSummary b_empty{10, 0, 1, 0};
  CHECK(rule_es_observational(b_empty, TiePolicy::choose_a, st, EmptyArmPolicy::half) == Treatment::b);
  CHECK(rule_es_observational(b_empty, TiePolicy::choose_a, st, EmptyArmPolicy::tie) == Treatment::a);
  CHECK(parse_empty_arm_policy("half") == EmptyArmPolicy::half);
  CHECK_THROWS_AS(parse_empty_arm_policy("zero"), InputError);
}

TEST_CASE("simulated observational samples") {
  auto st = derive_stream(3, 0, 0);
  const auto s = simulate_observational_sample({0.5, 0.5, 1.0, 0.0, 1.0}, 20, st);
  for (std::size_t i = 0; i < s.treatment.size(); ++i) {
    CHECK(s.treatment[i] == Treatment::b);
    CHECK(s.outcome[i] == 1);
  }
  for (std::uint32_t r = 0; r < 50; ++r) {
    auto a = derive_stream(8, 1, r);
    auto b = derive_stream(8, 1, r);
    const TreatmentState x{0.3, 0.9, 0.6, 0.1, 0.4};
    const auto full = ObservationalSummary::of(simulate_observational_sample(x, 15, a));
    const auto fast = draw_observational_summary(x, 15, b);
    CHECK(full.k_b == fast.k_b);
    CHECK(full.successes_a == fast.successes_a);
    CHECK(full.successes_b == fast.successes_b);
  }
  CHECK_THROWS_AS(simulate_observational_sample({0.5, 0.5, 0.5, 0.5, 0.5}, 0, st), InputError);
}

TEST_CASE("z_N is unbiased for z_mmr") {
  const ObservationalModel model(0.3, 20);
  const auto rule = make_rule(Rule::z_n);
  for (double ea : {0.2, 0.7}) {
    for (double eb : {0.4, 0.9}) {
      const std::vector<double> x{ea, 0.0, eb, 0.0};
      const auto samples = simulate_decisions(simulator_for(model, std::span<const double>(x)), rule.decide,
                                              ReplicationPlan{20000, 5, 20}, 0);
      const auto r = score_decisions(std::span<const double>(samples), [](double d) { return d; }, 1.0);
      CHECK(std::abs(r.expected_welfare - z_mmr(ea, eb, 0.3)) <= 4 * r.mc_stderr);
    }
  }
}

TEST_CASE("z_Nu chooses b as often as z_N says") {
  const ObservationalModel model(0.6, 10);
  const std::vector<double> x{0.35, 0.0, 0.55, 0.0};
  const ReplicationPlan plan{20000, 9, 10};
  const auto sim = simulator_for(model, std::span<const double>(x));
  const auto zn = simulate_decisions(sim, make_rule(Rule::z_n).decide, plan, 0);
  const auto znu = simulate_decisions(sim, make_rule(Rule::z_nu).decide, plan, 0);
  const auto id = [](double d) { return d; };
  const auto a = score_decisions(std::span<const double>(zn), id, 1.0);
  const auto b = score_decisions(std::span<const double>(znu), id, 1.0);
  CHECK(std::abs(a.expected_welfare - b.expected_welfare) <= 4 * std::hypot(a.mc_stderr, b.mc_stderr));
}

TEST_CASE("relabeling the arms mirrors every rule") {
  const auto v = StateGrid::uniform(3);
  for (auto rule : {Rule::ammr, Rule::es, Rule::z_n, Rule::z_nu}) {
    const auto here = make_rule(rule, {TiePolicy::choose_a, EmptyArmPolicy::tie});
    const auto there = make_rule(rule, {TiePolicy::choose_b, EmptyArmPolicy::tie});
    for (double p : {0.3, 0.5}) {
      const ObservationalModel m(p, 4);
      const ObservationalModel mirrored(1 - p, 4);
      for (double ea1 : v) {
        for (double ea0 : v) {
          for (double eb1 : v) {
            for (double eb0 : v) {
              const std::vector<double> x{ea1, ea0, eb1, eb0};
              const std::vector<double> y{eb1, eb0, ea1, ea0};
              CHECK(exact_risk_small(here, std::span<const double>(x), m).regret ==
                    doctest::Approx(exact_risk_small(there, std::span<const double>(y), mirrored).regret)
                        .epsilon(1e-12));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("AMMR max regret grows with N") {
  auto o = default_table_options();
  o.n_list = {1, 5, 20};
  o.columns = {0.5};
  o.grid_count = 9;
  o.replicates = 2000;
  const auto t = max_regret_table(Rule::ammr, Panel::A, o);
  CHECK(t.value(0, 0) == doctest::Approx(0.25).epsilon(0.08));
  CHECK(t.value(1, 0) > t.value(0, 0) - 2 * t.mc_stderr(1, 0));
  CHECK(t.value(2, 0) > t.value(1, 0) - 2 * t.mc_stderr(2, 0));
  CHECK(t.value(2, 0) < 0.5);
}

TEST_CASE("table options and ids") {
  const auto d = default_table_options();
  CHECK(d.grid_count == 25);
  CHECK(d.grid_values()[12] == 0.5);
  CHECK(d.columns == std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9});

  auto o = d;
  o.n_list = {3};
  o.columns = {0.9};
  o.grid_count = 3;
  o.replicates = 20;
  CHECK(max_regret_table(Rule::es, Panel::B, o).id == "4b");
  CHECK(max_regret_table(Rule::ammr, Panel::A, o).id == "3a");
  CHECK(parse_rule("z_nu") == Rule::z_nu);
  CHECK_THROWS_AS(parse_rule("minimax"), InputError);
}

TEST_CASE("sentencing example") {
  const auto r = sentencing_example();
  CHECK(std::abs(r.z_mmr - 0.4496) <= 1e-12);
  CHECK(std::abs(r.max_regret_a - 0.4496) <= 1e-12);
  CHECK(std::abs(r.max_regret_b - 0.5504) <= 1e-12);
  CHECK(r.mmr_choice == Treatment::a);
  CHECK(r.es_choice == Treatment::b);
  CHECK(r.fractional_max_regret == doctest::Approx(0.4496 * 0.5504).epsilon(1e-12));
  REQUIRE(r.notes.size() == 1);

  const auto text = format_report(r);
  CHECK(text.find("z_MMR = 0.4496") != std::string::npos);
  CHECK(text.find("MMR singleton choice = a") != std::string::npos);
  CHECK(text.find("max regret = 0.2475") != std::string::npos);
}
