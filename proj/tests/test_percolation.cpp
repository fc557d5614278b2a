#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "driftzero/errors.hpp"
#include "driftzero/percolation.hpp"

using namespace dz;

TEST_CASE("galton-watson survival closed form") {
  CHECK(gw_survival(0.5) == 0.0);
  CHECK(gw_survival(0.2) == 0.0);
  CHECK(gw_survival(1.0) == 1.0);
  // Fixed-point oracle: q = (1 - p + p q)^2 iterated to convergence.
  for (double p : {0.55, 0.7, std::exp2(-0.5), 0.9}) {
    double q = 0.0;
    for (int i = 0; i < 10000; ++i) q = std::pow(1.0 - p + p * q, 2.0);
    CHECK(gw_survival(p) == doctest::Approx(1.0 - q).epsilon(1e-12));
  }
  CHECK(gw_survival(std::exp2(-0.5)) == doctest::Approx(0.8284).epsilon(1e-3));
  CHECK_THROWS_AS(gw_survival(1.5), std::invalid_argument);
}

TEST_CASE("reference schedule is clamped and its series converges") {
  const auto s = RetentionSchedule::reference(60);
  CHECK(s.clamped);
  CHECK(s.betas[0] == 0.0);  // 1/2 - 2/log2 < 0
  for (int n = 1; n <= 60; ++n) {
    CHECK(s.p(n) > 0.5);
    CHECK(s.p(n) <= 1.0);
  }
  // gamma_m strictly increasing once betas are positive.
  CHECK(s.gamma_partial(60) > s.gamma_partial(30));
  // Terms 2^{gamma_l - l/2} decay like l^{-2} (gamma_l ~ l/2 - 2 H_l / log 2),
  // so the series converges, if slowly.
  auto term = [&](int l) { return std::exp2(s.gamma_partial(l) - 0.5 * l); };
  CHECK(term(50) < 0.01);
  CHECK(term(50) / term(25) < 0.35);
  double acc = 0.0;
  for (int l = 0; l <= 50; ++l) acc += term(l);
  CHECK(acc < 50.0);
}

TEST_CASE("keep-everything schedule fills every level") {
  const auto s = RetentionSchedule::constant_beta(0.0, 8);
  const auto tree = sample_percolation(s, 8, 0.0, 1.0, {41, 0});
  for (int m = 1; m <= 8; ++m)
    CHECK(tree.levels[static_cast<std::size_t>(m - 1)].size() == (std::size_t{1} << m));
}

TEST_CASE("trees are nested and reproducible") {
  const auto s = RetentionSchedule::constant_p(0.7, 12);
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto tree = sample_percolation(s, 12, 0.0, 1.0, {42, rep});
    for (std::size_t m = 1; m < tree.levels.size(); ++m) {
      for (std::uint64_t idx : tree.levels[m]) {
        bool parent_found = false;
        for (std::uint64_t p : tree.levels[m - 1]) parent_found = parent_found || (p == idx / 2);
        CHECK(parent_found);
      }
    }
  }
  const auto a = sample_percolation(s, 12, 0.0, 1.0, {42, 7});
  const auto b = sample_percolation(s, 12, 0.0, 1.0, {42, 7});
  CHECK(a.levels == b.levels);
}

TEST_CASE("survival frequency matches the galton-watson analytics") {
  for (double p : {0.7, std::exp2(-0.5)}) {
    const auto s = RetentionSchedule::constant_p(p, 16);
    const int reps = 20000;
    int survived = 0;
    for (int rep = 0; rep < reps; ++rep)
      survived += sample_percolation(s, 16, 0.0, 1.0, {43, static_cast<std::uint64_t>(rep)})
                      .survives();
    const double est = static_cast<double>(survived) / reps;
    const double expect = gw_survival(p);  // depth-16 survival ~ ultimate survival
    CHECK(std::fabs(est - expect) < 4.0 * std::sqrt(expect * (1.0 - expect) / reps) + 0.01);
  }
}

TEST_CASE("pair retention formula and Monte Carlo cross-check") {
  const auto s = RetentionSchedule::constant_p(0.8, 8);
  CHECK(pair_retention_prob(RetentionSchedule::constant_beta(0.0, 4), 4, 2) == 1.0);
  // m=1, l=0: independent children, p^2.
  CHECK(pair_retention_prob(s, 1, 0) == doctest::Approx(0.64).epsilon(1e-12));
  CHECK_THROWS_AS(pair_retention_prob(s, 4, 4), std::invalid_argument);

  const int m = 8;
  for (int l : {0, 3, 7}) {
    // I = leftmost level-m cell, J = leftmost cell of the sibling subtree
    // branching at level l+1.
    const std::uint64_t i1 = 0;
    const std::uint64_t i2 = std::uint64_t{1} << (m - l - 1);
    const int reps = 100000;
    int both = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto tree =
          sample_percolation(s, m, 0.0, 1.0, {44, static_cast<std::uint64_t>(rep)});
      const auto& leaves = tree.levels.back();
      bool has1 = false, has2 = false;
      for (std::uint64_t idx : leaves) {
        has1 = has1 || (idx == i1);
        has2 = has2 || (idx == i2);
      }
      both += (has1 && has2);
    }
    const double est = static_cast<double>(both) / reps;
    const double expect = pair_retention_prob(s, m, l);
    CHECK(std::fabs(est - expect) < 4.0 * std::sqrt(expect * (1.0 - expect) / reps));
  }
}

TEST_CASE("hawkes joint experiment trivial schedule") {
  const auto s = RetentionSchedule::constant_beta(0.0, 6);
  const auto f = DriftFunction::constant(0.0);
  const auto report = joint_hawkes_experiment(f, s, 6, 50, {45, 0}, 10.0);
  CHECK(report.mean_y == 64.0);
  CHECK(report.prob_v_positive == 1.0);
  CHECK(report.se_y == 0.0);
}

TEST_CASE("hawkes joint experiment with the reference schedule") {
  const auto s = RetentionSchedule::reference(10);
  const auto f = DriftFunction::cantor(GammaParam(0.4));
  const auto report = joint_hawkes_experiment(f, s, 10, 4000, {46, 0});
  CHECK(report.epsilon == doctest::Approx(s.epsilon(10)));
  CHECK(report.mean_y > 0.0);
  CHECK(report.mean_y <= 2.0 + 4.0 * report.se_y);
  CHECK(report.prob_v_positive > 0.0);
  CHECK(report.second_y >= report.mean_y * report.mean_y);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(RetentionSchedule::constant_beta(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(RetentionSchedule::constant_p(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(sample_percolation(RetentionSchedule::reference(4), 8, 0.0, 1.0, {1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_percolation(RetentionSchedule::reference(30), 25, 0.0, 1.0, {1, 0}),
                  resource_guard_error);
  CHECK_THROWS_AS(
      joint_hawkes_experiment(DriftFunction::constant(0.0), RetentionSchedule::reference(20), 19,
                              10, {1, 0}),
      resource_guard_error);
}
