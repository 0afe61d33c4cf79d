#include "doctest.h"

#include "pairsim/errors.hpp"
#include "pairsim/resource_estimator.hpp"

#include <cmath>
#include <sstream>
#include <vector>

using namespace pairsim;

static long lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

TEST_CASE("wbl_gate_count") {
  CHECK(wbl_gate_count(10, 1.0, 1.0) == doctest::Approx(30000));
  CHECK(wbl_gate_count(3, 1.0, 0.01) == doctest::Approx(24300));
  CHECK(wbl_gate_count(1, 5.0, 5.0) == doctest::Approx(3));
  CHECK(wbl_gate_count(4, 1.0, 0.1) < wbl_gate_count(5, 1.0, 0.1));
  CHECK(wbl_gate_count(4, 1.0, 0.1) < wbl_gate_count(4, 2.0, 0.1));
  CHECK(wbl_gate_count(4, 1.0, 0.1) > wbl_gate_count(4, 1.0, 0.2));
  CHECK_THROWS_AS(wbl_gate_count(0, 1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(wbl_gate_count(3, 1.0, 0.0), ParameterError);
}

TEST_CASE("feasible") {
  const auto four = feasible(4, 1.0, 0.01, 1e-5, 1.0);
  CHECK(four.feasible);
  CHECK(four.time_in_tau == doctest::Approx(0.768));
  const auto five = feasible(5, 1.0, 0.01, 1e-5, 1.0);
  CHECK_FALSE(five.feasible);
  CHECK(five.time_in_tau == doctest::Approx(1.875));
  const auto ten = feasible(10, 1.0, 1.0, 1e-5, 1.0);
  CHECK(ten.feasible);
  CHECK(ten.time_in_tau == doctest::Approx(0.3));

  for (int n = 2; n <= 12; ++n)
    for (double eps : {0.003, 0.01, 0.1, 1.0})
      if (feasible(n, 1.0, eps, 1e-5, 1.0).feasible) {
        CHECK(feasible(n - 1, 1.0, eps, 1e-5, 1.0).feasible);
        CHECK(feasible(n, 1.0, 2 * eps, 1e-5, 1.0).feasible);
      }
}

TEST_CASE("max_feasible_n matches the closed form") {
  CHECK(max_feasible_n(1.0, 0.01, 1e-5, 1.0) == 4);
  CHECK(max_feasible_n(1.0, 1.0, 1e-5, 1.0) >= 10);
  for (double ratio : {1.0, 3.0, 10.0, 100.0, 1000.0})
    for (double budget : {0.5, 1.0, 3.0}) {
      const int closed =
          static_cast<int>(std::floor(std::pow(budget / (3.0 * ratio * 1e-5), 0.25) + 1e-12));
      CHECK(max_feasible_n(1.0, 1.0 / ratio, 1e-5, budget) == closed);
    }
  CHECK(max_feasible_n(1.0, 1e-9, 1e-5, 1.0) == 0);
}

TEST_CASE("precision_cost") {
  CHECK(precision_cost(3, 4, 0.005, 1) == doctest::Approx(2 * precision_cost(3, 4, 0.01, 1)));
  CHECK(precision_cost(3, 4, 0.01, 2) / precision_cost(3, 4, 0.01, 1) == doctest::Approx(100));
  CHECK(precision_cost(6, 4, 0.1, 1) / precision_cost(3, 4, 0.1, 1) == doctest::Approx(16));
  CHECK_THROWS_AS(precision_cost(3, 4, 0.1, 0.5), ParameterError);
}

TEST_CASE("resource table") {
  std::ostringstream os;
  const std::vector<int> n{3, 4, 5};
  const std::vector<double> e{0.01};
  write_resource_table(os, n, e, 1e-5, 1.0);
  CHECK(os.str().rfind("n,eps_over_delta,gates,time_in_tau,feasible\n", 0) == 0);
  CHECK(lines(os.str()) == 4);
}
