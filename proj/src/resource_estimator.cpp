#include "pairsim/resource_estimator.hpp"

#include "pairsim/errors.hpp"

#include <cmath>
#include <ostream>

namespace pairsim {

double wbl_gate_count(int n, double delta, double epsilon) {
  if (n < 1) throw ParameterError("gate count needs n >= 1");
  if (!(epsilon > 0.0)) throw ParameterError("gate count needs epsilon > 0");
  if (!(delta >= 0.0)) throw ParameterError("gate count needs delta >= 0");
  const double n4 = std::pow(static_cast<double>(n), 4);
  return 3.0 * n4 * (delta / epsilon);
}

Feasibility feasible(int n, double delta, double epsilon, double t_g_over_tau,
                     double budget_in_tau) {
  if (!(t_g_over_tau > 0.0) || !(budget_in_tau > 0.0) || !(delta > 0.0))
    throw ParameterError("feasibility inputs must be positive");
  const double time = wbl_gate_count(n, delta, epsilon) * t_g_over_tau;
  // Relative slack keeps exact-boundary cases from flipping on rounding.
  return {time <= budget_in_tau * (1.0 + 1e-12), time};
}

int max_feasible_n(double delta, double epsilon, double t_g_over_tau, double budget_in_tau,
                   int n_limit) {
  int best = 0;
  for (int n = 1; n <= n_limit; ++n) {
    if (!feasible(n, delta, epsilon, t_g_over_tau, budget_in_tau).feasible) break;
    best = n;
  }
  return best;
}

double precision_cost(int n, int d, double epsilon_rel, double r) {
  if (n < 1 || d < 1 || !(epsilon_rel > 0.0)) throw ParameterError("precision cost inputs");
  if (!(r >= 1.0)) throw ParameterError("precision cost exponent r must be >= 1");
  return std::pow(static_cast<double>(n), d) / std::pow(epsilon_rel, r);
}

void write_resource_table(std::ostream& os, std::span<const int> n_values,
                          std::span<const double> eps_over_delta, double t_g_over_tau,
                          double budget_in_tau) {
  os << "n,eps_over_delta,gates,time_in_tau,feasible\n";
  os.precision(12);
  for (int n : n_values)
    for (double e : eps_over_delta) {
      const auto f = feasible(n, 1.0, e, t_g_over_tau, budget_in_tau);
      os << n << ',' << e << ',' << wbl_gate_count(n, 1.0, e) << ',' << f.time_in_tau << ','
         << (f.feasible ? "true" : "false") << '\n';
    }
}

}  // namespace pairsim
