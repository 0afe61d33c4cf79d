#pragma once

#include <iosfwd>
#include <span>

namespace pairsim {

/// Gate count 3 n^4 (delta / epsilon) of the WBL protocol, decoupling pulses included.
double wbl_gate_count(int n, double delta, double epsilon);

struct Feasibility {
  bool feasible = false;
  double time_in_tau = 0.0;
};

/// Total time gates * (t_g / tau) against a budget in units of tau.
Feasibility feasible(int n, double delta, double epsilon, double t_g_over_tau,
                     double budget_in_tau);

/// Largest n (scanning upward from 1) that stays within budget; 0 if none.
int max_feasible_n(double delta, double epsilon, double t_g_over_tau, double budget_in_tau,
                   int n_limit = 1000);

/// Scaling score n^d / epsilon_rel^r (all constants 1).
double precision_cost(int n, int d, double epsilon_rel, double r);

/// CSV rows `n,eps_over_delta,gates,time_in_tau,feasible` over the grid.
void write_resource_table(std::ostream& os, std::span<const int> n_values,
                          std::span<const double> eps_over_delta, double t_g_over_tau,
                          double budget_in_tau);

}  // namespace pairsim
