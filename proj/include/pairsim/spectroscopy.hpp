#pragma once

#include "pairsim/hamiltonian.hpp"
#include "pairsim/trotter.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace pairsim {

/// Samples <M(t_k)> at t_k = k t0, k = 0..Q-1.
struct TimeSeries {
  double t0 = 0.0;
  std::vector<double> values;
  std::vector<double> wall_times;  // physical time elapsed at each sample, s

  void validate() const;
};

/// Q DFT bins; omega[j] uses the symmetric index j in (-Q/2, Q/2].
struct Spectrum {
  std::vector<double> omega;  // rad/s
  std::vector<Complex> amplitude;
};

struct FitResult {
  double delta_exp = 0.0;  // rad/s
  double tau_e = 0.0;      // s; +inf for an undamped signal
  double amplitude = 0.0;
  double phase = 0.0;  // rad
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;  // residual norm after each accepted step
};

/// Signal damping applied to each sample: exp(-wall / t2).
struct Damping {
  double t2 = 0.0;
};

/// values[k] = <psi_k|Z_r|psi_k> * damping(k * wall_per_step), psi_k = U^k psi_0.
TimeSeries acquire(const StateVector& prepared, const Stepper& stepper, int Q, int observed_spin,
                   std::optional<Damping> damping = std::nullopt);

/// OpenMP kernel; each bin is an independent O(Q) sum.
Spectrum dft(const TimeSeries& series);

/// Serial reference for dft().
Spectrum dft_reference(const TimeSeries& series);

/// Inverse of dft(); returns the real part of the reconstructed samples.
std::vector<double> idft(const Spectrum& spectrum);

struct Peak {
  double omega = 0.0;
  double magnitude = 0.0;
  std::size_t bin = 0;
};

/// Largest-magnitude bin with omega >= 0 (omega > 0 when exclude_dc); ties
/// go to the lower frequency.
Peak peak_pick(const Spectrum& spectrum, bool exclude_dc = true);

/// Levenberg-Marquardt fit of A exp(-t/tau) cos(Delta t + phi), seeded at
/// the given frequency.
FitResult fit_damped_sinusoid(const TimeSeries& series, double seed_omega);

/// Fourier-limited precision 2 pi / (Q t0).
double epsilon_ft(int Q, double t0);

double systematic_offset(double delta_exp, double delta_exact);

void write_series_csv(std::ostream& os, const TimeSeries& series);
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);

}  // namespace pairsim
