#include "pairsim/spectroscopy.hpp"

#include "pairsim/errors.hpp"
#include "pairsim/exact_evolution.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace pairsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double bin_omega(std::size_t j, std::size_t q, double t0) {
  // Symmetric index in (-Q/2, Q/2].
  const auto sj = static_cast<long>(j);
  const auto sq = static_cast<long>(q);
  const long idx = 2 * sj > sq ? sj - sq : sj;
  return kTwoPi * static_cast<double>(idx) / (static_cast<double>(q) * t0);
}

Eigen::VectorXd z_diagonal(int n, int spin) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::VectorXd z(dim);
  for (Eigen::Index b = 0; b < dim; ++b) z(b) = ((b >> (n - spin)) & 1) ? -1.0 : 1.0;
  return z;
}

}  // namespace

void TimeSeries::validate() const {
  if (values.size() < 2) throw ParameterError("time series needs Q >= 2 samples");
  if (!(t0 > 0.0)) throw ParameterError("time series needs t0 > 0");
  if (!wall_times.empty() && wall_times.size() != values.size())
    throw ParameterError("wall_times length differs from values");
}

TimeSeries acquire(const StateVector& prepared, const Stepper& stepper, int Q, int observed_spin,
                   std::optional<Damping> damping) {
  if (Q < 2) throw ParameterError("acquire needs Q >= 2");
  const Eigen::Index dim = prepared.size();
  if (stepper.unitary.rows() != dim) throw ParameterError("stepper and state dimensions differ");
  const int n = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  if (observed_spin < 1 || observed_spin > n) throw ParameterError("observed spin outside 1..n");
  if (damping && !(damping->t2 > 0.0)) throw ParameterError("damping needs t2 > 0");

  const Eigen::VectorXd z = z_diagonal(n, observed_spin);
  TimeSeries series;
  series.t0 = stepper.t0;
  series.values.reserve(Q);
  series.wall_times.reserve(Q);
  StateVector psi = prepared;
  for (int k = 0; k < Q; ++k) {
    if (k > 0) psi = stepper.unitary * psi;
    const double wall = k * stepper.wall_per_step;
    double value = psi.cwiseAbs2().dot(z);
    if (damping) value *= std::exp(-wall / damping->t2);
    series.values.push_back(value);
    series.wall_times.push_back(wall);
  }
  return series;
}

Spectrum dft_reference(const TimeSeries& series) {
  series.validate();
  const std::size_t q = series.values.size();
  Spectrum s;
  s.omega.resize(q);
  s.amplitude.assign(q, Complex{});
  for (std::size_t j = 0; j < q; ++j) {
    Complex acc{};
    for (std::size_t k = 0; k < q; ++k) {
      // Reduce jk mod Q first so the twiddle angle stays small.
      const double ang = -kTwoPi * static_cast<double>((j * k) % q) / static_cast<double>(q);
      acc += series.values[k] * std::polar(1.0, ang);
    }
    s.amplitude[j] = acc;
    s.omega[j] = bin_omega(j, q, series.t0);
  }
  return s;
}

Spectrum dft(const TimeSeries& series) {
  series.validate();
  const std::size_t q = series.values.size();
  // Twiddle table shared by all bins.
  std::vector<Complex> twiddle(q);
  for (std::size_t m = 0; m < q; ++m)
    twiddle[m] = std::polar(1.0, -kTwoPi * static_cast<double>(m) / static_cast<double>(q));

  Spectrum s;
  s.omega.resize(q);
  s.amplitude.assign(q, Complex{});
  const auto nq = static_cast<long>(q);
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nq; ++j) {
    Complex acc{};
    std::size_t m = 0;
    for (std::size_t k = 0; k < q; ++k) {
      acc += series.values[k] * twiddle[m];
      m += static_cast<std::size_t>(j);
      if (m >= q) m %= q;
    }
    s.amplitude[j] = acc;
    s.omega[j] = bin_omega(static_cast<std::size_t>(j), q, series.t0);
  }
  return s;
}

std::vector<double> idft(const Spectrum& spectrum) {
  const std::size_t q = spectrum.amplitude.size();
  if (q == 0) throw ParameterError("empty spectrum");
  std::vector<double> out(q);
  const auto nq = static_cast<long>(q);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nq; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < q; ++j) {
      const double ang = kTwoPi * static_cast<double>((j * k) % q) / static_cast<double>(q);
      acc += spectrum.amplitude[j] * std::polar(1.0, ang);
    }
    out[k] = acc.real() / static_cast<double>(q);
  }
  return out;
}

Peak peak_pick(const Spectrum& spectrum, bool exclude_dc) {
  if (spectrum.amplitude.empty()) throw NoPeak("empty spectrum");
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < spectrum.omega.size(); ++j) {
    const double w = spectrum.omega[j];
    if (w > 0.0 || (w == 0.0 && !exclude_dc)) order.push_back(j);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return spectrum.omega[a] < spectrum.omega[b]; });
  Peak best;
  bool found = false;
  for (std::size_t j : order) {
    const double mag = std::abs(spectrum.amplitude[j]);
    // Strictly larger beyond rounding, so equal peaks keep the lower frequency.
    if (mag > 0.0 && (!found || mag > best.magnitude * (1.0 + 1e-9))) {
      best = {spectrum.omega[j], mag, j};
      found = true;
    }
  }
  if (!found) throw NoPeak("spectrum has no nonzero candidate bin");
  return best;
}

namespace {

// Dimensionless parameters: amplitude, decay rate * T, omega * T, phase,
// with T = Q t0 the record length.
struct Model {
  const std::vector<double>& y;
  std::vector<double> t;  // t_k / T

  Eigen::VectorXd residual(const Eigen::Vector4d& p) const {
    Eigen::VectorXd r(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
      r(k) = y[k] - p(0) * std::exp(-p(1) * t[k]) * std::cos(p(2) * t[k] + p(3));
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::Vector4d& p) const {
    // Jacobian of the model (not the residual).
    Eigen::MatrixXd jac(y.size(), 4);
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double e = std::exp(-p(1) * t[k]);
      const double c = std::cos(p(2) * t[k] + p(3));
      const double s = std::sin(p(2) * t[k] + p(3));
      jac(k, 0) = e * c;
      jac(k, 1) = -t[k] * p(0) * e * c;
      jac(k, 2) = -t[k] * p(0) * e * s;
      jac(k, 3) = -p(0) * e * s;
    }
    return jac;
  }
};

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return phi <= -std::numbers::pi ? phi + kTwoPi : phi;
}

}  // namespace

FitResult fit_damped_sinusoid(const TimeSeries& series, double seed_omega) {
  series.validate();
  const std::size_t q = series.values.size();
  if (q < 8) throw ParameterError("damped-sinusoid fit needs Q >= 8");
  const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
  if (*hi - *lo <= 1e-14 * std::max(1.0, std::abs(*hi)))
    throw FitError("flat time series has no oscillation to fit");

  const double record = static_cast<double>(q) * series.t0;
  Model model{series.values, {}};
  model.t.resize(q);
  for (std::size_t k = 0; k < q; ++k) model.t[k] = static_cast<double>(k) / static_cast<double>(q);

  // Seed amplitude and phase from the DFT sum at the seed frequency.
  Complex bin{};
  for (std::size_t k = 0; k < q; ++k)
    bin += series.values[k] * std::polar(1.0, -seed_omega * series.t0 * static_cast<double>(k));
  Eigen::Vector4d p(2.0 * std::abs(bin) / static_cast<double>(q), 1.0, seed_omega * record,
                    std::arg(bin));
  if (p(0) == 0.0) p(0) = 0.5 * (*hi - *lo);

  FitResult out;
  Eigen::VectorXd r = model.residual(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < 200 && !converged; ++it) {
    const Eigen::MatrixXd jac = model.jacobian(p);
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e16) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector4d step = a.ldlt().solve(jtr);
      Eigen::Vector4d trial = p + step;
      trial(1) = std::max(trial(1), 0.0);
      const Eigen::VectorXd r_trial = model.residual(trial);
      const double c_trial = r_trial.squaredNorm();
      if (c_trial <= cost) {
        const double rel = (trial - p).norm() / std::max(p.norm(), 1e-300);
        p = trial;
        r = r_trial;
        const bool stalled = cost - c_trial <= 1e-15 * cost;
        cost = c_trial;
        out.residual_history.push_back(std::sqrt(cost));
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = rel < 1e-10 || (stalled && rel < 1e-6) || cost == 0.0;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      // No descent direction left: at a (numerical) minimum.
      converged = true;
    }
  }

  double amp = p(0), phase = p(3), omega = p(2) / record;
  if (amp < 0.0) {
    amp = -amp;
    phase += std::numbers::pi;
  }
  if (omega < 0.0) {
    omega = -omega;
    phase = -phase;
  }
  out.delta_exp = omega;
  out.tau_e = p(1) > 0.0 ? record / p(1) : std::numeric_limits<double>::infinity();
  out.amplitude = amp;
  out.phase = wrap_phase(phase);
  out.residual_norm = std::sqrt(cost);
  out.converged = converged;
  out.iterations = it;
  return out;
}

double epsilon_ft(int Q, double t0) {
  if (Q < 1 || !(t0 > 0.0)) throw ParameterError("epsilon_ft needs Q >= 1 and t0 > 0");
  return kTwoPi / (static_cast<double>(Q) * t0);
}

double systematic_offset(double delta_exp, double delta_exact) {
  if (delta_exp < 0.0 || delta_exact < 0.0) throw ParameterError("gaps must be >= 0");
  return delta_exp - delta_exact;
}

void write_series_csv(std::ostream& os, const TimeSeries& series) {
  os << "k,t_s,value,wall_s\n";
  os.precision(17);
  for (std::size_t k = 0; k < series.values.size(); ++k)
    os << k << ',' << static_cast<double>(k) * series.t0 << ',' << series.values[k] << ','
       << (series.wall_times.empty() ? 0.0 : series.wall_times[k]) << '\n';
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
  os << "omega_rad_s,re,im,abs\n";
  os.precision(17);
  for (std::size_t j = 0; j < spectrum.omega.size(); ++j)
    os << spectrum.omega[j] << ',' << spectrum.amplitude[j].real() << ','
       << spectrum.amplitude[j].imag() << ',' << std::abs(spectrum.amplitude[j]) << '\n';
}

}  // namespace pairsim
