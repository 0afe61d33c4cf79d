// Wall-clock comparison of the OpenMP kernels against their serial baselines.
// Usage: bench_kernels [Q ...]

#include "pairsim/pipeline.hpp"
#include "pairsim/spectroscopy.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

using namespace pairsim;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count());
  }
  return best;
}

TimeSeries random_series(int Q) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  TimeSeries s{1e-3, {}, {}};
  for (int k = 0; k < Q; ++k) {
    s.values.push_back(u(rng));
    s.wall_times.push_back(k * 1e-3);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes;
  for (int i = 1; i < argc; ++i) sizes.push_back(std::stoi(argv[i]));
  if (sizes.empty()) sizes = {1024, 4096};
  const int threads = omp_get_max_threads();
  std::printf("threads: %d\n", threads);

  std::printf("%-8s %14s %14s %9s %12s\n", "Q", "dft_ref_s", "dft_omp_s", "speedup", "max_diff");
  for (int Q : sizes) {
    const auto s = random_series(Q);
    Spectrum a, b;
    const double t_ref = best_of(3, [&] { a = dft_reference(s); });
    const double t_par = best_of(3, [&] { b = dft(s); });
    double diff = 0;
    for (std::size_t i = 0; i < a.amplitude.size(); ++i)
      diff = std::max(diff, std::abs(a.amplitude[i] - b.amplitude[i]));
    std::printf("%-8d %14.6f %14.6f %9.2f %12.3e\n", Q, t_ref, t_par, t_ref / t_par, diff);
  }

  auto base = preset("h2");
  base.method = StepMethod::W2;
  base.pulse_mode = PulseMode::Finite;
  SweepGrid grid;
  grid.t0 = {0.25e-3, 0.5e-3, 1e-3};
  grid.t_pi = {5e-6, 10e-6, 20e-6, 40e-6};
  omp_set_num_threads(1);
  const double t_serial = best_of(2, [&] { sweep(base, grid); });
  omp_set_num_threads(threads);
  const double t_parallel = best_of(2, [&] { sweep(base, grid); });
  std::printf("sweep of %zu points: serial %.4f s, %d threads %.4f s, speedup %.2f\n", grid.size(),
              t_serial, threads, t_parallel, t_serial / t_parallel);
  return 0;
}
