// Times one correlation-length sweep through the serial reference path and
// through the OpenMP path, checks the outputs are bit-identical, and prints
// the speedup.  The physics kernels themselves are serial; parallelism lives
// only at the sweep layer, so identical results are a hard requirement, not a
// tolerance question.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "maserphase/parallel.hpp"
#include "maserphase/params.hpp"
#include "maserphase/spectrum.hpp"

using namespace maser;

namespace {

std::vector<double> sweep(int n_points, int jobs, double* seconds) {
  std::vector<double> xi(n_points);
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(n_points, jobs, [&](std::int64_t i) {
    ModelParams p{125, 1.0, 0.15, 0.5, 0.05 + 20.0 * static_cast<double>(i) / (n_points - 1)};
    xi[i] = correlation_length(p).xi;
  });
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return xi;
}

}  // namespace

int main(int argc, char** argv) {
  int n_points = 400;
  if (argc > 1) n_points = std::atoi(argv[1]);
  if (n_points < 2) n_points = 2;

  const int threads = hardware_jobs();
  double t_serial = 0.0, t_parallel = 0.0;
  const std::vector<double> ref = sweep(n_points, 1, &t_serial);
  const std::vector<double> par = sweep(n_points, 0, &t_parallel);

  int mismatches = 0;
  for (int i = 0; i < n_points; ++i)
    if (std::memcmp(&ref[i], &par[i], sizeof(double)) != 0) ++mismatches;

  std::printf("points          %d\n", n_points);
  std::printf("threads         %d\n", threads);
  std::printf("serial          %.3f s\n", t_serial);
  std::printf("parallel        %.3f s\n", t_parallel);
  std::printf("speedup         %.2fx\n", t_serial / t_parallel);
  std::printf("bit-identical   %s\n", mismatches == 0 ? "yes" : "NO");
  if (mismatches != 0) {
    std::printf("mismatching points: %d\n", mismatches);
    return 1;
  }
  return 0;
}
