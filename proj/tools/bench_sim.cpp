// Benchmark: OpenMP-parallel lattice kernels against the serial reference.
// Runs the same soliton-crossing workload with pm.parallel toggled, reports
// wall time per step, and verifies the two trajectories agree bitwise.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "sshg/sim.hpp"

using namespace sshg;

namespace {

double run(SimParams pm, const SolitonParams& sp, Cplx z, int steps, bool parallel,
           LatticeState& out) {
  pm.parallel = parallel;
  out = init_soliton(pm, sp, z, -2.0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < steps; ++k) step(out, pm);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double max_diff(const LatticeState& a, const LatticeState& b) {
  double worst = 0.0;
  for (size_t j = 0; j < a.s1.size(); ++j) {
    worst = std::max(worst, max_abs(a.s1.phi[j] - b.s1.phi[j]));
    worst = std::max(worst, max_abs(a.s1.phidot[j] - b.s1.phidot[j]));
    worst = std::max(worst, max_abs(a.s1.psi[j] - b.s1.psi[j]));
    worst = std::max(worst, max_abs(a.s2.phi[j] - b.s2.phi[j]));
    worst = std::max(worst, max_abs(a.s2.psibar[j] - b.s2.psibar[j]));
  }
  return std::max(worst, max_abs(a.lambda0 - b.lambda0));
}

}  // namespace

int main(int argc, char** argv) {
  SimParams pm;
  pm.L = 20.0;
  pm.dx = 0.01;
  pm.m = 1.0;
  pm.w1 = std::exp(0.3);
  pm.w2 = std::exp(-0.2);
  int steps = 400;
  int gens = 2;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--dx")) pm.dx = std::atof(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--steps")) steps = std::atoi(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--gens")) gens = std::atoi(argv[i + 1]);
  }
  pm.gen_count = gens;

  SolitonParams sp;
  sp.theta = 0.7;
  sp.eta1 = 0.3;
  sp.eta2 = -0.2;
  sp.m = 1.0;
  sp.gen_count = gens;
  const auto [z1, z2] = delay_z(sp.theta, sp.eta1, sp.eta2);

  const int sites = 2 * (int(std::lround(pm.L / pm.dx)) + 1);
  std::printf("lattice: %d sites, dx=%g, %d generators, %d steps\n", sites, pm.dx, gens, steps);
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both runs are serial\n");
#endif

  LatticeState serial, parallel;
  const double ts = run(pm, sp, z1, steps, false, serial);
  const double tp = run(pm, sp, z1, steps, true, parallel);
  const double diff = max_diff(serial, parallel);

  std::printf("serial:   %8.3f s  (%7.3f ms/step)\n", ts, 1e3 * ts / steps);
  std::printf("parallel: %8.3f s  (%7.3f ms/step)  speedup %.2fx\n", tp, 1e3 * tp / steps,
              ts / tp);
  std::printf("max |serial - parallel| = %.3e  (%s)\n", diff,
              diff == 0.0 ? "bitwise identical" : "MISMATCH");
  return diff == 0.0 ? 0 : 1;
}
