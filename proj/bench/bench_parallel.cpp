// Times the OpenMP kernels against their serial reference paths.
//   bench_parallel [--quick]

#include <chrono>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <random>

#include "driftgp/gp.hpp"
#include "driftgp/harness.hpp"

using namespace driftgp;

namespace {

template <typename F>
double seconds(int reps, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

template <typename F>
bool compare(const char* name, int reps, F&& run) {
  decltype(run(Execution::Serial)) serial_out, parallel_out;
  const double ts = seconds(reps, [&] { serial_out = run(Execution::Serial); });
  const double tp = seconds(reps, [&] { parallel_out = run(Execution::Parallel); });
  const bool same = serial_out == parallel_out;
  std::cout << std::left << std::setw(26) << name << std::right << std::fixed << std::setprecision(4)
            << std::setw(10) << ts << " s" << std::setw(10) << tp << " s" << std::setw(8)
            << std::setprecision(2) << ts / tp << "x" << (same ? "  identical" : "  MISMATCH") << '\n';
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 1 : 5;
  const std::size_t n = quick ? 200 : 1500;

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5e4, 5e4);
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  const HyperParams hp;
  const auto field = random_gyre(1);
  std::vector<Vec2> ws;
  for (std::size_t i = 0; i < n / 5; ++i) ws.push_back(eval_field(field, pts[i]));
  const GpModel model(hp, KernelKind::Incompressible, 1e-4, std::vector<Vec2>(pts.begin(), pts.begin() + n / 5), ws);
  const Grid grid(Vec2(-5e4, -5e4), quick ? 5e3 : 1e3, quick ? 21 : 101, quick ? 21 : 101);

  std::cout << "threads: " << available_threads() << "\n"
            << std::left << std::setw(26) << "kernel" << std::right << std::setw(12) << "serial"
            << std::setw(12) << "parallel" << std::setw(9) << "speedup" << '\n';
  bool ok = true;
  ok &= compare("gram matrix", reps, [&](Execution e) {
    return build_gram_matrix(hp, KernelKind::Incompressible, pts, e);
  });
  ok &= compare("block row sums", reps, [&](Execution e) {
    return block_row_sums(hp, KernelKind::Incompressible, pts, pts, e);
  });
  ok &= compare("grid field sampling", reps, [&](Execution e) { return sample_grid(field, grid, e); });
  ok &= compare("grid posterior mean", reps, [&](Execution e) { return predict_mean_on_grid(model, grid, e); });

  RunConfig mc;
  mc.trials = quick ? 2 : 4;
  mc.vehicle = VehicleConfig::loop_mission(quick ? 2 : 4, quick ? 3e3 : 1e4);
  mc.grid_points = 10;
  ok &= compare("monte carlo trials", 1, [&](Execution e) {
    std::vector<std::vector<std::vector<double>>> curves;
    for (const TrialResult& t : monte_carlo(mc, e).trials) curves.push_back(t.errors);
    return curves;
  });
  return ok ? 0 : 1;
}
