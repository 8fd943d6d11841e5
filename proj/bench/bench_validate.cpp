// Compares the serial and OpenMP paths of the Monte-Carlo validation
// kernel and of the trade-off sweep. Both paths must agree exactly.

#include <chrono>
#include <cstdio>
#include <vector>

#include "wax/combiner.hpp"
#include "wax/dims.hpp"
#include "wax/solver.hpp"
#include "wax/tradeoff.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
  const wax::SystemDims dims = wax::make_panel_dims(12, 8, 16, 4);
  const wax::CombiningModule cm = wax::build_structure(dims, wax::Structure::Prop5);

  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 24; ++s) seeds.push_back(s);

  std::printf("validate_A  M=%d K=%d L=%d T_P=%d  seeds=%zu\n", dims.M, dims.K,
              dims.L, dims.T_P, seeds.size());

  auto t0 = Clock::now();
  const wax::ValidationReport serial = wax::validate_A(cm, dims, seeds, {}, false);
  const double t_serial = seconds_since(t0);

  t0 = Clock::now();
  const wax::ValidationReport parallel = wax::validate_A(cm, dims, seeds, {}, true);
  const double t_parallel = seconds_since(t0);

  bool agree = serial.valid == parallel.valid &&
               serial.indeterminate == parallel.indeterminate &&
               serial.seeds.size() == parallel.seeds.size();
  for (std::size_t i = 0; agree && i < serial.seeds.size(); ++i) {
    agree = serial.seeds[i].status == parallel.seeds[i].status &&
            serial.seeds[i].residual == parallel.seeds[i].residual;
  }

  std::printf("  serial   %8.3f s\n", t_serial);
  std::printf("  parallel %8.3f s   speedup %.2fx   verdicts %s\n", t_parallel,
              t_serial / (t_parallel > 0 ? t_parallel : 1e-12),
              agree ? "identical" : "DIFFER");

  const std::vector<int> grid = wax::default_L_grid(96, 24);
  std::printf("sweep       M=96 K=24 structure=general  grid=%zu points\n", grid.size());

  wax::SweepOptions opt;
  opt.parallel = false;
  t0 = Clock::now();
  const auto sw_serial = wax::sweep(96, 24, wax::Structure::General, grid, opt);
  const double s_serial = seconds_since(t0);

  opt.parallel = true;
  t0 = Clock::now();
  const auto sw_parallel = wax::sweep(96, 24, wax::Structure::General, grid, opt);
  const double s_parallel = seconds_since(t0);

  bool sw_agree = sw_serial.size() == sw_parallel.size();
  for (std::size_t i = 0; sw_agree && i < sw_serial.size(); ++i) {
    sw_agree = sw_serial[i].L == sw_parallel[i].L &&
               sw_serial[i].T == sw_parallel[i].T &&
               sw_serial[i].admissible == sw_parallel[i].admissible &&
               sw_serial[i].confirmed == sw_parallel[i].confirmed;
  }

  std::printf("  serial   %8.3f s\n", s_serial);
  std::printf("  parallel %8.3f s   speedup %.2fx   results %s\n", s_parallel,
              s_serial / (s_parallel > 0 ? s_parallel : 1e-12),
              sw_agree ? "identical" : "DIFFER");

  return (agree && sw_agree) ? 0 : 1;
}
