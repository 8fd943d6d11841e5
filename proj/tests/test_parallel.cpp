#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wax/combiner.hpp"
#include "wax/solver.hpp"
#include "wax/tradeoff.hpp"

using namespace wax;

// The OpenMP paths split work per seed / per grid point; each unit is solved
// by exactly the same serial code, so outputs must be bit-identical.

TEST_CASE("validation results do not depend on the thread count") {
  const SystemDims dims = make_panel_dims(9, 6, 6, 3);
  const CombiningModule cm = build_structure(dims, Structure::Prop5);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 16; ++s) seeds.push_back(s);

  const ValidationReport serial = validate_A(cm, dims, seeds, {}, false);
  const ValidationReport parallel = validate_A(cm, dims, seeds, {}, true);
  CHECK(serial.valid == parallel.valid);
  CHECK(serial.indeterminate == parallel.indeterminate);
  REQUIRE(serial.seeds.size() == parallel.seeds.size());
  for (std::size_t i = 0; i < serial.seeds.size(); ++i) {
    CHECK(serial.seeds[i].seed == parallel.seeds[i].seed);
    CHECK(serial.seeds[i].status == parallel.seeds[i].status);
    CHECK(serial.seeds[i].residual == parallel.seeds[i].residual);
    CHECK(serial.seeds[i].ls_residual == parallel.seeds[i].ls_residual);
  }
}

TEST_CASE("sweep results do not depend on the thread count") {
  const std::vector<int> grid = default_L_grid(48, 8);
  SweepOptions serial_opt;
  serial_opt.parallel = false;
  SweepOptions parallel_opt;
  parallel_opt.parallel = true;

  const auto a = sweep(48, 8, Structure::General, grid, serial_opt);
  const auto b = sweep(48, 8, Structure::General, grid, parallel_opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].L == b[i].L);
    CHECK(a[i].T_P == b[i].T_P);
    CHECK(a[i].T == b[i].T);
    CHECK(a[i].admissible == b[i].admissible);
    CHECK(a[i].threshold == b[i].threshold);
    CHECK(a[i].confirmed == b[i].confirmed);
  }
}
