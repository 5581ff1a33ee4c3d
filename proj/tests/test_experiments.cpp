#include <doctest.h>

#include <cstdlib>
#include <set>

#include "fndepth/experiments.hpp"

using namespace fndepth;

namespace {

ExperimentConfig small(ExperimentKind kind) {
  ExperimentConfig c = default_config(kind);
  c.replications = std::min(c.replications, 4);
  return c;
}

}  // namespace

TEST_CASE("config json round trip and validation") {
  for (auto kind : {ExperimentKind::degeneracy, ExperimentKind::maximizer, ExperimentKind::breakdown,
                    ExperimentKind::consistency}) {
    const ExperimentConfig c = default_config(kind);
    CHECK(to_json(config_from_json(to_json(c))) == to_json(c));
    CHECK(parse_experiment_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_experiment_kind("nope"), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"experiment", "breakdown"}, {"scheme", "simpson"}}), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"replications", 3}}), Error);

  ExperimentConfig c = default_config(ExperimentKind::breakdown);
  c.contamination.fraction = 1.0;
  CHECK_THROWS_AS(validate(c), Error);
  c = default_config(ExperimentKind::consistency);
  c.sample_sizes.clear();
  CHECK_THROWS_AS(validate(c), Error);
  c = default_config(ExperimentKind::consistency);
  c.grid_sizes = {10, 20};
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("contaminated count survives fraction rounding") {
  CHECK(contaminated_count(5.0 / 11.0, 11) == 5);
  CHECK(contaminated_count(6.0 / 11.0, 11) == 6);
  CHECK(contaminated_count(0.0, 11) == 0);
  CHECK(contaminated_count(0.5, 11) == 5);
  CHECK(contaminated_count(0.1, 30) == 3);
}

TEST_CASE("derived seeds differ across streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10; ++s)
    for (std::uint64_t r = 0; r < 10; ++r) seen.insert(derive_seed(1, s, r));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST_CASE("degeneracy rows echo the grid schedule") {
  ExperimentConfig c = small(ExperimentKind::degeneracy);
  c.grid_sizes = {1, 5, 17};
  const ExperimentReport r = run_degeneracy(c);
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.number(i, "d") == c.grid_sizes[i]);
    CHECK(r.number(i, "n") == 50);
    CHECK(r.number(i, "mean_bd") >= 0.0);
    CHECK(r.number(i, "mean_hrd") <= 0.5);
  }
  // One grid point: univariate halfspace depth of the centre, about 1/2.
  CHECK(r.number(0, "mean_hrd") >= 0.35);
  CHECK(r.metadata["version"] == std::string(kVersion));
  CHECK(r.metadata["jitter_used"].get<double>() >= 0.0);
}

TEST_CASE("degeneracy needs a band order within the sample size") {
  ExperimentConfig c = small(ExperimentKind::degeneracy);
  c.sample_sizes = {1};
  try {
    run_degeneracy(c);
    FAIL("expected InvalidOrder");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidOrder);
  }
}

TEST_CASE("maximizer check on a single curve") {
  ExperimentConfig c = small(ExperimentKind::maximizer);
  c.sample_sizes = {1};
  c.replications = 2;
  const ExperimentReport r = run_maximizer_check(c);
  REQUIRE(r.rows.size() == 6);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.number(i, "attains") == 1);
    CHECK(r.number(i, "at_median") == r.number(i, "sample_max"));
  }
}

TEST_CASE("maximizer check: the coordinatewise median is deepest") {
  const ExperimentConfig c = small(ExperimentKind::maximizer);
  const ExperimentReport r = run_maximizer_check(c);
  const double n = c.sample_sizes.front();
  REQUIRE(r.rows.size() == static_cast<std::size_t>(3 * c.replications));
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.number(i, "attains") == 1);
    CHECK(r.number(i, "slack") == doctest::Approx(1.0 / (2.0 * n)));
    if (std::get<std::string>(r.rows[i][r.column("depth")]) == "MHRD") {
      // Odd n: the median attains (n + 1) / (2n), the largest value possible.
      CHECK(r.number(i, "at_median") == doctest::Approx((n + 1) / (2 * n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("breakdown without contamination does not move the estimates") {
  ExperimentConfig c = small(ExperimentKind::breakdown);
  c.contamination.fraction = 0.0;
  const ExperimentReport r = run_breakdown(c);
  REQUIRE(r.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.number(i, "contaminated") == 0);
    CHECK(r.number(i, "median_displacement_spatial") == 0.0);
    CHECK(r.number(i, "median_displacement_coordinatewise") == 0.0);
  }
}

TEST_CASE("breakdown with a contaminated majority follows the outliers") {
  ExperimentConfig c = small(ExperimentKind::breakdown);
  c.contamination.fraction = 6.0 / 11.0;
  const ExperimentReport r = run_breakdown(c);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double M = r.number(i, "M");
    CHECK(r.number(i, "contaminated") == 6);
    CHECK(r.number(i, "median_displacement_coordinatewise") >= 0.4 * M);
    CHECK(r.number(i, "median_displacement_coordinatewise") <= 1.6 * M);
  }
}

TEST_CASE("consistency with a one-point schedule") {
  ExperimentConfig c = small(ExperimentKind::consistency);
  c.sample_sizes = {15};
  c.grid_sizes = {21};
  const ExperimentReport r = run_consistency(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.number(0, "n") == 15);
  CHECK(r.number(0, "d") == 21);
  CHECK(r.number(0, "solver_converged") == c.replications);
}

TEST_CASE("spatial and coordinatewise medians have comparable errors for Brownian motion") {
  ExperimentConfig c = default_config(ExperimentKind::consistency);
  c.process = GPSpec{};
  const ExperimentReport r = run_consistency(c);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double ratio = r.number(i, "median_l2_spatial") / r.number(i, "median_l2_coordinatewise");
    CHECK(ratio >= 1.0 / 3.0);
    CHECK(ratio <= 3.0);
  }
}

TEST_CASE("reports are deterministic and independent of the thread count") {
  ExperimentConfig c = small(ExperimentKind::consistency);
  c.sample_sizes = {8, 16};
  c.grid_sizes = {11};
  ::setenv("FNDEPTH_THREADS", "1", 1);
  const std::string serial = format_report(run_consistency(c), ReportFormat::json);
  ::setenv("FNDEPTH_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  const std::string threaded = format_report(run_consistency(c), ReportFormat::json);
  ::unsetenv("FNDEPTH_THREADS");
  CHECK(serial == threaded);
  CHECK(format_report(run_consistency(c), ReportFormat::json) == serial);
}

TEST_CASE("parallel_for rethrows task failures") {
  ::setenv("FNDEPTH_THREADS", "2", 1);
  CHECK_THROWS_AS(parallel_for(8, [](std::size_t i) {
                    if (i == 5) throw Error(ErrorCode::InvalidValue, "boom");
                  }),
                  Error);
  ::unsetenv("FNDEPTH_THREADS");
}
