#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "netloc/experiment.hpp"

using namespace netloc;

namespace {

ScenarioConfig small_stochastic(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.name = "unit";
  cfg.topology.kind = TopologySpec::Kind::Stochastic;
  cfg.topology.diameter_m = 260.0;
  cfg.topology.density_per_m2 = 2.5e-3;
  cfg.anchors = AnchorScheme::concentric_offsets({Vec2(15, 0), Vec2(-15, 10)});
  cfg.snapshots = 6;
  cfg.seed = seed;
  cfg.bin_width_m = 20.0;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  REQUIRE(is);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("config: json round trip preserves the hash") {
  ScenarioConfig cfg = small_stochastic(9);
  cfg.topology.holes.push_back({Vec2(30, 30), 20.0});
  cfg.fit_band_m = {40.0, 90.0};
  cfg.radio.rmax_override_m = 50.0;
  cfg.run_estimators = true;
  const ScenarioConfig back = ScenarioConfig::from_json(cfg.to_json());
  CHECK(back.hash() == cfg.hash());
  CHECK(back.topology.holes.size() == 1);
  CHECK(back.channel.sigma_aoa_rad == doctest::Approx(cfg.channel.sigma_aoa_rad));
  CHECK_THROWS(ScenarioConfig::from_json("{\"topology\":{\"kind\":\"ring\"}}"));
}

TEST_CASE("run scenario: lattice smoke run emits per-agent bounds") {
  ScenarioConfig cfg;
  cfg.name = "smoke";
  cfg.topology.kind = TopologySpec::Kind::Lattice;
  cfg.topology.diameter_m = 240.0;
  cfg.topology.spacing_m = 20.0;
  cfg.anchors = AnchorScheme::single_center();
  cfg.out_dir = "test_out/smoke";
  std::filesystem::remove_all(cfg.out_dir);
  const ExperimentResult res = run_scenario(cfg);
  REQUIRE(res.points.size() == 1);
  CHECK(res.points[0].errors.empty());
  CHECK(res.points[0].snapshots_done == 1);
  CHECK_FALSE(res.points[0].bins.empty());
  CHECK_FALSE(res.points[0].agents.empty());
  const auto csv = slurp("test_out/smoke/smoke_bins.csv");
  CHECK(csv.find("netloc-csv v1") != std::string::npos);
  const auto agents = slurp("test_out/smoke/smoke_smoke_agents.csv");
  CHECK(agents.find("agent_id,x,y,dist_to_nearest_anchor,speb") != std::string::npos);
}

TEST_CASE("run scenario: identical seeds give identical aggregates, threads included") {
  ScenarioConfig cfg = small_stochastic(33);
  const ExperimentResult a = run_scenario(cfg);
  const ExperimentResult b = run_scenario(cfg);
  cfg.threads = 3;
  const ExperimentResult c = run_scenario(cfg);
  REQUIRE(a.points.size() == 1);
  CHECK(a.points[0].interior_avg_speb == b.points[0].interior_avg_speb);
  CHECK(a.points[0].interior_avg_speb == c.points[0].interior_avg_speb);
  REQUIRE(a.points[0].bins.size() == c.points[0].bins.size());
  for (std::size_t k = 0; k < a.points[0].bins.size(); ++k) {
    CHECK(a.points[0].bins[k].speb == c.points[0].bins[k].speb);
    CHECK(a.points[0].bins[k].count == c.points[0].bins[k].count);
  }
  // different seed changes the numbers
  ScenarioConfig other = small_stochastic(34);
  const ExperimentResult d = run_scenario(other);
  CHECK(a.points[0].interior_avg_speb != d.points[0].interior_avg_speb);
}

TEST_CASE("run scenario: cross-path consistency check stays tight") {
  ScenarioConfig cfg = small_stochastic(55);
  cfg.snapshots = 2;
  cfg.cross_check = true;
  const ExperimentResult res = run_scenario(cfg);
  CHECK(res.points[0].errors.empty());
  CHECK(res.points[0].cross_check_max_rel > 0);
  CHECK(res.points[0].cross_check_max_rel < 1e-6);
}

TEST_CASE("run scenario: snapshot failures are recorded and the run continues") {
  ScenarioConfig cfg = small_stochastic(2);
  // sparse enough that some snapshots disconnect
  cfg.topology.density_per_m2 = 4e-4;
  cfg.radio.rmax_override_m = 45.0;
  cfg.snapshots = 10;
  const ExperimentResult res = run_scenario(cfg);
  CHECK(res.points[0].snapshots_done + int(res.points[0].errors.size()) == 10);
}

TEST_CASE("reproduce: name mapping and scale validation") {
  CHECK(figure_from_name("fig4") == Figure::PathLoss);
  CHECK(figure_from_name("fig5/6-holes") == Figure::Holes);
  CHECK(figure_from_name("fig6-density") == Figure::AnchorDensity);
  CHECK(figure_from_name("fig7-gamma") == Figure::GammaSweep);
  CHECK(figure_from_name("fig8-concentric") == Figure::Concentric);
  CHECK(figure_from_name("fig9-ellipses") == Figure::Ellipses);
  CHECK(figure_from_name("fig10/11-estimators") == Figure::Estimators);
  CHECK_THROWS_AS(figure_from_name("fig99"), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_figure(Figure::PathLoss, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_figure(Figure::PathLoss, 1.5, 1), std::invalid_argument);
  // desk-scale cap triggers on the full-size recipe
  CHECK_THROWS_AS(reproduce_figure(Figure::PathLoss, 1.0, 1), std::invalid_argument);
}

TEST_CASE("export: empty results refuse to write; svg carries one ellipse per agent") {
  CHECK_THROWS_AS(export_results(ExperimentResult{}, ExportFormat::Csv, "test_out/none"),
                  std::invalid_argument);

  ScenarioConfig cfg;
  cfg.name = "svg";
  cfg.topology.kind = TopologySpec::Kind::Lattice;
  cfg.topology.diameter_m = 160.0;
  cfg.topology.spacing_m = 20.0;
  cfg.radio.antennas = 1;
  cfg.anchors = AnchorScheme::explicit_points({Vec2(-40, -40), Vec2(-20, -40), Vec2(-40, -20)});
  const ExperimentResult res = run_scenario(cfg);
  REQUIRE(res.points[0].errors.empty());
  const auto files = export_results(res, ExportFormat::SvgEllipses, "test_out/svg");
  REQUIRE(files.size() == 1);
  const std::string svg = slurp(files[0]);
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<ellipse", pos)) != std::string::npos) {
    ++count;
    pos += 8;
  }
  CHECK(count == res.points[0].agents.size());
}

TEST_CASE("holes degrade the bound beyond the deviation threshold") {
  // paired seeds: the same snapshots with and without holes
  ScenarioConfig base;
  base.name = "holes";
  base.topology.kind = TopologySpec::Kind::Stochastic;
  base.topology.diameter_m = 420.0;
  base.topology.density_per_m2 = 2.5e-3;
  base.anchors = AnchorScheme::single_center();
  base.snapshots = 12;
  base.seed = 71;
  base.bin_width_m = 30.0;
  ScenarioConfig holes = base;
  const double d = base.topology.diameter_m;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0})
      holes.topology.holes.push_back({Vec2(sx * 0.2 * d, sy * 0.2 * d), 0.15 * d});

  const ExperimentResult free_run = run_scenario(base);
  const ExperimentResult hole_run = run_scenario(holes);
  const auto& fb = free_run.points[0].bins;
  const auto& hb = hole_run.points[0].bins;
  int compared = 0;
  for (const auto& h : hb) {
    if (h.center < 0.25 * d || h.count < 30) continue;
    for (const auto& f : fb)
      if (f.center == h.center && f.count >= 30) {
        CHECK(h.speb >= f.speb * 0.98);
        ++compared;
      }
  }
  CHECK(compared >= 2);
}
