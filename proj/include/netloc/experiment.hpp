#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netloc/efim.hpp"
#include "netloc/estimators.hpp"
#include "netloc/io.hpp"
#include "netloc/spectral.hpp"
#include "netloc/topology.hpp"

namespace netloc {

struct TopologySpec {
  enum class Kind { Lattice, Stochastic };
  Kind kind = Kind::Lattice;
  double diameter_m = 500.0;
  double spacing_m = 20.0;           // lattice
  double density_per_m2 = 2.5e-3;    // stochastic
  std::vector<Hole> holes;
};

/// Everything that determines a run. (config hash, master seed) fully
/// determines every emitted number; snapshot seeds derive from the master
/// by counter so parallelism cannot reorder randomness.
struct ScenarioConfig {
  std::string name = "scenario";
  TopologySpec topology;
  AnchorScheme anchors = AnchorScheme::single_center();
  RadioParams radio;
  ChannelParams channel;
  int snapshots = 1;
  std::uint64_t seed = 1;
  double bin_width_m = 10.0;
  double interior_eps = 0.4;  // interior region for network averages
  // distance band for the asymptote fits; defaults to [2 R_max, 0.35 D_net]
  std::optional<std::pair<double, double>> fit_band_m;
  bool run_estimators = false;
  int aml_iters = 10;
  bool cross_check = false;
  int threads = 1;
  std::string out_dir;

  std::pair<double, double> fit_band() const;
  std::uint64_t hash() const;
  std::string to_json() const;
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig load(const std::filesystem::path& path);
};

/// Measurement-model Fisher information for the RSS/AOA channel; used as
/// the bound reference in estimator experiments (two directed
/// measurements per link).
Mat2 channel_link_information(const ChannelParams& ch, const Vec2& displacement);
InformationGraph build_information_graph(const NetworkTopology& topo, const ChannelParams& ch);

struct DistanceBin {
  double center = 0;
  int count = 0;
  double speb = 0;  // bin means over finite values
  double dpeb_radial = 0;
  double dpeb_tangential = 0;
};

struct ScenarioResult {
  std::string label;
  double sweep_value = 0;
  int snapshots_done = 0;
  std::vector<DistanceBin> bins;  // keyed by distance to the anchor centroid
  double interior_avg_speb = 0;
  FitResult speb_log_fit;
  FitResult radial_log_fit;
  FitResult tangential_quad_fit;
  FitResult major_axis_linear_fit;
  std::vector<AgentBoundRecord> agents;  // first snapshot detail
  NetworkTopology sample_topology;       // first snapshot
  std::vector<MseBinRow> aml_bins, seq_bins;
  FitResult aml_log_fit, seq_linear_fit;
  double cross_check_max_rel = 0;
  std::vector<std::string> errors;  // per-snapshot failures, run continues
};

struct ExperimentResult {
  std::string name;
  std::string version = kVersionStamp;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0;
  std::vector<ScenarioResult> points;
};

NetworkTopology make_topology(const ScenarioConfig& cfg, std::uint64_t snapshot_seed);

ExperimentResult run_scenario(const ScenarioConfig& cfg);

enum class Figure {
  PathLoss,       // single-anchor SPEB vs distance, lattice + stochastic
  Holes,          // stochastic networks with circular holes
  AnchorDensity,  // interior SPEB vs inverse anchor density
  GammaSweep,     // path-loss exponent sweep
  Concentric,     // four central anchors, radial/tangential bounds
  Ellipses,       // corner anchors, error ellipses
  Estimators      // AML and sequential vs the bound
};

Figure figure_from_name(std::string_view name);  // "fig4", "fig8-concentric", ...
std::string figure_name(Figure f);

/// Canned desk-scale recipes; `scale` in (0, 1] shrinks diameters and
/// snapshot counts relative to the full-size setups.
ExperimentResult reproduce_figure(Figure which, double scale, std::uint64_t seed,
                                  const std::string& out_dir = "", int threads = 1,
                                  bool allow_large = false);

enum class ExportFormat { Csv, SvgEllipses };
std::vector<std::filesystem::path> export_results(const ExperimentResult& res, ExportFormat fmt,
                                                  const std::filesystem::path& out_dir);

}  // namespace netloc
