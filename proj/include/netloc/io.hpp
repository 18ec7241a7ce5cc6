#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netloc/efim.hpp"
#include "netloc/estimators.hpp"
#include "netloc/spectral.hpp"
#include "netloc/topology.hpp"

namespace netloc {

inline constexpr const char* kCsvSchemaVersion = "netloc-csv v1";
inline constexpr const char* kVersionStamp = "netloc 0.1.0";

std::uint64_t fnv1a_hash(std::string_view data);

/// Header metadata stamped as the first (comment) line of every CSV.
struct CsvMeta {
  std::string schema;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

struct AgentBoundRecord {
  int agent_id = 0;
  double x = 0, y = 0;
  double dist_to_anchor = 0;
  double speb = 0;
  double dpeb_radial = 0;
  double dpeb_tangential = 0;
  double ellipse_a = 0, ellipse_b = 0, ellipse_theta = 0;
};

void write_topology_csv(const std::filesystem::path& nodes_path,
                        const std::filesystem::path& edges_path, const NetworkTopology& topo,
                        const CsvMeta& meta);

void write_bounds_csv(const std::filesystem::path& path, std::span<const AgentBoundRecord> rows,
                      const CsvMeta& meta);

void write_estimator_csv(const std::filesystem::path& path, std::span<const MseBinRow> aml,
                         std::span<const MseBinRow> seq, const CsvMeta& meta);

void write_spectral_csv(const std::filesystem::path& path,
                        std::span<const SpectralSample> samples, const CsvMeta& meta);

struct PotentialCurveRow {
  double dist = 0;
  double eig_min = 0, eig_max = 0;
};
void write_potential_curve_csv(const std::filesystem::path& path,
                               std::span<const PotentialCurveRow> rows, const CsvMeta& meta);

/// Error ellipses overlaid on node positions; one <ellipse> per agent.
void write_ellipse_svg(const std::filesystem::path& path, const NetworkTopology& topo,
                       std::span<const AgentBoundRecord> rows, double magnify = 1.0);

}  // namespace netloc
