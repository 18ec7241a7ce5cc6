#include "netloc/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace netloc {

std::uint64_t fnv1a_hash(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os.precision(12);
  return os;
}

void stamp(std::ofstream& os, const CsvMeta& meta) {
  os << "# " << kCsvSchemaVersion << " schema=" << meta.schema << " config=" << std::hex
     << meta.config_hash << std::dec << " seed=" << meta.seed << "\n";
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

}  // namespace

void write_topology_csv(const std::filesystem::path& nodes_path,
                        const std::filesystem::path& edges_path, const NetworkTopology& topo,
                        const CsvMeta& meta) {
  auto nodes = open_out(nodes_path);
  stamp(nodes, {"nodes", meta.config_hash, meta.seed});
  nodes << "node_id,x,y,is_anchor\n";
  std::vector<char> anchor(topo.node_count(), 0);
  for (int b : topo.anchor_ids) anchor[b] = 1;
  for (int v = 0; v < topo.node_count(); ++v)
    nodes << v << "," << num(topo.positions[v].x()) << "," << num(topo.positions[v].y()) << ","
          << int(anchor[v]) << "\n";

  auto edges = open_out(edges_path);
  stamp(edges, {"edges", meta.config_hash, meta.seed});
  edges << "i,j,distance\n";
  for (const auto& [i, j] : topo.edges)
    edges << i << "," << j << "," << num(topo.distance(i, j)) << "\n";
}

void write_bounds_csv(const std::filesystem::path& path, std::span<const AgentBoundRecord> rows,
                      const CsvMeta& meta) {
  auto os = open_out(path);
  stamp(os, {"bounds", meta.config_hash, meta.seed});
  os << "agent_id,x,y,dist_to_nearest_anchor,speb,dpeb_radial,dpeb_tangential,"
        "ellipse_a,ellipse_b,ellipse_theta\n";
  for (const auto& r : rows)
    os << r.agent_id << "," << num(r.x) << "," << num(r.y) << "," << num(r.dist_to_anchor) << ","
       << num(r.speb) << "," << num(r.dpeb_radial) << "," << num(r.dpeb_tangential) << ","
       << num(r.ellipse_a) << "," << num(r.ellipse_b) << "," << num(r.ellipse_theta) << "\n";
}

void write_estimator_csv(const std::filesystem::path& path, std::span<const MseBinRow> aml,
                         std::span<const MseBinRow> seq, const CsvMeta& meta) {
  auto os = open_out(path);
  stamp(os, {"estimator-bins", meta.config_hash, meta.seed});
  os << "bin_center_m,mse_aml,mse_seq,speb_avg,n_points,outage_rate\n";
  // align by bin center; sequential rows may be missing in a bin
  for (const auto& a : aml) {
    const MseBinRow* s = nullptr;
    for (const auto& r : seq)
      if (std::abs(r.center - a.center) < 1e-9) s = &r;
    os << num(a.center) << "," << num(a.mse) << "," << (s ? num(s->mse) : "nan") << ","
       << num(a.speb_avg) << "," << a.count << ","
       << num(s ? std::max(a.outage_rate, s->outage_rate) : a.outage_rate) << "\n";
  }
}

void write_spectral_csv(const std::filesystem::path& path,
                        std::span<const SpectralSample> samples, const CsvMeta& meta) {
  auto os = open_out(path);
  stamp(os, {"spectral", meta.config_hash, meta.seed});
  os << "theta1,theta2,phi_xx,phi_xy,phi_yy\n";
  for (const auto& s : samples)
    os << num(s.theta.x()) << "," << num(s.theta.y()) << "," << num(s.phi(0, 0).real()) << ","
       << num(s.phi(0, 1).real()) << "," << num(s.phi(1, 1).real()) << "\n";
}

void write_potential_curve_csv(const std::filesystem::path& path,
                               std::span<const PotentialCurveRow> rows, const CsvMeta& meta) {
  auto os = open_out(path);
  stamp(os, {"potential-curve", meta.config_hash, meta.seed});
  os << "dist,p_eig_min,p_eig_max\n";
  for (const auto& r : rows)
    os << num(r.dist) << "," << num(r.eig_min) << "," << num(r.eig_max) << "\n";
}

void write_ellipse_svg(const std::filesystem::path& path, const NetworkTopology& topo,
                       std::span<const AgentBoundRecord> rows, double magnify) {
  auto os = open_out(path);
  const double r = topo.net_diameter / 2.0;
  const double view = 1000.0;
  const double s = view / (2.2 * r);
  auto tx = [&](double x) { return (x + 1.1 * r) * s; };
  auto ty = [&](double y) { return (1.1 * r - y) * s; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << view << " " << view
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int v = 0; v < topo.node_count(); ++v)
    os << "<circle cx=\"" << tx(topo.positions[v].x()) << "\" cy=\"" << ty(topo.positions[v].y())
       << "\" r=\"1.5\" fill=\"#555\"/>\n";
  for (int b : topo.anchor_ids) {
    const double cx = tx(topo.positions[b].x()), cy = ty(topo.positions[b].y());
    os << "<path d=\"M" << cx - 6 << " " << cy - 6 << " L" << cx + 6 << " " << cy + 6 << " M"
       << cx - 6 << " " << cy + 6 << " L" << cx + 6 << " " << cy - 6
       << "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  }
  for (const auto& a : rows) {
    if (!std::isfinite(a.ellipse_a) || !std::isfinite(a.ellipse_b)) continue;
    os << "<ellipse cx=\"" << tx(a.x) << "\" cy=\"" << ty(a.y) << "\" rx=\""
       << a.ellipse_a * s * magnify << "\" ry=\"" << a.ellipse_b * s * magnify
       << "\" transform=\"rotate(" << -a.ellipse_theta * 180.0 / M_PI << " " << tx(a.x) << " "
       << ty(a.y) << ")\" fill=\"none\" stroke=\"#2060c0\" stroke-width=\"1\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace netloc
