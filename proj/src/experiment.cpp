#include "netloc/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "netloc/eoc.hpp"
#include "netloc/potential.hpp"
#include "netloc/rng.hpp"

namespace netloc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// config serialization
// ---------------------------------------------------------------------------

std::pair<double, double> ScenarioConfig::fit_band() const {
  if (fit_band_m) return *fit_band_m;
  return {2.0 * radio.max_range(), 0.35 * topology.diameter_m};
}

namespace {

json holes_to_json(const std::vector<Hole>& holes) {
  json arr = json::array();
  for (const auto& h : holes)
    arr.push_back({{"cx", h.center.x()}, {"cy", h.center.y()}, {"radius", h.radius}});
  return arr;
}

std::vector<Hole> holes_from_json(const json& arr) {
  std::vector<Hole> out;
  for (const auto& h : arr)
    out.push_back({Vec2(h.at("cx").get<double>(), h.at("cy").get<double>()),
                   h.at("radius").get<double>()});
  return out;
}

std::string scheme_name(AnchorScheme::Kind k) {
  switch (k) {
    case AnchorScheme::Kind::SingleCenter: return "single-center";
    case AnchorScheme::Kind::LatticeUniform: return "lattice-uniform";
    case AnchorScheme::Kind::Binomial: return "binomial";
    case AnchorScheme::Kind::Explicit: return "explicit";
    case AnchorScheme::Kind::ConcentricOffsets: return "concentric-offsets";
  }
  return "single-center";
}

AnchorScheme::Kind scheme_from_name(const std::string& s) {
  if (s == "single-center") return AnchorScheme::Kind::SingleCenter;
  if (s == "lattice-uniform") return AnchorScheme::Kind::LatticeUniform;
  if (s == "binomial") return AnchorScheme::Kind::Binomial;
  if (s == "explicit") return AnchorScheme::Kind::Explicit;
  if (s == "concentric-offsets") return AnchorScheme::Kind::ConcentricOffsets;
  throw std::invalid_argument("unknown anchor scheme: " + s);
}

}  // namespace

std::string ScenarioConfig::to_json() const {
  json j;
  j["name"] = name;
  j["topology"] = {
      {"kind", topology.kind == TopologySpec::Kind::Lattice ? "lattice" : "stochastic"},
      {"diameter_m", topology.diameter_m},
      {"spacing_m", topology.spacing_m},
      {"density_per_m2", topology.density_per_m2},
      {"holes", holes_to_json(topology.holes)}};
  json pts = json::array();
  for (const auto& p : anchors.points) pts.push_back({p.x(), p.y()});
  j["anchors"] = {{"scheme", scheme_name(anchors.kind)},
                  {"density_per_m2", anchors.anchor_density},
                  {"points", pts}};
  j["radio"] = {{"path_loss_exponent", radio.path_loss_exponent},
                {"bandwidth_hz", radio.bandwidth_hz},
                {"carrier_hz", radio.carrier_hz},
                {"ranging_coeff", radio.ranging_coeff},
                {"tx_snr_1m_db", radio.tx_snr_1m_db},
                {"rx_sensitivity_db", radio.rx_sensitivity_db},
                {"antennas", radio.antennas},
                {"aperture_factor", radio.aperture_factor},
                {"ref_ranging_info", radio.ref_ranging_info}};
  if (radio.rmax_override_m) j["radio"]["rmax_override_m"] = *radio.rmax_override_m;
  j["channel"] = {{"tx_power_dbm", channel.tx_power_dbm},
                  {"ref_loss_db", channel.ref_loss_db},
                  {"path_loss_exponent", channel.path_loss_exponent},
                  {"ref_dist_m", channel.ref_dist_m},
                  {"sigma_rss_db", channel.sigma_rss_db},
                  {"sigma_aoa_deg", channel.sigma_aoa_rad * 180.0 / M_PI},
                  {"max_range_m", channel.max_range_m}};
  j["snapshots"] = snapshots;
  j["seed"] = seed;
  j["bin_width_m"] = bin_width_m;
  j["interior_eps"] = interior_eps;
  if (fit_band_m) j["fit_band_m"] = {fit_band_m->first, fit_band_m->second};
  j["estimators"] = run_estimators;
  j["aml_iters"] = aml_iters;
  j["cross_check"] = cross_check;
  j["threads"] = threads;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ScenarioConfig c;
  c.name = j.value("name", c.name);
  if (j.contains("topology")) {
    const auto& t = j["topology"];
    const std::string kind = t.value("kind", "lattice");
    if (kind == "lattice")
      c.topology.kind = TopologySpec::Kind::Lattice;
    else if (kind == "stochastic")
      c.topology.kind = TopologySpec::Kind::Stochastic;
    else
      throw std::invalid_argument("unknown topology kind: " + kind);
    c.topology.diameter_m = t.value("diameter_m", c.topology.diameter_m);
    c.topology.spacing_m = t.value("spacing_m", c.topology.spacing_m);
    c.topology.density_per_m2 = t.value("density_per_m2", c.topology.density_per_m2);
    if (t.contains("holes")) c.topology.holes = holes_from_json(t["holes"]);
  }
  if (j.contains("anchors")) {
    const auto& a = j["anchors"];
    c.anchors.kind = scheme_from_name(a.value("scheme", "single-center"));
    c.anchors.anchor_density = a.value("density_per_m2", 0.0);
    if (a.contains("points"))
      for (const auto& p : a["points"])
        c.anchors.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  if (j.contains("radio")) {
    const auto& r = j["radio"];
    c.radio.path_loss_exponent = r.value("path_loss_exponent", c.radio.path_loss_exponent);
    c.radio.bandwidth_hz = r.value("bandwidth_hz", c.radio.bandwidth_hz);
    c.radio.carrier_hz = r.value("carrier_hz", c.radio.carrier_hz);
    c.radio.ranging_coeff = r.value("ranging_coeff", c.radio.ranging_coeff);
    c.radio.tx_snr_1m_db = r.value("tx_snr_1m_db", c.radio.tx_snr_1m_db);
    c.radio.rx_sensitivity_db = r.value("rx_sensitivity_db", c.radio.rx_sensitivity_db);
    c.radio.antennas = r.value("antennas", c.radio.antennas);
    c.radio.aperture_factor = r.value("aperture_factor", c.radio.aperture_factor);
    c.radio.ref_ranging_info = r.value("ref_ranging_info", c.radio.ref_ranging_info);
    if (r.contains("rmax_override_m") && !r["rmax_override_m"].is_null())
      c.radio.rmax_override_m = r["rmax_override_m"].get<double>();
  }
  if (j.contains("channel")) {
    const auto& ch = j["channel"];
    c.channel.tx_power_dbm = ch.value("tx_power_dbm", c.channel.tx_power_dbm);
    c.channel.ref_loss_db = ch.value("ref_loss_db", c.channel.ref_loss_db);
    c.channel.path_loss_exponent = ch.value("path_loss_exponent", c.channel.path_loss_exponent);
    c.channel.ref_dist_m = ch.value("ref_dist_m", c.channel.ref_dist_m);
    c.channel.sigma_rss_db = ch.value("sigma_rss_db", c.channel.sigma_rss_db);
    if (ch.contains("sigma_aoa_deg"))
      c.channel.sigma_aoa_rad = ch["sigma_aoa_deg"].get<double>() * M_PI / 180.0;
    c.channel.max_range_m = ch.value("max_range_m", c.channel.max_range_m);
  }
  c.snapshots = j.value("snapshots", c.snapshots);
  c.seed = j.value("seed", c.seed);
  c.bin_width_m = j.value("bin_width_m", c.bin_width_m);
  c.interior_eps = j.value("interior_eps", c.interior_eps);
  if (j.contains("fit_band_m"))
    c.fit_band_m = std::pair<double, double>(j["fit_band_m"].at(0), j["fit_band_m"].at(1));
  c.run_estimators = j.value("estimators", c.run_estimators);
  c.aml_iters = j.value("aml_iters", c.aml_iters);
  c.cross_check = j.value("cross_check", c.cross_check);
  c.threads = j.value("threads", c.threads);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return from_json(text);
}

std::uint64_t ScenarioConfig::hash() const { return fnv1a_hash(to_json()); }

// ---------------------------------------------------------------------------
// measurement-model information
// ---------------------------------------------------------------------------

Mat2 channel_link_information(const ChannelParams& ch, const Vec2& displacement) {
  const double d = displacement.norm();
  if (d <= 0) throw std::invalid_argument("channel_link_information: zero displacement");
  const double phi = std::atan2(displacement.y(), displacement.x());
  const double range_sigma = std::log(10.0) * ch.sigma_rss_db / (10.0 * ch.path_loss_exponent) * d;
  const double tang_sigma = ch.sigma_aoa_rad * d;
  // two independent directed measurements per link
  return 2.0 * (dir_projector(phi) / (range_sigma * range_sigma) +
                dir_projector(phi + M_PI / 2.0) / (tang_sigma * tang_sigma));
}

InformationGraph build_information_graph(const NetworkTopology& topo, const ChannelParams& ch) {
  ch.validate();
  InformationGraph g;
  g.n_agents = static_cast<int>(topo.agent_ids.size());
  g.n_anchors = static_cast<int>(topo.anchor_ids.size());
  g.antennas = 2;  // range and bearing both observed

  std::vector<int> topo_to_node(topo.node_count(), -1);
  for (int a : topo.agent_ids) {
    topo_to_node[a] = static_cast<int>(g.node_to_topo.size());
    g.node_to_topo.push_back(a);
  }
  for (int b : topo.anchor_ids) {
    topo_to_node[b] = static_cast<int>(g.node_to_topo.size());
    g.node_to_topo.push_back(b);
  }
  g.positions.resize(g.n_nodes());
  for (int v = 0; v < g.n_nodes(); ++v) g.positions[v] = topo.positions[g.node_to_topo[v]];
  g.npi.assign(g.n_nodes(), Mat2::Zero());
  g.adj.resize(g.n_nodes());
  for (const auto& [ti, tj] : topo.edges) {
    int i = topo_to_node[ti], j = topo_to_node[tj];
    if (i > j) std::swap(i, j);
    const Mat2 jm = channel_link_information(ch, g.positions[i] - g.positions[j]);
    const int e = static_cast<int>(g.edges.size());
    g.edges.emplace_back(i, j);
    g.link.push_back(jm);
    g.npi[i] += jm;
    g.npi[j] += jm;
    g.adj[i].emplace_back(j, e);
    g.adj[j].emplace_back(i, e);
  }
  return g;
}

// ---------------------------------------------------------------------------
// scenario runner
// ---------------------------------------------------------------------------

NetworkTopology make_topology(const ScenarioConfig& cfg, std::uint64_t snapshot_seed) {
  NetworkTopology topo =
      cfg.topology.kind == TopologySpec::Kind::Lattice
          ? build_lattice_disk(cfg.topology.spacing_m, cfg.topology.diameter_m)
          : build_stochastic_disk(cfg.topology.density_per_m2, cfg.topology.diameter_m,
                                  cfg.topology.holes, snapshot_seed);
  AnchorScheme scheme = cfg.anchors;
  if (scheme.kind == AnchorScheme::Kind::Binomial) scheme.seed = derive_seed(snapshot_seed, 0xA0);
  topo = place_anchors(topo, scheme);
  return connect_by_link_budget(topo, cfg.radio);
}

namespace {

Vec2 anchor_centroid(const NetworkTopology& topo) {
  Vec2 c = Vec2::Zero();
  if (topo.anchor_ids.empty()) return c;
  for (int b : topo.anchor_ids) c += topo.positions[b];
  return c / static_cast<double>(topo.anchor_ids.size());
}

double nearest_anchor_dist(const NetworkTopology& topo, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int b : topo.anchor_ids) best = std::min(best, (p - topo.positions[b]).norm());
  return best;
}

struct AgentSample {
  double bin_dist = 0;  // distance to the anchor centroid
  double speb = 0, dpeb_r = 0, dpeb_t = 0, major = 0;
  bool interior = false;
};

struct SnapshotOut {
  std::vector<AgentSample> samples;
  std::vector<AgentBoundRecord> records;  // only filled for snapshot 0
  NetworkTopology topo;                   // only snapshot 0
  std::vector<MsePoint> aml_points, seq_points;
  double cross_rel = 0;
  std::string error;
};

// merged-duplicate scatter for the asymptote fits
class Scatter {
 public:
  void add(double d, double v) {
    if (!std::isfinite(d) || !std::isfinite(v)) return;
    auto& e = acc_[std::llround(d * 1e6)];
    e.first += v;
    e.second += 1;
  }
  FitResult fit(FitModel model, double lo, double hi) const {
    std::vector<double> xs, ys;
    for (const auto& [k, e] : acc_) {
      const double d = static_cast<double>(k) * 1e-6;
      if (d < lo || d > hi || d <= 0) continue;
      xs.push_back(d);
      ys.push_back(e.first / e.second);
    }
    if (xs.size() < 8) return {};
    return asymptote_fit(xs, ys, model);
  }

 private:
  std::map<long long, std::pair<double, int>> acc_;
};

SnapshotOut run_snapshot(const ScenarioConfig& cfg, int snap) {
  SnapshotOut out;
  const std::uint64_t snap_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(snap));
  NetworkTopology topo = make_topology(cfg, snap_seed);
  const Vec2 centroid = anchor_centroid(topo);
  const double interior_radius = (1.0 - cfg.interior_eps) * topo.net_diameter / 2.0;

  const bool estimator_mode = cfg.run_estimators;
  const InformationGraph g = estimator_mode ? build_information_graph(topo, cfg.channel)
                                            : build_information_graph(topo, cfg.radio);
  EfimSolver solver(g);

  out.samples.reserve(g.n_agents);
  std::vector<double> agent_speb(g.n_agents, 0.0);
  for (int a = 0; a < g.n_agents; ++a) {
    const Vec2 p = g.positions[a];
    const Mat2 efim = solver.agent_efim(a);
    const AgentBound bound = performance_metrics(efim);
    const Vec2 to_centroid = centroid - p;
    const double dc = to_centroid.norm();
    const Vec2 u_r = dc > 1e-12 ? Vec2(to_centroid / dc) : Vec2(1, 0);
    const Vec2 u_t(-u_r.y(), u_r.x());

    AgentSample s;
    s.bin_dist = dc;
    s.speb = bound.speb;
    s.dpeb_r = bound.dpeb(u_r);
    s.dpeb_t = bound.dpeb(u_t);
    s.major = bound.ellipse_major;
    s.interior = p.norm() < interior_radius;
    out.samples.push_back(s);
    agent_speb[a] = bound.speb;

    if (snap == 0) {
      AgentBoundRecord r;
      r.agent_id = g.node_to_topo[a];
      r.x = p.x();
      r.y = p.y();
      r.dist_to_anchor = nearest_anchor_dist(topo, p);
      r.speb = bound.speb;
      r.dpeb_radial = s.dpeb_r;
      r.dpeb_tangential = s.dpeb_t;
      r.ellipse_a = bound.ellipse_major;
      r.ellipse_b = bound.ellipse_minor;
      r.ellipse_theta = bound.ellipse_angle;
      out.records.push_back(r);
    }
  }

  if (cfg.cross_check && g.antennas >= 2 && !solver.rank_deficient()) {
    const PotentialRouteEvaluator route(g);
    const TransitionOperator t_agents = transition_operator(g, TransitionMode::AgentsOnly);
    const int stride = std::max(1, g.n_agents / 4);
    for (int a = 0; a < g.n_agents; a += stride) {
      const Mat2 direct = solver.agent_efim(a);
      const double scale = direct.norm();
      const Mat2 routed = route.efim_routing(a);
      out.cross_rel = std::max(out.cross_rel, (routed - direct).norm() / scale);
      if (g.n_agents <= 100) {
        const auto eoc = eoc_decomposition(t_agents, a, 1e-12, 50000);
        if (eoc.converged) {
          const Mat2 via_series = eoc.npi * eoc.eoc;
          out.cross_rel = std::max(out.cross_rel, (via_series - direct).norm() / scale);
        }
      }
    }
  }

  if (estimator_mode) {
    const MeasurementSet meas =
        generate_measurements(topo, cfg.channel, derive_seed(snap_seed, 0xE0));
    const EstimatorState aml = aml_estimate(meas, topo, cfg.channel, cfg.aml_iters);
    const EstimatorState seq = sequential_estimate(meas, topo, cfg.channel);
    for (int a = 0; a < g.n_agents; ++a) {
      const int node = g.node_to_topo[a];
      const Vec2 truth = topo.positions[node];
      const double dist = (centroid - truth).norm();
      MsePoint pa;
      pa.distance = dist;
      pa.localized = aml.localized[node];
      pa.sq_error = pa.localized ? (aml.estimates[node] - truth).squaredNorm() : 0.0;
      pa.speb = agent_speb[a];
      out.aml_points.push_back(pa);
      MsePoint ps;
      ps.distance = dist;
      ps.localized = seq.localized[node];
      ps.sq_error = ps.localized ? (seq.estimates[node] - truth).squaredNorm() : 0.0;
      ps.speb = agent_speb[a];
      out.seq_points.push_back(ps);
    }
  }

  if (snap == 0) out.topo = std::move(topo);
  return out;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min({threads, n, static_cast<int>(std::thread::hardware_concurrency())}));
  if (threads <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

ExperimentResult run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.name = cfg.name;
  res.config_hash = cfg.hash();
  res.seed = cfg.seed;

  ScenarioResult point;
  point.label = cfg.name;

  const int n_snaps = cfg.topology.kind == TopologySpec::Kind::Lattice &&
                              cfg.anchors.kind != AnchorScheme::Kind::Binomial
                          ? std::min(cfg.snapshots, cfg.run_estimators ? cfg.snapshots : 1)
                          : cfg.snapshots;
  std::vector<SnapshotOut> outs(n_snaps);
  parallel_for(n_snaps, cfg.threads, [&](int k) {
    try {
      outs[k] = run_snapshot(cfg, k);
    } catch (const std::exception& e) {
      outs[k].error = std::string("snapshot ") + std::to_string(k) + ": " + e.what();
    }
  });

  // deterministic reduction in snapshot order
  struct BinAcc {
    int count = 0;
    double speb = 0, dr = 0, dt = 0;
    int n_speb = 0, n_dr = 0, n_dt = 0;
  };
  std::map<int, BinAcc> bins;
  Scatter speb_sc, radial_sc, tang_sc, major_sc;
  double interior_sum = 0;
  int interior_n = 0;
  std::vector<MsePoint> aml_points, seq_points;

  for (int k = 0; k < n_snaps; ++k) {
    auto& o = outs[k];
    if (!o.error.empty()) {
      point.errors.push_back(o.error);
      continue;
    }
    ++point.snapshots_done;
    point.cross_check_max_rel = std::max(point.cross_check_max_rel, o.cross_rel);
    for (const auto& s : o.samples) {
      auto& b = bins[static_cast<int>(std::floor(s.bin_dist / cfg.bin_width_m))];
      ++b.count;
      if (std::isfinite(s.speb)) {
        b.speb += s.speb;
        ++b.n_speb;
      }
      if (std::isfinite(s.dpeb_r)) {
        b.dr += s.dpeb_r;
        ++b.n_dr;
      }
      if (std::isfinite(s.dpeb_t)) {
        b.dt += s.dpeb_t;
        ++b.n_dt;
      }
      speb_sc.add(s.bin_dist, s.speb);
      radial_sc.add(s.bin_dist, s.dpeb_r);
      tang_sc.add(s.bin_dist, s.dpeb_t);
      major_sc.add(s.bin_dist, s.major);
      if (s.interior && std::isfinite(s.speb)) {
        interior_sum += s.speb;
        ++interior_n;
      }
    }
    if (k == 0) {
      point.agents = std::move(o.records);
      point.sample_topology = std::move(o.topo);
    }
    aml_points.insert(aml_points.end(), o.aml_points.begin(), o.aml_points.end());
    seq_points.insert(seq_points.end(), o.seq_points.begin(), o.seq_points.end());
  }

  for (const auto& [k, b] : bins) {
    DistanceBin d;
    d.center = (k + 0.5) * cfg.bin_width_m;
    d.count = b.count;
    d.speb = b.n_speb ? b.speb / b.n_speb : std::numeric_limits<double>::quiet_NaN();
    d.dpeb_radial = b.n_dr ? b.dr / b.n_dr : std::numeric_limits<double>::quiet_NaN();
    d.dpeb_tangential = b.n_dt ? b.dt / b.n_dt : std::numeric_limits<double>::quiet_NaN();
    point.bins.push_back(d);
  }
  point.interior_avg_speb = interior_n ? interior_sum / interior_n : 0.0;

  const auto [lo, hi] = cfg.fit_band();
  point.speb_log_fit = speb_sc.fit(FitModel::Log, lo, hi);
  point.radial_log_fit = radial_sc.fit(FitModel::Log, lo, hi);
  point.tangential_quad_fit = tang_sc.fit(FitModel::Quadratic, lo, hi);
  point.major_axis_linear_fit = major_sc.fit(FitModel::Linear, lo, hi);

  if (cfg.run_estimators) {
    point.aml_bins = mse_curve(aml_points, cfg.bin_width_m);
    point.seq_bins = mse_curve(seq_points, cfg.bin_width_m);
    Scatter aml_sc, seq_sc;
    for (const auto& r : point.aml_bins)
      if (r.count > 0) aml_sc.add(r.center, r.mse);
    for (const auto& r : point.seq_bins)
      if (r.count > 0) seq_sc.add(r.center, r.mse);
    const double est_hi = 0.5 * cfg.topology.diameter_m;
    point.aml_log_fit = aml_sc.fit(FitModel::Log, cfg.bin_width_m / 2, est_hi);
    point.seq_linear_fit = seq_sc.fit(FitModel::Linear, cfg.bin_width_m / 2, est_hi);
  }

  res.points.push_back(std::move(point));
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
  if (!cfg.out_dir.empty()) export_results(res, ExportFormat::Csv, cfg.out_dir);
  return res;
}

// ---------------------------------------------------------------------------
// figure recipes
// ---------------------------------------------------------------------------

Figure figure_from_name(std::string_view name) {
  const std::string s(name);
  if (s == "fig4" || s == "fig4-pathloss" || s == "pathloss") return Figure::PathLoss;
  if (s == "fig5" || s == "fig5/6-holes" || s == "fig6-holes" || s == "holes")
    return Figure::Holes;
  if (s == "fig6" || s == "fig6-density" || s == "anchor-density") return Figure::AnchorDensity;
  if (s == "fig7" || s == "fig7-gamma" || s == "gamma") return Figure::GammaSweep;
  if (s == "fig8" || s == "fig8-concentric" || s == "concentric") return Figure::Concentric;
  if (s == "fig9" || s == "fig9-ellipses" || s == "ellipses") return Figure::Ellipses;
  if (s == "fig10" || s == "fig11" || s == "fig10/11-estimators" || s == "estimators")
    return Figure::Estimators;
  throw std::invalid_argument("unknown figure name: " + s);
}

std::string figure_name(Figure f) {
  switch (f) {
    case Figure::PathLoss: return "fig4-pathloss";
    case Figure::Holes: return "fig5/6-holes";
    case Figure::AnchorDensity: return "fig6-density";
    case Figure::GammaSweep: return "fig7-gamma";
    case Figure::Concentric: return "fig8-concentric";
    case Figure::Ellipses: return "fig9-ellipses";
    case Figure::Estimators: return "fig10/11-estimators";
  }
  return "";
}

namespace {

int scaled_snapshots(double scale, int full, int lo, int hi) {
  return std::clamp(static_cast<int>(std::lround(full * scale)), lo, hi);
}

void guard_size(const ScenarioConfig& cfg, bool allow_large) {
  const double area = M_PI * cfg.topology.diameter_m * cfg.topology.diameter_m / 4.0;
  const double density = cfg.topology.kind == TopologySpec::Kind::Lattice
                             ? 1.0 / (cfg.topology.spacing_m * cfg.topology.spacing_m)
                             : cfg.topology.density_per_m2;
  if (!allow_large && area * density > 1500)
    throw std::invalid_argument(
        "reproduce_figure: configuration exceeds the desk-scale node cap; "
        "reduce --scale or pass allow_large");
}

}  // namespace

ExperimentResult reproduce_figure(Figure which, double scale, std::uint64_t seed,
                                  const std::string& out_dir, int threads, bool allow_large) {
  if (!(scale > 0.0 && scale <= 1.0))
    throw std::invalid_argument("reproduce_figure: scale must be in (0, 1]");
  const auto t0 = std::chrono::steady_clock::now();

  ScenarioConfig base;
  base.seed = seed;
  base.threads = threads;
  base.topology.diameter_m = 2000.0 * scale;
  base.topology.spacing_m = 20.0;
  base.topology.density_per_m2 = 2.5e-3;

  ExperimentResult res;
  res.name = figure_name(which);
  res.seed = seed;

  auto run_point = [&](ScenarioConfig cfg, const std::string& label, double sweep) {
    cfg.name = label;
    guard_size(cfg, allow_large);
    ExperimentResult one = run_scenario(cfg);
    one.points[0].label = label;
    one.points[0].sweep_value = sweep;
    res.points.push_back(std::move(one.points[0]));
    if (res.config_hash == 0) res.config_hash = cfg.hash();
  };

  switch (which) {
    case Figure::PathLoss: {
      ScenarioConfig cfg = base;
      cfg.topology.kind = TopologySpec::Kind::Lattice;
      run_point(cfg, "lattice", cfg.topology.diameter_m);
      cfg.topology.kind = TopologySpec::Kind::Stochastic;
      cfg.snapshots = scaled_snapshots(scale, 400, 8, 200);
      run_point(cfg, "stochastic", cfg.topology.diameter_m);
      break;
    }
    case Figure::Holes: {
      ScenarioConfig cfg = base;
      cfg.topology.kind = TopologySpec::Kind::Stochastic;
      cfg.topology.diameter_m = 1000.0 * scale;
      cfg.snapshots = scaled_snapshots(scale, 300, 8, 200);
      const double d = cfg.topology.diameter_m;
      for (const double frac : {0.0, 0.10, 0.15}) {
        cfg.topology.holes.clear();
        if (frac > 0)
          for (const double sx : {-1.0, 1.0})
            for (const double sy : {-1.0, 1.0})
              cfg.topology.holes.push_back({Vec2(sx * 0.2 * d, sy * 0.2 * d), frac * d});
        run_point(cfg, frac == 0.0 ? "no-holes" : "holes-r" + std::to_string(int(frac * 100)),
                  frac * d);
      }
      break;
    }
    case Figure::AnchorDensity: {
      for (const int nt : {1, 3})
        for (const bool lattice : {true, false}) {
          ScenarioConfig cfg = base;
          cfg.radio.antennas = nt;
          cfg.topology.kind = lattice ? TopologySpec::Kind::Lattice : TopologySpec::Kind::Stochastic;
          cfg.snapshots = lattice ? 1 : scaled_snapshots(scale, 100, 8, 60);
          const std::string fam = lattice ? "lattice" : "stochastic";
          for (const double pitch_frac : {0.10, 0.133, 0.20, 0.267, 0.40}) {
            const double pitch = pitch_frac * cfg.topology.diameter_m;
            const double lam = 1.0 / (pitch * pitch);
            cfg.anchors = lattice ? AnchorScheme::lattice_uniform(lam)
                                  : AnchorScheme::binomial(lam, 0 /*derived per snapshot*/);
            run_point(cfg, fam + "-nt" + std::to_string(nt), 1.0 / lam);
          }
        }
      break;
    }
    case Figure::GammaSweep: {
      for (const double gamma : {3.0, 3.25, 3.5}) {
        ScenarioConfig cfg = base;
        cfg.topology.kind = TopologySpec::Kind::Lattice;
        cfg.radio.path_loss_exponent = gamma;
        run_point(cfg, "gamma-" + std::to_string(gamma).substr(0, 4), gamma);
      }
      break;
    }
    case Figure::Concentric: {
      ScenarioConfig cfg = base;
      cfg.topology.kind = TopologySpec::Kind::Lattice;
      cfg.radio.antennas = 1;
      cfg.anchors = AnchorScheme::concentric_offsets(
          {Vec2(20, 0), Vec2(-20, 0), Vec2(0, 20), Vec2(0, -20)});
      run_point(cfg, "concentric", cfg.topology.diameter_m);
      break;
    }
    case Figure::Ellipses: {
      for (const bool lattice : {true, false}) {
        ScenarioConfig cfg = base;
        cfg.topology.kind = lattice ? TopologySpec::Kind::Lattice : TopologySpec::Kind::Stochastic;
        cfg.radio.antennas = 1;
        const double d = cfg.topology.diameter_m;
        const Vec2 corner(-0.30 * d, -0.30 * d);
        cfg.anchors = AnchorScheme::explicit_points(
            {corner, corner + Vec2(0.06 * d, 0), corner + Vec2(0, 0.06 * d)});
        cfg.fit_band_m = {2.0 * cfg.radio.max_range(), 0.75 * d};
        run_point(cfg, lattice ? "lattice" : "stochastic", d);
      }
      break;
    }
    case Figure::Estimators: {
      ScenarioConfig cfg = base;
      cfg.topology.kind = TopologySpec::Kind::Stochastic;
      cfg.topology.diameter_m = 400.0;  // the comparison scenario is desk scale already
      cfg.topology.density_per_m2 = 3e-3;
      cfg.radio.rmax_override_m = cfg.channel.max_range_m;
      cfg.run_estimators = true;
      cfg.snapshots = scaled_snapshots(scale, 1000, 24, 200);
      cfg.bin_width_m = 20.0;
      run_point(cfg, "estimators", cfg.topology.diameter_m);
      break;
    }
  }

  res.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (!out_dir.empty()) {
    export_results(res, ExportFormat::Csv, out_dir);
    if (which == Figure::Ellipses) export_results(res, ExportFormat::SvgEllipses, out_dir);
  }
  return res;
}

std::vector<std::filesystem::path> export_results(const ExperimentResult& res, ExportFormat fmt,
                                                  const std::filesystem::path& out_dir) {
  if (res.points.empty()) throw std::invalid_argument("export_results: empty result");
  std::vector<std::filesystem::path> written;
  std::filesystem::create_directories(out_dir);
  const CsvMeta meta{"", res.config_hash, res.seed};
  auto safe = [](std::string s) {
    for (auto& c : s)
      if (c == '/' || c == ' ') c = '_';
    return s;
  };

  if (fmt == ExportFormat::Csv) {
    const auto bins_path = out_dir / (safe(res.name) + "_bins.csv");
    std::ofstream os(bins_path);
    os.precision(12);
    os << "# " << kCsvSchemaVersion << " schema=figure-bins config=" << std::hex
       << res.config_hash << std::dec << " seed=" << res.seed << "\n";
    os << "label,sweep_value,bin_center,count,speb,dpeb_radial,dpeb_tangential,"
          "interior_avg_speb\n";
    for (const auto& p : res.points)
      for (const auto& b : p.bins)
        os << p.label << "," << p.sweep_value << "," << b.center << "," << b.count << ","
           << b.speb << "," << b.dpeb_radial << "," << b.dpeb_tangential << ","
           << p.interior_avg_speb << "\n";
    written.push_back(bins_path);

    for (const auto& p : res.points) {
      if (!p.agents.empty()) {
        const auto path = out_dir / (safe(res.name) + "_" + safe(p.label) + "_agents.csv");
        write_bounds_csv(path, p.agents, meta);
        written.push_back(path);
      }
      if (!p.aml_bins.empty()) {
        const auto path = out_dir / (safe(res.name) + "_" + safe(p.label) + "_estimators.csv");
        write_estimator_csv(path, p.aml_bins, p.seq_bins, meta);
        written.push_back(path);
      }
    }
  } else {
    for (const auto& p : res.points) {
      if (p.agents.empty()) continue;
      const auto path = out_dir / (safe(res.name) + "_" + safe(p.label) + "_ellipses.svg");
      write_ellipse_svg(path, p.sample_topology, p.agents);
      written.push_back(path);
    }
    if (written.empty()) throw std::invalid_argument("export_results: no agent records to draw");
  }
  return written;
}

}  // namespace netloc
