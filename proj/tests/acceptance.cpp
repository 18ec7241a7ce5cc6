// Acceptance suite: one test case per criterion, each printing a
// PASS/FAIL line with the measured figures.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>

#include "netloc/eoc.hpp"
#include "netloc/experiment.hpp"
#include "netloc/potential.hpp"
#include "netloc/rng.hpp"
#include "netloc/spectral.hpp"

using namespace netloc;

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
}

// plain least-squares fit helper for short sweeps (the public fit
// requires eight points)
std::pair<double, double> fit_slope_r2(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
    syy += y[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icept = (sy - slope * sx) / n;
  double ss_res = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - slope * x[k] - icept;
    ss_res += e * e;
  }
  const double ss_tot = syy - sy * sy / n;
  return {slope, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

NetworkTopology random_anchored(Rng& rng, int n_agents, int n_anchors, int antennas) {
  RadioParams radio;
  radio.antennas = antennas;
  radio.rmax_override_m = 45.0;
  for (;;) {
    NetworkTopology t;
    const double extent = 12.0 * std::sqrt(double(n_agents));
    for (int k = 0; k < n_agents; ++k) {
      t.agent_ids.push_back(t.node_count());
      t.positions.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent));
    }
    for (int k = 0; k < n_anchors; ++k) {
      t.anchor_ids.push_back(t.node_count());
      t.positions.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent));
    }
    t.net_diameter = 2.2 * extent * std::sqrt(2.0);
    t = connect_by_link_budget(t, radio);
    if (!t.connected) continue;
    const auto g = build_information_graph(t, radio);
    try {
      if (EfimSolver(g).rank_deficient()) continue;
    } catch (const SingularMatrixError&) {
      continue;
    }
    return t;
  }
}

NetworkTopology single_anchor_lattice(double diameter, int antennas) {
  auto t = build_lattice_disk(20.0, diameter);
  t = place_anchors(t, AnchorScheme::single_center());
  RadioParams radio;
  radio.antennas = antennas;
  return connect_by_link_budget(t, radio);
}

}  // namespace

TEST_CASE("criterion 1: series decomposition equals the Schur reference") {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0;
  int networks = 0;
  while (networks < 20) {
    const int n_agents = 10 + int(rng.uniform() * 31);
    const int n_anchors = 2 + int(rng.uniform() * 4);
    const int antennas = rng.uniform() < 0.5 ? 1 : 3;
    const auto t = random_anchored(rng, n_agents, n_anchors, antennas);
    RadioParams radio;
    radio.antennas = antennas;
    radio.rmax_override_m = 45.0;
    const auto g = build_information_graph(t, radio);
    const auto op = transition_operator(g, TransitionMode::AgentsOnly);
    const EfimSolver solver(g, /*force_dense=*/true);
    for (int a = 0; a < g.n_agents; ++a) {
      const Mat2 schur = solver.agent_efim(a);
      const auto d = eoc_decomposition(op, a, 1e-12, 300000);
      const Mat2 via = d.npi * d.eoc;
      worst = std::max(worst, (via - schur).norm() / schur.norm());
    }
    ++networks;
  }
  const double secs = seconds_since(t0);
  const bool pass = worst <= 1e-6 && secs < 30.0;
  report(1, pass, "series vs Schur on 20 networks, max rel " + std::to_string(worst) + ", " +
                      std::to_string(secs) + " s");
  CHECK(worst <= 1e-6);
  CHECK(secs < 30.0);
}

TEST_CASE("criterion 2: routing identity and recurrence on anchored lattices") {
  double worst_routing = 0, worst_recurrence = 0;
  const std::vector<Vec2> anchor_pool{Vec2(0, 0), Vec2(60, 20), Vec2(-40, -60), Vec2(80, -40)};
  for (int n_anchors = 1; n_anchors <= 4; ++n_anchors) {
    std::vector<Vec2> anchors(anchor_pool.begin(), anchor_pool.begin() + n_anchors);
    auto t = build_lattice_disk(20.0, 240.0);
    t = place_anchors(t, AnchorScheme::explicit_points(anchors));
    t = connect_by_link_budget(t, RadioParams{});  // three antennas
    const auto g = build_information_graph(t, RadioParams{});
    const PotentialRouteEvaluator route(g);
    for (int a = 0; a < g.n_agents; ++a) {
      const MatrixXd row = route.hitting_row(a);
      Mat2 sum = Mat2::Zero();
      for (int c = 0; c <= g.n_anchors; ++c) sum += row.block<2, 2>(0, 2 * c);
      worst_routing = std::max(worst_routing, (sum - Mat2::Identity()).cwiseAbs().maxCoeff());
    }
    const auto aux = transition_operator(g, TransitionMode::Auxiliary);
    for (int i = 0; i < aux.dim(); i += 3) {
      const std::vector<int> s{i};
      const MatrixXd f = hitting_by_linear_solve(aux, s);
      worst_recurrence = std::max(
          worst_recurrence,
          (Mat2(f.block<2, 2>(2 * i, 0)) - Mat2::Identity()).cwiseAbs().maxCoeff());
    }
  }
  const bool pass = worst_routing <= 1e-8 && worst_recurrence <= 1e-8;
  report(2, pass, "routing identity max dev " + std::to_string(worst_routing) +
                      ", recurrence max dev " + std::to_string(worst_recurrence));
  CHECK(worst_routing <= 1e-8);
  CHECK(worst_recurrence <= 1e-8);
}

TEST_CASE("criterion 3: potential-kernel round trip on a 500-node lattice") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto t = single_anchor_lattice(500.0, 3);
  const auto g = build_information_graph(t, RadioParams{});
  const EfimSolver direct(g);
  const PotentialRouteEvaluator route(g);
  double worst = 0;
  for (int a = 0; a < g.n_agents; ++a) {
    const Mat2 d = direct.agent_efim(a);
    worst = std::max(worst, (route.efim_routing(a) - d).norm() / d.norm());
  }
  const double secs = seconds_since(t0);
  const bool pass = worst <= 1e-6 && secs < 60.0;
  report(3, pass, std::to_string(g.n_nodes()) + " nodes, max rel " + std::to_string(worst) +
                      ", " + std::to_string(secs) + " s");
  CHECK(worst <= 1e-6);
  CHECK(secs < 60.0);
}

TEST_CASE("criterion 4: range-only single-anchor networks are rank one toward the anchor") {
  double worst_ratio = 0, worst_angle = 0;
  for (const bool lattice : {true, false}) {
    NetworkTopology t;
    if (lattice) {
      t = single_anchor_lattice(300.0, 1);
    } else {
      t = build_stochastic_disk(2.5e-3, 300.0, {}, 404);
      t = place_anchors(t, AnchorScheme::single_center());
      RadioParams radio;
      radio.antennas = 1;
      t = connect_by_link_budget(t, radio);
    }
    RadioParams radio;
    radio.antennas = 1;
    const auto g = build_information_graph(t, radio);
    const Vec2 anchor = g.positions[g.n_agents];
    const EfimSolver solver(g);
    REQUIRE(solver.rank_deficient());
    for (int a = 0; a < g.n_agents; ++a) {
      const Mat2 efim = solver.agent_efim(a);
      Eigen::SelfAdjointEigenSolver<Mat2> es(efim);
      worst_ratio = std::max(worst_ratio, es.eigenvalues()(0) / es.eigenvalues()(1));
      const Vec2 v = es.eigenvectors().col(1);
      const Vec2 d = anchor - g.positions[a];
      const double ang =
          std::abs(std::remainder(std::atan2(v.y(), v.x()) - std::atan2(d.y(), d.x()), M_PI));
      worst_angle = std::max(worst_angle, ang);
    }
  }
  const bool pass = worst_ratio <= 1e-8 && worst_angle <= 1e-6;
  report(4, pass, "max eigenvalue ratio " + std::to_string(worst_ratio) + ", max angle dev " +
                      std::to_string(worst_angle) + " rad");
  CHECK(worst_ratio <= 1e-8);
  CHECK(worst_angle <= 1e-6);
}

TEST_CASE("criterion 5: logarithmic position information path loss") {
  const ExperimentResult res = reproduce_figure(Figure::PathLoss, 0.25, 7);
  REQUIRE(res.points.size() == 2);
  bool pass = true;
  std::string detail;
  for (const auto& p : res.points) {
    REQUIRE(p.errors.empty());
    detail += p.label + " r2=" + std::to_string(p.speb_log_fit.r2);
    pass = pass && p.speb_log_fit.r2 >= 0.9 && p.speb_log_fit.slope > 0;
    // monotone increase per bin across the fit band
    const double lo = 2.0 * 68.129, hi = 0.35 * 500.0;
    double prev = 0;
    for (const auto& b : p.bins) {
      if (b.center < lo || b.center > hi || b.count == 0) continue;
      pass = pass && b.speb > prev;
      detail += " " + std::to_string(b.speb);
      prev = b.speb;
    }
    detail += "; ";
    CHECK(p.speb_log_fit.r2 >= 0.9);
  }
  report(5, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 6: interior error grows with the log of inverse anchor density") {
  const ExperimentResult res = reproduce_figure(Figure::AnchorDensity, 0.3, 11);
  REQUIRE(res.points.size() == 20);
  bool pass = true;
  std::string detail;
  for (const std::string fam : {"lattice-nt1", "lattice-nt3", "stochastic-nt1", "stochastic-nt3"}) {
    std::vector<double> x, y;
    for (const auto& p : res.points)
      if (p.label == fam) {
        REQUIRE(p.errors.size() < std::size_t(p.snapshots_done + p.errors.size()));
        x.push_back(std::log(p.sweep_value));
        y.push_back(p.interior_avg_speb);
      }
    REQUIRE(x.size() == 5);
    const auto [slope, r2] = fit_slope_r2(x, y);
    detail += fam + " r2=" + std::to_string(r2) + " slope=" + std::to_string(slope) + "; ";
    pass = pass && r2 >= 0.85 && slope > 0;
    CHECK(r2 >= 0.85);
  }
  report(6, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 7: concentric anchors split the bound into log radial and quadratic tangential") {
  const ExperimentResult res = reproduce_figure(Figure::Concentric, 0.25, 13);
  REQUIRE(res.points.size() == 1);
  const auto& p = res.points[0];
  REQUIRE(p.errors.empty());
  bool pass = p.radial_log_fit.r2 >= 0.9 && p.tangential_quad_fit.r2 >= 0.9;
  // tangential over radial ratio strictly increases with distance
  const double lo = 2.0 * 68.129, hi = 0.35 * 500.0;
  double prev = 0;
  for (const auto& b : p.bins) {
    if (b.center < lo || b.center > hi || b.count == 0) continue;
    const double ratio = b.dpeb_tangential / b.dpeb_radial;
    pass = pass && ratio > prev;
    prev = ratio;
  }
  report(7, pass, "radial log r2 " + std::to_string(p.radial_log_fit.r2) +
                      ", tangential quad r2 " + std::to_string(p.tangential_quad_fit.r2) +
                      ", ratio ends at " + std::to_string(prev));
  CHECK(p.radial_log_fit.r2 >= 0.9);
  CHECK(p.tangential_quad_fit.r2 >= 0.9);
  CHECK(pass);
}

TEST_CASE("criterion 8: the fitted slope increases with the path loss exponent") {
  const ExperimentResult res = reproduce_figure(Figure::GammaSweep, 0.25, 17);
  REQUIRE(res.points.size() == 3);
  std::string detail;
  bool pass = true;
  double prev = -1e30;
  for (const auto& p : res.points) {
    REQUIRE(p.errors.empty());
    pass = pass && p.speb_log_fit.slope > prev;
    prev = p.speb_log_fit.slope;
    detail += "gamma " + std::to_string(p.sweep_value) + " slope " +
              std::to_string(p.speb_log_fit.slope) + "; ";
  }
  report(8, pass, detail);
  CHECK(pass);
}

TEST_CASE("criterion 9: estimators track and respect the bound") {
  const ExperimentResult res = reproduce_figure(Figure::Estimators, 0.1, 19);
  REQUIRE(res.points.size() == 1);
  const auto& p = res.points[0];
  bool info_ok = true, order_ok = true;
  int beyond = 0;
  for (const auto& a : p.aml_bins) {
    if (a.count < 20) continue;
    if (a.mse + 3.0 * a.mse_stderr < a.speb_avg) info_ok = false;
    if (a.center > 4.0 * 43.0) {
      for (const auto& s : p.seq_bins)
        if (s.center == a.center && s.count >= 20) {
          ++beyond;
          if (s.mse <= a.mse) order_ok = false;
        }
    }
  }
  const bool fits_ok = p.aml_log_fit.r2 >= 0.8 && p.seq_linear_fit.r2 >= 0.8 &&
                       p.seq_linear_fit.slope > 0;
  const bool pass = info_ok && order_ok && fits_ok && beyond >= 1;
  report(9, pass, "aml log r2 " + std::to_string(p.aml_log_fit.r2) + ", seq linear r2 " +
                      std::to_string(p.seq_linear_fit.r2) + ", info inequality " +
                      (info_ok ? "holds" : "violated") + ", beyond-4-hop bins " +
                      std::to_string(beyond));
  CHECK(info_ok);
  CHECK(order_ok);
  CHECK(p.aml_log_fit.r2 >= 0.8);
  CHECK(p.seq_linear_fit.r2 >= 0.8);
  CHECK(p.seq_linear_fit.slope > 0);
}

TEST_CASE("criterion 10: infinite-lattice potential against the finite kernel") {
  // 500-node single-auxiliary lattice; displacements measured between
  // symmetric interior pairs
  auto t = build_lattice_disk(20.0, 500.0);
  t = connect_by_link_budget(t, RadioParams{});
  const auto g = build_information_graph(t, RadioParams{});
  const auto aux = transition_operator(g, TransitionMode::Auxiliary);
  const auto kernel = potential_kernel_finite(aux);

  bool diag_ok = true;
  for (int a = 0; a < kernel.n; ++a)
    diag_ok = diag_ok && kernel.block(a, a).cwiseAbs().maxCoeff() == 0.0;

  auto find_node = [&](int x, int y) {
    for (int v = 0; v < g.n_nodes(); ++v)
      if ((g.positions[v] - Vec2(20.0 * x, 20.0 * y)).norm() < 1e-9) return v;
    return -1;
  };
  const NeighborStencil st = lattice_stencil(RadioParams{}, 20.0);
  double worst = 0;
  std::string per_d;
  for (int d = 5; d <= 20; d += 3) {
    const int a = find_node(-(d - d / 2), 0), b = find_node(d / 2, 0);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    const Mat2 fin = kernel.block(a, b);
    const Mat2 inf = potential_infinite(st, {d, 0});
    const double rel = (inf - fin).norm() / fin.norm();
    worst = std::max(worst, rel);
    per_d += "d=" + std::to_string(d) + ":" + std::to_string(rel) + " ";
  }

  // log growth of the infinite kernel over 5..50 steps
  std::vector<double> dist, val;
  for (int d = 5; d <= 50; d += 3) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(potential_infinite(st, {d, 0}));
    dist.push_back(d);
    val.push_back(es.eigenvalues().maxCoeff());
  }
  const FitResult logfit = asymptote_fit(dist, val, FitModel::Log);

  const bool pass = worst <= 0.05 && diag_ok && logfit.r2 >= 0.95;
  report(10, pass, "block deviation " + per_d + "(5% required: fails for separations that are "
                   "not small against the 25-step disk; boundary effect, see decisions ledger), "
                   "diag zero " + std::string(diag_ok ? "yes" : "no") + ", log fit r2 " +
                   std::to_string(logfit.r2));
  CHECK(diag_ok);
  CHECK(logfit.r2 >= 0.95);
  CHECK(worst <= 0.05);  // documented spec defect: fails at this network size
}

TEST_CASE("criterion 11: reduced-complexity objective is exact and at least 3x faster") {
  // ten samples at 500 agents / 5 anchors
  std::vector<NetworkTopology> samples;
  RadioParams radio;
  radio.rmax_override_m = 43.0;
  std::uint64_t seed = 3000;
  while (samples.size() < 10) {
    auto t = build_stochastic_disk(2.5e-3, 504.6, {}, derive_seed(777, seed++));
    t = place_anchors(t, AnchorScheme::explicit_points(
                             {Vec2(0, 0), Vec2(150, 80), Vec2(-140, 90), Vec2(60, -160),
                              Vec2(-90, -120)}));
    t = connect_by_link_budget(t, radio);
    if (!t.connected) continue;
    samples.push_back(std::move(t));
  }
  REQUIRE(samples[0].agent_ids.size() == 500);
  REQUIRE(samples[0].anchor_ids.size() == 5);

  double worst = 0;
  for (const auto& s : samples) {
    const std::vector<NetworkTopology> one{s};
    const double naive = naive_network_objective(one, radio);
    const double fast = fast_network_objective(one, radio);
    worst = std::max(worst, std::abs(fast - naive) / naive);
  }
  const auto t_fast = std::chrono::steady_clock::now();
  fast_network_objective(samples, radio);
  const double fast_secs = seconds_since(t_fast);
  const auto t_naive = std::chrono::steady_clock::now();
  naive_network_objective(samples, radio);
  const double naive_secs = seconds_since(t_naive);
  const double speedup = naive_secs / fast_secs;

  const bool pass = worst <= 1e-6 && speedup >= 3.0;
  report(11, pass, "max rel " + std::to_string(worst) + ", speedup " + std::to_string(speedup) +
                       "x (" + std::to_string(naive_secs) + " s vs " +
                       std::to_string(fast_secs) + " s)");
  CHECK(worst <= 1e-6);
  CHECK(speedup >= 3.0);
}
