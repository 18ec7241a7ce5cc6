// Command-line front end: scenario generation, bound evaluation,
// random-walk diagnostics, spectral sweeps, estimator runs and the
// canned figure reproductions.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "netloc/eoc.hpp"
#include "netloc/experiment.hpp"
#include "netloc/potential.hpp"
#include "netloc/rng.hpp"

using namespace netloc;

namespace {

ScenarioConfig load_cfg(const std::string& path, std::uint64_t seed_override, int threads,
                        const std::string& out_dir) {
  ScenarioConfig cfg = path.empty() ? ScenarioConfig{} : ScenarioConfig::load(path);
  if (seed_override) cfg.seed = seed_override;
  if (threads > 0) cfg.threads = threads;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

std::string mat_json(const Mat2& m) {
  nlohmann::json j = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative network localization bounds engine"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  double scale = 0.25;
  app.add_option("--config", config_path, "scenario config (json)");
  app.add_option("--seed", seed, "master seed override");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "snapshot worker threads");
  app.add_option("--scale", scale, "figure scale factor in (0,1]");

  auto* gen = app.add_subcommand("gen", "build a topology and export node/edge CSV");
  auto* bound = app.add_subcommand("bound", "compute per-agent bounds");
  auto* eoc_cmd = app.add_subcommand("eoc", "per-agent cooperation diagnostics (json lines)");
  int eoc_agent = -1;
  eoc_cmd->add_option("--agent", eoc_agent, "agent index (topology id); default all");
  auto* spectral_cmd = app.add_subcommand("spectral", "stencil transform sweep and potential curve");
  int spectral_maxdist = 30;
  spectral_cmd->add_option("--max-dist", spectral_maxdist, "largest displacement (lattice steps)");
  auto* estimate = app.add_subcommand("estimate", "run the estimator comparison");
  auto* reproduce = app.add_subcommand("reproduce", "run a canned figure recipe");
  std::string figure = "fig4";
  reproduce->add_option("--figure", figure,
                        "fig4 | fig5/6-holes | fig6-density | fig7-gamma | fig8-concentric | "
                        "fig9-ellipses | fig10/11-estimators");
  bool allow_large = false;
  reproduce->add_flag("--allow-large", allow_large, "lift the desk-scale node cap");
  auto* export_cmd = app.add_subcommand("export", "re-export stored bound CSV as SVG ellipses");
  std::string export_bounds, export_nodes, export_svg = "ellipses.svg";
  export_cmd->add_option("--bounds", export_bounds, "bounds csv produced by `bound`")->required();
  export_cmd->add_option("--nodes", export_nodes, "nodes csv produced by `gen`")->required();
  export_cmd->add_option("--svg", export_svg, "output svg path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const ScenarioConfig cfg = load_cfg(config_path, seed, threads, out_dir);
      const NetworkTopology topo = make_topology(cfg, derive_seed(cfg.seed, 0));
      write_topology_csv(std::filesystem::path(cfg.out_dir) / "nodes.csv",
                         std::filesystem::path(cfg.out_dir) / "edges.csv", topo,
                         {"topology", cfg.hash(), cfg.seed});
      std::cout << "nodes=" << topo.node_count() << " edges=" << topo.edges.size()
                << " connected=" << (topo.connected ? "yes" : "no") << "\n";
    } else if (bound->parsed() || estimate->parsed()) {
      ScenarioConfig cfg = load_cfg(config_path, seed, threads, out_dir);
      if (estimate->parsed()) cfg.run_estimators = true;
      const ExperimentResult res = run_scenario(cfg);
      const auto written = export_results(res, ExportFormat::Csv, cfg.out_dir);
      for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
      for (const auto& e : res.points[0].errors) std::cerr << "warning: " << e << "\n";
      std::cout << "snapshots=" << res.points[0].snapshots_done
                << " wall_ms=" << res.wall_ms << "\n";
    } else if (eoc_cmd->parsed()) {
      const ScenarioConfig cfg = load_cfg(config_path, seed, threads, out_dir);
      const NetworkTopology topo = make_topology(cfg, derive_seed(cfg.seed, 0));
      const InformationGraph g = build_information_graph(topo, cfg.radio);
      const TransitionOperator t = transition_operator(g, TransitionMode::AgentsOnly);
      const EfimSolver solver(g);
      std::filesystem::create_directories(cfg.out_dir);
      std::ofstream os(std::filesystem::path(cfg.out_dir) / "eoc.jsonl");
      for (int a = 0; a < g.n_agents; ++a) {
        if (eoc_agent >= 0 && g.node_to_topo[a] != eoc_agent) continue;
        const Mat2 exact = solver.agent_efim(a);
        const EocDecomposition d = eoc_decomposition(t, a, 1e-10, 100000, &exact);
        nlohmann::json j;
        j["agent"] = g.node_to_topo[a];
        j["npi"] = mat_json(d.npi);
        j["delta"] = mat_json(d.delta);
        j["eoc"] = mat_json(d.eoc);
        j["hitting_self"] = mat_json(d.hitting);
        j["truncation"] = {{"n", d.truncation_n},
                           {"residual", d.truncation_residual},
                           {"converged", d.converged}};
        os << j.dump() << "\n";
      }
      std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / "eoc.jsonl").string() << "\n";
    } else if (spectral_cmd->parsed()) {
      const ScenarioConfig cfg = load_cfg(config_path, seed, threads, out_dir);
      const NeighborStencil st = lattice_stencil(cfg.radio, cfg.topology.spacing_m);
      std::vector<SpectralSample> sweep;
      const int ngrid = 33;
      for (int a = 0; a < ngrid; ++a)
        for (int b = 0; b < ngrid; ++b) {
          const Vec2 theta(-M_PI + 2 * M_PI * a / (ngrid - 1), -M_PI + 2 * M_PI * b / (ngrid - 1));
          if (theta.norm() > M_PI) continue;
          sweep.push_back(pseudo_characteristic(st, theta));
        }
      write_spectral_csv(std::filesystem::path(cfg.out_dir) / "spectral.csv", sweep,
                         {"spectral", cfg.hash(), cfg.seed});
      std::vector<PotentialCurveRow> curve;
      for (int d = 1; d <= spectral_maxdist; ++d) {
        const Mat2 p = potential_infinite(st, {d, 0});
        Eigen::SelfAdjointEigenSolver<Mat2> es(p);
        curve.push_back({static_cast<double>(d), es.eigenvalues().minCoeff(),
                         es.eigenvalues().maxCoeff()});
      }
      write_potential_curve_csv(std::filesystem::path(cfg.out_dir) / "potential.csv", curve,
                                {"potential-curve", cfg.hash(), cfg.seed});
      std::cout << "wrote spectral.csv and potential.csv under " << cfg.out_dir << "\n";
    } else if (reproduce->parsed()) {
      const ExperimentResult res = reproduce_figure(figure_from_name(figure), scale,
                                                    seed ? seed : 1, out_dir, threads, allow_large);
      std::cout << res.name << ": " << res.points.size() << " series, wall_ms=" << res.wall_ms
                << "\n";
      for (const auto& p : res.points) {
        std::cout << "  " << p.label << " sweep=" << p.sweep_value
                  << " snapshots=" << p.snapshots_done;
        if (p.speb_log_fit.r2 > 0)
          std::cout << " speb_logfit(slope=" << p.speb_log_fit.slope
                    << ", r2=" << p.speb_log_fit.r2 << ")";
        std::cout << "\n";
        for (const auto& e : p.errors) std::cerr << "  warning: " << e << "\n";
      }
    } else if (export_cmd->parsed()) {
      // re-read the bound rows and node positions, then draw
      auto read_csv = [](const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot read " + path);
        std::vector<std::vector<std::string>> rows;
        std::string line;
        while (std::getline(is, line)) {
          if (line.empty() || line[0] == '#') continue;
          std::vector<std::string> cells;
          std::stringstream ss(line);
          std::string c;
          while (std::getline(ss, c, ',')) cells.push_back(c);
          rows.push_back(cells);
        }
        return rows;
      };
      NetworkTopology topo;
      auto nodes = read_csv(export_nodes);
      double extent = 0;
      for (std::size_t k = 1; k < nodes.size(); ++k) {
        const Vec2 p(std::stod(nodes[k][1]), std::stod(nodes[k][2]));
        if (std::stoi(nodes[k][3]))
          topo.anchor_ids.push_back(static_cast<int>(topo.positions.size()));
        else
          topo.agent_ids.push_back(static_cast<int>(topo.positions.size()));
        topo.positions.push_back(p);
        extent = std::max(extent, p.norm());
      }
      topo.net_diameter = 2 * extent;
      std::vector<AgentBoundRecord> recs;
      auto bounds = read_csv(export_bounds);
      for (std::size_t k = 1; k < bounds.size(); ++k) {
        AgentBoundRecord r;
        r.agent_id = std::stoi(bounds[k][0]);
        r.x = std::stod(bounds[k][1]);
        r.y = std::stod(bounds[k][2]);
        r.ellipse_a = std::stod(bounds[k][7]);
        r.ellipse_b = std::stod(bounds[k][8]);
        r.ellipse_theta = std::stod(bounds[k][9]);
        recs.push_back(r);
      }
      write_ellipse_svg(export_svg, topo, recs);
      std::cout << "wrote " << export_svg << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
