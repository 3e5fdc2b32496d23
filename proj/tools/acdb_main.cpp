// Command-line front end: config-driven runs, experiment harness, and
// reproducibility manifests.
//
// Exit codes: 0 success, 2 config/validation error, 3 solver failure,
// 4 assertion (report) failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "acdb/config.hpp"
#include "acdb/io.hpp"
#include "acdb/svg.hpp"

namespace fs = std::filesystem;
using namespace acdb;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Emitter {
  fs::path dir;
  bool quiet = false;
  RunManifest manifest;

  void add(const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    manifest.file_hashes[name] = fnv1a64_hex(content);
    if (!quiet) std::cout << "  wrote " << (dir / name).string() << "\n";
  }
  void finish() {
    write_text_file(dir / "manifest.json", manifest.to_json());
    if (!quiet) std::cout << "  wrote " << (dir / "manifest.json").string() << "\n";
  }
};

std::vector<double> parse_time_list(const std::string& arg) {
  std::vector<double> out;
  std::istringstream is(arg);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::string snapshot_basename(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_t%.6f", t);
  return buf;
}

void emit_trajectory_outputs(Emitter& em, const StripMesh& mesh, const Trajectory& traj,
                             bool raw) {
  em.add("trajectory.csv", trajectory_csv(traj));
  for (const auto& [t, field] : traj.snapshots) {
    std::string base = snapshot_basename(t);
    em.add(base + ".csv", field_csv(mesh, field, t));
    if (raw) {
      em.add(base + ".raw", field_raw(field));
      em.add(base + ".raw.json", field_raw_sidecar(mesh, t, base + ".raw"));
    }
  }

  SvgSeries etotal{"total", {}, {}};
  for (const StepRecord& r : traj.records) {
    etotal.x.push_back(r.t);
    etotal.y.push_back(r.energy.total());
  }
  std::string esvg = render_line_plot(
      {etotal}, {"energy vs t", "t", "energy", false, false, false,
                 "config " + fnv1a64_hex(em.manifest.config_echo)});
  if (esvg.empty()) {
    if (!em.quiet) std::cerr << "warning: empty trajectory, skipping energy plot\n";
  } else {
    em.add("plot_energy.svg", esvg);
  }

  SvgSeries l2b{"l2 bulk", {}, {}}, l2g{"l2 boundary", {}, {}}, h1{"h1 bulk", {}, {}};
  for (const StepRecord& r : traj.records) {
    l2b.x.push_back(r.t);
    l2b.y.push_back(r.norm.l2_bulk);
    l2g.x.push_back(r.t);
    l2g.y.push_back(r.norm.l2_boundary);
    h1.x.push_back(r.t);
    h1.y.push_back(r.norm.h1_semi_bulk);
  }
  std::string nsvg = render_line_plot(
      {l2b, l2g, h1}, {"norms vs t", "t", "norm", false, false, false,
                       "config " + fnv1a64_hex(em.manifest.config_echo)});
  if (nsvg.empty()) {
    if (!em.quiet) std::cerr << "warning: empty trajectory, skipping norm plot\n";
  } else {
    em.add("plot_norms.svg", nsvg);
  }
}

void emit_report_outputs(Emitter& em, const ExperimentReport& rep,
                         const std::string& echo, const SvgSeries& curve,
                         const SvgOptions& opts) {
  em.add("report_" + rep.id + ".json", report_json(rep, echo));
  em.add("report_" + rep.id + ".txt", report_text(rep));
  if (!curve.x.empty()) {
    std::string svg = render_line_plot({curve}, opts);
    if (!svg.empty()) em.add("plot_" + rep.id + ".svg", svg);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn evolution with singular potentials and dynamic boundary "
               "conditions on a periodic strip"};
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir = "./out", snapshots_arg;
  int threads = (int)std::max(1u, std::thread::hardware_concurrency());
  bool quiet = false, raw = false;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory (default ./out; env AC_DYNBC_OUT overrides)");
  app.add_option("--snapshots", snapshots_arg, "comma-separated snapshot times for solve");
  app.add_option("--threads", threads, "parallel sweep workers (default: hardware)");
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.add_flag("--raw", raw, "also dump snapshots as raw float64 with JSON sidecars");

  auto* cmd_solve = app.add_subcommand("solve", "integrate the configured problem");
  auto* cmd_contdep = app.add_subcommand("contdep", "continuous-dependence study");
  auto* cmd_eps = app.add_subcommand("sweep-eps", "regularization sweep eps -> 0");
  auto* cmd_nu = app.add_subcommand("sweep-nu", "boundary-diffusion sweep nu -> 0");
  auto* cmd_mms = app.add_subcommand("mms", "manufactured-solution convergence orders");
  auto* cmd_energy = app.add_subcommand("energy", "zero-forcing energy decay run");
  auto* cmd_graph = app.add_subcommand("graph-check", "monotone-graph property suite");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (const char* env = std::getenv("AC_DYNBC_OUT")) out_dir = env;

  auto t_start = std::chrono::steady_clock::now();
  auto phase_time = [&t_start] {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - t_start).count();
    t_start = now;
    return s;
  };

  try {
    ResolvedConfig rc = parse_config_file(config_path);
    if (!snapshots_arg.empty())
      for (double t : parse_time_list(snapshots_arg))
        rc.solver.snapshot_times.push_back(t);

    Emitter em;
    em.dir = out_dir;
    em.quiet = quiet;
    fs::create_directories(em.dir);
    em.manifest.tool_version = kVersion;
    em.manifest.config_echo = rc.echo;
    em.manifest.phase_seconds["parse"] = phase_time();

    bool ok = true;

    if (*cmd_solve) {
      em.manifest.command = "solve";
      Solver solver(rc.solver);
      Trajectory traj = solver.run();
      em.manifest.phase_seconds["run"] = phase_time();
      emit_trajectory_outputs(em, rc.solver.mesh, traj, raw);
    } else if (*cmd_contdep) {
      em.manifest.command = "contdep";
      auto rep = run_contdep(rc.solver, rc.experiment.contdep_spec,
                             rc.experiment.amplitudes, threads);
      em.manifest.phase_seconds["run"] = phase_time();
      SvgSeries curve{"LHS(delta)", {}, {}};
      for (const auto& row : rep.table)
        if (row[0] > 0.0 && row[1] > 0.0) {
          curve.x.push_back(row[0]);
          curve.y.push_back(row[1]);
        }
      emit_report_outputs(em, rep, rc.echo, curve,
                          {"continuous dependence", "delta", "LHS", true, true, true,
                           "config " + fnv1a64_hex(rc.echo)});
      if (!quiet) std::cout << report_text(rep);
      ok = rep.all_pass();
    } else if (*cmd_eps) {
      em.manifest.command = "sweep-eps";
      auto rep = run_eps_sweep(rc.solver, rc.experiment.eps_list, threads);
      em.manifest.phase_seconds["run"] = phase_time();
      SvgSeries curve{"cauchy gap", {}, {}};
      for (const auto& row : rep.table)
        if (!std::isnan(row[2]) && row[2] > 0.0) {
          curve.x.push_back(row[0]);
          curve.y.push_back(row[2]);
        }
      emit_report_outputs(em, rep, rc.echo, curve,
                          {"eps sweep", "eps", "gap", true, true, true,
                           "config " + fnv1a64_hex(rc.echo)});
      if (!quiet) std::cout << report_text(rep);
      ok = rep.all_pass();
    } else if (*cmd_nu) {
      em.manifest.command = "sweep-nu";
      auto rep = run_nu_sweep(rc.solver, rc.experiment.nu_list, threads);
      em.manifest.phase_seconds["run"] = phase_time();
      SvgSeries curve{"e(nu)", {}, {}};
      for (const auto& row : rep.table)
        if (row[1] > 0.0) {
          curve.x.push_back(row[0]);
          curve.y.push_back(row[1]);
        }
      emit_report_outputs(em, rep, rc.echo, curve,
                          {"nu sweep", "nu", "e", true, true, true,
                           "config " + fnv1a64_hex(rc.echo)});
      if (!quiet) std::cout << report_text(rep);
      ok = rep.all_pass();
    } else if (*cmd_mms) {
      em.manifest.command = "mms";
      auto rep = run_mms(rc.solver, rc.experiment.levels, rc.experiment.temporal_dts,
                         rc.experiment.x_phase, threads);
      em.manifest.phase_seconds["run"] = phase_time();
      SvgSeries curve{"bulk error", {}, {}};
      for (const auto& row : rep.table)
        if (row[0] == 0.0 && row[3] > 0.0) {
          curve.x.push_back(1.0 / row[1]);
          curve.y.push_back(row[3]);
        }
      emit_report_outputs(em, rep, rc.echo, curve,
                          {"manufactured-solution errors", "h", "error", true, true, true,
                           "config " + fnv1a64_hex(rc.echo)});
      if (!quiet) std::cout << report_text(rep);
      ok = rep.all_pass();
    } else if (*cmd_energy) {
      em.manifest.command = "energy";
      auto rep = run_energy_decay(rc.solver);
      em.manifest.phase_seconds["run"] = phase_time();
      SvgSeries curve{"energy", {}, {}};
      for (const auto& row : rep.table) {
        curve.x.push_back(row[0]);
        curve.y.push_back(row[1]);
      }
      emit_report_outputs(em, rep, rc.echo, curve,
                          {"energy decay", "t", "energy", false, false, false,
                           "config " + fnv1a64_hex(rc.echo)});
      if (!quiet) std::cout << report_text(rep);
      ok = rep.all_pass();
    } else if (*cmd_graph) {
      em.manifest.command = "graph-check";
      auto rep = run_graph_check(rc.solver.bulk, rc.solver.boundary);
      em.manifest.phase_seconds["run"] = phase_time();
      emit_report_outputs(em, rep, rc.echo, {}, {});
      std::cout << report_text(rep);
      auto samples = default_compatibility_samples(rc.solver.boundary.graph);
      auto compat =
          check_compatibility(rc.solver.bulk.graph, rc.solver.boundary.graph, samples);
      std::cout << "compatibility: " << compat.detail << "\n";
      ok = rep.all_pass();
    }

    em.manifest.phase_seconds["emit"] = phase_time();
    em.finish();
    return ok ? 0 : 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CompatibilityError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
