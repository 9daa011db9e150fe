#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cli_common.hpp"
#include "latentlab/dynamics.hpp"
#include "latentlab/format.hpp"
#include "latentlab/report.hpp"
#include "latentlab/tda.hpp"

using namespace latentlab;

int main(int argc, char** argv) {
  CLI::App app{"Persistent homology of latent trajectories"};
  app.require_subcommand(1);

  auto* classify_cmd = app.add_subcommand("classify", "classify the limiting behaviour of trajectory files");
  std::vector<std::string> inputs;
  std::size_t burn_in = 3001;
  std::size_t end = 3400;
  ClassifyParams params;
  std::optional<double> thresh;
  std::string report_path;
  classify_cmd->add_option("--in", inputs, "trajectory files")->required();
  classify_cmd->add_option("--burn-in", burn_in, "first kept iterate")->default_val(3001);
  classify_cmd->add_option("--end", end, "last kept iterate (inclusive)")->default_val(3400);
  classify_cmd->add_option("--alpha", params.alpha, "threshold as a fraction of the diameter")->default_val(0.25);
  classify_cmd->add_option("--ball-radius", params.ball_radius, "fixed-point ball radius")->default_val(0.01);
  classify_cmd->add_option("--thresh", thresh, "absolute persistence threshold (overrides alpha)");
  classify_cmd->add_option("--report", report_path, "CSV report")->required();

  auto* diagram_cmd = app.add_subcommand("diagram", "write the H0/H1 persistence diagram of a trajectory");
  std::string in_path;
  std::string out_path;
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  diagram_cmd->add_option("--in", in_path, "trajectory file")->required();
  diagram_cmd->add_option("--out", out_path, "diagram CSV")->required();
  diagram_cmd->add_option("--burn-in", first, "first kept iterate");
  diagram_cmd->add_option("--end", last, "last kept iterate (inclusive)");

  return cli::run(app, argc, argv, [&] {
    if (classify_cmd->parsed()) {
      if (burn_in > end) throw ConfigError("--burn-in must not exceed --end");
      if (!(params.alpha >= 0.0) || !(params.ball_radius >= 0.0)) {
        throw ConfigError("--alpha and --ball-radius must be >= 0");
      }
      params.thresh = thresh;
      SweepReport report;
      report.columns = {{"file", CellKind::Text},     {"points", CellKind::Integer}, {"behaviour", CellKind::Text},
                        {"b0", CellKind::Integer},    {"b1", CellKind::Integer},     {"diameter", CellKind::Real},
                        {"thresh", CellKind::Real},   {"ball_rule", CellKind::Boolean}, {"error", CellKind::Text}};
      int failed = 0;
      for (const auto& file : inputs) {
        try {
          const Trajectory traj = window(read_trajectory(file), burn_in, end);
          const Classification c = classify(traj, params);
          report.add_row({file, std::to_string(traj.size()), to_string(c.behaviour.kind),
                          std::to_string(c.signature.b0), std::to_string(c.signature.b1), format_real(c.diameter),
                          format_real(c.signature.thresh), c.ball_rule ? "true" : "false", ""});
        } catch (const Error& e) {
          ++failed;
          std::cerr << file << ": " << e.what() << '\n';
          report.add_row({file, "", "", "", "", "", "", "", e.what()});
        }
      }
      emit_report(report, ReportFormat::Csv, report_path);
      return failed == 0 ? cli::kSuccess : cli::kRuntimeError;
    }

    Trajectory traj = read_trajectory(in_path);
    if (first || last) traj = window(traj, first.value_or(0), last.value_or(traj.size() - 1));
    const PointCloud cloud = traj.points();
    PersistenceDiagram diagram;
    if (cloud.rows() > 0) {
      const Eigen::Index k = std::min(cloud.rows(), cloud.cols());
      diagram = rips_persistence(distance_matrix(svd_project(cloud, k)), 1);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    write_diagram_csv(out, diagram);
    if (!out) throw IoError("failed writing " + out_path);
    return cli::kSuccess;
  });
}
