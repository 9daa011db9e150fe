#include <fstream>
#include <string>

#include "cli_common.hpp"
#include "latentlab/dynamics.hpp"
#include "latentlab/format.hpp"

using namespace latentlab;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic latent trajectories and residual series"};
  app.require_subcommand(1);

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic trajectory file");
  std::string kind = "fixedpoint";
  SyntheticSpec spec;
  std::string out_path;
  synth_cmd->add_option("--kind", kind, "fixedpoint, twopoint or twoloop")->required();
  synth_cmd->add_option("--dim", spec.dim, "latent dimension")->default_val(128);
  synth_cmd->add_option("--len", spec.length, "number of iterates")->default_val(400);
  synth_cmd->add_option("--noise", spec.noise_sigma, "RMS norm of the per-iterate Gaussian noise")->default_val(0.0);
  synth_cmd->add_option("--seed", spec.seed, "seed")->default_val(0);
  synth_cmd->add_option("--rate", spec.rate, "contraction rate toward the fixed point")->default_val(0.5);
  synth_cmd->add_option("--offset", spec.offset, "initial distance from the fixed point")->default_val(0.1);
  synth_cmd->add_option("--separation", spec.separation, "distance between the two centres")->default_val(1.0);
  synth_cmd->add_option("--radius", spec.radius, "loop radius")->default_val(0.5);
  synth_cmd->add_option("--out", out_path, "trajectory file")->required();

  auto* res_cmd = app.add_subcommand("residuals", "write ||u_{j+1} - u_j|| as CSV");
  std::string in_path;
  std::string csv_path;
  res_cmd->add_option("--in", in_path, "trajectory file")->required();
  res_cmd->add_option("--out", csv_path, "CSV output")->required();

  return cli::run(app, argc, argv, [&] {
    if (synth_cmd->parsed()) {
      try {
        spec.kind = parse_synthetic_kind(kind);
        spec.validate();
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      write_trajectory(synth(spec), out_path);
      return cli::kSuccess;
    }
    const Trajectory traj = read_trajectory(in_path);
    const Eigen::VectorXd r = residuals(traj);
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + csv_path);
    out << "j,residual\n";
    for (Eigen::Index j = 0; j < r.size(); ++j) out << j << ',' << format_real(r[j]) << '\n';
    if (!out) throw IoError("failed writing " + csv_path);
    return cli::kSuccess;
  });
}
