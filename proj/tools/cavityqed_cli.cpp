// Command-line front end: emits CSV time series, g x t sweeps, optimal
// interaction times and closed-form vs master-equation comparisons.

#include "cavityqed/cavityqed.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace cavityqed;

struct Options {
  double g = 1.0;
  double k = 0.1;
  double alpha_re = 1.0;
  double alpha_im = 0.0;
  TimeGrid grid;
  CouplingAxis g_axis;
  double t_max = 5.0;
  double resolution = 1e-3;
  bool oracle = false;
  std::optional<int> n_max;
  std::optional<double> dt;
  std::optional<double> rtol;
  std::string output;
};

void add_params(CLI::App* cmd, Options& o) {
  cmd->add_option("--g", o.g, "Effective atom-cavity coupling g (half the bare coupling)")
      ->capture_default_str();
  cmd->add_option("--k", o.k,
                  "Cavity decay constant k of the dissipator k(2a.a+ - a+a. - .a+a); photon "
                  "number decays at 2k")
      ->capture_default_str();
  cmd->add_option("--alpha-re", o.alpha_re, "Real part of the initial coherent amplitude")
      ->capture_default_str();
  cmd->add_option("--alpha-im", o.alpha_im, "Imaginary part of the initial coherent amplitude")
      ->capture_default_str();
  cmd->add_option("--output", o.output, "Output CSV path (default: standard output)");
}

void add_time_grid(CLI::App* cmd, Options& o) {
  cmd->add_option("--t-start", o.grid.start, "First sample time")->capture_default_str();
  cmd->add_option("--t-end", o.grid.end, "Last sample time")->capture_default_str();
  cmd->add_option("--points", o.grid.points, "Number of time samples (>= 2)")
      ->capture_default_str();
}

void add_oracle(CLI::App* cmd, Options& o) {
  cmd->add_option("--n-max", o.n_max, "Fock cutoff (default: adequacy rule)");
  cmd->add_option("--dt", o.dt, "Base RK4 step (default: 1e-3/g)");
  cmd->add_option("--rtol", o.rtol, "Step-halving acceptance threshold (default: 1e-9)");
}

int emit(const RunOutput& out, const std::string& path) {
  if (path.empty()) {
    std::cout << out.csv << std::flush;
  } else {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot open output file " << path << "\n";
      return kExitUsage;
    }
    file << out.csv;
    file.close();
    if (!file) {
      std::cerr << "error: failed writing " << path << "\n";
      return kExitUsage;
    }
  }
  if (!out.message.empty()) std::cerr << out.message << "\n";
  return out.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven two-level atom in a damped cavity: entanglement, purity and optimal times"};
  app.require_subcommand(1);
  Options o;

  auto* evolve = app.add_subcommand("evolve", "Concurrence, negativity and linear entropies vs t");
  add_params(evolve, o);
  add_time_grid(evolve, o);
  evolve->add_flag("--oracle", o.oracle, "Append master-equation concurrence and trace distance");
  add_oracle(evolve, o);

  auto* sweep = app.add_subcommand(
      "sweep",
      "Concurrence on a g x t grid (e.g. --k 0 or --k 0.05 with --alpha-re 1 for the two panels "
      "of the g-t concurrence map)");
  add_params(sweep, o);
  add_time_grid(sweep, o);
  sweep->add_option("--g-start", o.g_axis.start, "First coupling value")->capture_default_str();
  sweep->add_option("--g-end", o.g_axis.end, "Last coupling value")->capture_default_str();
  sweep->add_option("--g-points", o.g_axis.points, "Number of coupling values")
      ->capture_default_str();

  auto* optimize = app.add_subcommand("optimize", "Interaction time maximising concurrence");
  add_params(optimize, o);
  optimize->add_option("--t-max", o.t_max, "End of the search window")->capture_default_str();
  optimize->add_option("--resolution", o.resolution, "Final bracket width")->capture_default_str();

  auto* compare = app.add_subcommand(
      "compare", "Closed form vs RK4 master-equation integration (exit 3 if any row > 1e-6)");
  add_params(compare, o);
  add_time_grid(compare, o);
  add_oracle(compare, o);

  auto* entropy = app.add_subcommand("entropy", "Closed-form linear entropies S, S_A, S_F vs t");
  add_params(entropy, o);
  add_time_grid(entropy, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunSpec spec;
    spec.params = SystemParams(o.g, o.k, Complex(o.alpha_re, o.alpha_im));
    spec.grid = o.grid;
    spec.g_axis = o.g_axis;
    spec.t_max = o.t_max;
    spec.resolution = o.resolution;
    spec.oracle = o.oracle;
    spec.oracle_cfg = OracleOverrides{o.n_max, o.dt, o.rtol};
    if (*evolve) spec.subcommand = Subcommand::evolve;
    if (*sweep) spec.subcommand = Subcommand::sweep;
    if (*optimize) spec.subcommand = Subcommand::optimize;
    if (*compare) spec.subcommand = Subcommand::compare;
    if (*entropy) spec.subcommand = Subcommand::entropy;
    return emit(run(spec), o.output);
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const InvalidStateError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitUsage;
  }
}
