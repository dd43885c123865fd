// cradle: file-based front end.
//
// Exit codes: 0 success, 1 numeric failure, 2 bad input or usage.
// Data goes to stdout or --out; diagnostics go to stderr.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cradle/cradle.hpp"
#include "cradle/io.hpp"

namespace {

using namespace cradle;

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  std::vector<double> points() const { return uniform_grid(lo, hi, count); }
};

// "a:b:n"
Grid parse_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) throw InputError("grid must look like a:b:n, got '" + text + "'");
  Grid g;
  g.lo = io::parse_real(text.substr(0, first));
  g.hi = io::parse_real(text.substr(first + 1, second - first - 1));
  const std::string count = text.substr(second + 1);
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(count, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != count.size() || count.empty() || n < 1) throw InputError("grid point count must be a positive integer");
  if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw InputError("grid ends must be finite");
  if (n > 1 && !(g.lo < g.hi)) throw InputError("grid must be ascending");
  g.count = static_cast<std::size_t>(n);
  return g;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(io::parse_real(item));
  if (out.empty()) throw InputError("empty list");
  return out;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty())
    std::cout << text << std::flush;
  else
    io::write_text(out_path, text);
}

std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

// Cradle from --matrix/--vector files, or from a node profile.
struct CradleSource {
  std::string matrix;
  std::string vector;
  std::string nodes;
  std::string weights;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--matrix", matrix, "Hermitian S (JSON)");
    cmd->add_option("--vector", vector, "anchor v (JSON)");
    cmd->add_option("--nodes", nodes, "node profile s_1,...,s_N (builds S = diag, uniform v)");
    cmd->add_option("--weights", weights, "profile weights |v_n|^2, with --nodes");
  }

  CradleConfig load() const {
    if (!nodes.empty()) {
      if (!matrix.empty() || !vector.empty()) throw InputError("--nodes excludes --matrix and --vector");
      return varying_rate_demo(parse_list(nodes), weights.empty() ? std::vector<double>{} : parse_list(weights));
    }
    if (matrix.empty() || vector.empty()) throw InputError("need --matrix and --vector, or --nodes");
    return make_cradle(io::read_hermitian(matrix), io::read_vector(vector));
  }
};

RVector real_coefficients(const CVector& c) {
  if (c.imag().cwiseAbs().maxCoeff() != 0.0) throw InputError("sampling coefficients must be real");
  return c.real();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue dynamics under rank-one updates"};
  app.require_subcommand(1);

  std::string out_path;
  std::string grid_text;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  app.add_option("--out", out_path, "write data here instead of stdout");
  app.add_option("--grid", grid_text, "a:b:n uniform grid");
  app.add_option("--tol", tol, "node tolerance for signals read from files");
  app.add_option("--seed", seed, "seed for random instances and jitter");

  // trace
  CradleSource trace_src;
  std::string sidecar;
  auto* trace_cmd = app.add_subcommand("trace", "eigenvalues and velocities of S + mu vv^dag on a mu grid");
  trace_src.add_to(trace_cmd);
  trace_cmd->add_option("--sidecar", sidecar, "asymptote JSON (default <out>.asymptotes.json)");

  // kernel
  CradleSource kernel_src;
  auto* kernel_cmd = app.add_subcommand("kernel", "signed overlap kernel <s|s_n> on an s grid");
  kernel_src.add_to(kernel_cmd);

  // phase
  std::string unitary_path, anchor_path;
  auto* phase_cmd = app.add_subcommand("phase", "eigenphases of exp(i alpha ww^dag) U on an alpha grid");
  phase_cmd->add_option("--unitary", unitary_path, "unitary U (JSON)")->required();
  phase_cmd->add_option("--anchor", anchor_path, "unit vector w (JSON)")->required();

  // compose
  std::string s_path, r_path;
  double scale = 1.0;
  bool jitter = false;
  auto* compose_cmd = app.add_subcommand("compose", "spectrum of S + tR through rank-one steps");
  compose_cmd->add_option("--s", s_path, "Hermitian S (JSON)")->required();
  compose_cmd->add_option("--r", r_path, "Hermitian R (JSON)")->required();
  compose_cmd->add_option("--t", scale, "scale applied to R");
  compose_cmd->add_flag("--jitter", jitter, "perturb step weights to break degeneracies");

  // sample
  CradleSource sample_src;
  std::string coeff_path;
  double mu = 0.0;
  auto* sample_cmd = app.add_subcommand("sample", "values of a signal on the lattice of S(mu)");
  sample_src.add_to(sample_cmd);
  sample_cmd->add_option("--coeffs", coeff_path, "real kernel coefficients (vector JSON)")->required();
  sample_cmd->add_option("--mu", mu, "lattice parameter");

  // reconstruct
  CradleSource recon_src;
  std::string signal_path;
  bool at_nodes = false;
  auto* recon_cmd = app.add_subcommand("reconstruct", "signal values from lattice samples");
  recon_src.add_to(recon_cmd);
  recon_cmd->add_option("--signal", signal_path, "signal JSON")->required();
  recon_cmd->add_flag("--at-nodes", at_nodes, "evaluate at the signal's own nodes");

  // anneal
  std::string cnf_path, random_spec, mixer = "transverse", report_path;
  auto* anneal_cmd = app.add_subcommand("anneal", "gap along (1-t) H_S + t H_C for a 3-SAT cost");
  anneal_cmd->add_option("--cnf", cnf_path, "DIMACS CNF file");
  anneal_cmd->add_option("--random", random_spec, "n:m random 3-SAT instance (uses --seed)");
  anneal_cmd->add_option("--mixer", mixer, "transverse or uniform")->check(CLI::IsMember({"transverse", "uniform"}));
  anneal_cmd->add_option("--report", report_path, "summary and per-step report (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "cradle: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!(tol > 0.0)) throw InputError("--tol must be positive");
    std::optional<Grid> grid;
    if (!grid_text.empty()) grid = parse_grid(grid_text);

    if (trace_cmd->parsed()) {
      const CradleConfig c = trace_src.load();
      const std::vector<double> mus = grid ? grid->points() : uniform_grid(-10.0, 10.0, 201);
      std::ostringstream csv;
      io::write_trajectory_csv(csv, trace(c, mus));
      const std::string side = !sidecar.empty() ? sidecar : out_path.empty() ? "" : out_path + ".asymptotes.json";
      emit(out_path, csv.str());
      if (!side.empty()) io::write_text(side, dump(io::asymptotes_to_json(c)));
    } else if (kernel_cmd->parsed()) {
      const CradleConfig c = kernel_src.load();
      const RVector& s = c.base().eigenvalues();
      const double pad = 1.0 + 0.25 * (s(s.size() - 1) - s(0));
      const std::vector<double> xs = grid ? grid->points() : uniform_grid(s(0) - pad, s(s.size() - 1) + pad, 401);
      std::ostringstream csv;
      io::write_kernel_csv(csv, c, xs);
      emit(out_path, csv.str());
    } else if (phase_cmd->parsed()) {
      const UnitaryCradle uc = make_unitary_cradle(io::read_unitary(unitary_path), io::read_vector(anchor_path));
      const std::vector<double> alphas = grid ? grid->points() : uniform_grid(0.0, kTwoPi * 360.0 / 361.0, 361);
      std::ostringstream csv;
      io::write_phase_csv(csv, uc, alphas);
      emit(out_path, csv.str());
    } else if (compose_cmd->parsed()) {
      ComposeOptions opts;
      opts.jitter = jitter;
      opts.seed = seed;
      const ComposeResult r = partial_sum_trace(io::read_hermitian(s_path), io::read_hermitian(r_path), scale, opts);
      emit(out_path, dump(io::step_log_to_json(r)));
    } else if (sample_cmd->parsed()) {
      const CradleConfig c = sample_src.load();
      const SampledSignal sig = sample(c, real_coefficients(io::read_vector(coeff_path)), mu);
      emit(out_path, dump(io::signal_to_json(sig)));
    } else if (recon_cmd->parsed()) {
      const CradleConfig c = recon_src.load();
      const SampledSignal sig = io::signal_from_json(io::read_json(signal_path));
      validate_signal(c, sig, tol);
      std::vector<double> xs;
      if (at_nodes) {
        if (grid) throw InputError("--at-nodes excludes --grid");
        xs.assign(sig.nodes.data(), sig.nodes.data() + sig.nodes.size());
      } else {
        if (!grid) throw InputError("reconstruct needs --grid or --at-nodes");
        xs = grid->points();
      }
      std::ostringstream csv;
      io::write_reconstruction_csv(csv, xs, reconstruct(c, sig, xs));
      emit(out_path, csv.str());
    } else if (anneal_cmd->parsed()) {
      SatInstance inst;
      if (cnf_path.empty() == random_spec.empty()) throw InputError("anneal needs exactly one of --cnf and --random");
      if (!cnf_path.empty()) {
        inst = io::read_dimacs(cnf_path);
      } else {
        const auto colon = random_spec.find(':');
        if (colon == std::string::npos) throw InputError("--random must look like n:m");
        int n = 0, m = 0;
        try {
          n = std::stoi(random_spec.substr(0, colon));
          m = std::stoi(random_spec.substr(colon + 1));
        } catch (const std::exception&) {
          throw InputError("--random must look like n:m");
        }
        if (n > kMaxSatVariables) throw InvalidInstance("at most 12 variables are supported");
        inst = random_3sat(n, m, seed);
      }
      inst.validate();
      const HermitianOperator hs = mixer == "uniform" ? uniform_mixer(inst.num_vars) : transverse_mixer(inst.num_vars);
      const HermitianOperator hc = build_3sat_hamiltonian(inst);
      const AdiabaticSchedule sched = gap_trajectory(hs, hc, grid ? grid->points() : uniform_grid(0.0, 1.0, 201));
      std::ostringstream csv;
      io::write_schedule_csv(csv, sched);
      emit(out_path, csv.str());
      if (!report_path.empty()) {
        io::json report{{"summary", io::schedule_summary_to_json(sched)},
                        {"steps", io::step_report_to_json(stepped_schedule(hs, hc))}};
        io::write_text(report_path, dump(report));
      }
    }
  } catch (const InputError& e) {
    std::cerr << "cradle: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "cradle: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cradle: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
