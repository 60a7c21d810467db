// btl_topk: simulate BTL comparison data, fit the MLE and spectral rankers,
// evaluate them, print theory curves and run experiment sweeps.
//
// Exit codes: 0 success, 1 semantic failure (infeasible design, fit error,
// inconsistent files), 2 usage error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btl/experiments.hpp"
#include "btl/io.hpp"
#include "btl/metrics.hpp"
#include "btl/mle.hpp"
#include "btl/simulate.hpp"
#include "btl/spectral.hpp"
#include "btl/theory.hpp"

namespace {

using namespace btl;

std::string invocation_line(int argc, char** argv) {
  std::string line = "btl_topk " + std::string(kVersion) + ":";
  for (int i = 0; i < argc; ++i) line += " " + std::string(argv[i]);
  return line;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  return is;
}

const CLI::Validator kOpenUnit(
    [](const std::string& s) -> std::string {
      double v = 0.0;
      try {
        v = std::stod(s);
      } catch (...) {
        return "not a number: " + s;
      }
      return (v > 0.0 && v <= 1.0) ? std::string() : "value must lie in (0, 1]";
    },
    "(0,1]");

struct SimulateArgs {
  int n = 200;
  double p = 0.25;
  int L = 20;
  int k = 50;
  std::string design = "two_piece";
  double design_param = 1.0;
  double delta = 0.3;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  bool shuffle = false;
  std::string out = "dataset.txt";
  std::string truth;
};

void cmd_simulate(const SimulateArgs& a, const std::string& comment) {
  ExperimentConfig c;
  c.design = parse_design(a.design);
  c.param = a.design_param;
  c.n = a.n;
  c.k = a.k;
  c.base_seed = a.seed;
  const SkillProfile profile = design_profile(c, a.delta, static_cast<int>(a.stream));
  const RngSeed stream{a.seed, a.stream};
  const Ranking truth = a.shuffle ? random_ranking(a.n, stream.derive(4)) : Ranking::identity(a.n);
  const auto graph = sample_graph(a.n, a.p, stream.derive(1));
  const auto data = sample_comparisons(graph, profile, truth, a.L, stream.derive(2));

  auto os = open_out(a.out);
  os << "# " << comment << '\n';
  write_dataset(os, data);
  auto ts = open_out(a.truth.empty() ? a.out + ".truth" : a.truth);
  ts << "# " << comment << '\n';
  write_truth(ts, profile, truth);
}

struct FitArgs {
  std::string method = "both";
  std::string in;
  std::string mode = "vanilla";
  double lambda = 0.0;
  double bound = 40.0;
  std::string solver = "newton";
  std::string out = "scores.txt";
};

void cmd_fit(const FitArgs& a, const std::string& comment) {
  auto is = open_in(a.in);
  const ComparisonDataset data = read_dataset(is);
  MleOptions opts;
  if (a.mode == "regularized") {
    opts.mode = Regularized{a.lambda};
  } else if (a.mode == "box") {
    opts.mode = BoxConstrained{a.bound};
  }
  opts.solver = a.solver == "gd" ? Solver::GradientDescent : Solver::Newton;

  std::ostringstream body;
  if (a.method == "mle" || a.method == "both") {
    const FitResult fit = fit_mle(data, opts);
    if (!fit.converged) {
      throw Error(ErrorCode::NotConverged, "MLE stopped with gradient norm " + std::to_string(fit.final_grad_norm));
    }
    write_scores(body, "mle", fit);
  }
  if (a.method == "spectral" || a.method == "both") write_scores(body, "spectral", fit_spectral(data));
  auto os = open_out(a.out);
  os << "# " << comment << '\n' << body.str();
}

void cmd_eval(const std::string& scores_path, const std::string& truth_path, int k) {
  auto ss = open_in(scores_path);
  auto ts = open_in(truth_path);
  const auto blocks = read_scores(ss);
  const Truth truth = read_truth(ts);
  const SkillProfile profile = truth.profile(k);
  std::cout << "method,hamming,exact,kendall,l2_sq,linf_sq\n";
  for (const auto& b : blocks) {
    if (b.ranking.n() != truth.ranking.n()) {
      throw Error(ErrorCode::DimensionMismatch, "scores and truth have different player counts");
    }
    const EvalReport r = b.method == "mle" ? evaluate(CenteredScores(b.scores), profile, truth.ranking)
                                           : evaluate(b.ranking, truth.ranking, k);
    std::cout << b.method << ',' << std::setprecision(10) << r.hamming_topk << ','
              << (r.exact_recovery ? "true" : "false") << ',' << r.kendall << ',';
    if (r.errors) std::cout << r.errors->l2_sq << ',' << r.errors->linf_sq;
    else std::cout << ',';
    std::cout << '\n';
  }
}

void cmd_theory(int n, int k, double kappa_max, int grid, const std::string& out,
                const std::string& comment) {
  std::ostringstream body;
  body << "kappa,V,Vbar,argmax_k1,argmax_k2\n";
  const int points = kappa_max == 0.0 ? 1 : grid;
  char buf[160];
  for (int i = 0; i < points; ++i) {
    const double kappa = points == 1 ? kappa_max : kappa_max * i / (points - 1);
    const VarianceResult v = variance_mle(n, k, kappa);
    const VarianceResult vb = variance_spectral(n, k, kappa);
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", kappa, v.value, vb.value, v.kappa1,
                  v.kappa2);
    body << buf;
  }
  if (out.empty() || out == "-") {
    std::cout << "# " << comment << '\n' << body.str();
    return;
  }
  auto os = open_out(out);
  os << "# " << comment << '\n' << body.str();
}

void cmd_sweep(const std::string& config_path, const std::string& out, int workers,
               const std::string& comment) {
  auto is = open_in(config_path);
  const ExperimentConfig c = read_experiment_config(is);
  write_sweep_csv(out, run_sweep(c, workers), comment);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-k ranking under the Bradley-Terry-Luce model: MLE vs. spectral ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "sample a comparison dataset and its truth sidecar");
  simulate->add_option("--n", sim.n, "number of players")->check(CLI::Range(2, 1 << 20));
  simulate->add_option("--p", sim.p, "edge probability")->check(kOpenUnit);
  simulate->add_option("--L", sim.L, "games per edge")->check(CLI::Range(1, 1 << 20));
  simulate->add_option("--k", sim.k, "top-k size")->check(CLI::PositiveNumber);
  simulate->add_option("--design", sim.design, "skill design")
      ->check(CLI::IsMember({"two_piece", "four_piece_tau", "four_piece_rho", "random_uniform"}));
  simulate->add_option("--design-param", sim.design_param, "tau or rho for the four-piece designs");
  simulate->add_option("--delta", sim.delta, "gap between rank k and k+1");
  simulate->add_option("--seed", sim.seed, "base seed");
  simulate->add_option("--stream", sim.stream, "stream id");
  simulate->add_flag("--shuffle", sim.shuffle, "random rank assignment instead of identity");
  simulate->add_option("--out", sim.out, "dataset path");
  simulate->add_option("--truth", sim.truth, "truth sidecar path (default <out>.truth)");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "fit MLE and/or spectral ranking to a dataset file");
  fitc->add_option("--method", fit.method)->check(CLI::IsMember({"mle", "spectral", "both"}));
  fitc->add_option("--in", fit.in, "dataset path")->required();
  fitc->add_option("--mode", fit.mode)->check(CLI::IsMember({"vanilla", "regularized", "box"}));
  fitc->add_option("--lambda", fit.lambda, "ridge weight for --mode regularized")->check(CLI::NonNegativeNumber);
  fitc->add_option("--bound", fit.bound, "box half-width for --mode box")->check(CLI::PositiveNumber);
  fitc->add_option("--solver", fit.solver)->check(CLI::IsMember({"newton", "gd"}));
  fitc->add_option("--out", fit.out, "scores path");

  std::string scores_path, truth_path;
  int eval_k = 50;
  auto* evalc = app.add_subcommand("eval", "score fitted rankings against the truth");
  evalc->add_option("--scores", scores_path)->required();
  evalc->add_option("--truth", truth_path)->required();
  evalc->add_option("--k", eval_k)->check(CLI::PositiveNumber);

  int th_n = 200, th_k = 50, th_grid = 51;
  double th_kappa_max = 5.0;
  std::string th_out;
  auto* theory = app.add_subcommand("theory", "effective variances V and V-bar over a kappa grid");
  theory->add_option("--n", th_n)->check(CLI::Range(2, 1 << 20));
  theory->add_option("--k", th_k)->check(CLI::PositiveNumber);
  theory->add_option("--kappa-max", th_kappa_max)->check(CLI::NonNegativeNumber);
  theory->add_option("--grid", th_grid)->check(CLI::Range(2, 100000));
  theory->add_option("--out", th_out, "csv path (stdout when omitted)");

  std::string config_path, sweep_out;
  int workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep from a config file");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--out", sweep_out)->required();
  sweep->add_option("--workers", workers, "worker threads (default BTL_WORKERS or all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string comment = invocation_line(argc, argv);
  try {
    if (*simulate) cmd_simulate(sim, comment);
    else if (*fitc) cmd_fit(fit, comment);
    else if (*evalc) cmd_eval(scores_path, truth_path, eval_k);
    else if (*theory) cmd_theory(th_n, th_k, th_kappa_max, th_grid, th_out, comment);
    else if (*sweep) cmd_sweep(config_path, sweep_out, workers, comment);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
