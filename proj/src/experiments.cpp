#include "btl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "btl/metrics.hpp"
#include "btl/mle.hpp"
#include "btl/spectral.hpp"
#include "text.hpp"

namespace btl {

namespace {

// Sub-stream tags within one (base_seed, trial) stream.
enum StreamTag : std::uint64_t { kGraph = 1, kOutcomes = 2, kProfile = 3, kRanks = 4 };

bool has_param(Design d) { return d == Design::FourPieceTau || d == Design::FourPieceRho; }

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

MethodOutcome fit_one(Method method, const ComparisonDataset& data, const SkillProfile& profile,
                      const Ranking& truth) {
  MethodOutcome out;
  out.method = method;
  try {
    if (method == Method::Mle) {
      const FitResult fit = fit_mle(data);
      const EvalReport report = evaluate(CenteredScores(fit.scores), profile, truth);
      out.hamming = report.hamming_topk;
      out.exact = report.exact_recovery;
      out.l2_sq = report.errors->l2_sq;
    } else {
      const FitResult fit = fit_spectral(data);
      out.hamming = hamming_topk(fit.ranking, truth, profile.k);
      out.exact = out.hamming == 0.0;
    }
  } catch (const Error& e) {
    out = MethodOutcome{method, 1.0, false, std::nullopt, true, std::string(to_string(e.code()))};
  }
  return out;
}

}  // namespace

std::string_view to_string(Design d) {
  switch (d) {
    case Design::FourPieceTau: return "four_piece_tau";
    case Design::FourPieceRho: return "four_piece_rho";
    case Design::RandomUniform: return "random_uniform";
    case Design::TwoPiece: return "two_piece";
  }
  return "unknown";
}

std::string_view to_string(Method m) { return m == Method::Mle ? "mle" : "spectral"; }

Design parse_design(std::string_view name) {
  for (Design d : {Design::FourPieceTau, Design::FourPieceRho, Design::RandomUniform, Design::TwoPiece}) {
    if (name == to_string(d)) return d;
  }
  throw Error(ErrorCode::Parse, "unknown design '" + std::string(name) + "'");
}

Method parse_method(std::string_view name) {
  if (name == "mle") return Method::Mle;
  if (name == "spectral") return Method::Spectral;
  throw Error(ErrorCode::Parse, "unknown method '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (c.delta_grid.empty()) throw Error(ErrorCode::InvalidArgument, "delta_grid is empty");
  for (std::size_t i = 1; i < c.delta_grid.size(); ++i) {
    if (!(c.delta_grid[i] > c.delta_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "delta_grid must be strictly increasing");
    }
  }
  if (c.methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
  if (c.n < 2 || c.k < 1 || c.k >= c.n) throw Error(ErrorCode::InvalidArgument, "need 1 <= k < n");
  if (!(c.p > 0.0 && c.p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in (0, 1]");
  if (c.L < 1) throw Error(ErrorCode::InvalidArgument, "L must be at least 1");
}

ExperimentConfig read_experiment_config(std::istream& is) {
  ExperimentConfig c;
  text::LineReader lines(is);
  std::set<std::string> seen;
  std::string line;
  while (lines.next(line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Parse, "config line " + std::to_string(lines.line_number()) + " is not `key = value`");
    }
    const std::string key(text::trim(std::string_view(line).substr(0, eq)));
    const std::string value(text::trim(std::string_view(line).substr(eq + 1)));
    if (!seen.insert(key).second) throw Error(ErrorCode::Parse, "repeated config key '" + key + "'");
    if (key == "design") {
      c.design = parse_design(value);
    } else if (key == "param") {
      c.param = text::parse<double>(value, key);
    } else if (key == "n") {
      c.n = text::parse<int>(value, key);
    } else if (key == "k") {
      c.k = text::parse<int>(value, key);
    } else if (key == "p") {
      c.p = text::parse<double>(value, key);
    } else if (key == "L") {
      c.L = text::parse<int>(value, key);
    } else if (key == "delta_grid") {
      c.delta_grid.clear();
      for (const auto& s : text::split(value, ',')) c.delta_grid.push_back(text::parse<double>(s, key));
    } else if (key == "trials") {
      c.trials = text::parse<int>(value, key);
    } else if (key == "base_seed") {
      c.base_seed = text::parse<std::uint64_t>(value, key);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& s : text::split(value, ',')) c.methods.push_back(parse_method(s));
    } else if (key == "shuffle_ranks") {
      if (value != "true" && value != "false") throw Error(ErrorCode::Parse, "shuffle_ranks must be true or false");
      c.shuffle_ranks = value == "true";
    } else {
      throw Error(ErrorCode::Parse, "unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

void write_experiment_config(std::ostream& os, const ExperimentConfig& c) {
  std::vector<std::string> deltas, methods;
  for (double d : c.delta_grid) deltas.push_back(text::format_exact(d));
  for (Method m : c.methods) methods.emplace_back(to_string(m));
  os << "design = " << to_string(c.design) << '\n';
  if (has_param(c.design)) os << "param = " << text::format_exact(c.param) << '\n';
  os << "n = " << c.n << "\nk = " << c.k << "\np = " << text::format_exact(c.p) << "\nL = " << c.L
     << "\ndelta_grid = " << join(deltas) << "\ntrials = " << c.trials
     << "\nbase_seed = " << c.base_seed << "\nmethods = " << join(methods)
     << "\nshuffle_ranks = " << (c.shuffle_ranks ? "true" : "false") << '\n';
}

SkillProfile design_profile(const ExperimentConfig& c, double delta, int trial_index) {
  switch (c.design) {
    case Design::FourPieceTau: return design_four_piece_tau(c.param, delta, c.n, c.k);
    case Design::FourPieceRho: return design_four_piece_rho(c.param, delta, c.n, c.k);
    case Design::RandomUniform: {
      const RngSeed stream{c.base_seed, static_cast<std::uint64_t>(trial_index)};
      return design_random_uniform(delta, stream.derive(kProfile), c.n, c.k);
    }
    case Design::TwoPiece: return design_two_piece(delta, c.n, c.k);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown design");
}

TrialOutcome run_trial(const ExperimentConfig& c, double delta, int trial_index) {
  const RngSeed stream{c.base_seed, static_cast<std::uint64_t>(trial_index)};
  const SkillProfile profile = design_profile(c, delta, trial_index);
  const Ranking truth = c.shuffle_ranks ? random_ranking(c.n, stream.derive(kRanks)) : Ranking::identity(c.n);
  const ComparisonGraph graph = sample_graph(c.n, c.p, stream.derive(kGraph));
  const ComparisonDataset data = sample_comparisons(graph, profile, truth, c.L, stream.derive(kOutcomes));

  TrialOutcome out;
  out.dataset_hash = data.hash();
  for (Method m : c.methods) out.methods.push_back(fit_one(m, data, profile, truth));
  return out;
}

int default_workers() {
  if (const char* env = std::getenv("BTL_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& c, int workers) {
  validate(c);
  if (workers <= 0) workers = default_workers();
  const std::size_t trials = static_cast<std::size_t>(c.trials);
  const std::size_t tasks = c.delta_grid.size() * trials;
  std::vector<TrialOutcome> results(tasks);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks);
  const auto work = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      try {
        results[t] = run_trial(c, c.delta_grid[t / trials], static_cast<int>(t % trials));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto extra = std::min<std::size_t>(static_cast<std::size_t>(workers), tasks) - 1;
    for (std::size_t w = 0; w < extra; ++w) pool.emplace_back(work);
    work();
  }
  // Report the lowest-index failure so the error is deterministic too.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<SweepRecord> records;
  for (std::size_t di = 0; di < c.delta_grid.size(); ++di) {
    for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
      SweepRecord r;
      r.design = c.design;
      if (has_param(c.design)) r.param = c.param;
      r.n = c.n;
      r.k = c.k;
      r.p = c.p;
      r.L = c.L;
      r.delta = c.delta_grid[di];
      r.method = c.methods[mi];
      r.trials = c.trials;
      r.seed = c.base_seed;
      double hamming = 0.0, l2 = 0.0;
      int exact = 0, l2_count = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        const MethodOutcome& o = results[di * trials + t].methods[mi];
        hamming += o.hamming;
        exact += o.exact ? 1 : 0;
        r.failures += o.failed ? 1 : 0;
        if (o.l2_sq) {
          l2 += *o.l2_sq;
          ++l2_count;
        }
      }
      r.mean_hamming = hamming / c.trials;
      r.exact_freq = static_cast<double>(exact) / c.trials;
      if (l2_count > 0) r.mean_l2_sq = l2 / l2_count;
      records.push_back(r);
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.delta, a.method) < std::tie(b.delta, b.method);
  });
  return records;
}

void write_sweep_csv(std::ostream& os, std::vector<SweepRecord> records, std::string_view comment) {
  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    const auto key = [](const SweepRecord& r) {
      return std::make_tuple(to_string(r.design), r.param.value_or(-INFINITY), r.delta, to_string(r.method));
    };
    return key(a) < key(b);
  });
  if (!comment.empty()) os << "# " << comment << '\n';
  os << kSweepCsvHeader << '\n';
  const auto opt = [](const std::optional<double>& x) { return x ? text::format_sig10(*x) : std::string(); };
  for (const auto& r : records) {
    os << to_string(r.design) << ',' << opt(r.param) << ',' << r.n << ',' << r.k << ','
       << text::format_sig10(r.p) << ',' << r.L << ',' << text::format_sig10(r.delta) << ','
       << to_string(r.method) << ',' << r.trials << ',' << text::format_sig10(r.mean_hamming) << ','
       << text::format_sig10(r.exact_freq) << ',' << opt(r.mean_l2_sq) << ',' << r.failures << ','
       << r.seed << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::vector<SweepRecord> records,
                     std::string_view comment) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write_sweep_csv(os, std::move(records), comment);
  if (!os) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  text::LineReader lines(is);
  std::string line;
  if (!lines.next(line) || line != kSweepCsvHeader) throw Error(ErrorCode::Parse, "sweep csv: bad header");
  std::vector<SweepRecord> out;
  const auto opt = [](const std::string& s, const char* what) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return text::parse<double>(s, what);
  };
  while (lines.next(line)) {
    const auto f = text::split(line, ',');
    if (f.size() != 14) throw Error(ErrorCode::Parse, "sweep csv: expected 14 columns");
    SweepRecord r;
    r.design = parse_design(f[0]);
    r.param = opt(f[1], "param");
    r.n = text::parse<int>(f[2], "n");
    r.k = text::parse<int>(f[3], "k");
    r.p = text::parse<double>(f[4], "p");
    r.L = text::parse<int>(f[5], "L");
    r.delta = text::parse<double>(f[6], "delta");
    r.method = parse_method(f[7]);
    r.trials = text::parse<int>(f[8], "trials");
    r.mean_hamming = text::parse<double>(f[9], "mean_hamming");
    r.exact_freq = text::parse<double>(f[10], "exact_freq");
    r.mean_l2_sq = opt(f[11], "mean_l2_sq");
    r.failures = text::parse<int>(f[12], "failures");
    r.seed = text::parse<std::uint64_t>(f[13], "seed");
    out.push_back(r);
  }
  return out;
}

}  // namespace btl
