#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btl/simulate.hpp"
#include "btl/theory.hpp"

namespace btl {

enum class Design { FourPieceTau, FourPieceRho, RandomUniform, TwoPiece };

std::string_view to_string(Design d);
std::string_view to_string(Method m);
Design parse_design(std::string_view name);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  Design design = Design::TwoPiece;
  /// tau for FourPieceTau, rho for FourPieceRho; ignored otherwise.
  double param = 0.0;
  int n = 200;
  int k = 50;
  double p = 0.25;
  int L = 20;
  std::vector<double> delta_grid;
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::vector<Method> methods{Method::Mle, Method::Spectral};
  /// Draw a random r* per trial instead of the identity assignment.
  bool shuffle_ranks = false;
};

/// Throws InvalidArgument on trials < 1, an empty or non-increasing delta
/// grid, an empty method list, or invalid (n, k, p, L).
void validate(const ExperimentConfig& config);

/// `key = value` lines (`#` comments allowed). Lists are comma separated:
/// `delta_grid = 0.1, 0.2` and `methods = mle, spectral`. Unknown or
/// repeated keys are a Parse error.
ExperimentConfig read_experiment_config(std::istream& is);
void write_experiment_config(std::ostream& os, const ExperimentConfig& config);

/// Skill profile used at one grid point; the random design draws it from
/// its own sub-stream of (base_seed, trial).
SkillProfile design_profile(const ExperimentConfig& config, double delta, int trial_index);

struct MethodOutcome {
  Method method = Method::Mle;
  double hamming = 1.0;
  bool exact = false;
  std::optional<double> l2_sq;  // MLE only
  bool failed = false;          // fit raised; counted as hamming 1
  std::string failure;          // error name when failed
};

struct TrialOutcome {
  std::uint64_t dataset_hash = 0;
  std::vector<MethodOutcome> methods;  // in config.methods order
};

/// One graph and one dataset drawn with stream_id = trial_index; every method
/// is fit on that same dataset.
TrialOutcome run_trial(const ExperimentConfig& config, double delta, int trial_index);

struct SweepRecord {
  Design design = Design::TwoPiece;
  std::optional<double> param;
  int n = 0;
  int k = 0;
  double p = 0.0;
  int L = 0;
  double delta = 0.0;
  Method method = Method::Mle;
  int trials = 0;
  double mean_hamming = 0.0;
  double exact_freq = 0.0;
  std::optional<double> mean_l2_sq;
  int failures = 0;
  std::uint64_t seed = 0;

  bool operator==(const SweepRecord&) const = default;
};

/// Worker threads for run_sweep: BTL_WORKERS if set, else the hardware count.
int default_workers();

/// One record per (delta, method), sorted by (delta, method). Output does not
/// depend on the worker count.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, int workers = 0);

inline constexpr std::string_view kSweepCsvHeader =
    "design,param,n,k,p,L,delta,method,trials,mean_hamming,exact_freq,mean_l2_sq,failures,seed";

/// Header then rows sorted by (design, param, delta, method); reals with ten
/// significant digits. `comment`, when given, is written first as `# ...`.
void write_sweep_csv(std::ostream& os, std::vector<SweepRecord> records,
                     std::string_view comment = {});
void write_sweep_csv(const std::filesystem::path& path, std::vector<SweepRecord> records,
                     std::string_view comment = {});
std::vector<SweepRecord> read_sweep_csv(std::istream& is);

}  // namespace btl
