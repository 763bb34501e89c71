#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/hardy.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

inline constexpr double kPlateauLimit = 1.05;
inline constexpr double kRegressionTolerance = 0.10;
inline constexpr double kSplitTolerance = 1e-6;
inline constexpr double kProbeTolerance = 0.10;

struct CellSpec {
  std::string name;  // empty: derived from the parameters
  Preset preset = Preset::Z2Product;
  int d = 1;
  int order = 0;  // dihedral order
  std::vector<double> multiplicities;
  double p = 1.0;

  std::string key() const;
  MeasureContext context() const;
};

struct SigmaPolicy {
  int grid_size = 5;
  std::vector<double> explicit_sigmas;  // overrides the grid when nonempty
  bool probes = true;
  double probe_offset = 0.25;
  bool beyond_theorem = true;
};

struct SweepConfig {
  int schema_version = 1;
  std::vector<CellSpec> cells;
  SigmaPolicy sigma;
  std::vector<int> radius_exponents;  // r = 2^j
  std::vector<std::uint64_t> seeds;
  int extra_order = 0;  // s = N + extra_order
  ProfileOptions profile;
  int threads = 1;
  std::string out_dir = "out";

  static SweepConfig parse(const std::string& json_text);
  /// Throws ConfigError naming the offending cell.
  void validate() const;
};

/// sigma_0, sigma_0 + eps, midpoint, sigma_max - 2 eps, sigma_max - eps with
/// eps = (sigma_max - sigma_0) / 20; the first `n` of them.
std::vector<double> sigma_grid(const StripSpec& s, int n = 5);

enum class ReportKind { InStrip, Probe, BeyondTheorem };

struct HardyReport {
  std::string cell;
  ReportKind kind = ReportKind::InStrip;
  double p = 0.0, sigma = 0.0, r = 0.0, rho = 0.0;
  double S1 = 0.0, S2 = 0.0, total = 0.0;
  double env1 = 0.0, env2 = 0.0;
  std::uint64_t seed = 0;  // seed attaining the largest total
  double split_mismatch = 0.0;
  double slope = 0.0, expected_slope = 0.0;  // probes
  std::vector<std::string> flags;
};

struct Regression {
  double measured = 0.0;
  double expected = 0.0;
  bool ok = false;
};

struct SigmaSummary {
  double sigma = 0.0;
  bool critical = false;
  double sup = 0.0;
  double plateau_ratio = 0.0;
  Regression s1, s2;
  double s1_plateau = 0.0, s2_plateau = 0.0;  // critical case only
  double max_split_mismatch = 0.0;
  bool finite = true;
  std::vector<std::string> flags;
  bool pass() const;
};

struct ProbeSummary {
  double sigma = 0.0;
  double slope = 0.0;
  double expected = 0.0;
  bool ok = false;
};

struct BeyondSummary {
  double sigma = 0.0;
  double spread = 0.0;  // max / min of S2 / env2 over the r-grid
};

struct CellSummary {
  std::string key;
  CellSpec spec;
  StripSpec strip;
  std::vector<SigmaSummary> sigmas;
  std::vector<ProbeSummary> probes;
  std::vector<BeyondSummary> beyond;
  std::vector<std::string> errors;
  bool positive_pass() const;
  bool probes_pass() const;
};

struct SweepResult {
  std::vector<HardyReport> reports;  // sorted by cell key, kind, sigma, r
  std::vector<CellSummary> cells;
  /// 0 all pass, 1 only expected-negative probes present, 2 any positive failure.
  int exit_code() const;
};

/// Runs every (cell, seed) task, possibly on several threads; the output
/// does not depend on the thread count.
SweepResult sweep(const SweepConfig& config);

std::string reports_csv(const SweepResult& result);
std::string summary_json(const SweepResult& result);

std::string to_string(ReportKind kind);

}  // namespace dunkl
