#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "serin/catalog.hpp"
#include "serin/limit_points.hpp"
#include "serin/posterior.hpp"

namespace serin {

/// Full configuration of one convergence analysis.
struct AnalysisConfig {
  SeriesSpec series;
  std::optional<BoundId> bound;  // default: the series' catalog bound
  double epsilon = 1e-10;
  std::uint64_t block_size = 0;  // n, terms per stage
  std::uint64_t stages = 0;      // K
  std::uint64_t chunk = kDefaultChunk;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::size_t window = 0;  // classification window; 0 = min(500, stages)
  double mean_high = 0.9;
  double mean_low = 0.1;
  double slope_tol = 1e-6;
  std::filesystem::path mobius_table;  // required by mobius_dirichlet runs
  std::optional<std::filesystem::path> cache_dir;  // reference-sum cache
};

struct ConvergenceRun {
  Verdict verdict;
  std::vector<StageObservation> observations;
  std::vector<double> means;
  std::vector<double> variances;
};

/// Runs the block-sum / bound / Beta-posterior pipeline. When `trace_csv` is
/// given, writes one `stage,partial_sum,bound,y,post_mean,post_var` row per
/// stage; output bytes depend only on the configuration and table contents.
ConvergenceRun run_convergence(const AnalysisConfig& config,
                               std::ostream* trace_csv = nullptr);

/// Same pipeline against a preloaded table and reference block sums
/// (parameter sweeps share both across grid points).
ConvergenceRun run_convergence(const AnalysisConfig& config, std::ostream* trace_csv,
                               std::shared_ptr<const MobiusTable> table,
                               std::span<const double> reference_sums);

/// Configuration of a limit-point (oscillation) analysis; one term per stage.
struct LimitsConfig {
  SeriesSpec series;
  std::uint32_t bins = 10;  // M
  LimitPosteriorMode mode = LimitPosteriorMode::dirichlet_process;
  BaseMeasure base = BaseMeasure::uniform;
  RhoPolicy rho;
  double epsilon = 1e-10;
  std::uint64_t stages = 0;  // K
  LimitClassifyOptions classify;  // burn_in is clamped to the stage count
  std::filesystem::path mobius_table;
};

struct LimitsRun {
  LimitPointReport report;
  std::vector<double> final_means;
  double final_running_sum = 0.0;
  double rho = 0.0;
};

/// Runs the running-sum / adaptive-bin / Dirichlet pipeline. Trace rows are
/// `k,running_sum,bin,mean_1..mean_M`.
LimitsRun run_limits(const LimitsConfig& config, std::ostream* trace_csv = nullptr);

struct SweepPoint {
  double value = 0.0;
  Verdict verdict;
};

struct SweepResult {
  std::string param;
  std::vector<SweepPoint> points;
  std::optional<double> smallest_convergent;
};

/// Repeats run_convergence over a grid of one parameter, reusing the
/// reference sums and Mobius table. Writes `value<TAB>label<TAB>final_mean`
/// rows when `tsv` is given.
SweepResult run_sweep(const AnalysisConfig& base, const std::string& param,
                      std::span<const double> values, std::ostream* tsv = nullptr);

/// One-line JSON encodings used by the CLI.
std::string verdict_json(const Verdict& verdict);
std::string report_json(const LimitPointReport& report);
std::string sweep_summary_json(const SweepResult& result);

/// Named presets carrying the published experiment scales.
/// "paper": n=10^6, K=10^5; "riemann-paper": n=10^6, K=1000.
void apply_preset(AnalysisConfig& config, std::string_view name);
/// "limits-paper": M=10, K=10^5.
void apply_preset(LimitsConfig& config, std::string_view name);

}  // namespace serin
