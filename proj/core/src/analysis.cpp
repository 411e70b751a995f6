#include "serin/analysis.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace serin {

namespace {

void validate_common(const AnalysisConfig& config) {
  validate_params(config.series);
  if (config.stages == 0) throw std::invalid_argument("stages must be >= 1");
  validate_block_size(config.series.id, config.block_size);
  if (config.chunk == 0 || config.chunk > config.block_size)
    throw std::invalid_argument("chunk must be in [1, block_size]");
}

BoundId effective_bound(const AnalysisConfig& config) {
  return config.bound.value_or(default_bound_for(config.series.id));
}

bool needs_table(const AnalysisConfig& config) {
  if (config.series.id == SeriesId::mobius_dirichlet) return true;
  const auto ref = reference_series({effective_bound(config), config.epsilon});
  return ref && ref->id == SeriesId::mobius_dirichlet;
}

std::shared_ptr<const MobiusTable> load_table_for(const std::filesystem::path& path,
                                                  std::uint64_t max_index) {
  if (path.empty())
    throw table_error("analysis needs a Mobius table; none was configured");
  auto table = std::make_shared<const MobiusTable>(MobiusTable::load(path));
  if (table->limit() < max_index)
    throw table_error("Mobius table covers " + std::to_string(table->limit()) +
                      " values but the run needs " + std::to_string(max_index));
  return table;
}

void put(std::ostream& out, const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  out << buf;
}

}  // namespace

ConvergenceRun run_convergence(const AnalysisConfig& config, std::ostream* trace_csv,
                               std::shared_ptr<const MobiusTable> table,
                               std::span<const double> reference_sums) {
  validate_common(config);
  const BoundSpec bound{effective_bound(config), config.epsilon};

  const std::uint64_t K = config.stages;
  const std::uint64_t n = config.block_size;

  // Both the target and the riemann reference start at index 1, so either way
  // the table must cover n*K values.
  if (!table && needs_table(config)) table = load_table_for(config.mobius_table, n * K);

  std::vector<double> ref_storage;
  if (reference_sums.empty()) {
    if (const auto ref = reference_series(bound)) {
      ref_storage = reference_block_sums(*ref, n, K, {config.chunk, config.threads},
                                         table, config.cache_dir);
      reference_sums = ref_storage;
    }
  } else if (reference_sums.size() < K) {
    throw std::invalid_argument("run_convergence: reference sums shorter than the run");
  }

  const TermFn fn = term_function(config.series, table);

  ConvergenceRun run;
  run.observations.reserve(K);
  run.means.reserve(K);
  run.variances.reserve(K);

  if (trace_csv) *trace_csv << "stage,partial_sum,bound,y,post_mean,post_var\n";

  PosteriorState state;
  for (std::uint64_t j = 1; j <= K; ++j) {
    const BlockPlan plan{start_index(config.series.id), n, j};
    const double s = chunked_parallel_sum(fn, plan, config.chunk, config.threads);
    const double c = bound_value(bound, j, n, config.series, reference_sums);
    const StageObservation obs = state.observe(s, c);
    const double mean = state.mean();
    const double variance = state.variance();
    run.observations.push_back(obs);
    run.means.push_back(mean);
    run.variances.push_back(variance);
    if (trace_csv)
      put(*trace_csv, "%" PRIu64 ",%.17g,%.17g,%d,%.17g,%.17g\n", j, s, c, obs.indicator,
          mean, variance);
  }

  ClassifyOptions opts;
  opts.window = config.window ? config.window
                              : static_cast<std::size_t>(std::min<std::uint64_t>(500, K));
  opts.mean_high = config.mean_high;
  opts.mean_low = config.mean_low;
  opts.slope_tol = config.slope_tol;
  run.verdict = classify(run.means, run.variances, opts);
  return run;
}

ConvergenceRun run_convergence(const AnalysisConfig& config, std::ostream* trace_csv) {
  return run_convergence(config, trace_csv, nullptr, {});
}

LimitsRun run_limits(const LimitsConfig& config, std::ostream* trace_csv) {
  validate_params(config.series);
  if (config.stages == 0) throw std::invalid_argument("stages must be >= 1");
  if (config.bins < 2) throw std::invalid_argument("need at least 2 bins");

  std::shared_ptr<const MobiusTable> table;
  const std::uint64_t last_index =
      static_cast<std::uint64_t>(start_index(config.series.id)) + config.stages - 1;
  if (config.series.id == SeriesId::mobius_dirichlet)
    table = load_table_for(config.mobius_table, last_index);

  const TermFn fn = term_function(config.series, table);
  const double a = config.series.a;
  const double b = config.series.b;
  const double rho = config.rho.resolve(a, b, config.epsilon);

  LimitPointState state(config.mode, config.base, config.bins, rho);

  if (trace_csv) {
    *trace_csv << "k,running_sum,bin";
    for (std::uint32_t m = 1; m <= config.bins; ++m) *trace_csv << ",mean_" << m;
    *trace_csv << "\n";
  }

  const auto first = static_cast<std::uint64_t>(start_index(config.series.id));
  for (std::uint64_t k = 1; k <= config.stages; ++k) {
    const double x = fn(first + k - 1);
    if (!std::isfinite(x)) throw nonfinite_term_error(first + k - 1, x);
    const std::uint32_t bin = state.update(x);
    if (trace_csv) {
      put(*trace_csv, "%" PRIu64 ",%.17g,%u", k, state.running_sum(), bin);
      for (std::uint32_t m = 1; m <= config.bins; ++m)
        put(*trace_csv, ",%.17g", state.mean(m));
      *trace_csv << "\n";
    }
  }

  LimitClassifyOptions opts = config.classify;
  opts.burn_in = std::min<std::uint64_t>(opts.burn_in, config.stages);

  LimitsRun run;
  run.report = classify_limit_points(state, opts);
  run.final_means = state.means();
  run.final_running_sum = state.running_sum();
  run.rho = rho;
  return run;
}

SweepResult run_sweep(const AnalysisConfig& base, const std::string& param,
                      std::span<const double> values, std::ostream* tsv) {
  if (values.empty()) throw std::invalid_argument("run_sweep: empty grid");
  if (param != "a" && param != "b") throw std::invalid_argument("run_sweep: unknown parameter");

  AnalysisConfig probe = base;
  (param == "a" ? probe.series.a : probe.series.b) = values.front();
  validate_common(probe);

  const BoundSpec bound{effective_bound(base), base.epsilon};
  std::shared_ptr<const MobiusTable> table;
  if (needs_table(probe)) {
    const std::uint64_t last_index =
        static_cast<std::uint64_t>(start_index(probe.series.id)) +
        probe.block_size * probe.stages - 1;
    table = load_table_for(base.mobius_table, last_index);
  }

  std::vector<double> ref;
  if (const auto ref_spec = reference_series(bound))
    ref = reference_block_sums(*ref_spec, base.block_size, base.stages,
                               {base.chunk, base.threads}, table, base.cache_dir);

  if (tsv) *tsv << param << "\tlabel\tfinal_mean\n";

  SweepResult result;
  result.param = param;
  for (const double v : values) {
    AnalysisConfig point = base;
    (param == "a" ? point.series.a : point.series.b) = v;
    const ConvergenceRun run = run_convergence(point, nullptr, table, ref);
    result.points.push_back({v, run.verdict});
    if (tsv)
      put(*tsv, "%.17g\t%s\t%.17g\n", v, std::string(to_string(run.verdict.label)).c_str(),
          run.verdict.final_mean);
    if (run.verdict.label == VerdictLabel::convergent)
      if (!result.smallest_convergent || v < *result.smallest_convergent)
        result.smallest_convergent = v;
  }
  return result;
}

std::string verdict_json(const Verdict& verdict) {
  nlohmann::json j;
  j["label"] = std::string(to_string(verdict.label));
  j["final_mean"] = verdict.final_mean;
  j["tail_slope"] = verdict.tail_slope;
  return j.dump();
}

std::string report_json(const LimitPointReport& report) {
  nlohmann::json j;
  j["call"] = std::string(to_string(report.call));
  j["dominant_bin"] = report.dominant_bin;
  j["bin_ratio"] = report.bin_ratio;
  auto pts = nlohmann::json::array();
  for (const auto& p : report.limit_points)
    pts.push_back({{"bin", p.bin}, {"proportion", p.proportion}});
  j["limit_points"] = pts;
  return j.dump();
}

std::string sweep_summary_json(const SweepResult& result) {
  nlohmann::json j;
  j["param"] = result.param;
  j["points"] = result.points.size();
  if (result.smallest_convergent)
    j["smallest_convergent"] = *result.smallest_convergent;
  else
    j["smallest_convergent"] = nullptr;
  return j.dump();
}

void apply_preset(AnalysisConfig& config, std::string_view name) {
  if (name == "paper") {
    config.block_size = 1'000'000;
    config.stages = 100'000;
  } else if (name == "riemann-paper") {
    config.block_size = 1'000'000;
    config.stages = 1'000;
  } else if (name == "desk") {
    config.block_size = 10'000;
    config.stages = 1'000;
  } else {
    throw std::invalid_argument("unknown preset: " + std::string(name));
  }
}

void apply_preset(LimitsConfig& config, std::string_view name) {
  if (name == "limits-paper") {
    config.bins = 10;
    config.stages = 100'000;
  } else {
    throw std::invalid_argument("unknown preset: " + std::string(name));
  }
}

}  // namespace serin
