// serin: Bayesian sequential analysis of infinite-series convergence.
//
// Subcommands:
//   catalog list                      series and their default bounds
//   analyze                           block-sum convergence analysis
//   limits                            running-sum limit-point analysis
//   sweep                             analyze over a parameter grid
//   mobius build | mertens            Mobius table management
//   bernoulli                         Bernoulli-number probe terms
//
// Exit codes: 0 ok, 2 usage/configuration, 3 input data (tables, files),
// 4 numeric instability.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "serin/analysis.hpp"
#include "serin/bernoulli.hpp"
#include "serin/catalog.hpp"
#include "serin/mobius.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

serin::SeriesSpec parse_series(const std::string& name,
                               const std::vector<std::string>& params) {
  const auto id = serin::series_from_string(name);
  if (!id) throw UsageError("unknown series: " + name);
  serin::SeriesSpec spec;
  spec.id = *id;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw UsageError("parameter must be name=value: " + p);
    const std::string key = p.substr(0, eq);
    double value = 0;
    try {
      value = std::stod(p.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad numeric value in parameter: " + p);
    }
    if (key == "a")
      spec.a = value;
    else if (key == "b")
      spec.b = value;
    else
      throw UsageError("unknown parameter name: " + key);
  }
  return spec;
}

serin::RhoPolicy parse_rho(const std::string& text) {
  serin::RhoPolicy rho;
  if (text == "a-b" || text == "a_minus_b") {
    rho.kind = serin::RhoPolicy::Kind::a_minus_b;
    return rho;
  }
  if (text == "a^6" || text == "a6" || text == "a_power6") {
    rho.kind = serin::RhoPolicy::Kind::a_power6;
    return rho;
  }
  try {
    rho.value = std::stod(text);
  } catch (const std::exception&) {
    throw UsageError("rho must be a number, 'a-b', or 'a^6': " + text);
  }
  if (!(rho.value > 0)) throw UsageError("constant rho must be positive");
  return rho;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw serin::table_error("cannot open output file: " + path);
  return out;
}

std::optional<std::filesystem::path> cache_dir_from(const std::string& flag) {
  if (!flag.empty()) return std::filesystem::path(flag);
  if (const char* env = std::getenv("BAYES_SERIES_CACHE"); env && *env)
    return std::filesystem::path(env);
  return std::nullopt;
}

/// Parses argv; a returned value is the process exit code (help or usage
/// error), no value means the run should proceed.
std::optional<int> dispatch(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian convergence assessment of infinite series"};
  app.require_subcommand(1);
  app.set_config("--config")->description("TOML config file; flags override it");

  // ---- catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "series catalog");
  catalog_cmd->add_subcommand("list", "list catalog series");

  // ---- analyze
  auto* analyze = app.add_subcommand("analyze", "block-sum convergence analysis");
  std::string series_name, bound_name, trace_path, table_path, cache_flag, preset;
  std::vector<std::string> params;
  std::uint64_t n = 0, K = 0, chunk = serin::kDefaultChunk;
  unsigned threads = 0;
  std::size_t window = 0;
  double epsilon = 1e-10;
  analyze->add_option("--series", series_name, "catalog series id")->required();
  analyze->add_option("--param", params, "series parameter name=value");
  analyze->add_option("--n", n, "terms per stage");
  analyze->add_option("--stages", K, "number of stages K");
  analyze->add_option("--bound", bound_name, "bound id (default: series' own)");
  analyze->add_option("--epsilon", epsilon, "bound epsilon");
  analyze->add_option("--out", trace_path, "trace CSV path");
  analyze->add_option("--mobius-table", table_path, "Mobius table file");
  analyze->add_option("--window", window, "classification window (0 = auto)");
  analyze->add_option("--chunk", chunk, "summation chunk size");
  analyze->add_option("--threads", threads, "worker threads (0 = hardware)");
  analyze->add_option("--cache-dir", cache_flag,
                      "reference-sum cache dir (default: $BAYES_SERIES_CACHE)");
  analyze->add_option("--preset", preset, "paper | riemann-paper | desk");

  // ---- limits
  auto* limits = app.add_subcommand("limits", "running-sum limit-point analysis");
  std::string l_series, l_rho = "2", l_mode = "dp", l_base = "uniform", l_trace, l_table,
              l_preset;
  std::vector<std::string> l_params;
  std::uint64_t l_stages = 0;
  std::uint32_t l_bins = 10;
  double l_epsilon = 1e-10;
  limits->add_option("--series", l_series, "catalog series id")->required();
  limits->add_option("--param", l_params, "series parameter name=value");
  limits->add_option("--M", l_bins, "number of bins");
  limits->add_option("--rho", l_rho, "rho policy: number, 'a-b', or 'a^6'");
  limits->add_option("--stages", l_stages, "number of stages K");
  limits->add_option("--mode", l_mode, "finite | dp");
  limits->add_option("--base", l_base, "uniform | geometric");
  limits->add_option("--epsilon", l_epsilon, "policy epsilon / rho floor");
  limits->add_option("--out", l_trace, "trace CSV path");
  limits->add_option("--mobius-table", l_table, "Mobius table file");
  limits->add_option("--preset", l_preset, "limits-paper");

  // ---- sweep
  auto* sweep = app.add_subcommand("sweep", "convergence analysis over a parameter grid");
  std::string s_series, s_param = "a", s_values, s_out, s_table, s_cache, s_bound;
  std::vector<std::string> s_params;
  std::uint64_t s_n = 0, s_K = 0, s_chunk = serin::kDefaultChunk;
  unsigned s_threads = 0;
  double s_epsilon = 1e-10;
  sweep->add_option("--series", s_series, "catalog series id")->required();
  sweep->add_option("--param", s_params, "fixed parameter name=value");
  sweep->add_option("--param-name", s_param, "swept parameter (a or b)");
  sweep->add_option("--values", s_values, "comma-separated grid values")->required();
  sweep->add_option("--n", s_n, "terms per stage");
  sweep->add_option("--stages", s_K, "number of stages K");
  sweep->add_option("--bound", s_bound, "bound id (default: series' own)");
  sweep->add_option("--epsilon", s_epsilon, "bound epsilon");
  sweep->add_option("--out", s_out, "sweep TSV path");
  sweep->add_option("--mobius-table", s_table, "Mobius table file");
  sweep->add_option("--chunk", s_chunk, "summation chunk size");
  sweep->add_option("--threads", s_threads, "worker threads");
  sweep->add_option("--cache-dir", s_cache, "reference-sum cache dir");

  // ---- mobius
  auto* mobius = app.add_subcommand("mobius", "Mobius table management");
  auto* mbuild = mobius->add_subcommand("build", "sieve a table");
  std::uint64_t m_limit = 0, m_segment = 1u << 20;
  std::string m_out;
  unsigned m_threads = 0;
  mbuild->add_option("--limit", m_limit, "largest n")->required();
  mbuild->add_option("--segment", m_segment, "segment size");
  mbuild->add_option("--out", m_out, "output file")->required();
  mbuild->add_option("--threads", m_threads, "worker threads");
  auto* mmertens = mobius->add_subcommand("mertens", "prefix sum of mu");
  std::string mm_table;
  std::uint64_t mm_x = 0;
  mmertens->add_option("--table", mm_table, "table file")->required();
  mmertens->add_option("--x", mm_x, "upper limit")->required();

  // ---- bernoulli
  auto* bern = app.add_subcommand("bernoulli", "Bernoulli-number series probe");
  std::string b_series = "s1", b_mode = "stirling", b_out;
  unsigned b_max_m = 20;
  bern->add_option("--series", b_series, "s1 | s2");
  bern->add_option("--mode", b_mode, "exact | stirling");
  bern->add_option("--max-m", b_max_m, "largest term index");
  bern->add_option("--out", b_out, "output CSV path");

  if (const auto rc = dispatch(app, argc, argv)) return *rc;

  try {
    if (catalog_cmd->parsed()) {
      std::printf("%-17s %-7s %5s  %s\n", "series", "params", "start", "default_bound");
      for (const auto id : serin::all_series()) {
        const auto names = serin::param_names(id);
        std::string ps;
        for (const auto& p : names) ps += ps.empty() ? p : "," + p;
        if (ps.empty()) ps = "-";
        std::printf("%-17s %-7s %5lld  %s\n", std::string(to_string(id)).c_str(),
                    ps.c_str(), static_cast<long long>(serin::start_index(id)),
                    std::string(to_string(serin::default_bound_for(id))).c_str());
      }
      return kExitOk;
    }

    if (analyze->parsed()) {
      serin::AnalysisConfig config;
      config.series = parse_series(series_name, params);
      if (!preset.empty()) serin::apply_preset(config, preset);
      if (n) config.block_size = n;
      if (K) config.stages = K;
      if (config.block_size == 0 || config.stages == 0)
        throw UsageError("analyze needs --n and --stages (or a preset)");
      if (!bound_name.empty()) {
        const auto b = serin::bound_from_string(bound_name);
        if (!b) throw UsageError("unknown bound: " + bound_name);
        config.bound = *b;
      }
      config.epsilon = epsilon;
      config.chunk = std::min<std::uint64_t>(chunk, config.block_size);
      config.threads = threads;
      config.window = window;
      config.mobius_table = table_path;
      config.cache_dir = cache_dir_from(cache_flag);

      std::ofstream trace;
      std::ostream* trace_out = nullptr;
      if (!trace_path.empty()) {
        trace = open_output(trace_path);
        trace_out = &trace;
      }
      const auto run = serin::run_convergence(config, trace_out);
      std::cout << serin::verdict_json(run.verdict) << "\n";
      return kExitOk;
    }

    if (limits->parsed()) {
      serin::LimitsConfig config;
      config.series = parse_series(l_series, l_params);
      if (!l_preset.empty()) serin::apply_preset(config, l_preset);
      if (l_stages) config.stages = l_stages;
      if (config.stages == 0) throw UsageError("limits needs --stages (or a preset)");
      config.bins = l_bins;
      config.rho = parse_rho(l_rho);
      config.epsilon = l_epsilon;
      config.mobius_table = l_table;
      if (l_mode == "finite")
        config.mode = serin::LimitPosteriorMode::dirichlet_finite;
      else if (l_mode == "dp")
        config.mode = serin::LimitPosteriorMode::dirichlet_process;
      else
        throw UsageError("mode must be finite or dp");
      if (l_base == "uniform")
        config.base = serin::BaseMeasure::uniform;
      else if (l_base == "geometric")
        config.base = serin::BaseMeasure::geometric;
      else
        throw UsageError("base must be uniform or geometric");

      std::ofstream trace;
      std::ostream* trace_out = nullptr;
      if (!l_trace.empty()) {
        trace = open_output(l_trace);
        trace_out = &trace;
      }
      const auto run = serin::run_limits(config, trace_out);
      std::cout << serin::report_json(run.report) << "\n";
      return kExitOk;
    }

    if (sweep->parsed()) {
      serin::AnalysisConfig config;
      config.series = parse_series(s_series, s_params);
      config.block_size = s_n;
      config.stages = s_K;
      if (config.block_size == 0 || config.stages == 0)
        throw UsageError("sweep needs --n and --stages");
      if (!s_bound.empty()) {
        const auto b = serin::bound_from_string(s_bound);
        if (!b) throw UsageError("unknown bound: " + s_bound);
        config.bound = *b;
      }
      config.epsilon = s_epsilon;
      config.chunk = std::min<std::uint64_t>(s_chunk, config.block_size);
      config.threads = s_threads;
      config.mobius_table = s_table;
      config.cache_dir = cache_dir_from(s_cache);

      std::vector<double> values;
      std::stringstream ss(s_values);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          values.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("bad grid value: " + item);
        }
      }
      if (values.empty()) throw UsageError("empty grid");

      std::ofstream tsv;
      std::ostream* tsv_out = nullptr;
      if (!s_out.empty()) {
        tsv = open_output(s_out);
        tsv_out = &tsv;
      }
      const auto result = serin::run_sweep(config, s_param, values, tsv_out);
      std::cout << serin::sweep_summary_json(result) << "\n";
      return kExitOk;
    }

    if (mbuild->parsed()) {
      const auto table = serin::MobiusTable::build(m_limit, m_segment, m_threads);
      table.save(m_out);
      std::cout << "wrote " << table.limit() << " values to " << m_out << "\n";
      return kExitOk;
    }
    if (mmertens->parsed()) {
      const auto table = serin::MobiusTable::load(mm_table);
      std::cout << table.mertens(mm_x) << "\n";
      return kExitOk;
    }

    if (bern->parsed()) {
      using namespace serin::bernoulli;
      const ProbeSeries ps = b_series == "s1"   ? ProbeSeries::s1
                             : b_series == "s2" ? ProbeSeries::s2
                                                : throw UsageError("series must be s1 or s2");
      const TermMode mode = b_mode == "exact"      ? TermMode::exact
                            : b_mode == "stirling" ? TermMode::stirling
                                                   : throw UsageError("mode must be exact or stirling");
      if (b_max_m == 0) throw UsageError("--max-m must be >= 1");

      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!b_out.empty()) {
        file = open_output(b_out);
        out = &file;
      }
      *out << "m,log_abs_term,sign,mode\n";
      for (unsigned m = 1; m <= b_max_m; ++m) {
        try {
          const BernoulliTermRow row = series_term(ps, m, mode);
          char buf[96];
          std::snprintf(buf, sizeof buf, "%u,%.17g,%d,%s\n", row.m, row.log_abs_term,
                        row.sign, std::string(to_string(row.mode)).c_str());
          *out << buf;
        } catch (const precision_loss_error& e) {
          std::cerr << "precision ceiling reached at m=" << e.m()
                    << " (cancellation ratio " << e.condition()
                    << "); emitted rows for m < " << e.m() << "\n";
          break;
        }
      }
      return kExitOk;
    }

    return kExitUsage;
  } catch (const serin::nonfinite_term_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const serin::bernoulli::precision_loss_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const serin::table_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
}
