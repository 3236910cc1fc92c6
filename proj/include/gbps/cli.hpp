#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbps/csv.hpp"
#include "gbps/errors.hpp"
#include "gbps/exponent_fit.hpp"
#include "gbps/goldbach.hpp"
#include "gbps/json_out.hpp"
#include "gbps/kernel.hpp"
#include "gbps/pipeline.hpp"
#include "gbps/table_io.hpp"
#include "gbps/weight_table.hpp"

namespace gbps::cli {

// N lists accept plain values, comma lists, and dyadic ranges: "256",
// "256,512", "2^8..2^14" (doubling from the left endpoint up to the right).
inline std::uint64_t parse_count(const std::string& token) {
  const auto parse_digits = [&](const std::string& d) -> std::uint64_t {
    if (d.empty()) throw std::invalid_argument("empty number in N list");
    for (const char c : d) {
      if (c < '0' || c > '9') {
        throw std::invalid_argument("bad number '" + token + "' in N list");
      }
    }
    try {
      return std::stoull(d);
    } catch (const std::exception&) {
      throw std::invalid_argument("number '" + token + "' out of range");
    }
  };
  const auto caret = token.find('^');
  if (caret == std::string::npos) return parse_digits(token);
  const std::uint64_t base = parse_digits(token.substr(0, caret));
  const std::uint64_t exp = parse_digits(token.substr(caret + 1));
  if (base < 2 || exp > 63) {
    throw std::invalid_argument("bad power '" + token + "' in N list");
  }
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (v > std::uint64_t{1} << 60) {
      throw std::invalid_argument("power '" + token + "' overflows");
    }
    v *= base;
  }
  return v;
}

inline std::vector<std::uint64_t> parse_n_list(const std::string& spec) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string token = spec.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    start = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    if (token.empty()) {
      throw std::invalid_argument("empty entry in N list '" + spec + "'");
    }
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(token));
      continue;
    }
    const std::uint64_t lo = parse_count(token.substr(0, dots));
    const std::uint64_t hi = parse_count(token.substr(dots + 2));
    if (lo < 1 || lo > hi) {
      throw std::invalid_argument("bad range '" + token + "' in N list");
    }
    for (std::uint64_t v = lo; v <= hi; v *= 2) {
      out.push_back(v);
      if (v > hi / 2) break;  // avoid u64 overflow on v *= 2
    }
  }
  if (out.empty()) throw std::invalid_argument("empty N list");
  return out;
}

namespace detail {

struct CommonOpts {
  std::string cache_dir;
  std::uint64_t table_capacity = kDefaultTableCapacity;
  std::uint64_t transform_capacity = kDefaultTransformCapacity;
};

inline std::string resolve_cache_dir(const CommonOpts& opts) {
  if (!opts.cache_dir.empty()) return opts.cache_dir;
  if (const char* env = std::getenv("GBPS_CACHE_DIR")) return env;
  return {};
}

inline WeightKind parse_weight(const std::string& name) {
  if (name == "von_mangoldt") return WeightKind::von_mangoldt;
  if (name == "unit") return WeightKind::unit;
  throw std::invalid_argument("unknown weight '" + name +
                              "' (expected von_mangoldt or unit)");
}

inline void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
}

inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
}

inline WeightTable obtain_table(WeightKind kind, std::uint64_t n_max,
                                const CommonOpts& opts) {
  const std::string dir = resolve_cache_dir(opts);
  std::filesystem::path path;
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    path = std::filesystem::path(dir) /
           (std::string(weight_kind_name(kind)) + "_" +
            std::to_string(n_max) + ".gbps");
    if (std::filesystem::exists(path)) {
      try {
        WeightTable t = read_table(path);
        if (t.kind == kind && t.n_max == n_max) return t;
        std::cerr << "warning: cache " << path.string()
                  << " does not match the requested table; recomputing\n";
      } catch (const format_error& e) {
        std::cerr << "warning: unreadable cache " << path.string() << " ("
                  << e.what() << "); recomputing\n";
      }
    }
  }
  WeightTable t = kind == WeightKind::unit
                      ? build_unit_table(n_max, opts.table_capacity)
                      : build_mangoldt_table(n_max, opts.table_capacity);
  if (!path.empty()) {
    try {
      write_table(t, path);
    } catch (const std::exception& e) {
      std::cerr << "warning: cannot write cache " << path.string() << " ("
                << e.what() << ")\n";
    }
  }
  return t;
}

inline GoldbachSeries obtain_series(const WeightTable& table,
                                    ConvolutionMethod method,
                                    std::uint64_t n_max,
                                    const CommonOpts& opts) {
  const std::string dir = resolve_cache_dir(opts);
  std::filesystem::path path;
  if (!dir.empty()) {
    path = std::filesystem::path(dir) /
           (std::string("g_") + weight_kind_name(table.kind) + "_" +
            (method == ConvolutionMethod::fast ? "fast" : "direct") + "_" +
            std::to_string(n_max) + ".gbgs");
    if (std::filesystem::exists(path)) {
      try {
        SeriesCache cached = read_series(path);
        if (cached.source_kind == table.kind && cached.n_max == n_max) {
          GoldbachSeries g;
          g.n_max = n_max;
          g.source_kind = cached.source_kind;
          g.method = method;
          g.g = std::move(cached.g);
          return g;
        }
        std::cerr << "warning: cache " << path.string()
                  << " does not match the requested series; recomputing\n";
      } catch (const format_error& e) {
        std::cerr << "warning: unreadable cache " << path.string() << " ("
                  << e.what() << "); recomputing\n";
      }
    }
  }
  GoldbachSeries g = method == ConvolutionMethod::fast
                         ? goldbach_fast(table, n_max, opts.transform_capacity)
                         : goldbach_direct(table, n_max);
  if (!path.empty()) {
    try {
      write_series({g.n_max, g.source_kind, g.g}, path);
    } catch (const std::exception& e) {
      std::cerr << "warning: cannot write cache " << path.string() << " ("
                << e.what() << ")\n";
    }
  }
  return g;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // binary: bytes as written
  if (!os) throw std::invalid_argument("cannot open output file " + path);
  return os;
}

// The largest truncation length any N in the list needs; the table must
// cover it.
inline std::uint64_t required_table_length(
    const std::vector<std::uint64_t>& n_list, double epsilon) {
  std::uint64_t need = 1;
  for (const std::uint64_t n : n_list) {
    if (n < 2) throw std::invalid_argument("contour commands need N >= 2");
    need = std::max(need, truncation_length(n, epsilon));
  }
  return need;
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "Goldbach-average laboratory: weight tables, autoconvolutions, "
      "contour extraction of partial sums, arc decompositions, and "
      "growth-rate reports"};
  app.require_subcommand(1);

  detail::CommonOpts common;
  app.add_option("--cache-dir", common.cache_dir,
                 "Directory for binary table/series caches (also taken from "
                 "GBPS_CACHE_DIR)");
  app.add_option("--max-entries", common.table_capacity,
                 "Weight table entry budget");
  app.add_option("--max-transform", common.transform_capacity,
                 "FFT size budget");

  std::string weight = "von_mangoldt";
  std::uint64_t n_max = 0;
  std::string method = "fast";
  double c = 0.5;
  double delta = 0.5;
  double epsilon = 1e-9;
  std::string n_list_spec;
  std::string out_path;
  std::string samples_out;
  std::string format = "json";
  std::uint64_t x_min = 0, x_max = 0;
  std::optional<std::uint64_t> nodes_override;
  int exit_code = 0;

  const auto add_weight = [&](CLI::App* cmd) {
    cmd->add_option("--weight", weight, "von_mangoldt or unit");
  };
  const auto add_out = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--out", out_path, "Output file");
    if (required) opt->required();
  };
  const auto parse_method = [&]() {
    if (method == "fast") return ConvolutionMethod::fast;
    if (method == "direct") return ConvolutionMethod::direct;
    throw std::invalid_argument("unknown method '" + method +
                                "' (expected fast or direct)");
  };
  const auto check_format = [&]() {
    if (format != "csv" && format != "json") {
      throw std::invalid_argument("format must be csv or json");
    }
  };

  auto* sieve = app.add_subcommand(
      "sieve", "Build a weight table and store it as a binary cache");
  add_weight(sieve);
  sieve->add_option("--nmax", n_max, "Table length")->required();
  add_out(sieve);
  sieve->callback([&] {
    const auto table =
        detail::obtain_table(detail::parse_weight(weight), n_max, common);
    write_table(table, out_path);
  });

  const auto convolution_command = [&](CLI::App* cmd) {
    add_weight(cmd);
    cmd->add_option("--nmax", n_max, "Series length")->required();
    cmd->add_option("--method", method, "fast (FFT) or direct (quadratic)");
    cmd->add_option("--c", c, "Main-term constant in E(x) = S(x) - c*x^2");
    add_out(cmd);
    cmd->callback([&] {
      const auto table =
          detail::obtain_table(detail::parse_weight(weight), n_max, common);
      const auto g = detail::obtain_series(table, parse_method(), n_max, common);
      const auto sum = summatory(g, c);
      auto os = detail::open_output(out_path);
      write_goldbach_csv(os, g, sum);
    });
  };
  convolution_command(app.add_subcommand(
      "goldbach", "Autoconvolution G(n) with summatory S and error E"));
  convolution_command(app.add_subcommand(
      "summatory",
      "Summatory/error series for a weight (same output as goldbach)"));

  auto* fit = app.add_subcommand(
      "fit", "Dyadic log-log fit of |E(x)| and the implied delta");
  add_weight(fit);
  fit->add_option("--nmax", n_max, "Series length")->required();
  fit->add_option("--xmin", x_min, "First sample abscissa")->required();
  fit->add_option("--xmax", x_max, "Last sample abscissa")->required();
  fit->add_option("--method", method, "fast or direct");
  fit->add_option("--c", c, "Main-term constant");
  add_out(fit);
  fit->add_option("--samples-out", samples_out, "CSV of the fitted samples");
  fit->callback([&] {
    const auto table =
        detail::obtain_table(detail::parse_weight(weight), n_max, common);
    const auto g = detail::obtain_series(table, parse_method(), n_max, common);
    const auto sum = summatory(g, c);
    const auto samples = dyadic_samples(sum.e, x_min, x_max);
    if (!samples_out.empty()) {
      auto ss = detail::open_output(samples_out);
      write_samples_csv(ss, samples);
    }
    const auto f = fit_exponent(samples.points, samples.dropped);
    auto os = detail::open_output(out_path);
    os << fit_report_json(f).dump(2) << '\n';
  });

  auto* contour = app.add_subcommand(
      "contour", "Per-node contour dump with both residual forms");
  add_weight(contour);
  contour->add_option("--N", n_list_spec, "Circle parameter N")->required();
  contour->add_option("--delta", delta, "Arc-split exponent");
  contour->add_option("--epsilon", epsilon, "Truncation tolerance");
  contour->add_option("--nodes", nodes_override, "Override the node count");
  add_out(contour);
  contour->callback([&] {
    detail::check_delta(delta);
    detail::check_epsilon(epsilon);
    const auto n_list = parse_n_list(n_list_spec);
    if (n_list.size() != 1) {
      throw std::invalid_argument("contour takes a single N");
    }
    const std::uint64_t N = n_list[0];
    const std::uint64_t L =
        detail::required_table_length({N}, epsilon);
    const auto table =
        detail::obtain_table(detail::parse_weight(weight), L, common);
    const std::uint64_t M = nodes_override.value_or(next_pow2(L + N + 2));
    const auto grid = make_contour_grid_shared(N, M, delta);
    const auto sv = eval_series_on_grid(table, grid, L, EvalPath::automatic,
                                        common.transform_capacity);
    const auto square = square_residual(sv, delta);
    const auto root = root_residual(sv, delta);
    auto os = detail::open_output(out_path);
    write_contour_csv(os, sv, square, root);
  });

  auto* arcs = app.add_subcommand(
      "arcs", "Extraction, arc decomposition, Parseval, and kernel L2 per N");
  add_weight(arcs);
  arcs->add_option("--N", n_list_spec, "N list, e.g. 256,512 or 2^8..2^14")
      ->required();
  arcs->add_option("--delta", delta, "Arc-split exponent");
  arcs->add_option("--epsilon", epsilon, "Truncation tolerance");
  arcs->add_option("--nodes", nodes_override, "Override the node count");
  arcs->add_option("--format", format, "json or csv");
  add_out(arcs);
  arcs->callback([&] {
    detail::check_delta(delta);
    detail::check_epsilon(epsilon);
    check_format();
    const auto n_list = parse_n_list(n_list_spec);
    const auto table = detail::obtain_table(
        detail::parse_weight(weight),
        detail::required_table_length(n_list, epsilon), common);
    std::vector<ArcRunReport> runs;
    for (const std::uint64_t N : n_list) {
      runs.push_back(run_arc_analysis(table, N, delta, epsilon,
                                      nodes_override,
                                      common.transform_capacity));
    }
    auto os = detail::open_output(out_path);
    if (format == "csv") {
      write_arc_runs_csv(os, runs);
    } else if (runs.size() == 1) {
      os << arc_run_json(runs[0]).dump(2) << '\n';
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : runs) arr.push_back(arc_run_json(r));
      os << arr.dump(2) << '\n';
    }
  });

  auto* parseval = app.add_subcommand(
      "parseval", "Mean-square identity sides and tail bound per N");
  add_weight(parseval);
  parseval->add_option("--N", n_list_spec, "N list")->required();
  parseval->add_option("--epsilon", epsilon, "Truncation tolerance");
  parseval->add_option("--format", format, "json or csv");
  add_out(parseval);
  parseval->callback([&] {
    detail::check_epsilon(epsilon);
    check_format();
    const auto n_list = parse_n_list(n_list_spec);
    const auto table = detail::obtain_table(
        detail::parse_weight(weight),
        detail::required_table_length(n_list, epsilon), common);
    std::vector<ParsevalReport> reports;
    for (const std::uint64_t N : n_list) {
      const std::uint64_t L = truncation_length(N, epsilon);
      reports.push_back(parseval_check(table, N, next_pow2(2 * L + 2),
                                       epsilon, common.transform_capacity));
    }
    auto os = detail::open_output(out_path);
    if (format == "csv") {
      write_parseval_csv(os, reports);
    } else if (reports.size() == 1) {
      os << parseval_report_json(reports[0]).dump(2) << '\n';
    } else {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(parseval_report_json(r));
      os << arr.dump(2) << '\n';
    }
  });

  auto* report = app.add_subcommand(
      "report", "Run every identity and growth check; exit 4 on failure");
  add_weight(report);
  report->add_option("--N", n_list_spec, "N list")->required();
  report->add_option("--delta", delta, "Arc-split exponent");
  report->add_option("--epsilon", epsilon, "Truncation tolerance");
  add_out(report, false);
  report->callback([&] {
    detail::check_delta(delta);
    detail::check_epsilon(epsilon);
    const auto n_list = parse_n_list(n_list_spec);
    const auto table = detail::obtain_table(
        detail::parse_weight(weight),
        detail::required_table_length(n_list, epsilon), common);
    const auto summary = run_report_checks(table, n_list, delta, epsilon,
                                           common.transform_capacity);
    for (const auto& chk : summary.checks) {
      std::printf("[%s] %s observed=%.6g bound=%.6g\n",
                  chk.pass ? "PASS" : "FAIL", chk.name.c_str(), chk.observed,
                  chk.bound);
    }
    if (!out_path.empty()) {
      auto os = detail::open_output(out_path);
      os << report_summary_json(summary).dump(2) << '\n';
    }
    if (!summary.all_pass) exit_code = 4;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const capacity_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return exit_code;
}

}  // namespace gbps::cli
