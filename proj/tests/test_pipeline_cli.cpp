#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gbps/cli.hpp"
#include "gbps/csv.hpp"
#include "gbps/errors.hpp"
#include "gbps/json_out.hpp"
#include "gbps/pipeline.hpp"
#include "gbps/table_io.hpp"
#include "test_util.hpp"

using gbps_test::TempDir;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("gbps");
  for (const auto& a : args) argv.push_back(a.c_str());
  return gbps::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

nlohmann::json load_schema(const std::string& name) {
  return gbps::load_json_file(std::string(GBPS_SOURCE_DIR) + "/schemas/" +
                              name);
}

}  // namespace

TEST_CASE("arc analysis report is coherent with its ingredients") {
  const std::uint64_t N = 64;
  const double delta = 0.5, eps = 1e-9;
  const auto L = gbps::truncation_length(N, eps);
  const auto table = gbps::build_mangoldt_table(L);
  const auto rep = gbps::run_arc_analysis(table, N, delta, eps);

  REQUIRE(rep.N == N);
  REQUIRE(rep.L == L);
  REQUIRE(rep.M == gbps::next_pow2(L + N + 2));
  REQUIRE(rep.delta == delta);
  REQUIRE(rep.epsilon == eps);
  REQUIRE(rep.psi_sieve == gbps::partial_sum(table, N));
  REQUIRE(std::abs(rep.psi_extracted - rep.psi_sieve) <=
          eps + 1e-8 * static_cast<double>(N));
  REQUIRE(std::abs(rep.major_re + rep.minor_re - rep.total_re) <= 1e-10);
  REQUIRE(std::abs(rep.total_re - (rep.psi_sieve - static_cast<double>(N))) <=
          eps + 1e-7 * static_cast<double>(N));
  REQUIRE(rep.total_im == 0.0);
  REQUIRE_FALSE(rep.major_empty);

  const auto par =
      gbps::parseval_check(table, N, gbps::next_pow2(2 * L + 2), eps);
  REQUIRE(rep.parseval_lhs == par.lhs);
  REQUIRE(rep.parseval_rhs == par.rhs);
  REQUIRE(rep.parseval_tail == par.tail_bound);
  REQUIRE(rep.kernel_l2_minor == gbps::minor_kernel_l2(N, delta, rep.M));
  REQUIRE(rep.t0 == gbps::major_arc_half_angle(N, delta));
}

TEST_CASE("arc analysis validates its request") {
  const auto table = gbps::build_mangoldt_table(2000);
  REQUIRE_THROWS_AS(gbps::run_arc_analysis(table, 1024, 0.5, 1e-9),
                    std::out_of_range);  // needs L = 30792
  const auto small = gbps::build_mangoldt_table(1800);
  REQUIRE_THROWS_AS(
      gbps::run_arc_analysis(small, 64, 0.5, 1e-9, std::uint64_t{512}),
      gbps::configuration_error);  // override below L + N + 2
  REQUIRE_THROWS_AS(gbps::run_arc_analysis(small, 64, 0.5, 1e-9, std::nullopt,
                                           std::uint64_t{1024}),
                    gbps::capacity_error);
}

TEST_CASE("report checks cover identities and growth") {
  const std::vector<std::uint64_t> ns{256, 512, 1024, 2048};
  const auto L = gbps::truncation_length(2048, 1e-9);
  const auto table = gbps::build_mangoldt_table(L);
  const auto rs = gbps::run_report_checks(table, ns, 0.5, 1e-9);

  REQUIRE(rs.runs.size() == 4);
  REQUIRE(rs.checks.size() == 4 * 5 + 4);
  REQUIRE(rs.all_pass);
  for (const auto& chk : rs.checks) REQUIRE(chk.pass);

  auto has = [&](const std::string& name) {
    for (const auto& chk : rs.checks) {
      if (chk.name == name) return true;
    }
    return false;
  };
  REQUIRE(has("extraction_identity[N=256]"));
  REQUIRE(has("decomposition_identity[N=2048]"));
  REQUIRE(has("reality[N=512]"));
  REQUIRE(has("arc_additivity[N=1024]"));
  REQUIRE(has("parseval_identity[N=256]"));
  REQUIRE(has("major_arc_slope"));
  REQUIRE(has("minor_arc_slope"));
  REQUIRE(has("parseval_growth_slope"));
  REQUIRE(has("kernel_l2_ratio"));
}

TEST_CASE("report checks without enough heights skip the growth fits") {
  const auto L = gbps::truncation_length(64, 1e-9);
  const auto table = gbps::build_mangoldt_table(L);
  const auto rs = gbps::run_report_checks(table, {64}, 0.5, 1e-9);
  REQUIRE(rs.checks.size() == 5);
  REQUIRE(rs.all_pass);
  REQUIRE_THROWS_AS(gbps::run_report_checks(table, {}, 0.5, 1e-9),
                    gbps::degenerate_input_error);
}

TEST_CASE("emitted json validates against the shipped schemas") {
  const std::uint64_t N = 64;
  const auto L = gbps::truncation_length(N, 1e-9);
  const auto table = gbps::build_mangoldt_table(L);
  const auto rep = gbps::run_arc_analysis(table, N, 0.5, 1e-9);

  std::string why;
  const auto arc_doc = gbps::arc_run_json(rep);
  REQUIRE(gbps::schema_validate(arc_doc, load_schema("arc_run.schema.json"),
                                &why));
  REQUIRE(arc_doc.size() == 14);

  const auto par =
      gbps::parseval_check(table, N, gbps::next_pow2(2 * L + 2));
  REQUIRE(gbps::schema_validate(gbps::parseval_report_json(par),
                                load_schema("parseval_report.schema.json"),
                                &why));

  gbps::ExponentFit fit;
  fit.slope = 1.5;
  fit.intercept = -0.7;
  fit.residual_rms = 1e-3;
  fit.sample_count = 9;
  fit.dropped_count = 1;
  REQUIRE(gbps::schema_validate(gbps::fit_report_json(fit),
                                load_schema("fit_report.schema.json"), &why));

  const auto rs = gbps::run_report_checks(table, {64}, 0.5, 1e-9);
  REQUIRE(gbps::schema_validate(gbps::report_summary_json(rs),
                                load_schema("report_summary.schema.json"),
                                &why));
}

TEST_CASE("schema validation rejects malformed documents") {
  const auto schema = load_schema("fit_report.schema.json");
  nlohmann::json doc{{"slope", 1.0},         {"intercept", 0.0},
                     {"residual_rms", 0.0},  {"delta", 1.0},
                     {"sample_count", 3},    {"dropped_count", 0}};
  std::string why;
  REQUIRE(gbps::schema_validate(doc, schema, &why));

  auto missing = doc;
  missing.erase("delta");
  REQUIRE_FALSE(gbps::schema_validate(missing, schema, &why));
  REQUIRE(why.find("delta") != std::string::npos);

  auto wrong_type = doc;
  wrong_type["slope"] = "steep";
  REQUIRE_FALSE(gbps::schema_validate(wrong_type, schema, &why));

  auto fractional_count = doc;
  fractional_count["sample_count"] = 2.5;
  REQUIRE_FALSE(gbps::schema_validate(fractional_count, schema, &why));
}

TEST_CASE("goldbach csv golden rows for the unit weight") {
  const auto t = gbps::build_unit_table(16);
  const auto g = gbps::goldbach_direct(t, 16);
  const auto s = gbps::summatory(g, 0.5);
  std::ostringstream os;
  gbps::write_goldbach_csv(os, g, s);
  const auto rows = lines_of(os.str());
  REQUIRE(rows.size() == 16);  // header + n = 2..16
  REQUIRE(rows[0] == "n,G,S,E");
  REQUIRE(rows[1] == "2,1,1,-1");
  REQUIRE(rows[2] == "3,2,3,-1.5");
  REQUIRE(rows[3] == "4,3,6,-2");
}

TEST_CASE("contour csv marks minor nodes with an empty root column") {
  const std::uint64_t N = 8, L = 80;
  const auto table = gbps::build_mangoldt_table(L);
  auto grid = gbps::make_contour_grid_shared(N, 128, 0.5);
  const auto sv = gbps::eval_series_on_grid(table, grid, L);
  const auto sq = gbps::square_residual(sv, 0.5);
  const auto rt = gbps::root_residual(sv, 0.5);
  std::ostringstream os;
  gbps::write_contour_csv(os, sv, sq, rt);
  const auto rows = lines_of(os.str());
  REQUIRE(rows.size() == 129);
  REQUIRE(rows[0] ==
          "j,angle,re_z,im_z,abs_one_minus_z,major,abs_F,square_residual,"
          "root_residual");
  bool saw_empty = false, saw_filled = false;
  for (std::uint64_t j = 0; j < 128; ++j) {
    const auto& row = rows[j + 1];
    if (grid->major_flags[j]) {
      REQUIRE(row.back() != ',');
      saw_filled = true;
    } else {
      REQUIRE(row.back() == ',');
      saw_empty = true;
    }
  }
  REQUIRE(saw_empty);
  REQUIRE(saw_filled);
  // Node zero line starts with the exact on-axis values.
  REQUIRE(rows[1].rfind("0,0,0.875,0,0.125,1,", 0) == 0);
}

TEST_CASE("n list parsing") {
  using gbps::cli::parse_n_list;
  REQUIRE(parse_n_list("7") == std::vector<std::uint64_t>{7});
  REQUIRE(parse_n_list("256,512") == std::vector<std::uint64_t>{256, 512});
  REQUIRE(parse_n_list("2^8") == std::vector<std::uint64_t>{256});
  REQUIRE(parse_n_list("2,3^2") == std::vector<std::uint64_t>{2, 9});
  REQUIRE(parse_n_list("2^8..2^10") ==
          std::vector<std::uint64_t>{256, 512, 1024});
  REQUIRE(parse_n_list("10..80") == std::vector<std::uint64_t>{10, 20, 40, 80});
  REQUIRE(parse_n_list("10..81") ==
          std::vector<std::uint64_t>{10, 20, 40, 80});
  REQUIRE(parse_n_list("2^8..2^14") ==
          std::vector<std::uint64_t>{256, 512, 1024, 2048, 4096, 8192, 16384});

  REQUIRE_THROWS_AS(parse_n_list(""), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("4,,8"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("abc"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("-4"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("8..4"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("0..8"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("1^3"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("2^64"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_n_list("2^63"), std::invalid_argument);
}

TEST_CASE("cli sieve writes a readable cache") {
  TempDir dir;
  const auto out = dir.file("vm.gbps");
  REQUIRE(run_cli({"sieve", "--weight", "von_mangoldt", "--nmax", "1000",
                   "--out", out}) == 0);
  const auto back = gbps::read_table(out);
  const auto fresh = gbps::build_mangoldt_table(1000);
  REQUIRE(back.kind == fresh.kind);
  REQUIRE(back.n_max == 1000);
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    REQUIRE(back.values[n] == fresh.values[n]);
  }
}

TEST_CASE("cli goldbach emits the expected csv") {
  TempDir dir;
  const auto out = dir.file("g.csv");
  REQUIRE(run_cli({"goldbach", "--weight", "unit", "--nmax", "16", "--method",
                   "direct", "--out", out}) == 0);
  const auto rows = lines_of(slurp(out));
  REQUIRE(rows[0] == "n,G,S,E");
  REQUIRE(rows[1] == "2,1,1,-1");
  REQUIRE(rows[2] == "3,2,3,-1.5");

  // summatory is the same pipeline under another name
  const auto out2 = dir.file("s.csv");
  REQUIRE(run_cli({"summatory", "--weight", "unit", "--nmax", "16", "--method",
                   "direct", "--out", out2}) == 0);
  REQUIRE(slurp(out2) == slurp(out));
}

TEST_CASE("cli goldbach output is byte deterministic") {
  TempDir dir;
  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  REQUIRE(run_cli({"goldbach", "--weight", "von_mangoldt", "--nmax", "512",
                   "--out", a}) == 0);
  REQUIRE(run_cli({"goldbach", "--weight", "von_mangoldt", "--nmax", "512",
                   "--out", b}) == 0);
  REQUIRE(slurp(a) == slurp(b));
}

TEST_CASE("cli fit recovers the unit error exponent") {
  TempDir dir;
  const auto out = dir.file("fit.json");
  const auto samples = dir.file("samples.csv");
  REQUIRE(run_cli({"fit", "--weight", "unit", "--nmax", "512", "--xmin", "2",
                   "--xmax", "512", "--method", "direct", "--out", out,
                   "--samples-out", samples}) == 0);
  const auto doc = gbps::load_json_file(out);
  std::string why;
  REQUIRE(gbps::schema_validate(doc, load_schema("fit_report.schema.json"),
                                &why));
  REQUIRE(doc["slope"].get<double>() == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(doc["delta"].get<double>() == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(doc["sample_count"].get<int>() == 9);
  REQUIRE(doc["dropped_count"].get<int>() == 0);

  const auto rows = lines_of(slurp(samples));
  REQUIRE(rows[0] == "x,absE");
  REQUIRE(rows[1] == "2,1");
  REQUIRE(rows.size() == 10);
}

TEST_CASE("cli contour writes one row per node") {
  TempDir dir;
  const auto out = dir.file("contour.csv");
  REQUIRE(run_cli({"contour", "--weight", "von_mangoldt", "--N", "8",
                   "--epsilon", "1e-3", "--out", out}) == 0);
  const auto rows = lines_of(slurp(out));
  // L(8, 1e-3) = 80, so M = next_pow2(80 + 8 + 2) = 128.
  REQUIRE(rows.size() == 129);
  REQUIRE(rows[0].rfind("j,angle,", 0) == 0);
  REQUIRE(run_cli({"contour", "--weight", "von_mangoldt", "--N", "8,16",
                   "--out", out}) == 2);
}

TEST_CASE("cli arcs json validates and csv is deterministic") {
  TempDir dir;
  const auto out = dir.file("arcs.json");
  REQUIRE(run_cli({"arcs", "--weight", "von_mangoldt", "--N", "64", "--delta",
                   "0.5", "--out", out}) == 0);
  const auto doc = gbps::load_json_file(out);
  std::string why;
  REQUIRE(gbps::schema_validate(doc, load_schema("arc_run.schema.json"), &why));
  REQUIRE(doc["N"].get<std::uint64_t>() == 64);

  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  for (const auto& path : {a, b}) {
    REQUIRE(run_cli({"arcs", "--weight", "von_mangoldt", "--N", "64,128",
                     "--format", "csv", "--out", path}) == 0);
  }
  REQUIRE(slurp(a) == slurp(b));
  const auto rows = lines_of(slurp(a));
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0] ==
          "N,M,L,delta,psi_sieve,psi_extracted,major_re,minor_re,total_re,"
          "total_im,t0,parseval_lhs,parseval_rhs,kernel_l2_minor");
  REQUIRE(rows[1].rfind("64,", 0) == 0);
  REQUIRE(rows[2].rfind("128,", 0) == 0);

  // a json list when several N are requested
  const auto multi = dir.file("multi.json");
  REQUIRE(run_cli({"arcs", "--weight", "von_mangoldt", "--N", "64,128",
                   "--out", multi}) == 0);
  const auto arr = gbps::load_json_file(multi);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  for (const auto& item : arr) {
    REQUIRE(gbps::schema_validate(item, load_schema("arc_run.schema.json"),
                                  &why));
  }
}

TEST_CASE("cli parseval emits reports for each height") {
  TempDir dir;
  const auto out = dir.file("parseval.json");
  REQUIRE(run_cli({"parseval", "--weight", "von_mangoldt", "--N", "2,64",
                   "--out", out}) == 0);
  const auto arr = gbps::load_json_file(out);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 2);
  std::string why;
  for (const auto& item : arr) {
    REQUIRE(gbps::schema_validate(item,
                                  load_schema("parseval_report.schema.json"),
                                  &why));
    const double lhs = item["lhs"].get<double>();
    const double rhs = item["rhs"].get<double>();
    REQUIRE(std::abs(lhs / rhs - 1.0) <= 1e-6);
  }

  const auto csv = dir.file("parseval.csv");
  REQUIRE(run_cli({"parseval", "--weight", "von_mangoldt", "--N", "64",
                   "--format", "csv", "--out", csv}) == 0);
  const auto rows = lines_of(slurp(csv));
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0] == "N,M,L,lhs,rhs,tail_bound");
}

TEST_CASE("cli report passes on the reference heights") {
  TempDir dir;
  const auto out = dir.file("report.json");
  REQUIRE(run_cli({"report", "--weight", "von_mangoldt", "--N",
                   "256,512,1024,2048", "--delta", "0.5", "--out", out}) == 0);
  const auto doc = gbps::load_json_file(out);
  std::string why;
  REQUIRE(gbps::schema_validate(doc, load_schema("report_summary.schema.json"),
                                &why));
  REQUIRE(doc["all_pass"].get<bool>());
  REQUIRE(doc["checks"].size() == 24);
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  // parse error: unknown subcommand / missing required option
  REQUIRE(run_cli({"frobnicate"}) == 2);
  REQUIRE(run_cli({"sieve", "--weight", "unit"}) == 2);
  // invalid argument values
  REQUIRE(run_cli({"goldbach", "--weight", "nope", "--nmax", "16", "--out",
                   dir.file("x.csv")}) == 2);
  REQUIRE(run_cli({"arcs", "--weight", "von_mangoldt", "--N", "1", "--out",
                   dir.file("y.json")}) == 2);
  REQUIRE(run_cli({"arcs", "--weight", "von_mangoldt", "--N", "64", "--delta",
                   "2.0", "--out", dir.file("z.json")}) == 2);
  // capacity exhaustion
  REQUIRE(run_cli({"--max-transform", "1024", "goldbach", "--weight",
                   "von_mangoldt", "--nmax", "4096", "--out",
                   dir.file("big.csv")}) == 3);
  REQUIRE(run_cli({"--max-entries", "100", "sieve", "--weight", "von_mangoldt",
                   "--nmax", "1000", "--out", dir.file("t.gbps")}) == 3);
  // help is not an error
  REQUIRE(run_cli({"--help"}) == 0);
}

TEST_CASE("cli reuses and repairs caches") {
  TempDir dir;
  const auto cache = (dir.path / "cache").string();
  const auto out = dir.file("g.csv");
  REQUIRE(run_cli({"--cache-dir", cache, "goldbach", "--weight",
                   "von_mangoldt", "--nmax", "256", "--out", out}) == 0);
  const auto table_cache =
      (std::filesystem::path(cache) / "von_mangoldt_256.gbps").string();
  const auto series_cache =
      (std::filesystem::path(cache) / "g_von_mangoldt_fast_256.gbgs").string();
  REQUIRE(std::filesystem::exists(table_cache));
  REQUIRE(std::filesystem::exists(series_cache));
  const auto first = slurp(out);

  // second run consumes the caches and reproduces the bytes
  REQUIRE(run_cli({"--cache-dir", cache, "goldbach", "--weight",
                   "von_mangoldt", "--nmax", "256", "--out", out}) == 0);
  REQUIRE(slurp(out) == first);

  // corrupt the table cache; the run must warn, recompute, and still be right
  {
    std::ofstream os(table_cache, std::ios::binary | std::ios::trunc);
    os << "not a cache";
  }
  REQUIRE(run_cli({"--cache-dir", cache, "goldbach", "--weight",
                   "von_mangoldt", "--nmax", "256", "--out", out}) == 0);
  REQUIRE(slurp(out) == first);
  // and the damaged file was replaced with a readable one
  REQUIRE(gbps::read_table(table_cache).n_max == 256);
}

TEST_CASE("mismatched caches are recomputed rather than trusted") {
  TempDir dir;
  // a unit table parked at the path the von Mangoldt table would use
  const auto path = dir.file("von_mangoldt_64.gbps");
  gbps::write_table(gbps::build_unit_table(64), path);
  gbps::cli::detail::CommonOpts opts;
  opts.cache_dir = dir.path.string();
  const auto t =
      gbps::cli::detail::obtain_table(gbps::WeightKind::von_mangoldt, 64, opts);
  REQUIRE(t.kind == gbps::WeightKind::von_mangoldt);
  REQUIRE(t.values[8] == std::log(2.0));
}

TEST_CASE("cache directory can come from the environment") {
  TempDir dir;
  const auto cache = (dir.path / "env_cache").string();
  ::setenv("GBPS_CACHE_DIR", cache.c_str(), 1);
  const auto out = dir.file("g.csv");
  const int rc = run_cli({"goldbach", "--weight", "unit", "--nmax", "32",
                          "--method", "direct", "--out", out});
  ::unsetenv("GBPS_CACHE_DIR");
  REQUIRE(rc == 0);
  REQUIRE(std::filesystem::exists(std::filesystem::path(cache) /
                                  "unit_32.gbps"));
}
