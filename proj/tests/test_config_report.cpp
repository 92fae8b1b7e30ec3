#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qlimit/config.hpp"
#include "qlimit/error.hpp"
#include "qlimit/presets.hpp"
#include "qlimit/report.hpp"

using namespace qlimit;
using nlohmann::json;

namespace {

json preset_json(const std::string& tag) {
  for (const auto& p : presets())
    if (json::parse(p.json)["theorem"] == tag) return json::parse(p.json);
  FAIL("no preset for " << tag);
  return {};
}

std::string error_of(const std::string& text, const std::filesystem::path& dir = {}) {
  try {
    validate_config(parse_config(text, dir));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return "";
}

std::filesystem::path temp_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("qlimit_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ConvergenceReport small_report(const std::string& tag) {
  auto j = preset_json(tag);
  j["replicas"] = tag.find("slln") != std::string::npos ? 4 : 16;
  if (j["n_schedule"].size() > 1) j["n_schedule"] = {10, 100};
  if (tag.find("walk") != std::string::npos) j["n_schedule"] = {50};
  return run_config(parse_config(j.dump()), 7, 1);
}

}  // namespace

TEST_CASE("presets: one per theorem, names embed tags, all validate") {
  CHECK(presets().size() == 10);
  std::set<std::string> tags;
  for (const auto& p : presets()) {
    auto j = json::parse(p.json);
    const std::string tag = j["theorem"];
    tags.insert(tag);
    CHECK(p.name.find(tag) != std::string::npos);
    CHECK(j["name"] == p.name);
    CHECK_NOTHROW(validate_config(parse_config(p.json)));
  }
  CHECK(tags.size() == 10);
}

TEST_CASE("config echo round-trips through parse") {
  for (const auto& p : presets()) {
    auto c = parse_config(p.json);
    auto echo = to_json(c);
    auto again = to_json(parse_config(echo.dump()));
    CHECK(echo == again);
  }
}

TEST_CASE("config diagnostics") {
  const std::string good = preset_json("slln_wot").dump(2);
  CHECK(error_of(good).empty());

  auto syntax = error_of("{\n  \"name\": \"x\",\n  \"theorem\" \"slln_wot\"\n}");
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(syntax.find("column") != std::string::npos);

  auto j = preset_json("slln_wot");
  j["n_schedule"] = {100, 10, 1000};
  CHECK(error_of(j.dump()).find("n_schedule") != std::string::npos);

  j = preset_json("slln_wot");
  j["grid"]["points"] = 1000;
  CHECK(error_of(j.dump()).find("grid") != std::string::npos);

  j = preset_json("slln_wot");
  j["grid"]["spacing"] = 0.1;
  auto unknown = error_of(j.dump());
  CHECK(unknown.find("grid.spacing") != std::string::npos);
  CHECK(unknown.find("unknown") != std::string::npos);

  j = preset_json("slln_wot");
  j.erase("replicas");
  CHECK(error_of(j.dump()).find("replicas") != std::string::npos);

  j = preset_json("slln_kernel");
  j["probes"][1]["x"] = {0.01};
  auto off = error_of(j.dump());
  CHECK(off.find("probes[1]") != std::string::npos);
  CHECK(off.find("kernel(0,1)") != std::string::npos);

  j = preset_json("slln_wot");
  j["theorem"] = "slln";
  CHECK(error_of(j.dump()).find("theorem") != std::string::npos);

  j = preset_json("clt_wot");
  j["distribution"] = {{"kind", "rademacher"}, {"scale", {1.0}}, {"offset", {0.5}}};
  CHECK(error_of(j.dump()).find("zero-mean") != std::string::npos);

  j = preset_json("slln_wot");
  j["distribution"] = {{"kind", "discrete"}, {"atoms", {{0.0}, {1.0}}}, {"probs", {0.5, 0.6}}};
  CHECK(error_of(j.dump()).find("distribution") != std::string::npos);

  j = preset_json("slln_wot");
  j["format_version"] = 2;
  CHECK(error_of(j.dump()).find("format_version") != std::string::npos);
}

TEST_CASE("state files") {
  auto dir = temp_dir("state_file");
  auto grid = GridSpec::make(1, 4.0, 64);
  {
    std::ofstream f(dir / "packet.txt");
    f << "# a boxcar, normalized on load\n";
    for (std::size_t i = 0; i < 64; ++i) f << (i >= 28 && i < 36 ? "1 0" : "0 0") << "\n";
  }
  auto j = preset_json("slln_wot");
  j["grid"] = {{"dim", 1}, {"half_width", 4.0}, {"points", 64}};
  j["initial_state"] = {{"kind", "file"}, {"path", "packet.txt"}};
  j["distribution"] = {{"kind", "rademacher"}, {"scale", {0.1}}, {"offset", {0.0}}};
  auto setup = resolve(parse_config(j.dump(), dir));
  CHECK(std::abs(norm(setup.initial) - 1.0) < 1e-12);
  CHECK(setup.initial.grid() == grid);

  {
    std::ofstream f(dir / "short.txt");
    f << "1 0\n";
  }
  j["initial_state"]["path"] = "short.txt";
  CHECK(error_of(j.dump(), dir).find("initial_state") != std::string::npos);
  j["initial_state"]["path"] = "missing.txt";
  CHECK_THROWS_AS(resolve(parse_config(j.dump(), dir)), Error);
}

TEST_CASE("report json round trip") {
  for (std::string tag : {"slln_kernel", "clt_kernel", "l1_wot", "random_walk", "impulse_slln"}) {
    CAPTURE(tag);
    auto r = small_report(tag);
    auto text = dump_report(r);
    auto back = report_from_json(json::parse(text));
    CHECK(back == r);
    CHECK(dump_report(back) == text);
  }
  CHECK_THROWS_AS(report_from_json(json{{"format_version", 99}}), Error);
}

TEST_CASE("csv headers are fixed") {
  CHECK(csv_header(small_report("slln_wot")) == "n,error,ci_lo,ci_hi,ks_D,ks_p");
  CHECK(csv_header(small_report("impulse_l1")) == "n,error,ci_lo,ci_hi,ks_D,ks_p");
  CHECK(csv_header(small_report("clt_wot")) == "n,statistic,ci_lo,ci_hi,ks_D,ks_p");
  CHECK(csv_header(small_report("random_walk")) == "t,statistic,ci_lo,ci_hi,ks_D,ks_p");
  CHECK(csv_file_name(3) == "probe_03.csv");
}

TEST_CASE("golden csv") {
  ConvergenceReport r;
  r.mode = "distribution";
  ProbeReport p;
  ProbeRow row;
  row.at = 400;
  row.value_re = ComponentSummary{0.25, 0.1, 0.01, 0.2, 0.3};
  row.ks_re = DistributionTest{false, 0.02, 0.5, 10, 10, true};
  row.ks_im = DistributionTest{false, 0.03, 0.25, 10, 10, true};
  p.rows.push_back(row);
  r.probes.push_back(p);
  CHECK(probe_csv(r, 0) ==
        "n,statistic,ci_lo,ci_hi,ks_D,ks_p\n"
        "400,0.25,0.20000000000000001,0.29999999999999999,0.029999999999999999,0.25\n");

  r.mode = "almost_sure";
  r.probes[0].rows[0] = ProbeRow{};
  r.probes[0].rows[0].at = 100;
  r.probes[0].rows[0].median_error = 0.5;
  r.probes[0].rows[0].mean_error = ComponentSummary{0.75, 0.0, 0.0, 0.5, 1.0};
  CHECK(probe_csv(r, 0) == "n,error,ci_lo,ci_hi,ks_D,ks_p\n100,0.75,0.5,1,,\n");
}

TEST_CASE("write report files") {
  auto dir = temp_dir("write");
  auto r = small_report("slln_wot");
  write_report(r, dir / "out");
  CHECK(slurp(dir / "out" / "report.json") == dump_report(r));
  for (std::size_t i = 0; i < r.probes.size(); ++i)
    CHECK(slurp(dir / "out" / csv_file_name(i)) == probe_csv(r, i));
  CHECK(r.config["name"] == "slln_wot_rademacher");
  CHECK(r.format_version == kReportFormatVersion);
}
