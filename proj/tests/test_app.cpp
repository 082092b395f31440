#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "config.hpp"
#include "csv.hpp"
#include "presets.hpp"
#include "runner.hpp"
#include "svg.hpp"

#include <degenid/inversion.hpp>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace degenid;
using namespace degenid::app;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "degenid_test_app" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small enough that a full inversion takes milliseconds; the data are still
// generated on the inversion grid, so the minimum stays exact.
Config tiny_test1() {
  Config cfg = preset_config("test1");
  cfg.set("nx", 30);
  cfg.set("nt", 80);
  cfg.set("noise_levels", "0.01,0");
  cfg.set("seeds", "1");
  return cfg;
}

}  // namespace

TEST_CASE("config: parse, lookup, and error reporting") {
  const Config cfg = Config::parse(
      "# leading comment\n"
      "a = 1\n"
      "\n"
      "  name =  two words \n"
      "list = 1, 2.5 ,3\n"
      "seeds = 4,5\n");
  CHECK(cfg.get("a") == "1");
  CHECK(cfg.get("name") == "two words");
  CHECK(cfg.get_int("a") == 1);
  CHECK(cfg.get_double("a") == 1.0);
  CHECK(cfg.get_doubles("list") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(cfg.get_u64s("seeds") == std::vector<std::uint64_t>{4, 5});
  CHECK(cfg.has("list"));
  CHECK(!cfg.has("missing"));
  CHECK(cfg.get("missing", "fallback") == "fallback");
  CHECK(cfg.get_double("missing", 2.5) == 2.5);
  CHECK(cfg.get_int("missing", -3) == -3);
  CHECK(cfg.get_u64("missing", 7) == 7);

  CHECK_THROWS_AS((void)cfg.get("missing"), std::out_of_range);
  CHECK_THROWS_AS((void)cfg.get_double("name"), std::invalid_argument);
  CHECK_THROWS_AS((void)cfg.get_int("list"), std::invalid_argument);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), std::invalid_argument);
  CHECK_THROWS_AS(Config::parse(" = value\n"), std::invalid_argument);
  // the line number makes it into the message
  CHECK_THROWS_WITH_AS(Config::parse("a = 1\nbroken\n"), doctest::Contains("line 2"),
                       std::invalid_argument);
}

TEST_CASE("config: serialization round trips and stays sorted") {
  Config cfg;
  cfg.set("zeta", "last");
  cfg.set("alpha", 1.0 / 3.0);
  cfg.set("mid", 0.1);
  cfg.set("tiny", 1e-300);
  cfg.set("count", 42);

  const std::string text = cfg.serialize();
  CHECK(text.find("alpha") < text.find("count"));
  CHECK(text.find("count") < text.find("mid"));
  CHECK(text.find("zeta") == text.rfind('\n', text.size() - 2) + 1);

  const Config back = Config::parse(text);
  CHECK(back == cfg);
  CHECK(back.serialize() == text);
  CHECK(back.get_double("alpha") == 1.0 / 3.0);
  CHECK(back.get_double("mid") == 0.1);
  CHECK(back.get_double("tiny") == 1e-300);

  // 17 significant digits is the shortest fixed precision that round trips
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(-2.5e17)) == -2.5e17);

  const fs::path dir = scratch("config_io");
  cfg.save((dir / "cfg.txt").string());
  CHECK(Config::load((dir / "cfg.txt").string()) == cfg);
}

TEST_CASE("config: merge lets later entries win") {
  Config base = Config::parse("a = 1\nb = 2\n");
  const Config over = Config::parse("b = 3\nc = 4\n");
  base.merge(over);
  CHECK(base.get("a") == "1");
  CHECK(base.get("b") == "3");
  CHECK(base.get("c") == "4");
}

TEST_CASE("csv: quoting, line endings, and layout") {
  CsvTable t({"plain", "tricky, header"});
  t.begin_row();
  t.add(std::string("ab\"c,d"));
  t.add(0.1);
  const std::string text = t.to_string();
  CHECK(text == "plain,\"tricky, header\"\r\n\"ab\"\"c,d\",0.10000000000000001\r\n");

  CsvTable nl({"x"});
  nl.begin_row();
  nl.add(std::string("two\nlines"));
  CHECK(nl.to_string() == "x\r\n\"two\nlines\"\r\n");

  CsvTable wrong({"a", "b"});
  wrong.begin_row();
  wrong.add(1);
  CHECK_THROWS_AS((void)wrong.to_string(), std::logic_error);
}

TEST_CASE("svg: deterministic output with finite coordinates") {
  const auto make = [] {
    LinePlot plot("title text", "x axis", "y axis");
    plot.set_log_y(true);
    std::vector<double> xs = {0.0, 1.0, 2.0}, ys = {1e-3, 0.0, 1.0};  // zero y gets clamped
    plot.add_series("series one", xs, ys);
    plot.add_hline("target", 1e-2);
    return plot.to_string();
  };
  const std::string svg = make();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("title text") != std::string::npos);
  CHECK(svg.find("series one") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("inf") == std::string::npos);
  CHECK(svg == make());

  LinePlot bad("t", "x", "y");
  CHECK_THROWS_AS(bad.add_series("s", {0.0, 1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bad.add_series("s", {}, {}), std::invalid_argument);
}

TEST_CASE("presets: every config builds a validating problem") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const Config cfg = preset_config(name);
    CHECK(cfg.get("name") == name);
    const Problem pb = problem_from_config(cfg);  // validate() runs inside
    CHECK(pb.name == name);
    CHECK(pb.truth.size() == family_dim(pb.spec.family));
    CHECK(int(pb.param_names.size()) == family_dim(pb.spec.family));
    for (Eigen::Index k = 0; k < pb.truth.size(); ++k) {
      CHECK(pb.truth[k] > pb.spec.lower[k]);
      CHECK(pb.truth[k] < pb.spec.upper[k]);
    }
  }
  CHECK_THROWS_AS(preset_config("test15"), std::invalid_argument);
  CHECK_THROWS_AS(preset_config(""), std::invalid_argument);
}

TEST_CASE("presets: published run setups") {
  const Config t1 = preset_config("test1");
  CHECK(t1.get("family") == "constant_a");
  CHECK(t1.get("kind") == "strong");
  CHECK(t1.get_double("alpha") == 1.0);
  CHECK(t1.get_double("ell") == 1.0);
  CHECK(t1.get_double("T") == 5.0);
  CHECK(t1.get_int("nx") == 200);
  CHECK(t1.get_int("nt") == 2000);
  CHECK(t1.get("u0") == "cubic_bump");
  CHECK(t1.get("f") == "none");
  CHECK(t1.get("obs") == "interior");
  CHECK(t1.get("weight") == "x");
  CHECK(t1.get_double("t0") == 0.2);
  CHECK(t1.get_doubles("initial") == std::vector<double>{0.7});
  CHECK(t1.get_doubles("truth") == std::vector<double>{1.7});
  CHECK(t1.get_doubles("lower") == std::vector<double>{0.05});
  CHECK(t1.get_doubles("upper") == std::vector<double>{3.0});

  CHECK(preset_config("test2").get_doubles("truth") == std::vector<double>{1.0});
  CHECK(preset_config("test3").get_doubles("truth") == std::vector<double>{0.2});

  const Config t4 = preset_config("test4");
  CHECK(t4.get("f") == "ramp");
  CHECK(t4.get_double("t0") == 0.4);
  CHECK(t4.get_int("plot_solution") == 1);

  for (const char* name : {"test5", "test6", "test7"})
    CHECK(preset_config(name).get("obs") == "boundary");

  const Config t8 = preset_config("test8");
  CHECK(t8.get("family") == "power_alpha");
  CHECK(t8.get("kind") == "weak");
  CHECK(t8.get_double("ell") == 0.9);
  CHECK(t8.get_double("T") == 10.0);
  CHECK(t8.get_int("nt") == 4000);
  CHECK(t8.get("u0") == "quartic_bump");
  CHECK(t8.get("weight") == "x2");
  CHECK(t8.get_doubles("initial") == std::vector<double>{0.8});
  CHECK(t8.get_doubles("truth") == std::vector<double>{0.4});
  CHECK(t8.get_doubles("upper") == std::vector<double>{0.95});

  const Config t9 = preset_config("test9");
  CHECK(t9.get("kind") == "strong");
  CHECK(t9.get_doubles("initial") == std::vector<double>{1.6});
  CHECK(t9.get_doubles("truth") == std::vector<double>{1.3});
  CHECK(t9.get_doubles("lower") == std::vector<double>{1.0});

  CHECK(preset_config("test10").get_double("ell") == 1.0);
  CHECK(preset_config("test10").get("obs") == "boundary");
  CHECK(preset_config("test11").get_double("ell") == 0.99);
  CHECK(preset_config("test12").get_double("ell") == 1.0);

  const Config t13 = preset_config("test13");
  CHECK(t13.get("family") == "profile_affine");
  CHECK(t13.get_double("alpha") == 0.6);
  CHECK(t13.get("kind") == "weak");
  CHECK(t13.get("obs") == "boundary");
  CHECK(t13.get_doubles("initial") == std::vector<double>{1.0, 1.0});
  CHECK(t13.get_doubles("truth") == std::vector<double>{5.0, 1.5});
  CHECK(t13.get_double("tol") == 0.01);

  const Config t14 = preset_config("test14");
  CHECK(t14.get("family") == "profile_quadratic");
  CHECK(t14.get_doubles("initial") == std::vector<double>{3.5, 2.5, 0.5});
  CHECK(t14.get_doubles("truth") == std::vector<double>{4.0, 3.0, 1.0});
  CHECK(t14.get("tol_metric") == "cost");

  CHECK(preset_config("custom").get("u0") == "zero");
}

TEST_CASE("presets: configs survive the text round trip unchanged") {
  std::vector<std::string> names = preset_names();
  names.push_back("custom");
  for (const std::string& name : names) {
    CAPTURE(name);
    const Config cfg = preset_config(name);
    const std::string text = cfg.serialize();
    const Config back = Config::parse(text);
    CHECK(back == cfg);
    CHECK(back.serialize() == text);
  }
}

TEST_CASE("runner: artifacts, summary, and byte reproducibility") {
  const fs::path root = scratch("experiment");
  const Config cfg = tiny_test1();

  const ExperimentReport rep = run_experiment(cfg, (root / "a").string());
  CHECK(rep.name == "test1");
  CHECK(rep.params.size() == 1);
  CHECK(rep.max_param_error < 1e-6);  // same-grid data, exact minimum
  CHECK(rep.has_tol);
  CHECK(rep.pass);
  CHECK(rep.iterations > 0);
  CHECK(rep.wall_seconds > 0.0);

  for (const char* leaf :
       {"table.csv", "history.csv", "config.txt", "summary.json", "plots/iterates.svg",
        "plots/cost.svg"})
    CHECK(fs::exists(root / "a" / leaf));
  // constant family gets no coefficient plot, and test1 has no solution plot
  CHECK(!fs::exists(root / "a" / "plots" / "coefficient.svg"));
  CHECK(!fs::exists(root / "a" / "plots" / "solution.svg"));

  const std::string table = slurp(root / "a" / "table.csv");
  CHECK(table.rfind("noise %,cost,iterations,a\r\n", 0) == 0);
  const std::string history = slurp(root / "a" / "history.csv");
  CHECK(history.rfind("iteration,cost,a\r\n", 0) == 0);

  const auto summary = nlohmann::json::parse(slurp(root / "a" / "summary.json"));
  CHECK(summary.at("name") == "test1");
  CHECK(summary.at("family") == "constant_a");
  CHECK(std::abs(summary.at("recovered")[0].get<double>() - 1.7) < 1e-6);
  CHECK(summary.at("truth")[0].get<double>() == 1.7);
  CHECK(summary.at("pass").get<bool>());
  CHECK(summary.at("noise_rows").size() == 2);  // two levels, one seed
  CHECK(summary.at("wall_seconds").get<double>() > 0.0);

  // timing lives only in summary.json, so a rerun reproduces the CSVs bytewise
  (void)run_experiment(cfg, (root / "b").string());
  CHECK(slurp(root / "b" / "table.csv") == table);
  CHECK(slurp(root / "b" / "history.csv") == history);
  CHECK(slurp(root / "b" / "config.txt") == slurp(root / "a" / "config.txt"));
}

TEST_CASE("runner: forward artifacts and dissipativity check") {
  const fs::path root = scratch("forward");
  const ForwardReport rep = run_forward(tiny_test1(), root.string());
  CHECK(rep.checked_dissipativity);  // no source term, so the check applies
  CHECK(rep.dissipative);
  CHECK(rep.max_growth <= 1.0 + 1e-12);
  for (const char* leaf : {"solution.csv", "config.txt", "summary.json", "plots/solution.svg"})
    CHECK(fs::exists(root / leaf));

  const std::string table = slurp(root / "solution.csv");
  CHECK(table.rfind("x,", 0) == 0);
  CHECK(table.find("u(t=") != std::string::npos);

  // with a source the energy check does not apply
  Config sourced = tiny_test1();
  sourced.set("f", "ramp");
  const ForwardReport rep2 = run_forward(sourced, (root / "sourced").string());
  CHECK(!rep2.checked_dissipativity);
}

TEST_CASE("runner: suite records errors and keeps going") {
  const fs::path root = scratch("suite");

  Config broken = tiny_test1();
  broken.set("name", "broken");
  broken.set("family", "no_such_family");

  const SuiteReport rep = run_suite({tiny_test1(), broken}, root.string());
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].ok);
  CHECK(rep.entries[0].report.pass);
  CHECK(!rep.entries[1].ok);
  CHECK(!rep.entries[1].error.empty());
  CHECK(!rep.all_pass);
  CHECK(fs::exists(root / "suite.csv"));
  CHECK(fs::exists(root / "suite_summary.json"));
  CHECK(fs::exists(root / "test1" / "table.csv"));

  const std::string table = slurp(root / "suite.csv");
  CHECK(table.find("broken") != std::string::npos);
  CHECK(table.find("error") != std::string::npos);

  // an empty run list is vacuous success
  const SuiteReport empty = run_suite({}, (root / "empty").string());
  CHECK(empty.entries.empty());
  CHECK(empty.all_pass);
}

TEST_CASE("runner: parallel suite matches the sequential artifacts") {
  const fs::path root = scratch("suite_jobs");
  Config second = tiny_test1();
  second.set("name", "again");

  const SuiteReport seq = run_suite({tiny_test1(), second}, (root / "seq").string(), 1);
  const SuiteReport par = run_suite({tiny_test1(), second}, (root / "par").string(), 2);
  REQUIRE(seq.entries.size() == 2);
  REQUIRE(par.entries.size() == 2);
  CHECK(par.all_pass == seq.all_pass);
  CHECK(slurp(root / "par" / "suite.csv") == slurp(root / "seq" / "suite.csv"));
  for (const char* run : {"test1", "again"})
    CHECK(slurp(root / "par" / run / "table.csv") == slurp(root / "seq" / run / "table.csv"));
}

TEST_CASE("inversion on zero data stays at the initial guess and warns") {
  Config cfg = preset_config("custom");
  cfg.set("nx", 30);
  cfg.set("nt", 80);
  const Problem pb = problem_from_config(cfg);
  const InversionResult<double> res = minimize(pb.spec);
  CHECK(res.low_sensitivity_warning);
  CHECK(res.cost == 0.0);  // zero initial state and no source: nothing to fit
  CHECK((res.params - pb.spec.initial).cwiseAbs().maxCoeff() == 0.0);
}
