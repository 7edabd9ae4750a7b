#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gupred/commands.hpp"

using namespace gupred;
using namespace gupred::cli;

namespace {

std::string scenario(const std::string& name) { return std::string(GUPRED_SCENARIO_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& cmd, const std::string& file, RunOptions opt = {}) {
  std::ostringstream out, err;
  const int code = run_command(cmd, scenario(file), opt, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const char* kMinimal = R"(
name = "mini"
[profile]
kind = "rotational2d"
f = "1 + 0.1*psq"
[initial]
q = [1, 0]
p = [0, 1]
)";

}  // namespace

TEST(ConfigParser, AcceptsSubset) {
  const auto doc = config::parse("a = 1.5\n# note\n[s]\nb = \"x\\\"y\" # tail\nc = [1, -2e-1]\nd = true\n");
  EXPECT_EQ(std::get<double>(doc.sections.at("").at("a").value), 1.5);
  EXPECT_EQ(std::get<std::string>(doc.sections.at("s").at("b").value), "x\"y");
  EXPECT_EQ(std::get<std::vector<double>>(doc.sections.at("s").at("c").value), (std::vector<double>{1, -0.2}));
  EXPECT_TRUE(std::get<bool>(doc.sections.at("s").at("d").value));
}

TEST(ConfigParser, RejectsMalformed) {
  EXPECT_THROW(config::parse("a 1\n"), ConfigError);
  EXPECT_THROW(config::parse("[open\n"), ConfigError);
  EXPECT_THROW(config::parse("a = \"unterminated\n"), ConfigError);
  EXPECT_THROW(config::parse("a = [1, x]\n"), ConfigError);
  EXPECT_THROW(config::parse("a = 1\na = 2\n"), ConfigError);
}

TEST(Scenario, MinimalLoads) {
  const ScenarioFile sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.name, "mini");
  EXPECT_EQ(sc.dim, 2);
  EXPECT_EQ(sc.constraint, ConstraintKind::none);
  EXPECT_EQ(sc.state_size(), 4);
}

TEST(Scenario, ValidationErrors) {
  EXPECT_THROW(parse_scenario("[profile]\nkind = \"nope\"\n"), ConfigError);
  EXPECT_THROW(parse_scenario(std::string(kMinimal) + "[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_scenario("[profile]\nkind = \"rotational2d\"\nf = \"1 + q1\"\n"), ConfigError);
  EXPECT_THROW(parse_scenario("[profile]\nkind = \"rotational2d\"\nf = \"1 + 0.1*p1\"\n"), ConfigError);
  EXPECT_THROW(parse_scenario("[profile]\nkind = \"rotational2d\"\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_scenario("[profile]\nkind = \"bianchi\"\npotential = \"1\"\n[integrator]\nmethod = \"euler\"\n"),
               ConfigError);
}

TEST(Scenario, MissingPotentialNamesField) {
  try {
    load_scenario(scenario("missing_potential.scn"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("potential"), std::string::npos) << e.what();
  }
  const Outcome r = run("verify", "missing_potential.scn");
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("potential"), std::string::npos);
}

TEST(Scenario, MissingFileIsConfigError) {
  EXPECT_EQ(run("verify", "does_not_exist.scn").code, kExitConfig);
  EXPECT_EQ(run("frobnicate", "maggiore2d.scn").code, kExitConfig);
}

TEST(Verify, ExitCodes) {
  EXPECT_EQ(run("verify", "maggiore2d.scn").code, kExitOk);
  EXPECT_EQ(run("verify", "maggiore3d.scn").code, kExitOk);
  EXPECT_EQ(run("verify", "yang_mills.scn").code, kExitOk);
  EXPECT_EQ(run("verify", "bianchi_canonical.scn").code, kExitOk);
  EXPECT_EQ(run("verify", "zero_field.scn").code, kExitOk);
  EXPECT_EQ(run("verify", "broken_closure.scn").code, kExitCheckFailed);
  EXPECT_EQ(run("verify", "flat_violating.scn").code, kExitCheckFailed);
  EXPECT_EQ(run("verify", "nonrotational.scn").code, kExitConfig);
}

TEST(Verify, ReportFormat) {
  const Outcome r = run("verify", "maggiore2d.scn", RunOptions{50, 3, {}, {}});
  std::istringstream in(r.out);
  std::string line;
  int checks = 0;
  while (std::getline(in, line)) {
    if (line.rfind("CHECK ", 0) == 0) {
      ++checks;
      EXPECT_NE(line.find(" PASS max="), std::string::npos) << line;
      EXPECT_NE(line.find(" tol="), std::string::npos) << line;
    }
  }
  EXPECT_GT(checks, 5);
  EXPECT_NE(r.out.find("SUMMARY passed="), std::string::npos);
}

TEST(Verify, FlatViolationNamesBracket) {
  const Outcome r = run("verify", "flat_violating.scn", RunOptions{50, {}, {}, {}});
  EXPECT_NE(r.out.find("CHECK flat-coordinates"), std::string::npos);
  EXPECT_NE(r.out.find("worst={q0,q1}"), std::string::npos) << r.out;
}

TEST(Verify, BadSampleCount) {
  EXPECT_EQ(run("verify", "maggiore2d.scn", RunOptions{0, {}, {}, {}}).code, kExitConfig);
}

TEST(Verify, Deterministic) {
  const Outcome a = run("verify", "bianchi.scn", RunOptions{40, 9, {}, {}});
  const Outcome b = run("verify", "bianchi.scn", RunOptions{40, 9, {}, {}});
  EXPECT_EQ(a.out, b.out);
}

TEST(Grid, Parsing) {
  const auto axes = parse_grid("rho=0:1:3", {"r", "rho"}, {1.0, 0.0});
  ASSERT_EQ(axes.size(), 2u);
  EXPECT_EQ(axes[0].values, std::vector<double>{1.0});
  EXPECT_EQ(axes[1].values, (std::vector<double>{0.0, 0.5, 1.0}));
  const auto pos = parse_grid("2:2:1,0:1:2", {"r", "rho"}, {1.0, 0.0});
  EXPECT_EQ(pos[0].values, std::vector<double>{2.0});
  EXPECT_EQ(pos[1].values, (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(parse_grid("x=0:1:2", {"r"}, {1.0}), ConfigError);
  EXPECT_THROW(parse_grid("0:1", {"r"}, {1.0}), ConfigError);
  EXPECT_THROW(parse_grid("0:1:0", {"r"}, {1.0}), ConfigError);
  EXPECT_THROW(parse_grid("0:1:2,0:1:2", {"r"}, {1.0}), ConfigError);
  EXPECT_THROW(parse_grid("r=0:1:2,r=1:2:2", {"r"}, {1.0}), ConfigError);
}

TEST(Reduce, CoefficientColumn) {
  for (const char* file : {"maggiore2d.scn", "maggiore3d.scn"}) {
    const Outcome r = run("reduce", file, RunOptions{{}, {}, std::string("rho=0:1:3"), {}});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    const auto& header = rows[0];
    const auto col = std::find(header.begin(), header.end(), "w_coefficient") - header.begin();
    ASSERT_LT(col, static_cast<long>(header.size()));
    const double rho[3] = {0.0, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(std::stod(rows[k + 1][col]), -1.0 / (1.0 + 0.1 * rho[k] * rho[k]), 1e-9) << file;
    }
  }
}

TEST(Reduce, BianchiGrid) {
  const Outcome r = run("reduce", "bianchi_canonical.scn", RunOptions{{}, {}, std::string("p1=0:1:2"), {}});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "q1");
}

TEST(Reduce, NeedsConstraint) {
  EXPECT_EQ(run("reduce", "broken_closure.scn").code, kExitConfig);
}

TEST(Evolve, ReducedHamiltonianColumn) {
  const Outcome r = run("evolve", "bianchi_canonical.scn");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv(r.out);
  ASSERT_GT(rows.size(), 2u);
  const auto col = std::find(rows[0].begin(), rows[0].end(), "H_t") - rows[0].begin();
  ASSERT_LT(col, static_cast<long>(rows[0].size()));
  EXPECT_EQ(std::stod(rows[1][col]), 1.25);
  EXPECT_EQ(rows[1][0], "0");
}

TEST(Evolve, SeventeenDigits) {
  const Outcome r = run("evolve", "maggiore2d.scn");
  ASSERT_EQ(r.code, kExitOk);
  const auto rows = csv(r.out);
  for (std::size_t c = 0; c < rows[2].size(); ++c) {
    EXPECT_EQ(std::stod(rows[2][c]), std::stod(fmt17(std::stod(rows[2][c]))));
  }
  EXPECT_EQ(rows.size(), 2002u);
}

TEST(Evolve, ZeroFieldConstantRows) {
  const Outcome r = run("evolve", "zero_field.scn");
  ASSERT_EQ(r.code, kExitOk);
  const auto rows = csv(r.out);
  for (std::size_t n = 2; n < rows.size(); ++n) {
    for (std::size_t c = 1; c < rows[n].size(); ++c) {
      EXPECT_EQ(rows[n][c], rows[1][c]) << "row " << n << " col " << rows[0][c];
    }
  }
}

TEST(Evolve, DeterministicAndWritesFile) {
  const auto path = (std::filesystem::temp_directory_path() / "gupred_evolve_test.csv").string();
  const Outcome a = run("evolve", "yang_mills.scn", RunOptions{{}, {}, {}, path});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_TRUE(a.out.empty());
  std::ifstream in(path, std::ios::binary);
  std::stringstream first;
  first << in.rdbuf();
  const Outcome b = run("evolve", "yang_mills.scn");
  EXPECT_EQ(first.str(), b.out);
  std::filesystem::remove(path);
}
