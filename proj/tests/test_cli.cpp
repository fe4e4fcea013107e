#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "riesz/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("riesz_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args, const std::string& env = "RIESZ_LAB_THREADS=0") {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + RIESZ_LAB_BIN + "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  double energy_value(const fs::path& csv) {
    std::ifstream in(csv);
    const auto t = riesz::io::read_csv(in);
    return riesz::io::parse_double(t.rows.at(0).at(t.column("value")), 2);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EnergyUniformIsEightThirds) {
  const auto r = run("energy --measure uniform01 --alpha 0.5 --out res");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(energy_value(dir_ / "res" / "energy.csv"), 8.0 / 3.0, 1e-3);
}

TEST_F(Cli, AlphaOutOfRangeIsUsageError) {
  const auto r = run("energy --measure uniform01 --alpha 1.5 --n 1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("0 < alpha < n"), std::string::npos) << r.err;
  const auto cfg = write("bad.cfg", "alpha = 1.5\nn = 1\n");
  EXPECT_EQ(run("energy --config '" + cfg.string() + "'").code, 2);
}

TEST_F(Cli, MalformedConfigNamesLine) {
  const auto cfg = write("bad.cfg", "# header\nmeasure = uniform01\nalpha 0.5\n");
  const auto r = run("energy --config '" + cfg.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg:3"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownConfigKeyRejected) {
  const auto cfg = write("bad.cfg", "measure = uniform01\nalhpa = 0.5\n");
  const auto r = run("energy --config '" + cfg.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg:2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("alhpa"), std::string::npos) << r.err;
}

TEST_F(Cli, BadConfigValueNamesLine) {
  const auto cfg = write("bad.cfg", "measure = uniform01\n\nalpha = half\n");
  const auto r = run("energy --config '" + cfg.string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.cfg:3"), std::string::npos) << r.err;
}

TEST_F(Cli, FlagsOverrideConfig) {
  const auto cfg = write("run.cfg", "measure = uniform01\nalpha = 0.25\nout = from_config\n");
  ASSERT_EQ(run("energy --config '" + cfg.string() + "' --alpha 0.5 --out from_flags").code, 0);
  EXPECT_FALSE(fs::exists(dir_ / "from_config"));
  EXPECT_NEAR(energy_value(dir_ / "from_flags" / "energy.csv"), 8.0 / 3.0, 1e-3);
  ASSERT_EQ(run("energy --config '" + cfg.string() + "'").code, 0);
  // 2 / ((1 - a)(2 - a)) at a = 1/4
  EXPECT_NEAR(energy_value(dir_ / "from_config" / "energy.csv"), 2.0 / (0.75 * 1.75), 1e-3);
}

TEST_F(Cli, SampleConfigsParse) {
  for (const auto& entry : fs::directory_iterator(RIESZ_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const std::string text = slurp(entry.path());
    const auto nl = text.find('\n');
    // first line names the command: "# command: <name>"
    ASSERT_EQ(text.rfind("# command: ", 0), 0u) << entry.path();
    const std::string cmd = text.substr(11, nl - 11);
    const auto r = run(cmd + " --config '" + entry.path().string() + "' --out res");
    EXPECT_EQ(r.code, 0) << entry.path() << "\n" << r.err;
  }
}

TEST_F(Cli, UnknownCommandAndMissingFile) {
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("energy --config nowhere.cfg").code, 2);
  EXPECT_EQ(run("energy --measure file --measure-file nowhere.csv").code, 2);
}

TEST_F(Cli, ByteIdenticalSequentialOutput) {
  const std::string args = "spectral --measure cantor --depth 5 --alpha 0.5 --u-max 2000";
  ASSERT_EQ(run(args + " --out a").code, 0);
  ASSERT_EQ(run(args + " --out b").code, 0);
  for (const char* f : {"spectral.csv", "spectrum.csv"}) {
    const std::string a = slurp(dir_ / "a" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(dir_ / "b" / f)) << f;
  }
  ASSERT_EQ(run("energy --measure cantor --depth 7 --alphas 0.1:0.6:0.1 --out c").code, 0);
  ASSERT_EQ(run("energy --measure cantor --depth 7 --alphas 0.1:0.6:0.1 --out d").code, 0);
  EXPECT_EQ(slurp(dir_ / "c" / "energy.csv"), slurp(dir_ / "d" / "energy.csv"));
}

TEST_F(Cli, VerifyTheoremCantorPasses) {
  const auto r = run("verify-theorem --measure cantor --depth 6 --alpha 0.5 --out res");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "res" / "report.csv");
  const auto rows = riesz::io::read_report(in);
  ASSERT_FALSE(rows.empty());
  for (const auto& row : rows) {
    EXPECT_TRUE(row.pass) << row.name;
    EXPECT_LE(row.gap, 0.02) << row.name;
  }
}

TEST_F(Cli, MeasureFileRoundTrip) {
  ASSERT_EQ(run("measure --measure cantor --depth 4 --repr atomic --out m").code, 0);
  const auto r = run("energy --measure file --measure-file m/measure.csv --engine mollified --eps 0.05 --out e");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(energy_value(dir_ / "e" / "energy.csv"), 0.0);
}

TEST_F(Cli, PlotsAreDeterministic) {
  ASSERT_EQ(run("spectral --measure uniform01 --u-max 1000 --out s").code, 0);
  ASSERT_EQ(run("plot --kind decay --input s/spectrum.csv --output one.svg").code, 0);
  ASSERT_EQ(run("plot --kind decay --input s/spectrum.csv --output two.svg").code, 0);
  const std::string a = slurp(dir_ / "one.svg");
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_EQ(a, slurp(dir_ / "two.svg"));
}

TEST_F(Cli, PlotRejectsEmptyAndMismatchedInput) {
  write("empty.csv", "");
  EXPECT_EQ(run("plot --kind decay --input empty.csv --output x.svg").code, 2);
  write("header_only.csv", "u,re,im,power\n");
  EXPECT_EQ(run("plot --kind decay --input header_only.csv --output x.svg").code, 2);
  ASSERT_EQ(run("energy --measure uniform01 --out e").code, 0);
  const auto r = run("plot --kind theorem-gap --input e/energy.csv --output x.svg");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("schema"), std::string::npos) << r.err;
  EXPECT_EQ(run("plot --kind pie --input e/energy.csv --output x.svg").code, 2);
}

TEST_F(Cli, AuditRequiresThousandTrials) {
  EXPECT_EQ(run("audit-bounds --alpha 0.5 --trials 10").code, 2);
}

TEST_F(Cli, DimensionFourierOnAtomIsZero) {
  const auto r = run("dimension --method fourier --measure atom --out d");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir_ / "d" / "dimension.csv");
  const auto t = riesz::io::read_csv(in);
  EXPECT_EQ(riesz::io::parse_double(t.rows.at(0).at(t.column("value")), 2), 0.0);
}
