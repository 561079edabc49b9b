#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccc/config.hpp"
#include "ccc/errors.hpp"
#include "ccc/io.hpp"
#include "ccc/presets.hpp"

using namespace ccc;

namespace {

RunConfig parse(const std::string& text, const std::filesystem::path& base = ".") {
  std::istringstream in(text);
  return parse_config(in, base);
}

}  // namespace

TEST(Config, DefaultsAreReferenceSet) {
  const RunConfig cfg = parse("");
  EXPECT_EQ(cfg.chain.n(), 1);
  EXPECT_DOUBLE_EQ(cfg.chain.cav.A, 0.6);
  EXPECT_DOUBLE_EQ(cfg.chain.cav.B_of(1), 0.53);
  EXPECT_DOUBLE_EQ(cfg.chain.cav.B_of(2), 0.03);
  EXPECT_DOUBLE_EQ(cfg.chain.cav.xi, 0.2);
  EXPECT_DOUBLE_EQ(cfg.cbf.kappa_sf, 0.6);
  EXPECT_DOUBLE_EQ(cfg.envelope.a_min, 7.0);
  EXPECT_DOUBLE_EQ(cfg.scenario.dt, 0.01);
  EXPECT_EQ(cfg.chart.plane, Plane::B1_BN);
}

TEST(Config, SectionsOverride) {
  const RunConfig cfg = parse(
      "[hv]\ncount = 3\ntau = 0.6\n"
      "[hv.2]\nA_h = 0.2\n"
      "[cav]\nA = 0.5\nB1 = 0.4\nB4 = 0.5\nC1 = 0.1\nxi = 0.3\n"
      "[scenario]\nt_final = 12\nvariants = nominal, filtered\n"
      "[chart]\nplane = A-B1\nnx = 10\nny = 12\n");
  EXPECT_EQ(cfg.chain.n(), 3);
  EXPECT_DOUBLE_EQ(cfg.chain.hvs[0].tau, 0.6);
  EXPECT_DOUBLE_EQ(cfg.chain.hvs[1].A_h, 0.2);
  EXPECT_DOUBLE_EQ(cfg.chain.hvs[2].A_h, 0.1);
  EXPECT_EQ(cfg.chain.cav.phi, std::vector<int>{4});
  EXPECT_DOUBLE_EQ(cfg.chain.cav.B_of(4), 0.5);
  EXPECT_DOUBLE_EQ(cfg.chain.cav.C_of(1), 0.1);
  EXPECT_EQ(cfg.scenario.n_hv, 3);
  EXPECT_EQ(cfg.chart.nx, 10u);
  EXPECT_EQ(cfg.chart.plane, Plane::A_B1);
  EXPECT_EQ(cfg.variants.size(), 2u);
}

TEST(Config, RejectsUnknownAndMalformed) {
  EXPECT_THROW(parse("[bogus]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("[cav]\nAA = 1\n"), ConfigError);
  EXPECT_THROW(parse("[cav]\nA = fast\n"), ConfigError);
  EXPECT_THROW(parse("[hv]\ncount = 1\n[hv.2]\ntau = 1\n"), ConfigError);
  EXPECT_THROW(parse("[cav]\nconnected = 1\n"), ConfigError);
  EXPECT_THROW(parse("[cav]\nB3 = 0.1\n"), ConfigError);
  EXPECT_THROW(parse("[boundaries]\nK_count = 0\n"), ConfigError);
  EXPECT_THROW(parse("[chart]\nplane = B1-B2\n"), ConfigError);
  EXPECT_THROW(parse("[chart]\nnx = 1\n"), ConfigError);
  EXPECT_THROW(parse("[scenario]\nprofile = data\n"), ConfigError);
  EXPECT_THROW(parse("[scenario]\ndt = 0\n"), ConfigError);
  EXPECT_THROW(parse("[cav\nA = 1\n"), ConfigError);
}

TEST(Config, MissingDataFileIsIoError) {
  RunConfig cfg = parse("[scenario]\nprofile = data\ndata_file = nowhere.csv\n", "/tmp");
  EXPECT_THROW(resolve_data(cfg), IoError);
  EXPECT_THROW(load_config("/nonexistent/ccc.ini"), IoError);
}

TEST(Config, DataProfileLoadsAndSetsEquilibrium) {
  const auto dir = std::filesystem::temp_directory_path() / "ccc_cfg_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "speeds.csv") << "t,v_head\n0,18\n50,18\n";
  std::ofstream(dir / "run.ini") << "[scenario]\nprofile = data\ndata_file = speeds.csv\n";
  const RunConfig cfg = load_config(dir / "run.ini");
  ASSERT_TRUE(std::holds_alternative<DataDriven>(cfg.scenario.head));
  EXPECT_DOUBLE_EQ(std::get<Equilibrium>(cfg.scenario.init).v_star, 18.0);
}

// ---------------------------------------------------------------------------

TEST(Io, NumbersRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.30809507696755883;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Io, TrajectoryCsv) {
  Scenario s;
  s.t_final = 0.05;
  Chain chain;
  chain.cav = presets::cav(presets::kSafeGains, 0.2, 1);
  chain.hvs = {presets::human_driver()};
  const Trajectory t = simulate(s, chain, presets::barrier(), Controller::Filtered);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, trajectory_header(1));
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Io, ChartCsvHeaderAndRows) {
  ChartGrid grid;
  grid.spec.nx = 2;
  grid.spec.ny = 1;
  grid.cells = {{0.0, 0.0, true, false, false, 1.5}, {1.0, 0.0, true, true, true, 0.5}};
  std::ostringstream out;
  write_chart_csv(out, grid);
  EXPECT_EQ(out.str(), "x,y,plant,string,safe,sup_gain\n0,0,1,0,0,1.5\n1,0,1,1,1,0.5\n");
}

TEST(Io, BoundaryCsvLeavesLineParametersEmpty) {
  std::vector<Polyline> curves{{"string-w0", std::nullopt, {{0.0, 1.0, std::nullopt, std::nullopt}}},
                               {"string-wK", 0.5, {{0.2, 0.3, 1.5, 0.5}}}};
  std::ostringstream out;
  write_boundaries_csv(out, Plane::A_B1, curves);
  EXPECT_EQ(out.str(), "plane,param1,param2,x,y\nA-B1,,,0,1\nA-B1,1.5,0.5,0.2,0.3\n");
}

TEST(Io, SvgIsWellFormed) {
  ChartGrid grid;
  grid.spec.nx = 2;
  grid.spec.ny = 2;
  grid.cells = {{0, 0, true, true, true, 0.5}, {1, 0, true, false, false, 1.2},
                {0, 1, false, false, false, 2.0}, {1, 1, true, true, false, 0.9}};
  const std::string svg = render_chart_svg(grid);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Io, WriteFileFailsOnBadPath) {
  EXPECT_THROW(write_file("/proc/ccc/not/allowed.csv", "x"), IoError);
}
