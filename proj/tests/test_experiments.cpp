#include "leaky_piston/csv.hpp"
#include "leaky_piston/experiments.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace leaky_piston;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("leaky_piston_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

SweepSpec small_sweep() {
    SweepSpec s;
    s.parameter = SweepParameter::kappa_f;
    s.values = {1e3, 1e4};
    s.spin_up = 0.1;
    return s;
}

} // namespace

TEST(FormatNumber, RoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
        EXPECT_EQ(std::stod(io::format_number(x)), x);
    }
    EXPECT_EQ(io::format_number(-50.0), "-50");
}

TEST(Iterates, ZeroIterationsGiveInput) {
    Figure3Options opt;
    opt.k_max = 0;
    const auto curves = figure3(opt);
    ASSERT_EQ(curves.size(), 2u);
    for (const auto& c : curves) {
        ASSERT_EQ(c.ratios.size(), 1u);
        EXPECT_EQ(c.ratios[0], 1.0);
        EXPECT_EQ(c.iterates[0][128], 0.25);
    }
}

TEST(Iterates, WritesCurvesAndNorms) {
    const auto dir = scratch("fig");
    const auto files = write_figure3(figure3({}), dir);
    ASSERT_EQ(files.size(), 3u);
    const auto norms = read_csv(dir / "figure3_norms.csv");
    ASSERT_EQ(norms.size(), 12u);
    EXPECT_EQ(norms[0], (std::vector<std::string>{"k", "ratio_ad2", "log10_ratio_ad2", "ratio_ad5", "log10_ratio_ad5"}));
    EXPECT_NEAR(std::stod(norms[2][3]), 1.77, 0.01);
    const auto curve = read_csv(dir / "figure3_curves_ad5.csv");
    EXPECT_EQ(curve.size(), 258u);
    EXPECT_EQ(curve[0].size(), 12u);
}

TEST(Csv, OutputsAreDeterministic) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto spec = small_sweep();
    write_sweep(run_sweep(spec, 1), a);
    write_sweep(run_sweep(spec, 2), b);
    write_figure3(figure3({}), a);
    write_figure3(figure3({}), b);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
        ++compared;
    }
    EXPECT_EQ(compared, 6u);
}

TEST(Csv, TrajectoryAndTraceLayout) {
    const auto dir = scratch("layout");
    Trajectory t;
    t.append(0.0, {1.0, 2.0, 3.0});
    t.append(0.5, {4.0, 5.0, 6.0});
    io::write_trajectory(dir / "t.csv", t);
    EXPECT_EQ(slurp(dir / "t.csv"), "t,d,v,p\n0,1,2,3\n0.5,4,5,6\n");
    IterationTrace tr;
    tr.residuals = {0.5, 0.25};
    io::write_trace(dir / "r.csv", tr);
    EXPECT_EQ(slurp(dir / "r.csv"), "k,residual_rms\n1,0.5\n2,0.25\n");
    io::write_grid_function(dir / "g.csv", GridFunction(std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(slurp(dir / "g.csv"), "s,value\n0,1\n0.5,2\n1,3\n");
    io::write_norm_history(dir / "n.csv", {1.0, 0.5});
    EXPECT_EQ(slurp(dir / "n.csv"), "k,ratio\n0,1\n1,0.5\n");
    io::write_manifest(dir / "m.txt", {{"b", "2"}, {"a", "1"}});
    EXPECT_EQ(slurp(dir / "m.txt"), "a = 1\nb = 2\n");
}

TEST(Sweep, SummaryRowsAreSelfConsistent) {
    const auto dir = scratch("summary");
    auto spec = small_sweep();
    spec.parameter = SweepParameter::tau;
    spec.values = {0.005, 0.01, 0.02};
    write_sweep(run_sweep(spec, 3), dir);
    const auto rows = read_csv(dir / "sweep_tau_summary.csv");
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const PistonParams p({std::stod(r[1]), std::stod(r[2]), spec.base.u0(), std::stod(r[3]), std::stod(r[4]),
                              std::stod(r[5]), std::stod(r[6])});
        const auto g = nondimensionalize(p);
        EXPECT_EQ(io::format_number(g.omega), r[7]);
        EXPECT_EQ(io::format_number(g.alpha_m), r[8]);
        EXPECT_EQ(io::format_number(g.alpha_d), r[9]);
        EXPECT_EQ(std::stod(r[6]), spec.values[i - 1]);
        EXPECT_EQ(r[11], "max_iters_exceeded");
    }
}

TEST(Sweep, KappaDecadeShiftsRateByOne) {
    const auto result = run_sweep(small_sweep(), 2);
    ASSERT_EQ(result.records.size(), 2u);
    for (const auto& r : result.records) EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_NEAR(result.records[1].rate - result.records[0].rate, 1.0, 0.15);
}

TEST(Sweep, RecordsFailuresAndContinues) {
    auto spec = small_sweep();
    spec.parameter = SweepParameter::rho_f;
    spec.values = {0.01, 2000.0};
    const auto result = run_sweep(spec, 1);
    EXPECT_TRUE(result.records[0].error.empty());
    EXPECT_FALSE(result.records[1].error.empty());
    EXPECT_TRUE(std::isnan(result.records[1].rate));
}

TEST(SweepSpec, Validation) {
    auto s = small_sweep();
    s.values = {};
    EXPECT_THROW(s.validate(), ValidationError);
    s.values = {2.0, 1.0};
    EXPECT_THROW(s.validate(), ValidationError);
    s.values = {-1.0};
    EXPECT_THROW(s.validate(), ValidationError);
    s = small_sweep();
    s.k_hi = s.k_lo + 1;
    EXPECT_THROW(s.validate(), ValidationError);
    EXPECT_EQ(parse_sweep_parameter("m_s"), SweepParameter::m_s);
    EXPECT_THROW((void)parse_sweep_parameter("rho_s"), ValidationError);
    EXPECT_EQ(to_string(SweepParameter::rho_f), "rho_f");
}
