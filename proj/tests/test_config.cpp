#include "leaky_piston/config.hpp"

#include <gtest/gtest.h>

using namespace leaky_piston;

namespace {

std::set<std::string, std::less<>> all_keys() {
    auto k = parameter_keys();
    for (const auto& c : coupling_keys()) k.insert(c);
    k.insert("values");
    return k;
}

std::string error_of(const std::string& text) {
    try {
        (void)ConfigMap::parse_string(text, all_keys());
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(ConfigMap, ParsesAssignmentsCommentsAndBlankLines) {
    const auto cfg = ConfigMap::parse_string("# header\n\nrho_f = 1.5  # trailing\n  tau=0.01\nvalues = 1, 2,3\n",
                                             all_keys());
    EXPECT_EQ(cfg.number("rho_f", 0), 1.5);
    EXPECT_EQ(cfg.number("tau", 0), 0.01);
    EXPECT_EQ(cfg.number("m_s", 7), 7);
    EXPECT_EQ(cfg.numbers("values", {}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(cfg.entries().size(), 3u);
}

TEST(ConfigMap, ErrorsCarryLineNumbers) {
    EXPECT_NE(error_of("tau = 1\nbogus = 2\n").find("line 2: unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(error_of("tau = 1\ntau = 2\n").find("line 2: duplicate key"), std::string::npos);
    EXPECT_NE(error_of("\n\ntau\n").find("line 3"), std::string::npos);
    EXPECT_NE(error_of("tau =\n").find("empty"), std::string::npos);
}

TEST(ConfigMap, RejectsNonNumbersOnAccess) {
    const auto cfg = ConfigMap::parse_string("tau = 0.01x\nvalues = 1,,2\n", all_keys());
    EXPECT_THROW((void)cfg.number("tau", 0), ConfigError);
    EXPECT_THROW((void)cfg.numbers("values", {}), ConfigError);
}

TEST(ConfigMap, MissingFileIsAnError) {
    EXPECT_THROW((void)ConfigMap::load("/nonexistent/dir/x.cfg", all_keys()), ConfigError);
}

TEST(ParamsFromConfig, OverridesDefaultsAndValidates) {
    const auto cfg = ConfigMap::parse_string("rho_f = 2\nkappa_f = 8\n", all_keys());
    const auto p = params_from_config(cfg);
    EXPECT_EQ(p.rho_f(), 2);
    EXPECT_EQ(p.kappa_f(), 8);
    EXPECT_EQ(p.m_s(), PistonParams().m_s());
    const auto bad = ConfigMap::parse_string("m_s = -1\n", all_keys());
    EXPECT_THROW((void)params_from_config(bad), ValidationError);
}

TEST(CouplingFromConfig, ParsesEnumsAndRejectsUnknownValues) {
    const auto cfg = ConfigMap::parse_string(
        "tol = 1e-6\nmax_iters = 7\nrelaxation = 0.5\nextrapolation_order = 1\ninner_steps = 16\n"
        "added_mass = nonlinear\nrecovery = second_order\n",
        all_keys());
    const auto c = coupling_from_config(cfg);
    EXPECT_EQ(c.tol, 1e-6);
    EXPECT_EQ(c.max_iters, 7);
    EXPECT_EQ(c.relaxation, 0.5);
    EXPECT_EQ(c.extrapolation_order, 1);
    EXPECT_EQ(c.inner_steps, 16u);
    EXPECT_EQ(c.added_mass, AddedMass::nonlinear);
    EXPECT_EQ(c.stencil, RecoveryStencil::second_order);

    EXPECT_THROW((void)coupling_from_config(ConfigMap::parse_string("added_mass = full\n", all_keys())), ConfigError);
    EXPECT_THROW((void)coupling_from_config(ConfigMap::parse_string("inner_steps = 2.5\n", all_keys())), ConfigError);
    EXPECT_THROW((void)coupling_from_config(ConfigMap::parse_string("relaxation = 1.5\n", all_keys())),
                 ValidationError);
}
