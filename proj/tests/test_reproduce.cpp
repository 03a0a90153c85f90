#include "pcorr/reproduce.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pcorr;

namespace {

VolumeCurve curve(std::vector<double> lambda, std::vector<double> v, double se) {
    VolumeCurve c;
    c.lambda = std::move(lambda);
    c.estimate = std::move(v);
    c.std_err.assign(c.lambda.size(), se);
    c.n = 1000;
    return c;
}

} // namespace

TEST(CheckBelow, SlackAndWindow) {
    auto upper = curve({1.0, 0.1, 0.01}, {1.0, 0.5, 0.10}, 0.01);
    auto lower = curve({1.0, 0.1, 0.01}, {1.0, 0.6, 0.05}, 0.01);
    auto all = check_below(lower, upper, 2.0, 0.0, "all");
    EXPECT_FALSE(all.passed);
    EXPECT_NEAR(all.worst_margin, -0.1 + 2 * std::hypot(0.01, 0.01), 1e-12);
    EXPECT_TRUE(check_below(lower, upper, 2.0, 0.0, "small", 0.01).passed);
    EXPECT_FALSE(check_below(lower, upper, 2.0, 0.05, "large").passed);
    EXPECT_TRUE(check_below(lower, upper, 8.0, 0.0, "wide").passed);
    auto other = curve({1.0, 0.2}, {1.0, 0.5}, 0.0);
    EXPECT_THROW(check_below(lower, other, 2.0, 0.0, "x"), InputError);
}

TEST(Figures, UnknownId) {
    EXPECT_THROW(reproduce_figure("fig3", 6, {}), InputError);
    EXPECT_EQ(figure_ids().size(), 4u);
}

TEST(Figures, BowTieBiasAtSmallSample) {
    VolumeOptions o;
    o.n = 100000;
    auto fig = reproduce_figure("fig6b", 5, o);
    ASSERT_EQ(fig.curves.size(), 2u);
    EXPECT_EQ(fig.curves[0].label, "bow5 4,5|3");
    EXPECT_TRUE(fig.passed());
}

TEST(Table, ThreeNodeCounts) {
    auto t = classification_table(3, true);
    EXPECT_EQ(t.dags, 8u);
    EXPECT_EQ(t.total, 27);
    EXPECT_EQ(t.cell("Monomial", "(1,1)"), 21);
    EXPECT_EQ(t.cell("Monomial", "(1,2)"), 3);
    EXPECT_EQ(t.row_total("Smooth"), 3);
    EXPECT_EQ(t.row_total("Singular"), 0);
    auto u = classification_table(3, false);
    EXPECT_EQ(u.dags, 6u);
    EXPECT_EQ(u.total, 23);
    std::ostringstream os;
    t.write_csv(os, "table1");
    EXPECT_NE(os.str().find("Subtotal,all,27"), std::string::npos);
}

TEST(Table, RowNames) {
    EXPECT_EQ(table_row("sos_product"), "Monomial");
    EXPECT_EQ(table_row("smooth_certificate"), "Smooth");
    EXPECT_EQ(table_row("blowup"), "Blowup");
    EXPECT_EQ(table_row("unresolved"), "Singular");
}
