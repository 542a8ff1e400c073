#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "compacton/config.hpp"

using namespace compacton;

TEST(KeyValue, ParsesScalarsArraysAndComments) {
    const auto doc = kv::parse(R"(# header
a = 1.5e-3   # trailing
b = "text with # hash"
c = [1, 2,
     3]   # continues
d = [[1.0, 2.0], [3, 4]]
big = 20_000
)");
    EXPECT_DOUBLE_EQ(doc.at("a").number(), 1.5e-3);
    EXPECT_EQ(doc.at("b").string(), "text with # hash");
    ASSERT_EQ(doc.at("c").array().size(), 3u);
    EXPECT_EQ(doc.at("d").array()[1].array()[1].number(), 4.0);
    EXPECT_EQ(doc.at("big").number(), 20000.0);
    EXPECT_EQ(doc.at("c").line, 4);
}

TEST(KeyValue, Errors) {
    auto line_of = [](const std::string& text) {
        try {
            kv::parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("a = 1\na = 2\n"), 2);
    EXPECT_EQ(line_of("a = 1\n[table]\n"), 2);
    EXPECT_EQ(line_of("just words\n"), 1);
    EXPECT_EQ(line_of("x = \"open\n"), 1);
    EXPECT_EQ(line_of("x = [1, 2\n"), 2); // reported where the input runs out
    EXPECT_EQ(line_of("x = 1 2\n"), 1);
    EXPECT_EQ(line_of("bad key = 1\n"), 1);
    EXPECT_EQ(line_of("x = nope\n"), 1);
}

TEST(ParseConfig, MinimalOneCompacton) {
    const auto cfg = parse_config("n = 2\n");
    EXPECT_EQ(cfg.scenario, Scenario::one_compacton);
    EXPECT_EQ(cfg.alpha2_mode, Alpha2Mode::zero);
    EXPECT_EQ(cfg.resolved_alpha2(), 0.0);
    ASSERT_EQ(cfg.compactons.size(), 1u);
    EXPECT_EQ(cfg.compactons[0].c, 1.0);
    EXPECT_EQ(cfg.compactons[0].n, 2.0);
    // Default placement lands on a grid node.
    const double x = cfg.compactons[0].x_center / cfg.dx;
    EXPECT_NEAR(x, std::round(x), 1e-9);
    EXPECT_GT(cfg.L, 0.0);
    EXPECT_EQ(cfg.dx, 0.1);
    EXPECT_EQ(cfg.dt, 0.1);
}

TEST(ParseConfig, AutoAlpha2) {
    const auto cfg = parse_config("n = 2\nalpha4 = 1e-3\nalpha2_mode = \"auto\"\n");
    EXPECT_NEAR(std::abs(cfg.resolved_alpha2()), 2.5e-4, 1e-18);
    EXPECT_EQ(cfg.model().alpha2, cfg.resolved_alpha2());
}

TEST(ParseConfig, ExplicitAlpha2AndRatioExponent) {
    const auto cfg = parse_config("n = \"5/3\"\nalpha2_mode = \"explicit(-1/4000)\"\nT = 10\n");
    EXPECT_DOUBLE_EQ(cfg.n, 5.0 / 3.0);
    EXPECT_EQ(cfg.n_text, "5/3");
    EXPECT_DOUBLE_EQ(cfg.resolved_alpha2(), -2.5e-4);
}

TEST(ParseConfig, Collision) {
    const auto cfg = parse_config(R"(scenario = "collision"
n = "5/3"
compactons = [[1.0, 50.0], [0.5, 250.0]]
c0 = 0.1
alpha4 = 1e-3
L = 600
T = 600
snapshot_times = [370, 380, 400, 450]
)");
    EXPECT_EQ(cfg.scenario, Scenario::collision);
    ASSERT_EQ(cfg.compactons.size(), 2u);
    EXPECT_EQ(cfg.compactons[1].x_center, 250.0);
    EXPECT_EQ(cfg.snapshot_times.size(), 4u);
}

TEST(ParseConfig, RejectsOverlap) {
    EXPECT_THROW(parse_config(R"(scenario = "collision"
n = 2
compactons = [[1.0, 50.0], [0.5, 55.0]]
L = 600
)"),
                 ValidationError);
}

TEST(ParseConfig, RejectsUnknownKeyWithLine) {
    try {
        parse_config("n = 2\nspeed = 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.key(), "speed");
    }
}

TEST(ParseConfig, ValidationErrors) {
    EXPECT_THROW(parse_config("n = 1\n"), ValidationError);
    EXPECT_THROW(parse_config("n = 2\ndt = 0\n"), ValidationError);
    EXPECT_THROW(parse_config("n = 2\nalpha4 = -1\n"), ValidationError);
    EXPECT_THROW(parse_config("n = 2\nT = 10\nsnapshot_times = [20]\n"), ValidationError);
    EXPECT_THROW(parse_config("n = 2\ncompactons = [[1.0, 2.0]]\nL = 100\n"), ValidationError);
    EXPECT_THROW(parse_config("scenario = \"collision\"\nn = 2\n"), ValidationError);
    EXPECT_THROW(parse_config("n = 2\ncompactons = [[-1.0, 50.0]]\nL = 100\n"), ValidationError);
}

TEST(ParseConfig, TypeErrors) {
    EXPECT_THROW(parse_config("T = 5\n"), ParseError);
    EXPECT_THROW(parse_config("n = 2\nT = \"long\"\n"), ParseError);
    EXPECT_THROW(parse_config("n = \"2/0\"\n"), ParseError);
    EXPECT_THROW(parse_config("n = 2\nalpha2_mode = \"sometimes\"\n"), ParseError);
    EXPECT_THROW(parse_config("n = 2\nnewton_max = 2.5\n"), ParseError);
    EXPECT_THROW(parse_config("n = 2\ncompactons = [[1.0]]\n"), ParseError);
    EXPECT_THROW(parse_config("n = 2\nscenario = \"party\"\n"), ParseError);
}

TEST(ParseRatio, Forms) {
    EXPECT_DOUBLE_EQ(*parse_ratio("9/7"), 9.0 / 7.0);
    EXPECT_DOUBLE_EQ(*parse_ratio(" 1.25 "), 1.25);
    EXPECT_FALSE(parse_ratio("a/b").has_value());
    EXPECT_FALSE(parse_ratio("").has_value());
}
