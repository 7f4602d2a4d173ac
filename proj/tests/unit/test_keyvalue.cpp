#include <gtest/gtest.h>

#include <sstream>

#include "cpofdm/keyvalue.hpp"

using cpofdm::kv::ConfigError;
using cpofdm::kv::Document;

namespace {

Document parse(const std::string& text) {
    std::istringstream in(text);
    return Document::parse(in, "test.cfg");
}

void expect_error(const std::string& text, const std::string& needle) {
    try {
        parse(text);
        ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(KeyValue, ParsesScalarsListsAndMatrices) {
    const Document d = parse(
        "# scene\n"
        "num_tx = 2\n"
        "  carrier_hz=9e9   # X band\n"
        "name = set b\n"
        "eta = 17 0 ; 6 32\n"
        "targets = 3, 17 40\n"
        "gains = 0.5 -1.25\n"
        "flag = yes\n");
    EXPECT_EQ(d.get_uint("num_tx"), 2u);
    EXPECT_DOUBLE_EQ(d.get_double("carrier_hz"), 9e9);
    EXPECT_EQ(d.get_string("name"), "set b");
    EXPECT_EQ(d.get_uint_matrix("eta"), (std::vector<std::vector<std::uint64_t>>{{17, 0}, {6, 32}}));
    EXPECT_EQ(d.get_uints("targets"), (std::vector<std::uint64_t>{3, 17, 40}));
    EXPECT_EQ(d.get_doubles("gains"), (std::vector<double>{0.5, -1.25}));
    EXPECT_EQ(d.get_matrix("eta")[1][1], 32.0);
    EXPECT_TRUE(d.get_bool("flag"));
    EXPECT_EQ(d.get_uint("missing", 7), 7u);
    EXPECT_FALSE(d.get_bool("missing", false));
    EXPECT_EQ(d.get_string("missing", "x"), "x");
    EXPECT_DOUBLE_EQ(d.get_double("missing", 0.25), 0.25);
    EXPECT_NO_THROW(d.restrict_keys({"num_tx", "carrier_hz", "name", "eta", "targets", "gains", "flag"}));
}

TEST(KeyValue, SyntaxErrorsCarryLineNumbers) {
    expect_error("a = 1\nno equals here\n", "test.cfg:2: expected 'key = value'");
    expect_error("a = 1\n\na = 2\n", "test.cfg:3: duplicate key 'a' (first on line 1)");
    expect_error("a =   # nothing\n", "has no value");
    expect_error(" = 4\n", "missing key");
}

TEST(KeyValue, TypeErrors) {
    const Document d = parse("n = -3\nx = 1.5e\nm = 1 2 ; 3\nb = maybe\nl = 1 two\nr = 1 ; ; 2\nnan = nan\n");
    auto expect_throw = [](auto&& fn, const std::string& needle) {
        try {
            fn();
            ADD_FAILURE() << "no error for " << needle;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_throw([&] { d.get_uint("n"); }, "test.cfg:1: key 'n': '-3' is not a non-negative integer");
    expect_throw([&] { d.get_double("x"); }, "not a finite number");
    expect_throw([&] { d.get_uint_matrix("m"); }, "matrix rows differ in length");
    expect_throw([&] { d.get_bool("b"); }, "not a boolean");
    expect_throw([&] { d.get_uints("l"); }, "'two'");
    expect_throw([&] { d.get_matrix("r"); }, "empty matrix row");
    expect_throw([&] { d.get_double("nan"); }, "not a finite number");
    expect_throw([&] { d.get_uint("absent"); }, "missing required key 'absent'");
}

TEST(KeyValue, UnknownKeysRejected) {
    const Document d = parse("num_tx = 2\nnum_txx = 3\n");
    try {
        d.restrict_keys({"num_tx"});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test.cfg:2: unknown key 'num_txx'"), std::string::npos);
    }
}

TEST(KeyValue, MissingFile) {
    EXPECT_THROW(Document::load("/nonexistent/dir/x.cfg"), ConfigError);
}
