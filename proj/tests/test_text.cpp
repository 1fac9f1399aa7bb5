#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fuelgeo/error.hpp"
#include "fuelgeo/summary.hpp"
#include "fuelgeo/text.hpp"

using namespace fuelgeo;

TEST_CASE("trim and split") {
    CHECK(trim("  a b \t") == "a b");
    CHECK(trim("") == "");
    const auto parts = split("a,,b", ',');
    REQUIRE(parts.size() == 3);
    CHECK(parts[1].empty());
    const auto lines = split_lines("x\r\ny\nz");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "x");
    CHECK(lines[2] == "z");
}

TEST_CASE("parse_double accepts numbers only") {
    CHECK(parse_double("2.28").value() == 2.28);
    CHECK(parse_double(" -1e3 ").value() == -1000.0);
    CHECK_FALSE(parse_double("abc").has_value());
    CHECK_FALSE(parse_double("1.2x").has_value());
    CHECK_FALSE(parse_double("").has_value());
}

TEST_CASE("format_number round trips") {
    for (double v : {0.1, 2.28, -1.0 / 3.0, 1e-17, 123456789.125, 0.0}) {
        const auto s = format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_number(2.5) == "2.5");
}

TEST_CASE("csv reader handles quoted fields") {
    std::istringstream in("id,note\n1,\"a,b\"\n2,\"say \"\"hi\"\"\"\n3,\"two\nlines\"\n");
    const auto t = read_csv(in);
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][1] == "a,b");
    CHECK(t.rows[1][1] == "say \"hi\"");
    CHECK(t.rows[2][1] == "two\nlines");
    CHECK(t.column("note").value() == 1);
    CHECK_FALSE(t.column("missing").has_value());
    CHECK_THROWS_AS(t.require_column("missing"), Error);
}

TEST_CASE("csv escape round trips through the reader") {
    const std::string tricky = "quote \" comma , newline \n end";
    std::istringstream in("v\n" + csv_escape(tricky) + "\n");
    const auto t = read_csv(in);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][0] == tricky);
    CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("summary statistics") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(50.5));
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 100.0);
    CHECK(quantile(v, 0.99) == doctest::Approx(99.01));
    CHECK(mean(v) == doctest::Approx(50.5));
    CHECK(sample_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7.0)));
    CHECK(sample_sd(std::vector<double>{3.0}) == 0.0);
    CHECK(pearson(v, v) == doctest::Approx(1.0));
}
