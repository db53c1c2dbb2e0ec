#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "sqspec/csv.hpp"
#include "support/test_helpers.hpp"

using namespace sqspec;
using sqspec::test::expect_error;

TEST_CASE("value formatting uses 15 significant digits") {
    CHECK(format_value(0.0) == "0");
    CHECK(format_value(1.0) == "1");
    CHECK(format_value(0.030052592036063110) == "0.0300525920360631");
    CHECK(format_value(5.5) == "5.5");
    CHECK(format_value(-2.855993321445266580) == "-2.85599332144527");
}

TEST_CASE("csv rows are comma separated and linefeed terminated") {
    CHECK(csv_row({"delta", "power"}) == "delta,power\n");
    CHECK(csv_row({"1", "2", "3"}) == "1,2,3\n");
}

TEST_CASE("csv parsing") {
    SECTION("round trip") {
        std::istringstream in("tau,value\n0,0.5\n0.25,0.125\n");
        const CsvTable table = parse_csv(in);
        REQUIRE(table.header.size() == 2);
        CHECK(table.header[0] == "tau");
        REQUIRE(table.rows.size() == 2);
        CHECK(table.rows[1][0] == 0.25);
        CHECK(table.rows[1][1] == 0.125);
    }

    SECTION("carriage returns and blank lines are tolerated") {
        std::istringstream in("a,b\r\n\n1,2\r\n");
        const CsvTable table = parse_csv(in);
        REQUIRE(table.rows.size() == 1);
        CHECK(table.rows[0][0] == 1.0);
    }

    SECTION("ragged rows are rejected") {
        std::istringstream in("a,b\n1,2,3\n");
        expect_error(ErrorCode::MalformedCsv, [&] { parse_csv(in); });
    }

    SECTION("non-numeric cells are rejected") {
        std::istringstream in("a,b\n1,two\n");
        expect_error(ErrorCode::MalformedCsv, [&] { parse_csv(in); });
    }

    SECTION("empty input is rejected") {
        std::istringstream in("");
        expect_error(ErrorCode::MalformedCsv, [&] { parse_csv(in); });
    }

    SECTION("missing files are rejected") {
        expect_error(ErrorCode::MalformedCsv, [] { parse_csv_file("/nonexistent/path.csv"); });
    }
}
