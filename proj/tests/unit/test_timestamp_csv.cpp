#include "succor/csv.hpp"
#include "succor/error.hpp"
#include "succor/timestamp.hpp"

#include <doctest.h>

#include <random>
#include <thread>

using namespace succor;

TEST_CASE("Timestamp text round trip") {
    const auto t = Timestamp::parse("2013-03-05 16:33:36.000");
    CHECK(t.str() == "2013-03-05 16:33:36.000");
    CHECK(t.compact() == "20130305163336000");
    CHECK(Timestamp::parse_compact("20130305163336000") == t);
    CHECK(Timestamp::parse("2013-03-03 16:33:37.180").millis() - Timestamp::parse("2013-03-03 16:33:37.000").millis() == 180);
    CHECK(Timestamp::from_millis(0).str() == "1970-01-01 00:00:00.000");
}

TEST_CASE("Timestamp rejects other layouts") {
    for (const char* bad : {"", "2013-03-05", "2013-03-05 16:33:36", "2013-03-05T16:33:36.000",
                            "2013-03-05 16:33:36.0000", "2013-13-05 16:33:36.000",
                            "2013-02-30 16:33:36.000", "2013-03-05 24:00:00.000",
                            "x013-03-05 16:33:36.000", "2013-03-05 16:33:36.00a"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(Timestamp::parse(bad), Error);
    }
    CHECK_THROWS_AS(Timestamp::parse_compact("2013030516333600"), Error);
}

TEST_CASE("Timestamp round trips arbitrary millisecond instants") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::int64_t> ms(0, 4102444800000LL);  // up to 2100
    for (int i = 0; i < 5000; ++i) {
        const auto t = Timestamp::from_millis(ms(rng));
        REQUIRE(Timestamp::parse(t.str()) == t);
        REQUIRE(Timestamp::parse_compact(t.compact()) == t);
    }
}

TEST_CASE("Date") {
    CHECK(Date::parse("1989-04-09").str() == "1989-04-09");
    CHECK(Date::parse("1989-04-09") < Date::parse("2013-03-01"));
    CHECK_THROWS_AS(Date::parse("1989-4-9"), Error);
    CHECK_THROWS_AS(Date::parse("1989-02-30"), Error);
}

TEST_CASE("ServerClock never goes backwards") {
    std::int64_t fake = 10'000;
    ServerClock clock([&] { return Timestamp::from_millis(fake); });
    CHECK(clock.now().millis() == 10'000);
    fake = 5'000;
    CHECK(clock.now().millis() == 10'000);
    fake = 12'000;
    CHECK(clock.now().millis() == 12'000);

    ServerClock real;
    auto prev = real.now();
    for (int i = 0; i < 1000; ++i) {
        const auto t = real.now();
        REQUIRE(prev <= t);
        prev = t;
    }
}

TEST_CASE("csv parse") {
    const auto rows = csv::parse("a,b,c\r\n1,,\"x,\"\"y\"\"\"\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == csv::Row{"a", "b", "c"});
    CHECK(rows[1] == csv::Row{"1", "", "x,\"y\""});
    CHECK(csv::parse("").empty());
    CHECK(csv::parse("a\n\"multi\nline\"\n")[1][0] == "multi\nline");
}

TEST_CASE("csv append_row quotes only when needed") {
    std::string out;
    csv::append_row(out, {"plain", "with,comma", "with\"quote", ""});
    CHECK(out == "plain,\"with,comma\",\"with\"\"quote\",\n");
}

TEST_CASE("csv write then parse is identity") {
    std::mt19937_64 rng(17);
    const std::string alphabet = "ab,\"\n\r 1";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 6),
        width(1, 5), height(1, 5);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<csv::Row> rows(height(rng));
        const auto w = width(rng);
        for (auto& row : rows) {
            row.resize(w);
            for (auto& field : row) {
                const auto n = len(rng);
                for (std::size_t i = 0; i < n; ++i)
                    field += alphabet[pick(rng)];
            }
        }
        // A single empty field on its own line is indistinguishable from a
        // blank line; keep at least one character in one-column rows.
        if (w == 1)
            for (auto& row : rows)
                if (row[0].empty()) row[0] = "x";
        std::string text;
        for (const auto& row : rows)
            csv::append_row(text, row);
        REQUIRE(csv::parse(text) == rows);
    }
}
