#include "succor/distance_kernels.hpp"
#include "succor/error.hpp"
#include "succor/geodesy.hpp"

#include "../support/hp_haversine.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace succor;
using namespace succor::geo;

namespace {

// Fixture fleet.
const std::vector<Facility> kFixtureFleet{
    {"Amb1", {36.849723, 43.003630}},
    {"Amb3", {36.870231, 42.966564}},
    {"Amb4", {36.855982, 43.008771}},
    {"Amb5", {36.853527, 43.000917}},
};
const GeoPoint kFixtureRequest{36.85126, 42.99551};

GeoPoint random_point(std::mt19937_64& rng) {
    // Uniform on the sphere, then the pole/antimeridian edges mixed in.
    std::uniform_real_distribution<double> u(-1.0, 1.0), lon(-180.0, 180.0);
    const double lat = std::asin(u(rng)) * 180.0 / std::numbers::pi;
    return {lat, lon(rng)};
}

}  // namespace

TEST_CASE("deg_to_rad") {
    CHECK(deg_to_rad(0.0) == 0.0);
    CHECK(deg_to_rad(180.0) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    // mpmath, 50 digits: 0.64317582050848557765
    CHECK(deg_to_rad(36.85126) == doctest::Approx(0.64317582050848557765).epsilon(1e-15));
    CHECK_THROWS_AS(deg_to_rad(std::nan("")), Error);
    CHECK_THROWS_AS(deg_to_rad(INFINITY), Error);
}

TEST_CASE("haversine_distance examples") {
    CHECK(haversine_distance({36.85126, 42.99551}, {36.85126, 42.99551}).value == 0.0);
    // pi * 6371
    CHECK(haversine_distance({0, 0}, {0, 180}).value ==
          doctest::Approx(20015.086796020572722).epsilon(1e-14));
    // 6371 * pi / 180
    CHECK(haversine_distance({0, 0}, {1, 0}).value ==
          doctest::Approx(111.19492664455873735).epsilon(1e-14));
    // Amb1 to Amb3, mpmath: 4.0093364819011555
    CHECK(haversine_distance({36.849723, 43.003630}, {36.870231, 42.966564}).value ==
          doctest::Approx(4.0093364819011555).epsilon(1e-12));
}

TEST_CASE("haversine_distance rejects invalid points") {
    CHECK_THROWS_WITH_AS(haversine_distance({91, 0}, {0, 0}), doctest::Contains("invalid"), Error);
    CHECK_THROWS_AS(haversine_distance({0, 0}, {0, 181}), Error);
    CHECK_THROWS_AS(haversine_distance({std::nan(""), 0}, {0, 0}), Error);
    try {
        haversine_distance({0, -180.5}, {0, 0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }
}

TEST_CASE("EarthRadius must be positive") {
    CHECK(EarthRadius().km() == 6371.0);
    CHECK_THROWS_AS(EarthRadius(0.0), Error);
    CHECK_THROWS_AS(EarthRadius(-1.0), Error);
    CHECK_THROWS_AS(EarthRadius(std::nan("")), Error);
}

TEST_CASE("rank_by_distance on the fixture fleet") {
    const auto ranked = rank_by_distance(kFixtureRequest, kFixtureFleet);
    REQUIRE(ranked.size() == 4);
    // Brute force with 50-digit arithmetic (mpmath):
    // Amb5 0.54313546308110436, Amb1 0.74244430040640863,
    // Amb4 1.2914508113194915,  Amb3 3.3289181390890045
    CHECK(ranked[0].id == "Amb5");
    CHECK(ranked[1].id == "Amb1");
    CHECK(ranked[2].id == "Amb4");
    CHECK(ranked[3].id == "Amb3");
    CHECK(ranked[0].distance.value == doctest::Approx(0.54313546308110436).epsilon(1e-12));
    CHECK(ranked[1].distance.value == doctest::Approx(0.74244430040640863).epsilon(1e-12));
    CHECK(ranked[2].distance.value == doctest::Approx(1.2914508113194915).epsilon(1e-12));
    CHECK(ranked[3].distance.value == doctest::Approx(3.3289181390890045).epsilon(1e-12));

    const auto self = rank_by_distance(kFixtureFleet[0].location, kFixtureFleet);
    CHECK(self[0].id == "Amb1");
    CHECK(self[0].distance.value == 0.0);
}

TEST_CASE("rank_by_distance breaks ties by id") {
    const std::vector<Facility> twins{{"B", {10, 10}}, {"A", {10, 10}}};
    const auto ranked = rank_by_distance({0, 0}, twins);
    CHECK(ranked[0].id == "A");
    CHECK(ranked[1].id == "B");
}

TEST_CASE("rank_by_distance errors") {
    CHECK_THROWS_AS(rank_by_distance({0, 0}, std::vector<Facility>{}), Error);
    try {
        rank_by_distance({0, 0}, std::vector<Facility>{});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyFleet);
    }
    const std::vector<Facility> bad{{"X", {95, 0}}};
    CHECK_THROWS_AS(rank_by_distance({0, 0}, bad), Error);
}

TEST_CASE("metric properties on random pairs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10000; ++i) {
        const auto p = random_point(rng);
        const auto q = random_point(rng);
        const double d = haversine_distance(p, q).value;
        REQUIRE(d == haversine_distance(q, p).value);
        REQUIRE(haversine_distance(p, p).value == 0.0);
        REQUIRE(d >= 0.0);
        REQUIRE(d <= std::numbers::pi * 6371.0);
        const double k = 0.5 + 3.0 * double(i % 7);
        REQUIRE(haversine_distance(p, q, EarthRadius(6371.0 * k)).value ==
                doctest::Approx(k * d).epsilon(1e-14));
    }
}

TEST_CASE("near-antipodal pairs never produce NaN") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> jitter(-1e-9, 1e-9);
    for (int i = 0; i < 2000; ++i) {
        const auto p = random_point(rng);
        GeoPoint q{-p.lat_deg + jitter(rng), p.lon_deg > 0 ? p.lon_deg - 180.0 : p.lon_deg + 180.0};
        q.lat_deg = std::clamp(q.lat_deg, -90.0, 90.0);
        const double d = haversine_distance(p, q).value;
        REQUIRE(std::isfinite(d));
        REQUIRE(d <= std::numbers::pi * 6371.0);
        REQUIRE(d > std::numbers::pi * 6371.0 - 1e-3);
    }
}

TEST_CASE("agrees with the 50-digit oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto p = random_point(rng);
        auto q = random_point(rng);
        if (i % 10 == 0)  // at or near the antipode
            q = {std::clamp(-p.lat_deg + (i % 20 ? jitter(rng) : 0.0), -90.0, 90.0),
                 p.lon_deg > 0 ? p.lon_deg - 180.0 : p.lon_deg + 180.0};
        const double d = haversine_distance(p, q).value;
        const auto ref = test::hp_haversine(p.lat_deg, p.lon_deg, q.lat_deg, q.lon_deg);
        if (ref == 0)
            continue;
        const double rel = static_cast<double>(abs(test::hp_float(d) - ref) / ref);
        worst = std::max(worst, rel);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("ranking equals brute-force sort") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> size(1, 50), coarse(0, 3);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto origin = random_point(rng);
        std::vector<Facility> fleet;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            // Coarse grid points now and then to force exact ties.
            GeoPoint loc = coarse(rng) == 0 ? GeoPoint{double(coarse(rng)), double(coarse(rng))}
                                            : random_point(rng);
            fleet.push_back({"F" + std::to_string(n - i), loc});
        }
        std::vector<std::pair<double, std::string>> expect;
        for (const auto& f : fleet) {
            const auto ref = test::hp_haversine(origin.lat_deg, origin.lon_deg, f.location.lat_deg,
                                                f.location.lon_deg);
            expect.emplace_back(static_cast<double>(ref), f.id);
        }
        std::sort(expect.begin(), expect.end());

        const auto ranked = rank_by_distance(origin, fleet);
        REQUIRE(ranked.size() == expect.size());
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            REQUIRE(ranked[i].distance.value ==
                    doctest::Approx(expect[i].first).epsilon(1e-12));
            // Identical coordinates must come out in id order; other
            // near-ties are resolved by the distance check above.
            if (i > 0 && ranked[i].distance.value == ranked[i - 1].distance.value)
                REQUIRE(ranked[i - 1].id < ranked[i].id);
        }
        REQUIRE(ranked[0].distance.value ==
                doctest::Approx(expect[0].first).epsilon(1e-12));
    }
}

TEST_CASE("argmin is invariant under radius scaling") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto origin = random_point(rng);
        std::vector<Facility> fleet;
        for (int i = 0; i < 10; ++i)
            fleet.push_back({"E" + std::to_string(i), random_point(rng)});
        const auto base = rank_by_distance(origin, fleet).front().id;
        for (double r : {1.0, 3389.5, 6371.0, 69911.0})
            REQUIRE(rank_by_distance(origin, fleet, EarthRadius(r)).front().id == base);
    }
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
    std::mt19937_64 rng(3);
    std::vector<GeoPoint> a(20000), b(20000);
    for (auto& p : a) p = random_point(rng);
    for (auto& p : b) p = random_point(rng);
    const GeoPoint origin = random_point(rng);

    std::vector<double> s(a.size()), p(a.size());
    kernels::distances_serial(origin, a, 6371.0, s);
    kernels::distances_parallel(origin, a, 6371.0, p);
    CHECK(s == p);

    kernels::pairwise_serial(a, b, 6371.0, s);
    kernels::pairwise_parallel(a, b, 6371.0, p);
    CHECK(s == p);

    // Large fleets take the parallel path inside rank_by_distance.
    std::vector<Facility> fleet;
    for (std::size_t i = 0; i < kernels::kParallelThreshold + 10; ++i)
        fleet.push_back({"F" + std::to_string(i), a[i]});
    const auto ranked = rank_by_distance(origin, fleet);
    const auto best = std::min_element(s.begin(), s.begin() + long(fleet.size()));
    std::vector<double> ref(fleet.size());
    kernels::distances_serial(origin, std::span(a).first(fleet.size()), 6371.0, ref);
    CHECK(ranked.front().distance.value == *std::min_element(ref.begin(), ref.end()));
    (void)best;
}
