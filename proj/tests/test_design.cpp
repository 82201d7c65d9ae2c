#include <doctest.h>

#include <cmath>

#include "mdk/design.hpp"
#include "mdk/error.hpp"

using namespace mdk;

TEST_CASE("stub length") {
    // c / (4 * 5e9 * sqrt(4.5)) = 7.06617600... mm
    const double l = stub_length(5e9, 4.5);
    CHECK(l == doctest::Approx(kSpeedOfLight / (20e9 * std::sqrt(4.5))).epsilon(1e-12));
    CHECK(l * 1e3 == doctest::Approx(7.067).epsilon(5e-4));
    CHECK(std::abs(l * 1e3 / 7.25 - 1.0) < 0.05);
    CHECK(stub_length(kSpeedOfLight / 4, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(stub_length(3.6e9, 4.5) * 1e3 == doctest::Approx(9.816).epsilon(5e-4));
    CHECK_THROWS_AS(stub_length(0, 4.5), DomainError);
    CHECK_THROWS_AS(stub_length(1e9, 0.5), DomainError);
    CHECK_THROWS_AS(stub_length(NAN, 4.5), DomainError);

    auto s = design_stub(5e9, 4.5);
    CHECK(s.length == l);
    CHECK(s.f0 == 5e9);
}

TEST_CASE("stub length decreases in f0 and eps_r") {
    double prev = stub_length(1e9, 4.5);
    for (double f = 1.5e9; f <= 20e9; f += 0.5e9) {
        CHECK(stub_length(f, 4.5) < prev);
        prev = stub_length(f, 4.5);
    }
    prev = stub_length(5e9, 1.0);
    for (double er = 1.5; er <= 12.0; er += 0.5) {
        CHECK(stub_length(5e9, er) < prev);
        prev = stub_length(5e9, er);
    }
}

TEST_CASE("notch centre inverts stub length") {
    CHECK(notch_center(7.25e-3, 4.5) / 1e9 == doctest::Approx(4.87).epsilon(1e-3));
    CHECK(notch_center(10.25e-3, 4.5) / 1e9 == doctest::Approx(3.45).epsilon(1e-3));
    CHECK(notch_center(4.25e-3, 4.5) / 1e9 == doctest::Approx(8.31).epsilon(1e-3));
    for (double f = 1e9; f <= 20e9; f += 0.7e9)
        for (double er = 1.0; er <= 12.0; er += 0.5)
            CHECK(std::abs(notch_center(stub_length(f, er), er) / f - 1.0) < 1e-12);
    CHECK_THROWS_AS(notch_center(0, 4.5), DomainError);
    CHECK_THROWS_AS(notch_center(-1e-3, 4.5), DomainError);
}

TEST_CASE("slot dimensions") {
    auto s = slot_dimensions(3.6e9, 4.5);
    CHECK(s.l5 * 1e3 == doctest::Approx(9.816).epsilon(5e-4));
    CHECK(s.g * 1e3 == doctest::Approx(4.908).epsilon(5e-4));
    CHECK(s.l5 == 2 * s.g);
    CHECK(std::abs(s.l5 * 1e3 / 10.0 - 1.0) < 0.05);
    CHECK(std::abs(s.g * 1e3 / 5.0 - 1.0) < 0.05);
    auto d = slot_dimensions(7.2e9, 4.5);
    CHECK(d.l5 == doctest::Approx(s.l5 / 2).epsilon(1e-15));
    CHECK(d.g == doctest::Approx(s.g / 2).epsilon(1e-15));
    for (double f : {1e9, 2.7e9, 11e9})
        for (double er : {1.0, 2.2, 10.2}) {
            auto x = slot_dimensions(f, er);
            CHECK(x.l5 == 2 * x.g);
        }
    CHECK_THROWS_AS(slot_dimensions(-1, 4.5), DomainError);
}

TEST_CASE("gap model reproduces calibration points and interpolates") {
    auto m = GapModel::defaults();
    auto a = m.predict(0.25);
    CHECK(a.bw_ghz == 1.0);
    CHECK(a.f_low_ghz == 5.25);
    CHECK(a.f_high_ghz == 6.25);
    auto b = m.predict(1.5);
    CHECK(b.bw_ghz == 2.6);
    CHECK(b.f_low_ghz == 3.7);
    CHECK(b.f_high_ghz == 6.3);
    auto c = notch_bandwidth_from_gap(0.5, m);
    CHECK(c.bw_ghz == doctest::Approx(1.32).epsilon(1e-12));
    CHECK(std::abs(c.bw_ghz - 1.5) <= 0.2);
    CHECK_THROWS_AS(m.predict(0.2), RangeError);
    CHECK_THROWS_AS(m.predict(1.6), RangeError);
}

TEST_CASE("gap model from JSON") {
    auto m = GapModel::from_json(R"({"points": [
        {"gap_mm": 0.25, "bw_ghz": 1.0, "f_low_ghz": 5.25, "f_high_ghz": 6.25},
        {"gap_mm": 0.5, "bw_ghz": 1.5, "f_low_ghz": 4.85, "f_high_ghz": 6.35},
        {"gap_mm": 1.5, "bw_ghz": 2.6, "f_low_ghz": 3.7, "f_high_ghz": 6.3}]})");
    CHECK(m.points().size() == 3);
    CHECK(m.predict(0.5).bw_ghz == 1.5);
    CHECK(m.predict(1.0).bw_ghz == doctest::Approx(2.05).epsilon(1e-12));
    CHECK_THROWS_AS(GapModel::from_json("{}"), ParseError);
    CHECK_THROWS_AS(GapModel::from_json("{\"points\": 3}"), ParseError);
    CHECK_THROWS_AS(GapModel::from_json("not json"), ParseError);
    CHECK_THROWS_AS(GapModel({{1.0, 1, 1, 2}}), DomainError);
    CHECK_THROWS_AS(GapModel({{1.0, 1, 1, 2}, {0.5, 1, 1, 2}}), DomainError);
}
