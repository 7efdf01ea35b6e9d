#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hybell/bounds.hpp>

#include <cmath>

using namespace hybell;

namespace {
const double kRoot2 = std::sqrt(2.0);

double correlator(double s, double a, double b) {
    return std::cos(a) * std::cos(b) + std::sin(2.0 * s) * std::sin(a) * std::sin(b);
}

double chsh_from(const ConstrainedMax& r) {
    double a0 = r.angles[0], a1 = r.angles[1], b0 = r.angles[2], b1 = r.angles[3];
    double s = r.schmidt_angle;
    return correlator(s, a0, b0) + correlator(s, a0, b1) + correlator(s, a1, b0) -
           correlator(s, a1, b1);
}
} // namespace

TEST_CASE("constrained maxima at the landmark pins") {
    CHECK(constrained_chsh_max({0, 0, 1.0}).value == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(constrained_chsh_max({0, 0, -1.0}).value == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(constrained_chsh_max({0, 0, 0.0}).value ==
          doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-6));
    CHECK(constrained_chsh_max({0, 0, 1.0 / kRoot2}).value ==
          doctest::Approx(2.0 * kRoot2).epsilon(1e-6));
    CHECK(constrained_chsh_max({0, 0, -1.0 / kRoot2}).value ==
          doctest::Approx(2.0 * kRoot2).epsilon(1e-6));
}

TEST_CASE("which correlator is pinned does not matter") {
    double ref = constrained_chsh_max({0, 0, 0.4}).value;
    CHECK(constrained_chsh_max({0, 1, 0.4}).value == doctest::Approx(ref).epsilon(1e-5));
    CHECK(constrained_chsh_max({1, 0, 0.4}).value == doctest::Approx(ref).epsilon(1e-5));
    CHECK(constrained_chsh_max({1, 1, 0.4}).value == doctest::Approx(ref).epsilon(1e-5));
}

TEST_CASE("constraint is honored and the reported value is consistent") {
    // angles describe the canonical problem: the pin lands in the (0,0) slot
    for (double c : {-0.6, 0.15, 0.85}) {
        ConstrainedMax r = constrained_chsh_max({0, 1, c});
        double pinned = correlator(r.schmidt_angle, r.angles[0], r.angles[2]);
        CHECK(pinned == doctest::Approx(c).epsilon(1e-6));
        CHECK(std::abs(chsh_from(r)) == doctest::Approx(r.value).epsilon(1e-9));
    }
    // the (1,1) slot enters the sum negated, so its pin flips sign
    ConstrainedMax r11 = constrained_chsh_max({1, 1, 0.35});
    double pinned = correlator(r11.schmidt_angle, r11.angles[0], r11.angles[2]);
    CHECK(pinned == doctest::Approx(-0.35).epsilon(1e-6));
}

TEST_CASE("curve over the pinned value") {
    auto curve = constrained_chsh_curve(41);
    REQUIRE(curve.size() == 41);
    CHECK(curve.front().first == doctest::Approx(-1.0));
    CHECK(curve.back().first == doctest::Approx(1.0));
    CHECK(curve.front().second == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(curve.back().second == doctest::Approx(2.5).epsilon(1e-6));

    for (size_t k = 0; k < curve.size(); ++k) {
        // even in the pinned value
        CHECK(curve[k].second ==
              doctest::Approx(curve[curve.size() - 1 - k].second).epsilon(5e-6));
        CHECK(curve[k].second >= 2.5 - 1e-6);
        CHECK(curve[k].second <= 2.0 * kRoot2 + 1e-6);
    }
    CHECK(curve[20].second == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("random strategies never beat the curve") {
    auto curve = constrained_chsh_curve(41);
    for (size_t k = 0; k < curve.size(); ++k) {
        double lower = random_strategy_oracle(curve[k].first, 2000, 1234 + k);
        CHECK(curve[k].second >= lower - 1e-4);
    }
    // deterministic per seed
    CHECK(random_strategy_oracle(0.3, 1000, 42) == random_strategy_oracle(0.3, 1000, 42));
}

TEST_CASE("polished oracle closes the gap") {
    auto curve = constrained_chsh_curve(41);
    double at03 = curve[26].second; // pinned value 0.3
    CHECK(std::abs(curve[26].first - 0.3) < 1e-12);
    CHECK(polished_oracle(0.3, 500, 7) == doctest::Approx(at03).epsilon(1e-3));
}

TEST_CASE("three-level observables do not help") {
    auto curve = constrained_chsh_curve(41);
    double at05 = curve[30].second; // pinned value 0.5
    CHECK(std::abs(curve[30].first - 0.5) < 1e-12);
    CHECK(dim3_spot_check(0.5, 99) <= at05 + 1e-4);
}
