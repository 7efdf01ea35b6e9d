#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hybell/errors.hpp>
#include <hybell/mermin.hpp>
#include <hybell/operators.hpp>

#include <cmath>
#include <complex>

using namespace hybell;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {
const double kPi = 3.14159265358979323846;

VectorXcd ghz_vector(int n_parties) {
    long dim = 1L << n_parties;
    VectorXcd v = VectorXcd::Zero(dim);
    v[0] = v[dim - 1] = 1.0 / std::sqrt(2.0);
    return v;
}

double ghz_value(const MatrixXcd& op, int n_parties) {
    VectorXcd g = ghz_vector(n_parties);
    std::complex<double> val = g.adjoint() * op * g;
    REQUIRE(std::abs(val.imag()) < 1e-10);
    return std::abs(val.real());
}
} // namespace

TEST_CASE("closed form for the many-party quadrature violation") {
    for (int n = 2; n <= 6; ++n) {
        double expect = std::pow(2.0 / kPi, n / 2.0) * std::pow(2.0, (n + 1) / 2.0);
        CHECK(ghz_quadrature_violation(n) == doctest::Approx(expect).epsilon(1e-12));
    }
    // crosses the classical edge only from three parties on
    CHECK(ghz_quadrature_violation(2) < 2.0);
    CHECK(ghz_quadrature_violation(3) > 2.0);
    CHECK_THROWS_AS(ghz_quadrature_violation(1), DimensionMismatch);
}

TEST_CASE("explicit operator reproduces the closed form") {
    CHECK(ghz_mermin_explicit(3) ==
          doctest::Approx(ghz_quadrature_violation(3)).epsilon(1e-10));
    CHECK(ghz_mermin_explicit(4) ==
          doctest::Approx(ghz_quadrature_violation(4)).epsilon(1e-10));
    CHECK_THROWS_AS(ghz_mermin_explicit(5), Error);
}

TEST_CASE("two-level truncation is exact for the photonic GHZ state") {
    // the recursion's two-party base is the plain CHSH combination
    std::vector<std::pair<double, double>> phases = {{kPi / 2, 0.0}, {kPi / 4, -kPi / 4}};
    MatrixXcd m = mermin_operator(2, 2, phases, {0.0, kInf});
    MatrixXcd a0 = build_rotated_Q({0.0, kInf}, phases[0].first, 2);
    MatrixXcd a1 = build_rotated_Q({0.0, kInf}, phases[0].second, 2);
    MatrixXcd b0 = build_rotated_Q({0.0, kInf}, phases[1].first, 2);
    MatrixXcd b1 = build_rotated_Q({0.0, kInf}, phases[1].second, 2);
    MatrixXcd manual = tensor(std::vector<MatrixXcd>{a0, b0 + b1}) +
                       tensor(std::vector<MatrixXcd>{a1, b0 - b1});
    CHECK((m - manual).cwiseAbs().maxCoeff() < 1e-12);

    // extra levels change nothing for a state supported on {0, 1}
    std::vector<std::pair<double, double>> ph3(3, {kPi / 2, 0.0});
    MatrixXcd m2 = mermin_operator(3, 2, ph3, {0.0, kInf});
    MatrixXcd m4 = mermin_operator(3, 4, ph3, {0.0, kInf});
    double v2 = ghz_value(m2, 3);
    VectorXcd g4 = VectorXcd::Zero(64);
    g4[0] = 1.0 / std::sqrt(2.0);
    g4[1 * 16 + 1 * 4 + 1] = 1.0 / std::sqrt(2.0);
    std::complex<double> val4 = g4.adjoint() * m4 * g4;
    CHECK(v2 == doctest::Approx(std::abs(val4.real())).epsilon(1e-12));
}

TEST_CASE("which party carries the asymmetric pair does not matter") {
    double ref = -1.0;
    for (int special = 0; special < 4; ++special) {
        std::vector<std::pair<double, double>> phases(4, {kPi / 2, 0.0});
        phases[special] = {kPi / 4, -kPi / 4};
        double v = ghz_value(mermin_operator(4, 2, phases, {0.0, kInf}), 4);
        if (ref < 0.0)
            ref = v;
        else
            CHECK(v == doctest::Approx(ref).epsilon(1e-10));
    }
    CHECK(ref == doctest::Approx(ghz_quadrature_violation(4)).epsilon(1e-10));
}

TEST_CASE("mermin_operator input guards") {
    std::vector<std::pair<double, double>> two(2, {0.0, 1.0});
    CHECK_THROWS_AS(mermin_operator(3, 2, two, {0.0, kInf}), DimensionMismatch);
    std::vector<std::pair<double, double>> eight(8, {0.0, 1.0});
    CHECK_THROWS_AS(mermin_operator(8, 4, eight, {0.0, kInf}), Error);
}

TEST_CASE("three-party single-photon combination") {
    Interval rp{0.0, kInf};
    double expect = 1.0 + 4.0 / kPi;

    // each single-detector term contributes the same amount by symmetry
    MatrixXd q = build_Q(rp, 2);
    MatrixXd d = MatrixXd(VectorXd(build_D(2)).asDiagonal());
    VectorXd w = VectorXd::Zero(8);
    w[1] = w[2] = w[4] = 1.0 / std::sqrt(3.0);
    auto t3 = [](const MatrixXd& x, const MatrixXd& y, const MatrixXd& z) {
        return tensor(std::vector<MatrixXd>{x, y, z});
    };
    double dqq = w.transpose() * t3(d, q, q) * w;
    double qdq = w.transpose() * t3(q, d, q) * w;
    double qqd = w.transpose() * t3(q, q, d) * w;
    double ddd = w.transpose() * t3(d, d, d) * w;
    CHECK(dqq == doctest::Approx(qdq).epsilon(1e-12));
    CHECK(qdq == doctest::Approx(qqd).epsilon(1e-12));
    CHECK(std::abs(dqq + qdq + qqd - ddd) == doctest::Approx(expect).epsilon(1e-12));

    // truncation level is irrelevant for a two-level state
    double v2 = w_mermin_value(rp, 2);
    CHECK(v2 == doctest::Approx(expect).epsilon(1e-8));
    CHECK(w_mermin_value(rp, 5) == doctest::Approx(v2).epsilon(1e-12));
    CHECK(w_mermin_value(rp, 9) == doctest::Approx(v2).epsilon(1e-12));
    CHECK_THROWS_AS(w_mermin_value(rp, 1), DimensionMismatch);
}

TEST_CASE("single-photon combination under detector loss") {
    Interval rp{0.0, kInf};
    for (double eta : {0.0, 0.25, 0.5, 0.8634, 1.0}) {
        double expect = std::abs(4.0 / kPi + 2.0 * eta - 1.0);
        CHECK(w_mermin_value_eta(rp, 2, eta) == doctest::Approx(expect).epsilon(1e-8));
    }
    double etac = w_critical_eta(rp, 2);
    CHECK(std::abs(etac - (3.0 - 4.0 / kPi) / 2.0) < 2e-4);
    CHECK_THROWS_AS(w_critical_eta({-0.05, 0.05}, 2), NoViolation);
}
