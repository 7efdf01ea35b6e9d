#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hybell/chsh.hpp>
#include <hybell/errors.hpp>
#include <hybell/operators.hpp>

#include <cmath>
#include <random>

using namespace hybell;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
const double kPi = 3.14159265358979323846;
const double kTsirelson = 2.0 * std::sqrt(2.0);

VectorXd vec_row_major(const MatrixXd& psi) {
    VectorXd v(psi.size());
    int k = 0;
    for (int i = 0; i < psi.rows(); ++i)
        for (int j = 0; j < psi.cols(); ++j) v[k++] = psi(i, j);
    return v;
}
} // namespace

TEST_CASE("dense() matches the factored definition") {
    MatrixXd qa = build_Q({-0.4, 1.1}, 4);
    MatrixXd qb = build_Q({0.2, kInf}, 3);
    VectorXd da = build_D(4), db = build_D_eta(0.6, 3);
    JointOperator b = assemble_chsh(qa, da, qb, db);
    CHECK(b.dimA() == 4);
    CHECK(b.dimB() == 3);

    MatrixXd dam = MatrixXd(da.asDiagonal());
    MatrixXd dbm = MatrixXd(db.asDiagonal());
    MatrixXd manual = tensor(std::vector<MatrixXd>{qa, qb + dbm}) +
                      tensor(std::vector<MatrixXd>{dam, qb - dbm});
    CHECK((b.dense() - manual).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("two-level model: anticommutator identity and norm") {
    // On span{vacuum, tail} the binned sign observable acts as
    // cos(theta) sz + sin(theta) sx while photodetection is -sz.
    for (double theta : {0.3, kPi / 2.0, 2.0}) {
        MatrixXd q(2, 2);
        q << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
        VectorXd d(2);
        d << -1.0, 1.0;
        JointOperator b = assemble_chsh(q, d, q, d);
        MatrixXd bd = b.dense();

        MatrixXd dm = MatrixXd(d.asDiagonal());
        MatrixXd comm = q * dm - dm * q;
        MatrixXd rhs = 4.0 * MatrixXd::Identity(4, 4) -
                       tensor(std::vector<MatrixXd>{comm, comm});
        CHECK((bd * bd - rhs).cwiseAbs().maxCoeff() < 1e-9);

        double expect = 2.0 * std::sqrt(1.0 + std::sin(theta) * std::sin(theta));
        CHECK(chsh_norm(b).value == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("norm never exceeds its analytic value, nor Tsirelson") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> lo_d(-2.5, 2.5), len_d(0.05, 3.0);
    const int dim = 30;
    for (int k = 0; k < 20; ++k) {
        double lo = lo_d(rng);
        Interval a{lo, lo + len_d(rng)};
        if (k % 5 == 4) a.hi = kInf;
        ViolationResult r = chsh_norm(assemble_chsh(a, dim, dim));
        CHECK(r.value <= analytic_norm(a) + 1e-6);
        CHECK(r.value <= kTsirelson + 1e-6);
        CHECK(r.value >= 0.0);
    }
}

TEST_CASE("norm of nested Fock compressions is monotone") {
    for (Interval a : {Interval{0.0, kInf}, Interval{-0.6, 0.9}}) {
        JointOperator b = assemble_chsh(a, 40, 40);
        double full = chsh_norm(b).value;
        double prev = 0.0;
        for (int n : {1, 2, 4, 8, 16}) {
            std::vector<int> levels(n);
            for (int i = 0; i < n; ++i) levels[i] = i;
            double v = chsh_norm(project_to_subspace(b, levels)).value;
            CHECK(v >= prev - 1e-10);
            CHECK(v <= full + 1e-9);
            prev = v;
        }
    }
}

TEST_CASE("[Q, D] is rank two and exactly captured by the vacuum-tail plane") {
    // D = I - 2|0><0|, so the commutator lives on span{e0, Q e0}.
    const int dim = 40;
    MatrixXd q = build_Q({0.0, kInf}, dim);
    MatrixXd dm = MatrixXd(VectorXd(build_D(dim)).asDiagonal());
    MatrixXd comm = q * dm - dm * q;

    Eigen::JacobiSVD<MatrixXd> svd(comm);
    REQUIRE(svd.singularValues().size() >= 3);
    CHECK(svd.singularValues()[0] > 0.1);
    CHECK(svd.singularValues()[2] < 1e-12);

    MatrixXd basis(dim, 2);
    basis.col(0) = VectorXd::Unit(dim, 0);
    VectorXd q0 = q.col(0);
    q0 -= q0.dot(basis.col(0)) * basis.col(0);
    basis.col(1) = q0.normalized();
    MatrixXd proj = basis * basis.transpose();
    MatrixXd qc = proj * q * proj, dc = proj * dm * proj;
    CHECK((comm - (qc * dc - dc * qc)).cwiseAbs().maxCoeff() < 1e-10);

    // residual stays at rounding level as the truncation deepens
    auto residual = [](int d) {
        MatrixXd qq = build_Q({0.0, kInf}, d);
        MatrixXd dd = MatrixXd(VectorXd(build_D(d)).asDiagonal());
        MatrixXd c = qq * dd - dd * qq;
        MatrixXd b(d, 2);
        b.col(0) = VectorXd::Unit(d, 0);
        VectorXd q0 = qq.col(0);
        q0 -= q0.dot(b.col(0)) * b.col(0);
        b.col(1) = q0.normalized();
        MatrixXd p = b * b.transpose();
        MatrixXd qc2 = p * qq * p, dc2 = p * dd * p;
        return (c - (qc2 * dc2 - dc2 * qc2)).cwiseAbs().maxCoeff();
    };
    double r20 = residual(20), r100 = residual(100);
    CHECK(r20 < 1e-10);
    CHECK(r100 <= r20 + 1e-12);
}

TEST_CASE("dense and iterative solvers agree, eigenvectors check out") {
    Interval a{-0.2, 1.1};
    JointOperator b = assemble_chsh(a, 17, 17);

    SolveConfig dense_cfg;
    dense_cfg.dense_max = 400;
    SolveConfig iter_cfg;
    iter_cfg.dense_max = 1;

    ViolationResult rd = chsh_norm(b, dense_cfg);
    ViolationResult ri = chsh_norm(b, iter_cfg);
    CHECK(rd.value == doctest::Approx(ri.value).epsilon(1e-9));

    MatrixXd bd = b.dense();
    for (const ViolationResult& r : {rd, ri}) {
        VectorXd v = vec_row_major(r.state);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK((bd * v - r.signed_value * v).norm() < 1e-5);
        CHECK(std::abs(r.signed_value) == doctest::Approx(r.value).epsilon(1e-12));
    }
}

TEST_CASE("tail state structure") {
    Interval rp{0.0, kInf};
    double prev_tw = 0.0;
    for (int dim : {11, 41, 101}) {
        XiState xi = xi_state(rp, dim);
        REQUIRE(xi.amps.size() == dim);
        CHECK(xi.amps.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(xi.amps[0] == 0.0);
        // half-line overlaps with the vacuum vanish for even orders
        for (int n = 2; n < dim; n += 2) CHECK(std::abs(xi.amps[n]) < 1e-12);
        CHECK(xi.truncated_weight > prev_tw);
        CHECK(xi.truncated_weight < 1.0);
        prev_tw = xi.truncated_weight;
    }
    XiState xi = xi_state(rp, 101);
    // unnormalized first amplitude is 2 G(0,1) = sqrt(2/pi) since theta = pi/2
    CHECK(xi.amps[1] * std::sqrt(xi.truncated_weight) ==
          doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-10));
}

TEST_CASE("extremal pair on the vacuum-tail product") {
    CHECK_THROWS_AS(pi_states({0.3, 1.0}, 21), DegenerateBinning);

    Interval rp{0.0, kInf};
    PiStates p = pi_states(rp, 41);
    CHECK(p.plus.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.minus.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs((p.plus.array() * p.minus.array()).sum()) < 1e-12);

    JointOperator b = assemble_chsh(rp, 41, 41);
    double plus = expectation(p.plus, b);
    double minus = expectation(p.minus, b);
    CHECK(std::abs(plus - 2.7134) < 2e-3);
    CHECK(std::abs(minus + 2.7134) < 2e-3);
}

TEST_CASE("subspace compressions") {
    Interval rp{0.0, kInf};
    JointOperator b = assemble_chsh(rp, 6, 6);

    // span version: the lone vacuum product state gives <00|B|00> = -1
    MatrixXd e00 = MatrixXd::Zero(6, 6);
    e00(0, 0) = 1.0;
    MatrixXd m = project_to_subspace(b, std::vector<MatrixXd>{e00});
    REQUIRE(m.rows() == 1);
    CHECK(m(0, 0) == doctest::Approx(-1.0).epsilon(1e-10));

    // Fock-level version agrees with the span version on product spans
    JointOperator bp = project_to_subspace(b, std::vector<int>{0, 2});
    CHECK(bp.dimA() == 2);
    std::vector<MatrixXd> span;
    for (int i : {0, 2})
        for (int j : {0, 2}) {
            MatrixXd e = MatrixXd::Zero(6, 6);
            e(i, j) = 1.0;
            span.push_back(e);
        }
    MatrixXd ms = project_to_subspace(b, span);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(ms, Eigen::EigenvaluesOnly);
    double span_norm = std::max(std::abs(es.eigenvalues().minCoeff()),
                                std::abs(es.eigenvalues().maxCoeff()));
    CHECK(chsh_norm(bp).value == doctest::Approx(span_norm).epsilon(1e-10));
}

TEST_CASE("binning optimizer: determinism and known optima") {
    OptimizeResult r1 = optimize_binning({0, 1}, Objective::MaxViolation);
    OptimizeResult r2 = optimize_binning({0, 1}, Objective::MaxViolation);
    CHECK(r1.binning == r2.binning);
    CHECK(r1.objective_value == r2.objective_value);
    CHECK(std::abs(r1.objective_value - 2.2947) < 2e-3);
    CHECK(std::abs(r1.norm - r1.objective_value) < 1e-12);

    OptimizeResult r3 = optimize_binning({0, 2}, Objective::MaxViolation);
    CHECK(std::abs(r3.objective_value - 2.3374) < 2e-3);
}

TEST_CASE("binning optimizer: vacuum-only subspace saturates the classical value") {
    OptimizeResult r = optimize_binning({0}, Objective::MaxViolation);
    CHECK(r.objective_value <= 2.0 + 1e-9);
    CHECK(r.objective_value >= 2.0 - 1e-3);
}

TEST_CASE("binning optimizer: efficiency objective") {
    OptimizeResult r = optimize_binning({0, 2}, Objective::MinEta);
    CHECK(std::abs(r.objective_value - 0.4841) < 5e-3);
    CHECK(r.norm > 2.0);
}

TEST_CASE("expectation agrees with the dense form") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    JointOperator b = assemble_chsh({-0.9, 0.4}, 5, 7);
    MatrixXd bd = b.dense();

    MatrixXd psi(5, 7);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) psi(i, j) = g(rng);
    psi /= psi.norm();
    VectorXd v = vec_row_major(psi);
    CHECK(expectation(psi, b) == doctest::Approx(v.dot(bd * v)).epsilon(1e-12));

    Eigen::MatrixXcd psic(5, 7);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 7; ++j) psic(i, j) = std::complex<double>(g(rng), g(rng));
    psic /= psic.norm();
    MatrixXd re = psic.real(), im = psic.imag();
    VectorXd vr = vec_row_major(re), vi = vec_row_major(im);
    double manual = vr.dot(bd * vr) + vi.dot(bd * vi);
    CHECK(expectation(psic, b) == doctest::Approx(manual).epsilon(1e-12));
}
