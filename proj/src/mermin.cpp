#include "hybell/mermin.hpp"

#include <cmath>
#include <sstream>

#include "hybell/errors.hpp"
#include "hybell/operators.hpp"

namespace hybell {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

double ghz_quadrature_violation(int n_parties) {
    if (n_parties < 2) throw DimensionMismatch("need at least two parties");
    return std::pow(2.0 / M_PI, n_parties / 2.0) *
           std::pow(2.0, (n_parties + 1) / 2.0);
}

MatrixXcd mermin_operator(int n_parties, int local_dim,
                          const std::vector<std::pair<double, double>>& phases,
                          const Interval& a, double tol) {
    if (n_parties < 2) throw DimensionMismatch("need at least two parties");
    if (static_cast<int>(phases.size()) != n_parties)
        throw DimensionMismatch("one phase pair per party");
    double total = std::pow(static_cast<double>(local_dim), n_parties);
    if (total > 32768) throw Error("joint dimension too large for a dense build");

    MatrixXd q = build_Q(a, local_dim, tol);
    auto x = [&](int party, bool primed) {
        return rotate_fock(q, primed ? phases[party].second : phases[party].first);
    };
    auto kron = [](const MatrixXcd& a_, const MatrixXcd& b_) {
        return tensor(std::vector<MatrixXcd>{a_, b_});
    };

    // base: full CHSH on the first two parties, then the standard doubling
    // M_k = (M_{k-1}(A_k + A'_k) + M''_{k-1}(A_k - A'_k)) / 2 where M'' swaps
    // every primed and unprimed setting.
    MatrixXcd m = kron(x(0, false), x(1, false) + x(1, true)) +
                  kron(x(0, true), x(1, false) - x(1, true));
    MatrixXcd mp = kron(x(0, true), x(1, true) + x(1, false)) +
                   kron(x(0, false), x(1, true) - x(1, false));
    for (int k = 2; k < n_parties; ++k) {
        MatrixXcd plus = x(k, false) + x(k, true);
        MatrixXcd minus = x(k, false) - x(k, true);
        MatrixXcd m_next = 0.5 * (kron(m, plus) + kron(mp, minus));
        MatrixXcd mp_next = 0.5 * (kron(mp, plus) - kron(m, minus));
        m = std::move(m_next);
        mp = std::move(mp_next);
    }
    return m;
}

double ghz_mermin_explicit(int n_parties, double tol) {
    if (n_parties != 3 && n_parties != 4)
        throw Error("explicit construction is wired for 3 or 4 parties");
    std::vector<std::pair<double, double>> phases(n_parties, {M_PI / 2, 0.0});
    if (n_parties % 2 == 0) phases.back() = {M_PI / 4, -M_PI / 4};

    MatrixXcd m = mermin_operator(n_parties, 2, phases, {0.0, kInf}, tol);
    long dim = m.rows();
    VectorXcd ghz = VectorXcd::Zero(dim);
    ghz[0] = ghz[dim - 1] = 1.0 / std::sqrt(2.0);
    std::complex<double> val = ghz.adjoint() * m * ghz;
    if (std::abs(val.imag()) > 1e-10) {
        std::ostringstream msg;
        msg << "expectation has imaginary part " << val.imag();
        throw Error(msg.str());
    }
    return std::abs(val.real());
}

namespace {

double w_value_with_d(const Interval& a, int dim, const VectorXd& ddiag, double tol) {
    MatrixXd q = build_Q(a, dim, tol);
    MatrixXd d = ddiag.asDiagonal();
    auto t3 = [](const MatrixXd& a, const MatrixXd& b, const MatrixXd& c) {
        return tensor(std::vector<MatrixXd>{a, b, c});
    };
    MatrixXd op = t3(d, q, q) + t3(q, d, q) + t3(q, q, d) - t3(d, d, d);
    long n = static_cast<long>(dim) * dim * dim;
    VectorXd w = VectorXd::Zero(n);
    // |100>, |010>, |001> at composite index i*dim^2 + j*dim + k
    w[static_cast<long>(dim) * dim] = w[dim] = w[1] = 1.0 / std::sqrt(3.0);
    return std::abs(double(w.transpose() * op * w));
}

} // namespace

double w_mermin_value(const Interval& a, int dim, double tol) {
    if (dim < 2) throw DimensionMismatch("need at least two levels");
    return w_value_with_d(a, dim, build_D(dim), tol);
}

double w_mermin_value_eta(const Interval& a, int dim, double eta, double tol) {
    if (dim < 2) throw DimensionMismatch("need at least two levels");
    return w_value_with_d(a, dim, build_D_eta(eta, dim), tol);
}

double w_critical_eta(const Interval& a, int dim, const SolveConfig& cfg) {
    auto value = [&](double eta) {
        return w_mermin_value_eta(a, dim, eta, cfg.quad_tol);
    };
    if (!(value(1.0) > 2.0))
        throw NoViolation("three-party combination never beats 2 at this binning");
    double lo = 0.0, hi = 1.0;
    if (value(lo) > 2.0) return lo;
    while (hi - lo > cfg.bisect_width) {
        double mid = 0.5 * (lo + hi);
        (value(mid) > 2.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace hybell
