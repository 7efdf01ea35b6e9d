#include "hybell/eigen_solve.hpp"

#include <lapacke.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hybell/errors.hpp"

namespace hybell {

namespace {

// One eigenpair by index (1-based, ascending) via dsyevr. The input copy is
// clobbered by LAPACK.
std::pair<double, Eigen::VectorXd> dsyevr_index(Eigen::MatrixXd a, int index) {
    int n = static_cast<int>(a.rows());
    Eigen::VectorXd w(n), z(n);
    std::vector<lapack_int> isuppz(2);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'U', n, a.data(), n, 0.0, 0.0, index, index,
        0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != 1) {
        std::ostringstream msg;
        msg << "dsyevr failed, info " << info << ", n " << n;
        throw NonConvergence(msg.str());
    }
    return {w[0], z};
}

} // namespace

ExtremalPair dense_extremal(const Eigen::MatrixXd& m) {
    int n = static_cast<int>(m.rows());
    if (n == 0) throw DimensionMismatch("dense_extremal on empty matrix");
    auto [lo, vlo] = dsyevr_index(m, 1);
    auto [hi, vhi] = dsyevr_index(m, n);
    ExtremalPair r;
    if (std::abs(lo) > std::abs(hi)) {
        r.signed_value = lo;
        r.vector = vlo;
    } else {
        r.signed_value = hi;
        r.vector = vhi;
    }
    r.abs_value = std::abs(r.signed_value);
    return r;
}

ExtremalPair lanczos_extremal(const MatVec& apply, int n, const SolveConfig& cfg,
                              const Eigen::VectorXd* start) {
    if (n <= 0) throw DimensionMismatch("lanczos_extremal on empty operator");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss;
    auto random_unit = [&](const Eigen::MatrixXd& against, int cols) {
        Eigen::VectorXd v(n);
        for (int attempt = 0; attempt < 50; ++attempt) {
            for (int i = 0; i < n; ++i) v[i] = gauss(rng);
            if (cols > 0) {
                auto vk = against.leftCols(cols);
                v -= vk * (vk.transpose() * v);
                v -= vk * (vk.transpose() * v);
            }
            double norm = v.norm();
            if (norm > 1e-8) return Eigen::VectorXd(v / norm);
        }
        throw NonConvergence("lanczos could not draw a fresh start vector");
    };

    int kmax = std::min(n, cfg.iter_max);
    Eigen::MatrixXd v_basis(n, kmax);
    Eigen::VectorXd alpha(kmax), beta(kmax);
    if (start && start->size() == n && start->norm() > 1e-8)
        v_basis.col(0) = *start / start->norm();
    else
        v_basis.col(0) = random_unit(v_basis, 0);

    Eigen::VectorXd w(n);
    double prev_lo = 0.0, prev_hi = 0.0;
    int k = 0;
    double best_lo = 0.0, best_hi = 0.0;
    while (k < kmax) {
        apply(v_basis.col(k), w);
        alpha[k] = v_basis.col(k).dot(w);
        // full reorthogonalization, twice for safety
        auto vk = v_basis.leftCols(k + 1);
        w -= vk * (vk.transpose() * w);
        w -= vk * (vk.transpose() * w);
        beta[k] = w.norm();
        ++k;

        if (k > 2) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(alpha.head(k), beta.head(k - 1),
                                      Eigen::EigenvaluesOnly);
            best_lo = es.eigenvalues()[0];
            best_hi = es.eigenvalues()[k - 1];
            double scale = std::max({1.0, std::abs(best_lo), std::abs(best_hi)});
            if (k > 8 && std::abs(best_lo - prev_lo) < cfg.iter_tol * scale &&
                std::abs(best_hi - prev_hi) < cfg.iter_tol * scale)
                break;
            prev_lo = best_lo;
            prev_hi = best_hi;
        }
        if (k == kmax) break;
        if (beta[k - 1] < 1e-13) {
            // invariant subspace exhausted; continue in a fresh direction
            v_basis.col(k) = random_unit(v_basis, k);
            beta[k - 1] = 0.0;
        } else {
            v_basis.col(k) = w / beta[k - 1];
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(alpha.head(k), beta.head(k - 1),
                              Eigen::ComputeEigenvectors);
    double lo = es.eigenvalues()[0];
    double hi = es.eigenvalues()[k - 1];
    int pick = std::abs(lo) > std::abs(hi) ? 0 : k - 1;
    ExtremalPair r;
    r.signed_value = es.eigenvalues()[pick];
    r.abs_value = std::abs(r.signed_value);
    r.vector = v_basis.leftCols(k) * es.eigenvectors().col(pick);
    r.vector.normalize();
    r.iterations = k;

    apply(r.vector, w);
    double residual = (w - r.signed_value * r.vector).norm();
    double scale = std::max(1.0, r.abs_value);
    if (k >= kmax && residual > 1e-6 * scale) {
        std::ostringstream msg;
        msg << "lanczos hit the iteration cap " << kmax << "; best estimate "
            << r.signed_value << ", residual " << residual;
        throw NonConvergence(msg.str());
    }
    return r;
}

} // namespace hybell
