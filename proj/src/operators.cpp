#include "hybell/operators.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>

#include "hybell/quadrature.hpp"

namespace hybell {

Eigen::MatrixXd build_Q(const Interval& a, int dim, double tol) {
    if (dim <= 0) throw DimensionMismatch("build_Q needs dim >= 1");
    if (a.is_empty()) return -Eigen::MatrixXd::Identity(dim, dim);
    if (a.is_full_line()) return Eigen::MatrixXd::Identity(dim, dim);
    validate(a);
    Eigen::MatrixXd g = overlap_matrix(a, dim, tol);
    return 2.0 * g - Eigen::MatrixXd::Identity(dim, dim);
}

namespace {

using QKey = std::tuple<std::int64_t, std::int64_t, int>;

std::int64_t quantize(double x) {
    if (x == kInf) return INT64_MAX;
    if (x == -kInf) return INT64_MIN;
    return std::llround(x * 1e12);
}

std::mutex g_q_mutex;
// node-based map so returned references survive later insertions
std::map<QKey, Eigen::MatrixXd> g_q_cache;

} // namespace

const Eigen::MatrixXd& cached_Q(const Interval& a, int dim, double tol) {
    QKey key{quantize(a.lo), quantize(a.hi), dim};
    {
        std::lock_guard<std::mutex> lock(g_q_mutex);
        auto it = g_q_cache.find(key);
        if (it != g_q_cache.end()) return it->second;
    }
    Eigen::MatrixXd q = build_Q(a, dim, tol);
    std::lock_guard<std::mutex> lock(g_q_mutex);
    return g_q_cache.emplace(key, std::move(q)).first->second;
}

void clear_Q_cache() {
    std::lock_guard<std::mutex> lock(g_q_mutex);
    g_q_cache.clear();
}

Eigen::VectorXd build_D(int dim) {
    Eigen::VectorXd d = Eigen::VectorXd::Ones(dim);
    d[0] = -1.0;
    return d;
}

Eigen::VectorXd build_N(int dim) {
    Eigen::VectorXd n(dim);
    for (int k = 0; k < dim; ++k) n[k] = k;
    return n;
}

Eigen::VectorXd build_D_eta(double eta, int dim) {
    Eigen::VectorXd d(dim);
    d[0] = -1.0;
    for (int n = 1; n < dim; ++n) d[n] = 1.0 - 2.0 * std::pow(1.0 - eta, n);
    return d;
}

Eigen::VectorXd build_D_eta_delta(double eta, double delta, int dim) {
    Eigen::VectorXd d = build_D_eta(eta, dim);
    d[0] = 1.0 - 2.0 * delta;
    return d;
}

Eigen::MatrixXcd rotate_fock(const Eigen::MatrixXd& op, double theta) {
    int dim = static_cast<int>(op.rows());
    Eigen::VectorXcd ph(dim);
    for (int n = 0; n < dim; ++n)
        ph[n] = std::exp(std::complex<double>(0.0, n * theta));
    return ph.asDiagonal() * op.cast<std::complex<double>>() *
           ph.conjugate().asDiagonal();
}

Eigen::MatrixXcd build_rotated_Q(const Interval& a, double phase, int dim, double tol) {
    return rotate_fock(build_Q(a, dim, tol), phase);
}

namespace {

template <typename Mat>
Mat kron2(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

template <typename Mat>
Mat tensor_impl(const std::vector<Mat>& ops) {
    if (ops.empty()) throw DimensionMismatch("tensor of nothing");
    Mat acc = ops[0];
    for (size_t k = 1; k < ops.size(); ++k) acc = kron2(acc, ops[k]);
    return acc;
}

} // namespace

Eigen::MatrixXcd tensor(const std::vector<Eigen::MatrixXcd>& ops) {
    return tensor_impl(ops);
}

Eigen::MatrixXd tensor(const std::vector<Eigen::MatrixXd>& ops) {
    return tensor_impl(ops);
}

} // namespace hybell
