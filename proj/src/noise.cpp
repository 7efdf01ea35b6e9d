#include "hybell/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "hybell/operators.hpp"
#include "hybell/quadrature.hpp"

namespace hybell {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// sqrt(C(n,k) t^{n-k} (1-t)^k) for n >= k, stable in logs.
double kraus_coeff(int k, int n, double t) {
    if (t == 0.0) return k == n ? 1.0 : 0.0;
    if (t == 1.0) return k == 0 ? 1.0 : 0.0;
    double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(0.5 * (lc + (n - k) * std::log(t) + k * std::log1p(-t)));
}

} // namespace

std::vector<MatrixXd> damping_kraus(double t, int dim) {
    if (t < 0.0 || t > 1.0) throw Error("damping needs t in [0, 1]");
    if (dim <= 0) throw DimensionMismatch("damping_kraus needs dim >= 1");
    std::vector<MatrixXd> f(dim, MatrixXd::Zero(dim, dim));
    for (int k = 0; k < dim; ++k)
        for (int n = k; n < dim; ++n) f[k](n - k, n) = kraus_coeff(k, n, t);
    return f;
}

MatrixXd pullback_mode(const MatrixXd& x, double t) {
    int dim = static_cast<int>(x.rows());
    if (x.cols() != dim) throw DimensionMismatch("pullback_mode needs a square input");
    if (t < 0.0 || t > 1.0) throw Error("pullback needs t in [0, 1]");
    if (t == 1.0) return x;
    MatrixXd out = MatrixXd::Zero(dim, dim);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            double s = 0.0;
            int kmax = std::min(m, n);
            for (int k = 0; k <= kmax; ++k)
                s += kraus_coeff(k, m, t) * kraus_coeff(k, n, t) * x(m - k, n - k);
            out(m, n) = s;
        }
    return out;
}

VectorXd pullback_mode_diag(const VectorXd& x, double t) {
    int dim = static_cast<int>(x.size());
    if (t < 0.0 || t > 1.0) throw Error("pullback needs t in [0, 1]");
    if (t == 1.0) return x;
    VectorXd out(dim);
    for (int m = 0; m < dim; ++m) {
        double s = 0.0;
        for (int k = 0; k <= m; ++k) {
            double c = kraus_coeff(k, m, t);
            s += c * c * x[m - k];
        }
        out[m] = s;
    }
    return out;
}

MatrixXd pullback(const MatrixXd& joint, int dimA, int dimB, double tA, double tB) {
    if (joint.rows() != static_cast<long>(dimA) * dimB || joint.rows() != joint.cols())
        throw DimensionMismatch("pullback: joint operator shape");
    std::vector<MatrixXd> fa = damping_kraus(tA, dimA);
    std::vector<MatrixXd> fb = damping_kraus(tB, dimB);
    MatrixXd out = MatrixXd::Zero(joint.rows(), joint.cols());
    for (const MatrixXd& ka : fa)
        for (const MatrixXd& kb : fb) {
            std::vector<MatrixXd> kk{ka, kb};
            MatrixXd k = tensor(kk);
            out += k.transpose() * joint * k;
        }
    return out;
}

JointOperator pullback(const JointOperator& b, double tA, double tB) {
    JointOperator out = b;
    out.A.Q = pullback_mode(b.A.Q, tA);
    out.A.D = pullback_mode_diag(b.A.D, tA);
    out.B.Q = pullback_mode(b.B.Q, tB);
    out.B.D = pullback_mode_diag(b.B.D, tB);
    return out;
}

PartyOps noisy_party_ops(const Interval& a, int dim, double eta, double delta,
                         double t, const SolveConfig& cfg) {
    PartyOps p;
    p.Q = pullback_mode(cached_Q(a, dim, cfg.quad_tol), t);
    p.D = pullback_mode_diag(build_D_eta_delta(eta, delta, dim), t);
    return p;
}

namespace {

// First parameter in [lo, hi] where the rising profile crosses 2, to width
// cfg.bisect_width. Every probe lands in trace; a decreasing pair there
// means the monotonicity assumption broke, which is a hard error.
double bisect_rising(const std::function<double(double)>& f, double lo, double hi,
                     double width, std::vector<std::pair<double, double>>& trace,
                     const char* what) {
    auto probe = [&](double p) {
        double v = f(p);
        trace.emplace_back(p, v);
        return v;
    };
    // require a real violation at the top of the range; norms that round to
    // 2 + 1e-16 (e.g. degenerate binnings) must not count as one.
    constexpr double kEdge = 2.0 + 1e-9;
    double fhi = probe(hi);
    if (!(fhi > kEdge)) {
        std::ostringstream msg;
        msg << what << ": no violation even at parameter " << hi << " (value " << fhi
            << ")";
        throw NoViolation(msg.str());
    }
    double flo = probe(lo);
    if (flo > kEdge) return lo;
    double a = lo, b = hi;
    while (b - a > width) {
        double mid = 0.5 * (a + b);
        if (probe(mid) > kEdge)
            b = mid;
        else
            a = mid;
    }
    // soundness of the bisection: the violating region must be an upper
    // interval of the trace.  Below threshold the raw norm may dip (eta = 0
    // turns the detector arm into a constant -1, which is classical but not
    // small), so the assert is on the crossing, not on raw values.
    auto sorted = trace;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i - 1].second > 2.0 + 1e-9 && sorted[i].second < 2.0 - 1e-9) {
            std::ostringstream msg;
            msg << what << ": violation is not an upper interval: value "
                << sorted[i - 1].second << " at " << sorted[i - 1].first
                << " falls back to " << sorted[i].second << " at "
                << sorted[i].first;
            throw Error(msg.str());
        }
    return 0.5 * (a + b);
}

MatrixXd embed_levels(const MatrixXd& sub_state, const std::vector<int>& levels,
                      int ambient) {
    MatrixXd w = MatrixXd::Zero(ambient, ambient);
    w(levels, levels) = sub_state;
    return w;
}

CriticalResult critical_compressed(const MatrixXd& qamb,
                                   const std::vector<int>& levels, const Interval& a,
                                   const SolveConfig& cfg, bool sweep_t,
                                   const char* what) {
    int ambient = static_cast<int>(qamb.rows());
    int sub = static_cast<int>(levels.size());
    VectorXd d0 = build_D(ambient);

    auto ops_at = [&](double p) -> JointOperator {
        MatrixXd q;
        VectorXd d;
        if (sweep_t) {
            q = pullback_mode(qamb, p);
            d = pullback_mode_diag(d0, p);
        } else {
            q = qamb;
            d = build_D_eta(p, ambient);
        }
        MatrixXd qsub = q(levels, levels);
        VectorXd dsub(sub);
        for (int i = 0; i < sub; ++i) dsub[i] = d[levels[i]];
        return assemble_chsh(qsub, dsub, qsub, dsub, a);
    };

    CriticalResult res;
    res.binning = a;
    auto value = [&](double p) { return chsh_norm(ops_at(p), cfg).value; };
    res.threshold =
        bisect_rising(value, 0.0, 1.0, cfg.bisect_width, res.trace, what);

    double wp = std::min(1.0, res.threshold + cfg.bisect_width);
    ViolationResult wit = chsh_norm(ops_at(wp), cfg);
    res.witness = embed_levels(wit.state, levels, ambient);
    JointOperator clean = assemble_chsh(qamb, d0, qamb, d0, a);
    res.witness_value = std::abs(expectation(res.witness, clean));
    return res;
}

} // namespace

CriticalResult critical_eta_for_Q(const MatrixXd& qamb, const std::vector<int>& levels,
                                  const Interval& a, const SolveConfig& cfg) {
    return critical_compressed(qamb, levels, a, cfg, false, "critical efficiency");
}

CriticalResult critical_t_for_Q(const MatrixXd& qamb, const std::vector<int>& levels,
                                const Interval& a, const SolveConfig& cfg) {
    return critical_compressed(qamb, levels, a, cfg, true, "critical transmission");
}

namespace {

std::vector<int> checked_levels(std::vector<int> levels) {
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.empty() || levels.front() < 0)
        throw DimensionMismatch("critical search: bad level set");
    return levels;
}

} // namespace

CriticalResult critical_eta(const Interval& a, const std::vector<int>& fock_levels,
                            const SolveConfig& cfg) {
    auto levels = checked_levels(fock_levels);
    int ambient = levels.back() + 1;
    return critical_eta_for_Q(cached_Q(a, ambient, cfg.quad_tol), levels, a, cfg);
}

CriticalResult critical_t(const Interval& a, const std::vector<int>& fock_levels,
                          const SolveConfig& cfg) {
    auto levels = checked_levels(fock_levels);
    int ambient = levels.back() + 1;
    return critical_t_for_Q(cached_Q(a, ambient, cfg.quad_tol), levels, a, cfg);
}

namespace {

// Shared driver for the fixed-state thresholds: expectation magnitude of the
// noisy combination as the parameter rises toward no noise.
template <typename Psi>
double state_threshold(const Psi& psi,
                       const std::function<JointOperator(double)>& ops_at,
                       const SolveConfig& cfg, const char* what) {
    std::vector<std::pair<double, double>> trace;
    auto value = [&](double p) { return std::abs(expectation(psi, ops_at(p))); };
    return bisect_rising(value, 0.0, 1.0, cfg.bisect_width, trace, what);
}

template <typename Psi>
JointOperator eta_ops(const Psi& psi, const Interval& a, double eta,
                      const SolveConfig& cfg) {
    int na = static_cast<int>(psi.rows()), nb = static_cast<int>(psi.cols());
    return assemble_chsh(cached_Q(a, na, cfg.quad_tol), build_D_eta(eta, na),
                         cached_Q(a, nb, cfg.quad_tol), build_D_eta(eta, nb), a);
}

template <typename Psi>
double critical_eta_of_state_impl(const Psi& psi, const Interval& a,
                                  const SolveConfig& cfg) {
    return state_threshold(
        psi, [&](double p) { return eta_ops(psi, a, p, cfg); }, cfg,
        "state critical efficiency");
}

template <typename Psi>
double critical_t_of_state_impl(const Psi& psi, const Interval& a,
                                const SolveConfig& cfg) {
    int na = static_cast<int>(psi.rows()), nb = static_cast<int>(psi.cols());
    auto ops_at = [&](double p) {
        PartyOps pa = noisy_party_ops(a, na, 1.0, 1.0, p, cfg);
        PartyOps pb = na == nb ? pa : noisy_party_ops(a, nb, 1.0, 1.0, p, cfg);
        return assemble_chsh(pa.Q, pa.D, pb.Q, pb.D, a);
    };
    return state_threshold(psi, ops_at, cfg, "state critical transmission");
}

} // namespace

double critical_eta_of_state(const MatrixXd& psi, const Interval& a,
                             const SolveConfig& cfg) {
    return critical_eta_of_state_impl(psi, a, cfg);
}

double critical_eta_of_state(const Eigen::MatrixXcd& psi, const Interval& a,
                             const SolveConfig& cfg) {
    return critical_eta_of_state_impl(psi, a, cfg);
}

namespace {

template <typename Psi>
std::pair<double, Interval>
critical_eta_best_impl(const Psi& psi, const std::vector<Interval>& candidates,
                       const SolveConfig& cfg) {
    double best = 2.0;
    Interval best_a;
    bool found = false;
    for (const Interval& a : candidates) {
        JointOperator clean = eta_ops(psi, a, 1.0, cfg);
        if (std::abs(expectation(psi, clean)) <= 2.0) continue;
        double eta = critical_eta_of_state_impl(psi, a, cfg);
        if (!found || eta < best - 1e-12 ||
            (eta < best + 1e-12 && a < best_a)) {
            best = eta;
            best_a = a;
            found = true;
        }
    }
    if (!found) throw NoViolation("state violates nowhere on the candidate list");
    return {best, best_a};
}

} // namespace

std::pair<double, Interval>
critical_eta_of_state_best(const MatrixXd& psi, const std::vector<Interval>& candidates,
                           const SolveConfig& cfg) {
    return critical_eta_best_impl(psi, candidates, cfg);
}

std::pair<double, Interval>
critical_eta_of_state_best(const Eigen::MatrixXcd& psi,
                           const std::vector<Interval>& candidates,
                           const SolveConfig& cfg) {
    return critical_eta_best_impl(psi, candidates, cfg);
}

double critical_delta_of_state(const MatrixXd& psi, const Interval& a, double eta,
                               const SolveConfig& cfg) {
    int na = static_cast<int>(psi.rows()), nb = static_cast<int>(psi.cols());
    auto ops_at = [&](double p) {
        return assemble_chsh(cached_Q(a, na, cfg.quad_tol),
                             build_D_eta_delta(eta, p, na),
                             cached_Q(a, nb, cfg.quad_tol),
                             build_D_eta_delta(eta, p, nb), a);
    };
    return state_threshold(psi, ops_at, cfg, "state critical vacuum confusion");
}

double critical_t_of_state(const MatrixXd& psi, const Interval& a,
                           const SolveConfig& cfg) {
    return critical_t_of_state_impl(psi, a, cfg);
}

double critical_t_of_state(const Eigen::MatrixXcd& psi, const Interval& a,
                           const SolveConfig& cfg) {
    return critical_t_of_state_impl(psi, a, cfg);
}

CriticalResult pi_family_critical_eta(const Interval& a, int dim,
                                      const SolveConfig& cfg) {
    XiState xi = xi_state(a, dim, cfg.quad_tol);
    VectorXd e0 = VectorXd::Zero(dim);
    e0[0] = 1.0;
    std::vector<MatrixXd> span;
    span.push_back(e0 * e0.transpose());
    span.push_back(e0 * xi.amps.transpose());
    span.push_back(xi.amps * e0.transpose());
    span.push_back(xi.amps * xi.amps.transpose());

    auto compressed_norm = [&](double eta, Eigen::Vector4d* vec) {
        JointOperator b = eta_ops(span[0], a, eta, cfg);
        Eigen::Matrix4d c = project_to_subspace(b, span);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(c);
        int pick = std::abs(es.eigenvalues()[0]) > std::abs(es.eigenvalues()[3]) ? 0 : 3;
        if (vec) *vec = es.eigenvectors().col(pick);
        return std::abs(es.eigenvalues()[pick]);
    };

    CriticalResult res;
    res.binning = a;
    res.threshold = bisect_rising([&](double p) { return compressed_norm(p, nullptr); },
                                  0.0, 1.0, cfg.bisect_width, res.trace,
                                  "maximal-family critical efficiency");
    Eigen::Vector4d v;
    compressed_norm(res.threshold + cfg.bisect_width, &v);
    res.witness = MatrixXd::Zero(dim, dim);
    for (int i = 0; i < 4; ++i) res.witness += v[i] * span[i];
    res.witness_value =
        std::abs(expectation(res.witness, eta_ops(span[0], a, 1.0, cfg)));
    return res;
}

namespace {

template <typename Psi>
std::vector<std::pair<double, double>>
violation_curve_impl(const Psi& psi, const Interval& a, SweepParam param,
                     int grid_points, const SolveConfig& cfg) {
    if (grid_points < 2) throw Error("violation_curve needs at least two points");
    int na = static_cast<int>(psi.rows()), nb = static_cast<int>(psi.cols());
    std::vector<std::pair<double, double>> out;
    out.reserve(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        double p = static_cast<double>(i) / (grid_points - 1);
        JointOperator b;
        if (param == SweepParam::Eta) {
            b = eta_ops(psi, a, p, cfg);
        } else {
            PartyOps pa = noisy_party_ops(a, na, 1.0, 1.0, p, cfg);
            PartyOps pb = na == nb ? pa : noisy_party_ops(a, nb, 1.0, 1.0, p, cfg);
            b = assemble_chsh(pa.Q, pa.D, pb.Q, pb.D, a);
        }
        out.emplace_back(p, std::abs(expectation(psi, b)));
    }
    return out;
}

} // namespace

std::vector<std::pair<double, double>>
violation_curve(const MatrixXd& psi, const Interval& a, SweepParam param,
                int grid_points, const SolveConfig& cfg) {
    return violation_curve_impl(psi, a, param, grid_points, cfg);
}

std::vector<std::pair<double, double>>
violation_curve(const Eigen::MatrixXcd& psi, const Interval& a, SweepParam param,
                int grid_points, const SolveConfig& cfg) {
    return violation_curve_impl(psi, a, param, grid_points, cfg);
}

} // namespace hybell
