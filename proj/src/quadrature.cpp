#include "hybell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace hybell {

namespace {

// Legendre P_n(x) and derivative via the standard recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

GLRule make_gauss_legendre(int order) {
    GLRule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    for (int i = 0; i < order / 2 + order % 2; ++i) {
        // Chebyshev-like initial guess, then Newton.
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre(order, x);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        auto [p, dp] = legendre(order, x);
        (void)p;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.weights[i] = w;
        r.nodes[order - 1 - i] = x;
        r.weights[order - 1 - i] = w;
    }
    return r;
}

std::mutex g_rule_mutex;
std::map<int, GLRule> g_rules;

double tail_cutoff(int nmax) { return std::sqrt(2.0 * std::max(nmax, 1)) + 10.0; }

} // namespace

const GLRule& gauss_legendre(int order) {
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = g_rules.find(order);
    if (it == g_rules.end()) it = g_rules.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

Eigen::VectorXd phi_values(int nmax, double x) {
    Eigen::VectorXd v(nmax + 1);
    v[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (nmax >= 1) v[1] = x * std::sqrt(2.0) * v[0];
    for (int n = 1; n < nmax; ++n)
        v[n + 1] = x * std::sqrt(2.0 / (n + 1)) * v[n] -
                   std::sqrt(double(n) / (n + 1)) * v[n - 1];
    return v;
}

double phi(int n, double x) { return phi_values(n, x)[n]; }

std::vector<double> hermite_roots(int n) {
    if (n <= 0) return {};
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

// Accumulate integral over [lo, hi] of phi phi^T into g, splitting into
// ceil(len / maxlen) * 2^level equal GL32 panels.
void accumulate_panels(Eigen::MatrixXd& g, int nmax, double lo, double hi,
                       double maxlen, int level) {
    const GLRule& rule = gauss_legendre(32);
    double len = hi - lo;
    if (len <= 0) return;
    long base = std::max<long>(1, static_cast<long>(std::ceil(len / maxlen)));
    long parts = base << level;
    double h = len / parts;
    for (long p = 0; p < parts; ++p) {
        double a = lo + p * h;
        double mid = a + 0.5 * h, half = 0.5 * h;
        for (int q = 0; q < 32; ++q) {
            double x = mid + half * rule.nodes[q];
            Eigen::VectorXd ph = phi_values(nmax, x);
            g.selfadjointView<Eigen::Upper>().rankUpdate(ph, half * rule.weights[q]);
        }
    }
}

Eigen::MatrixXd integrate_refined(int nmax, double lo, double hi, double tol,
                                  const char* what) {
    int dim = nmax + 1;
    double maxlen = dim > 64 ? 0.25 : (dim > 16 ? 0.5 : 1.0);
    Eigen::MatrixXd prev = Eigen::MatrixXd::Zero(dim, dim);
    accumulate_panels(prev, nmax, lo, hi, maxlen, 0);
    for (int level = 1; level <= 6; ++level) {
        Eigen::MatrixXd cur = Eigen::MatrixXd::Zero(dim, dim);
        accumulate_panels(cur, nmax, lo, hi, maxlen, level);
        // rankUpdate fills the upper triangle only; the lower stays zero in
        // both, so the plain elementwise max is the upper-triangle max.
        double diff = (cur - prev).cwiseAbs().maxCoeff();
        if (diff < tol)
            return cur.selfadjointView<Eigen::Upper>().toDenseMatrix();
        prev.swap(cur);
    }
    std::ostringstream msg;
    msg << what << " did not settle to " << tol << " on [" << lo << ", " << hi
        << "] at refinement level 6";
    throw QuadratureError(msg.str());
}

} // namespace

Eigen::MatrixXd overlap_matrix(const Interval& a, int dim, double tol) {
    if (dim <= 0) throw DimensionMismatch("overlap_matrix needs dim >= 1");
    if (a.is_empty()) return Eigen::MatrixXd::Zero(dim, dim);
    validate(a);
    int nmax = dim - 1;
    double t = tail_cutoff(nmax);
    double lo = std::max(a.lo, -t), hi = std::min(a.hi, t);
    if (lo >= hi) return Eigen::MatrixXd::Zero(dim, dim);
    return integrate_refined(nmax, lo, hi, tol, "overlap matrix");
}

double overlap_integral(int m, int n, const Interval& a, double tol) {
    int nmax = std::max(m, n);
    return overlap_matrix(a, nmax + 1, tol)(m, n);
}

double abs_overlap_integral(int m, int n, double tol) {
    int nmax = std::max({m, n, 0});
    double t = tail_cutoff(nmax);
    std::vector<double> cuts{-t, t};
    for (double r : hermite_roots(m)) cuts.push_back(r);
    for (double r : hermite_roots(n)) cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    const GLRule& rule = gauss_legendre(32);
    auto segment = [&](double a, double b, int level) {
        // phi_m phi_n has constant sign between consecutive sign changes, so
        // per-segment |integral| equals the integral of the absolute value.
        long parts = std::max<long>(1, static_cast<long>(std::ceil((b - a) / 1.0)))
                     << level;
        double h = (b - a) / parts, s = 0.0;
        for (long p = 0; p < parts; ++p) {
            double mid = a + (p + 0.5) * h, half = 0.5 * h;
            for (int q = 0; q < 32; ++q) {
                double x = mid + half * rule.nodes[q];
                Eigen::VectorXd ph = phi_values(nmax, x);
                s += half * rule.weights[q] * ph[m] * ph[n];
            }
        }
        return std::abs(s);
    };
    double prev = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) prev += segment(cuts[i], cuts[i + 1], 0);
    for (int level = 1; level <= 6; ++level) {
        double cur = 0.0;
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            cur += segment(cuts[i], cuts[i + 1], level);
        if (std::abs(cur - prev) < tol) return cur;
        prev = cur;
    }
    std::ostringstream msg;
    msg << "absolute overlap (" << m << ", " << n << ") did not settle to " << tol;
    throw QuadratureError(msg.str());
}

LatticeOverlaps::LatticeOverlaps(double step, double lim, int dim, double tol)
    : step_(step), lim_(lim), tol_(tol), dim_(dim) {
    if (dim <= 0) throw DimensionMismatch("LatticeOverlaps needs dim >= 1");
    int nmax = dim - 1;
    double t = tail_cutoff(nmax);
    int n = static_cast<int>(std::llround(lim / step));
    int points = 2 * n + 1;
    prefix_.resize(points);
    // One sweep over (-t, t): prefix over the left tail, then cell by cell.
    Eigen::MatrixXd acc = integrate_refined(nmax, -t, -lim, tol, "lattice tail");
    prefix_[0] = acc;
    for (int i = 1; i < points; ++i) {
        double a = -lim + (i - 1) * step, b = -lim + i * step;
        acc += integrate_refined(nmax, a, b, tol, "lattice cell");
        prefix_[i] = acc;
    }
    total_ = acc + integrate_refined(nmax, lim, t, tol, "lattice tail");
}

bool LatticeOverlaps::lattice_index(double x, int& idx) const {
    double rel = (x + lim_) / step_;
    double r = std::round(rel);
    if (std::abs(rel - r) > 1e-9) return false;
    int i = static_cast<int>(r);
    if (i < 0 || i >= static_cast<int>(prefix_.size())) return false;
    idx = i;
    return true;
}

Eigen::MatrixXd LatticeOverlaps::overlap(const Interval& a) const {
    if (a.is_empty()) return Eigen::MatrixXd::Zero(dim_, dim_);
    validate(a);
    auto prefix_of = [&](double x, Eigen::MatrixXd& out) {
        if (x == -kInf) {
            out = Eigen::MatrixXd::Zero(dim_, dim_);
            return true;
        }
        if (x == kInf) {
            out = total_;
            return true;
        }
        int idx;
        if (!lattice_index(x, idx)) return false;
        out = prefix_[idx];
        return true;
    };
    Eigen::MatrixXd plo, phi_;
    if (prefix_of(a.lo, plo) && prefix_of(a.hi, phi_)) return phi_ - plo;
    return overlap_matrix(a, dim_, tol_);
}

} // namespace hybell
