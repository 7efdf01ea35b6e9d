#include "hybell/bounds.hpp"

#include <cmath>
#include <random>

#include "hybell/errors.hpp"
#include "nm.hpp"

namespace hybell {

namespace {

// Pure two-qubit states up to local unitaries: cos(mu)|00> + sin(mu)|11>,
// measurements in the z-x plane (which is where the optimum lives). With
// k = sin(2 mu), E(a, b) = cos a cos b + k sin a sin b.
double corr(double k, double a, double b) {
    return std::cos(a) * std::cos(b) + k * std::sin(a) * std::sin(b);
}

double chsh_sum(double k, double a0, double a1, double b0, double b1) {
    return corr(k, a0, b0) + corr(k, a0, b1) + corr(k, a1, b0) - corr(k, a1, b1);
}

// Any pinned correlator reduces to pinning E00 with |S| unchanged:
//   (0,1): swap Bob's settings, flip A1.     E01 -> E00, S -> S, value c
//   (1,0): swap Alice's settings, flip B1.   E10 -> E00, S -> S, value c
//   (1,1): swap both parties' settings, flip the new A1 and B1 (S -> -S),
//          then flip Alice globally (S -> S, E00 -> -E00), value -c
double canonical_value(const CorrelatorConstraint& c) {
    if (c.i < 0 || c.i > 1 || c.j < 0 || c.j > 1)
        throw Error("constraint picks one of the four CHSH correlators");
    if (std::abs(c.value) > 1.0) throw Error("pinned correlator must be in [-1, 1]");
    return (c.i == 1 && c.j == 1) ? -c.value : c.value;
}

constexpr double kPenalty = 8.0;

// b0 eliminated exactly from E00 = c: E00 = R cos(b0 - psi) with
// R = hypot(cos a0, k sin a0), so b0 = psi +/- acos(c/R). When |c| > R the
// constraint is infeasible at this (k, a0) and the shortfall is penalized,
// which pushes the search onto the feasible set instead of walling it off
// (at |c| = 1 the feasible set has measure zero).
double eliminated_value(double c, double k, double a0, double a1, double b1,
                        int branch, double* b0_out = nullptr) {
    k = std::clamp(k, 0.0, 1.0);
    double r = std::hypot(std::cos(a0), k * std::sin(a0));
    double ratio = std::clamp(c / r, -1.0, 1.0);
    double psi = std::atan2(k * std::sin(a0), std::cos(a0));
    double b0 = psi + branch * std::acos(ratio);
    if (b0_out) *b0_out = b0;
    double s = std::abs(chsh_sum(k, a0, a1, b0, b1));
    double shortfall = std::max(0.0, std::abs(c) - r);
    return s - kPenalty * shortfall;
}

} // namespace

ConstrainedMax constrained_chsh_max(const CorrelatorConstraint& cons,
                                    const SolveConfig& cfg) {
    double c = canonical_value(cons);

    // Coarse scan directly on the constraint manifold (b0 eliminated), each
    // branch separately, so candidate ranking measures the attainable sum
    // rather than a penalty compromise. na is even so the Alice flip
    // a -> a + pi, which carries solutions for c onto solutions for -c,
    // stays on the lattice and both signs scan equally well. Several
    // candidates are refined because the landscape has mirror-image local
    // maxima.
    struct Cell {
        double v = -1e300;
        double k = 0.0, a0 = 0.0, a1 = 0.0, b1 = 0.0;
        int branch = +1;
    };
    const int nk = 11, na = 12, keep = 6;
    std::vector<Cell> top(2 * keep);
    for (int branch : {+1, -1}) {
        int base = branch > 0 ? 0 : keep;
        for (int ik = 0; ik < nk; ++ik) {
            double k = static_cast<double>(ik) / (nk - 1);
            for (int i0 = 0; i0 < na; ++i0)
                for (int i1 = 0; i1 < na; ++i1)
                    for (int j1 = 0; j1 < na; ++j1) {
                        double a0 = 2 * M_PI * i0 / na, a1 = 2 * M_PI * i1 / na;
                        double b1 = 2 * M_PI * j1 / na;
                        double v = eliminated_value(c, k, a0, a1, b1, branch);
                        if (v > top[base + keep - 1].v) {
                            top[base + keep - 1] = {v, k, a0, a1, b1, branch};
                            for (int s = base + keep - 1;
                                 s > base && top[s].v > top[s - 1].v; --s)
                                std::swap(top[s], top[s - 1]);
                        }
                    }
        }
    }

    ConstrainedMax out;
    double fopt = -1e300;
    for (const Cell& cell : top) {
        if (cell.v <= -1e300) continue;
        auto objective = [&](const Eigen::VectorXd& p) {
            return -eliminated_value(c, p[0], p[1], p[2], p[3], cell.branch);
        };
        Eigen::VectorXd p0(4);
        p0 << cell.k, cell.a0, cell.a1, cell.b1;
        double fb = 0.0;
        Eigen::VectorXd popt = detail::nelder_mead(objective, p0, 0.3, 1e-8, 600, &fb);
        if (-fb > fopt) {
            fopt = -fb;
            double b0 = 0.0;
            double v = eliminated_value(c, popt[0], popt[1], popt[2], popt[3],
                                        cell.branch, &b0);
            out.value = v;
            out.schmidt_angle = 0.5 * std::asin(std::clamp(popt[0], 0.0, 1.0));
            out.angles = {popt[1], popt[2], b0, popt[3]};
        }
    }
    return out;
}

std::vector<std::pair<double, double>>
constrained_chsh_curve(int grid_points, const SolveConfig& cfg) {
    if (grid_points < 2) throw Error("curve needs at least two points");
    std::vector<std::pair<double, double>> out;
    out.reserve(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        double c = -1.0 + 2.0 * i / (grid_points - 1);
        out.emplace_back(c, constrained_chsh_max({0, 0, c}, cfg).value);
    }
    return out;
}

double random_strategy_oracle(double c, int n_samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    double best = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        double k = unit(rng);
        double a0 = angle(rng), a1 = angle(rng), b1 = angle(rng);
        int branch = unit(rng) < 0.5 ? 1 : -1;
        double r = std::hypot(std::cos(a0), k * std::sin(a0));
        if (r < std::abs(c)) continue; // constraint infeasible at this draw
        double psi = std::atan2(k * std::sin(a0), std::cos(a0));
        double b0 = psi + branch * std::acos(std::clamp(c / r, -1.0, 1.0));
        best = std::max(best, std::abs(chsh_sum(k, a0, a1, b0, b1)));
    }
    return best;
}

double polished_oracle(double c, int n_samples, std::uint64_t seed,
                       const SolveConfig& cfg) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    double best = -1e300;
    Eigen::VectorXd bp(4);
    int bbranch = 1;
    for (int i = 0; i < n_samples; ++i) {
        double k = unit(rng);
        double a0 = angle(rng), a1 = angle(rng), b1 = angle(rng);
        int branch = unit(rng) < 0.5 ? 1 : -1;
        double v = eliminated_value(c, k, a0, a1, b1, branch);
        if (v > best) {
            best = v;
            bp << k, a0, a1, b1;
            bbranch = branch;
        }
    }
    auto objective = [&](const Eigen::VectorXd& p) {
        return -eliminated_value(c, p[0], p[1], p[2], p[3], bbranch);
    };
    double fb = 0.0;
    detail::nelder_mead(objective, bp, 0.1, 1e-8, 600, &fb);
    return std::max(best, -fb);
}

double dim3_spot_check(double c, std::uint64_t seed, const SolveConfig& cfg) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;

    // parameters: 9 state amplitudes + 4 symmetric 3x3 observables (6 each)
    const int np = 9 + 4 * 6;
    Eigen::VectorXd p(np);
    for (int i = 0; i < np; ++i) p[i] = gauss(rng);

    auto unpack_obs = [](const Eigen::VectorXd& v, int off) {
        Eigen::Matrix3d m;
        m << v[off + 0], v[off + 1], v[off + 2], v[off + 1], v[off + 3],
            v[off + 4], v[off + 2], v[off + 4], v[off + 5];
        // clamp the spectrum into [-1, 1] so the observable stays a valid
        // dichotomic-average measurement
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
        Eigen::Vector3d lam = es.eigenvalues().cwiseMax(-1.0).cwiseMin(1.0);
        return Eigen::Matrix3d(es.eigenvectors() * lam.asDiagonal() *
                               es.eigenvectors().transpose());
    };
    auto value = [&](const Eigen::VectorXd& v) {
        Eigen::Matrix3d psi;
        psi << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        double n = psi.norm();
        if (n < 1e-9) return -1e300;
        psi /= n;
        Eigen::Matrix3d a0 = unpack_obs(v, 9), a1 = unpack_obs(v, 15);
        Eigen::Matrix3d b0 = unpack_obs(v, 21), b1 = unpack_obs(v, 27);
        auto e = [&](const Eigen::Matrix3d& x, const Eigen::Matrix3d& y) {
            return psi.cwiseProduct(x * psi * y.transpose()).sum();
        };
        double s = e(a0, b0) + e(a0, b1) + e(a1, b0) - e(a1, b1);
        return std::abs(s) - kPenalty * std::abs(e(a0, b0) - c);
    };

    double fbest = value(p);
    double step = 0.5;
    Eigen::VectorXd trial(np);
    for (int it = 0; it < 6000; ++it) {
        for (int i = 0; i < np; ++i) trial[i] = p[i] + step * gauss(rng);
        double v = value(trial);
        if (v > fbest) {
            fbest = v;
            p = trial;
        }
        step *= 0.9995;
    }
    (void)cfg;
    return fbest;
}

} // namespace hybell
