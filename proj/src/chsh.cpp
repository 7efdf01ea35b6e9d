#include "hybell/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybell/noise.hpp"
#include "hybell/quadrature.hpp"
#include "nm.hpp"

namespace hybell {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

JointOperator assemble_chsh(const MatrixXd& qa, const VectorXd& da,
                            const MatrixXd& qb, const VectorXd& db,
                            const Interval& binning) {
    if (qa.rows() != qa.cols() || qb.rows() != qb.cols() ||
        qa.rows() != da.size() || qb.rows() != db.size())
        throw DimensionMismatch("assemble_chsh: party operator shapes disagree");
    JointOperator b;
    b.A = {qa, da};
    b.B = {qb, db};
    b.binning = binning;
    return b;
}

JointOperator assemble_chsh(const Interval& a, int dimA, int dimB,
                            const SolveConfig& cfg) {
    const MatrixXd& qa = cached_Q(a, dimA, cfg.quad_tol);
    const MatrixXd& qb = dimB == dimA ? qa : cached_Q(a, dimB, cfg.quad_tol);
    return assemble_chsh(qa, build_D(dimA), qb, build_D(dimB), a);
}

MatrixXd JointOperator::dense() const {
    MatrixXd da = A.D.asDiagonal();
    MatrixXd db = B.D.asDiagonal();
    std::vector<MatrixXd> t1{A.Q, B.Q + db};
    std::vector<MatrixXd> t2{da, B.Q - db};
    return tensor(t1) + tensor(t2);
}

double expectation(const MatrixXd& psi, const MatrixXd& x, const MatrixXd& y) {
    if (x.rows() != psi.rows() || y.rows() != psi.cols())
        throw DimensionMismatch("expectation: state and operator shapes disagree");
    return psi.cwiseProduct(x * psi * y.transpose()).sum();
}

double expectation(const MatrixXd& psi, const JointOperator& b) {
    if (b.dimA() != psi.rows() || b.dimB() != psi.cols())
        throw DimensionMismatch("expectation: state and operator shapes disagree");
    MatrixXd vd = psi * b.B.D.asDiagonal();
    MatrixXd vq = psi * b.B.Q;
    return psi.cwiseProduct(b.A.Q * (vq + vd) +
                            b.A.D.asDiagonal() * (vq - vd))
        .sum();
}

double expectation(const Eigen::MatrixXcd& psi, const JointOperator& b) {
    return expectation(MatrixXd(psi.real()), b) + expectation(MatrixXd(psi.imag()), b);
}

namespace {

ViolationResult package(const JointOperator& b, double signed_value,
                        const VectorXd& vec, int iterations) {
    ViolationResult r;
    r.value = std::abs(signed_value);
    r.signed_value = signed_value;
    r.binning = b.binning;
    r.iterations = iterations;
    r.state = Eigen::Map<const RowMat>(vec.data(), b.dimA(), b.dimB());
    if (!b.binning.is_empty() && !b.binning.is_full_line())
        r.theta = theta_of_binning(b.binning);
    return r;
}

ViolationResult chsh_norm_impl(const JointOperator& b, const SolveConfig& cfg,
                               const VectorXd* start) {
    long n = static_cast<long>(b.dimA()) * b.dimB();
    if (n <= cfg.dense_max) {
        ExtremalPair ep = dense_extremal(b.dense());
        return package(b, ep.signed_value, ep.vector, 0);
    }
    MatrixXd qbp = b.B.Q + MatrixXd(b.B.D.asDiagonal());
    VectorXd db2 = 2.0 * b.B.D;
    int na = b.dimA(), nb = b.dimB();
    auto apply = [&](const VectorXd& v, VectorXd& out) {
        Eigen::Map<const RowMat> vm(v.data(), na, nb);
        Eigen::Map<RowMat> om(out.data(), na, nb);
        MatrixXd x1 = vm * qbp;
        MatrixXd x2 = x1 - vm * db2.asDiagonal();
        om = b.A.Q * x1 + b.A.D.asDiagonal() * x2;
    };
    ExtremalPair ep = lanczos_extremal(apply, static_cast<int>(n), cfg, start);
    return package(b, ep.signed_value, ep.vector, ep.iterations);
}

VectorXd flatten_state(const MatrixXd& state) {
    RowMat tmp = state;
    return Eigen::Map<const VectorXd>(tmp.data(), tmp.size());
}

} // namespace

ViolationResult chsh_norm(const JointOperator& b, const SolveConfig& cfg) {
    return chsh_norm_impl(b, cfg, nullptr);
}

XiState xi_state(const Interval& a, int dim, double tol) {
    double th = theta_of_binning(a);
    double s = std::sin(th);
    MatrixXd g = overlap_matrix(a, dim, tol);
    VectorXd amps = VectorXd::Zero(dim);
    for (int n = 1; n < dim; ++n) amps[n] = 2.0 * g(0, n) / s;
    XiState xi;
    xi.truncated_weight = amps.squaredNorm();
    if (xi.truncated_weight < 1e-300)
        throw DegenerateBinning("tail state vanishes for " + to_string(a));
    xi.amps = amps / std::sqrt(xi.truncated_weight);
    return xi;
}

PiStates pi_states(const Interval& a, int dim, double tol) {
    double th = theta_of_binning(a);
    if (std::abs(th - M_PI / 2) > 1e-6) {
        std::ostringstream msg;
        msg << "maximal pair needs vacuum weight 1/2, but " << to_string(a)
            << " has theta " << th;
        throw DegenerateBinning(msg.str());
    }
    XiState xi = xi_state(a, dim, tol);
    VectorXd e0 = VectorXd::Zero(dim);
    e0[0] = 1.0;
    const double rt2 = std::sqrt(2.0);
    MatrixXd psi_plus = (xi.amps * e0.transpose() + e0 * xi.amps.transpose()) / rt2;
    MatrixXd phi_minus = (e0 * e0.transpose() - xi.amps * xi.amps.transpose()) / rt2;
    double cp = std::sqrt(2.0 + rt2) / 2.0, cm = std::sqrt(2.0 - rt2) / 2.0;
    PiStates out;
    out.plus = cp * psi_plus - cm * phi_minus;
    out.minus = cm * psi_plus + cp * phi_minus;
    return out;
}

Eigen::MatrixXd project_to_subspace(const JointOperator& b,
                                    const std::vector<MatrixXd>& span) {
    int m = static_cast<int>(span.size());
    if (m == 0) throw DimensionMismatch("project_to_subspace: empty span");
    std::vector<MatrixXd> image(m);
    for (int j = 0; j < m; ++j) {
        const MatrixXd& p = span[j];
        if (p.rows() != b.dimA() || p.cols() != b.dimB())
            throw DimensionMismatch("project_to_subspace: span state shape");
        MatrixXd vd = p * b.B.D.asDiagonal();
        MatrixXd vq = p * b.B.Q;
        image[j] = b.A.Q * (vq + vd) + b.A.D.asDiagonal() * (vq - vd);
    }
    MatrixXd gram(m, m), h(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            gram(i, j) = span[i].cwiseProduct(span[j]).sum();
            h(i, j) = span[i].cwiseProduct(image[j]).sum();
        }
    Eigen::LLT<MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error("project_to_subspace: span is numerically dependent");
    MatrixXd l = llt.matrixL();
    MatrixXd y = l.triangularView<Eigen::Lower>().solve(h);
    MatrixXd c = l.triangularView<Eigen::Lower>().solve(y.transpose()).transpose();
    return 0.5 * (c + c.transpose());
}

JointOperator project_to_subspace(const JointOperator& b,
                                  const std::vector<int>& fock_levels) {
    int m = static_cast<int>(fock_levels.size());
    if (m == 0) throw DimensionMismatch("project_to_subspace: no levels");
    for (int l : fock_levels)
        if (l < 0 || l >= b.dimA() || l >= b.dimB())
            throw DimensionMismatch("project_to_subspace: level out of range");
    MatrixXd qa = b.A.Q(fock_levels, fock_levels);
    MatrixXd qb = b.B.Q(fock_levels, fock_levels);
    VectorXd da(m), db(m);
    for (int i = 0; i < m; ++i) {
        da[i] = b.A.D[fock_levels[i]];
        db[i] = b.B.D[fock_levels[i]];
    }
    return assemble_chsh(qa, da, qb, db, b.binning);
}

namespace {

struct Candidate {
    double score = -1e300; // larger is better
    Interval a;
    MatrixXd state;
};

bool better(const Candidate& x, const Candidate& y) {
    if (x.score > y.score + 1e-12) return true;
    if (y.score > x.score + 1e-12) return false;
    return x.a < y.a;
}

} // namespace

OptimizeResult optimize_binning(const std::vector<int>& fock_levels, Objective obj,
                                const SolveConfig& cfg) {
    std::vector<int> levels = fock_levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.empty() || levels.front() < 0)
        throw DimensionMismatch("optimize_binning: bad level set");
    int ambient = levels.back() + 1;
    int sub = static_cast<int>(levels.size());
    long joint = static_cast<long>(sub) * sub;

    LatticeOverlaps lattice(cfg.grid_step, cfg.grid_lim, ambient, cfg.quad_tol);
    VectorXd dsub(sub);
    for (int i = 0; i < sub; ++i) dsub[i] = levels[i] == 0 ? -1.0 : 1.0;

    VectorXd warm;
    auto sub_norm = [&](const Interval& a, bool tight) {
        MatrixXd g = lattice.overlap(a);
        MatrixXd qsub =
            2.0 * MatrixXd(g(levels, levels)) - MatrixXd::Identity(sub, sub);
        JointOperator b = assemble_chsh(qsub, dsub, qsub, dsub, a);
        SolveConfig c = cfg;
        if (!tight) c.iter_tol = std::max(cfg.iter_tol, 1e-7);
        const VectorXd* start = warm.size() == joint ? &warm : nullptr;
        ViolationResult r = chsh_norm_impl(b, c, start);
        if (joint > cfg.dense_max) warm = flatten_state(r.state);
        return r;
    };

    // score: larger is better for every objective
    auto eval_cell = [&](const Interval& a, bool tight) -> Candidate {
        Candidate c;
        c.a = a;
        switch (obj) {
            case Objective::MaxViolation: {
                ViolationResult r = sub_norm(a, tight);
                c.score = r.value;
                c.state = r.state;
                break;
            }
            case Objective::MinEta:
            case Objective::MinT: {
                MatrixXd g = lattice.overlap(a);
                MatrixXd qamb = 2.0 * g - MatrixXd::Identity(ambient, ambient);
                try {
                    CriticalResult cr = obj == Objective::MinEta
                                            ? critical_eta_for_Q(qamb, levels, a, cfg)
                                            : critical_t_for_Q(qamb, levels, a, cfg);
                    c.score = -cr.threshold;
                    c.state = cr.witness;
                } catch (const NoViolation&) {
                    c.score = -1e300;
                }
                break;
            }
        }
        return c;
    };

    std::vector<Interval> grid = interval_grid(cfg.grid_step, cfg.grid_lim);
    std::stable_sort(grid.begin(), grid.end(), [](const Interval& x, const Interval& y) {
        double bx = analytic_norm(x), by = analytic_norm(y);
        if (bx != by) return bx > by;
        return x < y;
    });

    std::vector<Candidate> top;
    auto consider = [&](Candidate&& c) {
        if (c.score <= -1e299) return;
        top.push_back(std::move(c));
        std::sort(top.begin(), top.end(), better);
        if (top.size() > 5) top.resize(5);
    };

    for (const Interval& a : grid) {
        if (obj == Objective::MaxViolation && !top.empty() &&
            analytic_norm(a) <= top.front().score)
            break; // grid is sorted by the ceiling, nothing later can win
        consider(eval_cell(a, false));
    }
    if (top.empty()) throw NoViolation("no binning on the grid yields a violation");

    // local refinement from the leading cells
    int starts = joint > 4096 ? 3 : 5;
    std::vector<Candidate> refined = top;
    for (int s = 0; s < starts && s < static_cast<int>(top.size()); ++s) {
        const Interval a0 = top[s].a;
        if (a0.is_full_line()) continue;
        // keep refined endpoints inside the search box; letting them run off
        // (e.g. lo -> -6) just mimics the half-line cells that are already
        // on the grid.
        const double box = cfg.grid_lim + cfg.grid_step;
        auto objective = [&](const VectorXd& p) -> double {
            Interval a = a0;
            int k = 0;
            if (!a.lo_infinite()) a.lo = p[k++];
            if (!a.hi_infinite()) a.hi = p[k++];
            if (!(a.lo < a.hi)) return 1e300;
            if (std::max(std::abs(a.lo_infinite() ? 0.0 : a.lo),
                         std::abs(a.hi_infinite() ? 0.0 : a.hi)) > box)
                return 1e300;
            Candidate c = eval_cell(a, false);
            return -c.score;
        };
        int npar = (a0.lo_infinite() ? 0 : 1) + (a0.hi_infinite() ? 0 : 1);
        VectorXd p0(npar);
        int k = 0;
        if (!a0.lo_infinite()) p0[k++] = a0.lo;
        if (!a0.hi_infinite()) p0[k++] = a0.hi;
        double fbest = 0.0;
        VectorXd popt = detail::nelder_mead(objective, p0, cfg.grid_step,
                                            cfg.refine_res, 200, &fbest);
        Interval aopt = a0;
        k = 0;
        if (!aopt.lo_infinite()) aopt.lo = popt[k++];
        if (!aopt.hi_infinite()) aopt.hi = popt[k++];
        if (aopt.lo < aopt.hi) refined.push_back(eval_cell(aopt, false));
    }
    std::sort(refined.begin(), refined.end(), better);

    // clean final evaluation at the winner, tight tolerance, fresh start
    const Interval winner = refined.front().a;
    warm.resize(0);
    Candidate fin = eval_cell(winner, true);
    ViolationResult noiseless = sub_norm(winner, true);

    OptimizeResult out;
    out.binning = winner;
    out.norm = noiseless.value;
    out.state = obj == Objective::MaxViolation ? noiseless.state : fin.state;
    out.objective_value = obj == Objective::MaxViolation ? fin.score : -fin.score;
    return out;
}

} // namespace hybell
