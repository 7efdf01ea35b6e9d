#include "hybell/states.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hybell/operators.hpp"
#include "hybell/quadrature.hpp"
#include "nm.hpp"

#ifndef HYBELL_FIXTURE_DIR
#define HYBELL_FIXTURE_DIR "fixtures"
#endif

namespace hybell {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXd noon_state(int n, int dim) {
    if (n < 1) throw DimensionMismatch("noon_state needs n >= 1");
    if (dim < 0) dim = n + 1;
    if (dim < n + 1) throw DimensionMismatch("noon_state: dim too small for n");
    MatrixXd psi = MatrixXd::Zero(dim, dim);
    psi(n, 0) = psi(0, n) = 1.0 / std::sqrt(2.0);
    return psi;
}

double noon_chsh_value(int n, const Interval& a, double tol) {
    MatrixXd g = overlap_matrix(a, n + 1, tol);
    return 2.0 + 4.0 * g(0, n) * g(0, n) - 4.0 * g(n, n) * (1.0 - g(0, 0));
}

NoonBounds noon_upper_bound(int n, double tol) {
    double i0n = abs_overlap_integral(0, n, tol);
    NoonBounds b;
    b.standard = 2.0 + i0n * i0n;
    b.odd_tightened = n % 2 == 1 ? 1.0 + i0n * i0n : b.standard;
    return b;
}

std::pair<double, Interval> noon_best(int n, const SolveConfig& cfg) {
    LatticeOverlaps lattice(cfg.grid_step, cfg.grid_lim, n + 1, cfg.quad_tol);
    auto value = [&](const Interval& a) {
        MatrixXd g = lattice.overlap(a);
        return 2.0 + 4.0 * g(0, n) * g(0, n) - 4.0 * g(n, n) * (1.0 - g(0, 0));
    };
    double best = -1e300;
    Interval best_a;
    for (const Interval& a : interval_grid(cfg.grid_step, cfg.grid_lim)) {
        double v = value(a);
        if (v > best + 1e-12 || (v > best - 1e-12 && a < best_a)) {
            best = v;
            best_a = a;
        }
    }
    if (!best_a.is_full_line() && !best_a.is_empty()) {
        auto objective = [&](const VectorXd& p) {
            Interval a = best_a;
            int k = 0;
            if (!a.lo_infinite()) a.lo = p[k++];
            if (!a.hi_infinite()) a.hi = p[k++];
            if (!(a.lo < a.hi)) return 1e300;
            return -value(a);
        };
        int npar = (best_a.lo_infinite() ? 0 : 1) + (best_a.hi_infinite() ? 0 : 1);
        VectorXd p0(npar);
        int k = 0;
        if (!best_a.lo_infinite()) p0[k++] = best_a.lo;
        if (!best_a.hi_infinite()) p0[k++] = best_a.hi;
        double fref = 0.0;
        VectorXd popt = detail::nelder_mead(objective, p0, cfg.grid_step,
                                            cfg.refine_res, 200, &fref);
        if (-fref > best) {
            best = -fref;
            k = 0;
            if (!best_a.lo_infinite()) best_a.lo = popt[k++];
            if (!best_a.hi_infinite()) best_a.hi = popt[k++];
        }
    }
    return {best, best_a};
}

namespace {

// Smallest truncation keeping the dropped coherent weight below 1e-8.
int coherent_dim(std::complex<double> alpha) {
    double lam = std::norm(alpha);
    double term = std::exp(-lam), cum = term;
    int n = 0;
    while (1.0 - cum > 1e-8 && n < 400) {
        ++n;
        term *= lam / n;
        cum += term;
    }
    return n + 3;
}

} // namespace

VectorXcd cat_state(std::complex<double> alpha, int parity, int dim) {
    if (parity != 1 && parity != -1) throw Error("cat_state parity must be +1 or -1");
    int need = coherent_dim(alpha);
    if (dim < 0) dim = need;
    if (dim < need) {
        std::ostringstream msg;
        msg << "cat_state: dim " << dim << " drops more than 1e-8 of |alpha|^2 = "
            << std::norm(alpha) << ", need " << need;
        throw Error(msg.str());
    }
    VectorXcd amps = VectorXcd::Zero(dim);
    std::complex<double> an(1.0, 0.0);
    double lfac = 0.0;
    for (int n = 0; n < dim; ++n) {
        if (n > 0) {
            an *= alpha;
            lfac += std::log(static_cast<double>(n));
        }
        double sign = n % 2 == 0 ? 1.0 : -1.0;
        amps[n] = (an + static_cast<double>(parity) * sign * an) * std::exp(-0.5 * lfac);
    }
    double norm = amps.norm();
    if (norm < 1e-12) throw Error("cat_state vanishes (odd cat at alpha = 0)");
    amps /= norm;
    // canonical global phase: first non-negligible amplitude real positive
    for (int n = 0; n < dim; ++n) {
        if (std::abs(amps[n]) > 1e-12) {
            amps *= std::conj(amps[n]) / std::abs(amps[n]);
            break;
        }
    }
    return amps;
}

MatrixXcd gamma_state(const GammaParams& p, int dim) {
    VectorXcd cat = cat_state(p.alpha, p.parity, dim);
    int d = static_cast<int>(cat.size());
    VectorXcd e0 = VectorXcd::Zero(d);
    e0[0] = 1.0;
    const double rt2 = std::sqrt(2.0);
    double c = std::cos(p.theta), s = std::sin(p.theta);
    MatrixXcd psi = c / rt2 * (cat * e0.transpose() + e0 * cat.transpose()) +
                    s / rt2 * (e0 * e0.transpose() - cat * cat.transpose());
    double norm = std::sqrt(psi.cwiseAbs2().sum());
    if (norm < 1e-12) throw Error("gamma_state vanishes at these parameters");
    return psi / norm;
}

GammaOpt optimize_gamma(const GammaParams& start, const SolveConfig& cfg) {
    Interval bin = start.parity == 1 ? symmetric_half_weight_bin() : Interval{0.0, kInf};
    double mag0 = std::abs(start.alpha);
    std::complex<double> dir =
        mag0 > 0 ? start.alpha / mag0 : std::complex<double>(0.0, 1.0);

    auto value = [&](double theta, double mag) {
        GammaParams p{theta, dir * mag, start.parity};
        MatrixXcd psi = gamma_state(p, -1);
        int d = static_cast<int>(psi.rows());
        JointOperator b = assemble_chsh(bin, d, d, cfg);
        return std::abs(expectation(psi, b));
    };

    auto objective = [&](const VectorXd& p) {
        if (p[1] <= 0.05) return 1e300;
        return -value(p[0], p[1]);
    };
    VectorXd p0(2);
    p0[0] = start.theta;
    p0[1] = std::max(mag0, 0.1);
    double fbest = 0.0;
    VectorXd popt =
        detail::nelder_mead(objective, p0, 0.05, 1e-5, 400, &fbest);

    GammaOpt out;
    out.params = GammaParams{popt[0], dir * popt[1], start.parity};
    out.value = -fbest;
    out.binning = bin;
    return out;
}

std::string fixture_dir() {
    if (const char* env = std::getenv("HYBELL_FIXTURE_DIR")) return env;
    return HYBELL_FIXTURE_DIR;
}

LoadedState load_fixture(const std::string& name) {
    std::string path = name;
    if (name.find('/') == std::string::npos && name.find(".txt") == std::string::npos)
        path = fixture_dir() + "/" + name + ".txt";
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open state file " + path);

    std::vector<std::tuple<int, int, double, double>> entries;
    int max_a = 0, max_b = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream iss(line);
        int na, nb;
        double re, im;
        if (!(iss >> na)) continue; // blank or comment-only line
        if (!(iss >> nb >> re >> im) || na < 0 || nb < 0) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": expected 'nA nB re im'";
            throw FixtureError(msg.str());
        }
        entries.emplace_back(na, nb, re, im);
        max_a = std::max(max_a, na);
        max_b = std::max(max_b, nb);
    }
    if (entries.empty()) throw FixtureError(path + " holds no amplitudes");

    MatrixXcd amps = MatrixXcd::Zero(max_a + 1, max_b + 1);
    for (auto& [na, nb, re, im] : entries) amps(na, nb) += std::complex<double>(re, im);

    if (amps.imag().cwiseAbs().maxCoeff() > 0.0)
        throw FixtureError(path + ": complex amplitudes are not supported here");

    LoadedState out;
    out.raw_norm = std::sqrt(amps.cwiseAbs2().sum());
    if (std::abs(out.raw_norm - 1.0) > 0.05) {
        std::ostringstream msg;
        msg << path << ": norm " << out.raw_norm << " is too far from 1 to be a "
            << "rounded state; refusing";
        throw FixtureError(msg.str());
    }
    out.amps = amps.real() / out.raw_norm;
    return out;
}

PhotonNumbers mean_photon_number(const MatrixXd& psi) {
    PhotonNumbers p;
    for (int i = 0; i < psi.rows(); ++i) p.mode_a += i * psi.row(i).squaredNorm();
    for (int j = 0; j < psi.cols(); ++j) p.mode_b += j * psi.col(j).squaredNorm();
    return p;
}

PhotonNumbers mean_photon_number(const MatrixXcd& psi) {
    PhotonNumbers p;
    for (int i = 0; i < psi.rows(); ++i) p.mode_a += i * psi.row(i).squaredNorm();
    for (int j = 0; j < psi.cols(); ++j) p.mode_b += j * psi.col(j).squaredNorm();
    return p;
}

} // namespace hybell
