#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "hybell/binning.hpp"
#include "hybell/chsh.hpp"
#include "hybell/config.hpp"

namespace hybell {

// Two-mode pure states are carried as dimA x dimB amplitude matrices
// throughout; these builders return them unit-normalized. Complex-amplitude
// states keep a complex matrix until the observables fix a real section.

// (|n 0> + |0 n>) / sqrt(2)
Eigen::MatrixXd noon_state(int n, int dim = -1);

// CHSH value of the n-photon noon state at binning a in closed form:
// 2 + 4 G(0,n)^2 - 4 G(n,n) (1 - G(0,0)).
double noon_chsh_value(int n, const Interval& a, double tol = 1e-11);

// Binning-independent ceilings 2 + (integral |phi_0 phi_n|)^2; odd n
// tightens to 1 + (.)^2.
struct NoonBounds {
    double standard = 0.0;
    double odd_tightened = 0.0;
};
NoonBounds noon_upper_bound(int n, double tol = 1e-11);

// Max of noon_chsh_value over the standard interval grid plus half-lines,
// refined locally. Returns the value and the bin.
std::pair<double, Interval> noon_best(int n, const SolveConfig& cfg = {});

// Normalized (|alpha> + parity |-alpha>), global phase fixed so the first
// amplitude above 1e-12 is real positive. dim = -1 sizes the truncation
// automatically from the coherent tail (< 1e-8 weight dropped).
Eigen::VectorXcd cat_state(std::complex<double> alpha, int parity, int dim = -1);

struct GammaParams {
    double theta = 0.0;
    std::complex<double> alpha;
    int parity = +1;
};

// cos(theta)(|cat,0> + |0,cat>)/sqrt(2) + sin(theta)(|00> - |cat,cat>),
// renormalized.
Eigen::MatrixXcd gamma_state(const GammaParams& p, int dim = -1);

// Best gamma-state violation near a starting parameter pair, optimizing
// (theta, |alpha|) with the binning held at the vacuum-weight-1/2 canonical
// bin for even parity and the positive half-line for odd.
struct GammaOpt {
    GammaParams params;
    double value = 0.0;
    Interval binning;
};
GammaOpt optimize_gamma(const GammaParams& start, const SolveConfig& cfg = {});

// Two-mode state files: lines "nA nB re im", '#' comments. States are
// renormalized on load; factor is reported, and a squared-norm more than
// 0.05 away from 1 throws FixtureError.
struct LoadedState {
    Eigen::MatrixXd amps;
    double raw_norm = 0.0;
};
LoadedState load_fixture(const std::string& name);
std::string fixture_dir();

// Per-mode and total <n>.
struct PhotonNumbers {
    double mode_a = 0.0;
    double mode_b = 0.0;
    double total() const { return mode_a + mode_b; }
};
PhotonNumbers mean_photon_number(const Eigen::MatrixXd& psi);
PhotonNumbers mean_photon_number(const Eigen::MatrixXcd& psi);

} // namespace hybell
