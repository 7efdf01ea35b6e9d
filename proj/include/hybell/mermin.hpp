#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "hybell/binning.hpp"
#include "hybell/config.hpp"

namespace hybell {

// Mermin violation of the n-party GHZ photon state with sign-binned
// quadratures (positive half-line) in closed form (2/pi)^{n/2} 2^{(n+1)/2},
// and the same thing from the explicit operator for cross-checking.
double ghz_quadrature_violation(int n_parties);
double ghz_mermin_explicit(int n_parties, double tol = 1e-11);

// |<W| DQQ + QDQ + QQD - DDD |W>| at binning a; the positive half-line
// gives 1 + 4/pi exactly.
double w_mermin_value(const Interval& a, int dim, double tol = 1e-11);

// Same with detector efficiency eta on every D. Closed form on the positive
// half-line: |4/pi + 2 eta - 1|.
double w_mermin_value_eta(const Interval& a, int dim, double eta,
                          double tol = 1e-11);

// Efficiency where the W combination crosses 2.
double w_critical_eta(const Interval& a, int dim, const SolveConfig& cfg = {});

// Experimental: dense Mermin operator for n parties with per-party phase
// pairs, for exploring beyond the GHZ construction. Not tuned for size.
Eigen::MatrixXcd mermin_operator(int n_parties, int local_dim,
                                 const std::vector<std::pair<double, double>>& phases,
                                 const Interval& a, double tol = 1e-11);

} // namespace hybell
