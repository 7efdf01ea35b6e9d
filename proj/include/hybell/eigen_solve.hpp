#pragma once

#include <Eigen/Dense>
#include <functional>

#include "hybell/config.hpp"

namespace hybell {

// Extremal eigenpair of a real symmetric operator: the eigenvalue of largest
// modulus and its (unit) eigenvector, plus the signed eigenvalue.
struct ExtremalPair {
    double abs_value = 0.0;
    double signed_value = 0.0;
    Eigen::VectorXd vector;
    int iterations = 0;
};

// Dense path: both spectrum edges via LAPACK dsyevr, keep the bigger |.|.
ExtremalPair dense_extremal(const Eigen::MatrixXd& m);

// Lanczos with full reorthogonalization for matrix-free operators. Converged
// when both extremal Ritz values settle below tol; otherwise throws
// NonConvergence carrying the best estimate and residual in the message.
// start seeds the first basis vector (grid scans warm-start from the
// neighboring cell); null draws a seeded random vector.
using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
ExtremalPair lanczos_extremal(const MatVec& apply, int n, const SolveConfig& cfg,
                              const Eigen::VectorXd* start = nullptr);

} // namespace hybell
