#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hybell/binning.hpp"
#include "hybell/config.hpp"

namespace hybell {

// Binned quadrature sign observable Q = 2 G(A+) - I on the first dim Fock
// levels. Empty bin gives -I and the full line +I without quadrature.
Eigen::MatrixXd build_Q(const Interval& a, int dim, double tol = 1e-11);

// Process-wide cache of build_Q results keyed on (binning, dim); safe for
// concurrent readers. The optimizer grids hit the same intervals repeatedly.
const Eigen::MatrixXd& cached_Q(const Interval& a, int dim, double tol = 1e-11);
void clear_Q_cache();

// Photodetection sign observable: -1 on vacuum, +1 on every excited level.
// Diagonal, so returned as the diagonal vector.
Eigen::VectorXd build_D(int dim);

// Number operator diagonal 0..dim-1.
Eigen::VectorXd build_N(int dim);

// Detector with efficiency eta: vacuum stays -1, level n responds
// 1 - 2(1-eta)^n (no-click probability (1-eta)^n).
Eigen::VectorXd build_D_eta(double eta, int dim);

// Detector that additionally misfires on vacuum: delta is the probability
// of the correct no-click outcome there, so the vacuum entry is
// (1 - delta) - delta = 1 - 2 delta (equals -1 at delta = 1). Excited
// levels as build_D_eta.
Eigen::VectorXd build_D_eta_delta(double eta, double delta, int dim);

// Mode rotation e^{i n theta} conjugation of an operator in the Fock basis:
// entry (m, n) picks up e^{i (m - n) theta}.
Eigen::MatrixXcd rotate_fock(const Eigen::MatrixXd& op, double theta);

// Q for binning a, then rotated by the local oscillator phase.
Eigen::MatrixXcd build_rotated_Q(const Interval& a, double phase, int dim,
                                 double tol = 1e-11);

// Kronecker product of a list of operators, leftmost factor slowest
// (row-major composite index).
Eigen::MatrixXcd tensor(const std::vector<Eigen::MatrixXcd>& ops);
Eigen::MatrixXd tensor(const std::vector<Eigen::MatrixXd>& ops);

} // namespace hybell
