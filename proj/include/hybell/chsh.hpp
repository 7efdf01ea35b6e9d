#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hybell/binning.hpp"
#include "hybell/config.hpp"
#include "hybell/eigen_solve.hpp"
#include "hybell/operators.hpp"

namespace hybell {

// One party's two sign observables: dense binned quadrature Q and diagonal
// photodetection D (possibly noisy, so stored as a vector).
struct PartyOps {
    Eigen::MatrixXd Q;
    Eigen::VectorXd D;
};

// B = Q (x) Q' + Q (x) D' + D (x) Q' - D (x) D' in factored form. dense()
// materializes the joint matrix; the solvers mostly avoid that.
struct JointOperator {
    PartyOps A;
    PartyOps B;
    // empty set doubles as "no binning recorded" for hand-assembled operators
    Interval binning = Interval::empty_set();

    int dimA() const { return static_cast<int>(A.D.size()); }
    int dimB() const { return static_cast<int>(B.D.size()); }
    Eigen::MatrixXd dense() const;
};

JointOperator assemble_chsh(const Eigen::MatrixXd& qa, const Eigen::VectorXd& da,
                            const Eigen::MatrixXd& qb, const Eigen::VectorXd& db,
                            const Interval& binning = Interval::empty_set());
JointOperator assemble_chsh(const Interval& a, int dimA, int dimB,
                            const SolveConfig& cfg = {});

struct ViolationResult {
    double value = 0.0;        // max |eigenvalue|
    double signed_value = 0.0; // same eigenvalue with its sign
    // dimA x dimB amplitude matrix of the unit eigenvector; satisfies
    // ||B vec(state) - signed_value vec(state)|| <= 1e-5 at the default
    // tolerances (the iteration converges the Rayleigh quotient to 1e-9, so
    // the vector residual is about its square root).
    Eigen::MatrixXd state;
    Interval binning;
    std::optional<double> theta;
    int iterations = 0;
};

// Operator norm of the CHSH combination. Joint dimensions up to
// cfg.dense_max go through LAPACK; larger ones use a two-GEMM Lanczos on the
// factored form.
ViolationResult chsh_norm(const JointOperator& b, const SolveConfig& cfg = {});

// <psi| X (x) Y |psi> for a product-basis state given as its dimA x dimB
// amplitude matrix: trace(Psi^* X Psi Y^T). Complex states against the real
// symmetric B split into real and imaginary sections.
double expectation(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& x,
                   const Eigen::MatrixXd& y);
double expectation(const Eigen::MatrixXd& psi, const JointOperator& b);
double expectation(const Eigen::MatrixXcd& psi, const JointOperator& b);

// Normalized tail state (1/sin theta) sum_{n>=1} 2 G(0, n) |n>. The
// truncated_weight reports the squared norm before renormalization (tends to
// 1 from below as dim grows).
struct XiState {
    Eigen::VectorXd amps;
    double truncated_weight = 0.0;
};
XiState xi_state(const Interval& a, int dim, double tol = 1e-11);

// Maximally violating pair for the binning, built from psi+ and phi- in the
// {vacuum, tail} qubit. Requires theta = pi/2 within 1e-6 (vacuum weight
// 1/2), else throws DegenerateBinning reporting the theta found.
struct PiStates {
    Eigen::MatrixXd plus;
    Eigen::MatrixXd minus;
};
PiStates pi_states(const Interval& a, int dim, double tol = 1e-11);

// Compress B to the span of the given joint states, each a dimA x dimB
// amplitude matrix. Returns the compressed matrix in an orthonormalized
// basis of the span.
Eigen::MatrixXd project_to_subspace(const JointOperator& b,
                                    const std::vector<Eigen::MatrixXd>& span);

// Compress onto the same Fock levels for both parties; the result is again
// in factored party form since the span is a product.
JointOperator project_to_subspace(const JointOperator& b,
                                  const std::vector<int>& fock_levels);

enum class Objective { MaxViolation, MinEta, MinT };

struct OptimizeResult {
    Interval binning;
    double objective_value = 0.0; // norm, eta_c, or t_c per objective
    double norm = 0.0;            // subspace norm at the optimum
    Eigen::MatrixXd state;
};

// Grid-scan all candidate bins for the Fock subspace span, then locally
// refine the best few to endpoint resolution cfg.refine_res. For
// MaxViolation the analytic norm ceiling prunes cells that cannot beat the
// incumbent; ties pick the lexicographically smaller interval.
OptimizeResult optimize_binning(const std::vector<int>& fock_levels,
                                Objective obj, const SolveConfig& cfg = {});

} // namespace hybell
