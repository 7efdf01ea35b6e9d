#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "hybell/binning.hpp"
#include "hybell/chsh.hpp"
#include "hybell/config.hpp"

namespace hybell {

// Kraus operators of single-mode amplitude damping with survival probability
// t: F_k drops k photons, F_k = sum_{n>=k} sqrt(C(n,k) t^{n-k} (1-t)^k)
// |n-k><n|. Completeness sum F_k^T F_k = I holds exactly on the retained
// space because the coefficients are binomial.
std::vector<Eigen::MatrixXd> damping_kraus(double t, int dim);

// Heisenberg picture of the damping channel on one mode,
// X -> sum_k F_k^T X F_k. Diagonal input stays diagonal.
Eigen::MatrixXd pullback_mode(const Eigen::MatrixXd& x, double t);
Eigen::VectorXd pullback_mode_diag(const Eigen::VectorXd& x, double t);

// Same channel on both modes of a joint operator; used by the property
// tests, the solvers work with the factored per-party form.
Eigen::MatrixXd pullback(const Eigen::MatrixXd& joint, int dimA, int dimB,
                         double tA, double tB);
JointOperator pullback(const JointOperator& b, double tA, double tB);

// Party observables under line transmission t followed by a detector with
// efficiency eta and vacuum confusion delta: Q and D_{eta,delta} pulled back
// through the damping channel. The pullback only reaches downward in photon
// number, so truncation at dim is exact.
PartyOps noisy_party_ops(const Interval& a, int dim, double eta, double delta,
                         double t, const SolveConfig& cfg = {});

struct CriticalResult {
    double threshold = 0.0;
    double witness_value = 0.0; // noiseless expectation of the witness state
    Eigen::MatrixXd witness;    // extremal state just above threshold
    Interval binning;
    std::vector<std::pair<double, double>> trace; // (param, norm) probes
};

// Smallest detector efficiency at which the compressed norm still exceeds 2,
// by bisection to width cfg.bisect_width. The witness is the extremal state
// at threshold + bisect_width. Throws NoViolation if even eta = 1 stays
// below 2. Probes along the bisection must be nondecreasing in the
// parameter; a violation of that aborts with a diagnostic.
CriticalResult critical_eta(const Interval& a, const std::vector<int>& fock_levels,
                            const SolveConfig& cfg = {});

// Same searches with the ambient Q supplied by the caller (the binning
// optimizer reuses its lattice tables); levels index into q_ambient.
CriticalResult critical_eta_for_Q(const Eigen::MatrixXd& q_ambient,
                                  const std::vector<int>& fock_levels,
                                  const Interval& a, const SolveConfig& cfg = {});
CriticalResult critical_t_for_Q(const Eigen::MatrixXd& q_ambient,
                                const std::vector<int>& fock_levels,
                                const Interval& a, const SolveConfig& cfg = {});

// Critical eta of a fixed joint state (amplitude matrix) at binning a:
// smallest eta with <B_eta> = 2.
double critical_eta_of_state(const Eigen::MatrixXd& psi, const Interval& a,
                             const SolveConfig& cfg = {});
double critical_eta_of_state(const Eigen::MatrixXcd& psi, const Interval& a,
                             const SolveConfig& cfg = {});

// Minimum of critical_eta_of_state over candidate bins; cells whose
// noiseless expectation cannot reach 2 are skipped.
std::pair<double, Interval>
critical_eta_of_state_best(const Eigen::MatrixXd& psi,
                           const std::vector<Interval>& candidates,
                           const SolveConfig& cfg = {});
std::pair<double, Interval>
critical_eta_of_state_best(const Eigen::MatrixXcd& psi,
                           const std::vector<Interval>& candidates,
                           const SolveConfig& cfg = {});

// Smallest vacuum no-click probability delta the state tolerates at
// efficiency eta (delta = 1 is a perfect vacuum detector, expectation rises
// with delta, bisect the crossing).
double critical_delta_of_state(const Eigen::MatrixXd& psi, const Interval& a,
                               double eta = 1.0, const SolveConfig& cfg = {});

// Smallest line transmission t keeping the compressed norm above 2.
CriticalResult critical_t(const Interval& a, const std::vector<int>& fock_levels,
                          const SolveConfig& cfg = {});
double critical_t_of_state(const Eigen::MatrixXd& psi, const Interval& a,
                           const SolveConfig& cfg = {});
double critical_t_of_state(const Eigen::MatrixXcd& psi, const Interval& a,
                           const SolveConfig& cfg = {});

// Critical efficiency of the maximal-violation family at a weight-1/2
// binning: the noisy operator is compressed onto span{|0>,|Xi>}^x2 (the
// subspace every maximal violator lives in) and the best state in that
// span is taken at each eta. The result is truncation limited: the
// compressed norm stays above 2 for every eta > 0 as dim grows, since the
// homodyne arm is noiseless.
CriticalResult pi_family_critical_eta(const Interval& a, int dim,
                                      const SolveConfig& cfg = {});

enum class SweepParam { Eta, Transmission };

// |<B>| of the fixed state under the swept noise parameter on a uniform
// grid; binning stays fixed. Returns (param, absolute expectation), the
// quantity whose crossings of 2 the threshold searches bracket.
std::vector<std::pair<double, double>>
violation_curve(const Eigen::MatrixXd& psi, const Interval& a, SweepParam param,
                int grid_points, const SolveConfig& cfg = {});
std::vector<std::pair<double, double>>
violation_curve(const Eigen::MatrixXcd& psi, const Interval& a, SweepParam param,
                int grid_points, const SolveConfig& cfg = {});

} // namespace hybell
