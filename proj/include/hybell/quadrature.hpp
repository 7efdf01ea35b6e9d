#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hybell/binning.hpp"
#include "hybell/config.hpp"
#include "hybell/errors.hpp"

namespace hybell {

// Gauss-Legendre rule on [-1, 1], nodes ascending. Cached per order.
struct GLRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GLRule& gauss_legendre(int order);

// Harmonic-oscillator eigenfunctions phi_n(x), n = 0..nmax, via the stable
// three-term recurrence. phi_values returns all orders at once.
Eigen::VectorXd phi_values(int nmax, double x);
double phi(int n, double x);

// Roots of the physicists' Hermite polynomial H_n (eigenvalues of the Jacobi
// matrix), ascending. These are the sign changes of phi_n.
std::vector<double> hermite_roots(int n);

// G(m, n) = integral over A+ of phi_m phi_n. The matrix version fills all
// pairs 0..dim-1 at once; both adaptively refine panels until the worst
// entry moves by less than tol between dyadic levels, and throw
// QuadratureError (carrying the achieved estimate in the message) if the
// budget runs out first.
Eigen::MatrixXd overlap_matrix(const Interval& a, int dim, double tol = 1e-11);
double overlap_integral(int m, int n, const Interval& a, double tol = 1e-11);

// integral over all of R of |phi_m phi_n|, split at the sign changes of both
// factors so each segment is smooth.
double abs_overlap_integral(int m, int n, double tol = 1e-11);

// Prefix-sum table of overlap matrices on an endpoint lattice: one
// quadrature sweep, then any on-lattice interval costs O(dim^2). Off-lattice
// endpoints fall back to overlap_matrix. Lattice points are k*step for
// integer k in [-lim/step, lim/step].
class LatticeOverlaps {
  public:
    LatticeOverlaps(double step, double lim, int dim, double tol = 1e-11);

    Eigen::MatrixXd overlap(const Interval& a) const;
    int dim() const { return dim_; }

  private:
    bool lattice_index(double x, int& idx) const;

    double step_, lim_, tol_;
    int dim_;
    // prefix_[i] = integral over (-T, x_i); total_ = integral over (-T, T).
    std::vector<Eigen::MatrixXd> prefix_;
    Eigen::MatrixXd total_;
};

} // namespace hybell
