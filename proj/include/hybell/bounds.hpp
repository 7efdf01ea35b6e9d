#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "hybell/config.hpp"

namespace hybell {

// Pin one correlator E_ij = <A_i B_j> of the CHSH quartet to a value.
struct CorrelatorConstraint {
    int i = 0;
    int j = 0;
    double value = 0.0;
};

struct ConstrainedMax {
    double value = 0.0; // max |CHSH sum|
    double schmidt_angle = 0.0;
    // a0, a1, b0, b1 of the canonicalized problem: whichever correlator was
    // pinned is relabeled to the (0,0) slot (value negated for the (1,1)
    // slot), so E(a0, b0) reproduces the canonical pin.
    std::array<double, 4> angles{};
};

// Largest qubit-pair CHSH sum subject to the pinned correlator: coarse
// penalty grid over the Schmidt angle and four measurement angles, then the
// constraint is eliminated exactly and the reduced problem polished to 1e-6.
ConstrainedMax constrained_chsh_max(const CorrelatorConstraint& c,
                                    const SolveConfig& cfg = {});

// The maximum as a function of the pinned value on a uniform grid over
// [-1, 1]; even in the value (flipping one party's observables negates every
// correlator).
std::vector<std::pair<double, double>>
constrained_chsh_curve(int grid_points = 41, const SolveConfig& cfg = {});

// Monte Carlo lower bound: random Bloch measurement axes on a Schmidt-angle
// family, best of n_samples. Deterministic per seed.
double random_strategy_oracle(double c, int n_samples, std::uint64_t seed);

// Oracle polished by local penalized descent from its best sample.
double polished_oracle(double c, int n_samples, std::uint64_t seed,
                       const SolveConfig& cfg = {});

// Hill-climb over dim-3 local observables (eigenvalues in [-1,1]) at the
// pinned correlator; should not beat the qubit curve by more than slack.
double dim3_spot_check(double c, std::uint64_t seed, const SolveConfig& cfg = {});

} // namespace hybell
