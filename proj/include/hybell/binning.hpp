#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "hybell/errors.hpp"

namespace hybell {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The binning set A+ as a real interval, closed/open immaterial (measure
// zero). Infinite endpoints give half-lines or the full line; the empty set
// has its own sentinel so "never output +1" is representable.
struct Interval {
    double lo = 0.0;
    double hi = kInf;

    static Interval full_line() { return {-kInf, kInf}; }
    static Interval empty_set() { return {kInf, -kInf}; }

    bool is_empty() const { return lo == kInf && hi == -kInf; }
    bool is_full_line() const { return lo == -kInf && hi == kInf; }
    bool lo_infinite() const { return std::isinf(lo); }
    bool hi_infinite() const { return std::isinf(hi); }

    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
    bool operator<(const Interval& o) const {
        return lo < o.lo || (lo == o.lo && hi < o.hi);
    }
};

inline void validate(const Interval& a) {
    if (a.is_empty()) return;
    if (std::isnan(a.lo) || std::isnan(a.hi) || !(a.lo < a.hi))
        throw DegenerateBinning("interval needs lo < hi, got [" +
                                std::to_string(a.lo) + ", " + std::to_string(a.hi) + "]");
}

inline std::string to_string(const Interval& a) {
    if (a.is_empty()) return "{}";
    auto fmt = [](double v) {
        if (v == -kInf) return std::string("-inf");
        if (v == kInf) return std::string("inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    return "[" + fmt(a.lo) + ", " + fmt(a.hi) + "]";
}

// Vacuum weight of the bin: integral of phi_0^2 = pi^{-1/2} e^{-x^2} over A+.
inline double vacuum_weight(const Interval& a) {
    if (a.is_empty()) return 0.0;
    validate(a);
    double elo = a.lo_infinite() ? -1.0 : std::erf(a.lo);
    double ehi = a.hi_infinite() ? 1.0 : std::erf(a.hi);
    return 0.5 * (ehi - elo);
}

// cos(theta) = 2 * vacuum_weight - 1 is the vacuum diagonal entry of the
// binned sign observable; theta parameterizes the whole analytic layer.
double theta_of_binning(const Interval& a);

// Norm ceiling 2*sqrt(1 + sin^2 theta) for the CHSH combination at this
// binning, attained in the infinite-dimension limit. Degenerate bins (empty,
// full line) give exactly 2.
double analytic_norm(const Interval& a);
double analytic_norm_of_theta(double theta);

// Candidate bins for the optimizers: finite endpoints on the step lattice in
// [-lim, lim], all half-lines, and the full line. Endpoints are exact
// multiples of step so cache keys and lattice lookups stay stable.
std::vector<Interval> interval_grid(double step = 0.05, double lim = 3.0);

// erf(x) = 1/2 at this x, so [-x, x] has vacuum weight exactly 1/2 (theta
// pi/2), the symmetric counterpart of the positive half-line.
inline constexpr double kHalfWeightEdge = 0.47693627620446987;

inline Interval symmetric_half_weight_bin() {
    return {-kHalfWeightEdge, kHalfWeightEdge};
}

} // namespace hybell
