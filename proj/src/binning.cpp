#include "hybell/binning.hpp"

#include <algorithm>
#include <cmath>

namespace hybell {

double theta_of_binning(const Interval& a) {
    if (a.is_empty() || a.is_full_line())
        throw DegenerateBinning("binning angle undefined for " + to_string(a));
    validate(a);
    double c = 2.0 * vacuum_weight(a) - 1.0;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double analytic_norm_of_theta(double theta) {
    double s = std::sin(theta);
    return 2.0 * std::sqrt(1.0 + s * s);
}

double analytic_norm(const Interval& a) {
    if (a.is_empty() || a.is_full_line()) return 2.0;
    return analytic_norm_of_theta(theta_of_binning(a));
}

std::vector<Interval> interval_grid(double step, double lim) {
    int n = static_cast<int>(std::llround(lim / step));
    std::vector<Interval> grid;
    grid.reserve(static_cast<size_t>(2 * n + 1) * (2 * n + 2) / 2 + 4 * n + 3);
    auto at = [step](int k) { return k * step; };
    for (int i = -n; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) grid.push_back({at(i), at(j)});
    for (int j = -n; j <= n; ++j) grid.push_back({-kInf, at(j)});
    for (int i = -n; i <= n; ++i) grid.push_back({at(i), kInf});
    grid.push_back(Interval::full_line());
    std::sort(grid.begin(), grid.end());
    return grid;
}

} // namespace hybell
