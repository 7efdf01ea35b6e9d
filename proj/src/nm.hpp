#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <vector>

namespace hybell::detail {

// Plain Nelder-Mead minimizer. Terminates when the simplex diameter drops
// below tol in every coordinate or after max_iter reflections.
inline Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& start, double step,
                                   double tol, int max_iter, double* fbest = nullptr) {
    const int n = static_cast<int>(start.size());
    std::vector<Eigen::VectorXd> x(n + 1, start);
    std::vector<double> fx(n + 1);
    for (int i = 0; i < n; ++i) x[i + 1][i] += step;
    for (int i = 0; i <= n; ++i) fx[i] = f(x[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::vector<Eigen::VectorXd> xs(n + 1);
        std::vector<double> fs(n + 1);
        for (int i = 0; i <= n; ++i) {
            xs[i] = x[idx[i]];
            fs[i] = fx[idx[i]];
        }
        x.swap(xs);
        fx.swap(fs);
    };

    for (int it = 0; it < max_iter; ++it) {
        order();
        double diam = 0.0;
        for (int i = 1; i <= n; ++i)
            diam = std::max(diam, (x[i] - x[0]).cwiseAbs().maxCoeff());
        if (diam < tol) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += x[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + (centroid - x[n]);
        double fr = f(xr);
        if (fr < fx[0]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - x[n]);
            double fe = f(xe);
            if (fe < fr) {
                x[n] = xe;
                fx[n] = fe;
            } else {
                x[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            x[n] = xr;
            fx[n] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * (x[n] - centroid);
            double fc = f(xc);
            if (fc < fx[n]) {
                x[n] = xc;
                fx[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    x[i] = x[0] + 0.5 * (x[i] - x[0]);
                    fx[i] = f(x[i]);
                }
            }
        }
    }
    order();
    if (fbest) *fbest = fx[0];
    return x[0];
}

} // namespace hybell::detail
