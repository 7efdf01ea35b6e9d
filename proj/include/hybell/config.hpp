#pragma once

#include <cstdint>

namespace hybell {

// Knobs for the interval-overlap quadrature. Infinite endpoints are cut at
// sqrt(2*N_max) + tail_pad, past the classical turning point of the highest
// retained Hermite function where everything is below 1e-14.
struct QuadratureConfig {
    double abs_tolerance = 1e-10;
    double tail_pad = 10.0;
};

// Knobs shared by the eigensolvers, the binning optimizer, and the threshold
// searches. Everything downstream is deterministic for a fixed config.
struct SolveConfig {
    double quad_tol = 1e-10;

    // joint dimensions up to dense_max use the direct LAPACK solver; larger
    // products go through the structured Lanczos iteration
    int dense_max = 256;
    double iter_tol = 1e-9;
    int iter_max = 500;
    std::uint64_t seed = 20240915;

    // binning search grid and refinement
    double grid_step = 0.05;
    double grid_lim = 3.0;
    double refine_res = 1e-3;

    double bisect_width = 1e-4;
};

} // namespace hybell
