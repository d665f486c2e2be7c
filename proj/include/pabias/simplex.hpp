#pragma once

#include <functional>
#include <vector>

namespace pabias {

/// Nelder-Mead downhill simplex with the standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Deterministic: the initial simplex is `start` plus one axis step per
/// coordinate. When the simplex collapses before the budget is spent the
/// search restarts from the best vertex with the original steps.
struct SimplexOptions {
    int max_evaluations = 1000;
    double f_tolerance = 1e-12;   // spread of vertex values that counts as converged
    double x_tolerance = 1e-10;   // max vertex distance (relative to steps)
    int max_restarts = 4;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const std::vector<double>& steps,
                          const SimplexOptions& options = {});

}  // namespace pabias
