#include "pabias/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pabias {
namespace {

struct Vertex {
    std::vector<double> x;
    double f = 0.0;
};

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          const std::vector<double>& start, const std::vector<double>& steps,
                          const SimplexOptions& options) {
    const std::size_t n = start.size();
    SimplexResult best{start, 0.0, 0};
    if (options.max_evaluations <= 0) {
        best.value = objective(start);
        return best;
    }

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return objective(x);
    };

    best.value = eval(start);
    auto consider = [&](const Vertex& v) {
        if (v.f < best.value) {
            best.x = v.x;
            best.value = v.f;
        }
    };

    for (int restart = 0; restart <= options.max_restarts && evals < options.max_evaluations;
         ++restart) {
        std::vector<Vertex> simplex;
        simplex.push_back({best.x, best.value});
        for (std::size_t i = 0; i < n && evals < options.max_evaluations; ++i) {
            Vertex v{best.x, 0.0};
            v.x[i] += steps[i];
            v.f = eval(v.x);
            consider(v);
            simplex.push_back(std::move(v));
        }
        if (simplex.size() != n + 1) {
            break;
        }

        bool converged = false;
        while (evals < options.max_evaluations) {
            std::stable_sort(simplex.begin(), simplex.end(),
                             [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

            double spread_x = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double scale = steps[i] != 0.0 ? std::abs(steps[i]) : 1.0;
                    spread_x = std::max(spread_x, std::abs(simplex[j].x[i] - simplex[0].x[i]) / scale);
                }
            }
            if (simplex[n].f - simplex[0].f <= options.f_tolerance ||
                spread_x <= options.x_tolerance) {
                converged = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    centroid[i] += simplex[j].x[i] / static_cast<double>(n);
                }
            }
            auto along = [&](double t) {
                std::vector<double> p(n);
                for (std::size_t i = 0; i < n; ++i) {
                    p[i] = centroid[i] + t * (simplex[n].x[i] - centroid[i]);
                }
                return p;
            };

            Vertex reflected{along(-1.0), 0.0};
            reflected.f = eval(reflected.x);
            consider(reflected);

            if (reflected.f < simplex[0].f) {
                if (evals >= options.max_evaluations) {
                    simplex[n] = std::move(reflected);
                    break;
                }
                Vertex expanded{along(-2.0), 0.0};
                expanded.f = eval(expanded.x);
                consider(expanded);
                simplex[n] = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
            } else if (reflected.f < simplex[n - 1].f) {
                simplex[n] = std::move(reflected);
            } else {
                if (evals >= options.max_evaluations) break;
                const bool outside = reflected.f < simplex[n].f;
                Vertex contracted{along(outside ? -0.5 : 0.5), 0.0};
                contracted.f = eval(contracted.x);
                consider(contracted);
                if (contracted.f < (outside ? reflected.f : simplex[n].f)) {
                    simplex[n] = std::move(contracted);
                } else {
                    for (std::size_t j = 1; j <= n && evals < options.max_evaluations; ++j) {
                        for (std::size_t i = 0; i < n; ++i) {
                            simplex[j].x[i] = simplex[0].x[i] + 0.5 * (simplex[j].x[i] - simplex[0].x[i]);
                        }
                        simplex[j].f = eval(simplex[j].x);
                        consider(simplex[j]);
                    }
                }
            }
        }
        if (!converged) {
            break;
        }
    }
    best.evaluations = evals;
    return best;
}

}  // namespace pabias
