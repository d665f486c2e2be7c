#include "pabias/iq.hpp"

#include <algorithm>
#include <cmath>

namespace pabias {

std::vector<double> envelope(const IqBlock& block) {
    std::vector<double> env(block.samples.size());
    std::transform(block.samples.begin(), block.samples.end(), env.begin(),
                   [](const Complex& z) { return std::abs(z); });
    return env;
}

double mean_power(std::span<const Complex> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& z : samples) {
        acc += std::norm(z);
    }
    return acc / static_cast<double>(samples.size());
}

double papr_db(std::span<const Complex> samples) {
    const double mean = mean_power(samples);
    if (mean <= 0.0) {
        return 0.0;
    }
    double peak = 0.0;
    for (const auto& z : samples) {
        peak = std::max(peak, std::norm(z));
    }
    return 10.0 * std::log10(peak / mean);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

IqBlock scaled(const IqBlock& block, double k) {
    IqBlock out{block.samples, block.sample_rate};
    for (auto& z : out.samples) {
        z *= k;
    }
    return out;
}

}  // namespace pabias
