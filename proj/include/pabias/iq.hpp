#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pabias {

using Complex = std::complex<double>;

/// A finite block of complex baseband samples. Amplitudes are envelope volts
/// once a block has passed through the amplifier model, normalized otherwise.
struct IqBlock {
    std::vector<Complex> samples;
    double sample_rate = 1.0;  // Hz

    std::size_t size() const noexcept { return samples.size(); }
    double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Elementwise magnitude.
std::vector<double> envelope(const IqBlock& block);

double mean_power(std::span<const Complex> samples);

/// Peak-to-average power ratio of the envelope in dB. Zero blocks report 0 dB.
double papr_db(std::span<const Complex> samples);

/// Linear-interpolated quantile (q in [0,1]) of an unsorted sample set.
double quantile(std::vector<double> values, double q);

/// Scales every sample by k.
IqBlock scaled(const IqBlock& block, double k);

}  // namespace pabias
