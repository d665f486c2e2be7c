#include "pabias/signalgen.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "pabias/error.hpp"

namespace pabias::signalgen {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw Error(ErrorCode::InvalidSpec, what);
    }
}

// PRBS9 (x^9 + x^5 + 1), seeded with all ones: a fixed symbol source.
class Prbs9 {
public:
    int next_bit() {
        const int bit = ((state_ >> 8) ^ (state_ >> 4)) & 1;
        state_ = ((state_ << 1) | bit) & 0x1ff;
        return bit;
    }

private:
    std::uint32_t state_ = 0x1ff;
};

}  // namespace

void validate(const WaveformSpec& spec, double sample_rate) {
    require(std::isfinite(sample_rate) && sample_rate > 0.0, "sample rate must be positive");
    const double nyquist = sample_rate / 2.0;
    require(std::isfinite(spec.amplitude) && spec.amplitude >= 0.0, "amplitude must be >= 0");
    require(spec.duration_s > 0.0 && spec.duration_s * sample_rate >= 1.0,
            "duration must cover at least one sample");
    auto below_nyquist = [&](double f, const char* name) {
        require(std::isfinite(f) && std::abs(f) < nyquist,
                std::string(name) + " must be below Nyquist (" + std::to_string(nyquist) + " Hz)");
    };

    switch (spec.kind) {
        case WaveformKind::CW:
            below_nyquist(spec.offset_hz, "carrier offset");
            break;
        case WaveformKind::FM:
            require(spec.fm_rate_hz > 0.0, "FM modulating rate must be positive");
            require(spec.fm_deviation_hz >= 0.0, "FM deviation must be >= 0");
            below_nyquist(std::abs(spec.offset_hz) + spec.fm_deviation_hz + spec.fm_rate_hz,
                          "FM occupied band edge");
            break;
        case WaveformKind::AM:
            require(spec.am_index >= 0.0 && spec.am_index <= 1.0, "AM index must be in [0,1]");
            require(spec.am_rate_hz > 0.0, "AM modulating rate must be positive");
            below_nyquist(std::abs(spec.offset_hz) + spec.am_rate_hz, "AM sideband");
            break;
        case WaveformKind::PSK:
            require(spec.psk_order == 2 || spec.psk_order == 4, "PSK order must be 2 or 4");
            require(spec.psk_symbol_rate_hz > 0.0, "PSK symbol rate must be positive");
            below_nyquist(spec.psk_symbol_rate_hz, "PSK symbol rate");
            below_nyquist(spec.offset_hz, "carrier offset");
            break;
        case WaveformKind::TwoTone:
            below_nyquist(spec.tone1_hz, "tone 1");
            below_nyquist(spec.tone2_hz, "tone 2");
            require(spec.tone1_hz != spec.tone2_hz, "two-tone frequencies must differ");
            break;
    }
}

IqBlock generate(const WaveformSpec& spec, double sample_rate) {
    validate(spec, sample_rate);

    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * sample_rate));
    IqBlock block;
    block.sample_rate = sample_rate;
    block.samples.resize(n);

    const double a = spec.amplitude;
    const double dt = 1.0 / sample_rate;

    switch (spec.kind) {
        case WaveformKind::CW:
            for (std::size_t k = 0; k < n; ++k) {
                block.samples[k] = std::polar(a, kTwoPi * spec.offset_hz * k * dt);
            }
            break;

        case WaveformKind::FM: {
            const double beta = spec.fm_deviation_hz / spec.fm_rate_hz;
            for (std::size_t k = 0; k < n; ++k) {
                const double t = k * dt;
                const double phase =
                    kTwoPi * spec.offset_hz * t + beta * std::sin(kTwoPi * spec.fm_rate_hz * t);
                block.samples[k] = std::polar(a, phase);
            }
            break;
        }

        case WaveformKind::AM: {
            const double m = spec.am_index;
            for (std::size_t k = 0; k < n; ++k) {
                const double t = k * dt;
                const double env = a * (1.0 + m * std::cos(kTwoPi * spec.am_rate_hz * t)) / (1.0 + m);
                block.samples[k] = std::polar(env, kTwoPi * spec.offset_hz * t);
            }
            break;
        }

        case WaveformKind::PSK: {
            // Hard keying: phase jumps at symbol boundaries, magnitude never moves.
            Prbs9 prbs;
            const double samples_per_symbol = sample_rate / spec.psk_symbol_rate_hz;
            std::size_t next_boundary = 0;
            double symbol_phase = 0.0;
            std::size_t symbol_index = 0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k >= next_boundary) {
                    int bits = prbs.next_bit();
                    if (spec.psk_order == 4) {
                        bits = (bits << 1) | prbs.next_bit();
                        symbol_phase = std::numbers::pi / 4.0 + bits * std::numbers::pi / 2.0;
                    } else {
                        symbol_phase = bits * std::numbers::pi;
                    }
                    ++symbol_index;
                    next_boundary = static_cast<std::size_t>(
                        std::ceil(static_cast<double>(symbol_index) * samples_per_symbol));
                }
                block.samples[k] = std::polar(a, symbol_phase + kTwoPi * spec.offset_hz * k * dt);
            }
            break;
        }

        case WaveformKind::TwoTone:
            // Each tone at half the requested peak so the envelope peak is `amplitude`.
            for (std::size_t k = 0; k < n; ++k) {
                const double t = k * dt;
                block.samples[k] = std::polar(a / 2.0, kTwoPi * spec.tone1_hz * t) +
                                   std::polar(a / 2.0, kTwoPi * spec.tone2_hz * t);
            }
            break;
    }

    if (spec.noise_dbc) {
        const double carrier = mean_power(block.samples);
        const double sigma = std::sqrt(carrier * std::pow(10.0, *spec.noise_dbc / 10.0) / 2.0);
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> gauss(0.0, sigma);
        for (auto& z : block.samples) {
            z += Complex(gauss(rng), gauss(rng));
        }
    }
    return block;
}

WaveformKind parse_kind(std::string_view name) {
    if (name == "cw") return WaveformKind::CW;
    if (name == "fm") return WaveformKind::FM;
    if (name == "psk" || name == "bpsk" || name == "qpsk") return WaveformKind::PSK;
    if (name == "am") return WaveformKind::AM;
    if (name == "two-tone" || name == "twotone" || name == "ssb") return WaveformKind::TwoTone;
    throw Error(ErrorCode::InvalidSpec, "unknown waveform kind '" + std::string(name) + "'");
}

WaveformSpec spec_for(std::string_view name) {
    WaveformSpec spec;
    spec.kind = parse_kind(name);
    if (name == "qpsk") spec.psk_order = 4;
    return spec;
}

std::string_view to_string(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::CW: return "cw";
        case WaveformKind::FM: return "fm";
        case WaveformKind::PSK: return "psk";
        case WaveformKind::AM: return "am";
        case WaveformKind::TwoTone: return "two-tone";
    }
    return "?";
}

bool is_constant_envelope(WaveformKind kind) noexcept {
    return kind == WaveformKind::CW || kind == WaveformKind::FM || kind == WaveformKind::PSK;
}

}  // namespace pabias::signalgen
