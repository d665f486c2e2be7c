#pragma once

#include <optional>
#include <string_view>

#include "pabias/iq.hpp"

namespace pabias::signalgen {

enum class WaveformKind { CW, FM, PSK, AM, TwoTone };

/// Test-signal description. Only the fields relevant to `kind` are read.
///
/// Constant-envelope kinds (CW, FM, hard-keyed PSK) hold |x| = amplitude.
/// AM and two-tone carry a varying envelope whose peak equals amplitude.
struct WaveformSpec {
    WaveformKind kind = WaveformKind::CW;
    double amplitude = 1.0;     // peak envelope
    double duration_s = 1e-3;
    double offset_hz = 0.0;     // carrier offset from baseband centre (CW, FM, AM, PSK)

    double fm_deviation_hz = 5e3;
    double fm_rate_hz = 1e3;

    double am_index = 0.5;
    double am_rate_hz = 1e3;

    double psk_symbol_rate_hz = 10e3;
    int psk_order = 2;

    double tone1_hz = -1e3;     // two-tone offsets; default spacing 2 kHz
    double tone2_hz = 1e3;

    /// Optional additive complex Gaussian floor relative to the mean carrier
    /// power (dBc). Disabled by default so envelopes stay exact.
    std::optional<double> noise_dbc;
};

/// Deterministic synthesis; identical inputs give bit-identical output.
/// Throws Error{InvalidSpec} for frequencies at/above Nyquist, AM index
/// outside [0,1], PSK order not in {2,4}, or non-positive durations/rates.
IqBlock generate(const WaveformSpec& spec, double sample_rate);

void validate(const WaveformSpec& spec, double sample_rate);

WaveformKind parse_kind(std::string_view name);

/// Default spec for a kind name as accepted by parse_kind; "qpsk" selects
/// order 4.
WaveformSpec spec_for(std::string_view name);
std::string_view to_string(WaveformKind kind);

bool is_constant_envelope(WaveformKind kind) noexcept;

}  // namespace pabias::signalgen
