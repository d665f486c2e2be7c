#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "pabias/bands.hpp"
#include "pabias/iq.hpp"
#include "pabias/pamodel.hpp"

namespace pabias::biasctl {

enum class EnvelopeKind { Constant, Varying };

struct EnvelopeClass {
    EnvelopeKind kind = EnvelopeKind::Varying;
    double papr_db = 0.0;
    double ripple_ratio = 0.0;  // (p99 - p1) / median of the envelope
};

struct ClassifierThresholds {
    double ripple_ratio = 0.05;
    double papr_db = 0.5;
};

enum class BiasMode { Compression, Linear };

inline constexpr double kCompressionIdq = 0.5;
inline constexpr double kLinearIdq = 2.0;

/// Quiescent currents selectable by the gate-bias switch bank.
inline constexpr std::array<double, 5> kGateStepIdq = {0.25, 0.5, 1.0, 1.5, 2.0};

struct ControlSettings {
    double margin = 0.10;          // headroom above the predicted envelope peak
    double compression_db = 2.5;   // target depth in compression mode
    double peak_quantile = 0.999;
    int hysteresis_windows = 3;
    ClassifierThresholds thresholds;
};

struct BiasCommand {
    pamodel::BiasPoint target;
    BiasMode mode = BiasMode::Linear;
    EnvelopeClass reason;
    double drive = 0.0;              // exciter envelope for the operating point
    double predicted_pout_w = 0.0;
};

std::string_view to_string(EnvelopeKind kind);
std::string_view to_string(BiasMode mode);

EnvelopeKind classify_metrics(double papr_db, double ripple_ratio,
                              const ClassifierThresholds& thresholds = {});

/// Classifies the first `window_s` seconds of `block`. Constant iff
/// ripple_ratio < 0.05 and PAPR < 0.5 dB (defaults). Throws
/// Error{WindowTooShort} if the block is shorter than the window.
EnvelopeClass classify_envelope(const IqBlock& block, double window_s,
                                const ClassifierThresholds& thresholds = {});

inline BiasMode mode_for(EnvelopeKind kind) {
    return kind == EnvelopeKind::Constant ? BiasMode::Compression : BiasMode::Linear;
}

/// clamp(peak * (1 + margin) + vknee, 30, 58).
double track_drain(double peak_envelope_v, double margin, double vknee);

/// Nearest entry of kGateStepIdq; ties go to the lower step.
int gate_step_for(double idq_target);

/// Quantile of the envelope of `block` (p99.9 by default).
double peak_envelope(const IqBlock& block, double quantile = 0.999);

/// Output envelope peak predicted for `exciter` when scaled to deliver
/// `setpoint_w` average power into rload. With no exciter block the signal
/// is taken as constant-envelope, i.e. sqrt(2 rload setpoint).
double predict_output_peak(double setpoint_w, const pamodel::PaParams& params,
                           const IqBlock* exciter = nullptr, double quantile = 0.999);

/// Operating point for a mode. Linear: idq 2 A at the band's equalization
/// vdd, drive for `setpoint_w` CW-equivalent output. Compression: idq 0.5 A,
/// vdd tracked just above the predicted output peak, drive set
/// `settings.compression_db` into compression. Throws Error{UnknownBand},
/// Error{SetpointUnreachable}.
BiasCommand command_for_mode(BiasMode mode, double setpoint_w, Band band,
                             const pamodel::PaParams& params, const BandTable& table,
                             const ControlSettings& settings = {},
                             const IqBlock* exciter = nullptr);

BiasCommand decide_bias(const EnvelopeClass& cls, double setpoint_w, Band band,
                        const pamodel::PaParams& params, const BandTable& table,
                        const ControlSettings& settings = {}, const IqBlock* exciter = nullptr);

/// Per-band vdd so that small-signal gain (ripple included) meets
/// `target_gain_db` within 0.1 dB. Bands that cannot reach the target are
/// clamped to the nearer supply limit and marked unreachable.
BandTable equalize_gains(const pamodel::PaParams& params, std::span<const Band> bands,
                         double target_gain_db, double idq,
                         const BandTable& base = default_band_table());

/// Two-state (Linear / Compression) controller. A class change must persist
/// for `hysteresis_windows` consecutive windows before the mode switches.
/// Starts in Linear mode.
class BiasController {
public:
    BiasController(pamodel::PaParams params, BandTable table, ControlSettings settings = {});

    /// Consumes one classification window and returns the command in force.
    BiasCommand on_window(const EnvelopeClass& cls, Band band, double setpoint_w,
                          const IqBlock* exciter = nullptr);

    BiasMode mode() const noexcept { return mode_; }

private:
    pamodel::PaParams params_;
    BandTable table_;
    ControlSettings settings_;
    BiasMode mode_ = BiasMode::Linear;
    int pending_ = 0;
};

}  // namespace pabias::biasctl
