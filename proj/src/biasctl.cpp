#include "pabias/biasctl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pabias/error.hpp"
#include "pabias/measure.hpp"

namespace pabias::biasctl {

std::string_view to_string(EnvelopeKind kind) {
    return kind == EnvelopeKind::Constant ? "Constant" : "Varying";
}

std::string_view to_string(BiasMode mode) {
    return mode == BiasMode::Compression ? "compression" : "linear";
}

EnvelopeKind classify_metrics(double papr_db, double ripple_ratio,
                              const ClassifierThresholds& thresholds) {
    return (ripple_ratio < thresholds.ripple_ratio && papr_db < thresholds.papr_db)
               ? EnvelopeKind::Constant
               : EnvelopeKind::Varying;
}

EnvelopeClass classify_envelope(const IqBlock& block, double window_s,
                                const ClassifierThresholds& thresholds) {
    const auto n = static_cast<std::size_t>(std::llround(window_s * block.sample_rate));
    if (n == 0 || n > block.size()) {
        throw Error(ErrorCode::WindowTooShort,
                    "block of " + std::to_string(block.duration()) + " s cannot fill a " +
                        std::to_string(window_s) + " s window");
    }
    const std::span<const Complex> window(block.samples.data(), n);
    std::vector<double> env(n);
    std::transform(window.begin(), window.end(), env.begin(),
                   [](const Complex& z) { return std::abs(z); });

    EnvelopeClass cls;
    cls.papr_db = papr_db(window);
    const double median = quantile(env, 0.5);
    cls.ripple_ratio = median > 0.0 ? (quantile(env, 0.99) - quantile(env, 0.01)) / median
                                    : std::numeric_limits<double>::infinity();
    cls.kind = classify_metrics(cls.papr_db, cls.ripple_ratio, thresholds);
    return cls;
}

double track_drain(double peak_envelope_v, double margin, double vknee) {
    return std::clamp(peak_envelope_v * (1.0 + margin) + vknee, pamodel::kMinVdd, pamodel::kMaxVdd);
}

int gate_step_for(double idq_target) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(kGateStepIdq.size()); ++i) {
        // Strict comparison keeps the lower step on exact ties.
        if (std::abs(kGateStepIdq[i] - idq_target) < std::abs(kGateStepIdq[best] - idq_target)) {
            best = i;
        }
    }
    return best;
}

double peak_envelope(const IqBlock& block, double q) {
    return quantile(envelope(block), q);
}

double predict_output_peak(double setpoint_w, const pamodel::PaParams& params,
                           const IqBlock* exciter, double q) {
    const double rms_out = std::sqrt(2.0 * params.rload * setpoint_w);  // envelope RMS at setpoint
    if (exciter == nullptr || exciter->size() == 0) {
        return rms_out;
    }
    const double rms_in = std::sqrt(mean_power(exciter->samples));
    if (rms_in <= 0.0) {
        return 0.0;
    }
    return peak_envelope(*exciter, q) * rms_out / rms_in;
}

BiasCommand command_for_mode(BiasMode mode, double setpoint_w, Band band,
                             const pamodel::PaParams& params, const BandTable& table,
                             const ControlSettings& settings, const IqBlock* exciter) {
    auto it = table.find(band);
    if (it == table.end()) {
        throw Error(ErrorCode::UnknownBand, std::string(to_string(band)) + " not in band table");
    }
    if (!(setpoint_w > 0.0)) {
        throw Error(ErrorCode::SetpointUnreachable, "setpoint must be > 0 W");
    }

    BiasCommand cmd;
    cmd.mode = mode;
    if (mode == BiasMode::Linear) {
        cmd.target = {it->second.eq_vdd, kLinearIdq, gate_step_for(kLinearIdq)};
        try {
            cmd.drive = measure::cw_drive_for_pout(cmd.target, params, setpoint_w, band);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TargetUnreachable) throw;
            throw Error(ErrorCode::SetpointUnreachable, e.what());
        }
    } else {
        const double peak = predict_output_peak(setpoint_w, params, exciter, settings.peak_quantile);
        const double vdd = track_drain(peak, settings.margin, params.vknee);
        cmd.target = {vdd, kCompressionIdq, gate_step_for(kCompressionIdq)};
        cmd.drive = measure::drive_for_compression(cmd.target, params, settings.compression_db, band);
    }
    cmd.predicted_pout_w = measure::cw_stats(cmd.drive, cmd.target, params, band).pout_w;
    if (cmd.predicted_pout_w < setpoint_w * (1.0 - 1e-3)) {
        throw Error(ErrorCode::SetpointUnreachable,
                    std::to_string(setpoint_w) + " W exceeds the " + std::string(to_string(mode)) +
                        "-mode output of " + std::to_string(cmd.predicted_pout_w) + " W");
    }
    return cmd;
}

BiasCommand decide_bias(const EnvelopeClass& cls, double setpoint_w, Band band,
                        const pamodel::PaParams& params, const BandTable& table,
                        const ControlSettings& settings, const IqBlock* exciter) {
    BiasCommand cmd =
        command_for_mode(mode_for(cls.kind), setpoint_w, band, params, table, settings, exciter);
    cmd.reason = cls;
    return cmd;
}

BandTable equalize_gains(const pamodel::PaParams& params, std::span<const Band> bands,
                         double target_gain_db, double idq, const BandTable& base) {
    BandTable table = base;
    for (Band b : bands) {
        BandEntry entry = table.contains(b) ? table.at(b) : BandEntry{band_center_hz(b)};
        entry.ripple_db = params.ripple_for(b);

        auto gain_at = [&](double vdd) {
            return pamodel::small_signal_gain_db({vdd, idq, gate_step_for(idq)}, params, b);
        };
        const double g_lo = gain_at(pamodel::kMinVdd);
        const double g_hi = gain_at(pamodel::kMaxVdd);
        const bool rising = g_hi >= g_lo;
        const double g_min = std::min(g_lo, g_hi);
        const double g_max = std::max(g_lo, g_hi);

        if (target_gain_db < g_min - 0.1 || target_gain_db > g_max + 0.1) {
            const bool want_lower = target_gain_db < g_min;
            entry.eq_vdd = (want_lower == rising) ? pamodel::kMinVdd : pamodel::kMaxVdd;
            entry.reachable = false;
        } else {
            double lo = pamodel::kMinVdd;
            double hi = pamodel::kMaxVdd;
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                if ((gain_at(mid) < target_gain_db) == rising) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            entry.eq_vdd = 0.5 * (lo + hi);
            entry.reachable = std::abs(gain_at(entry.eq_vdd) - target_gain_db) <= 0.1;
        }
        table[b] = entry;
    }
    return table;
}

BiasController::BiasController(pamodel::PaParams params, BandTable table, ControlSettings settings)
    : params_(std::move(params)), table_(std::move(table)), settings_(settings) {}

BiasCommand BiasController::on_window(const EnvelopeClass& cls, Band band, double setpoint_w,
                                      const IqBlock* exciter) {
    const BiasMode wanted = mode_for(cls.kind);
    if (wanted == mode_) {
        pending_ = 0;
    } else if (++pending_ >= settings_.hysteresis_windows) {
        mode_ = wanted;
        pending_ = 0;
    }
    BiasCommand cmd = command_for_mode(mode_, setpoint_w, band, params_, table_, settings_,
                                       mode_ == BiasMode::Compression ? exciter : nullptr);
    cmd.reason = cls;
    return cmd;
}

}  // namespace pabias::biasctl
