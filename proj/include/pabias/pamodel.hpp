#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pabias/bands.hpp"
#include "pabias/iq.hpp"

namespace pabias::pamodel {

/// Gain-law reference point: g0 is the small-signal voltage gain here.
inline constexpr double kReferenceVdd = 58.0;
inline constexpr double kReferenceIdq = 2.0;

inline constexpr double kMinVdd = 30.0;
inline constexpr double kMaxVdd = 58.0;

/// Behavioral class-AB amplifier parameters.
///
/// Small-signal gain (dB) = 20 log10(g0) + kv (vdd - 58) + ki log10(idq / 2) + ripple[band].
/// Saturation envelope    = vdd - vknee.
/// Compression follows a Rapp soft limiter of sharpness `smoothness`.
struct PaParams {
    double g0 = 31.622776601683793;  // 30 dB
    double kv = 0.0;                 // dB per volt
    double ki = 0.0;                 // dB per decade of idq
    double rload = 1.682;            // ohms
    double vknee = 4.0;              // volts
    double smoothness = 2.0;
    std::map<Band, double> ripple_db;

    double ripple_for(std::optional<Band> band) const;
};

/// Throws Error{InvalidParams} when an invariant is violated.
void validate(const PaParams& params);

struct BiasPoint {
    double vdd = kMaxVdd;   // volts
    double idq = 2.0;       // amperes
    int gate_step = 4;
};

/// Throws Error{InvalidBias}.
void validate(const BiasPoint& bias);

struct PaStats {
    double pout_w = 0.0;
    double pdc_w = 0.0;
    double eff = 0.0;
    double pdiss_w = 0.0;
    double gain_db = 0.0;  // NaN when the input carried no power
};

struct ConductionCurrents {
    double alpha = 0.0;  // conduction angle, radians
    double idc = 0.0;    // DC component
    double i1 = 0.0;     // fundamental (cosine) component
};

/// Fourier DC and fundamental of i(theta) = max(0, idq + ipk cos theta).
/// Throws Error{NonPositiveIdq} for idq <= 0.
ConductionCurrents conduction_currents(double idq, double ipk);

/// Inverse of conduction_currents in its fundamental: the cosine amplitude
/// whose clipped waveform carries `i1` at the fundamental.
double peak_for_fundamental(double idq, double i1);

double small_signal_gain_db(const BiasPoint& bias, const PaParams& params,
                            std::optional<Band> band = std::nullopt);

inline double saturation_envelope(const BiasPoint& bias, const PaParams& params) {
    return bias.vdd - params.vknee;
}

/// Rapp limiter with linear gain `gain`, output ceiling `a_sat`, knee `s`.
double rapp(double a_in, double gain, double a_sat, double s);

/// Output envelope for input envelope `a_in` at the given bias.
double am_am(double a_in, const BiasPoint& bias, const PaParams& params,
             std::optional<Band> band = std::nullopt);

struct SimResult {
    IqBlock output;
    PaStats stats;
};

/// Envelope-domain simulation: AM/AM per sample (phase untouched), drain
/// current from the conduction-angle waveform that carries a_out / rload at
/// the fundamental, DC power vdd * mean(idc).
SimResult simulate(const IqBlock& input, const BiasPoint& bias, const PaParams& params,
                   std::optional<Band> band = std::nullopt);

struct EfficiencyPoint {
    double alpha = 0.0;
    double eta = 0.0;
};

/// Drain efficiency of a reduced-conduction-angle waveform,
/// eta = 0.5 * swing * i1 / idc, where swing = V1 / vdd (1 = full swing).
/// Throws Error{OutOfRangeAlpha} outside (0, 2 pi].
std::vector<EfficiencyPoint> efficiency_curve(std::span<const double> alphas, double swing = 1.0);

}  // namespace pabias::pamodel
