#include "pabias/pamodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pabias/error.hpp"

namespace pabias::pamodel {
namespace {

constexpr double kPi = std::numbers::pi;

// Conduction currents for a waveform biased at `bias` (may be negative, i.e.
// class C) with unit-free peak `ipk`. No argument checks.
ConductionCurrents clipped_cosine(double bias, double ipk) {
    if (ipk <= 0.0 || ipk <= bias) {
        return {2.0 * kPi, std::max(bias, 0.0), ipk > 0.0 ? ipk : 0.0};
    }
    const double alpha = 2.0 * std::acos(std::clamp(-bias / ipk, -1.0, 1.0));
    const double half_sin = std::sin(alpha / 2.0);
    const double idc = (bias * alpha + 2.0 * ipk * half_sin) / (2.0 * kPi);
    const double i1 = (2.0 * bias * half_sin + ipk * (alpha / 2.0 + std::sin(alpha) / 2.0)) / kPi;
    return {alpha, idc, i1};
}

}  // namespace

double PaParams::ripple_for(std::optional<Band> band) const {
    if (!band) {
        return 0.0;
    }
    auto it = ripple_db.find(*band);
    return it == ripple_db.end() ? 0.0 : it->second;
}

void validate(const PaParams& p) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
    if (!(std::isfinite(p.g0) && p.g0 > 0.0)) fail("g0 must be > 0");
    if (!(std::isfinite(p.rload) && p.rload > 0.0)) fail("rload must be > 0");
    if (!(p.vknee >= 0.0 && p.vknee < 30.0)) fail("vknee must be in [0, 30)");
    if (!(p.smoothness >= 0.5 && p.smoothness <= 20.0)) fail("smoothness must be in [0.5, 20]");
    if (!std::isfinite(p.kv) || !std::isfinite(p.ki)) fail("kv and ki must be finite");
    for (const auto& [band, db] : p.ripple_db) {
        if (!std::isfinite(db)) fail("ripple for " + std::string(to_string(band)) + " not finite");
    }
}

void validate(const BiasPoint& b) {
    if (!(b.vdd >= kMinVdd && b.vdd <= kMaxVdd)) {
        throw Error(ErrorCode::InvalidBias, "vdd " + std::to_string(b.vdd) + " V outside [30, 58]");
    }
    if (!(std::isfinite(b.idq) && b.idq > 0.0)) {
        throw Error(ErrorCode::InvalidBias, "idq must be > 0");
    }
    if (b.gate_step < 0 || b.gate_step > 4) {
        throw Error(ErrorCode::InvalidBias, "gate step must be in 0..4");
    }
}

ConductionCurrents conduction_currents(double idq, double ipk) {
    if (!(idq > 0.0)) {
        throw Error(ErrorCode::NonPositiveIdq, "idq must be > 0");
    }
    return clipped_cosine(idq, std::max(ipk, 0.0));
}

double peak_for_fundamental(double idq, double i1) {
    if (!(idq > 0.0)) {
        throw Error(ErrorCode::NonPositiveIdq, "idq must be > 0");
    }
    if (i1 <= idq) {
        return std::max(i1, 0.0);  // unclipped: fundamental equals the cosine amplitude
    }
    // i1(ipk) is concave and increasing with slope in [1/2, 1]; Newton from
    // the left converges monotonically.
    double ipk = i1;
    for (int iter = 0; iter < 60; ++iter) {
        const auto cc = clipped_cosine(idq, ipk);
        const double slope = (cc.alpha / 2.0 + std::sin(cc.alpha) / 2.0) / kPi;
        const double step = (i1 - cc.i1) / slope;
        ipk += step;
        if (std::abs(step) <= 1e-14 * ipk) {
            break;
        }
    }
    return ipk;
}

double small_signal_gain_db(const BiasPoint& bias, const PaParams& params, std::optional<Band> band) {
    return 20.0 * std::log10(params.g0) + params.kv * (bias.vdd - kReferenceVdd) +
           params.ki * std::log10(bias.idq / kReferenceIdq) + params.ripple_for(band);
}

double rapp(double a_in, double gain, double a_sat, double s) {
    const double linear = gain * a_in;
    if (linear <= 0.0) {
        return 0.0;
    }
    // Written as a_sat * r / (1 + r^2s)^(1/2s) with r = linear / a_sat, evaluated
    // in log space for large r so the power does not overflow.
    const double r = linear / a_sat;
    const double two_s = 2.0 * s;
    if (r > 1.0) {
        const double inv = std::pow(r, -two_s);
        return a_sat / std::pow(1.0 + inv, 1.0 / two_s);
    }
    return linear / std::pow(1.0 + std::pow(r, two_s), 1.0 / two_s);
}

double am_am(double a_in, const BiasPoint& bias, const PaParams& params, std::optional<Band> band) {
    const double gain = std::pow(10.0, small_signal_gain_db(bias, params, band) / 20.0);
    return rapp(std::max(a_in, 0.0), gain, saturation_envelope(bias, params), params.smoothness);
}

SimResult simulate(const IqBlock& input, const BiasPoint& bias, const PaParams& params,
                   std::optional<Band> band) {
    validate(bias);
    validate(params);

    const double gain = std::pow(10.0, small_signal_gain_db(bias, params, band) / 20.0);
    const double a_sat = saturation_envelope(bias, params);

    SimResult result;
    result.output.sample_rate = input.sample_rate;
    result.output.samples.resize(input.samples.size());

    double sum_idc = 0.0;
    double sum_out2 = 0.0;
    // Constant-envelope blocks repeat the same magnitude; reuse the last solve.
    double last_in = -1.0;
    double last_out = 0.0;
    double last_idc = 0.0;
    for (std::size_t k = 0; k < input.samples.size(); ++k) {
        const Complex x = input.samples[k];
        const double a_in = std::abs(x);
        if (a_in != last_in) {
            last_in = a_in;
            last_out = rapp(a_in, gain, a_sat, params.smoothness);
            const double ipk = peak_for_fundamental(bias.idq, last_out / params.rload);
            last_idc = clipped_cosine(bias.idq, ipk).idc;
        }
        result.output.samples[k] = a_in > 0.0 ? x * (last_out / a_in) : Complex{};
        sum_idc += last_idc;
        sum_out2 += last_out * last_out;
    }

    const double n = static_cast<double>(std::max<std::size_t>(input.samples.size(), 1));
    PaStats& st = result.stats;
    st.pout_w = sum_out2 / n / (2.0 * params.rload);
    st.pdc_w = bias.vdd * (input.samples.empty() ? bias.idq : sum_idc / n);
    st.eff = st.pdc_w > 0.0 ? st.pout_w / st.pdc_w : 0.0;
    st.pdiss_w = st.pdc_w - st.pout_w;
    const double p_in = mean_power(input.samples);
    st.gain_db = p_in > 0.0 ? 10.0 * std::log10(mean_power(result.output.samples) / p_in)
                            : std::numeric_limits<double>::quiet_NaN();
    return result;
}

std::vector<EfficiencyPoint> efficiency_curve(std::span<const double> alphas, double swing) {
    std::vector<EfficiencyPoint> curve;
    curve.reserve(alphas.size());
    for (double alpha : alphas) {
        if (!(alpha > 0.0 && alpha <= 2.0 * kPi)) {
            throw Error(ErrorCode::OutOfRangeAlpha, "conduction angle must be in (0, 2 pi]");
        }
        // Bias that yields this conduction angle for a unit peak.
        const double bias = -std::cos(alpha / 2.0);
        const auto cc = alpha >= 2.0 * kPi ? ConductionCurrents{alpha, 1.0, 1.0}
                                           : clipped_cosine(bias, 1.0);
        curve.push_back({alpha, 0.5 * swing * cc.i1 / cc.idc});
    }
    return curve;
}

}  // namespace pabias::pamodel
