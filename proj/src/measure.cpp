#include "pabias/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "pabias/biasctl.hpp"
#include "pabias/error.hpp"
#include "pabias/signalgen.hpp"

namespace pabias::measure {
namespace {

constexpr int kBisectionSteps = 60;
constexpr double kPoutTolerance = 1e-3;

// 5-term flat top: scalloping loss below 0.02 dB, leakage confined to +-4 bins
// for bin-centred tones.
constexpr double kFlatTop[] = {0.21557895, 0.41663158, 0.277263158, 0.083578947, 0.006947368};

std::vector<double> flat_top_window(std::size_t n) {
    std::vector<double> w(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (int k = 0; k < 5; ++k) {
            v += ((k % 2) ? -1.0 : 1.0) * kFlatTop[k] * std::cos(k * step * static_cast<double>(i));
        }
        w[i] = v;
    }
    return w;
}

class BinProbe {
public:
    BinProbe(const IqBlock& block) : n_(block.size()), windowed_(block.samples), twiddle_(n_) {
        const auto w = flat_top_window(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            windowed_[i] *= w[i];
            twiddle_[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) /
                                              static_cast<double>(n_));
        }
        bin_hz_ = block.sample_rate / static_cast<double>(n_);
    }

    double bin_hz() const { return bin_hz_; }

    double power_at_bin(long long bin) const {
        const auto nn = static_cast<long long>(n_);
        const auto k = static_cast<std::size_t>(((bin % nn) + nn) % nn);
        Complex acc{};
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            acc += windowed_[i] * twiddle_[idx];
            idx += k;
            if (idx >= n_) idx -= n_;
        }
        return std::norm(acc);
    }

    // Strongest of the three bins around `freq_hz`.
    double peak_power(double freq_hz) const {
        const auto centre = static_cast<long long>(std::llround(freq_hz / bin_hz_));
        double best = 0.0;
        for (long long d = -1; d <= 1; ++d) {
            best = std::max(best, power_at_bin(centre + d));
        }
        return best;
    }

private:
    std::size_t n_;
    std::vector<Complex> windowed_;
    std::vector<Complex> twiddle_;
    double bin_hz_ = 1.0;
};

// Drive at which `transfer` sits `depth_db` below the small-signal gain.
// Bisection in log-drive; compression is monotone for the limiters we model.
double bisect_compression(const std::function<double(double)>& transfer, double small_signal_gain,
                          double max_drive, double depth_db) {
    const double g_ss_db = 20.0 * std::log10(small_signal_gain);
    auto compression_db = [&](double drive) {
        return g_ss_db - 20.0 * std::log10(transfer(drive) / drive);
    };
    if (!(compression_db(max_drive) >= depth_db)) {
        throw Error(ErrorCode::NoCompression, "gain never drops " + std::to_string(depth_db) +
                                                  " dB below small-signal");
    }
    double lo = max_drive * 1e-9;
    double hi = max_drive;
    for (int i = 0; i < 200 && hi / lo - 1.0 > 1e-15; ++i) {
        const double mid = std::sqrt(lo * hi);
        const double c = compression_db(mid);
        if (std::abs(c - depth_db) <= 1e-4) {
            return mid;
        }
        if (c < depth_db) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

IqBlock cw_block(double drive) {
    // A few samples suffice: the envelope is constant and the model is memoryless.
    return IqBlock{std::vector<Complex>(8, Complex{drive, 0.0}), 1e6};
}

double pout_at(double drive, const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
               std::optional<Band> band) {
    const double a = pamodel::am_am(drive, bias, params, band);
    return a * a / (2.0 * params.rload);
}

}  // namespace

MeasRow make_row(const pamodel::BiasPoint& bias, const pamodel::PaStats& stats,
                 std::optional<Band> band) {
    MeasRow row;
    row.vdd = bias.vdd;
    row.idq = bias.idq;
    row.band = band;
    row.pout_w = stats.pout_w;
    if (std::isfinite(stats.gain_db)) {
        row.gain_db = stats.gain_db;
    }
    row.eff_pct = 100.0 * stats.eff;
    row.pdiss_w = stats.pdiss_w;
    return row;
}

std::optional<double> ImdResult::worst_dbc(int order) const {
    std::optional<double> worst;
    for (const auto& p : products) {
        if (p.order == order) {
            worst = worst ? std::max(*worst, p.level_dbc) : p.level_dbc;
        }
    }
    return worst;
}

double measure_gain(const IqBlock& input, const IqBlock& output) {
    if (input.size() != output.size()) {
        throw Error(ErrorCode::LengthMismatch, "input has " + std::to_string(input.size()) +
                                                   " samples, output " + std::to_string(output.size()));
    }
    if (input.sample_rate != output.sample_rate) {
        throw Error(ErrorCode::LengthMismatch, "sample rates differ");
    }
    return 10.0 * std::log10(mean_power(output.samples) / mean_power(input.samples));
}

ImdResult measure_imd(const IqBlock& output, double f1_hz, double f2_hz, const ImdOptions& options) {
    const double spacing = std::abs(f2_hz - f1_hz);
    if (spacing <= 0.0) {
        throw Error(ErrorCode::TonesUnresolvable, "tone frequencies coincide");
    }
    if (output.duration() * spacing < 20.0) {
        throw Error(ErrorCode::TonesUnresolvable, "block shorter than 20 beat periods");
    }
    const double bin_hz = output.sample_rate / static_cast<double>(output.size());
    if (spacing < 10.0 * bin_hz) {
        throw Error(ErrorCode::TonesUnresolvable, "tone spacing below 10 DFT bins");
    }

    const BinProbe probe(output);
    ImdResult result;
    result.fundamental_power = 0.5 * (probe.peak_power(f1_hz) + probe.peak_power(f2_hz));
    const double ref = result.fundamental_power;
    const double floor = ref * std::pow(10.0, options.floor_dbc / 10.0);
    const double nyquist = output.sample_rate / 2.0;

    for (int order = 3; order <= options.max_order; order += 2) {
        const int m = (order - 1) / 2;
        const double lower = (m + 1) * f1_hz - m * f2_hz;
        const double upper = (m + 1) * f2_hz - m * f1_hz;
        for (double f : {lower, upper}) {
            if (std::abs(f) >= nyquist) {
                continue;
            }
            const double p = ref > 0.0 ? probe.peak_power(f) : 0.0;
            const double level = ref > 0.0 ? 10.0 * std::log10((p + floor) / ref) : options.floor_dbc;
            result.products.push_back({order, f, level});
        }
    }
    return result;
}

double find_p1db(const std::function<double(double)>& transfer, double small_signal_gain,
                 double max_drive) {
    return bisect_compression(transfer, small_signal_gain, max_drive, 1.0);
}

double find_p1db(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                 std::optional<Band> band) {
    return drive_for_compression(bias, params, 1.0, band);
}

double drive_for_compression(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                             double depth_db, std::optional<Band> band) {
    pamodel::validate(params);
    const double gain = std::pow(10.0, pamodel::small_signal_gain_db(bias, params, band) / 20.0);
    const double a_sat = pamodel::saturation_envelope(bias, params);
    auto transfer = [&](double a_in) { return pamodel::am_am(a_in, bias, params, band); };
    return bisect_compression(transfer, gain, 10.0 * a_sat / gain, depth_db);
}

pamodel::PaStats cw_stats(double drive, const pamodel::BiasPoint& bias,
                          const pamodel::PaParams& params, std::optional<Band> band) {
    return pamodel::simulate(cw_block(drive), bias, params, band).stats;
}

double cw_drive_for_pout(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                         double target_pout_w, std::optional<Band> band) {
    pamodel::validate(bias);
    pamodel::validate(params);
    if (target_pout_w <= 0.0) {
        return 0.0;
    }
    const double gain = std::pow(10.0, pamodel::small_signal_gain_db(bias, params, band) / 20.0);
    double lo = 0.0;
    double hi = 10.0 * pamodel::saturation_envelope(bias, params) / gain;
    for (int i = 0; i < kBisectionSteps; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pout_at(mid, bias, params, band) < target_pout_w ? lo : hi) = mid;
    }
    const double drive = 0.5 * (lo + hi);
    const double achieved = pout_at(drive, bias, params, band);
    if (std::abs(achieved - target_pout_w) > kPoutTolerance * target_pout_w) {
        throw Error(ErrorCode::TargetUnreachable,
                    "output saturates at " + std::to_string(achieved) + " W below target " +
                        std::to_string(target_pout_w) + " W at " + std::to_string(bias.vdd) + " V");
    }
    return drive;
}

std::vector<MeasRow> sweep_bias(std::span<const double> vdd_list, double idq, double target_pout_w,
                                const pamodel::PaParams& params) {
    std::vector<MeasRow> rows;
    rows.reserve(vdd_list.size());
    for (double vdd : vdd_list) {
        const pamodel::BiasPoint bias{vdd, idq, biasctl::gate_step_for(idq)};
        const double drive = cw_drive_for_pout(bias, params, target_pout_w);
        rows.push_back(make_row(bias, cw_stats(drive, bias, params)));
    }
    return rows;
}

std::vector<MeasRow> freq_response(std::span<const Band> bands, double drive,
                                   const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                                   const BandTable& table) {
    std::vector<MeasRow> rows;
    for (Band b : bands) {
        if (!table.contains(b)) {
            throw Error(ErrorCode::UnknownBand, std::string(to_string(b)) + " not in band table");
        }
        rows.push_back(make_row(bias, cw_stats(drive, bias, params, b), b));
    }
    return rows;
}

std::vector<MeasRow> freq_response_equalized(std::span<const Band> bands, double drive, double idq,
                                             const pamodel::PaParams& params,
                                             const BandTable& table) {
    std::vector<MeasRow> rows;
    for (Band b : bands) {
        auto it = table.find(b);
        if (it == table.end()) {
            throw Error(ErrorCode::UnknownBand, std::string(to_string(b)) + " not in band table");
        }
        const pamodel::BiasPoint bias{it->second.eq_vdd, idq, biasctl::gate_step_for(idq)};
        rows.push_back(make_row(bias, cw_stats(drive, bias, params, b), b));
    }
    return rows;
}

MeasRow two_tone_row(double peak_drive, const pamodel::BiasPoint& bias,
                     const pamodel::PaParams& params, const TwoToneSetup& setup,
                     std::optional<Band> band) {
    signalgen::WaveformSpec spec;
    spec.kind = signalgen::WaveformKind::TwoTone;
    spec.amplitude = peak_drive;
    spec.tone1_hz = -setup.spacing_hz / 2.0;
    spec.tone2_hz = setup.spacing_hz / 2.0;
    spec.duration_s = static_cast<double>(setup.length) / setup.sample_rate;
    const IqBlock input = signalgen::generate(spec, setup.sample_rate);
    const auto sim = pamodel::simulate(input, bias, params, band);
    MeasRow row = make_row(bias, sim.stats, band);
    const auto imd = measure_imd(sim.output, spec.tone1_hz, spec.tone2_hz);
    row.imd3_dbc = imd.worst_dbc(3);
    row.imd5_dbc = imd.worst_dbc(5);
    return row;
}

void write_csv(std::ostream& os, std::span<const MeasRow> rows) {
    os << kMeasCsvHeader << '\n';
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    for (const auto& r : rows) {
        os << num(r.vdd) << ',' << num(r.idq) << ',' << (r.band ? to_string(*r.band) : "") << ','
           << num(r.pout_w) << ',' << opt(r.gain_db) << ',' << num(r.eff_pct) << ','
           << num(r.pdiss_w) << ',' << opt(r.imd3_dbc) << ',' << opt(r.imd5_dbc) << '\n';
    }
}

}  // namespace pabias::measure
