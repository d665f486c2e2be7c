#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pabias/bands.hpp"
#include "pabias/iq.hpp"
#include "pabias/pamodel.hpp"

namespace pabias::measure {

/// One measurement record. Optional columns are written empty in CSV.
struct MeasRow {
    double vdd = 0.0;
    double idq = 0.0;
    std::optional<Band> band;
    double pout_w = 0.0;
    std::optional<double> gain_db;
    double eff_pct = 0.0;
    double pdiss_w = 0.0;
    std::optional<double> imd3_dbc;
    std::optional<double> imd5_dbc;
};

MeasRow make_row(const pamodel::BiasPoint& bias, const pamodel::PaStats& stats,
                 std::optional<Band> band = std::nullopt);

struct ImdProduct {
    int order = 3;
    double freq_hz = 0.0;   // baseband frequency of the product
    double level_dbc = 0.0; // relative to the mean per-tone fundamental
};

struct ImdResult {
    double fundamental_power = 0.0;  // mean per-tone bin power (windowed)
    std::vector<ImdProduct> products;

    /// Worse (higher) of the two products of `order`; nullopt if not measured.
    std::optional<double> worst_dbc(int order) const;
};

struct ImdOptions {
    int max_order = 9;
    double floor_dbc = -120.0;  // injected floor so linear cases stay finite
};

/// 10 log10(mean|out|^2 / mean|in|^2). Throws Error{LengthMismatch}.
double measure_gain(const IqBlock& input, const IqBlock& output);

/// Two-tone intermodulation from a flat-top windowed DFT. Each tone and
/// product is the strongest of the three bins around its nominal frequency.
/// Throws Error{TonesUnresolvable} when the block holds fewer than 20 beat
/// periods or the tones sit closer than 10 bins.
ImdResult measure_imd(const IqBlock& output, double f1_hz, double f2_hz,
                      const ImdOptions& options = {});

/// Drive level where gain = small-signal gain - 1 dB, by bisection to 0.01 dB.
/// Throws Error{NoCompression} if the gain never drops 1 dB within
/// `max_drive`.
double find_p1db(const std::function<double(double)>& transfer, double small_signal_gain,
                 double max_drive);

/// P1dB of the amplifier model at `bias` (input envelope, volts-equivalent).
double find_p1db(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                 std::optional<Band> band = std::nullopt);

/// Input envelope where the gain sits `depth_db` below small-signal.
double drive_for_compression(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                             double depth_db, std::optional<Band> band = std::nullopt);

/// Amplifier statistics for a CW input of envelope `drive`.
pamodel::PaStats cw_stats(double drive, const pamodel::BiasPoint& bias,
                          const pamodel::PaParams& params, std::optional<Band> band = std::nullopt);

/// CW drive reaching `target_pout_w` within 0.1 %, 60 bisection steps.
/// Throws Error{TargetUnreachable}.
double cw_drive_for_pout(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                         double target_pout_w, std::optional<Band> band = std::nullopt);

/// One row per vdd, in input order: CW driven to `target_pout_w`.
std::vector<MeasRow> sweep_bias(std::span<const double> vdd_list, double idq, double target_pout_w,
                                const pamodel::PaParams& params);

/// Constant-drive CW per band with the params' ripple profile applied.
std::vector<MeasRow> freq_response(std::span<const Band> bands, double drive,
                                   const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                                   const BandTable& table = default_band_table());

/// Same, but each band runs at its equalization vdd from `table`.
std::vector<MeasRow> freq_response_equalized(std::span<const Band> bands, double drive, double idq,
                                             const pamodel::PaParams& params,
                                             const BandTable& table);

/// Two-tone drive: tones at +-spacing/2, envelope peak `peak_drive`.
struct TwoToneSetup {
    double sample_rate = 1e6;
    std::size_t length = std::size_t{1} << 17;
    double spacing_hz = 2e3;
};

/// Runs a two-tone block through the model and fills gain, efficiency and IMD.
MeasRow two_tone_row(double peak_drive, const pamodel::BiasPoint& bias,
                     const pamodel::PaParams& params, const TwoToneSetup& setup = {},
                     std::optional<Band> band = std::nullopt);

inline constexpr const char* kMeasCsvHeader =
    "vdd_V,idq_A,band,pout_W,gain_dB,eff_pct,pdiss_W,imd3_dBc,imd5_dBc";

void write_csv(std::ostream& os, std::span<const MeasRow> rows);

}  // namespace pabias::measure
