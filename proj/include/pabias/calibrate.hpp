#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "pabias/pamodel.hpp"

namespace pabias::calibrate {

/// One row of a CW drain-bias table: gain, efficiency and dissipation at a
/// fixed output power.
struct AnchorRow {
    double vdd = 0.0;
    double gain_db = 0.0;
    double eff_pct = 0.0;
    double pout_w = 0.0;
    double pdiss_w = 0.0;
};

struct AnchorError {
    double vdd = 0.0;
    double gain_err_db = 0.0;   // model - anchor
    double eff_err_pp = 0.0;
    bool reachable = true;
};

struct FitReport {
    pamodel::PaParams params;
    double residual = 0.0;
    std::vector<AnchorError> errors;
    int evaluations = 0;
};

/// Residual normalizers: one unit of residual per 0.5 dB gain or 2 pp efficiency.
inline constexpr double kGainScaleDb = 0.5;
inline constexpr double kEffScalePp = 2.0;
/// Contribution of an anchor whose output power cannot be reached.
inline constexpr double kUnreachablePenalty = 1e6;

/// Search bounds; candidates are clamped into them before evaluation.
struct ParamBounds {
    double g0_db_min = 0.0, g0_db_max = 60.0;
    double kv_min = -2.0, kv_max = 2.0;
    double ki_min = -20.0, ki_max = 20.0;
    double rload_min = 0.05, rload_max = 50.0;
    double vknee_min = 0.0, vknee_max = 29.9;
    double smoothness_min = 0.5, smoothness_max = 20.0;
};

/// Sum over anchors of (dGain/0.5)^2 + (dEff/2)^2, each anchor evaluated by
/// driving the model to the anchor's output power at its vdd and `idq`.
/// Unreachable anchors and invalid parameters add kUnreachablePenalty plus
/// the power shortfall in dB squared, so the value stays finite and graded.
double objective(const pamodel::PaParams& params, std::span<const AnchorRow> anchors,
                 double idq = 2.0);

std::vector<AnchorError> anchor_errors(const pamodel::PaParams& params,
                                       std::span<const AnchorRow> anchors, double idq = 2.0);

/// Starting point used when no init file is supplied: 30 dB gain, load line
/// vdd^2 / (2 pout) from the highest-voltage anchor, 4 V knee, s = 2.
pamodel::PaParams default_init(std::span<const AnchorRow> anchors);

/// Nelder-Mead over {g0, kv, rload, vknee, smoothness}; ki is carried over
/// from `init` since a single-idq table cannot constrain it. Never returns a
/// residual above the initial one. Throws Error{Diverged} when the
/// objective becomes non-finite.
FitReport fit(std::span<const AnchorRow> anchors, const pamodel::PaParams& init, int budget,
              double idq = 2.0, const ParamBounds& bounds = {});

inline constexpr const char* kAnchorCsvHeader = "vdd_V,gain_dB,eff_pct,pout_W,pdiss_W";

/// Reads anchors in kAnchorCsvHeader layout (header line required). Throws
/// Error{ParseError}.
std::vector<AnchorRow> read_anchors(std::istream& in);

inline constexpr const char* kReportCsvHeader =
    "vdd_V,gain_err_dB,eff_err_pp,reachable,residual";

void write_report(std::ostream& os, const FitReport& report);

/// The three CW rows (58/53/48 V, 1 kW) the default calibration targets.
std::vector<AnchorRow> reference_anchors();

}  // namespace pabias::calibrate
