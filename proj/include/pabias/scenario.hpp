#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pabias/bands.hpp"
#include "pabias/biasctl.hpp"
#include "pabias/pamodel.hpp"
#include "pabias/psusim.hpp"
#include "pabias/signalgen.hpp"

namespace pabias::scenario {

/// One exciter change: from `t_s` on, the exciter sends `kind` on `band`
/// and the operator asks for `setpoint_w`.
struct Event {
    double t_s = 0.0;
    std::string kind;        // waveform name, see signalgen::parse_kind
    Band band = Band::M20;
    double setpoint_w = 0.0;
};

/// Lines of `t_s kind band setpoint_W`; blank lines and `#` comments are
/// skipped. Throws Error{ParseError} for malformed lines or times that do
/// not strictly increase, and the module errors for bad kinds/bands.
std::vector<Event> parse(std::istream& in);

struct RunOptions {
    double window_s = 10e-3;       // classification window (controller poll period)
    double sample_rate = 1e6;
    double tail_s = 50e-3;         // time simulated after the last event
    biasctl::ControlSettings settings;
    psusim::PsuState supply;
};

struct LogRow {
    double t_s = 0.0;
    biasctl::BiasMode mode = biasctl::BiasMode::Linear;
    double vdd = 0.0;     // set voltage acknowledged by the supply
    double idq = 0.0;
    int gate_step = 0;
};

/// Runs the controller and the simulated supply in simulated time, one
/// classification window per step. The controller talks to the supply only
/// through encoded frames. A row is logged whenever the command in force
/// changes. Deterministic.
std::vector<LogRow> run_controller(std::span<const Event> events, const pamodel::PaParams& params,
                                   const BandTable& table = default_band_table(),
                                   const RunOptions& options = {});

inline constexpr const char* kLogCsvHeader = "t_s,mode,vdd_V,idq_A,gate_step";

void write_log(std::ostream& os, std::span<const LogRow> rows);

}  // namespace pabias::scenario
