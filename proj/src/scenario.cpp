#include "pabias/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <variant>

#include "pabias/error.hpp"
#include "pabias/transport.hpp"

namespace pabias::scenario {

std::vector<Event> parse(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;

        Event ev;
        std::string band;
        std::string extra;
        ls.seekg(0);
        if (!(ls >> ev.t_s >> ev.kind >> band >> ev.setpoint_w) || (ls >> extra)) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(lineno) + ": expected 't_s kind band setpoint_W'");
        }
        signalgen::parse_kind(ev.kind);
        ev.band = parse_band(band);
        if (!std::isfinite(ev.t_s) || !(ev.setpoint_w > 0.0)) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(lineno) + ": bad time or setpoint");
        }
        if (!events.empty() && !(ev.t_s > events.back().t_s)) {
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(lineno) + ": times must strictly increase");
        }
        events.push_back(std::move(ev));
    }
    return events;
}

namespace {

// Drains everything the supply has queued for the controller; returns the
// last acknowledged set voltage, if any.
std::optional<double> drain_replies(transport::FrameLink& link) {
    std::optional<double> acked;
    while (auto frame = link.receive(std::chrono::milliseconds(0))) {
        const auto cmd = psusim::decode(*frame);
        if (const auto* r = std::get_if<psusim::Reply>(&cmd);
            r != nullptr && r->reg == psusim::Register::Voltage) {
            acked = r->milli_units / 1000.0;
        } else if (const auto* n = std::get_if<psusim::Nack>(&cmd)) {
            throw Error(ErrorCode::IoError, "supply rejected command, NACK " + std::to_string(n->code));
        }
    }
    return acked;
}

}  // namespace

std::vector<LogRow> run_controller(std::span<const Event> events, const pamodel::PaParams& params,
                                   const BandTable& table, const RunOptions& options) {
    if (!(options.window_s > 0.0) || !(options.sample_rate > 0.0) || options.tail_s < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "window, sample rate and tail must be positive");
    }
    std::vector<LogRow> log;
    if (events.empty()) return log;

    auto [ctl_end, psu_end] = transport::make_link_pair();
    psusim::PsuState supply = options.supply;
    biasctl::BiasController controller(params, table, options.settings);

    // Exciter blocks are stationary within an event; synthesize each kind once.
    std::map<std::string, IqBlock> blocks;
    auto block_for = [&](const std::string& kind) -> const IqBlock& {
        auto it = blocks.find(kind);
        if (it == blocks.end()) {
            auto spec = signalgen::spec_for(kind);
            spec.duration_s = options.window_s;
            it = blocks.emplace(kind, signalgen::generate(spec, options.sample_rate)).first;
        }
        return it->second;
    };

    const double t_end = events.back().t_s + options.tail_s;
    std::size_t current = 0;
    double acked_vdd = supply.set_voltage_v;
    std::optional<LogRow> last;

    for (long k = 0;; ++k) {
        const double t = events.front().t_s + static_cast<double>(k) * options.window_s;
        if (t > t_end + 1e-12) break;
        while (current + 1 < events.size() && events[current + 1].t_s <= t + 1e-12) ++current;
        const Event& ev = events[current];

        const IqBlock& exciter = block_for(ev.kind);
        const auto cls = biasctl::classify_envelope(exciter, options.window_s,
                                                    options.settings.thresholds);
        const auto cmd = controller.on_window(cls, ev.band, ev.setpoint_w, &exciter);

        ctl_end->send(psusim::encode(psusim::SetVoltage{psusim::to_milli(cmd.target.vdd)}));

        std::vector<std::vector<std::uint8_t>> inbox;
        while (auto frame = psu_end->receive(std::chrono::milliseconds(0))) {
            inbox.emplace_back(frame->begin(), frame->end());
        }
        auto step = psusim::psu_step(supply, options.window_s, inbox);
        supply = step.state;
        for (const auto& out : step.outgoing) psu_end->send(out);
        if (auto v = drain_replies(*ctl_end)) acked_vdd = *v;

        LogRow row{t, cmd.mode, acked_vdd, cmd.target.idq, cmd.target.gate_step};
        if (!last || last->mode != row.mode || last->vdd != row.vdd || last->idq != row.idq ||
            last->gate_step != row.gate_step) {
            log.push_back(row);
            last = row;
        }
    }
    return log;
}

void write_log(std::ostream& os, std::span<const LogRow> rows) {
    os << kLogCsvHeader << '\n';
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%s,%.3f,%.6f,%d\n", r.t_s,
                      std::string(biasctl::to_string(r.mode)).c_str(), r.vdd, r.idq, r.gate_step);
        os << buf;
    }
}

}  // namespace pabias::scenario
