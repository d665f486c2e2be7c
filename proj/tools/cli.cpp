#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pabias/bands.hpp"
#include "pabias/biasctl.hpp"
#include "pabias/calibrate.hpp"
#include "pabias/error.hpp"
#include "pabias/measure.hpp"
#include "pabias/pamodel.hpp"
#include "pabias/params_io.hpp"
#include "pabias/psusim.hpp"
#include "pabias/scenario.hpp"
#include "pabias/signalgen.hpp"
#include "pabias/transport.hpp"

namespace fs = std::filesystem;

namespace pabias::cli {
namespace {

struct Common {
    std::string out_dir;
    std::string params_path;
};

struct GenArgs {
    std::string kind = "cw";
    double amplitude = 1.0;
    double duration = 1e-3;
    double fs = 1e6;
    double offset = 0.0;
    double fm_dev = 5e3;
    double fm_rate = 1e3;
    double am_index = 0.5;
    double am_rate = 1e3;
    double psk_rate = 10e3;
    double spacing = 2e3;
    std::optional<double> noise_dbc;
};

void add_waveform_flags(CLI::App* sub, GenArgs& g) {
    sub->add_option("--kind", g.kind, "cw, fm, am, psk/bpsk, qpsk, two-tone/ssb");
    sub->add_option("--amplitude", g.amplitude, "peak envelope");
    sub->add_option("--fs", g.fs, "sample rate, Hz");
    sub->add_option("--offset-hz", g.offset, "carrier offset, Hz");
    sub->add_option("--fm-dev-hz", g.fm_dev, "FM deviation, Hz");
    sub->add_option("--fm-rate-hz", g.fm_rate, "FM modulating rate, Hz");
    sub->add_option("--am-index", g.am_index, "AM modulation index");
    sub->add_option("--am-rate-hz", g.am_rate, "AM modulating rate, Hz");
    sub->add_option("--psk-rate-hz", g.psk_rate, "PSK symbol rate, Hz");
    sub->add_option("--spacing-hz", g.spacing, "two-tone spacing, Hz");
    sub->add_option("--noise-dbc", g.noise_dbc, "additive noise floor, dBc");
}

signalgen::WaveformSpec to_spec(const GenArgs& g, double duration) {
    auto spec = signalgen::spec_for(g.kind);
    spec.amplitude = g.amplitude;
    spec.duration_s = duration;
    spec.offset_hz = g.offset;
    spec.fm_deviation_hz = g.fm_dev;
    spec.fm_rate_hz = g.fm_rate;
    spec.am_index = g.am_index;
    spec.am_rate_hz = g.am_rate;
    spec.psk_symbol_rate_hz = g.psk_rate;
    spec.tone1_hz = -0.5 * g.spacing;
    spec.tone2_hz = 0.5 * g.spacing;
    spec.noise_dbc = g.noise_dbc;
    return spec;
}

pamodel::PaParams params_from(const Common& c) {
    return c.params_path.empty() ? pamodel::PaParams{} : load_params(c.params_path);
}

// Writes `text` to out_dir/name, or to `out` when no directory was given.
void emit(const Common& c, const std::string& name, const std::string& text, std::ostream& out) {
    if (c.out_dir.empty()) {
        out << text;
        return;
    }
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + c.out_dir + ": " + ec.message());
    }
    const fs::path path = fs::path(c.out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
}

std::string rows_csv(std::span<const measure::MeasRow> rows) {
    std::ostringstream os;
    measure::write_csv(os, rows);
    return os.str();
}

std::optional<Band> band_opt(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return parse_band(name);
}

// Envelope input at which the linear gain alone would reach the supply limit.
double full_scale_drive(const pamodel::BiasPoint& bias, const pamodel::PaParams& params,
                        std::optional<Band> band) {
    const double g = std::pow(10.0, pamodel::small_signal_gain_db(bias, params, band) / 20.0);
    return pamodel::saturation_envelope(bias, params) / g;
}

IqBlock read_iq_csv(const std::string& path, double fs) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    IqBlock block;
    block.sample_rate = fs;
    std::string line;
    std::getline(in, line);
    if (line.rfind("t_s,i,q", 0) != 0) {
        throw Error(ErrorCode::ParseError, path + ": expected header t_s,i,q");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double t = 0, i = 0, q = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &i, &q) != 3) {
            throw Error(ErrorCode::ParseError, path + ": malformed sample line");
        }
        block.samples.emplace_back(i, q);
    }
    return block;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"PA bias-switching simulator and controller toolkit", "pabias"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool with_params) {
        sub->add_option("--out-dir", common.out_dir, "write output files here instead of stdout");
        if (with_params) {
            sub->add_option("--params", common.params_path, "amplifier parameter file")
                ->check(CLI::ExistingFile);
        }
    };

    // gen
    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "synthesize a test signal as t_s,i,q CSV");
    add_waveform_flags(gen_cmd, gen);
    gen_cmd->add_option("--duration", gen.duration, "seconds");
    add_common(gen_cmd, false);

    // classify
    GenArgs cls_gen;
    double window_s = 10e-3;
    std::string input_path;
    bool show_metrics = false;
    auto* cls_cmd = app.add_subcommand("classify", "classify an envelope as Constant or Varying");
    add_waveform_flags(cls_cmd, cls_gen);
    cls_cmd->add_option("--window", window_s, "classification window, s");
    cls_cmd->add_option("--input", input_path, "t_s,i,q CSV instead of a synthesized signal")
        ->check(CLI::ExistingFile);
    cls_cmd->add_flag("--metrics", show_metrics, "also print PAPR and ripple ratio");

    // two-tone
    double drive_dbfs = 0.0;
    double vdd = pamodel::kMaxVdd;
    double idq = 2.0;
    std::string band_name;
    measure::TwoToneSetup tt;
    auto* tt_cmd = app.add_subcommand("two-tone", "two-tone gain, efficiency and IMD");
    tt_cmd->add_option("--drive-dbfs", drive_dbfs, "peak envelope re. full-scale drive")->required();
    tt_cmd->add_option("--vdd", vdd, "drain supply, V");
    tt_cmd->add_option("--idq", idq, "quiescent current, A");
    tt_cmd->add_option("--band", band_name, "band, e.g. 20M");
    tt_cmd->add_option("--spacing-hz", tt.spacing_hz, "tone spacing, Hz");
    tt_cmd->add_option("--fs", tt.sample_rate, "sample rate, Hz");
    tt_cmd->add_option("--length", tt.length, "block length, samples");
    add_common(tt_cmd, true);

    // sweep-bias
    std::vector<double> vdd_list;
    double pout = 1000.0;
    auto* sweep_cmd = app.add_subcommand("sweep-bias", "CW sweep of drain bias at fixed output");
    sweep_cmd->add_option("--vdd", vdd_list, "comma separated drain voltages, V")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--idq", idq, "quiescent current, A");
    sweep_cmd->add_option("--pout", pout, "output power target, W");
    add_common(sweep_cmd, true);

    // freq-response
    std::vector<std::string> band_list;
    double fr_dbfs = -6.0;
    std::optional<double> equalize_db;
    auto* fr_cmd = app.add_subcommand("freq-response", "constant-drive CW output per band");
    fr_cmd->add_option("--bands", band_list, "comma separated bands (default: all)")->delimiter(',');
    fr_cmd->add_option("--drive-dbfs", fr_dbfs, "CW drive re. full-scale at the given bias");
    fr_cmd->add_option("--vdd", vdd, "drain supply, V");
    fr_cmd->add_option("--idq", idq, "quiescent current, A");
    fr_cmd->add_option("--equalize", equalize_db,
                       "equalize small-signal gain to this many dB via per-band vdd");
    add_common(fr_cmd, true);

    // calibrate
    std::string anchors_path;
    std::string init_path;
    int budget = 2000;
    double cal_idq = 2.0;
    auto* cal_cmd = app.add_subcommand("calibrate", "fit amplifier parameters to anchor rows");
    cal_cmd->add_option("--anchors", anchors_path, "anchor CSV (default: built-in 1 kW table)")
        ->check(CLI::ExistingFile);
    cal_cmd->add_option("--init", init_path, "starting parameter file")->check(CLI::ExistingFile);
    cal_cmd->add_option("--budget", budget, "objective evaluations")->check(CLI::NonNegativeNumber);
    cal_cmd->add_option("--idq", cal_idq, "quiescent current of the anchor table, A");
    cal_cmd->add_option("--out-dir", common.out_dir, "directory for fitted.cfg and fit_report.csv")
        ->required();

    // run-controller
    std::string scenario_path;
    scenario::RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run-controller", "replay a scenario through the controller");
    run_cmd->add_option("--scenario", scenario_path, "scenario file")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--window", run_opts.window_s, "classification window, s");
    run_cmd->add_option("--tail", run_opts.tail_s, "time simulated after the last event, s");
    run_cmd->add_option("--margin", run_opts.settings.margin, "drain headroom fraction")
        ->check(CLI::Range(0.0, 0.5));
    add_common(run_cmd, true);

    // psu-sim
    std::string listen = "127.0.0.1:5025";
    int max_clients = 0;
    psusim::PsuState psu;
    auto* sim_cmd = app.add_subcommand("psu-sim", "serve the simulated drain supply over TCP");
    sim_cmd->add_option("--listen", listen, "host:port (port 0 picks a free one)");
    sim_cmd->add_option("--max-clients", max_clients, "exit after this many clients (0: never)");
    sim_cmd->add_option("--voltage", psu.set_voltage_v, "initial output, V");
    sim_cmd->add_option("--slew", psu.slew_v_per_s, "slew limit, V/s");
    sim_cmd->add_option("--load", psu.load_current_a, "load current, A");

    // psu-set / psu-read
    std::string connect = "127.0.0.1:5025";
    double set_v = 0.0;
    std::string reg_name = "voltage";
    double timeout_s = 1.0;
    auto* set_cmd = app.add_subcommand("psu-set", "command a drain voltage");
    set_cmd->add_option("--connect", connect, "supply host:port");
    set_cmd->add_option("--voltage", set_v, "volts")->required();
    set_cmd->add_option("--timeout", timeout_s, "reply timeout, s");
    auto* read_cmd = app.add_subcommand("psu-read", "read a supply register");
    read_cmd->add_option("--connect", connect, "supply host:port");
    read_cmd->add_option("--register", reg_name, "voltage or current")
        ->check(CLI::IsMember({"voltage", "current"}));
    read_cmd->add_option("--timeout", timeout_s, "reply timeout, s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_cmd->parsed()) {
            const auto block = signalgen::generate(to_spec(gen, gen.duration), gen.fs);
            std::string text = "t_s,i,q\n";
            char buf[96];
            for (std::size_t n = 0; n < block.size(); ++n) {
                std::snprintf(buf, sizeof buf, "%.9f,%.12g,%.12g\n",
                              static_cast<double>(n) / block.sample_rate, block.samples[n].real(),
                              block.samples[n].imag());
                text += buf;
            }
            emit(common, "gen.csv", text, out);
        } else if (cls_cmd->parsed()) {
            const IqBlock block = input_path.empty()
                                      ? signalgen::generate(to_spec(cls_gen, window_s), cls_gen.fs)
                                      : read_iq_csv(input_path, cls_gen.fs);
            const auto cls = biasctl::classify_envelope(block, window_s);
            out << biasctl::to_string(cls.kind) << '\n';
            if (show_metrics) {
                out << "papr_dB " << fmt("%.6f", cls.papr_db) << '\n'
                    << "ripple_ratio " << fmt("%.6g", cls.ripple_ratio) << '\n';
            }
        } else if (tt_cmd->parsed()) {
            const auto params = params_from(common);
            const auto band = band_opt(band_name);
            const pamodel::BiasPoint bias{vdd, idq, biasctl::gate_step_for(idq)};
            pamodel::validate(bias);
            const double peak = full_scale_drive(bias, params, band) * std::pow(10.0, drive_dbfs / 20.0);
            const std::vector<measure::MeasRow> rows{
                measure::two_tone_row(peak, bias, params, tt, band)};
            emit(common, "two_tone.csv", rows_csv(rows), out);
        } else if (sweep_cmd->parsed()) {
            const auto params = params_from(common);
            const auto rows = measure::sweep_bias(vdd_list, idq, pout, params);
            emit(common, "sweep_bias.csv", rows_csv(rows), out);
        } else if (fr_cmd->parsed()) {
            const auto params = params_from(common);
            std::vector<Band> bands;
            for (const auto& b : band_list) bands.push_back(parse_band(b));
            if (bands.empty()) bands.assign(kAllBands.begin(), kAllBands.end());
            const pamodel::BiasPoint bias{vdd, idq, biasctl::gate_step_for(idq)};
            pamodel::validate(bias);
            const double drive = full_scale_drive(bias, params, std::nullopt) *
                                 std::pow(10.0, fr_dbfs / 20.0);
            std::vector<measure::MeasRow> rows;
            if (equalize_db) {
                const auto table = biasctl::equalize_gains(params, bands, *equalize_db, idq);
                rows = measure::freq_response_equalized(bands, drive, idq, params, table);
            } else {
                rows = measure::freq_response(bands, drive, bias, params);
            }
            emit(common, "freq_response.csv", rows_csv(rows), out);
        } else if (cal_cmd->parsed()) {
            std::vector<calibrate::AnchorRow> anchors;
            if (anchors_path.empty()) {
                anchors = calibrate::reference_anchors();
            } else {
                std::ifstream in(anchors_path);
                anchors = calibrate::read_anchors(in);
            }
            const auto init =
                init_path.empty() ? calibrate::default_init(anchors) : load_params(init_path);
            const auto report = calibrate::fit(anchors, init, budget, cal_idq);

            std::ostringstream cfg;
            write_params(cfg, report.params, "fit residual " + fmt("%.9g", report.residual));
            emit(common, "fitted.cfg", cfg.str(), out);
            std::ostringstream rep;
            calibrate::write_report(rep, report);
            emit(common, "fit_report.csv", rep.str(), out);
            out << "residual " << fmt("%.6g", report.residual) << '\n';
        } else if (run_cmd->parsed()) {
            const auto params = params_from(common);
            std::ifstream in(scenario_path);
            const auto events = scenario::parse(in);
            const auto log = scenario::run_controller(events, params, default_band_table(), run_opts);
            std::ostringstream os;
            scenario::write_log(os, log);
            emit(common, "controller_log.csv", os.str(), out);
        } else if (sim_cmd->parsed()) {
            const auto [host, port] = transport::parse_address(listen);
            psu.set_voltage_v = std::clamp(psu.set_voltage_v, psusim::kMinVoltage, psusim::kMaxVoltage);
            psu.actual_voltage_v = psu.set_voltage_v;
            transport::PsuTcpServer server(host, port, psu);
            out << "listening " << host << ':' << server.port() << std::endl;
            server.serve(max_clients);
        } else if (set_cmd->parsed() || read_cmd->parsed()) {
            const auto [host, port] = transport::parse_address(connect);
            auto link = transport::TcpLink::connect(host, port);
            psusim::Command request;
            if (set_cmd->parsed()) {
                if (!(set_v >= 0.0) || set_v > 4.0e6) {
                    throw Error(ErrorCode::InvalidArgument, "--voltage out of range");
                }
                request = psusim::SetVoltage{psusim::to_milli(set_v)};
            } else {
                request = psusim::ReadRegister{reg_name == "voltage" ? psusim::Register::Voltage
                                                                     : psusim::Register::Current};
            }
            link->send(psusim::encode(request));
            const auto reply_bytes =
                link->receive(std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0)));
            if (!reply_bytes) {
                throw Error(ErrorCode::IoError, "no reply from " + connect);
            }
            const auto reply = psusim::decode(*reply_bytes);
            if (const auto* r = std::get_if<psusim::Reply>(&reply)) {
                out << fmt("%.3f", r->milli_units / 1000.0) << '\n';
            } else if (const auto* n = std::get_if<psusim::Nack>(&reply)) {
                throw Error(ErrorCode::IoError, "supply sent NACK " + std::to_string(n->code));
            } else {
                throw Error(ErrorCode::IoError, "unexpected frame from supply");
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace pabias::cli
