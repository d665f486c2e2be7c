#include "pabias/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "pabias/error.hpp"
#include "pabias/measure.hpp"
#include "pabias/simplex.hpp"

namespace pabias::calibrate {
namespace {

// Search coordinates: g0 in dB, kv, rload, vknee, smoothness. ki stays at its
// initial value because every anchor shares one quiescent current.
std::vector<double> to_vector(const pamodel::PaParams& p) {
    return {20.0 * std::log10(p.g0), p.kv, p.rload, p.vknee, p.smoothness};
}

pamodel::PaParams from_vector(const std::vector<double>& x, const pamodel::PaParams& base,
                              const ParamBounds& b) {
    pamodel::PaParams p = base;
    p.g0 = std::pow(10.0, std::clamp(x[0], b.g0_db_min, b.g0_db_max) / 20.0);
    p.kv = std::clamp(x[1], b.kv_min, b.kv_max);
    p.ki = std::clamp(base.ki, b.ki_min, b.ki_max);
    p.rload = std::clamp(x[2], b.rload_min, b.rload_max);
    p.vknee = std::clamp(x[3], b.vknee_min, b.vknee_max);
    p.smoothness = std::clamp(x[4], b.smoothness_min, b.smoothness_max);
    return p;
}

double anchor_penalty(const pamodel::PaParams& params, const AnchorRow& a) {
    // Graded by how far the saturated output falls short of the anchor.
    const double a_sat = std::max(a.vdd - params.vknee, 1e-9);
    const double p_sat = a_sat * a_sat / (2.0 * params.rload);
    const double short_db = std::max(0.0, 10.0 * std::log10(a.pout_w / p_sat));
    return kUnreachablePenalty + short_db * short_db;
}

}  // namespace

std::vector<AnchorError> anchor_errors(const pamodel::PaParams& params,
                                       std::span<const AnchorRow> anchors, double idq) {
    std::vector<AnchorError> errors;
    for (const auto& a : anchors) {
        AnchorError e{a.vdd};
        try {
            const double vdd = a.vdd;
            const auto rows = measure::sweep_bias(std::span<const double>(&vdd, 1), idq, a.pout_w, params);
            e.gain_err_db = rows.front().gain_db.value_or(0.0) - a.gain_db;
            e.eff_err_pp = rows.front().eff_pct - a.eff_pct;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::TargetUnreachable) throw;
            e.reachable = false;
        }
        errors.push_back(e);
    }
    return errors;
}

double objective(const pamodel::PaParams& params, std::span<const AnchorRow> anchors, double idq) {
    try {
        pamodel::validate(params);
        pamodel::validate(pamodel::BiasPoint{pamodel::kMaxVdd, idq, 4});
    } catch (const Error&) {
        return kUnreachablePenalty * static_cast<double>(std::max<std::size_t>(anchors.size(), 1));
    }

    double residual = 0.0;
    for (const auto& a : anchors) {
        try {
            const double vdd = a.vdd;
            const auto rows = measure::sweep_bias(std::span<const double>(&vdd, 1), idq, a.pout_w, params);
            const double dg = (rows.front().gain_db.value_or(0.0) - a.gain_db) / kGainScaleDb;
            const double de = (rows.front().eff_pct - a.eff_pct) / kEffScalePp;
            residual += dg * dg + de * de;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::TargetUnreachable && err.code() != ErrorCode::InvalidBias) {
                throw;
            }
            residual += anchor_penalty(params, a);
        }
    }
    return residual;
}

pamodel::PaParams default_init(std::span<const AnchorRow> anchors) {
    pamodel::PaParams p;
    p.g0 = std::pow(10.0, 30.0 / 20.0);
    p.kv = 0.0;
    p.ki = 0.0;
    p.vknee = 4.0;
    p.smoothness = 2.0;
    p.rload = 58.0 * 58.0 / (2.0 * 1000.0);
    if (!anchors.empty()) {
        const auto top = std::max_element(anchors.begin(), anchors.end(),
                                          [](const AnchorRow& a, const AnchorRow& b) { return a.vdd < b.vdd; });
        if (top->pout_w > 0.0) {
            p.rload = top->vdd * top->vdd / (2.0 * top->pout_w);
        }
    }
    return p;
}

FitReport fit(std::span<const AnchorRow> anchors, const pamodel::PaParams& init, int budget,
              double idq, const ParamBounds& bounds) {
    auto evaluate = [&](const std::vector<double>& x) {
        const double f = objective(from_vector(x, init, bounds), anchors, idq);
        if (!std::isfinite(f)) {
            throw Error(ErrorCode::Diverged, "objective is not finite");
        }
        return f;
    };

    FitReport report;
    if (budget <= 0) {
        report.params = init;
        report.residual = objective(init, anchors, idq);
        report.errors = anchor_errors(init, anchors, idq);
        return report;
    }

    const std::vector<double> start = to_vector(init);
    const std::vector<double> steps = {1.0, 0.05, 0.2 * init.rload, 0.5, 0.5};
    SimplexOptions options;
    options.max_evaluations = budget;
    const auto result = nelder_mead(evaluate, start, steps, options);

    // The init vertex is the first evaluation, so result.value never exceeds it;
    // but clamping can map the start itself, so compare against the raw init.
    const double init_residual = objective(init, anchors, idq);
    if (result.value <= init_residual) {
        report.params = from_vector(result.x, init, bounds);
        report.residual = objective(report.params, anchors, idq);
    } else {
        report.params = init;
        report.residual = init_residual;
    }
    report.errors = anchor_errors(report.params, anchors, idq);
    report.evaluations = result.evaluations;
    return report;
}

std::vector<AnchorRow> reference_anchors() {
    return {
        {58.0, 32.0, 60.0, 1000.0, 666.0},
        {53.0, 30.0, 68.0, 1000.0, 470.0},
        {48.0, 28.0, 77.0, 1000.0, 298.0},
    };
}

std::vector<AnchorRow> read_anchors(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "anchor file is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kAnchorCsvHeader) {
        throw Error(ErrorCode::ParseError,
                    "anchor header must be '" + std::string(kAnchorCsvHeader) + "'");
    }
    std::vector<AnchorRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::istringstream ls(line);
        AnchorRow a;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        std::string rest;
        if (!(ls >> a.vdd >> c1 >> a.gain_db >> c2 >> a.eff_pct >> c3 >> a.pout_w >> c4 >>
              a.pdiss_w) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || (ls >> rest)) {
            throw Error(ErrorCode::ParseError, "anchor line " + std::to_string(lineno) + " malformed");
        }
        rows.push_back(a);
    }
    if (rows.empty()) {
        throw Error(ErrorCode::ParseError, "no anchor rows");
    }
    return rows;
}

void write_report(std::ostream& os, const FitReport& report) {
    os << kReportCsvHeader << '\n';
    char buf[200];
    for (const auto& e : report.errors) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%d,%.9g\n", e.vdd, e.gain_err_db,
                      e.eff_err_pp, e.reachable ? 1 : 0, report.residual);
        os << buf;
    }
}

}  // namespace pabias::calibrate
