#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

#include "pabias/biasctl.hpp"
#include "pabias/calibrate.hpp"
#include "pabias/error.hpp"
#include "pabias/measure.hpp"
#include "pabias/pamodel.hpp"
#include "pabias/psusim.hpp"
#include "pabias/signalgen.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

using namespace pabias;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

IqBlock to_block(const ComplexArray& samples, double fs) {
    IqBlock block;
    block.sample_rate = fs;
    auto r = samples.unchecked<1>();
    block.samples.assign(r.data(0), r.data(0) + r.shape(0));
    return block;
}

ComplexArray to_array(const IqBlock& block) {
    ComplexArray a(static_cast<py::ssize_t>(block.size()));
    std::copy(block.samples.begin(), block.samples.end(), a.mutable_data());
    return a;
}

std::optional<Band> band_arg(const std::optional<std::string>& name) {
    if (!name) return std::nullopt;
    return parse_band(*name);
}

py::dict row_dict(const measure::MeasRow& r) {
    py::dict d;
    d["vdd"] = r.vdd;
    d["idq"] = r.idq;
    d["pout_w"] = r.pout_w;
    d["gain_db"] = r.gain_db;
    d["eff_pct"] = r.eff_pct;
    d["pdiss_w"] = r.pdiss_w;
    d["imd3_dbc"] = r.imd3_dbc;
    d["imd5_dbc"] = r.imd5_dbc;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pabias core: amplifier model, measurement, bias control, supply codec";

    py::register_exception<Error>(m, "PabiasError", PyExc_RuntimeError);

    py::class_<pamodel::PaParams>(m, "PaParams")
        .def(py::init<>())
        .def_readwrite("g0", &pamodel::PaParams::g0)
        .def_readwrite("kv", &pamodel::PaParams::kv)
        .def_readwrite("ki", &pamodel::PaParams::ki)
        .def_readwrite("rload", &pamodel::PaParams::rload)
        .def_readwrite("vknee", &pamodel::PaParams::vknee)
        .def_readwrite("smoothness", &pamodel::PaParams::smoothness)
        .def("set_ripple", [](pamodel::PaParams& p, const std::string& band, double db) {
            p.ripple_db[parse_band(band)] = db;
        });

    py::class_<pamodel::BiasPoint>(m, "BiasPoint")
        .def(py::init([](double vdd, double idq, int gate_step) {
                 return pamodel::BiasPoint{vdd, idq, gate_step};
             }),
             "vdd"_a = 58.0, "idq"_a = 2.0, "gate_step"_a = 4)
        .def_readwrite("vdd", &pamodel::BiasPoint::vdd)
        .def_readwrite("idq", &pamodel::BiasPoint::idq)
        .def_readwrite("gate_step", &pamodel::BiasPoint::gate_step);

    py::class_<pamodel::PaStats>(m, "PaStats")
        .def_readonly("pout_w", &pamodel::PaStats::pout_w)
        .def_readonly("pdc_w", &pamodel::PaStats::pdc_w)
        .def_readonly("eff", &pamodel::PaStats::eff)
        .def_readonly("pdiss_w", &pamodel::PaStats::pdiss_w)
        .def_readonly("gain_db", &pamodel::PaStats::gain_db);

    m.def(
        "generate",
        [](const std::string& kind, double sample_rate, double duration_s, double amplitude,
           double spacing_hz, double am_index) {
            auto spec = signalgen::spec_for(kind);
            spec.duration_s = duration_s;
            spec.amplitude = amplitude;
            spec.tone1_hz = -0.5 * spacing_hz;
            spec.tone2_hz = 0.5 * spacing_hz;
            spec.am_index = am_index;
            return to_array(signalgen::generate(spec, sample_rate));
        },
        "kind"_a, "sample_rate"_a = 1e6, "duration_s"_a = 1e-3, "amplitude"_a = 1.0,
        "spacing_hz"_a = 2e3, "am_index"_a = 0.5);

    m.def(
        "classify",
        [](const ComplexArray& samples, double sample_rate, double window_s) {
            const auto cls = biasctl::classify_envelope(to_block(samples, sample_rate), window_s);
            return py::make_tuple(std::string(biasctl::to_string(cls.kind)), cls.papr_db,
                                  cls.ripple_ratio);
        },
        "samples"_a, "sample_rate"_a, "window_s"_a);

    m.def(
        "conduction_currents",
        [](double idq, double ipk) {
            const auto c = pamodel::conduction_currents(idq, ipk);
            return py::make_tuple(c.alpha, c.idc, c.i1);
        },
        "idq"_a, "ipk"_a);

    m.def(
        "efficiency_curve",
        [](const std::vector<double>& alphas) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : pamodel::efficiency_curve(alphas)) out.emplace_back(p.alpha, p.eta);
            return out;
        },
        "alphas"_a);

    m.def(
        "am_am",
        [](double a_in, const pamodel::BiasPoint& bias, const pamodel::PaParams& params) {
            return pamodel::am_am(a_in, bias, params);
        },
        "a_in"_a, "bias"_a, "params"_a);

    m.def(
        "simulate",
        [](const ComplexArray& samples, double sample_rate, const pamodel::BiasPoint& bias,
           const pamodel::PaParams& params, std::optional<std::string> band) {
            auto r = pamodel::simulate(to_block(samples, sample_rate), bias, params, band_arg(band));
            return py::make_tuple(to_array(r.output), r.stats);
        },
        "samples"_a, "sample_rate"_a, "bias"_a, "params"_a, "band"_a = py::none());

    m.def(
        "measure_imd",
        [](const ComplexArray& samples, double sample_rate, double f1_hz, double f2_hz) {
            const auto r = measure::measure_imd(to_block(samples, sample_rate), f1_hz, f2_hz);
            py::dict d;
            for (int order = 3; order <= 9; order += 2) {
                d[py::int_(order)] = r.worst_dbc(order);
            }
            return d;
        },
        "samples"_a, "sample_rate"_a, "f1_hz"_a, "f2_hz"_a);

    m.def(
        "find_p1db",
        [](const pamodel::BiasPoint& bias, const pamodel::PaParams& params) {
            return measure::find_p1db(bias, params);
        },
        "bias"_a, "params"_a);

    m.def(
        "sweep_bias",
        [](const std::vector<double>& vdds, double idq, double pout_w,
           const pamodel::PaParams& params) {
            py::list rows;
            for (const auto& r : measure::sweep_bias(vdds, idq, pout_w, params)) rows.append(row_dict(r));
            return rows;
        },
        "vdds"_a, "idq"_a, "pout_w"_a, "params"_a);

    m.def(
        "calibrate_reference",
        [](int budget) {
            const auto anchors = calibrate::reference_anchors();
            const auto report = calibrate::fit(anchors, calibrate::default_init(anchors), budget);
            return py::make_tuple(report.params, report.residual);
        },
        "budget"_a = 2000);

    m.def("track_drain", &biasctl::track_drain, "peak_envelope_v"_a, "margin"_a = 0.10,
          "vknee"_a = 0.0);
    m.def("gate_step_for", &biasctl::gate_step_for, "idq"_a);

    m.def(
        "encode_set_voltage",
        [](double volts) {
            const auto w = psusim::encode(psusim::SetVoltage{psusim::to_milli(volts)});
            return py::bytes(reinterpret_cast<const char*>(w.data()), w.size());
        },
        "volts"_a);

    m.def(
        "decode_frame",
        [](const py::bytes& wire) {
            const std::string s = wire;
            const auto cmd = psusim::decode(
                std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
            return std::visit(
                [](const auto& c) -> py::tuple {
                    using T = std::decay_t<decltype(c)>;
                    if constexpr (std::is_same_v<T, psusim::SetVoltage>) {
                        return py::make_tuple("set_voltage", c.millivolts);
                    } else if constexpr (std::is_same_v<T, psusim::ReadRegister>) {
                        return py::make_tuple("read", static_cast<int>(c.reg));
                    } else if constexpr (std::is_same_v<T, psusim::Reply>) {
                        return py::make_tuple("reply", static_cast<int>(c.reg), c.milli_units);
                    } else {
                        return py::make_tuple("nack", static_cast<int>(c.code));
                    }
                },
                cmd);
        },
        "wire"_a);

    m.def(
        "psu_step",
        [](double set_v, double actual_v, double dt_s, const std::vector<py::bytes>& frames) {
            psusim::PsuState s;
            s.set_voltage_v = set_v;
            s.actual_voltage_v = actual_v;
            std::vector<std::vector<std::uint8_t>> in;
            for (const auto& f : frames) {
                const std::string b = f;
                in.emplace_back(b.begin(), b.end());
            }
            const auto r = psusim::psu_step(s, dt_s, in);
            std::vector<py::bytes> out;
            for (const auto& w : r.outgoing) {
                out.emplace_back(reinterpret_cast<const char*>(w.data()), w.size());
            }
            return py::make_tuple(r.state.set_voltage_v, r.state.actual_voltage_v, out);
        },
        "set_v"_a, "actual_v"_a, "dt_s"_a, "frames"_a);
}
