#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pabias/calibrate.hpp"
#include "pabias/error.hpp"
#include "pabias/measure.hpp"

using namespace pabias;
using namespace pabias::calibrate;

namespace {

pamodel::PaParams truth() {
    pamodel::PaParams p;
    p.g0 = std::pow(10.0, 31.0 / 20.0);
    p.kv = 0.3;
    p.rload = 1.0;
    p.vknee = 2.0;
    p.smoothness = 6.0;
    return p;
}

std::vector<AnchorRow> synthetic(const pamodel::PaParams& p) {
    const std::vector<double> vdds = {58.0, 53.0, 48.0};
    std::vector<AnchorRow> out;
    for (const auto& r : measure::sweep_bias(vdds, 2.0, 900.0, p)) {
        out.push_back({r.vdd, *r.gain_db, r.eff_pct, r.pout_w, r.pdiss_w});
    }
    return out;
}

}  // namespace

TEST_CASE("objective is zero at the generating params") {
    const auto anchors = synthetic(truth());
    CHECK(objective(truth(), anchors) <= 1e-9);
}

TEST_CASE("one decibel of g0 costs at least four units") {
    const auto anchors = synthetic(truth());
    auto p = truth();
    p.g0 *= std::pow(10.0, 1.0 / 20.0);
    CHECK(objective(p, anchors) >= 4.0);
}

TEST_CASE("penalty path stays finite") {
    const auto anchors = synthetic(truth());
    auto p = truth();
    p.rload = -1.0;
    const double f = objective(p, anchors);
    CHECK(std::isfinite(f));
    CHECK(f >= kUnreachablePenalty);

    // A large load line cannot reach the target at 48 V.
    p = truth();
    p.rload = 40.0;
    const double g = objective(p, anchors);
    CHECK(std::isfinite(g));
    CHECK(g >= kUnreachablePenalty);
    const auto errs = anchor_errors(p, anchors);
    CHECK(std::none_of(errs.begin(), errs.end(), [](const AnchorError& e) { return e.reachable; }));
    // Graded: further from reachable costs more.
    p.rload = 45.0;
    CHECK(objective(p, anchors) > g);
}

TEST_CASE("objective ignores anchor order") {
    auto anchors = reference_anchors();
    const auto p = default_init(anchors);
    const double a = objective(p, anchors);
    std::reverse(anchors.begin(), anchors.end());
    CHECK(objective(p, anchors) == doctest::Approx(a).epsilon(1e-15));
}

TEST_CASE("budget zero returns init") {
    const auto anchors = reference_anchors();
    const auto init = default_init(anchors);
    const auto r = fit(anchors, init, 0);
    CHECK(r.params.g0 == init.g0);
    CHECK(r.params.rload == init.rload);
    CHECK(r.residual == objective(init, anchors));
}

TEST_CASE("default init follows the load-line estimate") {
    const auto anchors = reference_anchors();
    const auto p = default_init(anchors);
    CHECK(20 * std::log10(p.g0) == doctest::Approx(30.0));
    CHECK(p.rload == doctest::Approx(58.0 * 58.0 / 2000.0));
    CHECK(p.vknee == 4.0);
    CHECK(p.smoothness == 2.0);
    CHECK(p.kv == 0.0);
    CHECK(p.ki == 0.0);
}

TEST_CASE("fit recovers synthetic anchors from a perturbed start") {
    const auto anchors = synthetic(truth());
    auto init = truth();
    init.g0 *= 1.1;
    init.kv *= 0.9;
    init.rload *= 1.1;
    init.vknee *= 0.9;
    init.smoothness *= 1.1;
    const auto r = fit(anchors, init, 3000);
    CHECK(r.residual <= objective(init, anchors));
    for (const auto& e : r.errors) {
        CHECK(std::abs(e.gain_err_db) < 0.1);
        CHECK(e.reachable);
    }
    CHECK(r.residual == doctest::Approx(objective(r.params, anchors)).epsilon(1e-12));
    CHECK_NOTHROW(pamodel::validate(r.params));
}

TEST_CASE("fit is deterministic and never worse than init") {
    const auto anchors = reference_anchors();
    const auto init = default_init(anchors);
    const auto a = fit(anchors, init, 400);
    const auto b = fit(anchors, init, 400);
    CHECK(a.residual == b.residual);
    CHECK(a.params.g0 == b.params.g0);
    CHECK(a.params.smoothness == b.params.smoothness);
    CHECK(a.residual <= objective(init, anchors));
    CHECK(a.residual >= 0.0);
    CHECK_NOTHROW(pamodel::validate(a.params));
}

TEST_CASE("anchor csv round trip") {
    std::istringstream in(
        "vdd_V,gain_dB,eff_pct,pout_W,pdiss_W\n58,32,60,1000,666\n53,30,68,1000,470\r\n\n");
    const auto rows = read_anchors(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].eff_pct == 68.0);
    CHECK(rows[1].pdiss_w == 470.0);

    std::istringstream bad_header("vdd,gain\n1,2\n");
    CHECK_THROWS_AS(read_anchors(bad_header), Error);
    std::istringstream bad_row("vdd_V,gain_dB,eff_pct,pout_W,pdiss_W\n58,32,60\n");
    CHECK_THROWS_AS(read_anchors(bad_row), Error);
}

TEST_CASE("reference anchors are self-consistent") {
    for (const auto& a : reference_anchors()) {
        CHECK(std::abs(a.pdiss_w - a.pout_w * (100 / a.eff_pct - 1)) <= 0.01 * a.pdiss_w);
    }
}
