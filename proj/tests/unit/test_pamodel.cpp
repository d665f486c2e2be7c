#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "pabias/error.hpp"
#include "pabias/pamodel.hpp"
#include "pabias/signalgen.hpp"

using namespace pabias;
using namespace pabias::pamodel;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

PaParams fitted_like() {
    PaParams p;
    p.g0 = std::pow(10.0, 32.0 / 20.0);
    p.kv = 0.4;
    p.rload = 1.07;
    p.vknee = 0.0;
    p.smoothness = 20.0;
    return p;
}

}  // namespace

TEST_CASE("conduction currents: documented points") {
    auto c = conduction_currents(1.0, 0.0);
    CHECK(c.alpha == doctest::Approx(2 * kPi));
    CHECK(c.idc == doctest::Approx(1.0));
    CHECK(c.i1 == doctest::Approx(0.0));

    c = conduction_currents(2.0, 1.0);
    CHECK(c.alpha == doctest::Approx(2 * kPi));
    CHECK(c.idc == doctest::Approx(2.0));
    CHECK(c.i1 == doctest::Approx(1.0));

    // Class-B limit against the integration oracle.
    c = conduction_currents(1e-12, 3.0);
    const auto o = oracle::clipped_cosine(0.0, 3.0);
    CHECK(c.alpha == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(rel(c.idc, o.dc) < 1e-9);
    CHECK(rel(c.i1, o.fundamental) < 1e-9);
    CHECK(o.dc == doctest::Approx(3.0 / kPi).epsilon(1e-12));
    CHECK(o.fundamental == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("conduction currents match numerical integration on random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> idq_d(1e-3, 5.0);
    std::uniform_real_distribution<double> ipk_d(0.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double idq = idq_d(rng);
        const double ipk = ipk_d(rng);
        const auto c = conduction_currents(idq, ipk);
        const auto o = oracle::clipped_cosine(idq, ipk, 4000);
        CHECK(rel(c.idc, o.dc) < 1e-9);
        CHECK(rel(c.i1, o.fundamental) < 1e-9);
    }
}

TEST_CASE("conduction currents reject non-positive idq") {
    CHECK_THROWS_AS(conduction_currents(0.0, 1.0), Error);
    try {
        conduction_currents(-1.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveIdq);
    }
}

TEST_CASE("peak_for_fundamental inverts the fundamental") {
    for (double idq : {0.5, 2.0}) {
        for (double i1 : {0.1, 1.0, 10.0, 40.0}) {
            const double ipk = peak_for_fundamental(idq, i1);
            CHECK(rel(conduction_currents(idq, ipk).i1, i1) < 1e-12);
        }
    }
}

TEST_CASE("efficiency curve") {
    const std::vector<double> a = {2 * kPi, kPi, 0.1};
    const auto c = efficiency_curve(a);
    CHECK(c[0].eta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c[1].eta == doctest::Approx(kPi / 4).epsilon(1e-9));
    CHECK(c[2].eta > 0.99);

    // Oracle: eta = 0.5 i1/idc of a unit-peak cosine biased at -cos(alpha/2).
    for (double alpha : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        const auto o = oracle::clipped_cosine(-std::cos(alpha / 2), 1.0);
        const std::vector<double> one = {alpha};
        CHECK(std::abs(efficiency_curve(one)[0].eta - 0.5 * o.fundamental / o.dc) < 1e-9);
    }

    std::vector<double> grid;
    for (double x = 0.2; x <= 2 * kPi; x += 0.01) grid.push_back(x);
    const auto g = efficiency_curve(grid);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i].eta < g[i - 1].eta);

    const std::vector<double> bad = {0.0};
    CHECK_THROWS_AS(efficiency_curve(bad), Error);
    const std::vector<double> bad2 = {7.0};
    CHECK_THROWS_AS(efficiency_curve(bad2), Error);
}

TEST_CASE("am_am examples") {
    PaParams p;
    p.g0 = 10.0;
    p.vknee = 0.0;
    p.smoothness = 1.0;
    // a_sat = vdd - vknee; choose vdd so the oracle case has a_sat scaled by 30.
    BiasPoint b{30.0, 2.0, 4};
    p.kv = 0.0;
    // g = 10, a_sat = 30, s = 1, a_in = 3: r = 1 -> a_out = 30 / sqrt(2).
    CHECK(am_am(3.0, b, p) == doctest::Approx(30.0 * 0.70711).epsilon(1e-5));
    CHECK(rapp(0.1, 10.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

    // Small-signal linearity.
    const double a_small = 0.01 * 30.0 / 10.0;
    CHECK(rel(am_am(a_small, b, p), 10.0 * a_small) < 1e-4);

    // Near-hard limiter asymptote.
    p.smoothness = 20.0;
    CHECK(rel(am_am(2 * 30.0 / 10.0, b, p), 30.0) < 1e-3);
}

TEST_CASE("am_am is monotone, bounded by a_sat and slope-limited by g") {
    for (double s : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        PaParams p = fitted_like();
        p.smoothness = s;
        BiasPoint b{48.0, 2.0, 4};
        const double g = std::pow(10.0, small_signal_gain_db(b, p) / 20.0);
        double prev = 0.0;
        for (double x = 0.0; x <= 10.0; x += 0.01) {
            const double y = am_am(x, b, p);
            CHECK(y >= prev);
            CHECK(y <= saturation_envelope(b, p));
            CHECK(y - prev <= g * 0.01 * (1 + 1e-12));
            prev = y;
        }
    }
    CHECK(rapp(1e300, 10.0, 5.0, 20.0) <= 5.0);
}

TEST_CASE("gain law") {
    PaParams p = fitted_like();
    p.ki = 3.0;
    p.ripple_db[Band::M10] = 1.0;
    BiasPoint b{48.0, 0.5, 1};
    const double want = 32.0 + 0.4 * (48 - 58) + 3.0 * std::log10(0.25) + 1.0;
    CHECK(small_signal_gain_db(b, p, Band::M10) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("simulate: zero input is quiescent only") {
    IqBlock z;
    z.sample_rate = 1e6;
    z.samples.assign(100, Complex{});
    const auto r = simulate(z, {58.0, 2.0, 4}, fitted_like());
    CHECK(r.stats.pout_w == 0.0);
    CHECK(r.stats.pdc_w == doctest::Approx(116.0));
    CHECK(std::isnan(r.stats.gain_db));
}

TEST_CASE("simulate: stats identities and phase preservation") {
    signalgen::WaveformSpec s;
    s.kind = signalgen::WaveformKind::TwoTone;
    s.amplitude = 1.5;
    const auto in = signalgen::generate(s, 1e6);
    const auto r = simulate(in, {53.0, 2.0, 4}, fitted_like());
    CHECK(r.stats.pdiss_w == r.stats.pdc_w - r.stats.pout_w);
    CHECK(rel(r.stats.pdiss_w, r.stats.pout_w * (1 / r.stats.eff - 1)) < 1e-12);
    CHECK(r.stats.pdc_w >= r.stats.pout_w);
    for (std::size_t k = 0; k < in.size(); k += 11) {
        if (std::abs(in.samples[k]) > 1e-6) {
            CHECK(std::abs(std::arg(r.output.samples[k] / in.samples[k])) < 1e-12);
        }
    }
}

TEST_CASE("simulate: ripple adds gain before the nonlinearity") {
    PaParams p = fitted_like();
    p.ripple_db[Band::M40] = 1.0;
    signalgen::WaveformSpec s;
    s.amplitude = 0.05;
    const auto in = signalgen::generate(s, 1e6);
    const auto flat = simulate(in, {58, 2, 4}, p, Band::M20);
    const auto up = simulate(in, {58, 2, 4}, p, Band::M40);
    CHECK(up.stats.gain_db - flat.stats.gain_db == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("simulate: efficiency at fixed output rises as vdd falls") {
    const PaParams p = fitted_like();
    const double target = 800.0;
    double prev_eff = 0.0;
    for (double vdd = 58.0; vdd >= 44.0; vdd -= 2.0) {
        // Constant-envelope drive sized for the target output by direct inversion of the limiter.
        const double a_out = std::sqrt(2 * p.rload * target);
        BiasPoint b{vdd, 2.0, 4};
        const double g = std::pow(10.0, small_signal_gain_db(b, p) / 20.0);
        const double a_sat = vdd;
        const double r = a_out / a_sat;
        const double two_s = 2 * p.smoothness;
        const double drive = a_out / g / std::pow(1 - std::pow(r, two_s), 1 / two_s);
        signalgen::WaveformSpec s;
        s.amplitude = drive;
        const auto st = simulate(signalgen::generate(s, 1e6), b, p).stats;
        CHECK(st.pout_w == doctest::Approx(target).epsilon(1e-9));
        CHECK(st.eff > prev_eff);
        prev_eff = st.eff;
    }
}

TEST_CASE("simulate rejects invalid bias") {
    IqBlock z;
    z.samples.assign(4, Complex{1, 0});
    try {
        simulate(z, {60.0, 2.0, 4}, fitted_like());
        FAIL("expected InvalidBias");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidBias);
    }
    CHECK_THROWS_AS(simulate(z, {50.0, 0.0, 4}, fitted_like()), Error);
    CHECK_THROWS_AS(simulate(z, {50.0, 1.0, 5}, fitted_like()), Error);
}

TEST_CASE("params validation") {
    PaParams p;
    p.smoothness = 0.4;
    CHECK_THROWS_AS(validate(p), Error);
    p = {};
    p.vknee = 30.0;
    CHECK_THROWS_AS(validate(p), Error);
    p = {};
    p.rload = 0.0;
    CHECK_THROWS_AS(validate(p), Error);
    CHECK_NOTHROW(validate(PaParams{}));
}
