#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pabias/error.hpp"
#include "pabias/iq.hpp"
#include "pabias/signalgen.hpp"

using namespace pabias;
using namespace pabias::signalgen;

namespace {

WaveformSpec make(WaveformKind kind, double duration = 1e-3) {
    WaveformSpec s;
    s.kind = kind;
    s.duration_s = duration;
    return s;
}

double env_spread(const IqBlock& b) {
    const auto e = envelope(b);
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    return *hi - *lo;
}

}  // namespace

TEST_CASE("cw block has constant envelope and expected length") {
    const auto b = generate(make(WaveformKind::CW), 1e6);
    CHECK(b.size() == 1000);
    for (double v : envelope(b)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-tone papr matches brute force over one beat") {
    auto s = make(WaveformKind::TwoTone, 10e-3);  // 20 beat periods at 2 kHz spacing
    const auto b = generate(s, 1e6);
    // Independent evaluation of |0.5 e^{jw1 t} + 0.5 e^{jw2 t}|^2 on a fine grid.
    double peak = 0.0, sum = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double t = k * (0.5e-3 / n);
        const double p = std::pow(std::cos(std::numbers::pi * 2e3 * t), 2);
        peak = std::max(peak, p);
        sum += p;
    }
    const double oracle = 10.0 * std::log10(peak / (sum / n));
    CHECK(oracle == doctest::Approx(3.0103).epsilon(1e-4));
    CHECK(std::abs(papr_db(b.samples) - oracle) <= 0.01);
    CHECK(std::abs(papr_db(b.samples) - 3.0103) <= 0.02);
}

TEST_CASE("two-tone envelope approaches zero within a beat period") {
    const auto b = generate(make(WaveformKind::TwoTone), 1e6);
    const auto e = envelope(b);
    CHECK(*std::min_element(e.begin(), e.end()) < 1e-2);
    CHECK(*std::max_element(e.begin(), e.end()) <= 1.0 * (1 + 1e-9));
}

TEST_CASE("am with zero index equals cw envelope") {
    auto am = make(WaveformKind::AM);
    am.am_index = 0.0;
    const auto a = envelope(generate(am, 1e6));
    const auto c = envelope(generate(make(WaveformKind::CW), 1e6));
    REQUIRE(a.size() == c.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-15));
}

TEST_CASE("am envelope follows the modulation law") {
    auto s = make(WaveformKind::AM);
    s.am_index = 0.3;
    s.amplitude = 2.0;
    const auto b = generate(s, 1e6);
    for (std::size_t k = 0; k < b.size(); k += 37) {
        const double t = k / 1e6;
        const double want = 2.0 * (1 + 0.3 * std::cos(2 * std::numbers::pi * 1e3 * t)) / 1.3;
        CHECK(std::abs(b.samples[k]) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("constant-envelope kinds stay flat") {
    for (auto kind : {WaveformKind::CW, WaveformKind::FM, WaveformKind::PSK}) {
        for (double amp : {0.01, 1.0, 100.0}) {
            auto s = make(kind, 2e-3);
            s.amplitude = amp;
            const auto b = generate(s, 1e6);
            CHECK(env_spread(b) <= 1e-9 * amp);
        }
    }
    auto q = make(WaveformKind::PSK);
    q.psk_order = 4;
    CHECK(env_spread(generate(q, 1e6)) <= 1e-9);
}

TEST_CASE("fm magnitude is exact at every sample") {
    auto s = make(WaveformKind::FM);
    s.fm_deviation_hz = 25e3;
    s.amplitude = 0.7;
    for (const auto& z : generate(s, 1e6).samples) CHECK(std::abs(z) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("psk phases come from the symbol alphabet") {
    auto s = make(WaveformKind::PSK);
    s.psk_order = 4;
    const auto b = generate(s, 1e6);
    int changes = 0;
    for (std::size_t k = 0; k < b.size(); ++k) {
        const double ph = std::arg(b.samples[k]);
        const double m = std::fmod(ph - std::numbers::pi / 4 + 4 * std::numbers::pi, std::numbers::pi / 2);
        CHECK(std::min(m, std::numbers::pi / 2 - m) < 1e-9);
        if (k > 0 && std::abs(b.samples[k] - b.samples[k - 1]) > 1e-6) ++changes;
    }
    CHECK(changes > 0);
}

TEST_CASE("generate is deterministic") {
    for (auto kind : {WaveformKind::CW, WaveformKind::FM, WaveformKind::PSK, WaveformKind::AM,
                      WaveformKind::TwoTone}) {
        auto s = make(kind);
        s.noise_dbc = -60.0;
        const auto a = generate(s, 1e6);
        const auto b = generate(s, 1e6);
        CHECK(a.samples == b.samples);
    }
}

TEST_CASE("peak envelope never exceeds amplitude") {
    for (auto kind : {WaveformKind::CW, WaveformKind::FM, WaveformKind::PSK, WaveformKind::AM,
                      WaveformKind::TwoTone}) {
        auto s = make(kind, 5e-3);
        s.amplitude = 3.3;
        const auto e = envelope(generate(s, 1e6));
        CHECK(*std::max_element(e.begin(), e.end()) <= 3.3 * (1 + 1e-9));
    }
}

TEST_CASE("noise floor sits at the requested level") {
    auto s = make(WaveformKind::CW, 20e-3);
    s.noise_dbc = -40.0;
    const auto noisy = generate(s, 1e6);
    const auto clean = generate(make(WaveformKind::CW, 20e-3), 1e6);
    double p = 0.0;
    for (std::size_t k = 0; k < noisy.size(); ++k) p += std::norm(noisy.samples[k] - clean.samples[k]);
    p /= noisy.size();
    CHECK(10 * std::log10(p) == doctest::Approx(-40.0).epsilon(0.01));
}

TEST_CASE("invalid specs are rejected") {
    auto check_invalid = [](const WaveformSpec& s) {
        try {
            generate(s, 1e6);
            FAIL("expected InvalidSpec");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidSpec);
        }
    };
    auto s = make(WaveformKind::CW);
    s.offset_hz = 6e5;
    check_invalid(s);
    s = make(WaveformKind::AM);
    s.am_index = 1.5;
    check_invalid(s);
    s = make(WaveformKind::PSK);
    s.psk_order = 8;
    check_invalid(s);
    s = make(WaveformKind::TwoTone);
    s.tone2_hz = 5e5;
    check_invalid(s);
    s = make(WaveformKind::FM);
    s.fm_deviation_hz = 499.9e3;
    check_invalid(s);
    CHECK_THROWS_AS(parse_kind("ofdm"), Error);
}

TEST_CASE("kind names") {
    CHECK(parse_kind("ssb") == WaveformKind::TwoTone);
    CHECK(spec_for("qpsk").psk_order == 4);
    CHECK(spec_for("bpsk").psk_order == 2);
    CHECK(is_constant_envelope(WaveformKind::PSK));
    CHECK_FALSE(is_constant_envelope(WaveformKind::AM));
}

TEST_CASE("envelope of a zero block is zero") {
    IqBlock z;
    z.sample_rate = 1e6;
    z.samples.assign(64, Complex{});
    for (double v : envelope(z)) CHECK(v == 0.0);
    CHECK(papr_db(z.samples) == 0.0);
}
