#pragma once

// Reference computations shared by the tests. Everything here is evaluated
// numerically from first principles, independent of the library code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

struct Fourier {
    double dc = 0.0;
    double fundamental = 0.0;
};

// Composite Simpson integration of i(t) = max(0, idq + ipk cos t) and
// i(t) cos t over one period. Integrates only where the current flows so the
// integrand is smooth on every panel.
inline Fourier clipped_cosine(double idq, double ipk, int panels = 20000) {
    const double pi = std::numbers::pi;
    double lo = -pi, hi = pi;
    if (ipk > idq) {
        // Edge of conduction found by bisection on the waveform itself.
        double a = 0.0, b = pi;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (a + b);
            (idq + ipk * std::cos(m) > 0.0 ? a : b) = m;
        }
        lo = -0.5 * (a + b);
        hi = 0.5 * (a + b);
    }
    const double h = (hi - lo) / panels;
    double s0 = 0.0, s1 = 0.0;
    for (int k = 0; k <= panels; ++k) {
        const double t = lo + k * h;
        const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const double i = std::max(0.0, idq + ipk * std::cos(t));
        s0 += w * i;
        s1 += w * i * std::cos(t);
    }
    return {s0 * h / 3.0 / (2.0 * pi), s1 * h / 3.0 / pi};
}

// Plain O(N) DFT bin of a complex sequence at an arbitrary frequency.
inline std::complex<double> dft_at(const std::vector<std::complex<double>>& x, double f, double fs) {
    std::complex<double> acc{};
    for (std::size_t n = 0; n < x.size(); ++n) {
        acc += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(n) / fs);
    }
    return acc;
}

}  // namespace oracle
