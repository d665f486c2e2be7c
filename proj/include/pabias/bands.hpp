#pragma once

#include <array>
#include <map>
#include <string_view>

namespace pabias {

/// Amateur HF bands used as the gain-equalization grid.
enum class Band { M160, M80, M60, M40, M30, M20, M17, M15, M12, M10 };

inline constexpr std::array<Band, 10> kAllBands = {
    Band::M160, Band::M80, Band::M60, Band::M40, Band::M30,
    Band::M20,  Band::M17, Band::M15, Band::M12, Band::M10,
};

std::string_view to_string(Band band);

/// Accepts "160M" / "160m". Throws Error{UnknownBand}.
Band parse_band(std::string_view name);

/// Lower band-edge allocation in Hz (1.8, 3.5, ... 28.0 MHz).
double band_center_hz(Band band);

struct BandEntry {
    double center_hz = 0.0;
    double eq_vdd = 58.0;     // drain supply used in linear mode on this band
    double ripple_db = 0.0;   // gain deviation of the matching networks
    bool reachable = true;    // false when equalization clamped at a supply limit
};

using BandTable = std::map<Band, BandEntry>;

/// All ten bands, eq_vdd = 58 V, zero ripple.
BandTable default_band_table();

}  // namespace pabias
