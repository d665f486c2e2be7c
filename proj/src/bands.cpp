#include "pabias/bands.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "pabias/error.hpp"

namespace pabias {

std::string_view to_string(Band band) {
    switch (band) {
        case Band::M160: return "160M";
        case Band::M80: return "80M";
        case Band::M60: return "60M";
        case Band::M40: return "40M";
        case Band::M30: return "30M";
        case Band::M20: return "20M";
        case Band::M17: return "17M";
        case Band::M15: return "15M";
        case Band::M12: return "12M";
        case Band::M10: return "10M";
    }
    return "?";
}

Band parse_band(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (Band b : kAllBands) {
        if (to_string(b) == upper) {
            return b;
        }
    }
    throw Error(ErrorCode::UnknownBand, "unknown band '" + std::string(name) + "'");
}

double band_center_hz(Band band) {
    switch (band) {
        case Band::M160: return 1.8e6;
        case Band::M80: return 3.5e6;
        case Band::M60: return 5.3e6;
        case Band::M40: return 7.0e6;
        case Band::M30: return 10.1e6;
        case Band::M20: return 14.0e6;
        case Band::M17: return 18.1e6;
        case Band::M15: return 21.0e6;
        case Band::M12: return 24.9e6;
        case Band::M10: return 28.0e6;
    }
    return 0.0;
}

BandTable default_band_table() {
    BandTable table;
    for (Band b : kAllBands) {
        table[b] = BandEntry{band_center_hz(b), 58.0, 0.0, true};
    }
    return table;
}

}  // namespace pabias
