#include "pabias/params_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pabias/error.hpp"

namespace pabias {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": '" + text + "' is not a number");
    }
    return v;
}

std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

pamodel::PaParams read_params(std::istream& in) {
    pamodel::PaParams p;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const double value = parse_number(trim(line.substr(eq + 1)), line_no);

        if (key == "g0") p.g0 = value;
        else if (key == "kv") p.kv = value;
        else if (key == "ki") p.ki = value;
        else if (key == "rload") p.rload = value;
        else if (key == "vknee") p.vknee = value;
        else if (key == "smoothness") p.smoothness = value;
        else if (key.rfind("ripple.", 0) == 0) {
            try {
                p.ripple_db[parse_band(key.substr(7))] = value;
            } catch (const Error&) {
                throw Error(ErrorCode::ParseError,
                            "line " + std::to_string(line_no) + ": unknown band in '" + key + "'");
            }
        } else {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    pamodel::validate(p);
    return p;
}

pamodel::PaParams load_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_params(in);
}

void write_params(std::ostream& out, const pamodel::PaParams& p, const std::string& comment) {
    if (!comment.empty()) {
        std::istringstream lines(comment);
        for (std::string l; std::getline(lines, l);) {
            out << "# " << l << '\n';
        }
    }
    out << "g0 = " << format(p.g0) << '\n'
        << "kv = " << format(p.kv) << '\n'
        << "ki = " << format(p.ki) << '\n'
        << "rload = " << format(p.rload) << '\n'
        << "vknee = " << format(p.vknee) << '\n'
        << "smoothness = " << format(p.smoothness) << '\n';
    for (const auto& [band, db] : p.ripple_db) {
        out << "ripple." << to_string(band) << " = " << format(db) << '\n';
    }
}

void save_params(const std::filesystem::path& path, const pamodel::PaParams& params,
                 const std::string& comment) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    write_params(out, params, comment);
}

}  // namespace pabias
