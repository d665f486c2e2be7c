#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "pabias/pamodel.hpp"

namespace pabias {

/// Flat `key = number` config, one entry per line, `#` comments allowed.
/// Keys: g0, kv, ki, rload, vknee, smoothness, ripple.<band>. Missing keys
/// keep their defaults. Throws Error{ParseError} on malformed lines or
/// unknown keys and Error{InvalidParams} if the result is invalid.
pamodel::PaParams read_params(std::istream& in);
pamodel::PaParams load_params(const std::filesystem::path& path);

/// Writes every key at full precision; ripple entries in band order.
void write_params(std::ostream& out, const pamodel::PaParams& params,
                  const std::string& comment = {});
void save_params(const std::filesystem::path& path, const pamodel::PaParams& params,
                 const std::string& comment = {});

}  // namespace pabias
