#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace pabias::psusim {

// Wire format (13 bytes, fixed): 4-byte big-endian extended id (top three
// bits zero), DLC byte (always 8), 8 payload bytes.
inline constexpr std::size_t kWireSize = 13;
inline constexpr std::uint8_t kDlc = 8;
inline constexpr std::uint32_t kMaxId = (1u << 29) - 1;

inline constexpr std::uint32_t kIdSetVoltage = 0x10018000;
inline constexpr std::uint32_t kIdRead = 0x10018001;
inline constexpr std::uint32_t kIdReply = 0x10018002;
inline constexpr std::uint32_t kIdNack = 0x10018003;

inline constexpr double kMinVoltage = 30.0;
inline constexpr double kMaxVoltage = 58.0;

enum class Register : std::uint8_t { Voltage = 0x01, Current = 0x02 };

enum class NackCode : std::uint8_t {
    BadLength = 0x01,
    BadDlc = 0x02,
    UnknownId = 0x03,
    UnknownRegister = 0x04,
    Unsupported = 0x05,  // a reply-type frame sent to the supply
    Offline = 0x06,
};

using WireBytes = std::array<std::uint8_t, kWireSize>;

struct CanFrame {
    std::uint32_t id = 0;
    std::array<std::uint8_t, 8> payload{};

    bool operator==(const CanFrame&) const = default;
};

struct SetVoltage {
    std::uint32_t millivolts = 0;
    bool operator==(const SetVoltage&) const = default;
};
struct ReadRegister {
    Register reg = Register::Voltage;
    bool operator==(const ReadRegister&) const = default;
};
struct Reply {
    Register reg = Register::Voltage;
    std::uint32_t milli_units = 0;
    bool operator==(const Reply&) const = default;
};
struct Nack {
    std::uint8_t code = 0;
    bool operator==(const Nack&) const = default;
};

using Command = std::variant<SetVoltage, ReadRegister, Reply, Nack>;

WireBytes encode_frame(const CanFrame& frame);
/// Throws Error{BadLength}, Error{BadDlc}, Error{UnknownId} (reserved id bits set).
CanFrame decode_frame(std::span<const std::uint8_t> wire);

CanFrame to_frame(const Command& command);
/// Throws Error{UnknownId}, Error{UnknownRegister}.
Command from_frame(const CanFrame& frame);

WireBytes encode(const Command& command);
Command decode(std::span<const std::uint8_t> wire);

std::uint32_t to_milli(double value);

struct PsuState {
    double set_voltage_v = 48.0;
    double actual_voltage_v = 48.0;
    double load_current_a = 0.0;
    double slew_v_per_s = 50.0;
    bool online = true;

    bool operator==(const PsuState&) const = default;
};

struct StepResult {
    PsuState state;
    std::vector<WireBytes> outgoing;
};

/// Processes incoming frames in order, then slews the output for `dt_s`.
/// Protocol errors produce NACK frames and leave the state untouched.
/// Throws Error{InvalidArgument} if dt_s <= 0.
StepResult psu_step(const PsuState& state, double dt_s,
                    std::span<const std::vector<std::uint8_t>> incoming);

}  // namespace pabias::psusim
