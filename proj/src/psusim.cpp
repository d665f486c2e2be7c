#include "pabias/psusim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pabias/error.hpp"

namespace pabias::psusim {
namespace {

void put_u32(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* in) {
    return (std::uint32_t{in[0]} << 24) | (std::uint32_t{in[1]} << 16) |
           (std::uint32_t{in[2]} << 8) | std::uint32_t{in[3]};
}

Register parse_register(std::uint8_t byte) {
    if (byte == static_cast<std::uint8_t>(Register::Voltage)) return Register::Voltage;
    if (byte == static_cast<std::uint8_t>(Register::Current)) return Register::Current;
    throw Error(ErrorCode::UnknownRegister, "register 0x" + std::to_string(byte));
}

NackCode nack_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadLength: return NackCode::BadLength;
        case ErrorCode::BadDlc: return NackCode::BadDlc;
        case ErrorCode::UnknownId: return NackCode::UnknownId;
        case ErrorCode::UnknownRegister: return NackCode::UnknownRegister;
        default: return NackCode::Unsupported;
    }
}

WireBytes nack(NackCode code) {
    return encode(Nack{static_cast<std::uint8_t>(code)});
}

}  // namespace

WireBytes encode_frame(const CanFrame& frame) {
    WireBytes wire{};
    put_u32(wire.data(), frame.id & kMaxId);
    wire[4] = kDlc;
    std::copy(frame.payload.begin(), frame.payload.end(), wire.begin() + 5);
    return wire;
}

CanFrame decode_frame(std::span<const std::uint8_t> wire) {
    if (wire.size() != kWireSize) {
        throw Error(ErrorCode::BadLength, "frame of " + std::to_string(wire.size()) + " bytes");
    }
    if (wire[4] != kDlc) {
        throw Error(ErrorCode::BadDlc, "DLC " + std::to_string(wire[4]));
    }
    CanFrame frame;
    frame.id = get_u32(wire.data());
    if (frame.id > kMaxId) {
        throw Error(ErrorCode::UnknownId, "identifier exceeds 29 bits");
    }
    std::copy(wire.begin() + 5, wire.end(), frame.payload.begin());
    return frame;
}

CanFrame to_frame(const Command& command) {
    CanFrame frame;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SetVoltage>) {
                frame.id = kIdSetVoltage;
                frame.payload[0] = 0x01;
                put_u32(frame.payload.data() + 4, c.millivolts);
            } else if constexpr (std::is_same_v<T, ReadRegister>) {
                frame.id = kIdRead;
                frame.payload[0] = static_cast<std::uint8_t>(c.reg);
            } else if constexpr (std::is_same_v<T, Reply>) {
                frame.id = kIdReply;
                frame.payload[0] = static_cast<std::uint8_t>(c.reg);
                put_u32(frame.payload.data() + 4, c.milli_units);
            } else {
                frame.id = kIdNack;
                frame.payload[0] = c.code;
            }
        },
        command);
    return frame;
}

Command from_frame(const CanFrame& frame) {
    const auto& p = frame.payload;
    switch (frame.id) {
        case kIdSetVoltage:
            if (p[0] != 0x01) {
                throw Error(ErrorCode::UnknownRegister, "SET_VOLTAGE selector must be 0x01");
            }
            return SetVoltage{get_u32(p.data() + 4)};
        case kIdRead:
            return ReadRegister{parse_register(p[0])};
        case kIdReply:
            return Reply{parse_register(p[0]), get_u32(p.data() + 4)};
        case kIdNack:
            return Nack{p[0]};
        default:
            throw Error(ErrorCode::UnknownId, "identifier " + std::to_string(frame.id));
    }
}

WireBytes encode(const Command& command) {
    return encode_frame(to_frame(command));
}

Command decode(std::span<const std::uint8_t> wire) {
    return from_frame(decode_frame(wire));
}

std::uint32_t to_milli(double value) {
    return static_cast<std::uint32_t>(std::llround(std::max(value, 0.0) * 1000.0));
}

StepResult psu_step(const PsuState& state, double dt_s,
                    std::span<const std::vector<std::uint8_t>> incoming) {
    if (!(dt_s > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
    }
    StepResult result{state, {}};
    PsuState& s = result.state;

    for (const auto& raw : incoming) {
        Command cmd;
        try {
            cmd = decode(raw);
        } catch (const Error& e) {
            result.outgoing.push_back(nack(nack_for(e.code())));
            continue;
        }
        if (!s.online) {
            result.outgoing.push_back(nack(NackCode::Offline));
            continue;
        }
        if (const auto* set = std::get_if<SetVoltage>(&cmd)) {
            const double requested = set->millivolts / 1000.0;
            s.set_voltage_v = std::clamp(requested, kMinVoltage, kMaxVoltage);
            result.outgoing.push_back(encode(Reply{Register::Voltage, to_milli(s.set_voltage_v)}));
        } else if (const auto* read = std::get_if<ReadRegister>(&cmd)) {
            const double value = read->reg == Register::Voltage ? s.actual_voltage_v : s.load_current_a;
            result.outgoing.push_back(encode(Reply{read->reg, to_milli(value)}));
        } else {
            result.outgoing.push_back(nack(NackCode::Unsupported));
        }
    }

    const double max_step = s.slew_v_per_s * dt_s;
    const double error = s.set_voltage_v - s.actual_voltage_v;
    s.actual_voltage_v += std::clamp(error, -max_step, max_step);
    return result;
}

}  // namespace pabias::psusim
