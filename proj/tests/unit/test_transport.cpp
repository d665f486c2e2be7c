#include <doctest.h>

#include <thread>

#include "pabias/error.hpp"
#include "pabias/transport.hpp"

using namespace pabias;
using namespace pabias::transport;
using namespace std::chrono_literals;

TEST_CASE("queue link pair is ordered and bidirectional") {
    auto [a, b] = make_link_pair();
    for (std::uint32_t v = 0; v < 50; ++v) a->send(psusim::encode(psusim::SetVoltage{v}));
    for (std::uint32_t v = 0; v < 50; ++v) {
        auto f = b->receive(0ms);
        REQUIRE(f.has_value());
        CHECK(std::get<psusim::SetVoltage>(psusim::decode(*f)).millivolts == v);
    }
    CHECK_FALSE(b->receive(0ms).has_value());
    b->send(psusim::encode(psusim::Nack{3}));
    CHECK(a->receive(10ms).has_value());
}

TEST_CASE("address parsing") {
    CHECK(parse_address("127.0.0.1:5025") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 5025});
    CHECK(parse_address("localhost:0").second == 0);
    CHECK_THROWS_AS(parse_address("nohost"), Error);
    CHECK_THROWS_AS(parse_address("h:70000"), Error);
    CHECK_THROWS_AS(parse_address("h:12x"), Error);
    CHECK_THROWS_AS(parse_address(":12"), Error);
}

TEST_CASE("tcp server answers set and read") {
    PsuTcpServer server("127.0.0.1", 0, psusim::PsuState{});
    REQUIRE(server.port() != 0);
    std::thread t([&] { server.serve(1); });
    {
        auto link = TcpLink::connect("127.0.0.1", server.port());
        link->send(psusim::encode(psusim::SetVoltage{60000}));
        auto r = link->receive(2000ms);
        REQUIRE(r.has_value());
        CHECK(std::get<psusim::Reply>(psusim::decode(*r)).milli_units == 58000);

        link->send(psusim::encode(psusim::ReadRegister{psusim::Register::Current}));
        r = link->receive(2000ms);
        REQUIRE(r.has_value());
        CHECK(std::get<psusim::Reply>(psusim::decode(*r)).reg == psusim::Register::Current);

        // A frame with a bad DLC is refused without touching the set point.
        auto bad = psusim::encode(psusim::SetVoltage{40000});
        bad[4] = 3;
        link->send(bad);
        r = link->receive(2000ms);
        REQUIRE(r.has_value());
        CHECK(std::holds_alternative<psusim::Nack>(psusim::decode(*r)));
    }
    t.join();
    CHECK(server.state().set_voltage_v == 58.0);
}
