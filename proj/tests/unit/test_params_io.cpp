#include <doctest.h>

#include <sstream>

#include "pabias/error.hpp"
#include "pabias/params_io.hpp"

using namespace pabias;

TEST_CASE("params round trip at full precision") {
    pamodel::PaParams p;
    p.g0 = 39.769644931907749;
    p.kv = 0.1 + 0.2;
    p.ki = -1.5;
    p.rload = 1.0695828889835677;
    p.vknee = 0.0;
    p.smoothness = 20.0;
    p.ripple_db[Band::M10] = -1.5;
    p.ripple_db[Band::M160] = 1.25;
    std::stringstream ss;
    write_params(ss, p, "note");
    CHECK(ss.str().rfind("# note\n", 0) == 0);
    const auto q = read_params(ss);
    CHECK(q.g0 == p.g0);
    CHECK(q.kv == p.kv);
    CHECK(q.ki == p.ki);
    CHECK(q.rload == p.rload);
    CHECK(q.smoothness == p.smoothness);
    CHECK(q.ripple_db == p.ripple_db);
}

TEST_CASE("params parsing errors") {
    auto code_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_params(in);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code_of("g0 = abc\n") == ErrorCode::ParseError);
    CHECK(code_of("gain = 3\n") == ErrorCode::ParseError);
    CHECK(code_of("g0 3\n") == ErrorCode::ParseError);
    CHECK(code_of("ripple.11M = 1\n") == ErrorCode::ParseError);
    CHECK(code_of("smoothness = 50\n") == ErrorCode::InvalidParams);
    CHECK(code_of("# only a comment\n\n") == ErrorCode::InvalidArgument);  // parses fine
}

TEST_CASE("missing file") {
    CHECK_THROWS_AS(load_params("/nonexistent/params.cfg"), Error);
}
