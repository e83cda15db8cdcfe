#include "doctest.h"

#include <cmath>
#include <set>

#include "posw/rng.hpp"

using namespace posw;

TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) ==
          C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                            {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                            {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
    }
    CHECK(seen.size() == 300);
}

TEST_CASE("two 64-bit draws consume one block") {
    RngStream s(1, 0);
    const auto blk = RngStream(1, 0).next_block();
    const std::uint64_t lo = blk[0] | (std::uint64_t{blk[1]} << 32);
    const std::uint64_t hi = blk[2] | (std::uint64_t{blk[3]} << 32);
    const std::uint64_t x = s(), y = s();
    CHECK(s.blocks_drawn() == 1);
    CHECK(((x == lo && y == hi) || (x == hi && y == lo)));
    s();
    CHECK(s.blocks_drawn() == 2);
}

TEST_CASE("open unit interval mapping") {
    CHECK(u64_to_open_unit(0) == 0x1.0p-53);
    CHECK(u64_to_open_unit(~std::uint64_t{0}) == 1.0);
    RngStream s(3, 3);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}
