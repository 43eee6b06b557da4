#include "sdt/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using sdt::PhiloxCounter;
using sdt::PhiloxKey;

TEST_CASE("philox4x32-10 known answers") {
  CHECK(sdt::philox4x32({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(sdt::philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(sdt::philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("derived streams are pure functions of their indices") {
  auto a = sdt::derive_stream(20191203, 7, 3);
  auto b = sdt::derive_stream(20191203, 7, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u32() == b.next_u32());

  std::set<std::uint64_t> first;
  for (std::uint32_t r = 0; r < 64; ++r) first.insert(sdt::derive_stream(20191203, 0, r).next_u64());
  for (std::uint64_t s = 1; s < 64; ++s) first.insert(sdt::derive_stream(20191203, s, 0).next_u64());
  CHECK(first.size() == 127);
}

TEST_CASE("uniform draws stay in range") {
  auto s = sdt::derive_stream(1, 2, 3);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = s.uniform_open_closed();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("bernoulli endpoints are exact") {
  auto s = sdt::derive_stream(5, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(s.bernoulli(0.0));
    CHECK(s.bernoulli(1.0));
  }
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += s.bernoulli(0.3);
  CHECK(std::abs(hits / 1e5 - 0.3) < 0.006);
}

TEST_CASE("mix_seed separates salts") {
  CHECK(sdt::mix_seed(1, 2) != sdt::mix_seed(1, 3));
  CHECK(sdt::mix_seed(1, 2) != sdt::mix_seed(2, 2));
  CHECK(sdt::mix_seed(9, 9) == sdt::mix_seed(9, 9));
}
