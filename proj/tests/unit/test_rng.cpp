#include <doctest.h>

#include <cmath>
#include <set>

#include "ppgsmc/rng.hpp"

using namespace ppgsmc;

TEST_CASE("philox known answers") {
  auto a = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto b = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same seed, same sequence") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(43);
  RngStream d(42);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next_u64() == d.next_u64();
  CHECK(same == 0);
}

TEST_CASE("split ignores parent position") {
  RngStream a(7);
  RngStream child0 = a.split(3);
  a.next_u64();
  a.uniform();
  RngStream child1 = a.split(3);
  CHECK(child0.next_u64() == child1.next_u64());
  CHECK(a.split(1).split(2).next_u64() != a.split(2).split(1).next_u64());
}

TEST_CASE("distinct substreams differ") {
  RngStream root(1);
  std::set<std::uint64_t> first;
  for (std::uint64_t i = 0; i < 1000; ++i) first.insert(root.split(i).next_u64());
  CHECK(first.size() == 1000);
}

TEST_CASE("uniform moments") {
  RngStream r(9);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(std::abs(s / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(s2 / n - 1.0 / 3) < 0.005);
  RngStream o(0);
  for (int i = 0; i < 1000; ++i) {
    double u = o.uniform_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("adjacent substreams are uncorrelated") {
  RngStream root(5);
  const int n = 20000;
  double sxy = 0, sx = 0, sy = 0;
  for (int j = 0; j < n; ++j) {
    RngStream a = root.split(2 * j), b = root.split(2 * j + 1);
    double x = a.uniform(), y = b.uniform();
    sxy += x * y;
    sx += x;
    sy += y;
  }
  double cov = sxy / n - (sx / n) * (sy / n);
  CHECK(std::abs(cov) < 4.0 / 12 / std::sqrt(double(n)));
}
