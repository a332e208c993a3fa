#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "heavytail/rng.hpp"

using namespace heavytail;

TEST_SUITE("rng") {
  TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 known-answer test set.
    auto out0 = rng::philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out0[0] == 0x6627e8d5u);
    CHECK(out0[1] == 0xe169c58du);
    CHECK(out0[2] == 0xbc57ac4cu);
    CHECK(out0[3] == 0x9b00dbd8u);

    auto out1 = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(out1[0] == 0x408f276du);
    CHECK(out1[1] == 0x41c83b0eu);
    CHECK(out1[2] == 0xa20bc7c6u);
    CHECK(out1[3] == 0x6d5451fdu);

    auto out2 = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(out2[0] == 0xd16cfe09u);
    CHECK(out2[1] == 0x94fdccebu);
    CHECK(out2[2] == 0x5001e420u);
    CHECK(out2[3] == 0x24126ea1u);
  }

  TEST_CASE("streams are deterministic and distinct") {
    rng::RandomStream a1(42, 7), a2(42, 7), b(42, 8);
    bool all_equal = true, any_equal_cross = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a1.next_u64();
      if (x != a2.next_u64()) all_equal = false;
      if (x == b.next_u64()) any_equal_cross = true;
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_cross);
  }

  TEST_CASE("uniform and normal moments") {
    rng::RandomStream rs(1234, 0);
    const int n = 1000000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rs.next_double();
      s += u;
      s2 += u * u;
    }
    CHECK(s / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.005));

    double m = 0.0, v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rs.next_normal();
      m += z;
      v += z * z;
    }
    CHECK(m / n == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
    CHECK(v / n == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("exponential mean and open interval") {
    rng::RandomStream rs(99, 3);
    double s = 0.0;
    double mn = 1.0;
    for (int i = 0; i < 200000; ++i) {
      const double e = rs.next_exponential();
      CHECK(e >= 0.0);
      s += e;
      mn = std::min(mn, rs.next_open_double());
    }
    CHECK(s / 200000 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(mn > 0.0);
  }

  TEST_CASE("derive_stream separates substreams") {
    const auto s1 = rng::derive_stream(5, 1);
    const auto s2 = rng::derive_stream(5, 2);
    CHECK(s1 != s2);
    CHECK(rng::derive_stream(5, 1) == s1);
  }
}
