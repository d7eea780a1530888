#include "doctest.h"
#include "polyfield/rng.hpp"

#include <cmath>
#include <vector>

using namespace polyfield;

TEST_CASE("philox known answers") {
  // Reference vectors for philox4x32 with 10 rounds.
  auto out = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("generator determinism and stream independence") {
  Philox a(42, 0), b(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  Philox base(42, 0);
  Philox s1 = base.stream(1), s1b = base.stream(1), s2 = base.stream(2);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    const auto x = s1(), y = s2();
    CHECK(x == s1b());
    all_equal = all_equal && x == y;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform stays inside the open unit interval") {
  Philox g(7);
  double mn = 1.0, mx = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform(g);
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    sum += u;
  }
  CHECK(mn > 0.0);
  CHECK(mx < 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("exponential and poisson moments") {
  Philox g(11);
  const int n = 200000;
  double se = 0.0;
  for (int i = 0; i < n; ++i) se += exponential(g, 2.0);
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.02));

  for (double mean : {0.3, 3.0, 47.5}) {
    double s = 0.0, s2 = 0.0;
    const int m = 50000;
    for (int i = 0; i < m; ++i) {
      const double x = static_cast<double>(poisson(g, mean));
      s += x;
      s2 += x * x;
    }
    const double avg = s / m, var = s2 / m - avg * avg;
    CHECK(avg == doctest::Approx(mean).epsilon(0.03));
    CHECK(var == doctest::Approx(mean).epsilon(0.08));
  }
}

TEST_CASE("uniform_index covers the range") {
  Philox g(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) ++counts[uniform_index(g, 7)];
  for (int c : counts) CHECK(c > 700);
}
