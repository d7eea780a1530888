#pragma once

#include <cstdint>
#include <array>
#include <cmath>

namespace polyfield {

// Philox4x32-10 counter-based generator.  A generator is identified by
// (seed, stream): `stream(k)` yields an independent generator for replica k
// without touching the parent's state, so replicated runs can be sharded and
// merged deterministically.
class Philox {
 public:
  using result_type = std::uint32_t;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
        idx_(4), seed_(seed), stream_id_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()() {
    if (idx_ == 4) {
      block_ = round10(ctr_, key_);
      advance_counter();
      idx_ = 0;
    }
    return block_[idx_++];
  }

  Philox stream(std::uint64_t k) const { return Philox(seed_, stream_id_ * 0x9e3779b97f4a7c15ull + k + 1); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // One block of raw output for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    return round10(ctr, key);
  }

 private:
  static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> c,
                                              std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
      c = single_round(c, k);
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return c;
  }
  static std::array<std::uint32_t, 4> single_round(const std::array<std::uint32_t, 4>& c,
                                                   const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t m0 = 0xD2511F53ull * c[0];
    const std::uint64_t m1 = 0xCD9E8D57ull * c[2];
    return {static_cast<std::uint32_t>(m1 >> 32) ^ c[1] ^ k[0],
            static_cast<std::uint32_t>(m1),
            static_cast<std::uint32_t>(m0 >> 32) ^ c[3] ^ k[1],
            static_cast<std::uint32_t>(m0)};
  }
  void advance_counter() {
    if (++ctr_[0] == 0 && ++ctr_[1] == 0) ++ctr_[2];
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  int idx_;
  std::uint64_t seed_, stream_id_;
};

using Rng = Philox;

// Uniform in (0,1); never returns 0 or 1 exactly.
inline double uniform(Rng& g) {
  const std::uint64_t hi = g(), lo = g();
  const std::uint64_t bits = (hi << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

inline double uniform(Rng& g, double a, double b) { return a + (b - a) * uniform(g); }

inline double exponential(Rng& g, double rate = 1.0) { return -std::log(uniform(g)) / rate; }

inline bool bernoulli(Rng& g, double p) { return uniform(g) < p; }

// Inversion by multiplication; fine for the modest means used here.
inline long poisson(Rng& g, double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    const double limit = std::exp(-mean);
    long n = 0;
    double prod = uniform(g);
    while (prod > limit) {
      ++n;
      prod *= uniform(g);
    }
    return n;
  }
  // Split recursively to keep the product method in safe floating range.
  return poisson(g, mean / 2) + poisson(g, mean - mean / 2);
}

inline std::size_t uniform_index(Rng& g, std::size_t n) {
  return static_cast<std::size_t>(uniform(g) * static_cast<double>(n)) % n;
}

}  // namespace polyfield
