#pragma once

// Self-contained random number generation. The standard <random>
// distributions are not bit-identical across library implementations,
// and experiment replays must be byte-identical, so everything here is
// built directly on a fixed 64-bit stream: xoshiro256++ seeded through
// splitmix64.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "genlab/error.hpp"

namespace genlab {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Independent substream for a named purpose within one run. Mixes the
  // current stream position with the tag, so forks taken in a fixed order
  // are reproducible.
  Rng fork(std::string_view tag) {
    std::uint64_t h = (*this)();
    for (unsigned char ch : tag) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return Rng(h);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, bound), rejection-free bias below 2^-64 is not
  // acceptable for reproducibility claims, so use Lemire-style rejection.
  std::uint64_t below(std::uint64_t bound) {
    require(bound > 0, "Rng::below: bound must be positive");
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via the polar method (no trig, stream-stable).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = normal();
    return out;
  }

  // Uniform direction on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(Eigen::Index n) {
    require(n >= 1, "Rng::unit_vector: dimension must be positive");
    for (;;) {
      Eigen::VectorXd v = normal_vector(n);
      const double norm = v.norm();
      if (norm > 1e-30) return v / norm;
    }
  }

  // Uniform point in the closed ball of given radius.
  Eigen::VectorXd in_ball(Eigen::Index n, double radius) {
    const double r =
        radius * std::pow(uniform01(), 1.0 / static_cast<double>(n));
    return r * unit_vector(n);
  }

  template <typename Container>
  void shuffle(Container& items) {
    const std::size_t n = items.size();
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Seed for run number `index` of an experiment with the given base seed.
inline std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed ^ index;
}

}  // namespace genlab
