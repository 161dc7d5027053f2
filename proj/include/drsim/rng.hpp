#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeding scheme: every consumer of randomness (noise paths, DR sequences,
// rollout evaluations, ...) derives its own stream seed from the master seed
// plus small integer tags, so streams stay independent and a rerun with the
// same master seed reproduces every draw bit for bit.

namespace drsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 12) + (a >> 4));
  return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag0,
                                 std::uint64_t tag1 = 0, std::uint64_t tag2 = 0) {
  return mix_seed(mix_seed(mix_seed(master, tag0), tag1), tag2);
}

// Stream tags. Keep values stable: changing them changes every derived seed.
namespace stream {
inline constexpr std::uint64_t awgn = 11;
inline constexpr std::uint64_t dr_flags = 12;
inline constexpr std::uint64_t theta_fit = 13;
inline constexpr std::uint64_t rollout_eval = 14;
inline constexpr std::uint64_t improvement = 15;
inline constexpr std::uint64_t property_check = 16;
}  // namespace stream

// mt19937_64 is fully specified by the standard, and the uniform and normal
// transforms below are our own, so identical seeds give identical streams on
// any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller, spare value cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  int bernoulli(double p) { return uniform01() < p ? 1 : 0; }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace drsim
