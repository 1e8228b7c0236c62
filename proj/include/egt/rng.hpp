#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace egt {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for the child stream of realization `index` within stream family `tag`.
// Depends only on (master, tag, index), never on worker count or scheduling.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(tag)) + index);
}

inline constexpr std::uint64_t kCoefficientStream = 0x636f656666ull;
inline constexpr std::uint64_t kEnergyStream = 0x656e65726779ull;

// Gaussian stream: mt19937_64 + Box-Muller. Exactly two uniforms are consumed
// per pair of normals, so the draw count is independent of the values drawn
// and a fixed seed reproduces the sequence bit for bit.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;       // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace egt
