#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ncps {

// Standard-normal stream with a pinned algorithm (Box-Muller over
// mt19937_64), so a fixed seed reproduces byte-identical reports.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1]: guards the log against zero
    const double u1 =
        (static_cast<double>(engine_()) + 1.0) / (static_cast<double>(engine_.max()) + 1.0);
    const double u2 =
        static_cast<double>(engine_()) / (static_cast<double>(engine_.max()) + 1.0);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  double next(double sigma) { return sigma * next(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable per-task seed derivation (splitmix64 of seed and stream index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ncps
