#include "shapelets/rng.hpp"

namespace shapelets {

namespace {

// splitmix64; the usual seed expander.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master ^ (0x9e3779b97f4a7c15ull * (index + 1));
  std::uint64_t a = splitmix64(state);
  std::uint64_t b = splitmix64(state);
  return a ^ (b << 1);
}

std::uint64_t Rng::next() { return splitmix64(state_); }

std::uint64_t Rng::bounded(std::uint64_t n) {
  // Multiply-shift map of 64 random bits onto [0, n).
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  // Box-Muller; u clamped away from 0 so the log stays finite.
  double u = uniform();
  if (u < 1e-300) u = 1e-300;
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  return r * std::cos(2.0 * 3.14159265358979323846 * v);
}

}  // namespace shapelets
