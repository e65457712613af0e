#pragma once

#include <cstdint>

namespace ssl::rng {

// splitmix64 finalizer. Used as a stateless hash so that every random draw
// is addressed by (seed, stream, element, component) and is therefore
// reproducible bit-for-bit under any execution order.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
  std::uint64_t h = mix(seed ^ 0xA0761D6478BD642Full);
  h = mix(h ^ mix(a + 0x8EBC6AF09C88C6E3ull));
  h = mix(h ^ mix(b + 0x589965CC75374CC3ull));
  h = mix(h ^ mix(c + 0x1D8E4E27C47D124Full));
  return h;
}

// Uniform draw in the open interval (0,1); never returns 0 or 1, so inverse
// CDF transforms stay finite.
inline double uniform01(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace ssl::rng
