/* ---------------------------------------------------------------------------
 * rng.cpp -- Philox4x32-10 and Box-Muller Gaussian pairs.
 * ------------------------------------------------------------------------- */
#include "minors/rng.hpp"

#include <cmath>

namespace minors {

namespace {

inline void philox_round(std::uint32_t& c0, std::uint32_t& c1,
                         std::uint32_t& c2, std::uint32_t& c3,
                         std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 =
      static_cast<std::uint64_t>(Philox4x32::kMul0) * c0;
  const std::uint64_t p1 =
      static_cast<std::uint64_t>(Philox4x32::kMul1) * c2;
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t n0 = hi1 ^ c1 ^ k0;
  const std::uint32_t n1 = lo1;
  const std::uint32_t n2 = hi0 ^ c3 ^ k1;
  const std::uint32_t n3 = lo0;
  c0 = n0;
  c1 = n1;
  c2 = n2;
  c3 = n3;
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
  std::uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2],
                c3 = counter[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    philox_round(c0, c1, c2, c3, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

NormalPair philox_normal_pair(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index) {
  const std::array<std::uint32_t, 4> counter{
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream),
      static_cast<std::uint32_t>(stream >> 32)};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed),
                                         static_cast<std::uint32_t>(seed >> 32)};
  const std::array<std::uint32_t, 4> r = Philox4x32::block(counter, key);
  const std::uint64_t hi64 =
      (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
  const std::uint64_t lo64 =
      (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
  // u1 in (0, 1] so the log never sees zero; u2 in [0, 1).
  const double u1 = ((hi64 >> 11) + 1) * 0x1p-53;
  const double u2 = (lo64 >> 11) * 0x1p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.2831853071795864769 * u2;  // 2 pi
  return NormalPair{radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace minors
