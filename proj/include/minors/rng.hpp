/* ---------------------------------------------------------------------------
 * rng.hpp -- Philox4x32-10 counter-based generator and Gaussian variates.
 *
 * Counter-based generation keys every random number by (seed, stream,
 * entry index), so a Gaussian array can be extended to a larger size --
 * or regenerated on another machine -- without replaying a sequential
 * stream.  Constants are the standard Philox multipliers/Weyl keys; the
 * implementation is validated against the published known-answer vectors.
 * ------------------------------------------------------------------------- */
#pragma once

#include <array>
#include <cstdint>

namespace minors {

struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  // One 10-round block: 128-bit counter, 64-bit key -> 128 random bits.
  static std::array<std::uint32_t, 4> block(
      const std::array<std::uint32_t, 4>& counter,
      const std::array<std::uint32_t, 2>& key);
};

// Two independent standard normals from one Philox block via Box-Muller.
// u1 = ((hi64 >> 11)+1) * 2^-53 in (0,1] (never zero), u2 = (lo64 >> 11) * 2^-53.
struct NormalPair {
  double g1;
  double g2;
};

NormalPair philox_normal_pair(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index);

}  // namespace minors
