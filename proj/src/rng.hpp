#pragma once

#include <array>
#include <cstdint>

namespace tdlsys {

// Philox4x32 with 10 rounds: a counter-based block cipher turned random
// generator. Stateless: the caller names a 128-bit counter and a 64-bit key
// and gets the same four words back every time, which is what makes ensemble
// runs reproducible regardless of execution order.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// One lazily-evaluated stream of uniform doubles in [0, 1). Streams are
// addressed by (seed, stream, substream); draw i of a stream comes from
// counter block (i/2, substream, stream) under key seed, so any position can
// be revisited with seek(). Two doubles per block, 53 random bits each.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint32_t stream,
               std::uint32_t substream = 0);

  double next_double();
  void seek(std::uint64_t draw_index);
  std::uint64_t position() const { return next_index_; }

 private:
  void refill(std::uint64_t block);

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_ = 0;
  std::uint32_t substream_ = 0;
  std::uint64_t next_index_ = 0;
  std::uint64_t cached_block_ = 0;
  bool have_block_ = false;
  std::array<double, 2> block_vals_{};
};

// Stream ids used across the library so independent consumers never share a
// counter space even under the same seed.
namespace streams {
inline constexpr std::uint32_t simulator = 1;
inline constexpr std::uint32_t lyapunov = 2;
inline constexpr std::uint32_t generator = 3;
inline constexpr std::uint32_t divergence = 4;
inline constexpr std::uint32_t init = 5;
inline constexpr std::uint32_t misc = 6;
}  // namespace streams

// Index of the first entry whose cumulative probability exceeds u; entries
// must be nonnegative. u in [0, 1) and rows summing to 1 make this an exact
// categorical draw. Falls back to the last index if rounding leaves the
// cumulative sum fractionally short of 1.
int sample_categorical(const double* probs, int n, double u);

}  // namespace tdlsys
