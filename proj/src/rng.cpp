#include "rng.hpp"

#include "errors.hpp"

namespace tdlsys {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c,
                       const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t stream,
                           std::uint32_t substream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream),
      substream_(substream) {}

void RandomStream::refill(std::uint64_t block) {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      substream_, stream_};
  const std::array<std::uint32_t, 4> out = philox4x32(counter, key_);
  block_vals_[0] = to_unit_double(out[0], out[1]);
  block_vals_[1] = to_unit_double(out[2], out[3]);
  cached_block_ = block;
  have_block_ = true;
}

double RandomStream::next_double() {
  const std::uint64_t block = next_index_ >> 1;
  if (!have_block_ || block != cached_block_) refill(block);
  return block_vals_[next_index_++ & 1];
}

void RandomStream::seek(std::uint64_t draw_index) { next_index_ = draw_index; }

int sample_categorical(const double* probs, int n, double u) {
  require(n > 0, ErrorCode::invalid_argument,
          "categorical draw needs at least one outcome");
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += probs[i];
    if (u < cum) return i;
  }
  return n - 1;
}

}  // namespace tdlsys
