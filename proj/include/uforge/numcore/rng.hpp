#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "uforge/numcore/param_vector.hpp"

namespace uforge {

/// Philox4x32-10 block function (Salmon et al., Random123). Exposed for
/// known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. State is (root_seed, stream_id, block counter);
/// the root seed is the Philox key and the stream id occupies the upper half
/// of the 128-bit counter, so distinct streams never share a block.
///
/// Owned by one logical task. Copying a stream copies its position.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t stream_id) noexcept;

  std::uint64_t root_seed() const noexcept { return root_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t words_drawn() const noexcept { return words_drawn_; }

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  /// Standard normal via Box-Muller; draws come in pairs.
  double normal() noexcept;
  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  /// Independent sub-stream for a tagged purpose (epoch shuffles, per-step
  /// noise, ...). Depends only on (root_seed, stream_id, tag), not on the
  /// current position.
  RngStream child(std::uint64_t tag) const noexcept;

 private:
  void refill() noexcept;

  std::uint64_t root_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  unsigned pos_ = 4;
  std::uint64_t words_drawn_ = 0;
  std::optional<double> spare_normal_;
};

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id) noexcept;

/// SplitMix64 finalizer, used to hash tags into stream ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Fill with i.i.d. Normal(0, sd^2).
void normal_fill(std::span<double> out, double sd, RngStream& rng) noexcept;

/// i.i.d. Normal(0, 2/d) vector of dimension d (Kaiming normal with fan-in d).
/// Throws InvalidArgument when d == 0.
ParamVector kaiming_sample(std::size_t d, RngStream& rng);

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void shuffle(std::span<T> items, RngStream& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace uforge
