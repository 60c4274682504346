#include "uforge/numcore/rng.hpp"

#include <cmath>
#include <numbers>

#include "uforge/numcore/error.hpp"

namespace uforge {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t root_seed, std::uint64_t stream_id) noexcept
    : root_seed_(root_seed), stream_id_(stream_id) {}

RngStream derive_stream(std::uint64_t root_seed, std::uint64_t stream_id) noexcept {
  return RngStream(root_seed, stream_id);
}

void RngStream::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(root_seed_),
                                            static_cast<std::uint32_t>(root_seed_ >> 32)};
  buf_ = philox4x32_10(ctr, key);
  ++block_;
  pos_ = 0;
}

std::uint32_t RngStream::next_u32() noexcept {
  if (pos_ == 4) refill();
  ++words_drawn_;
  return buf_[pos_++];
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() noexcept {
  // (k + 0.5) / 2^53 for k in [0, 2^53): never exactly 0 or 1.
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() noexcept {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(phase);
  return r * std::cos(phase);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) noexcept {
  // Rejection on the top of the 64-bit range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

RngStream RngStream::child(std::uint64_t tag) const noexcept {
  return RngStream(root_seed_, mix64(stream_id_ ^ mix64(tag + 0x632BE59BD9B4E019ull)));
}

void normal_fill(std::span<double> out, double sd, RngStream& rng) noexcept {
  for (double& v : out) v = sd * rng.normal();
}

ParamVector kaiming_sample(std::size_t d, RngStream& rng) {
  if (d == 0) throw InvalidArgument("kaiming_sample: dimension must be positive");
  ParamVector out(d);
  normal_fill(out.span(), std::sqrt(2.0 / static_cast<double>(d)), rng);
  return out;
}

}  // namespace uforge
