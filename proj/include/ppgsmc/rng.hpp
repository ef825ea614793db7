#pragma once

#include <array>
#include <cstdint>

namespace ppgsmc {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based stream: key = seed, counter = (stream id, position).
/// split(i) gives a child stream that depends only on (seed, path of split
/// indices), never on how many draws the parent has made.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  RngStream split(std::uint64_t i) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t position() const { return position_; }

  bool operator==(const RngStream& o) const {
    return seed_ == o.seed_ && stream_ == o.stream_ && position_ == o.position_;
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t position_ = 0;  // number of 64-bit words consumed
  std::uint64_t spare_ = 0;     // second word of the last block
};

}  // namespace ppgsmc
