#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "bwk/core.hpp"

namespace bwk {

// Stable 64-bit mixing (SplitMix64 finalizer). Used to derive seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// A reproducible random stream keyed by (seed, stream_id). Uses
// std::mt19937_64, whose output sequence is fixed by the standard, and
// converts to doubles by hand so draws match across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform integer on [0, n).
  std::size_t uniform_index(std::size_t n);
  // Samples an index from a probability vector; never returns a zero-mass arm.
  std::size_t sample(const ProbVector& probs);

  // An independent child stream; the parent is not advanced.
  RngStream fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace bwk
