#ifndef COLOC_RANDOM_HPP_
#define COLOC_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace coloc {

/// The random stream type threaded explicitly through every stochastic
/// operation. Streams are never shared between agents or threads.
using Rng = std::mt19937_64;

/// Builds an independent stream from a base seed and a list of stream tags
/// (agent index, purpose, ...). Same inputs always give the same stream.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint32_t> tags) {
  std::seed_seq::result_type words[16];
  std::size_t n = 0;
  words[n++] = static_cast<std::uint32_t>(seed);
  words[n++] = static_cast<std::uint32_t>(seed >> 32);
  for (auto t : tags) {
    if (n == 16) break;
    words[n++] = t;
  }
  std::seed_seq seq(words, words + n);
  return Rng(seq);
}

}  // namespace coloc

#endif  // COLOC_RANDOM_HPP_
