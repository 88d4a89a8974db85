#pragma once

#include <cstdint>
#include <vector>

namespace fdeq {

/// Perfect matching of {1..2k} as index pairs (0-based internally).
struct Pairing {
  std::vector<std::pair<int, int>> blocks;
  bool non_crossing() const;
};

/// All (n-1)!! perfect matchings of {1..n}, lexicographic. pre: n even, n <= 20.
std::vector<Pairing> pair_partitions(int n);

std::uint64_t double_factorial_odd(int n); // (n-1)!! for even n

std::uint64_t catalan(int n); // C_n = binom(2n, n)/(n+1)

/// |NCP_2(n)| counted by direct non-crossing enumeration (never materializes
/// crossing pairings), cross-checkable against the Catalan formula.
std::uint64_t ncp2_count(int n);

/// Number of non-crossing pairings of the word positions where every pair
/// joins a 1 with a *. Entries: false = 1, true = *. pre: length <= 20.
std::uint64_t circular_word_moment(const std::vector<bool>& word);

} // namespace fdeq
