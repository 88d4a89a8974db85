#include "fdeq/combinatorics.hpp"

#include "fdeq/error.hpp"

namespace fdeq {

bool Pairing::non_crossing() const {
  for (size_t a = 0; a < blocks.size(); ++a)
    for (size_t b = a + 1; b < blocks.size(); ++b) {
      const auto [i, k] = blocks[a];
      const auto [j, l] = blocks[b];
      // pairs are stored (lo, hi); crossing iff i < j < k < l or j < i < l < k
      if ((i < j && j < k && k < l) || (j < i && i < l && l < k)) return false;
    }
  return true;
}

namespace {

void enumerate_pairings(std::vector<int>& free_idx, std::vector<std::pair<int, int>>& acc,
                        std::vector<Pairing>& out) {
  if (free_idx.empty()) {
    out.push_back(Pairing{acc});
    return;
  }
  const int first = free_idx.front();
  for (size_t j = 1; j < free_idx.size(); ++j) {
    const int partner = free_idx[j];
    std::vector<int> rest;
    rest.reserve(free_idx.size() - 2);
    for (size_t t = 1; t < free_idx.size(); ++t)
      if (t != j) rest.push_back(free_idx[t]);
    acc.emplace_back(first, partner);
    enumerate_pairings(rest, acc, out);
    acc.pop_back();
  }
}

} // namespace

std::vector<Pairing> pair_partitions(int n) {
  if (n % 2 != 0) fail(Errc::OddOrder, "pair partitions need an even order");
  if (n > 20) fail(Errc::TooLarge, "pair partition enumeration is capped at n = 20");
  if (n <= 0) return {Pairing{}};
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<Pairing> out;
  std::vector<std::pair<int, int>> acc;
  enumerate_pairings(idx, acc, out);
  return out;
}

std::uint64_t double_factorial_odd(int n) {
  if (n % 2 != 0) fail(Errc::OddOrder, "expected even n");
  std::uint64_t r = 1;
  for (int k = n - 1; k > 1; k -= 2) r *= std::uint64_t(k);
  return r;
}

std::uint64_t catalan(int n) {
  if (n < 0 || n > 32) fail(Errc::TooLarge, "catalan supported for 0 <= n <= 32");
  // binom(2n, n)/(n+1) built incrementally: C_{k+1} = C_k * 2(2k+1)/(k+2)
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * std::uint64_t(k) + 1) / (std::uint64_t(k) + 2);
  return c;
}

namespace {

// count non-crossing pairings of positions [lo, hi) with an optional
// 1-vs-* constraint on each pair
std::uint64_t count_nc(int lo, int hi, const std::vector<bool>* word) {
  if (lo >= hi) return 1;
  if ((hi - lo) % 2 != 0) return 0;
  std::uint64_t total = 0;
  for (int j = lo + 1; j < hi; j += 2) {
    if (word && (*word)[lo] == (*word)[j]) continue;
    total += count_nc(lo + 1, j, word) * count_nc(j + 1, hi, word);
  }
  return total;
}

} // namespace

std::uint64_t ncp2_count(int n) {
  if (n % 2 != 0) fail(Errc::OddOrder, "non-crossing pairings need an even order");
  if (n < 0) fail(Errc::BadArgument, "negative order");
  return count_nc(0, n, nullptr);
}

std::uint64_t circular_word_moment(const std::vector<bool>& word) {
  if (word.size() > 20) fail(Errc::TooLarge, "word length capped at 20");
  if (word.size() % 2 != 0) return 0;
  return count_nc(0, int(word.size()), &word);
}

} // namespace fdeq
