#pragma once

#include <cstdint>
#include <vector>

namespace capcalc::harness {

// splitmix64: tiny, portable, and identical on every platform (std
// distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

  template <class T>
  const T& pick(const std::vector<T>& xs) { return xs[below(xs.size())]; }

  // weighted choice; returns an index into w
  std::size_t weighted(const std::vector<unsigned>& w) {
    unsigned total = 0;
    for (auto x : w) total += x;
    if (total == 0) return 0;
    auto r = below(total);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (r < w[i]) return i;
      r -= w[i];
    }
    return w.size() - 1;
  }

 private:
  std::uint64_t s_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  Rng r(seed ^ (index * 0xd1b54a32d192ed03ULL));
  r.next();
  return r.next();
}

}  // namespace capcalc::harness
