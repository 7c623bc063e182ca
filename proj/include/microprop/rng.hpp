#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace microprop {

/// Seedable generator with a fully specified output sequence.
///
/// The engine is std::mt19937_64, whose sequence the standard pins down
/// exactly. Integer and real draws are derived here (not through the
/// implementation-defined std distributions) so that datasets are
/// bit-identical across platforms and standard libraries:
///   uniform()  = (next() >> 11) * 2^-53            in [0, 1)
///   below(n)   = Lemire multiply-shift with rejection
///   derive(s,k)= splitmix64(s ^ splitmix64(k))     independent substreams
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace microprop
