#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace pauliprop {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exact sum of doubles whose result does not depend on the order of add()
/// calls. Values are binned as integers by exponent; rounding happens only
/// when the result is read.
class ExactSum {
 public:
  void add(double v);
  double value() const;

 private:
  static constexpr int kOffset = 1152;
  static constexpr int kBlocks = 72;
  __int128 blocks_[kBlocks] = {};
};

/// Mean and standard error accumulator over compensated sums.
class MeanAccumulator {
 public:
  void add(double v) {
    sum_.add(v);
    sum_sq_.add(v * v);
    ++count_;
  }
  void merge(const MeanAccumulator& o) {
    sum_.add(o.sum_.value());
    sum_sq_.add(o.sum_sq_.value());
    count_ += o.count_;
  }
  std::uint64_t count() const { return count_; }
  double mean() const { return count_ == 0 ? 0.0 : sum_.value() / static_cast<double>(count_); }
  /// Unbiased sample variance.
  double variance() const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double m = mean();
    const double v = (sum_sq_.value() - n * m * m) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double stderr_of_mean() const { return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_)); }

 private:
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
  std::uint64_t count_ = 0;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: stream `index` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ (index * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace pauliprop
