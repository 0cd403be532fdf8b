#pragma once

#include "ctcbert/numerics.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace ctcbert {

using Rng = std::mt19937_64;

/// Seeds a generator from a tuple of integers (e.g. seed, utterance, step).
Rng make_rng(std::initializer_list<std::uint64_t> key);

struct Interval {
  int start = 0;  // inclusive
  int end = 0;    // exclusive

  int length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint, non-touching masked intervals over [0, total_frames).
class MaskSpec {
 public:
  MaskSpec() = default;
  explicit MaskSpec(int total_frames) : total_frames_(total_frames) {}

  /// Sorts and merges arbitrary spans (clipped to [0, total_frames)).
  static MaskSpec from_spans(int total_frames, std::vector<Interval> spans);

  const std::vector<Interval>& intervals() const { return intervals_; }
  int total_frames() const { return total_frames_; }
  int masked_frames() const;
  bool empty() const { return intervals_.empty(); }
  std::vector<bool> frame_mask() const;

 private:
  int total_frames_ = 0;
  std::vector<Interval> intervals_;
};

/// Chooses floor(p*T) distinct start frames uniformly (partial Fisher-Yates),
/// marks [s, min(s + span, T)) for each and merges touching spans.
MaskSpec sample_mask(int total_frames, double start_prob, int span, Rng& rng);

/// Copy of `features` whose masked rows are replaced by `mask_embedding`.
Matrix apply_mask(const Matrix& features, const MaskSpec& spec, const Vector& mask_embedding);

}  // namespace ctcbert
