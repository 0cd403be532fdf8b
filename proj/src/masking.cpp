#include "ctcbert/masking.hpp"

#include "ctcbert/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctcbert {

Rng make_rng(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

MaskSpec MaskSpec::from_spans(int total_frames, std::vector<Interval> spans) {
  MaskSpec spec(total_frames);
  for (Interval& s : spans) {
    s.start = std::max(s.start, 0);
    s.end = std::min(s.end, total_frames);
  }
  std::erase_if(spans, [](const Interval& s) { return s.end <= s.start; });
  std::sort(spans.begin(), spans.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (const Interval& s : spans) {
    if (!spec.intervals_.empty() && spec.intervals_.back().end >= s.start) {
      spec.intervals_.back().end = std::max(spec.intervals_.back().end, s.end);
    } else {
      spec.intervals_.push_back(s);
    }
  }
  return spec;
}

int MaskSpec::masked_frames() const {
  int total = 0;
  for (const Interval& i : intervals_) total += i.length();
  return total;
}

std::vector<bool> MaskSpec::frame_mask() const {
  std::vector<bool> mask(total_frames_, false);
  for (const Interval& i : intervals_) {
    std::fill(mask.begin() + i.start, mask.begin() + i.end, true);
  }
  return mask;
}

MaskSpec sample_mask(int total_frames, double start_prob, int span, Rng& rng) {
  require(total_frames >= 1, ErrorKind::ConfigInvalid, "mask needs at least one frame");
  require(start_prob >= 0.0 && start_prob <= 1.0, ErrorKind::ConfigInvalid,
          "mask start probability must lie in [0, 1]");
  require(span >= 1, ErrorKind::ConfigInvalid, "mask span must be >= 1");

  const int starts = static_cast<int>(std::floor(start_prob * total_frames));
  std::vector<int> frames(total_frames);
  std::iota(frames.begin(), frames.end(), 0);
  std::vector<Interval> spans;
  spans.reserve(starts);
  for (int i = 0; i < starts; ++i) {
    std::uniform_int_distribution<int> pick(i, total_frames - 1);
    std::swap(frames[i], frames[pick(rng)]);
    spans.push_back({frames[i], frames[i] + span});
  }
  return MaskSpec::from_spans(total_frames, std::move(spans));
}

Matrix apply_mask(const Matrix& features, const MaskSpec& spec, const Vector& mask_embedding) {
  require(mask_embedding.size() == features.cols(), ErrorKind::DimensionMismatch,
          "mask embedding dimension differs from feature dimension");
  require(spec.total_frames() == features.rows(), ErrorKind::DimensionMismatch,
          "mask covers a different number of frames than the features");
  Matrix out = features;
  for (const Interval& i : spec.intervals()) {
    for (int t = i.start; t < i.end; ++t) out.row(t) = mask_embedding.transpose();
  }
  return out;
}

}  // namespace ctcbert
