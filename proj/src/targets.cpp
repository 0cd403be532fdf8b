#include "ctcbert/targets.hpp"

#include "ctcbert/error.hpp"

#include <string>

namespace ctcbert {

Labels dedup(std::span<const int> ids) {
  Labels out;
  for (int id : ids) {
    if (out.empty() || out.back() != id) out.push_back(id);
  }
  return out;
}

std::vector<Labels> segment_targets(std::span<const int> ids, const MaskSpec& spec) {
  require(static_cast<int>(ids.size()) == spec.total_frames(), ErrorKind::LengthMismatch,
          "id sequence has " + std::to_string(ids.size()) + " frames, mask expects " +
              std::to_string(spec.total_frames()));
  std::vector<Labels> targets;
  targets.reserve(spec.intervals().size());
  for (const Interval& i : spec.intervals()) {
    targets.push_back(dedup(ids.subspan(i.start, i.length())));
  }
  return targets;
}

}  // namespace ctcbert
