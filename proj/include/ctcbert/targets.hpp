#pragma once

#include "ctcbert/ctc.hpp"
#include "ctcbert/masking.hpp"

#include <span>
#include <vector>

namespace ctcbert {

/// Frame-aligned pseudo-label ids, each in [0, V).
using IdSequence = std::vector<int>;

/// Collapses runs of equal adjacent ids to one id.
Labels dedup(std::span<const int> ids);

/// dedup(ids[s, e)) for every masked interval, in interval order.
std::vector<Labels> segment_targets(std::span<const int> ids, const MaskSpec& spec);

}  // namespace ctcbert
