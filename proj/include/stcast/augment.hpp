#pragma once

#include "stcast/events.hpp"

namespace stcast::augment {

// How to treat a trailing partial day block.
enum class PadPolicy { Error, DropPartial, ZeroPad };

// Within-day running sum with period T: y(t) = sum_{s=nT}^{t} x(s) for
// t in [nT, (n+1)T). One-to-one; inverse is decumulate.
NodeSeries cumulate(const NodeSeries& raw, int period, PadPolicy pad = PadPolicy::Error);

// First differences within each day block; block-initial values pass through.
NodeSeries decumulate(const NodeSeries& cumulative, int period);

// Doubles the temporal resolution of each day block by midpoint
// interpolation: block length T becomes 2T-1. Strictly local to the block,
// so perturbing one day never touches another day's output.
NodeSeries super_resolve(const NodeSeries& cumulative, int period);

// Keeps the even offsets of each super-resolved block; exact left inverse of
// super_resolve.
NodeSeries downsample(const NodeSeries& super_resolved, int period);

} // namespace stcast::augment
