#pragma once

#include <optional>
#include <vector>

#include "dibs/interval.hpp"
#include "dibs/similarity.hpp"

namespace dibs {

/// Drop cost for the alignment, either given directly or derived per matrix
/// from a percentile of its entries. Exactly one of the two must be set.
struct DropDtwConfig {
    std::optional<double> drop_cost;
    std::optional<double> percentile;

    static DropDtwConfig from_cost(double c) { return {c, std::nullopt}; }
    static DropDtwConfig from_percentile(double p) { return {std::nullopt, p}; }
    /// 30th percentile unless configured otherwise.
    static DropDtwConfig defaults() { return from_percentile(30.0); }
};

/// Per-frame assignment: caption index, or kDrop for dropped frames.
/// Non-drop entries are non-decreasing along the frame axis.
inline constexpr int kDrop = -1;

struct Alignment {
    std::vector<int> assignment;
};

/// p-th percentile (linear interpolation) of all matrix entries.
double percentile_drop_cost(const SimilarityMatrix& s, double p);

/// Monotone alignment of the caption sequence to frames where each frame
/// either matches a caption or is dropped at `drop_cost`. Maximizes total
/// matched similarity plus drop_cost per dropped frame. Ties prefer matching
/// over dropping, then the smaller caption index.
Alignment drop_dtw_align(const SimilarityMatrix& s, const DropDtwConfig& cfg);

/// Total alignment score under the same objective drop_dtw_align maximizes.
double alignment_score(const SimilarityMatrix& s, const Alignment& a, double drop_cost);

/// Resolve the config against a matrix to a concrete drop cost.
double resolve_drop_cost(const SimilarityMatrix& s, const DropDtwConfig& cfg);

/// Boundary n spans [min matched frame, max matched frame + 1). Captions with
/// no matched frame get a degenerate boundary at the video midpoint, flagged.
BoundarySet alignment_to_boundaries(const Alignment& a, const Timeline& timeline,
                                    int n_captions);

}  // namespace dibs
