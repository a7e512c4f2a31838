#pragma once

#include <vector>

#include "dibs/interval.hpp"
#include "dibs/similarity.hpp"

namespace dibs {

/// Iterative caption-aware boundary search parameters.
struct GenConfig {
    int top_k = 15;
    int iterations = 5;
    double alpha = 1.0;           // coarse-boundary half-width multiplier
    double window_margin = 0.5;   // window expansion per side, fraction of boundary length

    void validate() const;
};

/// Highest-similarity frame positions for one caption inside a search window,
/// with their similarity scores. Positions are unique integer frame indices.
struct TopKFrames {
    std::vector<int> positions;
    std::vector<double> scores;
};

/// One step of the per-caption search, recorded for trace inspection.
struct IterationRecord {
    Boundary boundary;
    double loss = 0.0;
    int center = 0;
    double std_dev = 0.0;
};

/// The min(k, window size) frames inside `window` with the highest similarity
/// to caption n; ties go to the lower frame index.
TopKFrames topk_local(const SimilarityMatrix& s, int n, const Boundary& window, int k);

/// The position minimizing total L1 distance to all positions; ties go to the
/// earliest frame.
int medoid_center(const TopKFrames& t);

/// Root mean squared deviation of positions from `center` (population form).
double boundary_std(const TopKFrames& t, int center);

/// Coarse interval [center - alpha*std, center + alpha*std] clipped to the
/// video, tightened to [min, max + 1) over the positions of `t` inside it.
/// Falls back to [center, center + 1) when no position lands inside.
Boundary tighten(int center, double std_dev, double alpha, const TopKFrames& t,
                 const Timeline& timeline);

/// Signed frame-to-boundary distance: negative strictly inside, positive
/// strictly outside, zero on either edge.
double dis(double f, const Boundary& b);

/// Sum over top-k frames of similarity-weighted dis against `b`.
double caption_loss(const SimilarityMatrix& s, int n, const TopKFrames& t,
                    const Boundary& b);

/// Full per-caption search trace: every iteration plus the selected result.
struct GenTrace {
    BoundarySet result;
    std::vector<std::vector<IterationRecord>> iterations;  // [caption][iteration]
};

/// Soft-time-constraint generation: each caption searches a local window
/// seeded by uniform division and re-centered on its own boundary each
/// iteration; the minimum-loss iteration wins (earliest on ties).
BoundarySet generate(const SimilarityMatrix& s, const GenConfig& cfg);

/// Ablation arm: identical search with every window spanning the whole video.
BoundarySet generate_global(const SimilarityMatrix& s, const GenConfig& cfg);

GenTrace generate_traced(const SimilarityMatrix& s, const GenConfig& cfg,
                         bool global_windows = false);

}  // namespace dibs
