#pragma once

#include <stdexcept>
#include <vector>

namespace dibs {

/// A video timeline of M frames sampled at a fixed rate upstream.
struct Timeline {
    int frame_count = 1;

    Timeline() = default;
    explicit Timeline(int frames) : frame_count(frames) {
        if (frame_count < 1) {
            throw std::invalid_argument("Timeline: frame_count must be >= 1");
        }
    }
};

/// Half-open real interval [start, end) on the frame axis.
/// Degenerate intervals (start == end) are representable; callers flag them.
struct Boundary {
    double start = 0.0;
    double end = 0.0;

    Boundary() = default;
    Boundary(double s, double e) : start(s), end(e) {
        if (!(s >= 0.0) || !(e >= s)) {
            throw std::invalid_argument("Boundary: requires 0 <= start <= end");
        }
    }

    double center() const { return 0.5 * (start + end); }
    double duration() const { return end - start; }
    bool degenerate() const { return end == start; }

    static Boundary from_center_duration(double center, double duration) {
        return Boundary(center - 0.5 * duration, center + 0.5 * duration);
    }
};

/// Ordered event boundaries for one video, one entry per caption.
/// `losses` and `flagged` are optional; when non-empty they parallel `boundaries`.
struct BoundarySet {
    std::vector<Boundary> boundaries;
    std::vector<double> losses;
    std::vector<char> flagged;

    std::size_t size() const { return boundaries.size(); }
};

/// Intersection over union of two intervals, in [0, 1].
/// Zero when the union has zero length.
double iou(const Boundary& a, const Boundary& b);

/// Generalized IoU: iou minus the fraction of the enclosing hull not
/// covered by the union. In [-1, 1]; 0 when the hull has zero length.
double giou(const Boundary& a, const Boundary& b);

/// Divide [0, frame_count) into n contiguous equal-length segments.
BoundarySet uniform_init(const Timeline& timeline, int n_events);

/// Clip overlaps between successive boundaries at the midpoints of the
/// overlapping regions, for consumers that require disjoint events.
BoundarySet clip_overlaps(const BoundarySet& set);

}  // namespace dibs
