#include "dibs/interval.hpp"

#include <algorithm>

namespace dibs {

double iou(const Boundary& a, const Boundary& b) {
    const double inter =
        std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
    const double uni = a.duration() + b.duration() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double giou(const Boundary& a, const Boundary& b) {
    const double hull = std::max(a.end, b.end) - std::min(a.start, b.start);
    if (hull <= 0.0) {
        return 0.0;
    }
    const double inter =
        std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
    const double uni = a.duration() + b.duration() - inter;
    const double overlap = uni > 0.0 ? inter / uni : 0.0;
    return overlap - (hull - uni) / hull;
}

BoundarySet uniform_init(const Timeline& timeline, int n_events) {
    if (n_events < 1) {
        throw std::invalid_argument("uniform_init: n_events must be >= 1");
    }
    const double len = static_cast<double>(timeline.frame_count) / n_events;
    BoundarySet out;
    out.boundaries.reserve(n_events);
    for (int n = 0; n < n_events; ++n) {
        const double s = n * len;
        const double e = (n + 1 == n_events) ? timeline.frame_count : (n + 1) * len;
        out.boundaries.emplace_back(s, e);
    }
    return out;
}

BoundarySet clip_overlaps(const BoundarySet& set) {
    BoundarySet out = set;
    for (std::size_t n = 1; n < out.boundaries.size(); ++n) {
        Boundary& prev = out.boundaries[n - 1];
        Boundary& cur = out.boundaries[n];
        if (cur.start < prev.end) {
            const double mid = 0.5 * (cur.start + prev.end);
            prev = Boundary(std::min(prev.start, mid), mid);
            cur = Boundary(mid, std::max(cur.end, mid));
        }
    }
    return out;
}

}  // namespace dibs
