#include "dibs/boundary_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dibs {

void GenConfig::validate() const {
    if (top_k < 1) {
        throw std::invalid_argument("GenConfig: top_k must be >= 1");
    }
    if (iterations < 1) {
        throw std::invalid_argument("GenConfig: iterations must be >= 1");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("GenConfig: alpha must be > 0");
    }
    if (window_margin < 0.0) {
        throw std::invalid_argument("GenConfig: window_margin must be >= 0");
    }
}

namespace {

// Integer frames m with window.start <= m < window.end.
std::pair<int, int> frame_range(const Boundary& window, int frame_count) {
    int lo = static_cast<int>(std::ceil(window.start));
    int hi = static_cast<int>(std::ceil(window.end)) - 1;
    lo = std::max(lo, 0);
    hi = std::min(hi, frame_count - 1);
    return {lo, hi};
}

// Expand `b` by margin * duration per side, clipped to the video, and widened
// if needed so at least one integer frame falls inside.
Boundary expand_window(const Boundary& b, double margin, int frame_count) {
    if (std::isinf(margin)) {
        return Boundary(0.0, frame_count);
    }
    const double pad = margin * b.duration();
    double lo = std::max(0.0, b.start - pad);
    double hi = std::min(static_cast<double>(frame_count), b.end + pad);
    auto [f_lo, f_hi] = frame_range(Boundary(lo, hi), frame_count);
    while (f_lo > f_hi) {
        lo = std::max(0.0, lo - 0.5);
        hi = std::min(static_cast<double>(frame_count), hi + 0.5);
        std::tie(f_lo, f_hi) = frame_range(Boundary(lo, hi), frame_count);
    }
    return Boundary(lo, hi);
}

}  // namespace

TopKFrames topk_local(const SimilarityMatrix& s, int n, const Boundary& window, int k) {
    if (n < 0 || n >= s.captions()) {
        throw std::invalid_argument("topk_local: caption index out of range");
    }
    const auto [lo, hi] = frame_range(window, s.frames());
    if (lo > hi) {
        throw std::invalid_argument("topk_local: window contains no frame");
    }
    std::vector<int> frames(hi - lo + 1);
    std::iota(frames.begin(), frames.end(), lo);
    // Highest score first, lower frame index on ties.
    std::stable_sort(frames.begin(), frames.end(), [&](int a, int b) {
        return s.values(a, n) > s.values(b, n);
    });
    const int take = std::min<int>(k, static_cast<int>(frames.size()));
    TopKFrames out;
    out.positions.assign(frames.begin(), frames.begin() + take);
    out.scores.reserve(take);
    for (const int m : out.positions) {
        out.scores.push_back(s.values(m, n));
    }
    return out;
}

int medoid_center(const TopKFrames& t) {
    if (t.positions.empty()) {
        throw std::invalid_argument("medoid_center: empty top-k set");
    }
    // Sorted order plus prefix sums gives each total L1 distance in O(1).
    std::vector<int> sorted = t.positions;
    std::sort(sorted.begin(), sorted.end());
    const int k = static_cast<int>(sorted.size());
    std::vector<double> prefix(k + 1, 0.0);
    for (int i = 0; i < k; ++i) {
        prefix[i + 1] = prefix[i] + sorted[i];
    }
    double best_cost = std::numeric_limits<double>::infinity();
    int best_pos = sorted.front();
    for (int i = 0; i < k; ++i) {
        const double p = sorted[i];
        const double left = p * (i + 1) - prefix[i + 1];
        const double right = (prefix[k] - prefix[i]) - p * (k - i);
        const double cost = left + right;
        if (cost < best_cost || (cost == best_cost && sorted[i] < best_pos)) {
            best_cost = cost;
            best_pos = sorted[i];
        }
    }
    return best_pos;
}

double boundary_std(const TopKFrames& t, int center) {
    if (t.positions.empty()) {
        throw std::invalid_argument("boundary_std: empty top-k set");
    }
    double acc = 0.0;
    for (const int p : t.positions) {
        const double d = p - center;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(t.positions.size()));
}

Boundary tighten(int center, double std_dev, double alpha, const TopKFrames& t,
                 const Timeline& timeline) {
    if (std_dev < 0.0) {
        throw std::invalid_argument("tighten: negative std");
    }
    const double half = alpha * std_dev;
    const double coarse_lo = std::max(0.0, center - half);
    const double coarse_hi = std::min(static_cast<double>(timeline.frame_count), center + half);
    int mn = std::numeric_limits<int>::max();
    int mx = std::numeric_limits<int>::min();
    for (const int p : t.positions) {
        if (p >= coarse_lo && p <= coarse_hi) {
            mn = std::min(mn, p);
            mx = std::max(mx, p);
        }
    }
    if (mn > mx) {
        return Boundary(center, center + 1);
    }
    return Boundary(mn, mx + 1);
}

double dis(double f, const Boundary& b) {
    if (f > b.start && f < b.end) {
        return -std::min(f - b.start, b.end - f);
    }
    if (f < b.start || f > b.end) {
        return std::max(b.start - f, f - b.end);
    }
    return 0.0;
}

double caption_loss(const SimilarityMatrix& s, int n, const TopKFrames& t,
                    const Boundary& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
        total += s.values(t.positions[i], n) * dis(t.positions[i], b);
    }
    return total;
}

GenTrace generate_traced(const SimilarityMatrix& s, const GenConfig& cfg,
                         bool global_windows) {
    cfg.validate();
    const int n_caps = s.captions();
    const int m_frames = s.frames();
    if (n_caps > m_frames) {
        throw std::invalid_argument("generate: more captions than frames");
    }
    const Timeline timeline = s.timeline();
    const BoundarySet init = uniform_init(timeline, n_caps);
    const Boundary whole(0.0, m_frames);

    GenTrace trace;
    trace.result.boundaries.resize(n_caps);
    trace.result.losses.resize(n_caps);
    trace.iterations.resize(n_caps);

    for (int n = 0; n < n_caps; ++n) {
        Boundary window = global_windows
                              ? whole
                              : expand_window(init.boundaries[n], cfg.window_margin, m_frames);
        double best_loss = std::numeric_limits<double>::infinity();
        Boundary best = init.boundaries[n];
        auto& records = trace.iterations[n];
        records.reserve(cfg.iterations);
        for (int t = 0; t < cfg.iterations; ++t) {
            const TopKFrames top = topk_local(s, n, window, cfg.top_k);
            const int center = medoid_center(top);
            const double sd = boundary_std(top, center);
            const Boundary b = tighten(center, sd, cfg.alpha, top, timeline);
            const double loss = caption_loss(s, n, top, b);
            records.push_back({b, loss, center, sd});
            if (loss < best_loss) {
                best_loss = loss;
                best = b;
            }
            window = global_windows ? whole : expand_window(b, cfg.window_margin, m_frames);
        }
        trace.result.boundaries[n] = best;
        trace.result.losses[n] = best_loss;
    }
    return trace;
}

BoundarySet generate(const SimilarityMatrix& s, const GenConfig& cfg) {
    return generate_traced(s, cfg, false).result;
}

BoundarySet generate_global(const SimilarityMatrix& s, const GenConfig& cfg) {
    return generate_traced(s, cfg, true).result;
}

}  // namespace dibs
