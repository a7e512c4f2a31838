#include "dibs/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dibs {

void RefineConfig::validate() const {
    if (jitter_center < 0.0 || jitter_duration < 0.0) {
        throw std::invalid_argument("RefineConfig: jitter ratios must be >= 0");
    }
    if (n_proposals < 1 || merge_k < 1 || stages < 1) {
        throw std::invalid_argument("RefineConfig: counts must be >= 1");
    }
    if (merge_k > n_proposals) {
        throw std::invalid_argument("RefineConfig: merge_k must be <= n_proposals");
    }
}

namespace {

Boundary clip_min_width(double start, double end, int frame_count) {
    double s = std::max(0.0, start);
    double e = std::min(static_cast<double>(frame_count), end);
    if (e - s < 1.0) {
        const double width = std::min(1.0, static_cast<double>(frame_count));
        double c = std::clamp(0.5 * (s + e), 0.5 * width, frame_count - 0.5 * width);
        s = c - 0.5 * width;
        e = c + 0.5 * width;
    }
    return Boundary(s, e);
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

struct JvResult {
    double total = 0.0;
    std::vector<int> columns;  // chosen global column per row subset entry
};

// Shortest-augmenting-path assignment (rows <= columns), minimizing total
// cost over the given row/column subsets.
JvResult jv_solve(const Eigen::MatrixXd& cost, const std::vector<int>& rows,
                  const std::vector<int>& cols) {
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(cols.size());
    if (nr == 0) {
        return {};
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(nr + 1, 0.0), v(nc + 1, 0.0);
    std::vector<int> match(nc + 1, 0), way(nc + 1, 0);
    for (int i = 1; i <= nr; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(nc + 1, inf);
        std::vector<char> used(nc + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= nc; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(rows[i0 - 1], cols[j - 1]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= nc; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    JvResult result;
    result.columns.assign(nr, -1);
    for (int j = 1; j <= nc; ++j) {
        if (match[j] != 0) {
            result.total += cost(rows[match[j] - 1], cols[j - 1]);
            result.columns[match[j] - 1] = cols[j - 1];
        }
    }
    return result;
}

}  // namespace

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const int n_rows = static_cast<int>(cost.rows());
    const int n_cols = static_cast<int>(cost.cols());
    if (n_rows < 1) {
        throw std::invalid_argument("hungarian: empty cost matrix");
    }
    if (n_cols < n_rows) {
        throw std::invalid_argument("hungarian: fewer columns than rows");
    }
    if (!cost.allFinite()) {
        throw std::invalid_argument("hungarian: costs must be finite");
    }

    std::vector<int> all_rows(n_rows), all_cols(n_cols);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const JvResult full = jv_solve(cost, all_rows, all_cols);
    const double optimum = full.total;
    const double tol = 1e-9 * (1.0 + std::abs(optimum));

    // Fix rows in order to the smallest column that still completes to an
    // optimal assignment; this realizes the lexicographic tie rule.
    // `completion` always holds one known-optimal way to finish the remaining
    // rows, so accepting its column for the current row needs no re-solve.
    std::vector<int> completion = full.columns;
    std::vector<int> assignment(n_rows, -1);
    std::vector<char> available(n_cols, 1);
    double prefix = 0.0;
    for (int r = 0; r < n_rows; ++r) {
        // Lower bound on any completion: per-row minima over open columns.
        double tail_min = 0.0;
        for (int rr = r + 1; rr < n_rows; ++rr) {
            double m = std::numeric_limits<double>::infinity();
            for (int c = 0; c < n_cols; ++c) {
                if (available[c]) {
                    m = std::min(m, cost(rr, c));
                }
            }
            tail_min += m;
        }

        std::vector<int> rest_rows(all_rows.begin() + r + 1, all_rows.end());
        std::vector<int> rest_cols;
        rest_cols.reserve(n_cols);
        for (int c = 0; c < n_cols; ++c) {
            if (!available[c]) {
                continue;
            }
            if (c == completion[r]) {
                assignment[r] = c;
                break;
            }
            if (prefix + cost(r, c) + tail_min > optimum + tol) {
                continue;
            }
            rest_cols.clear();
            for (int cc = 0; cc < n_cols; ++cc) {
                if (available[cc] && cc != c) {
                    rest_cols.push_back(cc);
                }
            }
            const JvResult rest = jv_solve(cost, rest_rows, rest_cols);
            if (prefix + cost(r, c) + rest.total <= optimum + tol) {
                assignment[r] = c;
                for (int rr = r + 1; rr < n_rows; ++rr) {
                    completion[rr] = rest.columns[rr - r - 1];
                }
                break;
            }
        }
        if (assignment[r] < 0) {
            throw std::logic_error("hungarian: failed to extend optimal assignment");
        }
        available[assignment[r]] = 0;
        prefix += cost(r, assignment[r]);
    }
    return assignment;
}

std::vector<Boundary> jitter(const Boundary& b, const RefineConfig& cfg,
                             const Timeline& timeline, Rng& rng) {
    cfg.validate();
    if (b.degenerate()) {
        throw std::invalid_argument("jitter: degenerate boundary");
    }
    std::vector<Boundary> out;
    out.reserve(cfg.n_proposals);
    out.push_back(b);
    const double t = b.center();
    const double d = b.duration();
    for (int u = 1; u < cfg.n_proposals; ++u) {
        const double dt = rng.uniform(-cfg.jitter_center, cfg.jitter_center);
        const double dd = rng.uniform(-cfg.jitter_duration, cfg.jitter_duration);
        const double center = t + dt * d;
        const double dur = d * (1.0 + dd);
        out.push_back(clip_min_width(center - 0.5 * dur, center + 0.5 * dur,
                                     timeline.frame_count));
    }
    return out;
}

std::vector<Boundary> jitter(const Boundary& b, const RefineConfig& cfg,
                             const Timeline& timeline) {
    Rng rng(mix_seed(cfg.seed, 0x4a495454ull));  // "JITT"
    return jitter(b, cfg, timeline, rng);
}

std::vector<Query> link_queries(const std::vector<Boundary>& proposals,
                                const Scorer& scorer) {
    const auto& queries = scorer.queries();
    const int n_props = static_cast<int>(proposals.size());
    if (static_cast<int>(queries.size()) < n_props) {
        throw std::invalid_argument("link_queries: scorer provides fewer queries than proposals");
    }
    Eigen::MatrixXd cost(n_props, static_cast<int>(queries.size()));
    for (int u = 0; u < n_props; ++u) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            cost(u, static_cast<int>(i)) = -giou(proposals[u], queries[i].predicted_boundary);
        }
    }
    const std::vector<int> assignment = hungarian(cost);
    std::vector<Query> linked;
    linked.reserve(n_props);
    for (int u = 0; u < n_props; ++u) {
        linked.push_back(queries[assignment[u]]);
    }
    return linked;
}

ProposalSet score_proposals(const std::vector<Boundary>& proposals,
                            const std::vector<Query>& linked, const Scorer& scorer,
                            int caption) {
    if (proposals.size() != linked.size()) {
        throw std::invalid_argument("score_proposals: proposal/query count mismatch");
    }
    const int n = static_cast<int>(proposals.size());
    ProposalSet out;
    out.proposals = proposals;
    out.linked = linked;
    out.event_scores.resize(n);
    out.caption_scores.resize(n);
    Eigen::VectorXd logits(n);
    for (int u = 0; u < n; ++u) {
        out.event_scores(u) = sigmoid(scorer.event_logit(linked[u]));
        logits(u) = scorer.caption_logit(linked[u], caption);
    }
    const Eigen::VectorXd shifted = (logits.array() - logits.maxCoeff()).exp();
    out.caption_scores = shifted / shifted.sum();
    out.combined = out.event_scores + out.caption_scores;
    return out;
}

Boundary merge_topk(const std::vector<Boundary>& proposals,
                    const Eigen::VectorXd& scores, int merge_k, bool* zero_weights) {
    const int n = static_cast<int>(proposals.size());
    if (n == 0 || scores.size() != n) {
        throw std::invalid_argument("merge_topk: proposal/score count mismatch");
    }
    if (merge_k < 1 || merge_k > n) {
        throw std::invalid_argument("merge_topk: merge_k out of range");
    }
    if (zero_weights != nullptr) {
        *zero_weights = false;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });

    bool all_equal = true;
    double wsum = 0.0, start = 0.0, end = 0.0;
    for (int i = 0; i < merge_k; ++i) {
        const int u = order[i];
        if (scores(u) < 0.0) {
            throw std::invalid_argument("merge_topk: negative score");
        }
        wsum += scores(u);
        start += scores(u) * proposals[u].start;
        end += scores(u) * proposals[u].end;
        all_equal = all_equal && proposals[u].start == proposals[order[0]].start &&
                    proposals[u].end == proposals[order[0]].end;
    }
    if (all_equal && wsum > 0.0) {
        return proposals[order[0]];
    }
    if (wsum <= 0.0) {
        if (zero_weights != nullptr) {
            *zero_weights = true;
        }
        return proposals[order[0]];
    }
    return Boundary(start / wsum, end / wsum);
}

std::uint64_t stage_seed(std::uint64_t seed, int stage) {
    return seed + static_cast<std::uint64_t>(stage) * 0x9E3779B97F4A7C15ull;
}

RefineStep refine_caption(const Boundary& b, int caption, const Scorer& scorer,
                          const RefineConfig& cfg, const Timeline& timeline,
                          int stage) {
    Rng rng(mix_seed(stage_seed(cfg.seed, stage), 0x434150ull, caption));  // "CAP"
    RefineStep step;
    const std::vector<Boundary> proposals = jitter(b, cfg, timeline, rng);
    const std::vector<Query> linked = link_queries(proposals, scorer);
    step.proposals = score_proposals(proposals, linked, scorer, caption);
    const Boundary merged = merge_topk(proposals, step.proposals.combined, cfg.merge_k);
    // weighted averaging can overshoot the video range by rounding
    const double m = timeline.frame_count;
    step.refined = Boundary(std::clamp(merged.start, 0.0, m), std::clamp(merged.end, 0.0, m));
    return step;
}

BoundarySet refine(const BoundarySet& boundaries, const Scorer& scorer,
                   const RefineConfig& cfg, const Timeline& timeline) {
    cfg.validate();
    BoundarySet out = boundaries;
    out.flagged.clear();
    for (int stage = 0; stage < cfg.stages; ++stage) {
        std::vector<Boundary> next(out.boundaries.size());
        for (std::size_t n = 0; n < out.boundaries.size(); ++n) {
            try {
                next[n] = refine_caption(out.boundaries[n], static_cast<int>(n), scorer,
                                         cfg, timeline, stage)
                              .refined;
            } catch (const std::invalid_argument& e) {
                throw std::invalid_argument("refine: stage " + std::to_string(stage) +
                                            ", caption " + std::to_string(n) + ": " +
                                            e.what());
            }
        }
        out.boundaries = std::move(next);
    }
    return out;
}

namespace {

// Integer frames covered by [start, end); falls back to the frame nearest the
// center when the span is too narrow to contain one.
std::pair<int, int> covered_frames(const Boundary& b, int frame_count) {
    int lo = std::max(0, static_cast<int>(std::ceil(b.start)));
    int hi = std::min(frame_count - 1, static_cast<int>(std::ceil(b.end)) - 1);
    if (lo > hi) {
        const int m = std::clamp(static_cast<int>(std::lround(b.center())), 0,
                                 frame_count - 1);
        return {m, m};
    }
    return {lo, hi};
}

}  // namespace

OracleScorer::OracleScorer(const SimilarityMatrix& s, int n_queries, std::uint64_t seed)
    : values_(s.values) {
    if (n_queries < 1) {
        throw std::invalid_argument("OracleScorer: n_queries must be >= 1");
    }
    const int m_frames = s.frames();
    const int n_caps = s.captions();
    Rng rng(mix_seed(seed, 0x4f52434cull));  // "ORCL"
    // Queries are jittered copies of the caption-count uniform division, so
    // their spans live on the event scale the refinement operates at.
    const BoundarySet caption_segments = uniform_init(s.timeline(), n_caps);

    queries_.reserve(n_queries);
    nearest_caption_.reserve(n_queries);
    for (int i = 0; i < n_queries; ++i) {
        const Boundary& seg = caption_segments.boundaries[i % caption_segments.size()];
        const double d0 = seg.duration();
        const double center = seg.center() + rng.uniform(-0.5, 0.5) * d0;
        const double dur = d0 * (1.0 + rng.uniform(-0.3, 0.3));
        const Boundary b =
            clip_min_width(center - 0.5 * dur, center + 0.5 * dur, m_frames);
        queries_.push_back({b, i});

        int nearest = 0;
        double best_overlap = -1.0;
        for (int n = 0; n < n_caps; ++n) {
            const Boundary& cs = caption_segments.boundaries[n];
            const double overlap =
                std::min(b.end, cs.end) - std::max(b.start, cs.start);
            if (overlap > best_overlap) {
                best_overlap = overlap;
                nearest = n;
            }
        }
        nearest_caption_.push_back(nearest);
    }
}

double OracleScorer::event_logit(const Query& q) const {
    const auto [lo, hi] = covered_frames(q.predicted_boundary,
                                         static_cast<int>(values_.rows()));
    const int caption = nearest_caption_[q.id];
    const double mean =
        values_.col(caption).segment(lo, hi - lo + 1).mean();
    const double p = std::clamp(mean, 1e-6, 1.0 - 1e-6);
    return std::log(p / (1.0 - p));
}

double OracleScorer::caption_logit(const Query& q, int caption) const {
    if (caption < 0 || caption >= values_.cols()) {
        throw std::invalid_argument("OracleScorer: caption index out of range");
    }
    const auto [lo, hi] = covered_frames(q.predicted_boundary,
                                         static_cast<int>(values_.rows()));
    return values_.col(caption).segment(lo, hi - lo + 1).mean();
}

TableScorer::TableScorer(std::vector<Entry> entries) : entries_(std::move(entries)) {
    queries_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        queries_.push_back({entries_[i].boundary, static_cast<int>(i)});
    }
}

double TableScorer::event_logit(const Query& q) const {
    return entries_.at(q.id).event_logit;
}

double TableScorer::caption_logit(const Query& q, int caption) const {
    const auto& logits = entries_.at(q.id).caption_logits;
    if (caption < 0 || caption >= static_cast<int>(logits.size())) {
        throw std::invalid_argument("TableScorer: caption index out of range");
    }
    return logits[caption];
}

}  // namespace dibs
