#include "dibs/drop_dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dibs {

double percentile_drop_cost(const SimilarityMatrix& s, double p) {
    if (!(p > 0.0) || !(p < 100.0)) {
        throw std::invalid_argument("percentile_drop_cost: p must be in (0, 100)");
    }
    std::vector<double> entries(s.values.data(), s.values.data() + s.values.size());
    std::sort(entries.begin(), entries.end());
    const double rank = p / 100.0 * (entries.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= entries.size()) {
        return entries.back();
    }
    const double frac = rank - static_cast<double>(lo);
    return entries[lo] + frac * (entries[lo + 1] - entries[lo]);
}

double resolve_drop_cost(const SimilarityMatrix& s, const DropDtwConfig& cfg) {
    if (cfg.drop_cost.has_value() == cfg.percentile.has_value()) {
        throw std::invalid_argument(
            "DropDtwConfig: exactly one of drop_cost / percentile must be set");
    }
    return cfg.drop_cost ? *cfg.drop_cost : percentile_drop_cost(s, *cfg.percentile);
}

Alignment drop_dtw_align(const SimilarityMatrix& s, const DropDtwConfig& cfg) {
    const int m_frames = s.frames();
    const int n_caps = s.captions();
    if (m_frames < 1 || n_caps < 1) {
        throw std::invalid_argument("drop_dtw_align: empty matrix");
    }
    const double drop = resolve_drop_cost(s, cfg);

    // suf(m, n): best score over frames m..M-1 when the last matched caption
    // index is n-1 (n = 0: nothing matched yet). Frame m either drops or
    // matches some caption j >= n-1, moving the state to j+1.
    Eigen::MatrixXd suf = Eigen::MatrixXd::Zero(m_frames + 1, n_caps + 1);
    std::vector<double> match_suffix(n_caps + 1);
    for (int m = m_frames - 1; m >= 0; --m) {
        match_suffix[n_caps] = -std::numeric_limits<double>::infinity();
        for (int j = n_caps - 1; j >= 0; --j) {
            match_suffix[j] =
                std::max(s.values(m, j) + suf(m + 1, j + 1), match_suffix[j + 1]);
        }
        for (int n = 0; n <= n_caps; ++n) {
            const double best_match = match_suffix[std::max(0, n - 1)];
            suf(m, n) = std::max(drop + suf(m + 1, n), best_match);
        }
    }

    // Forward reconstruction; recomputed candidate values are bitwise equal to
    // the DP entries, so exact comparison picks out the optimal options.
    Alignment out;
    out.assignment.assign(m_frames, kDrop);
    int state = 0;
    for (int m = 0; m < m_frames; ++m) {
        const double target = suf(m, state);
        int chosen = kDrop;
        for (int j = std::max(0, state - 1); j < n_caps; ++j) {
            if (s.values(m, j) + suf(m + 1, j + 1) == target) {
                chosen = j;
                break;
            }
        }
        if (chosen == kDrop) {
            out.assignment[m] = kDrop;
        } else {
            out.assignment[m] = chosen;
            state = chosen + 1;
        }
    }
    return out;
}

double alignment_score(const SimilarityMatrix& s, const Alignment& a, double drop_cost) {
    if (static_cast<int>(a.assignment.size()) != s.frames()) {
        throw std::invalid_argument("alignment_score: alignment length mismatch");
    }
    double total = 0.0;
    for (int m = 0; m < s.frames(); ++m) {
        const int n = a.assignment[m];
        total += (n == kDrop) ? drop_cost : s.values(m, n);
    }
    return total;
}

BoundarySet alignment_to_boundaries(const Alignment& a, const Timeline& timeline,
                                    int n_captions) {
    std::vector<int> first(n_captions, -1);
    std::vector<int> last(n_captions, -1);
    for (int m = 0; m < static_cast<int>(a.assignment.size()); ++m) {
        const int n = a.assignment[m];
        if (n == kDrop) {
            continue;
        }
        if (n < 0 || n >= n_captions) {
            throw std::invalid_argument("alignment_to_boundaries: caption index out of range");
        }
        if (first[n] < 0) {
            first[n] = m;
        }
        last[n] = m;
    }
    BoundarySet out;
    out.boundaries.reserve(n_captions);
    out.flagged.assign(n_captions, 0);
    const double mid = 0.5 * timeline.frame_count;
    for (int n = 0; n < n_captions; ++n) {
        if (first[n] < 0) {
            out.boundaries.emplace_back(mid, mid);
            out.flagged[n] = 1;
        } else {
            out.boundaries.emplace_back(first[n], last[n] + 1);
        }
    }
    return out;
}

}  // namespace dibs
