#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "dibs/boundary_gen.hpp"
#include "dibs/eval.hpp"
#include "dibs/random.hpp"
#include "dibs/refine.hpp"

using namespace dibs;

namespace {

// Exhaustive min-cost injection of rows into columns; ties keep the
// lexicographically smallest assignment vector.
std::pair<double, std::vector<int>> brute_force_assignment(const Eigen::MatrixXd& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    std::vector<int> cols_perm(cols);
    std::iota(cols_perm.begin(), cols_perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_assign;
    std::vector<int> current(rows, -1);
    std::vector<char> used(cols, 0);
    std::function<void(int, double)> rec = [&](int r, double acc) {
        if (r == rows) {
            if (acc < best - 1e-12 ||
                (std::abs(acc - best) <= 1e-12 && current < best_assign)) {
                best = acc;
                best_assign = current;
            }
            return;
        }
        for (int c = 0; c < cols; ++c) {
            if (!used[c]) {
                used[c] = 1;
                current[r] = c;
                rec(r + 1, acc + cost(r, c));
                used[c] = 0;
            }
        }
    };
    rec(0, 0.0);
    return {best, best_assign};
}

class FixedScorer : public Scorer {
  public:
    FixedScorer(std::vector<Query> queries, std::vector<double> event_logits,
                Eigen::MatrixXd caption_logits)
        : queries_(std::move(queries)),
          event_logits_(std::move(event_logits)),
          caption_logits_(std::move(caption_logits)) {}

    const std::vector<Query>& queries() const override { return queries_; }
    double event_logit(const Query& q) const override { return event_logits_.at(q.id); }
    double caption_logit(const Query& q, int caption) const override {
        return caption_logits_(q.id, caption);
    }

  private:
    std::vector<Query> queries_;
    std::vector<double> event_logits_;
    Eigen::MatrixXd caption_logits_;
};

Eigen::MatrixXd cost_from(std::initializer_list<std::initializer_list<double>> rows) {
    Eigen::MatrixXd m(rows.size(), rows.begin()->size());
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (const double v : row) {
            m(r, c++) = v;
        }
        ++r;
    }
    return m;
}

}  // namespace

TEST_CASE("hungarian hand cases") {
    CHECK(hungarian(cost_from({{1, 2}, {2, 1}})) == std::vector<int>{0, 1});
    CHECK(hungarian(cost_from({{5, 1}, {1, 5}})) == std::vector<int>{1, 0});
    // all-equal costs resolve to the lexicographically smallest vector
    CHECK(hungarian(Eigen::MatrixXd::Zero(3, 5)) == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(hungarian(cost_from({{1, 2}, {2, 1}, {1, 1}})), std::invalid_argument);
}

TEST_CASE("hungarian equals brute force for U<=4, Mq<=6") {
    Rng rng(314);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + static_cast<int>(rng.uniform_index(4));
        const int cols = rows + static_cast<int>(rng.uniform_index(7 - rows));
        Eigen::MatrixXd cost(rows, cols);
        const bool integer_costs = trial % 2 == 0;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                cost(r, c) = integer_costs
                                 ? static_cast<double>(rng.uniform_index(6))
                                 : rng.uniform(-1, 1);
            }
        }
        const auto [best, best_assign] = brute_force_assignment(cost);
        const std::vector<int> got = hungarian(cost);
        double got_cost = 0.0;
        for (int r = 0; r < rows; ++r) {
            got_cost += cost(r, got[r]);
        }
        CHECK(got_cost == doctest::Approx(best).epsilon(1e-9));
        if (integer_costs) {
            // exact ties exist; the lexicographic rule must hold exactly
            CHECK(got == best_assign);
        }
    }
}

TEST_CASE("jitter keeps the original and respects the ranges") {
    const Timeline timeline(100);
    RefineConfig cfg;
    cfg.n_proposals = 16;
    cfg.seed = 5;

    const Boundary b(8, 12);  // t=10, d=4
    cfg.jitter_center = 0.25;
    cfg.jitter_duration = 0.5;
    const std::vector<Boundary> props = jitter(b, cfg, timeline);
    REQUIRE(props.size() == 16);
    CHECK(props[0].start == b.start);
    CHECK(props[0].end == b.end);
    for (const Boundary& p : props) {
        CHECK(p.center() >= 9.0 - 1e-9);
        CHECK(p.center() <= 11.0 + 1e-9);
        CHECK(p.duration() >= 2.0 - 1e-9);
        CHECK(p.duration() <= 6.0 + 1e-9);
        CHECK(p.start >= 0.0);
        CHECK(p.end <= 100.0);
    }

    RefineConfig frozen = cfg;
    frozen.jitter_center = 0.0;
    frozen.jitter_duration = 0.0;
    for (const Boundary& p : jitter(b, frozen, timeline)) {
        CHECK(p.start == b.start);
        CHECK(p.end == b.end);
    }

    CHECK_THROWS_AS(jitter(Boundary(3, 3), cfg, timeline), std::invalid_argument);
}

TEST_CASE("jitter clipping never produces a zero-width proposal") {
    const Timeline timeline(10);
    RefineConfig cfg;
    cfg.jitter_center = 2.0;
    cfg.jitter_duration = 0.99;
    cfg.n_proposals = 64;
    cfg.seed = 77;
    for (const Boundary& p : jitter(Boundary(0.0, 1.2), cfg, timeline)) {
        CHECK(p.duration() >= 1.0 - 1e-9);
        CHECK(p.start >= 0.0);
        CHECK(p.end <= 10.0);
    }
}

TEST_CASE("link_queries picks overlapping queries") {
    std::vector<Query> queries = {{Boundary(0, 4), 0}, {Boundary(6, 10), 1}};
    FixedScorer scorer(queries, {0.0, 0.0}, Eigen::MatrixXd::Zero(2, 1));

    const std::vector<Query> one =
        link_queries({Boundary(0, 4)}, scorer);
    CHECK(one[0].id == 0);

    const std::vector<Query> linked =
        link_queries({Boundary(6, 10), Boundary(0, 4)}, scorer);
    CHECK(linked[0].id == 1);
    CHECK(linked[1].id == 0);

    CHECK_THROWS_AS(link_queries({Boundary(0, 1), Boundary(1, 2), Boundary(2, 3)}, scorer),
                    std::invalid_argument);
}

TEST_CASE("link_queries matches brute-force min-cost injection") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Query> queries;
        for (int i = 0; i < 5; ++i) {
            const double s = rng.uniform(0, 40);
            queries.push_back({Boundary(s, s + 1 + rng.uniform(0, 10)), i});
        }
        std::vector<Boundary> proposals;
        for (int u = 0; u < 3; ++u) {
            const double s = rng.uniform(0, 40);
            proposals.push_back(Boundary(s, s + 1 + rng.uniform(0, 10)));
        }
        FixedScorer scorer(queries, std::vector<double>(5, 0.0), Eigen::MatrixXd::Zero(5, 1));
        const std::vector<Query> linked = link_queries(proposals, scorer);

        Eigen::MatrixXd cost(3, 5);
        for (int u = 0; u < 3; ++u) {
            for (int i = 0; i < 5; ++i) {
                cost(u, i) = -giou(proposals[u], queries[i].predicted_boundary);
            }
        }
        const auto [best, ignored] = brute_force_assignment(cost);
        double got = 0.0;
        for (int u = 0; u < 3; ++u) {
            got += cost(u, linked[u].id);
        }
        CHECK(got == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("score_proposals normalizations") {
    std::vector<Query> queries = {{Boundary(0, 2), 0}, {Boundary(2, 4), 1}, {Boundary(4, 6), 2}};
    Eigen::MatrixXd caption_logits = Eigen::MatrixXd::Ones(3, 1);
    FixedScorer scorer(queries, {0.0, 0.0, 0.0}, caption_logits);

    const std::vector<Boundary> proposals = {Boundary(0, 2), Boundary(2, 4), Boundary(4, 6)};
    const ProposalSet scored = score_proposals(proposals, queries, scorer, 0);
    for (int u = 0; u < 3; ++u) {
        CHECK(scored.event_scores(u) == doctest::Approx(0.5));
        CHECK(scored.caption_scores(u) == doctest::Approx(1.0 / 3.0));
        CHECK(scored.combined(u) == doctest::Approx(0.5 + 1.0 / 3.0));
    }
    CHECK(scored.caption_scores.sum() == doctest::Approx(1.0).epsilon(1e-9));

    // two equal caption logits split the softmax evenly
    FixedScorer pair_scorer({queries[0], queries[1]}, {0.0, 0.0}, Eigen::MatrixXd::Ones(2, 1));
    const ProposalSet two =
        score_proposals({proposals[0], proposals[1]}, {queries[0], queries[1]}, pair_scorer, 0);
    CHECK(two.caption_scores(0) == doctest::Approx(0.5));
    CHECK(two.caption_scores(1) == doctest::Approx(0.5));
}

TEST_CASE("softmax is stable under large logits") {
    std::vector<Query> queries = {{Boundary(0, 2), 0}, {Boundary(2, 4), 1}};
    Eigen::MatrixXd logits(2, 1);
    logits << 1000.0, 999.0;
    FixedScorer scorer(queries, {0.0, 0.0}, logits);
    const ProposalSet scored =
        score_proposals({Boundary(0, 2), Boundary(2, 4)}, queries, scorer, 0);
    CHECK(scored.caption_scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(scored.caption_scores(0) > scored.caption_scores(1));
    CHECK(std::isfinite(scored.caption_scores(0)));
}

TEST_CASE("merge_topk weighted average and edge rules") {
    const std::vector<Boundary> proposals = {Boundary(2, 6), Boundary(4, 8)};
    Eigen::VectorXd w(2);
    w << 0.6, 0.2;
    const Boundary merged = merge_topk(proposals, w, 2);
    CHECK(merged.start == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(merged.end == doctest::Approx(6.5).epsilon(1e-9));

    const Boundary top1 = merge_topk(proposals, w, 1);
    CHECK(top1.start == 2.0);
    CHECK(top1.end == 6.0);

    Eigen::VectorXd equal = Eigen::VectorXd::Constant(2, 0.3);
    const Boundary mean = merge_topk(proposals, equal, 2);
    CHECK(mean.start == doctest::Approx(3.0));
    CHECK(mean.end == doctest::Approx(7.0));

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    bool flagged = false;
    const Boundary fallback = merge_topk(proposals, zero, 2, &flagged);
    CHECK(flagged);
    CHECK(fallback.start == 2.0);
    CHECK(fallback.end == 6.0);
}

TEST_CASE("merging start/end equals merging center/duration") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int u = 2 + static_cast<int>(rng.uniform_index(6));
        std::vector<Boundary> proposals;
        Eigen::VectorXd w(u);
        for (int i = 0; i < u; ++i) {
            const double s = rng.uniform(0, 50);
            proposals.push_back(Boundary(s, s + rng.uniform(1, 20)));
            w(i) = rng.uniform(0.01, 1.0);
        }
        const int k = 1 + static_cast<int>(rng.uniform_index(u));
        const Boundary merged = merge_topk(proposals, w, k);

        // same set merged in (center, duration) coordinates
        std::vector<int> order(u);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
        double wsum = 0.0, c = 0.0, d = 0.0;
        for (int i = 0; i < k; ++i) {
            wsum += w(order[i]);
            c += w(order[i]) * proposals[order[i]].center();
            d += w(order[i]) * proposals[order[i]].duration();
        }
        const Boundary via_cd = Boundary::from_center_duration(c / wsum, d / wsum);
        CHECK(merged.start == doctest::Approx(via_cd.start).epsilon(1e-12));
        CHECK(merged.end == doctest::Approx(via_cd.end).epsilon(1e-12));

        // hull containment
        double min_s = 1e300, max_s = -1e300, min_e = 1e300, max_e = -1e300;
        for (int i = 0; i < k; ++i) {
            min_s = std::min(min_s, proposals[order[i]].start);
            max_s = std::max(max_s, proposals[order[i]].start);
            min_e = std::min(min_e, proposals[order[i]].end);
            max_e = std::max(max_e, proposals[order[i]].end);
        }
        CHECK(merged.start >= min_s - 1e-12);
        CHECK(merged.start <= max_s + 1e-12);
        CHECK(merged.end >= min_e - 1e-12);
        CHECK(merged.end <= max_e + 1e-12);
    }
}

TEST_CASE("refine with zero jitter is the identity for any scorer") {
    SynthConfig sc;
    sc.frame_count = 60;
    sc.n_events = 3;
    sc.peak_width = 5.0;
    sc.seed = 4;
    const SynthResult synth = synth_matrix(sc);
    const OracleScorer scorer(synth.matrix, 32, 11);

    RefineConfig cfg;
    cfg.jitter_center = 0.0;
    cfg.jitter_duration = 0.0;
    const BoundarySet out =
        refine(synth.ground_truth, scorer, cfg, synth.matrix.timeline());
    for (std::size_t n = 0; n < out.size(); ++n) {
        CHECK(out.boundaries[n].start ==
              doctest::Approx(synth.ground_truth.boundaries[n].start).epsilon(1e-12));
        CHECK(out.boundaries[n].end ==
              doctest::Approx(synth.ground_truth.boundaries[n].end).epsilon(1e-12));
    }
}

TEST_CASE("two stages equal two chained one-stage runs with split seeds") {
    SynthConfig sc;
    sc.frame_count = 80;
    sc.n_events = 4;
    sc.peak_width = 6.0;
    sc.noise_sigma = 0.05;
    sc.seed = 15;
    const SynthResult synth = synth_matrix(sc);
    const OracleScorer scorer(synth.matrix, 32, 8);
    const Timeline timeline = synth.matrix.timeline();

    RefineConfig two;
    two.stages = 2;
    two.seed = 99;
    const BoundarySet direct = refine(synth.ground_truth, scorer, two, timeline);

    RefineConfig first = two;
    first.stages = 1;
    RefineConfig second = two;
    second.stages = 1;
    second.seed = stage_seed(two.seed, 1);
    const BoundarySet chained =
        refine(refine(synth.ground_truth, scorer, first, timeline), scorer, second, timeline);

    REQUIRE(direct.size() == chained.size());
    for (std::size_t n = 0; n < direct.size(); ++n) {
        CHECK(direct.boundaries[n].start == doctest::Approx(chained.boundaries[n].start));
        CHECK(direct.boundaries[n].end == doctest::Approx(chained.boundaries[n].end));
    }
}

TEST_CASE("refine keeps boundaries valid and proposal sets sane") {
    SynthConfig sc;
    sc.frame_count = 100;
    sc.n_events = 5;
    sc.peak_width = 5.0;
    sc.noise_sigma = 0.1;
    sc.distractor_peaks = 2;
    sc.seed = 77;
    const SynthResult synth = synth_matrix(sc);
    const OracleScorer scorer(synth.matrix, 40, 3);
    const Timeline timeline = synth.matrix.timeline();

    RefineConfig cfg;
    cfg.seed = 10;
    for (std::size_t n = 0; n < synth.ground_truth.size(); ++n) {
        const RefineStep step = refine_caption(synth.ground_truth.boundaries[n],
                                               static_cast<int>(n), scorer, cfg, timeline, 0);
        // proposal set contains the unrefined boundary at index 0
        CHECK(step.proposals.proposals[0].start == synth.ground_truth.boundaries[n].start);
        CHECK(step.proposals.caption_scores.sum() == doctest::Approx(1.0).epsilon(1e-9));
        for (int u = 0; u < step.proposals.combined.size(); ++u) {
            CHECK(step.proposals.event_scores(u) > 0.0);
            CHECK(step.proposals.event_scores(u) < 1.0);
            CHECK(step.proposals.combined(u) > 0.0);
            CHECK(step.proposals.combined(u) < 2.0);
        }
        CHECK(step.refined.start >= 0.0);
        CHECK(step.refined.end <= sc.frame_count);
        CHECK(step.refined.start <= step.refined.end);
    }

    const BoundarySet out = refine(synth.ground_truth, scorer, cfg, timeline);
    const BoundarySet again = refine(synth.ground_truth, scorer, cfg, timeline);
    for (std::size_t n = 0; n < out.size(); ++n) {
        CHECK(out.boundaries[n].start == again.boundaries[n].start);
        CHECK(out.boundaries[n].end == again.boundaries[n].end);
    }
}

TEST_CASE("refine reports stage and caption on errors") {
    SimilarityMatrix s;
    s.values = Eigen::MatrixXd::Constant(10, 1, 0.5);
    const OracleScorer scorer(s, 20, 1);
    BoundarySet degenerate;
    degenerate.boundaries = {Boundary(5, 5)};
    RefineConfig cfg;
    try {
        refine(degenerate, scorer, cfg, Timeline(10));
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("stage 0") != std::string::npos);
        CHECK(msg.find("caption 0") != std::string::npos);
    }
}

TEST_CASE("oracle scorer prefers the matching block and is deterministic") {
    // noiseless block matrix: the query covering block n exactly scores
    // highest for caption n
    SimilarityMatrix s;
    s.values = Eigen::MatrixXd::Zero(30, 3);
    for (int n = 0; n < 3; ++n) {
        for (int f = 10 * n; f < 10 * (n + 1); ++f) {
            s.values(f, n) = 1.0;
        }
    }
    const OracleScorer scorer(s, 24, 5);
    for (int n = 0; n < 3; ++n) {
        const Query block_query{Boundary(10.0 * n, 10.0 * (n + 1)), 0};
        const double own = scorer.caption_logit(block_query, n);
        const Query other{Boundary(10.0 * ((n + 1) % 3), 10.0 * (((n + 1) % 3) + 1)), 0};
        CHECK(own > scorer.caption_logit(other, n));
        CHECK(own == doctest::Approx(1.0));
    }

    // constant matrix: every caption logit equal, softmax uniform
    SimilarityMatrix flat;
    flat.values = Eigen::MatrixXd::Constant(20, 2, 0.4);
    const OracleScorer flat_scorer(flat, 8, 9);
    const std::vector<Boundary> proposals = {Boundary(0, 10), Boundary(10, 20)};
    const std::vector<Query> linked = link_queries(proposals, flat_scorer);
    const ProposalSet scored = score_proposals(proposals, linked, flat_scorer, 0);
    CHECK(scored.caption_scores(0) == doctest::Approx(0.5));
    CHECK(scored.caption_scores(1) == doctest::Approx(0.5));

    const OracleScorer a(s, 16, 42), b(s, 16, 42);
    for (std::size_t i = 0; i < a.queries().size(); ++i) {
        CHECK(a.queries()[i].predicted_boundary.start == b.queries()[i].predicted_boundary.start);
        CHECK(a.queries()[i].predicted_boundary.end == b.queries()[i].predicted_boundary.end);
    }
}

TEST_CASE("table scorer serves stored logits") {
    std::vector<TableScorer::Entry> entries(2);
    entries[0] = {Boundary(0, 5), 1.5, {0.2, 0.8}};
    entries[1] = {Boundary(5, 10), -0.5, {0.9, 0.1}};
    const TableScorer scorer(entries);
    REQUIRE(scorer.queries().size() == 2);
    CHECK(scorer.event_logit(scorer.queries()[0]) == 1.5);
    CHECK(scorer.caption_logit(scorer.queries()[1], 0) == 0.9);
    CHECK_THROWS_AS(scorer.caption_logit(scorer.queries()[1], 7), std::invalid_argument);
}
