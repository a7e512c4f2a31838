#include "dibs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dibs/parallel.hpp"

namespace dibs {

namespace {

// Count of rows whose best one-to-one partner clears tau, under a
// min-cost (-IoU) assignment of the smaller side into the larger.
int one_to_one_hits(const BoundarySet& a, const BoundarySet& b, double tau) {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    const bool a_rows = na <= nb;
    const int rows = a_rows ? na : nb;
    const int cols = a_rows ? nb : na;
    Eigen::MatrixXd cost(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const Boundary& pa = a_rows ? a.boundaries[r] : a.boundaries[c];
            const Boundary& pb = a_rows ? b.boundaries[c] : b.boundaries[r];
            cost(r, c) = -iou(pa, pb);
        }
    }
    const std::vector<int> assignment = hungarian(cost);
    int hits = 0;
    for (int r = 0; r < rows; ++r) {
        if (-cost(r, assignment[r]) >= tau) {
            ++hits;
        }
    }
    return hits;
}

double best_iou_against(const Boundary& b, const BoundarySet& others) {
    double best = 0.0;
    for (const Boundary& o : others.boundaries) {
        best = std::max(best, iou(b, o));
    }
    return best;
}

}  // namespace

std::pair<double, double> pr_at_threshold(const BoundarySet& preds,
                                          const BoundarySet& gts, double tau,
                                          MatchRule rule) {
    if (!(tau > 0.0) || !(tau <= 1.0)) {
        throw std::invalid_argument("pr_at_threshold: tau must be in (0, 1]");
    }
    if (preds.size() == 0 && gts.size() == 0) {
        return {1.0, 1.0};
    }
    if (preds.size() == 0 || gts.size() == 0) {
        return {0.0, 0.0};
    }
    if (rule == MatchRule::one_to_one) {
        const int hits = one_to_one_hits(preds, gts, tau);
        return {static_cast<double>(hits) / preds.size(),
                static_cast<double>(hits) / gts.size()};
    }
    int pred_hits = 0;
    for (const Boundary& p : preds.boundaries) {
        if (best_iou_against(p, gts) >= tau) {
            ++pred_hits;
        }
    }
    int gt_hits = 0;
    for (const Boundary& g : gts.boundaries) {
        if (best_iou_against(g, preds) >= tau) {
            ++gt_hits;
        }
    }
    return {static_cast<double>(pred_hits) / preds.size(),
            static_cast<double>(gt_hits) / gts.size()};
}

EvalReport evaluate(const std::vector<BoundarySet>& preds,
                    const std::vector<BoundarySet>& gts, MatchRule rule) {
    if (preds.size() != gts.size()) {
        throw std::invalid_argument("evaluate: prediction/ground-truth video counts differ");
    }
    EvalReport report;
    report.n_videos = static_cast<int>(preds.size());
    if (preds.empty()) {
        return report;
    }

    for (const double tau : kIouThresholds) {
        double psum = 0.0, rsum = 0.0;
        for (std::size_t v = 0; v < preds.size(); ++v) {
            const auto [p, r] = pr_at_threshold(preds[v], gts[v], tau, rule);
            psum += p;
            rsum += r;
        }
        report.per_threshold.push_back(
            {tau, psum / preds.size(), rsum / preds.size()});
    }
    for (const ThresholdPR& t : report.per_threshold) {
        report.avg_precision += t.precision;
        report.avg_recall += t.recall;
    }
    report.avg_precision /= report.per_threshold.size();
    report.avg_recall /= report.per_threshold.size();
    const double pr_sum = report.avg_precision + report.avg_recall;
    report.f1 = pr_sum > 0.0 ? 2.0 * report.avg_precision * report.avg_recall / pr_sum : 0.0;

    double iou_sum = 0.0;
    std::size_t n_events = 0;
    for (std::size_t v = 0; v < preds.size(); ++v) {
        for (const Boundary& g : gts[v].boundaries) {
            iou_sum += best_iou_against(g, preds[v]);
            ++n_events;
        }
    }
    report.mean_iou = n_events > 0 ? iou_sum / n_events : 0.0;
    return report;
}

EvalReport evaluate(const BoundarySet& preds, const BoundarySet& gts, MatchRule rule) {
    return evaluate(std::vector<BoundarySet>{preds}, std::vector<BoundarySet>{gts}, rule);
}

Arm parse_arm(const std::string& name) {
    if (name == "uniform") return Arm::uniform;
    if (name == "dropdtw") return Arm::dropdtw;
    if (name == "dibs") return Arm::dibs;
    if (name == "dibs-global") return Arm::dibs_global;
    if (name == "dibs-refine") return Arm::dibs_refine;
    throw std::invalid_argument("unknown arm: " + name);
}

std::string arm_name(Arm arm) {
    switch (arm) {
        case Arm::uniform: return "uniform";
        case Arm::dropdtw: return "dropdtw";
        case Arm::dibs: return "dibs";
        case Arm::dibs_global: return "dibs-global";
        case Arm::dibs_refine: return "dibs-refine";
    }
    throw std::logic_error("arm_name: unhandled arm");
}

BoundarySet run_arm(Arm arm, const SimilarityMatrix& s, const BenchOptions& options,
                    std::uint64_t video_index) {
    switch (arm) {
        case Arm::uniform:
            return uniform_init(s.timeline(), s.captions());
        case Arm::dropdtw:
            return alignment_to_boundaries(drop_dtw_align(s, options.drop), s.timeline(),
                                           s.captions());
        case Arm::dibs:
            return generate(s, options.gen);
        case Arm::dibs_global:
            return generate_global(s, options.gen);
        case Arm::dibs_refine: {
            const BoundarySet base = generate(s, options.gen);
            RefineConfig cfg = options.refine;
            cfg.seed = mix_seed(options.refine.seed, 0x564944ull, video_index);  // "VID"
            const OracleScorer scorer(s, options.oracle_queries,
                                      mix_seed(cfg.seed, 0x51525953ull));
            return refine(base, scorer, cfg, s.timeline());
        }
    }
    throw std::logic_error("run_arm: unhandled arm");
}

std::vector<ArmResult> benchmark(const std::vector<BenchVideo>& corpus,
                                 const std::vector<Arm>& arms,
                                 const BenchOptions& options) {
    if (corpus.empty()) {
        throw std::invalid_argument("benchmark: empty corpus");
    }
    std::vector<ArmResult> results;
    results.reserve(arms.size());
    for (const Arm arm : arms) {
        std::vector<BoundarySet> preds(corpus.size());
        std::vector<char> failed(corpus.size(), 0);
        parallel_for(static_cast<int>(corpus.size()), options.jobs, [&](int v) {
            try {
                preds[v] = run_arm(arm, corpus[v].matrix, options,
                                   static_cast<std::uint64_t>(v));
            } catch (const std::exception&) {
                failed[v] = 1;
            }
        });
        ArmResult res;
        res.arm = arm;
        std::vector<BoundarySet> ok_preds, ok_gts;
        for (std::size_t v = 0; v < corpus.size(); ++v) {
            if (failed[v]) {
                ++res.failures;
            } else {
                ok_preds.push_back(preds[v]);
                ok_gts.push_back(corpus[v].ground_truth);
            }
        }
        if (!ok_preds.empty()) {
            res.report = evaluate(ok_preds, ok_gts, options.rule);
        }
        results.push_back(std::move(res));
    }
    return results;
}

std::string format_bench_table(const std::vector<ArmResult>& results) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %9s %9s %9s %9s %7s %9s\n", "arm", "avg_prec",
                  "avg_rec", "f1", "mean_iou", "videos", "failures");
    out += line;
    out += std::string(69, '-') + "\n";
    for (const ArmResult& r : results) {
        std::snprintf(line, sizeof(line), "%-12s %9.4f %9.4f %9.4f %9.4f %7d %9d\n",
                      arm_name(r.arm).c_str(), r.report.avg_precision, r.report.avg_recall,
                      r.report.f1, r.report.mean_iou, r.report.n_videos, r.failures);
        out += line;
    }
    return out;
}

}  // namespace dibs
