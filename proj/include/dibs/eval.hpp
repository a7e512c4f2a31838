#pragma once

#include <array>
#include <string>
#include <vector>

#include "dibs/boundary_gen.hpp"
#include "dibs/drop_dtw.hpp"
#include "dibs/interval.hpp"
#include "dibs/refine.hpp"
#include "dibs/similarity.hpp"

namespace dibs {

inline constexpr std::array<double, 4> kIouThresholds = {0.3, 0.5, 0.7, 0.9};

/// Best-IoU matching (each side matched independently to its best
/// counterpart, many-to-one permitted) or strict one-to-one assignment.
enum class MatchRule { best_iou, one_to_one };

struct ThresholdPR {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct EvalReport {
    std::vector<ThresholdPR> per_threshold;
    double avg_precision = 0.0;
    double avg_recall = 0.0;
    double f1 = 0.0;
    double mean_iou = 0.0;
    int n_videos = 0;
};

/// Precision / recall of one video's predictions against its ground truth at
/// one IoU threshold.
std::pair<double, double> pr_at_threshold(const BoundarySet& preds,
                                          const BoundarySet& gts, double tau,
                                          MatchRule rule = MatchRule::best_iou);

/// Corpus metrics: per-video P/R at each threshold, averaged over thresholds
/// then macro-averaged over videos; F1 from the corpus averages; mean IoU over
/// all ground-truth events of their best prediction.
EvalReport evaluate(const std::vector<BoundarySet>& preds,
                    const std::vector<BoundarySet>& gts,
                    MatchRule rule = MatchRule::best_iou);
EvalReport evaluate(const BoundarySet& preds, const BoundarySet& gts,
                    MatchRule rule = MatchRule::best_iou);

/// Boundary-generation arms compared by the benchmark harness.
enum class Arm { uniform, dropdtw, dibs, dibs_global, dibs_refine };

Arm parse_arm(const std::string& name);
std::string arm_name(Arm arm);

struct BenchOptions {
    GenConfig gen;
    DropDtwConfig drop = DropDtwConfig::defaults();
    RefineConfig refine;
    int oracle_queries = 64;
    MatchRule rule = MatchRule::best_iou;
    int jobs = 1;
};

struct ArmResult {
    Arm arm = Arm::uniform;
    EvalReport report;
    int failures = 0;  // videos the arm failed on; report covers the rest
};

struct BenchVideo {
    SimilarityMatrix matrix;
    BoundarySet ground_truth;
};

/// One EvalReport per arm over the corpus. Deterministic for a given corpus
/// and options, independent of the job count.
std::vector<ArmResult> benchmark(const std::vector<BenchVideo>& corpus,
                                 const std::vector<Arm>& arms,
                                 const BenchOptions& options);

/// Run one arm on one video.
BoundarySet run_arm(Arm arm, const SimilarityMatrix& s, const BenchOptions& options,
                    std::uint64_t video_index);

/// Fixed-width text table of benchmark results.
std::string format_bench_table(const std::vector<ArmResult>& results);

}  // namespace dibs
