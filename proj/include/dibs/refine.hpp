#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dibs/interval.hpp"
#include "dibs/random.hpp"
#include "dibs/similarity.hpp"

namespace dibs {

/// Jitter-augmentation and merge parameters for one refinement pass.
struct RefineConfig {
    double jitter_center = 0.2;    // r2, center offset as fraction of duration
    double jitter_duration = 0.2;  // r1, duration scale range
    int n_proposals = 16;          // U, original boundary included
    int merge_k = 4;               // K proposals merged into the refined boundary
    int stages = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

/// An abstract event slot carrying a predicted boundary; scores for it come
/// from the Scorer that owns it.
struct Query {
    Boundary predicted_boundary;
    int id = 0;
};

/// Scoring interface standing in for the event-classification and
/// caption-scoring heads of a set-prediction captioning model.
/// Implementations must be safe for concurrent read-only use.
class Scorer {
  public:
    virtual ~Scorer() = default;
    virtual const std::vector<Query>& queries() const = 0;
    virtual double event_logit(const Query& q) const = 0;
    virtual double caption_logit(const Query& q, int caption) const = 0;
};

/// Augmented proposal set for one caption: proposals, their linked queries,
/// and event / caption / combined scores.
struct ProposalSet {
    std::vector<Boundary> proposals;
    std::vector<Query> linked;
    Eigen::VectorXd event_scores;    // sigmoid of event logits, in (0,1)
    Eigen::VectorXd caption_scores;  // softmax across proposals, sums to 1
    Eigen::VectorXd combined;        // event + caption
};

/// U boundaries: index 0 is `b` itself, the rest center/duration jitters of it,
/// clipped to the video with a minimum width of one frame.
std::vector<Boundary> jitter(const Boundary& b, const RefineConfig& cfg,
                             const Timeline& timeline, Rng& rng);
std::vector<Boundary> jitter(const Boundary& b, const RefineConfig& cfg,
                             const Timeline& timeline);

/// Minimum-total-cost assignment of each row to a distinct column (rows <=
/// columns; extra columns stay unassigned). Ties resolve to the
/// lexicographically smallest assignment vector.
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

/// Link each proposal to a query by Hungarian matching on negative GIoU
/// between the proposal and the query's predicted boundary.
std::vector<Query> link_queries(const std::vector<Boundary>& proposals,
                                const Scorer& scorer);

/// Event scores via sigmoid, caption scores via softmax across proposals,
/// combined score their sum.
ProposalSet score_proposals(const std::vector<Boundary>& proposals,
                            const std::vector<Query>& linked, const Scorer& scorer,
                            int caption);

/// Weighted average of the top-K proposals by score (ties to the lower index).
/// With an all-zero top-K the highest-priority proposal is returned unchanged
/// and `zero_weights`, when given, is set.
Boundary merge_topk(const std::vector<Boundary>& proposals,
                    const Eigen::VectorXd& scores, int merge_k,
                    bool* zero_weights = nullptr);

/// Seed for a given absolute refinement stage; stage streams are what make
/// running s+t stages equal running s stages then t stages.
std::uint64_t stage_seed(std::uint64_t seed, int stage);

/// One caption's jitter + link + score + merge step, exposed for inspection.
struct RefineStep {
    ProposalSet proposals;
    Boundary refined;
};
RefineStep refine_caption(const Boundary& b, int caption, const Scorer& scorer,
                          const RefineConfig& cfg, const Timeline& timeline,
                          int stage);

/// Multi-stage refinement of every boundary in the set. Deterministic given
/// the seed; stage and caption indices fold into the random stream.
BoundarySet refine(const BoundarySet& boundaries, const Scorer& scorer,
                   const RefineConfig& cfg, const Timeline& timeline);

/// Oracle scorer: queries are seeded jitters of a uniform division of the
/// video; logits come from mean similarity inside each query's boundary, so
/// the refinement math runs without a trained model.
class OracleScorer : public Scorer {
  public:
    OracleScorer(const SimilarityMatrix& s, int n_queries, std::uint64_t seed);

    const std::vector<Query>& queries() const override { return queries_; }
    double event_logit(const Query& q) const override;
    double caption_logit(const Query& q, int caption) const override;

  private:
    Eigen::MatrixXd values_;
    std::vector<Query> queries_;
    std::vector<int> nearest_caption_;
};

/// Scorer backed by externally computed logits (e.g. a real model dump).
class TableScorer : public Scorer {
  public:
    struct Entry {
        Boundary boundary;
        double event_logit = 0.0;
        std::vector<double> caption_logits;
    };

    explicit TableScorer(std::vector<Entry> entries);

    const std::vector<Query>& queries() const override { return queries_; }
    double event_logit(const Query& q) const override;
    double caption_logit(const Query& q, int caption) const override;

  private:
    std::vector<Entry> entries_;
    std::vector<Query> queries_;
};

}  // namespace dibs
