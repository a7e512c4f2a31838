#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dibs/interval.hpp"

namespace dibs {

enum class EmbeddingKind { frame, caption };

/// A set of equal-dimension embedding vectors from one model, one per row.
struct EmbeddingSet {
    Eigen::MatrixXd vectors;  // count x dim
    EmbeddingKind kind = EmbeddingKind::frame;
    std::string model_id;

    int count() const { return static_cast<int>(vectors.rows()); }
    int dim() const { return static_cast<int>(vectors.cols()); }

    /// Throws if any vector has zero norm or the set is empty.
    void validate() const;
};

/// Frame x caption similarity scores. Rows index frames, columns captions.
struct SimilarityMatrix {
    Eigen::MatrixXd values;

    int frames() const { return static_cast<int>(values.rows()); }
    int captions() const { return static_cast<int>(values.cols()); }
    Timeline timeline() const { return Timeline(frames()); }
};

double cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v);

/// S[m][n] = cosine(frames[m], captions[n]).
SimilarityMatrix build_matrix(const EmbeddingSet& frames, const EmbeddingSet& captions);

/// Element-wise mean of same-shape matrices from multiple models.
SimilarityMatrix aggregate(const std::vector<SimilarityMatrix>& matrices);

/// Synthetic-corpus generator configuration. Each caption gets one Gaussian
/// response bump of peak 1.0 centered in its ground-truth segment, plus
/// `distractor_peaks` bumps of height 0.5 elsewhere, plus i.i.d. noise.
struct SynthConfig {
    int frame_count = 100;
    int n_events = 4;
    double peak_width = 6.0;       // Gaussian sigma, in frames
    int distractor_peaks = 0;      // per caption
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double gt_jitter = 0.2;        // interior-edge jitter, fraction of segment length
    double peak_height = 1.0;
    double distractor_height = 0.5;

    void validate() const;
};

struct SynthResult {
    SimilarityMatrix matrix;
    BoundarySet ground_truth;
};

/// Deterministic per seed: ground truth is a jittered uniform division,
/// the matrix its bump-plus-distractor-plus-noise response, clamped to [0,1].
SynthResult synth_matrix(const SynthConfig& cfg);

}  // namespace dibs
