#include "dibs/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dibs/random.hpp"

namespace dibs {

void EmbeddingSet::validate() const {
    if (vectors.rows() == 0 || vectors.cols() == 0) {
        throw std::invalid_argument("EmbeddingSet: empty set");
    }
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        if (vectors.row(i).norm() == 0.0) {
            throw std::invalid_argument("EmbeddingSet: zero-norm vector at index " +
                                        std::to_string(i));
        }
    }
}

double cosine(const Eigen::Ref<const Eigen::VectorXd>& u,
              const Eigen::Ref<const Eigen::VectorXd>& v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("cosine: zero-norm input");
    }
    const double c = u.dot(v) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

SimilarityMatrix build_matrix(const EmbeddingSet& frames, const EmbeddingSet& captions) {
    if (frames.kind != EmbeddingKind::frame) {
        throw std::invalid_argument("build_matrix: first argument must hold frame embeddings");
    }
    if (captions.kind != EmbeddingKind::caption) {
        throw std::invalid_argument("build_matrix: second argument must hold caption embeddings");
    }
    frames.validate();
    captions.validate();
    if (frames.dim() != captions.dim()) {
        throw std::invalid_argument("build_matrix: embedding dimensions differ (" +
                                    std::to_string(frames.dim()) + " vs " +
                                    std::to_string(captions.dim()) + ")");
    }
    const Eigen::MatrixXd f = frames.vectors.rowwise().normalized();
    const Eigen::MatrixXd c = captions.vectors.rowwise().normalized();
    SimilarityMatrix out;
    out.values = (f * c.transpose()).cwiseMin(1.0).cwiseMax(-1.0);
    return out;
}

SimilarityMatrix aggregate(const std::vector<SimilarityMatrix>& matrices) {
    if (matrices.empty()) {
        throw std::invalid_argument("aggregate: empty matrix list");
    }
    const Eigen::Index rows = matrices.front().values.rows();
    const Eigen::Index cols = matrices.front().values.cols();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(rows, cols);
    for (const auto& m : matrices) {
        if (m.values.rows() != rows || m.values.cols() != cols) {
            throw std::invalid_argument("aggregate: shape mismatch");
        }
        sum += m.values;
    }
    SimilarityMatrix out;
    out.values = sum / static_cast<double>(matrices.size());
    return out;
}

void SynthConfig::validate() const {
    if (n_events < 1 || frame_count < n_events) {
        throw std::invalid_argument("SynthConfig: requires frame_count >= n_events >= 1");
    }
    if (peak_width <= 0.0) {
        throw std::invalid_argument("SynthConfig: peak_width must be > 0");
    }
    if (distractor_peaks < 0 || noise_sigma < 0.0 || gt_jitter < 0.0) {
        throw std::invalid_argument("SynthConfig: negative distractors/noise/jitter");
    }
    if (peak_height <= 0.0 || distractor_height < 0.0) {
        throw std::invalid_argument("SynthConfig: invalid peak heights");
    }
}

namespace {

void add_bump(Eigen::MatrixXd& values, int caption, double center, double sigma,
              double height) {
    for (int m = 0; m < values.rows(); ++m) {
        const double d = (m - center) / sigma;
        values(m, caption) += height * std::exp(-0.5 * d * d);
    }
}

}  // namespace

SynthResult synth_matrix(const SynthConfig& cfg) {
    cfg.validate();
    const int m_frames = cfg.frame_count;
    const int n = cfg.n_events;
    const double seg_len = static_cast<double>(m_frames) / n;

    Rng rng(mix_seed(cfg.seed, 0x53594e54ull));  // "SYNT"

    // Jittered uniform division; interior edges keep >= 1 frame separation.
    std::vector<double> edges(n + 1);
    edges[0] = 0.0;
    edges[n] = m_frames;
    for (int i = 1; i < n; ++i) {
        edges[i] = i * seg_len + rng.uniform(-cfg.gt_jitter, cfg.gt_jitter) * seg_len;
    }
    for (int i = 1; i < n; ++i) {
        edges[i] = std::clamp(edges[i], edges[i - 1] + 1.0, m_frames - static_cast<double>(n - i));
    }

    SynthResult out;
    out.ground_truth.boundaries.reserve(n);
    for (int i = 0; i < n; ++i) {
        out.ground_truth.boundaries.emplace_back(edges[i], edges[i + 1]);
    }

    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(m_frames, n);
    for (int cap = 0; cap < n; ++cap) {
        const Boundary& gt = out.ground_truth.boundaries[cap];
        add_bump(values, cap, gt.center(), cfg.peak_width, cfg.peak_height);

        // Distractor bumps land away from the caption's own response so each
        // one shows up as a separate local maximum.
        std::vector<double> centers{gt.center()};
        for (int d = 0; d < cfg.distractor_peaks; ++d) {
            double pos = 0.0;
            bool placed = false;
            for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
                pos = rng.uniform(0.0, m_frames);
                placed = pos < gt.start || pos >= gt.end;
                for (const double c : centers) {
                    placed = placed && std::abs(pos - c) >= 3.0 * cfg.peak_width;
                }
            }
            centers.push_back(pos);
            add_bump(values, cap, pos, cfg.peak_width, cfg.distractor_height);
        }
    }

    if (cfg.noise_sigma > 0.0) {
        for (int mm = 0; mm < m_frames; ++mm) {
            for (int cap = 0; cap < n; ++cap) {
                values(mm, cap) += rng.normal(0.0, cfg.noise_sigma);
            }
        }
    }
    out.matrix.values = values.cwiseMin(1.0).cwiseMax(0.0);
    return out;
}

}  // namespace dibs
