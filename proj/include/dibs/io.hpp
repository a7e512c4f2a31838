#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dibs/eval.hpp"
#include "dibs/interval.hpp"
#include "dibs/refine.hpp"
#include "dibs/similarity.hpp"

namespace dibs::io {

/// Malformed or inconsistent input data (distinct from usage errors).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Boundary file payload: events for one video plus its frame count.
struct BoundaryFile {
    std::string video_id;
    int frames = 0;
    BoundarySet set;
    std::optional<int> stage;                 // present on refined outputs
    std::vector<nlohmann::json> event_debug;  // optional per-event debug dumps
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

// Embeddings: JSON carries model_id/kind/dim inline; CSV is one vector per
// row, with kind and model_id supplied by the caller.
EmbeddingSet load_embeddings(const std::string& path,
                             std::optional<EmbeddingKind> csv_kind = std::nullopt,
                             const std::string& csv_model_id = "");
void save_embeddings(const std::string& path, const EmbeddingSet& set);

SimilarityMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const SimilarityMatrix& matrix);

BoundaryFile load_boundaries(const std::string& path);
void save_boundaries(const std::string& path, const BoundaryFile& file);

std::vector<TableScorer::Entry> load_scores(const std::string& path);

nlohmann::json report_to_json(const std::string& arm, const EvalReport& report);

/// Heatmap strip per caption with one bar row per boundary overlay.
std::string render_svg(const SimilarityMatrix& matrix,
                       const std::vector<std::pair<std::string, BoundarySet>>& overlays);

/// Run manifest written alongside every command output.
struct Manifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double wall_time_seconds = 0.0;
};

void write_manifest(const std::string& path, const Manifest& manifest);
nlohmann::json load_json(const std::string& path);

}  // namespace dibs::io
