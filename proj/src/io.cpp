#include "dibs/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dibs/version.hpp"

namespace dibs::io {

using nlohmann::json;

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json parse_json(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

const json& require_key(const json& j, const std::string& key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) {
        throw DataError(path + ": missing key '" + key + "'");
    }
    return *it;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& path) {
    const std::string text = read_text(path);
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(field, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            while (consumed < field.size() && std::isspace(field[consumed])) {
                ++consumed;
            }
            if (consumed != field.size() || field.empty()) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": not a number: '" + field + "'");
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError(path + ": empty CSV");
    }
    for (const auto& row : rows) {
        if (row.size() != rows.front().size()) {
            throw DataError(path + ": ragged CSV rows");
        }
    }
    return rows;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(r, c) = rows[r][c];
        }
    }
    return m;
}

json matrix_to_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_of_matrix(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << m(r, c);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write file: " + path);
    }
    out << content;
}

EmbeddingSet load_embeddings(const std::string& path,
                             std::optional<EmbeddingKind> csv_kind,
                             const std::string& csv_model_id) {
    EmbeddingSet set;
    if (has_suffix(path, ".csv")) {
        if (!csv_kind) {
            throw DataError(path + ": CSV embeddings require an explicit kind");
        }
        set.vectors = rows_to_matrix(parse_csv_rows(path));
        set.kind = *csv_kind;
        set.model_id = csv_model_id;
    } else {
        const json j = parse_json(path);
        set.model_id = require_key(j, "model_id", path).get<std::string>();
        const std::string kind = require_key(j, "kind", path).get<std::string>();
        if (kind == "frame") {
            set.kind = EmbeddingKind::frame;
        } else if (kind == "caption") {
            set.kind = EmbeddingKind::caption;
        } else {
            throw DataError(path + ": key 'kind' must be 'frame' or 'caption'");
        }
        const int dim = require_key(j, "dim", path).get<int>();
        const auto& vectors = require_key(j, "vectors", path);
        if (!vectors.is_array() || vectors.empty()) {
            throw DataError(path + ": key 'vectors' must be a non-empty array");
        }
        set.vectors.resize(vectors.size(), dim);
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (static_cast<int>(vectors[i].size()) != dim) {
                throw DataError(path + ": key 'vectors': row " + std::to_string(i) +
                                " does not match 'dim'");
            }
            for (int d = 0; d < dim; ++d) {
                set.vectors(i, d) = vectors[i][d].get<double>();
            }
        }
    }
    set.validate();
    return set;
}

void save_embeddings(const std::string& path, const EmbeddingSet& set) {
    if (has_suffix(path, ".csv")) {
        write_text(path, csv_of_matrix(set.vectors));
        return;
    }
    json j;
    j["model_id"] = set.model_id;
    j["kind"] = set.kind == EmbeddingKind::frame ? "frame" : "caption";
    j["dim"] = set.dim();
    j["vectors"] = matrix_to_rows(set.vectors);
    write_text(path, j.dump(2) + "\n");
}

SimilarityMatrix load_matrix(const std::string& path) {
    SimilarityMatrix out;
    if (has_suffix(path, ".csv")) {
        out.values = rows_to_matrix(parse_csv_rows(path));
        return out;
    }
    const json j = parse_json(path);
    const int frames = require_key(j, "frames", path).get<int>();
    const int captions = require_key(j, "captions", path).get<int>();
    const auto& values = require_key(j, "values", path);
    if (static_cast<int>(values.size()) != frames) {
        throw DataError(path + ": key 'values' has " + std::to_string(values.size()) +
                        " rows, expected " + std::to_string(frames));
    }
    out.values.resize(frames, captions);
    for (int r = 0; r < frames; ++r) {
        if (static_cast<int>(values[r].size()) != captions) {
            throw DataError(path + ": key 'values': row " + std::to_string(r) +
                            " has wrong width");
        }
        for (int c = 0; c < captions; ++c) {
            out.values(r, c) = values[r][c].get<double>();
        }
    }
    return out;
}

void save_matrix(const std::string& path, const SimilarityMatrix& matrix) {
    if (has_suffix(path, ".csv")) {
        write_text(path, csv_of_matrix(matrix.values));
        return;
    }
    json j;
    j["frames"] = matrix.frames();
    j["captions"] = matrix.captions();
    j["values"] = matrix_to_rows(matrix.values);
    write_text(path, j.dump(2) + "\n");
}

BoundaryFile load_boundaries(const std::string& path) {
    const json j = parse_json(path);
    BoundaryFile out;
    out.video_id = require_key(j, "video_id", path).get<std::string>();
    out.frames = require_key(j, "frames", path).get<int>();
    if (j.contains("stage")) {
        out.stage = j["stage"].get<int>();
    }
    const auto& events = require_key(j, "events", path);
    const std::size_t n = events.size();
    out.set.boundaries.reserve(n);
    bool any_loss = false, any_flag = false;
    std::vector<double> losses(n, 0.0);
    std::vector<char> flagged(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const json& e = events[i];
        const int index = require_key(e, "index", path).get<int>();
        if (index != static_cast<int>(i)) {
            throw DataError(path + ": key 'events': expected index " + std::to_string(i) +
                            ", found " + std::to_string(index));
        }
        const double start = require_key(e, "start", path).get<double>();
        const double end = require_key(e, "end", path).get<double>();
        try {
            out.set.boundaries.emplace_back(start, end);
        } catch (const std::invalid_argument& err) {
            throw DataError(path + ": event " + std::to_string(i) + ": " + err.what());
        }
        if (e.contains("loss")) {
            losses[i] = e["loss"].get<double>();
            any_loss = true;
        }
        if (e.contains("flagged") && e["flagged"].get<bool>()) {
            flagged[i] = 1;
            any_flag = true;
        }
    }
    if (any_loss) {
        out.set.losses = std::move(losses);
    }
    if (any_flag) {
        out.set.flagged = std::move(flagged);
    }
    return out;
}

void save_boundaries(const std::string& path, const BoundaryFile& file) {
    json j;
    j["video_id"] = file.video_id;
    j["frames"] = file.frames;
    if (file.stage) {
        j["stage"] = *file.stage;
    }
    json events = json::array();
    for (std::size_t i = 0; i < file.set.size(); ++i) {
        json e;
        e["index"] = static_cast<int>(i);
        e["start"] = file.set.boundaries[i].start;
        e["end"] = file.set.boundaries[i].end;
        if (!file.set.losses.empty()) {
            e["loss"] = file.set.losses[i];
        }
        if (!file.set.flagged.empty() && file.set.flagged[i]) {
            e["flagged"] = true;
        }
        if (i < file.event_debug.size() && !file.event_debug[i].is_null()) {
            e["debug"] = file.event_debug[i];
        }
        events.push_back(std::move(e));
    }
    j["events"] = std::move(events);
    write_text(path, j.dump(2) + "\n");
}

std::vector<TableScorer::Entry> load_scores(const std::string& path) {
    const json j = parse_json(path);
    const auto& queries = require_key(j, "queries", path);
    if (!queries.is_array() || queries.empty()) {
        throw DataError(path + ": key 'queries' must be a non-empty array");
    }
    std::vector<TableScorer::Entry> out;
    out.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const json& q = queries[i];
        TableScorer::Entry entry;
        const double start = require_key(q, "start", path).get<double>();
        const double end = require_key(q, "end", path).get<double>();
        try {
            entry.boundary = Boundary(start, end);
        } catch (const std::invalid_argument& err) {
            throw DataError(path + ": query " + std::to_string(i) + ": " + err.what());
        }
        entry.event_logit = require_key(q, "event_logit", path).get<double>();
        for (const auto& v : require_key(q, "caption_logits", path)) {
            entry.caption_logits.push_back(v.get<double>());
        }
        out.push_back(std::move(entry));
    }
    return out;
}

json report_to_json(const std::string& arm, const EvalReport& report) {
    json j;
    j["arm"] = arm;
    j["avg_precision"] = report.avg_precision;
    j["avg_recall"] = report.avg_recall;
    j["f1"] = report.f1;
    j["mean_iou"] = report.mean_iou;
    j["n_videos"] = report.n_videos;
    json per;
    for (const ThresholdPR& t : report.per_threshold) {
        char key[16];
        std::snprintf(key, sizeof(key), "%.1f", t.threshold);
        per[key] = {{"precision", t.precision}, {"recall", t.recall}};
    }
    j["per_threshold"] = std::move(per);
    // reserved for externally computed caption metrics (METEOR, CIDEr, SODA)
    j["caption_metrics"] = nlohmann::json::object();
    return j;
}

std::string render_svg(const SimilarityMatrix& matrix,
                       const std::vector<std::pair<std::string, BoundarySet>>& overlays) {
    const int m = matrix.frames();
    const int n = matrix.captions();
    for (const auto& [name, set] : overlays) {
        for (const Boundary& b : set.boundaries) {
            if (b.end > m) {
                throw DataError("render: boundary set '" + name +
                                "' extends past the matrix frame count");
            }
        }
    }
    const double width = 720.0;
    const double left = 90.0, top = 20.0;
    const double cell_w = width / m;
    const double row_h = 18.0, bar_h = 12.0, gap = 6.0;
    const double heat_h = n * row_h;
    const double total_h = top + heat_h + overlays.size() * (bar_h + gap) + 30.0;

    const double lo = matrix.values.minCoeff();
    const double hi = matrix.values.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (left + width + 20)
        << "\" height=\"" << total_h << "\">\n";
    for (int cap = 0; cap < n; ++cap) {
        const double y = top + cap * row_h;
        svg << "<text x=\"4\" y=\"" << (y + row_h - 5)
            << "\" font-size=\"10\" font-family=\"monospace\">caption " << cap
            << "</text>\n";
        for (int f = 0; f < m; ++f) {
            const double v = (matrix.values(f, cap) - lo) / span;
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            svg << "<rect x=\"" << (left + f * cell_w) << "\" y=\"" << y << "\" width=\""
                << cell_w << "\" height=\"" << (row_h - 2) << "\" fill=\"rgb(" << shade
                << "," << shade << ",255)\"/>\n";
        }
    }
    static const char* colors[] = {"#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    double y = top + heat_h + gap;
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        const auto& [name, set] = overlays[i];
        const char* color = colors[i % 5];
        svg << "<text x=\"4\" y=\"" << (y + bar_h - 2)
            << "\" font-size=\"10\" font-family=\"monospace\">" << name << "</text>\n";
        for (const Boundary& b : set.boundaries) {
            svg << "<rect x=\"" << (left + b.start * cell_w) << "\" y=\"" << y
                << "\" width=\"" << (std::max(b.duration() * cell_w, 1.0)) << "\" height=\""
                << bar_h << "\" fill=\"" << color << "\" fill-opacity=\"0.55\"/>\n";
        }
        y += bar_h + gap;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    json j;
    j["command"] = manifest.command;
    j["config"] = manifest.config;
    j["inputs"] = manifest.inputs;
    j["outputs"] = manifest.outputs;
    j["tool_version"] = kVersion;
    j["wall_time_seconds"] = manifest.wall_time_seconds;
    write_text(path, j.dump(2) + "\n");
}

json load_json(const std::string& path) { return parse_json(path); }

}  // namespace dibs::io
