// Command-line surface for similarity-matrix construction, synthetic corpora,
// boundary generation, refinement, evaluation, benchmarking, and rendering.
//
// Exit codes: 0 success, 2 usage/validation error, 3 data error,
// 4 internal invariant violation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dibs/boundary_gen.hpp"
#include "dibs/drop_dtw.hpp"
#include "dibs/eval.hpp"
#include "dibs/interval.hpp"
#include "dibs/io.hpp"
#include "dibs/parallel.hpp"
#include "dibs/random.hpp"
#include "dibs/refine.hpp"
#include "dibs/similarity.hpp"
#include "dibs/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void emit_manifest(const std::string& anchor_path, const std::string& command,
                   json config, std::vector<std::string> inputs,
                   std::vector<std::string> outputs, double seconds) {
    dibs::io::Manifest man;
    man.command = command;
    man.config = std::move(config);
    man.inputs = std::move(inputs);
    man.outputs = std::move(outputs);
    man.wall_time_seconds = seconds;
    const fs::path anchor(anchor_path);
    const std::string path = fs::is_directory(anchor)
                                 ? (anchor / "manifest.json").string()
                                 : anchor_path + ".manifest.json";
    dibs::io::write_manifest(path, man);
}

std::string video_id_from_path(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    for (const std::string suffix : {".matrix", ".gt", ".boundaries"}) {
        if (stem.size() > suffix.size() &&
            stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
            stem.resize(stem.size() - suffix.size());
        }
    }
    return stem;
}

// Flat key=value config file; values for options already given on the
// command line are ignored, so precedence is defaults < config < flags.
void apply_config_file(CLI::App* sub, const std::string& path) {
    if (path.empty()) {
        return;
    }
    std::istringstream lines(dibs::io::read_text(path));
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("config", path + ":" + std::to_string(line_no) +
                                                     ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw CLI::ValidationError("config", path + ":" + std::to_string(line_no) +
                                                     ": unknown key '" + key + "'");
        }
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string item = csv.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) {
            out.push_back(item);
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

// ---------------------------------------------------------------- sim

struct SimArgs {
    std::string config_path;
    std::vector<std::string> inputs;
    std::string out;
    bool aggregate = false;
    std::string kinds;     // for CSV embeddings, e.g. "frame,caption"
    std::string model_id = "csv";
};

int cmd_sim(const SimArgs& args) {
    Timer timer;
    dibs::SimilarityMatrix result;
    if (args.aggregate) {
        std::vector<dibs::SimilarityMatrix> matrices;
        matrices.reserve(args.inputs.size());
        for (const auto& path : args.inputs) {
            matrices.push_back(dibs::io::load_matrix(path));
        }
        result = dibs::aggregate(matrices);
    } else {
        if (args.inputs.size() != 2) {
            throw CLI::ValidationError("sim", "expected exactly two embedding files");
        }
        const std::vector<std::string> kinds = split_list(args.kinds);
        auto kind_for = [&](std::size_t i) -> std::optional<dibs::EmbeddingKind> {
            if (i >= kinds.size()) {
                return std::nullopt;
            }
            if (kinds[i] == "frame") {
                return dibs::EmbeddingKind::frame;
            }
            if (kinds[i] == "caption") {
                return dibs::EmbeddingKind::caption;
            }
            throw CLI::ValidationError("sim", "--kinds entries must be frame or caption");
        };
        dibs::EmbeddingSet a = dibs::io::load_embeddings(args.inputs[0], kind_for(0),
                                                         args.model_id);
        dibs::EmbeddingSet b = dibs::io::load_embeddings(args.inputs[1], kind_for(1),
                                                         args.model_id);
        if (a.kind == dibs::EmbeddingKind::caption && b.kind == dibs::EmbeddingKind::frame) {
            std::swap(a, b);
        }
        result = dibs::build_matrix(a, b);
    }
    dibs::io::save_matrix(args.out, result);
    emit_manifest(args.out, "sim",
                  {{"aggregate", args.aggregate},
                   {"kinds", args.kinds},
                   {"model-id", args.model_id}},
                  args.inputs, {args.out}, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string config_path;
    dibs::SynthConfig cfg;
    int count = 1;
    int jobs = 1;
    std::string out_dir;
};

int cmd_synth(const SynthArgs& args) {
    Timer timer;
    fs::create_directories(args.out_dir);
    std::vector<std::string> outputs(args.count * 2);
    dibs::parallel_for(args.count, args.jobs, [&](int v) {
        dibs::SynthConfig cfg = args.cfg;
        cfg.seed = dibs::mix_seed(args.cfg.seed, 0x434f5250ull, v);  // "CORP"
        const dibs::SynthResult synth = dibs::synth_matrix(cfg);
        char name[32];
        std::snprintf(name, sizeof(name), "video_%04d", v);
        const std::string matrix_path =
            (fs::path(args.out_dir) / (std::string(name) + ".matrix.json")).string();
        const std::string gt_path =
            (fs::path(args.out_dir) / (std::string(name) + ".gt.json")).string();
        dibs::io::save_matrix(matrix_path, synth.matrix);
        dibs::io::BoundaryFile gt;
        gt.video_id = name;
        gt.frames = cfg.frame_count;
        gt.set = synth.ground_truth;
        dibs::io::save_boundaries(gt_path, gt);
        outputs[2 * v] = matrix_path;
        outputs[2 * v + 1] = gt_path;
    });
    emit_manifest(args.out_dir, "synth",
                  {{"frames", args.cfg.frame_count},
                   {"events", args.cfg.n_events},
                   {"peak-width", args.cfg.peak_width},
                   {"distractors", args.cfg.distractor_peaks},
                   {"noise", args.cfg.noise_sigma},
                   {"gt-jitter", args.cfg.gt_jitter},
                   {"peak-height", args.cfg.peak_height},
                   {"distractor-height", args.cfg.distractor_height},
                   {"seed", args.cfg.seed},
                   {"count", args.count},
                   {"jobs", args.jobs}},
                  {}, outputs, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------- gen

struct GenArgs {
    std::string config_path;
    std::string matrix_path;
    std::string method = "dibs";
    std::string out;
    std::string video_id;
    dibs::GenConfig gen;
    double drop_cost = std::numeric_limits<double>::quiet_NaN();
    double drop_percentile = 30.0;
    bool disjoint = false;
};

dibs::DropDtwConfig drop_config(double cost, double percentile) {
    if (!std::isnan(cost)) {
        return dibs::DropDtwConfig::from_cost(cost);
    }
    return dibs::DropDtwConfig::from_percentile(percentile);
}

int cmd_gen(const GenArgs& args) {
    Timer timer;
    const dibs::SimilarityMatrix s = dibs::io::load_matrix(args.matrix_path);
    dibs::BoundarySet out;
    if (args.method == "uniform") {
        out = dibs::uniform_init(s.timeline(), s.captions());
    } else if (args.method == "dropdtw") {
        out = dibs::alignment_to_boundaries(
            dibs::drop_dtw_align(s, drop_config(args.drop_cost, args.drop_percentile)),
            s.timeline(), s.captions());
    } else if (args.method == "dibs") {
        out = dibs::generate(s, args.gen);
    } else if (args.method == "dibs-global") {
        out = dibs::generate_global(s, args.gen);
    } else {
        throw CLI::ValidationError("gen", "unknown method: " + args.method);
    }
    if (args.disjoint) {
        out = dibs::clip_overlaps(out);
    }
    dibs::io::BoundaryFile file;
    file.video_id = args.video_id.empty() ? video_id_from_path(args.matrix_path)
                                          : args.video_id;
    file.frames = s.frames();
    file.set = out;
    dibs::io::save_boundaries(args.out, file);
    emit_manifest(args.out, "gen",
                  {{"method", args.method},
                   {"top-k", args.gen.top_k},
                   {"iterations", args.gen.iterations},
                   {"alpha", args.gen.alpha},
                   {"window-margin", args.gen.window_margin},
                   {"drop-percentile", args.drop_percentile},
                   {"disjoint", args.disjoint}},
                  {args.matrix_path}, {args.out}, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------- refine

struct RefineArgs {
    std::string config_path;
    std::string boundaries_path;
    std::string matrix_path;
    std::string scores_path;
    std::string out;
    dibs::RefineConfig cfg;
    int queries = 64;
    bool debug_proposals = false;
};

json proposal_set_to_json(const dibs::ProposalSet& set) {
    json proposals = json::array();
    for (std::size_t u = 0; u < set.proposals.size(); ++u) {
        proposals.push_back({{"start", set.proposals[u].start},
                             {"end", set.proposals[u].end},
                             {"query", set.linked[u].id},
                             {"event_score", set.event_scores(u)},
                             {"caption_score", set.caption_scores(u)},
                             {"score", set.combined(u)}});
    }
    return proposals;
}

int cmd_refine(const RefineArgs& args) {
    Timer timer;
    const dibs::io::BoundaryFile input = dibs::io::load_boundaries(args.boundaries_path);
    const dibs::Timeline timeline(input.frames);

    std::unique_ptr<dibs::Scorer> scorer;
    std::vector<std::string> inputs = {args.boundaries_path};
    if (!args.scores_path.empty()) {
        // an explicit scores file wins over the similarity-matrix oracle
        scorer = std::make_unique<dibs::TableScorer>(dibs::io::load_scores(args.scores_path));
        inputs.push_back(args.scores_path);
    } else if (!args.matrix_path.empty()) {
        const dibs::SimilarityMatrix s = dibs::io::load_matrix(args.matrix_path);
        if (s.frames() != input.frames) {
            throw dibs::io::DataError("refine: matrix frame count " +
                                      std::to_string(s.frames()) +
                                      " does not match boundary file frames " +
                                      std::to_string(input.frames));
        }
        scorer = std::make_unique<dibs::OracleScorer>(
            s, args.queries, dibs::mix_seed(args.cfg.seed, 0x51525953ull));
        inputs.push_back(args.matrix_path);
    } else {
        throw CLI::ValidationError("refine", "either --matrix or --scores is required");
    }

    dibs::io::BoundaryFile out_file;
    out_file.video_id = input.video_id;
    out_file.frames = input.frames;
    out_file.stage = args.cfg.stages;

    if (args.debug_proposals) {
        // run all but the last stage, then capture per-caption proposal dumps
        dibs::BoundarySet mid = input.set;
        if (args.cfg.stages > 1) {
            dibs::RefineConfig head = args.cfg;
            head.stages = args.cfg.stages - 1;
            mid = dibs::refine(input.set, *scorer, head, timeline);
        }
        out_file.set = mid;
        out_file.set.flagged.clear();
        out_file.event_debug.resize(mid.size());
        for (std::size_t n = 0; n < mid.size(); ++n) {
            const dibs::RefineStep step =
                dibs::refine_caption(mid.boundaries[n], static_cast<int>(n), *scorer,
                                     args.cfg, timeline, args.cfg.stages - 1);
            out_file.set.boundaries[n] = step.refined;
            out_file.event_debug[n] = proposal_set_to_json(step.proposals);
        }
        out_file.set.losses = input.set.losses;
    } else {
        out_file.set = dibs::refine(input.set, *scorer, args.cfg, timeline);
    }

    dibs::io::save_boundaries(args.out, out_file);
    emit_manifest(args.out, "refine",
                  {{"jitter-center", args.cfg.jitter_center},
                   {"jitter-duration", args.cfg.jitter_duration},
                   {"proposals", args.cfg.n_proposals},
                   {"merge-k", args.cfg.merge_k},
                   {"stages", args.cfg.stages},
                   {"seed", args.cfg.seed},
                   {"queries", args.queries},
                   {"debug-proposals", args.debug_proposals}},
                  inputs, {args.out}, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string config_path;
    std::string pred_dir;
    std::string gt_dir;
    std::string out;
    bool one_to_one = false;
};

std::map<std::string, dibs::io::BoundaryFile> load_boundary_dir(const std::string& dir) {
    std::map<std::string, dibs::io::BoundaryFile> out;
    if (!fs::is_directory(dir)) {
        throw dibs::io::DataError("not a directory: " + dir);
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".json" ||
            name.find(".manifest.") != std::string::npos || name == "manifest.json" ||
            name.find(".matrix.") != std::string::npos) {
            continue;
        }
        dibs::io::BoundaryFile file = dibs::io::load_boundaries(entry.path().string());
        if (out.count(file.video_id) > 0) {
            throw dibs::io::DataError(dir + ": duplicate video_id '" + file.video_id + "'");
        }
        out.emplace(file.video_id, std::move(file));
    }
    if (out.empty()) {
        throw dibs::io::DataError(dir + ": no boundary files found");
    }
    return out;
}

int cmd_eval(const EvalArgs& args) {
    Timer timer;
    const auto preds = load_boundary_dir(args.pred_dir);
    const auto gts = load_boundary_dir(args.gt_dir);

    std::vector<std::string> orphans;
    for (const auto& [id, file] : preds) {
        if (gts.count(id) == 0) {
            orphans.push_back(id + " (prediction only)");
        }
    }
    for (const auto& [id, file] : gts) {
        if (preds.count(id) == 0) {
            orphans.push_back(id + " (ground truth only)");
        }
    }
    if (!orphans.empty()) {
        std::string msg = "eval: mismatched video ids:";
        for (const auto& o : orphans) {
            msg += "\n  " + o;
        }
        throw dibs::io::DataError(msg);
    }

    std::vector<dibs::BoundarySet> pred_sets, gt_sets;
    for (const auto& [id, file] : preds) {
        pred_sets.push_back(file.set);
        gt_sets.push_back(gts.at(id).set);
    }
    const dibs::EvalReport report = dibs::evaluate(
        pred_sets, gt_sets,
        args.one_to_one ? dibs::MatchRule::one_to_one : dibs::MatchRule::best_iou);

    dibs::ArmResult row;
    row.report = report;
    std::cout << dibs::format_bench_table({row});
    const json j = dibs::io::report_to_json("eval", report);
    if (!args.out.empty()) {
        dibs::io::write_text(args.out, j.dump(2) + "\n");
        emit_manifest(args.out, "eval", {{"one-to-one", args.one_to_one}},
                      {args.pred_dir, args.gt_dir}, {args.out}, timer.seconds());
    } else {
        std::cout << j.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string config_path;
    std::string corpus_dir;
    std::string arms = "uniform,dropdtw,dibs,dibs-global,dibs-refine";
    std::string out;
    dibs::BenchOptions options;
    double drop_cost = std::numeric_limits<double>::quiet_NaN();
    double drop_percentile = 30.0;
    bool one_to_one = false;
};

std::vector<dibs::BenchVideo> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) {
        throw dibs::io::DataError("not a directory: " + dir);
    }
    std::vector<std::string> matrix_files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.compare(name.size() - 12, 12, ".matrix.json") == 0) {
            matrix_files.push_back(entry.path().string());
        }
    }
    std::sort(matrix_files.begin(), matrix_files.end());
    if (matrix_files.empty()) {
        throw dibs::io::DataError(dir + ": no *.matrix.json files found");
    }
    std::vector<dibs::BenchVideo> corpus;
    corpus.reserve(matrix_files.size());
    for (const auto& matrix_path : matrix_files) {
        std::string gt_path = matrix_path;
        gt_path.replace(gt_path.size() - 12, 12, ".gt.json");
        if (!fs::exists(gt_path)) {
            throw dibs::io::DataError("missing ground truth for " + matrix_path);
        }
        corpus.push_back({dibs::io::load_matrix(matrix_path),
                          dibs::io::load_boundaries(gt_path).set});
    }
    return corpus;
}

int cmd_bench(const BenchArgs& args) {
    Timer timer;
    dibs::BenchOptions options = args.options;
    options.drop = drop_config(args.drop_cost, args.drop_percentile);
    options.rule = args.one_to_one ? dibs::MatchRule::one_to_one : dibs::MatchRule::best_iou;

    std::vector<dibs::Arm> arms;
    for (const std::string& name : split_list(args.arms)) {
        arms.push_back(dibs::parse_arm(name));
    }
    if (arms.empty()) {
        throw CLI::ValidationError("bench", "--arms must name at least one arm");
    }

    const std::vector<dibs::BenchVideo> corpus = load_corpus(args.corpus_dir);
    const std::vector<dibs::ArmResult> results = dibs::benchmark(corpus, arms, options);

    std::cout << dibs::format_bench_table(results);
    json arr = json::array();
    for (const auto& r : results) {
        json j = dibs::io::report_to_json(dibs::arm_name(r.arm), r.report);
        j["failures"] = r.failures;
        arr.push_back(std::move(j));
    }
    if (!args.out.empty()) {
        dibs::io::write_text(args.out, arr.dump(2) + "\n");
        emit_manifest(args.out, "bench",
                      {{"arms", args.arms},
                       {"top-k", options.gen.top_k},
                       {"iterations", options.gen.iterations},
                       {"alpha", options.gen.alpha},
                       {"window-margin", options.gen.window_margin},
                       {"drop-percentile", args.drop_percentile},
                       {"merge-k", options.refine.merge_k},
                       {"stages", options.refine.stages},
                       {"proposals", options.refine.n_proposals},
                       {"jitter-center", options.refine.jitter_center},
                       {"jitter-duration", options.refine.jitter_duration},
                       {"queries", options.oracle_queries},
                       {"seed", options.refine.seed},
                       {"jobs", options.jobs},
                       {"one-to-one", args.one_to_one}},
                      {args.corpus_dir}, {args.out}, timer.seconds());
    } else {
        std::cout << arr.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string config_path;
    std::string matrix_path;
    std::vector<std::string> boundary_paths;
    std::string out;
};

int cmd_render(const RenderArgs& args) {
    Timer timer;
    const dibs::SimilarityMatrix s = dibs::io::load_matrix(args.matrix_path);
    std::vector<std::pair<std::string, dibs::BoundarySet>> overlays;
    for (const auto& path : args.boundary_paths) {
        dibs::io::BoundaryFile file = dibs::io::load_boundaries(path);
        overlays.emplace_back(fs::path(path).stem().string(), std::move(file.set));
    }
    dibs::io::write_text(args.out, dibs::io::render_svg(s, overlays));
    std::vector<std::string> inputs = {args.matrix_path};
    inputs.insert(inputs.end(), args.boundary_paths.begin(), args.boundary_paths.end());
    emit_manifest(args.out, "render", json::object(), inputs, {args.out}, timer.seconds());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-boundary generation, refinement, and evaluation for "
                 "caption-to-video alignment"};
    app.set_version_flag("--version", dibs::kVersion);
    app.require_subcommand(1);

    SimArgs sim_args;
    CLI::App* sim = app.add_subcommand(
        "sim", "Build a similarity matrix from embeddings, or average matrices");
    sim->add_option("inputs", sim_args.inputs, "embedding or matrix files")->required();
    sim->add_flag("--aggregate", sim_args.aggregate, "average matrix files entrywise");
    sim->add_option("--kinds", sim_args.kinds, "kinds of CSV inputs, e.g. frame,caption");
    sim->add_option("--model-id", sim_args.model_id, "model id for CSV embeddings");
    sim->add_option("--out", sim_args.out, "output matrix file")->required();
    sim->add_option("--config", sim_args.config_path, "key=value config file");

    SynthArgs synth_args;
    CLI::App* synth =
        app.add_subcommand("synth", "Generate a synthetic corpus with known ground truth");
    synth->add_option("--frames", synth_args.cfg.frame_count, "frames per video");
    synth->add_option("--events", synth_args.cfg.n_events, "events per video");
    synth->add_option("--peak-width", synth_args.cfg.peak_width, "response sigma in frames");
    synth->add_option("--distractors", synth_args.cfg.distractor_peaks,
                      "distractor peaks per caption");
    synth->add_option("--noise", synth_args.cfg.noise_sigma, "noise sigma");
    synth->add_option("--gt-jitter", synth_args.cfg.gt_jitter,
                      "ground-truth edge jitter fraction");
    synth->add_option("--peak-height", synth_args.cfg.peak_height, "response peak height");
    synth->add_option("--distractor-height", synth_args.cfg.distractor_height,
                      "distractor peak height");
    synth->add_option("--seed", synth_args.cfg.seed, "corpus seed");
    synth->add_option("--count", synth_args.count, "number of videos")
        ->check(CLI::PositiveNumber);
    synth->add_option("--jobs", synth_args.jobs, "parallel workers");
    synth->add_option("--out", synth_args.out_dir, "output directory")->required();
    synth->add_option("--config", synth_args.config_path, "key=value config file");

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "Generate pseudo boundaries from a matrix");
    gen->add_option("matrix", gen_args.matrix_path, "similarity matrix file")->required();
    gen->add_option("--method", gen_args.method,
                    "uniform | dropdtw | dibs | dibs-global");
    gen->add_option("--top-k", gen_args.gen.top_k, "frames kept per window");
    gen->add_option("--iterations", gen_args.gen.iterations, "search iterations");
    gen->add_option("--alpha", gen_args.gen.alpha, "coarse half-width multiplier");
    gen->add_option("--window-margin", gen_args.gen.window_margin,
                    "window expansion per side");
    gen->add_option("--drop-cost", gen_args.drop_cost, "fixed drop cost");
    gen->add_option("--drop-percentile", gen_args.drop_percentile,
                    "drop cost percentile of matrix entries");
    gen->add_flag("--disjoint", gen_args.disjoint, "clip overlaps at midpoints");
    gen->add_option("--video-id", gen_args.video_id, "override the output video id");
    gen->add_option("--out", gen_args.out, "output boundary file")->required();
    gen->add_option("--config", gen_args.config_path, "key=value config file");

    RefineArgs refine_args;
    CLI::App* refine = app.add_subcommand("refine", "Refine boundaries with jitter "
                                                    "proposals and a scorer");
    refine->add_option("boundaries", refine_args.boundaries_path, "boundary file")
        ->required();
    refine->add_option("--matrix", refine_args.matrix_path,
                       "similarity matrix for the oracle scorer");
    refine->add_option("--scores", refine_args.scores_path,
                       "externally computed query scores file");
    refine->add_option("--jitter-center", refine_args.cfg.jitter_center, "center ratio r2");
    refine->add_option("--jitter-duration", refine_args.cfg.jitter_duration,
                       "duration ratio r1");
    refine->add_option("--proposals", refine_args.cfg.n_proposals, "proposals per boundary");
    refine->add_option("--merge-k", refine_args.cfg.merge_k, "proposals merged");
    refine->add_option("--stages", refine_args.cfg.stages, "refinement stages");
    refine->add_option("--seed", refine_args.cfg.seed, "jitter seed");
    refine->add_option("--queries", refine_args.queries, "oracle query count");
    refine->add_flag("--debug-proposals", refine_args.debug_proposals,
                     "dump last-stage proposals per event");
    refine->add_option("--out", refine_args.out, "output boundary file")->required();
    refine->add_option("--config", refine_args.config_path, "key=value config file");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    eval->add_option("preds", eval_args.pred_dir, "directory of prediction files")
        ->required();
    eval->add_option("gts", eval_args.gt_dir, "directory of ground-truth files")
        ->required();
    eval->add_flag("--one-to-one", eval_args.one_to_one, "strict one-to-one matching");
    eval->add_option("--out", eval_args.out, "report JSON path");
    eval->add_option("--config", eval_args.config_path, "key=value config file");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Compare generation arms on a corpus");
    bench->add_option("corpus", bench_args.corpus_dir, "corpus directory from synth")
        ->required();
    bench->add_option("--arms", bench_args.arms, "comma-separated arm list");
    bench->add_option("--top-k", bench_args.options.gen.top_k, "frames kept per window");
    bench->add_option("--iterations", bench_args.options.gen.iterations,
                      "search iterations");
    bench->add_option("--alpha", bench_args.options.gen.alpha, "coarse half-width");
    bench->add_option("--window-margin", bench_args.options.gen.window_margin,
                      "window expansion per side");
    bench->add_option("--drop-cost", bench_args.drop_cost, "fixed drop cost");
    bench->add_option("--drop-percentile", bench_args.drop_percentile,
                      "drop cost percentile");
    bench->add_option("--jitter-center", bench_args.options.refine.jitter_center,
                      "refine center ratio r2");
    bench->add_option("--jitter-duration", bench_args.options.refine.jitter_duration,
                      "refine duration ratio r1");
    bench->add_option("--proposals", bench_args.options.refine.n_proposals,
                      "refine proposals per boundary");
    bench->add_option("--merge-k", bench_args.options.refine.merge_k, "proposals merged");
    bench->add_option("--stages", bench_args.options.refine.stages, "refinement stages");
    bench->add_option("--seed", bench_args.options.refine.seed, "refinement seed");
    bench->add_option("--queries", bench_args.options.oracle_queries, "oracle queries");
    bench->add_option("--jobs", bench_args.options.jobs, "parallel workers");
    bench->add_flag("--one-to-one", bench_args.one_to_one, "strict one-to-one matching");
    bench->add_option("--out", bench_args.out, "report JSON path");
    bench->add_option("--config", bench_args.config_path, "key=value config file");

    RenderArgs render_args;
    CLI::App* render = app.add_subcommand("render", "Render a matrix and boundary "
                                                    "overlays to SVG");
    render->add_option("matrix", render_args.matrix_path, "similarity matrix file")
        ->required();
    render->add_option("--boundaries", render_args.boundary_paths,
                       "boundary files to overlay");
    render->add_option("--out", render_args.out, "output SVG path")->required();
    render->add_option("--config", render_args.config_path, "key=value config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            apply_config_file(sim, sim_args.config_path);
            return cmd_sim(sim_args);
        }
        if (synth->parsed()) {
            apply_config_file(synth, synth_args.config_path);
            return cmd_synth(synth_args);
        }
        if (gen->parsed()) {
            apply_config_file(gen, gen_args.config_path);
            return cmd_gen(gen_args);
        }
        if (refine->parsed()) {
            apply_config_file(refine, refine_args.config_path);
            return cmd_refine(refine_args);
        }
        if (eval->parsed()) {
            apply_config_file(eval, eval_args.config_path);
            return cmd_eval(eval_args);
        }
        if (bench->parsed()) {
            apply_config_file(bench, bench_args.config_path);
            return cmd_bench(bench_args);
        }
        if (render->parsed()) {
            apply_config_file(render, render_args.config_path);
            return cmd_render(render_args);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dibs::io::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
