// passage_sieve - build a feature-annotated passage database, search it
// for passages similar to a gold passage, auto-calibrate the filter
// parameters, and run filtered-vs-dummy rating studies.
//
// Subcommands: build, stats, search, calibrate, trial, report.

#include "sieve/calibrate.hpp"
#include "sieve/corpus.hpp"
#include "sieve/eval.hpp"
#include "sieve/filter.hpp"
#include "sieve/hash.hpp"
#include "sieve/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sieve;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Shared knobs; a JSON config file (--config or $PASSAGE_SIEVE_CONFIG)
// supplies defaults, explicit flags win.
struct CommonOpts {
    std::string db_path;
    std::string lexicon_path;
    std::string gold_path;
    std::string params_path;
    std::string abbrev_path;
    std::string embeddings_path;
    std::string config_path;
    int target = 0;
    std::uint64_t seed = 0;
    std::size_t dim = BuiltinEncoder::kDefaultDim;
    int workers = 1;
    bool sort_by_sim = false;
    bool exclude_refs = false;
    bool include_level_c = false;
    bool as_json = false;
};

void add_config_flag(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file with flag defaults");
}

void apply_config(CLI::App* cmd, CommonOpts& o) {
    std::string path = o.config_path;
    if (path.empty()) {
        const char* env = std::getenv("PASSAGE_SIEVE_CONFIG");
        if (env && *env)
            path = env;
    }
    if (path.empty())
        return;
    json cfg;
    try {
        cfg = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(path + ": malformed JSON: " + e.what());
    }
    auto missing = [&](const char* flag) {
        CLI::Option* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() == 0;
    };
    try {
        if (cfg.contains("db") && missing("--db"))
            o.db_path = cfg["db"].get<std::string>();
        if (cfg.contains("lexicon") && missing("--lexicon"))
            o.lexicon_path = cfg["lexicon"].get<std::string>();
        if (cfg.contains("params") && missing("--params"))
            o.params_path = cfg["params"].get<std::string>();
        if (cfg.contains("abbrev") && missing("--abbrev"))
            o.abbrev_path = cfg["abbrev"].get<std::string>();
        if (cfg.contains("embeddings") && missing("--embeddings"))
            o.embeddings_path = cfg["embeddings"].get<std::string>();
        if (cfg.contains("target") && missing("--target"))
            o.target = cfg["target"].get<int>();
        if (cfg.contains("seed") && missing("--seed"))
            o.seed = cfg["seed"].get<std::uint64_t>();
        if (cfg.contains("dim") && missing("--dim"))
            o.dim = cfg["dim"].get<std::size_t>();
        if (cfg.contains("workers") && missing("--workers"))
            o.workers = cfg["workers"].get<int>();
        if (cfg.contains("sort_by_sim") && missing("--sort-by-sim"))
            o.sort_by_sim = cfg["sort_by_sim"].get<bool>();
        if (cfg.contains("exclude_external_refs") && missing("--exclude-external-refs"))
            o.exclude_refs = cfg["exclude_external_refs"].get<bool>();
        if (cfg.contains("include_level_c") && missing("--include-level-c"))
            o.include_level_c = cfg["include_level_c"].get<bool>();
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

// validated after the config overlay, so either a flag or a config key works
void need(const std::string& value, const char* flag) {
    if (value.empty())
        throw Error(std::string(flag) + " is required (flag or config file)");
}

SegmentOptions segment_options(const CommonOpts& o) {
    if (o.abbrev_path.empty())
        return SegmentOptions{};
    return load_abbreviations(o.abbrev_path);
}

// The gold file is one passage: the whole file is normalized, short
// sentences are dropped and the remainder reassembled, exactly like a
// database paragraph.
Passage load_gold(const std::string& path, const SegmentOptions& seg) {
    std::string text = preprocess_passage(read_file(path), seg);
    if (text.empty())
        throw Error("gold passage is empty or under " + std::to_string(kMinPassageChars) +
                    " characters after preprocessing: " + path);
    Passage gold;
    gold.text = text;
    gold.id = "gold:" + hex64(fnv1a64(text)); // distinct namespace: a database twin stays eligible
    gold.source = path;
    return gold;
}

// Attach gold features using the database's lexicon and encoder. For an
// externally encoded database the gold vector comes from a JSONL sidecar
// (--embeddings) under the id "gold".
void extract_gold(Passage& gold, const PassageDatabase& db, const Lexicon& lexicon,
                  const CommonOpts& o, const SegmentOptions& seg) {
    if (!db.lexicon_id.empty() && lexicon.id() != db.lexicon_id)
        throw Error("lexicon mismatch: database was built with " + db.lexicon_id +
                    ", this file is " + lexicon.id());
    DifficultyOptions diff{o.include_level_c};
    std::size_t builtin_dim = BuiltinEncoder::parse_dim(db.encoder_id);
    if (builtin_dim != 0) {
        BuiltinEncoder encoder(builtin_dim);
        gold.features = extract_features(gold.text, lexicon, encoder, seg, diff);
        return;
    }
    if (o.embeddings_path.empty())
        throw Error("database uses encoder '" + db.encoder_id +
                    "'; supply the gold vector via --embeddings (JSONL line with id \"gold\")");
    FeatureVector f;
    SurfaceFeatures surface = surface_features(gold.text, seg);
    f.n_sent = surface.n_sent;
    f.n_word = surface.n_word;
    f.n_char = surface.n_char;
    f.wps = surface.wps;
    DifficultyFeatures d = difficulty_features(lexicon, tokenize_words(gold.text), diff);
    f.h_diff = d.h_diff;
    f.hpw = d.hpw;
    f.n_diff = d.n_diff;
    gold.features = std::move(f);
    std::ifstream in(o.embeddings_path, std::ios::binary);
    if (!in)
        throw Error("cannot open embeddings: " + o.embeddings_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(o.embeddings_path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (j.value("id", "") == "gold") {
            gold.features->embedding =
                EmbeddingVector{j.at("vector").get<std::vector<double>>(), db.encoder_id};
            return;
        }
    }
    throw Error(o.embeddings_path + ": no line with id \"gold\"");
}

FilterParams params_for_search(const PassageDatabase& db, const Passage& gold,
                               const CommonOpts& o, CalibrationResult* calibration) {
    if (!o.params_path.empty() && o.target > 0)
        throw Error("give either --params or --target, not both");
    if (!o.params_path.empty())
        return load_filter_params(o.params_path);
    if (o.target > 0) {
        CalibrationSpec spec;
        spec.target_count = o.target;
        spec.bounds = default_bounds(db);
        CalibrationResult result = calibrate(db, gold, spec, o.workers);
        if (calibration)
            *calibration = result;
        return result.params;
    }
    throw Error("one of --params or --target is required");
}

std::string excerpt(const std::string& text, std::size_t max_chars = 60) {
    std::size_t count = 0, pos = 0;
    while (pos < text.size() && count < max_chars) {
        utf8_next(text, pos);
        ++count;
    }
    if (pos >= text.size())
        return text;
    return text.substr(0, pos) + "...";
}

json trace_to_json(const FilterTrace& trace) {
    json stages = json::array();
    for (const auto& s : trace.stages)
        stages.push_back(json{{"name", s.name}, {"in", s.input}, {"out", s.output}});
    return stages;
}

void print_trace(const FilterTrace& trace) {
    std::printf("%-10s %8s %8s\n", "stage", "in", "out");
    for (const auto& s : trace.stages)
        std::printf("%-10s %8zu %8zu\n", s.name.c_str(), s.input, s.output);
}

// ---- subcommands ----

int cmd_build(const CommonOpts& o, const std::string& input_dir) {
    need(o.lexicon_path, "--lexicon");
    need(o.db_path, "--db");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw Error("no documents: no .txt files in " + input_dir);

    std::vector<RawDocument> docs;
    for (const auto& f : files)
        docs.push_back(RawDocument{f.filename().string(), read_file(f.string())});

    IngestOptions ingest_opts;
    ingest_opts.segment = segment_options(o);
    ingest_opts.exclude_external_refs = o.exclude_refs;
    IngestStats stats;
    PassageDatabase db = ingest(docs, ingest_opts, &stats);

    Lexicon lexicon = Lexicon::load(o.lexicon_path);
    ExtractOptions ex;
    ex.segment = ingest_opts.segment;
    ex.difficulty.include_level_c = o.include_level_c;
    ex.workers = o.workers;
    BuiltinEncoder encoder(o.dim);
    extract_all(db, lexicon, encoder, ex);
    if (!o.embeddings_path.empty())
        import_embeddings(db, o.embeddings_path);
    save_database(db, o.db_path);

    std::printf("documents          %6d\n", stats.documents);
    std::printf("paragraphs         %6d\n", stats.paragraphs);
    std::printf("sentences          %6d  (dropped %d)\n", stats.sentences_seen,
                stats.sentences_dropped);
    std::printf("dropped short      %6d\n", stats.passages_dropped_short);
    std::printf("dropped refs       %6d\n", stats.passages_dropped_refs);
    std::printf("dropped duplicate  %6d\n", stats.duplicates_dropped);
    std::printf("passages kept      %6d\n", stats.passages_kept);
    std::printf("database           %s  (lexicon %s, encoder %s)\n", o.db_path.c_str(),
                db.lexicon_id.c_str(), db.encoder_id.c_str());
    return 0;
}

int cmd_stats(const CommonOpts& o) {
    need(o.db_path, "--db");
    PassageDatabase db = load_database(o.db_path);
    CorpusStats stats = compute_stats(db);
    if (o.as_json) {
        auto row = [](const StatRow& r) {
            return json{{"total", r.total}, {"mean", r.mean}, {"max", r.q4}, {"q3", r.q3},
                        {"median", r.q2},   {"q1", r.q1},     {"min", r.q0}};
        };
        json j{{"n_instances", stats.n_instances},
               {"n_sent", row(stats.sent)},
               {"n_word", row(stats.word)},
               {"n_char", row(stats.chars)},
               {"n_diff", row(stats.diff)}};
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::fputs(format_stats_grid(stats).c_str(), stdout);
    }
    return 0;
}

int cmd_search(const CommonOpts& o) {
    need(o.db_path, "--db");
    need(o.lexicon_path, "--lexicon");
    need(o.gold_path, "--gold");
    PassageDatabase db = load_database(o.db_path);
    Lexicon lexicon = Lexicon::load(o.lexicon_path);
    SegmentOptions seg = segment_options(o);
    Passage gold = load_gold(o.gold_path, seg);
    extract_gold(gold, db, lexicon, o, seg);

    CalibrationResult calibration;
    bool calibrated = o.target > 0;
    FilterParams params = params_for_search(db, gold, o, &calibration);
    PipelineResult result = run_pipeline(db, gold, params, o.workers);

    std::vector<std::pair<double, const Passage*>> listing;
    for (const auto& c : result.candidates)
        listing.emplace_back(cosine_similarity(gold.features->embedding, c.features->embedding),
                             &c);
    if (o.sort_by_sim)
        std::stable_sort(listing.begin(), listing.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });

    if (o.as_json) {
        json candidates = json::array();
        for (const auto& [sim, p] : listing)
            candidates.push_back(json{{"id", p->id},
                                      {"source", p->source},
                                      {"similarity", sim},
                                      {"text", p->text}});
        json j{{"gold_id", gold.id},
               {"params", json::parse(filter_params_to_json(params))},
               {"trace", trace_to_json(result.trace)},
               {"candidates", candidates}};
        if (calibrated)
            j["calibration"] = json{{"achieved_count", calibration.achieved_count},
                                    {"exact", calibration.exact},
                                    {"evals_used", calibration.evals_used},
                                    {"t", calibration.t}};
        std::printf("%s\n", j.dump(2).c_str());
        return 0;
    }

    std::printf("gold %s  (%d sentences, %d words)\n", gold.id.c_str(), gold.features->n_sent,
                gold.features->n_word);
    if (calibrated)
        std::printf("calibrated to %d candidates (target %d, %s, %d evals)\n",
                    calibration.achieved_count, o.target,
                    calibration.exact ? "exact" : "nearest", calibration.evals_used);
    std::printf("params %s\n", filter_params_to_json(params).c_str());
    print_trace(result.trace);
    std::printf("candidates: %zu\n", listing.size());
    for (const auto& [sim, p] : listing)
        std::printf("  %-18s sim=%.4f  %s\n", p->id.c_str(), sim, excerpt(p->text).c_str());
    return 0;
}

int cmd_calibrate(const CommonOpts& o, const std::string& spec_path, int max_evals) {
    need(o.db_path, "--db");
    need(o.lexicon_path, "--lexicon");
    need(o.gold_path, "--gold");
    PassageDatabase db = load_database(o.db_path);
    Lexicon lexicon = Lexicon::load(o.lexicon_path);
    SegmentOptions seg = segment_options(o);
    Passage gold = load_gold(o.gold_path, seg);
    extract_gold(gold, db, lexicon, o, seg);

    CalibrationSpec spec;
    spec.bounds = default_bounds(db);
    spec.max_evals = max_evals;
    if (!spec_path.empty())
        spec = load_calibration_spec(spec_path, spec);
    if (o.target > 0)
        spec.target_count = o.target;

    CalibrationResult result = calibrate(db, gold, spec, o.workers);
    if (o.as_json) {
        json j{{"params", json::parse(filter_params_to_json(result.params))},
               {"achieved_count", result.achieved_count},
               {"target_count", spec.target_count},
               {"exact", result.exact},
               {"evals_used", result.evals_used},
               {"t", result.t}};
        if (result.count_below >= 0)
            j["count_below"] = result.count_below;
        if (result.count_above >= 0)
            j["count_above"] = result.count_above;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("target %d -> achieved %d (%s) at t=%.4f after %d evaluations\n",
                    spec.target_count, result.achieved_count, result.exact ? "exact" : "nearest",
                    result.t, result.evals_used);
        if (!result.exact && result.count_below >= 0 && result.count_above >= 0)
            std::printf("nearest achievable counts: %d below, %d above\n", result.count_below,
                        result.count_above);
        std::printf("params %s\n", filter_params_to_json(result.params).c_str());
    }
    return 0;
}

int cmd_trial(const CommonOpts& o, const std::string& out_prefix, int count) {
    need(o.db_path, "--db");
    need(o.lexicon_path, "--lexicon");
    need(o.gold_path, "--gold");
    PassageDatabase db = load_database(o.db_path);
    Lexicon lexicon = Lexicon::load(o.lexicon_path);
    SegmentOptions seg = segment_options(o);
    Passage gold = load_gold(o.gold_path, seg);
    extract_gold(gold, db, lexicon, o, seg);

    FilterParams params = params_for_search(db, gold, o, nullptr);
    TrialOptions topts;
    topts.target_count = count;
    topts.sort_by_sim = o.sort_by_sim;
    topts.workers = o.workers;
    TrialSheet trial = make_trial(db, gold, params, o.seed, topts);

    std::string trial_path = out_prefix + ".trial.json";
    std::string packet_path = out_prefix + ".packet.csv";
    save_trial(trial, trial_path);
    export_trial(trial, db, packet_path);
    std::printf("gold %s  seed %llu  entries %zu\n", trial.gold_id.c_str(),
                static_cast<unsigned long long>(trial.shuffle_seed), trial.entries.size());
    std::printf("trial  %s\n", trial_path.c_str());
    std::printf("packet %s\n", packet_path.c_str());
    return 0;
}

int cmd_report(const CommonOpts& o, const std::vector<std::string>& trial_paths,
               const std::vector<std::string>& score_paths) {
    need(o.db_path, "--db");
    PassageDatabase db = load_database(o.db_path);
    std::vector<TrialSheet> trials;
    for (const auto& path : trial_paths)
        trials.push_back(load_trial(path));
    std::vector<ScoreSheet> sheets;
    for (const auto& path : score_paths)
        for (auto& sheet : import_scores(path))
            sheets.push_back(std::move(sheet));
    TrialReport report = build_report(trials, sheets, db);
    if (o.as_json)
        std::printf("%s\n", report_to_json(report).c_str());
    else
        std::fputs(format_report(report).c_str(), stdout);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"passage similarity search over a feature-annotated passage database"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string input_dir, out_prefix, spec_path;
    std::vector<std::string> trial_paths, score_paths;
    int trial_count = 5;
    int max_evals = 100;

    CLI::App* build = app.add_subcommand("build", "ingest documents and build a database");
    build->add_option("--input", input_dir, "directory of UTF-8 .txt documents")->required();
    build->add_option("--lexicon", o.lexicon_path, "difficulty lexicon TSV");
    build->add_option("--db", o.db_path, "output database JSONL");
    build->add_option("--abbrev", o.abbrev_path, "abbreviation list, one entry per line");
    build->add_option("--embeddings", o.embeddings_path, "external embedding JSONL to attach");
    build->add_option("--dim", o.dim, "built-in encoder dimension (default 384)");
    build->add_option("--workers", o.workers, "extraction worker threads");
    build->add_flag("--exclude-external-refs", o.exclude_refs,
                    "drop passages mentioning Table/Figure");
    build->add_flag("--include-level-c", o.include_level_c,
                    "count level C words as difficult");
    add_config_flag(build, o);

    CLI::App* stats = app.add_subcommand("stats", "print database statistics");
    stats->add_option("--db", o.db_path, "database JSONL");
    stats->add_flag("--json", o.as_json, "machine-readable output");
    add_config_flag(stats, o);

    CLI::App* search = app.add_subcommand("search", "find passages similar to a gold passage");
    search->add_option("--db", o.db_path, "database JSONL");
    search->add_option("--lexicon", o.lexicon_path, "difficulty lexicon TSV");
    search->add_option("--gold", o.gold_path, "gold passage text file");
    search->add_option("--params", o.params_path, "filter parameters JSON");
    search->add_option("--target", o.target, "calibrate to this candidate count");
    search->add_option("--abbrev", o.abbrev_path, "abbreviation list");
    search->add_option("--embeddings", o.embeddings_path, "gold vector JSONL (external encoder)");
    search->add_option("--workers", o.workers, "pipeline worker threads");
    search->add_flag("--sort-by-sim", o.sort_by_sim, "list candidates by descending similarity");
    search->add_flag("--include-level-c", o.include_level_c,
                     "count level C words as difficult");
    search->add_flag("--json", o.as_json, "machine-readable output");
    add_config_flag(search, o);

    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "find parameters that hit a candidate count");
    calibrate_cmd->add_option("--db", o.db_path, "database JSONL");
    calibrate_cmd->add_option("--lexicon", o.lexicon_path, "difficulty lexicon TSV");
    calibrate_cmd->add_option("--gold", o.gold_path, "gold passage text file");
    calibrate_cmd->add_option("--target", o.target, "desired candidate count");
    calibrate_cmd->add_option("--spec", spec_path, "calibration spec JSON");
    calibrate_cmd->add_option("--max-evals", max_evals, "pipeline evaluation budget");
    calibrate_cmd->add_option("--abbrev", o.abbrev_path, "abbreviation list");
    calibrate_cmd->add_option("--embeddings", o.embeddings_path,
                              "gold vector JSONL (external encoder)");
    calibrate_cmd->add_option("--workers", o.workers, "pipeline worker threads");
    calibrate_cmd->add_flag("--include-level-c", o.include_level_c,
                            "count level C words as difficult");
    calibrate_cmd->add_flag("--json", o.as_json, "machine-readable output");
    add_config_flag(calibrate_cmd, o);

    CLI::App* trial = app.add_subcommand("trial", "build an anonymized rating packet");
    trial->add_option("--db", o.db_path, "database JSONL");
    trial->add_option("--lexicon", o.lexicon_path, "difficulty lexicon TSV");
    trial->add_option("--gold", o.gold_path, "gold passage text file");
    trial->add_option("--params", o.params_path, "filter parameters JSON");
    trial->add_option("--target", o.target, "calibrate to this candidate count");
    trial->add_option("--seed", o.seed, "shuffle seed");
    trial->add_option("--out", out_prefix, "output prefix (.trial.json / .packet.csv)")
        ->required();
    trial->add_option("--count", trial_count, "filtered/dummy entries per side (default 5)");
    trial->add_option("--abbrev", o.abbrev_path, "abbreviation list");
    trial->add_option("--embeddings", o.embeddings_path,
                      "gold vector JSONL (external encoder)");
    trial->add_option("--workers", o.workers, "pipeline worker threads");
    trial->add_flag("--sort-by-sim", o.sort_by_sim, "take the most similar candidates");
    trial->add_flag("--include-level-c", o.include_level_c,
                    "count level C words as difficult");
    add_config_flag(trial, o);

    CLI::App* report = app.add_subcommand("report", "aggregate filled score sheets");
    report->add_option("--db", o.db_path, "database JSONL");
    report->add_option("--trial", trial_paths, "trial JSON files")->required();
    report->add_option("--scores", score_paths, "filled packet CSV files")->required();
    report->add_flag("--json", o.as_json, "machine-readable output");
    add_config_flag(report, o);

    CLI11_PARSE(app, argc, argv);

    // a calibration target doubles as the trial size unless --count says otherwise
    if (trial->parsed() && trial->get_option("--count")->count() == 0 && o.target > 0)
        trial_count = o.target;

    try {
        CLI::App* active = app.get_subcommands().front();
        apply_config(active, o);
        if (build->parsed())
            return cmd_build(o, input_dir);
        if (stats->parsed())
            return cmd_stats(o);
        if (search->parsed())
            return cmd_search(o);
        if (calibrate_cmd->parsed())
            return cmd_calibrate(o, spec_path, max_evals);
        if (trial->parsed())
            return cmd_trial(o, out_prefix, trial_count);
        if (report->parsed())
            return cmd_report(o, trial_paths, score_paths);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
