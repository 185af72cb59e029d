#include "sieve/corpus.hpp"

#include "sieve/error.hpp"
#include "sieve/hash.hpp"
#include "sieve/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

using nlohmann::json;

namespace sieve {

const Passage* PassageDatabase::find(std::string_view id) const {
    for (const auto& p : passages)
        if (p.id == id)
            return &p;
    return nullptr;
}

std::vector<std::string> drop_short_sentences(const std::vector<std::string>& sentences) {
    std::vector<std::string> kept;
    kept.reserve(sentences.size());
    for (const auto& s : sentences)
        if (utf8_length(s) >= kMinSentenceChars)
            kept.push_back(s);
    return kept;
}

std::vector<std::string> drop_short_passages(const std::vector<std::string>& passages) {
    std::vector<std::string> kept;
    kept.reserve(passages.size());
    for (const auto& p : passages)
        if (utf8_length(p) >= kMinPassageChars)
            kept.push_back(p);
    return kept;
}

namespace {

bool ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i)
            out.push_back(' ');
        out += sentences[i];
    }
    return out;
}

std::string passage_id(std::string_view text) {
    return "p" + hex64(fnv1a64(text));
}

std::vector<std::string> split_paragraphs(std::string_view text) {
    std::vector<std::string> paragraphs;
    std::string current;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        bool blank = true;
        for (char c : line)
            if (!is_space(c)) {
                blank = false;
                break;
            }
        if (blank) {
            if (!current.empty()) {
                paragraphs.push_back(std::move(current));
                current.clear();
            }
        } else {
            if (!current.empty())
                current.push_back('\n');
            current.append(line);
        }
        if (eol == std::string_view::npos)
            break;
        pos = eol + 1;
    }
    if (!current.empty())
        paragraphs.push_back(std::move(current));
    return paragraphs;
}

} // namespace

ReferenceScan detect_external_refs(std::string_view text, const std::vector<std::string>& markers) {
    std::vector<std::pair<std::size_t, const std::string*>> hits;
    for (const auto& marker : markers) {
        if (marker.empty())
            continue;
        std::size_t pos = 0;
        while ((pos = text.find(marker, pos)) != std::string_view::npos) {
            bool left_ok = pos == 0 || !ascii_alnum(text[pos - 1]);
            std::size_t end = pos + marker.size();
            bool right_ok = end == text.size() || !ascii_alnum(text[end]);
            if (left_ok && right_ok)
                hits.emplace_back(pos, &marker);
            pos = end;
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ReferenceScan scan;
    for (const auto& [pos, marker] : hits) {
        if (std::find(scan.matches.begin(), scan.matches.end(), *marker) == scan.matches.end())
            scan.matches.push_back(*marker);
    }
    scan.found = !scan.matches.empty();
    return scan;
}

std::string preprocess_passage(std::string_view raw, const SegmentOptions& opts) {
    std::string normalized = normalize_whitespace(raw);
    if (normalized.empty())
        return normalized;
    std::vector<std::string> kept = drop_short_sentences(split_sentences(normalized, opts));
    std::string text = join_sentences(kept);
    if (utf8_length(text) < kMinPassageChars)
        return std::string();
    return text;
}

PassageDatabase ingest(const std::vector<RawDocument>& documents, const IngestOptions& opts,
                       IngestStats* stats) {
    IngestStats local;
    PassageDatabase db;
    std::map<std::string, std::size_t> by_id;
    for (const auto& doc : documents) {
        ++local.documents;
        for (const auto& paragraph : split_paragraphs(doc.text)) {
            ++local.paragraphs;
            std::string normalized = normalize_whitespace(paragraph);
            std::vector<std::string> sentences = split_sentences(normalized, opts.segment);
            std::vector<std::string> kept = drop_short_sentences(sentences);
            local.sentences_seen += static_cast<int>(sentences.size());
            local.sentences_dropped += static_cast<int>(sentences.size() - kept.size());
            std::string text = join_sentences(kept);
            if (utf8_length(text) < kMinPassageChars) {
                ++local.passages_dropped_short;
                continue;
            }
            if (opts.exclude_external_refs && detect_external_refs(text, opts.ref_markers).found) {
                ++local.passages_dropped_refs;
                continue;
            }
            std::string id = passage_id(text);
            auto it = by_id.find(id);
            if (it != by_id.end()) {
                if (db.passages[it->second].text == text) {
                    ++local.duplicates_dropped;
                    continue;
                }
                // hash collision on different text: disambiguate deterministically
                int suffix = 1;
                std::string candidate;
                do {
                    candidate = id + "-" + std::to_string(suffix++);
                } while (by_id.count(candidate));
                id = candidate;
            }
            by_id.emplace(id, db.passages.size());
            db.passages.push_back(Passage{std::move(id), std::move(text), doc.source, {}});
            ++local.passages_kept;
        }
    }
    if (stats)
        *stats = local;
    return db;
}

FeatureVector extract_features(std::string_view text, const Lexicon& lexicon,
                               const Encoder& encoder, const SegmentOptions& seg,
                               const DifficultyOptions& diff) {
    FeatureVector f;
    SurfaceFeatures surface = surface_features(text, seg);
    f.n_sent = surface.n_sent;
    f.n_word = surface.n_word;
    f.n_char = surface.n_char;
    f.wps = surface.wps;
    DifficultyFeatures d = difficulty_features(lexicon, tokenize_words(text), diff);
    f.h_diff = d.h_diff;
    f.hpw = d.hpw;
    f.n_diff = d.n_diff;
    f.embedding = encoder.encode(text);
    return f;
}

void extract_all(PassageDatabase& db, const Lexicon& lexicon, const Encoder& encoder,
                 const ExtractOptions& opts) {
    const std::size_t n = db.passages.size();
    const int workers = std::max(1, opts.workers);
    std::vector<std::optional<FeatureVector>> results(n);
    std::vector<std::string> errors(n);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                results[i] = extract_features(db.passages[i].text, lexicon, encoder,
                                              opts.segment, opts.difficulty);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    if (workers == 1 || n < 2) {
        work(0, n);
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
            std::size_t end = std::min(n, begin + chunk);
            if (begin < end)
                threads.emplace_back(work, begin, end);
        }
        for (auto& t : threads)
            t.join();
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!errors[i].empty())
            throw Error("passage " + db.passages[i].id + ": " + errors[i]);
    for (std::size_t i = 0; i < n; ++i)
        db.passages[i].features = std::move(results[i]);
    db.lexicon_id = lexicon.id();
    db.encoder_id = encoder.id();
}

namespace {

// Linear interpolation between closest ranks (the inclusive method).
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    double h = static_cast<double>(n - 1) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n)
        return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

StatRow stat_row(std::vector<double> values) {
    StatRow row;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    row.total = static_cast<long long>(std::llround(sum));
    row.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    row.q0 = values.front();
    row.q1 = quantile_sorted(values, 0.25);
    row.q2 = quantile_sorted(values, 0.50);
    row.q3 = quantile_sorted(values, 0.75);
    row.q4 = values.back();
    return row;
}

std::string fmt_stat(double v) {
    char buf[32];
    if (std::fabs(v - std::round(v)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    else
        std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

} // namespace

CorpusStats compute_stats(const PassageDatabase& db) {
    if (db.empty())
        throw Error("empty database");
    std::vector<double> sent, word, chars, diff;
    for (const auto& p : db.passages) {
        if (!p.features)
            throw Error("passage " + p.id + " has no features; run extraction first");
        sent.push_back(p.features->n_sent);
        word.push_back(p.features->n_word);
        chars.push_back(p.features->n_char);
        diff.push_back(p.features->n_diff);
    }
    CorpusStats stats;
    stats.n_instances = static_cast<long long>(db.size());
    stats.sent = stat_row(std::move(sent));
    stats.word = stat_row(std::move(word));
    stats.chars = stat_row(std::move(chars));
    stats.diff = stat_row(std::move(diff));
    return stats;
}

std::string format_stats_grid(const CorpusStats& stats) {
    const StatRow* rows[4] = {&stats.sent, &stats.word, &stats.chars, &stats.diff};
    auto line = [&](const char* label, const std::string& inst, auto field) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-12s %10s", label, inst.c_str());
        std::string out = buf;
        for (const StatRow* row : rows) {
            std::snprintf(buf, sizeof(buf), " %10s", fmt_stat(field(*row)).c_str());
            out += buf;
        }
        out.push_back('\n');
        return out;
    };
    char header[128];
    std::snprintf(header, sizeof(header), "%-12s %10s %10s %10s %10s %10s\n", "Properties",
                  "#Instance", "#Sent", "#Word", "#Char", "#Diff");
    std::string out = header;
    out += line("total", std::to_string(stats.n_instances),
                [](const StatRow& r) { return static_cast<double>(r.total); });
    out += line("mean", "N/A", [](const StatRow& r) { return r.mean; });
    out += line("Q4 (max)", "N/A", [](const StatRow& r) { return r.q4; });
    out += line("Q3", "N/A", [](const StatRow& r) { return r.q3; });
    out += line("Q2 (median)", "N/A", [](const StatRow& r) { return r.q2; });
    out += line("Q1", "N/A", [](const StatRow& r) { return r.q1; });
    out += line("min", "N/A", [](const StatRow& r) { return r.q0; });
    return out;
}

namespace {

json features_to_json(const FeatureVector& f) {
    return json{{"n_sent", f.n_sent},   {"n_word", f.n_word}, {"n_char", f.n_char},
                {"wps", f.wps},         {"h_diff", f.h_diff}, {"hpw", f.hpw},
                {"n_diff", f.n_diff},   {"embedding", f.embedding.values}};
}

FeatureVector features_from_json(const json& j, const std::string& encoder_id) {
    FeatureVector f;
    f.n_sent = j.at("n_sent").get<int>();
    f.n_word = j.at("n_word").get<int>();
    f.n_char = j.at("n_char").get<int>();
    f.wps = j.at("wps").get<double>();
    f.h_diff = j.at("h_diff").get<int>();
    f.hpw = j.at("hpw").get<double>();
    f.n_diff = j.at("n_diff").get<int>();
    f.embedding.values = j.at("embedding").get<std::vector<double>>();
    f.embedding.encoder_id = encoder_id;
    return f;
}

} // namespace

void save_database(const PassageDatabase& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write database: " + path);
    json header{{"format_version", kDatabaseFormatVersion},
                {"lexicon_id", db.lexicon_id},
                {"encoder_id", db.encoder_id}};
    out << header.dump() << '\n';
    for (const auto& p : db.passages) {
        json line{{"id", p.id}, {"text", p.text}, {"source", p.source}};
        if (p.features)
            line["features"] = features_to_json(*p.features);
        out << line.dump() << '\n';
    }
    if (!out)
        throw Error("write failed: " + path);
}

PassageDatabase load_database(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open database: " + path);
    PassageDatabase db;
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
            throw Error(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        try {
            if (line_no == 1) {
                int version = j.at("format_version").get<int>();
                if (version != kDatabaseFormatVersion)
                    throw Error(path + ": unsupported format_version " +
                                std::to_string(version) + " (expected " +
                                std::to_string(kDatabaseFormatVersion) + ")");
                db.lexicon_id = j.at("lexicon_id").get<std::string>();
                db.encoder_id = j.at("encoder_id").get<std::string>();
                continue;
            }
            Passage p;
            p.id = j.at("id").get<std::string>();
            p.text = j.at("text").get<std::string>();
            p.source = j.at("source").get<std::string>();
            if (j.contains("features"))
                p.features = features_from_json(j.at("features"), db.encoder_id);
            db.passages.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (line_no == 0)
        throw Error(path + ": empty database file (missing header)");
    return db;
}

void import_embeddings(PassageDatabase& db, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open embeddings: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    const std::string encoder_id = "external:" + hex64(fnv1a64(content));

    std::map<std::string, std::vector<double>> vectors;
    std::vector<std::string> duplicate_ids, bad_dims;
    std::size_t dim = 0;
    std::istringstream lines(content);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        std::string id;
        std::vector<double> vec;
        try {
            id = j.at("id").get<std::string>();
            vec = j.at("vector").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (vectors.empty() && duplicate_ids.empty())
            dim = vec.size();
        if (vec.size() != dim)
            bad_dims.push_back(id);
        if (!vectors.emplace(id, std::move(vec)).second)
            duplicate_ids.push_back(id);
    }

    std::vector<std::string> missing_ids;
    for (const auto& p : db.passages)
        if (!vectors.count(p.id))
            missing_ids.push_back(p.id);

    auto list = [](const std::vector<std::string>& ids) {
        std::string out;
        for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
            if (i)
                out += ", ";
            out += ids[i];
        }
        if (ids.size() > 10)
            out += ", ...";
        return out;
    };
    if (!duplicate_ids.empty())
        throw Error(path + ": duplicate ids: " + list(duplicate_ids));
    if (!bad_dims.empty())
        throw Error(path + ": vector length mismatch (expected " + std::to_string(dim) +
                    ") for: " + list(bad_dims));
    if (!missing_ids.empty())
        throw Error(path + ": no vector for ids: " + list(missing_ids));
    if (dim == 0)
        throw Error(path + ": vectors are empty");

    for (auto& p : db.passages) {
        if (!p.features)
            throw Error("passage " + p.id + " has no features; run extraction first");
        p.features->embedding = EmbeddingVector{vectors.at(p.id), encoder_id};
    }
    db.encoder_id = encoder_id;
}

} // namespace sieve
