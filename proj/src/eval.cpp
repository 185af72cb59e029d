#include "sieve/eval.hpp"

#include "sieve/csv.hpp"
#include "sieve/error.hpp"
#include "sieve/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

using nlohmann::json;

namespace sieve {

const char* const kRaterQuestion = "Is the candidate instance suitable as a CSAT reading passage?";

const std::vector<std::string> kNumericFeatures = {"n_sent", "n_word", "n_char", "wps",
                                                   "h_diff", "hpw",    "n_diff"};

namespace {

double feature_value(const FeatureVector& f, const std::string& name) {
    if (name == "n_sent")
        return f.n_sent;
    if (name == "n_word")
        return f.n_word;
    if (name == "n_char")
        return f.n_char;
    if (name == "wps")
        return f.wps;
    if (name == "h_diff")
        return f.h_diff;
    if (name == "hpw")
        return f.hpw;
    if (name == "n_diff")
        return f.n_diff;
    throw Error("unknown feature: " + name);
}

} // namespace

TrialSheet make_trial(const PassageDatabase& db, const Passage& gold, const FilterParams& params,
                      std::uint64_t seed, const TrialOptions& opts) {
    if (opts.target_count <= 0)
        throw Error("target_count must be positive");
    const std::size_t k = static_cast<std::size_t>(opts.target_count);

    PipelineResult piped = run_pipeline(db, gold, params, opts.workers);
    std::vector<Passage>& candidates = piped.candidates;
    if (candidates.size() < k)
        throw Error("pipeline yielded " + std::to_string(candidates.size()) +
                    " candidates but the trial needs " + std::to_string(k) +
                    "; loosen the parameters or run calibrate");
    if (opts.sort_by_sim) {
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i)
            order.emplace_back(
                cosine_similarity(gold.features->embedding, candidates[i].features->embedding),
                i);
        std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first > b.first; // ties keep database order
        });
        std::vector<Passage> sorted;
        sorted.reserve(candidates.size());
        for (const auto& [sim, idx] : order)
            sorted.push_back(std::move(candidates[idx]));
        candidates = std::move(sorted);
    }

    std::set<std::string> filtered_ids;
    TrialSheet trial;
    trial.gold_id = gold.id;
    trial.gold_text = gold.text;
    trial.shuffle_seed = seed;
    trial.target_count = opts.target_count;
    for (std::size_t i = 0; i < k; ++i) {
        trial.entries.push_back(TrialEntry{"", candidates[i].id, Origin::filtered});
        filtered_ids.insert(candidates[i].id);
    }

    std::vector<std::string> pool;
    for (const auto& p : db.passages)
        if (p.id != gold.id && !filtered_ids.count(p.id))
            pool.push_back(p.id);
    if (pool.size() < k)
        throw Error("database too small: only " + std::to_string(pool.size()) +
                    " passages left for " + std::to_string(k) + " dummies");

    DetRng rng(seed);
    for (std::string& id : rng.sample(std::move(pool), k))
        trial.entries.push_back(TrialEntry{"", std::move(id), Origin::dummy});

    rng.shuffle(trial.entries);
    for (std::size_t i = 0; i < trial.entries.size(); ++i)
        trial.entries[i].anon_label = std::to_string(i + 1);
    return trial;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error("pearson: length mismatch");
    if (x.size() < 2)
        throw Error("pearson: need at least 2 points");
    bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const)
        throw Error("undefined correlation: constant input");

    double mean_x = 0.0, mean_y = 0.0, m2x = 0.0, m2y = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double n = static_cast<double>(i + 1);
        double dx = x[i] - mean_x;
        mean_x += dx / n;
        double dy = y[i] - mean_y;
        mean_y += dy / n;
        m2x += dx * (x[i] - mean_x);
        m2y += dy * (y[i] - mean_y);
        cxy += dx * (y[i] - mean_y);
    }
    double r = cxy / std::sqrt(m2x * m2y);
    if (r > 1.0)
        return 1.0;
    if (r < -1.0)
        return -1.0;
    return r;
}

namespace {

// summed suitability per label, validated against the trial
std::map<std::string, int> summed_scores(const TrialSheet& trial,
                                         const std::vector<ScoreSheet>& sheets) {
    std::set<std::string> labels;
    for (const auto& e : trial.entries)
        labels.insert(e.anon_label);

    std::map<std::string, int> sums;
    std::set<std::string> raters;
    int matched = 0;
    for (const auto& sheet : sheets) {
        if (sheet.gold_id != trial.gold_id)
            continue;
        ++matched;
        if (!raters.insert(sheet.rater_id).second)
            throw Error("duplicate sheet from rater '" + sheet.rater_id + "' for gold " +
                        trial.gold_id);
        for (const auto& [label, score] : sheet.scores) {
            if (!labels.count(label))
                throw Error("rater '" + sheet.rater_id + "': unknown label '" + label +
                            "' for gold " + trial.gold_id);
            if (score < 1 || score > 5)
                throw Error("rater '" + sheet.rater_id + "': score " + std::to_string(score) +
                            " out of the 1-5 scale");
            sums[label] += score;
        }
        for (const auto& label : labels)
            if (!sheet.scores.count(label))
                throw Error("rater '" + sheet.rater_id + "': label '" + label +
                            "' not scored for gold " + trial.gold_id);
    }
    if (matched == 0)
        throw Error("no score sheets for gold " + trial.gold_id);
    return sums;
}

} // namespace

TrialReport aggregate_scores(const std::vector<TrialSheet>& trials,
                             const std::vector<ScoreSheet>& sheets) {
    if (trials.empty())
        throw Error("no trials to aggregate");
    {
        std::set<std::string> gold_ids;
        for (const auto& t : trials)
            if (!gold_ids.insert(t.gold_id).second)
                throw Error("duplicate trial for gold " + t.gold_id);
        for (const auto& s : sheets)
            if (!gold_ids.count(s.gold_id))
                throw Error("score sheet references unknown gold " + s.gold_id);
    }
    TrialReport report;
    long long td = 0, tf = 0;
    for (const auto& trial : trials) {
        std::map<std::string, int> sums = summed_scores(trial, sheets);
        GoldResult row;
        row.gold_id = trial.gold_id;
        for (const auto& e : trial.entries) {
            int s = sums.count(e.anon_label) ? sums.at(e.anon_label) : 0;
            if (e.origin == Origin::dummy)
                row.dummy_sum += s;
            else
                row.filtered_sum += s;
        }
        row.delta = row.filtered_sum - row.dummy_sum;
        td += row.dummy_sum;
        tf += row.filtered_sum;
        report.per_gold.push_back(std::move(row));
    }
    double n = static_cast<double>(trials.size());
    report.avg_dummy = static_cast<double>(td) / n;
    report.avg_filtered = static_cast<double>(tf) / n;
    report.avg_delta = static_cast<double>(tf - td) / n;
    return report;
}

std::map<std::string, std::optional<double>>
feature_correlations(const TrialSheet& trial, const std::vector<ScoreSheet>& sheets,
                     const PassageDatabase& db) {
    std::map<std::string, int> sums = summed_scores(trial, sheets);
    std::vector<double> scores;
    std::vector<const FeatureVector*> features;
    for (const auto& e : trial.entries) {
        const Passage* p = db.find(e.passage_id);
        if (!p)
            throw Error("trial entry " + e.passage_id + " not found in database");
        if (!p->features)
            throw Error("passage " + p->id + " has no features");
        features.push_back(&*p->features);
        scores.push_back(sums.at(e.anon_label));
    }
    std::map<std::string, std::optional<double>> out;
    for (const auto& name : kNumericFeatures) {
        std::vector<double> values;
        values.reserve(features.size());
        for (const FeatureVector* f : features)
            values.push_back(feature_value(*f, name));
        try {
            out[name] = pearson(values, scores);
        } catch (const Error&) {
            out[name] = std::nullopt; // constant input: not computable
        }
    }
    return out;
}

TrialReport build_report(const std::vector<TrialSheet>& trials,
                         const std::vector<ScoreSheet>& sheets, const PassageDatabase& db) {
    TrialReport report = aggregate_scores(trials, sheets);
    std::map<std::string, std::vector<double>> pooled_values, pooled_scores;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        report.per_gold[i].feature_r = feature_correlations(trials[i], sheets, db);
        std::map<std::string, int> sums = summed_scores(trials[i], sheets);
        for (const auto& e : trials[i].entries) {
            const Passage* p = db.find(e.passage_id);
            for (const auto& name : kNumericFeatures) {
                pooled_values[name].push_back(feature_value(*p->features, name));
                pooled_scores[name].push_back(sums.at(e.anon_label));
            }
        }
    }
    for (const auto& name : kNumericFeatures) {
        double sum = 0.0;
        int n = 0;
        for (const auto& row : report.per_gold) {
            if (auto r = row.feature_r.at(name)) {
                sum += *r;
                ++n;
            }
        }
        report.avg_r[name] = n ? std::optional<double>(sum / n) : std::nullopt;
        try {
            report.pooled_r[name] = pearson(pooled_values[name], pooled_scores[name]);
        } catch (const Error&) {
            report.pooled_r[name] = std::nullopt;
        }
    }
    return report;
}

namespace {

std::string fmt_signed(double v) {
    char buf[32];
    if (std::fabs(v - std::round(v)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%+.0f", v);
    else
        std::snprintf(buf, sizeof(buf), "%+.1f", v);
    return buf;
}

std::string fmt_avg(double v) {
    char buf[32];
    if (std::fabs(v - std::round(v)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    else
        std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string fmt_r(const std::optional<double>& r) {
    if (!r)
        return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *r);
    return buf;
}

} // namespace

std::string format_report(const TrialReport& report) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%-20s %8s %8s %8s %10s %10s\n", "Gold", "Dummy", "Filtered",
                  "Delta", "r(#Word)", "r(#Sent)");
    std::string out = buf;
    for (const auto& row : report.per_gold) {
        std::string gold = row.gold_id.size() > 20 ? row.gold_id.substr(0, 20) : row.gold_id;
        auto r_of = [&](const char* name) -> std::optional<double> {
            auto it = row.feature_r.find(name);
            return it == row.feature_r.end() ? std::nullopt : it->second;
        };
        std::snprintf(buf, sizeof(buf), "%-20s %8d %8d %8s %10s %10s\n", gold.c_str(),
                      row.dummy_sum, row.filtered_sum, fmt_signed(row.delta).c_str(),
                      fmt_r(r_of("n_word")).c_str(), fmt_r(r_of("n_sent")).c_str());
        out += buf;
    }
    auto avg_of = [&](const char* name) -> std::optional<double> {
        auto it = report.avg_r.find(name);
        return it == report.avg_r.end() ? std::nullopt : it->second;
    };
    std::snprintf(buf, sizeof(buf), "%-20s %8s %8s %8s %10s %10s\n", "Average",
                  fmt_avg(report.avg_dummy).c_str(), fmt_avg(report.avg_filtered).c_str(),
                  fmt_signed(report.avg_delta).c_str(), fmt_r(avg_of("n_word")).c_str(),
                  fmt_r(avg_of("n_sent")).c_str());
    out += buf;
    return out;
}

namespace {

json r_map_to_json(const std::map<std::string, std::optional<double>>& m) {
    json j = json::object();
    for (const auto& [name, r] : m)
        j[name] = r ? json(*r) : json();
    return j;
}

} // namespace

std::string report_to_json(const TrialReport& report) {
    json rows = json::array();
    for (const auto& row : report.per_gold)
        rows.push_back(json{{"gold_id", row.gold_id},
                            {"dummy_sum", row.dummy_sum},
                            {"filtered_sum", row.filtered_sum},
                            {"delta", row.delta},
                            {"pearson", r_map_to_json(row.feature_r)}});
    json j{{"per_gold", rows},
           {"avg_dummy", report.avg_dummy},
           {"avg_filtered", report.avg_filtered},
           {"avg_delta", report.avg_delta},
           {"avg_pearson", r_map_to_json(report.avg_r)},
           {"pooled_pearson", r_map_to_json(report.pooled_r)}};
    return j.dump(2);
}

void export_trial(const TrialSheet& trial, const PassageDatabase& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write packet: " + path);
    out << "# gold: " << trial.gold_id << "\n";
    out << "# rater: \n";
    out << "# question: " << kRaterQuestion << "\n";
    out << "gold_text,anon_label,candidate_text,score,reason\n";
    for (const auto& e : trial.entries) {
        const Passage* p = db.find(e.passage_id);
        if (!p)
            throw Error("trial entry " + e.passage_id + " not found in database");
        out << csv_join({trial.gold_text, e.anon_label, p->text, "", ""}) << "\n";
    }
    if (!out)
        throw Error("write failed: " + path);
}

std::vector<ScoreSheet> import_scores(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open scores: " + path);
    std::vector<ScoreSheet> sheets;
    ScoreSheet current;
    bool open = false;

    auto flush = [&]() {
        if (!open)
            return;
        if (current.rater_id.empty())
            throw Error(path + ": missing '# rater:' entry for gold " + current.gold_id);
        if (current.scores.empty())
            throw Error(path + ": no scored rows for gold " + current.gold_id);
        sheets.push_back(std::move(current));
        current = ScoreSheet{};
        open = false;
    };

    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        std::size_t e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        // a record may span lines when a quoted field holds a newline
        while (!csv_record_complete(line) && in) {
            std::string more;
            if (!std::getline(in, more))
                break;
            ++line_no;
            line += "\n" + more;
        }
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty())
            continue;
        if (stripped.rfind("# gold:", 0) == 0) {
            flush();
            current.gold_id = trim(stripped.substr(7));
            open = true;
            continue;
        }
        if (stripped.rfind("# rater:", 0) == 0) {
            current.rater_id = trim(stripped.substr(8));
            continue;
        }
        if (stripped[0] == '#')
            continue; // question line or other annotation
        if (stripped.rfind("gold_text,", 0) == 0)
            continue; // column header
        if (!open)
            throw Error(path + ":" + std::to_string(line_no) + ": row before any '# gold:' line");
        std::vector<std::string> fields;
        try {
            fields = csv_split(line);
        } catch (const Error& e) {
            throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (fields.size() != 5)
            throw Error(path + ":" + std::to_string(line_no) + ": expected 5 columns, got " +
                        std::to_string(fields.size()));
        const std::string& label = fields[1];
        const std::string score_text = trim(fields[3]);
        if (label.empty())
            throw Error(path + ":" + std::to_string(line_no) + ": empty anon_label");
        if (score_text.empty())
            throw Error(path + ":" + std::to_string(line_no) + ": row '" + label +
                        "' has no score");
        int score = 0;
        try {
            std::size_t used = 0;
            score = std::stoi(score_text, &used);
            if (used != score_text.size())
                throw std::invalid_argument(score_text);
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(line_no) + ": score '" + score_text +
                        "' is not an integer");
        }
        if (score < 1 || score > 5)
            throw Error(path + ":" + std::to_string(line_no) + ": score " +
                        std::to_string(score) + " out of the 1-5 scale");
        if (!current.scores.emplace(label, score).second)
            throw Error(path + ":" + std::to_string(line_no) + ": duplicate label '" + label +
                        "'");
        current.reasons[label] = fields[4];
    }
    flush();
    if (sheets.empty())
        throw Error(path + ": no score sheets found");
    return sheets;
}

void save_trial(const TrialSheet& trial, const std::string& path) {
    json entries = json::array();
    for (const auto& e : trial.entries)
        entries.push_back(json{{"label", e.anon_label},
                               {"passage_id", e.passage_id},
                               {"origin", e.origin == Origin::dummy ? "dummy" : "filtered"}});
    json j{{"gold_id", trial.gold_id},
           {"gold_text", trial.gold_text},
           {"shuffle_seed", trial.shuffle_seed},
           {"target_count", trial.target_count},
           {"entries", entries}};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write trial: " + path);
    out << j.dump(2) << "\n";
    if (!out)
        throw Error("write failed: " + path);
}

TrialSheet load_trial(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open trial: " + path);
    json j;
    try {
        in >> j;
        TrialSheet trial;
        trial.gold_id = j.at("gold_id").get<std::string>();
        trial.gold_text = j.at("gold_text").get<std::string>();
        trial.shuffle_seed = j.at("shuffle_seed").get<std::uint64_t>();
        trial.target_count = j.at("target_count").get<int>();
        for (const auto& e : j.at("entries")) {
            std::string origin = e.at("origin").get<std::string>();
            if (origin != "dummy" && origin != "filtered")
                throw Error(path + ": bad origin '" + origin + "'");
            trial.entries.push_back(TrialEntry{e.at("label").get<std::string>(),
                                               e.at("passage_id").get<std::string>(),
                                               origin == "dummy" ? Origin::dummy
                                                                 : Origin::filtered});
        }
        return trial;
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

} // namespace sieve
