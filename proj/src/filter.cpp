#include "sieve/filter.hpp"

#include "sieve/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

using nlohmann::json;

namespace sieve {

const char* const kConditionNames[kNumConditions] = {"sent", "wps", "h_diff", "hpw", "sem_sim"};

void validate(const FilterParams& params) {
    if (params.alpha_sent < 0)
        throw Error("alpha_sent must be >= 0");
    if (!(params.alpha_wps >= 0.0))
        throw Error("alpha_wps must be >= 0");
    if (params.alpha_hdiff < 0)
        throw Error("alpha_hdiff must be >= 0");
    if (!(params.alpha_hpw >= 0.0))
        throw Error("alpha_hpw must be >= 0");
    if (!(params.min_sem_sim >= -1.0 && params.min_sem_sim <= 1.0))
        throw Error("min_sem_sim must be in [-1, 1]");
}

FilterParams filter_params_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(origin + ": malformed JSON: " + e.what());
    }
    static const char* const keys[] = {"alpha_sent", "alpha_wps", "alpha_hdiff", "alpha_hpw",
                                       "min_sem_sim"};
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* k : keys)
            known = known || key == k;
        if (!known)
            throw Error(origin + ": unknown key '" + key + "'");
    }
    FilterParams p;
    try {
        p.alpha_sent = j.at("alpha_sent").get<int>();
        p.alpha_wps = j.at("alpha_wps").get<double>();
        p.alpha_hdiff = j.at("alpha_hdiff").get<int>();
        p.alpha_hpw = j.at("alpha_hpw").get<double>();
        p.min_sem_sim = j.at("min_sem_sim").get<double>();
    } catch (const json::exception& e) {
        throw Error(origin + ": " + e.what());
    }
    try {
        validate(p);
    } catch (const Error& e) {
        throw Error(origin + ": " + e.what());
    }
    return p;
}

FilterParams load_filter_params(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open params: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return filter_params_from_json_text(buffer.str(), path);
}

std::string filter_params_to_json(const FilterParams& params) {
    return json{{"alpha_sent", params.alpha_sent},
                {"alpha_wps", params.alpha_wps},
                {"alpha_hdiff", params.alpha_hdiff},
                {"alpha_hpw", params.alpha_hpw},
                {"min_sem_sim", params.min_sem_sim}}
        .dump();
}

bool condition_sent(const FeatureVector& gold, const FeatureVector& db_inst, int alpha) {
    return std::abs(db_inst.n_sent - gold.n_sent) <= alpha;
}

bool condition_wps(const FeatureVector& gold, const FeatureVector& db_inst, double alpha) {
    return gold.wps - alpha <= db_inst.wps && db_inst.wps <= gold.wps + alpha;
}

bool condition_hdiff(const FeatureVector& gold, const FeatureVector& db_inst, int alpha) {
    return std::abs(db_inst.h_diff - gold.h_diff) <= alpha;
}

bool condition_hpw(const FeatureVector& gold, const FeatureVector& db_inst, double alpha) {
    return gold.hpw - alpha <= db_inst.hpw && db_inst.hpw <= gold.hpw + alpha;
}

bool condition_semsim(const FeatureVector& gold, const FeatureVector& db_inst, double min_sim) {
    return cosine_similarity(gold.embedding, db_inst.embedding) >= min_sim;
}

namespace {

// Index of the first failing condition, kNumConditions when all pass.
int first_fail(const FeatureVector& gold, const FeatureVector& inst, const FilterParams& p) {
    if (!condition_sent(gold, inst, p.alpha_sent))
        return 0;
    if (!condition_wps(gold, inst, p.alpha_wps))
        return 1;
    if (!condition_hdiff(gold, inst, p.alpha_hdiff))
        return 2;
    if (!condition_hpw(gold, inst, p.alpha_hpw))
        return 3;
    if (!condition_semsim(gold, inst, p.min_sem_sim))
        return 4;
    return kNumConditions;
}

} // namespace

PipelineResult run_pipeline(const PassageDatabase& db, const Passage& gold,
                            const FilterParams& params, int workers) {
    if (!gold.features)
        throw Error("gold passage has no features");
    if (!db.encoder_id.empty() && gold.features->embedding.encoder_id != db.encoder_id)
        throw Error("encoder mismatch: gold '" + gold.features->embedding.encoder_id +
                    "' vs database '" + db.encoder_id + "'");
    validate(params);

    const std::size_t n = db.passages.size();
    std::vector<int> fail_stage(n, -1); // -1 marks the gold itself
    std::vector<std::string> errors(n);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Passage& p = db.passages[i];
            if (p.id == gold.id)
                continue;
            if (!p.features) {
                errors[i] = "passage " + p.id + " has no features";
                continue;
            }
            try {
                fail_stage[i] = first_fail(*gold.features, *p.features, params);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    const int nworkers = std::max(1, workers);
    if (nworkers == 1 || n < 2) {
        work(0, n);
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (n + nworkers - 1) / nworkers;
        for (int w = 0; w < nworkers; ++w) {
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
            throw Error(errors[i]);

    PipelineResult result;
    result.trace.stages.reserve(kNumConditions);
    for (int stage = 0; stage < kNumConditions; ++stage) {
        StageCount sc;
        sc.name = kConditionNames[stage];
        for (std::size_t i = 0; i < n; ++i) {
            if (fail_stage[i] < 0)
                continue;
            if (fail_stage[i] >= stage)
                ++sc.input;
            if (fail_stage[i] >= stage + 1)
                ++sc.output;
        }
        result.trace.stages.push_back(std::move(sc));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (fail_stage[i] == kNumConditions) {
            result.candidates.push_back(db.passages[i]);
            result.trace.candidate_ids.push_back(db.passages[i].id);
        }
    }
    return result;
}

} // namespace sieve
