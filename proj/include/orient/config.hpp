#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "orient/errors.hpp"
#include "orient/phrasing.hpp"

namespace orient {

enum class CentralPointMode { Paper, PlainMean };

inline const char* central_point_mode_name(CentralPointMode m) {
    return m == CentralPointMode::Paper ? "paper" : "plain_mean";
}

inline CentralPointMode parse_central_point_mode(const std::string& s) {
    if (s == "paper") return CentralPointMode::Paper;
    if (s == "plain_mean") return CentralPointMode::PlainMean;
    throw ConfigError("unknown central_point_mode: \"" + s + "\"");
}

// Which utterances form the training document sets (vocabulary, idf, SVD):
//   Pairs         — only utterances that appear in at least one surviving
//                   training pair (default)
//   Conversations — every utterance of a conversation that contributed at
//                   least one surviving pair
enum class TrainingDocsPolicy { Pairs, Conversations };

inline const char* training_docs_name(TrainingDocsPolicy p) {
    return p == TrainingDocsPolicy::Pairs ? "pairs" : "conversations";
}

inline TrainingDocsPolicy parse_training_docs(const std::string& s) {
    if (s == "pairs") return TrainingDocsPolicy::Pairs;
    if (s == "conversations") return TrainingDocsPolicy::Conversations;
    throw ConfigError("unknown training_docs policy: \"" + s + "\"");
}

struct SvdConfig {
    int oversampling = 10;
    int min_power_iters = 7;
    int max_iters = 1000;
    double tolerance = 1e-10;
};

struct RunConfig {
    std::string profile = "counseling";
    std::uint64_t seed = 1;

    // training-pair word filter
    int min_words = 15;
    int max_words = 45;

    // vocabularies
    int agent_top_k = 5000;
    int client_top_k = 5000;
    int agent_min_utterances = 1;
    int client_min_utterances = 1;

    // latent space: latent_dims retained after the optional removal of the
    // first SVD dimension (drop_first on => latent_dims + 1 computed)
    int latent_dims = 25;
    bool drop_first = true;

    int min_support = 10;  // required replies AND predecessors per phrasing

    // segment analysis
    int n_segments = 5;
    int min_agent_msgs = 10;

    ExtractorConfig agent_extractor;
    ExtractorConfig client_extractor;
    CentralPointMode central_point_mode = CentralPointMode::Paper;
    TrainingDocsPolicy training_docs = TrainingDocsPolicy::Pairs;
    bool log_tf = false;  // sublinear tf (1 + ln tf) instead of raw counts

    SvdConfig svd;

    // analysis defaults
    int bootstrap_resamples = 1000;
    double bootstrap_level = 0.95;
    int counselor_window_first = 20;
    int counselor_window_last = 120;
    int counselor_min_conversations = 120;
    int length_buckets = 10;

    int svd_total_dims() const { return latent_dims + (drop_first ? 1 : 0); }

    void validate() const {
        if (min_words > max_words) throw ConfigError("min_words exceeds max_words");
        if (latent_dims < 1) throw ConfigError("latent_dims must be >= 1");
        if (min_support < 1) throw ConfigError("min_support must be >= 1");
        if (n_segments < 1) throw ConfigError("n_segments must be >= 1");
        if (svd.oversampling < 0) throw ConfigError("svd.oversampling must be >= 0");
        if (svd.tolerance <= 0) throw ConfigError("svd.tolerance must be > 0");
        if (bootstrap_level <= 0 || bootstrap_level >= 1)
            throw ConfigError("bootstrap_level must be in (0, 1)");
        if (counselor_window_first < 1 || counselor_window_last < counselor_window_first)
            throw ConfigError("invalid counselor window");
    }
};

// Named parameter presets. "counseling" is the default configuration;
// "court" adapts it to oral-argument transcripts: pre-extracted arc phrasings
// on both roles, a 10..100 word filter, and a 200-utterance vocabulary floor
// on the agent side.
inline RunConfig profile_config(const std::string& name) {
    RunConfig cfg;
    cfg.profile = name;
    if (name == "counseling") return cfg;
    if (name == "court") {
        cfg.min_words = 10;
        cfg.max_words = 100;
        cfg.agent_min_utterances = 200;
        cfg.agent_extractor.mode = ExtractorMode::External;
        cfg.client_extractor.mode = ExtractorMode::External;
        return cfg;
    }
    throw ConfigError("unknown profile: \"" + name + "\" (expected counseling|court)");
}

inline nlohmann::ordered_json extractor_to_json(const ExtractorConfig& e) {
    return {{"mode", extractor_mode_name(e.mode)},
            {"lowercase", e.lowercase},
            {"strip_punct", e.strip_punct}};
}

inline ExtractorConfig extractor_from_json(const nlohmann::json& j) {
    ExtractorConfig e;
    e.mode = parse_extractor_mode(j.at("mode").get<std::string>());
    e.lowercase = j.at("lowercase").get<bool>();
    e.strip_punct = j.at("strip_punct").get<bool>();
    return e;
}

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["profile"] = c.profile;
    j["seed"] = c.seed;
    j["min_words"] = c.min_words;
    j["max_words"] = c.max_words;
    j["agent_top_k"] = c.agent_top_k;
    j["client_top_k"] = c.client_top_k;
    j["agent_min_utterances"] = c.agent_min_utterances;
    j["client_min_utterances"] = c.client_min_utterances;
    j["latent_dims"] = c.latent_dims;
    j["drop_first"] = c.drop_first;
    j["min_support"] = c.min_support;
    j["n_segments"] = c.n_segments;
    j["min_agent_msgs"] = c.min_agent_msgs;
    j["agent_extractor"] = extractor_to_json(c.agent_extractor);
    j["client_extractor"] = extractor_to_json(c.client_extractor);
    j["central_point_mode"] = central_point_mode_name(c.central_point_mode);
    j["training_docs"] = training_docs_name(c.training_docs);
    j["log_tf"] = c.log_tf;
    j["svd"] = {{"oversampling", c.svd.oversampling},
                {"min_power_iters", c.svd.min_power_iters},
                {"max_iters", c.svd.max_iters},
                {"tolerance", c.svd.tolerance}};
    j["bootstrap_resamples"] = c.bootstrap_resamples;
    j["bootstrap_level"] = c.bootstrap_level;
    j["counselor_window_first"] = c.counselor_window_first;
    j["counselor_window_last"] = c.counselor_window_last;
    j["counselor_min_conversations"] = c.counselor_min_conversations;
    j["length_buckets"] = c.length_buckets;
    return j;
}

// Applies only the keys present in j; used for partial config files, which
// sit between profile defaults and command-line flags.
inline void overlay_config(RunConfig& c, const nlohmann::json& j) {
    if (j.contains("profile")) c.profile = j.at("profile").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("min_words")) c.min_words = j.at("min_words").get<int>();
    if (j.contains("max_words")) c.max_words = j.at("max_words").get<int>();
    if (j.contains("agent_top_k")) c.agent_top_k = j.at("agent_top_k").get<int>();
    if (j.contains("client_top_k")) c.client_top_k = j.at("client_top_k").get<int>();
    if (j.contains("agent_min_utterances"))
        c.agent_min_utterances = j.at("agent_min_utterances").get<int>();
    if (j.contains("client_min_utterances"))
        c.client_min_utterances = j.at("client_min_utterances").get<int>();
    if (j.contains("latent_dims")) c.latent_dims = j.at("latent_dims").get<int>();
    if (j.contains("drop_first")) c.drop_first = j.at("drop_first").get<bool>();
    if (j.contains("min_support")) c.min_support = j.at("min_support").get<int>();
    if (j.contains("n_segments")) c.n_segments = j.at("n_segments").get<int>();
    if (j.contains("min_agent_msgs")) c.min_agent_msgs = j.at("min_agent_msgs").get<int>();
    if (j.contains("agent_extractor")) c.agent_extractor = extractor_from_json(j.at("agent_extractor"));
    if (j.contains("client_extractor"))
        c.client_extractor = extractor_from_json(j.at("client_extractor"));
    if (j.contains("central_point_mode"))
        c.central_point_mode = parse_central_point_mode(j.at("central_point_mode").get<std::string>());
    if (j.contains("training_docs"))
        c.training_docs = parse_training_docs(j.at("training_docs").get<std::string>());
    if (j.contains("log_tf")) c.log_tf = j.at("log_tf").get<bool>();
    if (j.contains("svd")) {
        const auto& s = j.at("svd");
        if (s.contains("oversampling")) c.svd.oversampling = s.at("oversampling").get<int>();
        if (s.contains("min_power_iters")) c.svd.min_power_iters = s.at("min_power_iters").get<int>();
        if (s.contains("max_iters")) c.svd.max_iters = s.at("max_iters").get<int>();
        if (s.contains("tolerance")) c.svd.tolerance = s.at("tolerance").get<double>();
    }
    if (j.contains("bootstrap_resamples"))
        c.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
    if (j.contains("bootstrap_level")) c.bootstrap_level = j.at("bootstrap_level").get<double>();
    if (j.contains("counselor_window_first"))
        c.counselor_window_first = j.at("counselor_window_first").get<int>();
    if (j.contains("counselor_window_last"))
        c.counselor_window_last = j.at("counselor_window_last").get<int>();
    if (j.contains("counselor_min_conversations"))
        c.counselor_min_conversations = j.at("counselor_min_conversations").get<int>();
    if (j.contains("length_buckets")) c.length_buckets = j.at("length_buckets").get<int>();
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.profile = j.at("profile").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.min_words = j.at("min_words").get<int>();
    c.max_words = j.at("max_words").get<int>();
    c.agent_top_k = j.at("agent_top_k").get<int>();
    c.client_top_k = j.at("client_top_k").get<int>();
    c.agent_min_utterances = j.at("agent_min_utterances").get<int>();
    c.client_min_utterances = j.at("client_min_utterances").get<int>();
    c.latent_dims = j.at("latent_dims").get<int>();
    c.drop_first = j.at("drop_first").get<bool>();
    c.min_support = j.at("min_support").get<int>();
    c.n_segments = j.at("n_segments").get<int>();
    c.min_agent_msgs = j.at("min_agent_msgs").get<int>();
    c.agent_extractor = extractor_from_json(j.at("agent_extractor"));
    c.client_extractor = extractor_from_json(j.at("client_extractor"));
    c.central_point_mode = parse_central_point_mode(j.at("central_point_mode").get<std::string>());
    c.training_docs = parse_training_docs(j.at("training_docs").get<std::string>());
    c.log_tf = j.at("log_tf").get<bool>();
    const auto& s = j.at("svd");
    c.svd.oversampling = s.at("oversampling").get<int>();
    c.svd.min_power_iters = s.at("min_power_iters").get<int>();
    c.svd.max_iters = s.at("max_iters").get<int>();
    c.svd.tolerance = s.at("tolerance").get<double>();
    c.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
    c.bootstrap_level = j.at("bootstrap_level").get<double>();
    c.counselor_window_first = j.at("counselor_window_first").get<int>();
    c.counselor_window_last = j.at("counselor_window_last").get<int>();
    c.counselor_min_conversations = j.at("counselor_min_conversations").get<int>();
    c.length_buckets = j.at("length_buckets").get<int>();
    return c;
}

}  // namespace orient
