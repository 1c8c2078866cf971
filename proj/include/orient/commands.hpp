#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "orient/analysis.hpp"
#include "orient/baselines.hpp"
#include "orient/config.hpp"
#include "orient/corpus.hpp"
#include "orient/model_io.hpp"
#include "orient/orientation.hpp"
#include "orient/synth.hpp"

namespace orient {

inline constexpr const char* kScoresFormat = "orient-scores";
inline constexpr const char* kBaselinesFormat = "orient-baselines";

// Shortest round-trip decimal form (what the JSON writer emits).
inline std::string format_double(double v) { return nlohmann::json(v).dump(); }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string csv_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

inline void report_load(const LoadReport& report, std::ostream& err) {
    for (const auto& e : report.record_errors)
        err << "record error at line " << e.line << ": " << e.message << '\n';
    if (report.dropped_empty_text)
        err << "dropped " << report.dropped_empty_text << " empty-text utterance(s)\n";
    if (report.dropped_conversations)
        err << "dropped " << report.dropped_conversations << " conversation(s) with no usable utterances\n";
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

inline OrientationModel cmd_fit(const std::string& corpus_path, const RunConfig& cfg,
                                const std::string& model_path, bool full = false,
                                std::ostream& err = std::cerr) {
    LoadReport report;
    Corpus corpus = load_corpus(corpus_path, {}, &report);
    report_load(report, err);

    FitArtifacts artifacts;
    OrientationModel model = fit_orientation(corpus, cfg, &artifacts);
    if (full) model.latent = artifacts.space;

    if (!model_path.empty()) save_model(model, model_path, full);

    const auto& d = model.diagnostics;
    err << "fit: " << d.n_conversations << " conversations, " << d.n_pairs_kept << "/"
        << d.n_pairs << " training pairs kept, vocab " << d.agent_vocab_size << "/"
        << d.client_vocab_size << " (agent/client), " << d.phrasings_scored
        << " phrasings scored (" << d.dropped_min_support << " below support, "
        << d.dropped_degenerate << " degenerate), svd " << d.svd_iterations << " iters\n";
    return model;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json scored_to_json(const ScoredUtterance& row) {
    nlohmann::ordered_json j;
    j["conversation_id"] = row.conversation_id;
    j["utterance_id"] = row.utterance_id;
    j["index"] = row.index;
    j["omega_min"] = row.score.omega_min ? nlohmann::ordered_json(*row.score.omega_min)
                                         : nlohmann::ordered_json(nullptr);
    j["omega_max"] = row.score.omega_max ? nlohmann::ordered_json(*row.score.omega_max)
                                         : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
    int scored = 0;
    for (const auto& s : row.score.sentences) {
        nlohmann::ordered_json sj;
        sj["position"] = s.position;
        sj["omega"] = s.omega ? nlohmann::ordered_json(*s.omega) : nlohmann::ordered_json(nullptr);
        sj["covered_phrasings"] = s.covered_phrasings;
        if (s.omega) ++scored;
        sentences.push_back(std::move(sj));
    }
    j["sentences"] = std::move(sentences);
    j["n_sentences"] = row.score.sentences.size();
    j["n_scored_sentences"] = scored;
    return j;
}

inline void write_scores(const std::vector<ScoredUtterance>& rows, const RunConfig& cfg,
                         std::ostream& out) {
    nlohmann::ordered_json header;
    header["format"] = kScoresFormat;
    header["version"] = "1.0";
    header["config"] = config_to_json(cfg);
    out << header.dump() << '\n';
    for (const auto& row : rows) out << scored_to_json(row).dump() << '\n';
}

inline std::vector<ScoredUtterance> load_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scores file: " + path);
    std::vector<ScoredUtterance> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError("scores file line " + std::to_string(line_no) + " is not JSON");
        if (j.contains("format")) {
            if (j.at("format").get<std::string>() != kScoresFormat &&
                j.at("format").get<std::string>() != kBaselinesFormat)
                throw DataError("unexpected header format in " + path);
            continue;
        }
        ScoredUtterance row;
        row.conversation_id = j.at("conversation_id").get<std::string>();
        row.utterance_id = j.at("utterance_id").get<std::string>();
        row.index = j.at("index").get<int>();
        if (!j.at("omega_min").is_null()) row.score.omega_min = j.at("omega_min").get<double>();
        if (!j.at("omega_max").is_null()) row.score.omega_max = j.at("omega_max").get<double>();
        if (j.contains("sentences"))
            for (const auto& sj : j.at("sentences")) {
                SentenceScore s;
                s.position = sj.at("position").get<int>();
                if (!sj.at("omega").is_null()) s.omega = sj.at("omega").get<double>();
                s.covered_phrasings = sj.at("covered_phrasings").get<int>();
                row.score.sentences.push_back(std::move(s));
            }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<ScoredUtterance> cmd_score(const std::string& corpus_path,
                                              const std::string& model_path,
                                              const std::string& out_path,
                                              Role role = Role::Agent,
                                              std::ostream& err = std::cerr) {
    OrientationModel model = load_model(model_path);
    LoadReport report;
    Corpus corpus = merge_consecutive(load_corpus(corpus_path, {}, &report));
    report_load(report, err);

    CoverageStats coverage;
    std::vector<ScoredUtterance> rows = score_corpus(corpus, model, role, &coverage);

    if (out_path.empty() || out_path == "-") {
        write_scores(rows, model.config, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open output file: " + out_path);
        write_scores(rows, model.config, out);
    }
    err << "scored " << coverage.n_scored_utterances << "/" << coverage.n_utterances << " "
        << role_name(role) << " utterances; sentence coverage "
        << format_double(coverage.sentence_coverage()) << " (" << coverage.n_scored_sentences
        << "/" << coverage.n_sentences << ")\n";
    return rows;
}

// ---------------------------------------------------------------------------
// baseline
// ---------------------------------------------------------------------------

inline std::vector<BaselineRow> cmd_baseline(const std::string& corpus_path,
                                             const std::string& model_path,
                                             const std::string& out_path,
                                             std::ostream& err = std::cerr) {
    OrientationModel model = load_model(model_path);
    LoadReport report;
    Corpus corpus = merge_consecutive(load_corpus(corpus_path, {}, &report));
    report_load(report, err);

    std::vector<BaselineRow> rows = compute_baselines(corpus, model);

    auto write = [&](std::ostream& out) {
        nlohmann::ordered_json header;
        header["format"] = kBaselinesFormat;
        header["version"] = "1.0";
        header["config"] = config_to_json(model.config);
        out << header.dump() << '\n';
        for (const auto& row : rows) {
            nlohmann::ordered_json j;
            j["conversation_id"] = row.conversation_id;
            j["utterance_id"] = row.utterance_id;
            j["index"] = row.index;
            j["naive_distance"] = row.naive_distance ? nlohmann::ordered_json(*row.naive_distance)
                                                     : nlohmann::ordered_json(nullptr);
            j["bwd_range_min"] = row.bwd_range_min ? nlohmann::ordered_json(*row.bwd_range_min)
                                                   : nlohmann::ordered_json(nullptr);
            j["has_question"] = row.has_question;
            out << j.dump() << '\n';
        }
    };
    if (out_path.empty() || out_path == "-") {
        write(std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open output file: " + out_path);
        write(out);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

namespace detail {

inline void require_metadata_key(const Corpus& corpus, const std::string& key) {
    std::set<std::string> available;
    for (const auto& conv : corpus.conversations) {
        if (conv.metadata.count(key)) return;
        for (const auto& [k, v] : conv.metadata) available.insert(k);
    }
    std::string msg = "metadata key \"" + key + "\" not present; available keys:";
    if (available.empty()) msg += " (none)";
    for (const auto& k : available) msg += " " + k;
    throw DataError(msg);
}

}  // namespace detail

// which: segments | summaries | counselors | lengths | baselines
inline void cmd_analyze(const std::string& which, const std::string& scores_path,
                        const std::string& corpus_path, const std::string& model_path,
                        const std::string& group_by, const RunConfig& cfg, std::ostream& out,
                        std::ostream& err = std::cerr) {
    LoadReport report;
    Corpus corpus = merge_consecutive(load_corpus(corpus_path, {}, &report));
    report_load(report, err);

    out << "# config: " << config_to_json(cfg).dump() << '\n';

    if (which == "baselines") {
        if (model_path.empty()) throw ConfigError("analyze baselines requires --model");
        OrientationModel model = load_model(model_path);
        out << "conversation_id,utterance_id,index,naive_distance,bwd_range_min,has_question\n";
        for (const auto& row : compute_baselines(corpus, model))
            out << csv_field(row.conversation_id) << ',' << csv_field(row.utterance_id) << ','
                << row.index << ',' << csv_opt(row.naive_distance) << ','
                << csv_opt(row.bwd_range_min) << ',' << (row.has_question ? "true" : "false")
                << '\n';
        return;
    }

    const std::vector<ScoredUtterance> scored = load_scores(scores_path);
    const ScoreTable table(scored);

    if (which == "segments") {
        if (!group_by.empty()) detail::require_metadata_key(corpus, group_by);
        const auto profiles =
            segment_profile(corpus, table, cfg.n_segments, cfg.min_agent_msgs, group_by);
        out << "group_key,group_value,segment,n_conversations,mean_omega_min,ci_low_min,"
               "ci_high_min,mean_omega_max,ci_low_max,ci_high_max\n";
        for (const auto& p : profiles) {
            for (int s = 0; s < p.n_segments; ++s) {
                const auto si = static_cast<std::size_t>(s);
                std::string ci_min_lo, ci_min_hi, ci_max_lo, ci_max_hi, mean_min, mean_max;
                if (!p.values_min[si].empty()) {
                    mean_min = format_double(p.mean_omega_min[si]);
                    mean_max = format_double(p.mean_omega_max[si]);
                    const auto ci_min = bootstrap_ci(p.values_min[si], cfg.bootstrap_resamples,
                                                     cfg.bootstrap_level,
                                                     mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
                    const auto ci_max = bootstrap_ci(p.values_max[si], cfg.bootstrap_resamples,
                                                     cfg.bootstrap_level,
                                                     mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(s)));
                    ci_min_lo = format_double(ci_min.low);
                    ci_min_hi = format_double(ci_min.high);
                    ci_max_lo = format_double(ci_max.low);
                    ci_max_hi = format_double(ci_max.high);
                }
                out << csv_field(p.group_key) << ',' << csv_field(p.group_value) << ',' << s << ','
                    << p.n_conversations[si] << ',' << mean_min << ',' << ci_min_lo << ','
                    << ci_min_hi << ',' << mean_max << ',' << ci_max_lo << ',' << ci_max_hi
                    << '\n';
            }
            if (p.n_excluded)
                err << "segments: " << p.n_excluded << " conversation(s) below "
                    << cfg.min_agent_msgs << " agent messages excluded\n";
        }
        return;
    }

    // remaining reports work from conversation summaries
    std::vector<ConversationSummary> summaries;
    summaries.reserve(corpus.conversations.size());
    for (const auto& conv : corpus.conversations)
        summaries.push_back(conversation_summary(conv, table));

    if (which == "summaries") {
        out << "conversation_id,agent_id,length_messages,n_agent_messages,n_scored,"
               "mean_omega_min,mean_omega_max,helpful,risk_assessed\n";
        for (const auto& s : summaries) {
            std::string agent, helpful, risk;
            if (s.conversation) {
                if (auto a = s.conversation->agent_id()) agent = *a;
                if (auto h = s.conversation->bool_meta("helpful")) helpful = *h ? "true" : "false";
                if (auto r = s.conversation->bool_meta("risk_assessed")) risk = *r ? "true" : "false";
            }
            out << csv_field(s.conversation_id) << ',' << csv_field(agent) << ','
                << s.length_messages << ',' << s.n_agent_messages << ',' << s.n_scored << ','
                << csv_opt(s.mean_omega_min) << ',' << csv_opt(s.mean_omega_max) << ',' << helpful
                << ',' << risk << '\n';
        }
        return;
    }

    if (which == "counselors") {
        const auto tendencies =
            counselor_split(summaries, cfg.counselor_window_first, cfg.counselor_window_last,
                            cfg.counselor_min_conversations);
        out << "agent_id,n_conversations,n_tendency,n_outcome,tendency_omega_min,"
               "tendency_omega_max,outcome_helpful_rate,outcome_mean_length\n";
        for (const auto& t : tendencies)
            out << csv_field(t.agent_id) << ',' << t.n_conversations << ',' << t.n_tendency << ','
                << t.n_outcome << ',' << csv_opt(t.tendency_omega_min) << ','
                << csv_opt(t.tendency_omega_max) << ',' << csv_opt(t.outcome_helpful_rate) << ','
                << csv_opt(t.outcome_mean_length) << '\n';
        if (tendencies.empty())
            err << "counselors: no agent reached " << cfg.counselor_min_conversations
                << " conversations; empty report\n";
        return;
    }

    if (which == "lengths") {
        const auto buckets = length_buckets(summaries, cfg.length_buckets);
        out << "bucket,min_length,max_length,n_conversations,mean_omega_min,ci_low_min,"
               "ci_high_min,mean_omega_max,ci_low_max,ci_high_max\n";
        for (const auto& b : buckets) {
            const auto ci_min = bootstrap_ci(b.values_min, cfg.bootstrap_resamples,
                                             cfg.bootstrap_level,
                                             mix_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(b.bucket)));
            const auto ci_max = bootstrap_ci(b.values_max, cfg.bootstrap_resamples,
                                             cfg.bootstrap_level,
                                             mix_seed(cfg.seed, 3000 + static_cast<std::uint64_t>(b.bucket)));
            out << b.bucket << ',' << b.min_length << ',' << b.max_length << ','
                << b.n_conversations << ',' << format_double(b.mean_omega_min) << ','
                << format_double(ci_min.low) << ',' << format_double(ci_min.high) << ','
                << format_double(b.mean_omega_max) << ',' << format_double(ci_max.low) << ','
                << format_double(ci_max.high) << '\n';
        }
        return;
    }

    throw ConfigError("unknown analysis \"" + which +
                      "\" (expected segments|summaries|counselors|lengths|baselines)");
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

inline void cmd_synth(const PlantedSpec& spec, const std::string& corpus_path,
                      const std::string& truth_path, std::ostream& err = std::cerr) {
    Corpus corpus = generate_planted_corpus(spec);
    save_corpus(corpus, corpus_path);
    if (!truth_path.empty()) {
        std::ofstream out(truth_path);
        if (!out) throw DataError("cannot open output file: " + truth_path);
        out << planted_ground_truth(spec).dump(2) << '\n';
    }
    err << "synth: wrote " << corpus.conversations.size() << " conversations ("
        << corpus.total_utterances() << " utterances) to " << corpus_path << '\n';
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

inline void cmd_inspect(const std::string& model_path, int top_n, bool dump_vocab,
                        std::ostream& out) {
    OrientationModel model = load_model(model_path);
    out << "model: " << kModelFormat << " " << OrientationModel::kMajorVersion << "."
        << OrientationModel::kMinorVersion << ", profile " << model.config.profile << ", seed "
        << model.config.seed << '\n';
    out << "vocabulary: " << model.agent_vocab.size() << " agent phrasings, "
        << model.stats.size() << " scored\n";
    const auto& d = model.diagnostics;
    out << "fit: " << d.n_conversations << " conversations, " << d.n_pairs_kept
        << " training pairs, client vocab " << d.client_vocab_size << ", svd "
        << d.svd_iterations << " iterations\n";
    out << "singular values:";
    for (Eigen::Index i = 0; i < model.singular_values.size(); ++i)
        out << ' ' << format_double(model.singular_values(i));
    out << '\n';

    if (dump_vocab) {
        nlohmann::ordered_json vocab = nlohmann::ordered_json::array();
        for (int id = 0; id < model.agent_vocab.size(); ++id)
            vocab.push_back({{"id", id},
                             {"phrasing", model.agent_vocab.phrasings[static_cast<std::size_t>(id)]},
                             {"df", model.agent_vocab.doc_frequency[static_cast<std::size_t>(id)]},
                             {"uf", model.agent_vocab.utterance_frequency[static_cast<std::size_t>(id)]}});
        out << vocab.dump(2) << '\n';
        return;
    }

    std::vector<const PhrasingStats*> by_omega;
    by_omega.reserve(model.stats.size());
    for (const auto& ps : model.stats) by_omega.push_back(&ps);
    std::sort(by_omega.begin(), by_omega.end(),
              [](const PhrasingStats* a, const PhrasingStats* b) {
                  return a->orientation > b->orientation;
              });
    const int n = std::min<int>(top_n, static_cast<int>(by_omega.size()));
    out << "most forwards-oriented:\n";
    for (int i = 0; i < n; ++i)
        out << "  " << by_omega[static_cast<std::size_t>(i)]->phrasing << "  "
            << format_double(by_omega[static_cast<std::size_t>(i)]->orientation) << '\n';
    out << "most backwards-oriented:\n";
    for (int i = 0; i < n; ++i) {
        const auto* ps = by_omega[by_omega.size() - 1 - static_cast<std::size_t>(i)];
        out << "  " << ps->phrasing << "  " << format_double(ps->orientation) << '\n';
    }
}

}  // namespace orient
