#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "orient/config.hpp"
#include "orient/errors.hpp"
#include "orient/orientation.hpp"

namespace orient {

inline constexpr const char* kModelFormat = "orient-model";

inline nlohmann::ordered_json diagnostics_to_json(const FitDiagnostics& d) {
    nlohmann::ordered_json j;
    j["n_conversations"] = d.n_conversations;
    j["n_utterances"] = d.n_utterances;
    j["n_pairs"] = d.n_pairs;
    j["n_pairs_kept"] = d.n_pairs_kept;
    j["n_agent_docs"] = d.n_agent_docs;
    j["n_client_docs"] = d.n_client_docs;
    j["agent_vocab_size"] = d.agent_vocab_size;
    j["client_vocab_size"] = d.client_vocab_size;
    j["n_client_zero_rows"] = d.n_client_zero_rows;
    j["phrasings_observed"] = d.phrasings_observed;
    j["phrasings_scored"] = d.phrasings_scored;
    j["dropped_min_support"] = d.dropped_min_support;
    j["dropped_degenerate"] = d.dropped_degenerate;
    j["tfidf_zero_df_warnings"] = d.tfidf_zero_df_warnings;
    j["svd_iterations"] = d.svd_iterations;
    j["svd_last_change"] = d.svd_last_change;
    return j;
}

inline FitDiagnostics diagnostics_from_json(const nlohmann::json& j) {
    FitDiagnostics d;
    d.n_conversations = j.value("n_conversations", 0);
    d.n_utterances = j.value("n_utterances", 0L);
    d.n_pairs = j.value("n_pairs", 0L);
    d.n_pairs_kept = j.value("n_pairs_kept", 0L);
    d.n_agent_docs = j.value("n_agent_docs", 0);
    d.n_client_docs = j.value("n_client_docs", 0);
    d.agent_vocab_size = j.value("agent_vocab_size", 0);
    d.client_vocab_size = j.value("client_vocab_size", 0);
    d.n_client_zero_rows = j.value("n_client_zero_rows", 0);
    d.phrasings_observed = j.value("phrasings_observed", 0);
    d.phrasings_scored = j.value("phrasings_scored", 0);
    d.dropped_min_support = j.value("dropped_min_support", 0);
    d.dropped_degenerate = j.value("dropped_degenerate", 0);
    d.tfidf_zero_df_warnings = j.value("tfidf_zero_df_warnings", 0);
    d.svd_iterations = j.value("svd_iterations", 0);
    d.svd_last_change = j.value("svd_last_change", 0.0);
    return d;
}

// Versioned JSON model file. `full` additionally embeds the per-phrasing
// central points and the latent space (when the model still carries one) for
// diagnostics; scoring never needs them.
inline nlohmann::ordered_json model_to_json(const OrientationModel& model, bool full = false) {
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = std::to_string(OrientationModel::kMajorVersion) + "." +
                   std::to_string(OrientationModel::kMinorVersion);
    j["profile"] = model.config.profile;
    j["config"] = config_to_json(model.config);

    nlohmann::ordered_json vocab = nlohmann::ordered_json::array();
    for (int id = 0; id < model.agent_vocab.size(); ++id) {
        nlohmann::ordered_json row;
        row["id"] = id;
        row["phrasing"] = model.agent_vocab.phrasings[static_cast<std::size_t>(id)];
        row["df"] = model.agent_vocab.doc_frequency[static_cast<std::size_t>(id)];
        row["uf"] = model.agent_vocab.utterance_frequency[static_cast<std::size_t>(id)];
        row["idf"] = model.agent_idf[static_cast<std::size_t>(id)];
        vocab.push_back(std::move(row));
    }
    j["agent_vocabulary"] = std::move(vocab);
    j["agent_total_docs"] = model.agent_vocab.total_docs;

    nlohmann::ordered_json stats = nlohmann::ordered_json::array();
    for (const auto& ps : model.stats) {
        nlohmann::ordered_json row;
        row["id"] = ps.id;
        row["phrasing"] = ps.phrasing;
        row["fwd_range"] = ps.fwd_range;
        row["bwd_range"] = ps.bwd_range;
        row["orientation"] = ps.orientation;
        row["n_replies"] = ps.n_replies;
        row["n_preds"] = ps.n_preds;
        if (full) {
            row["fwd_center"] = std::vector<double>(ps.fwd_center.data(),
                                                    ps.fwd_center.data() + ps.fwd_center.size());
            row["bwd_center"] = std::vector<double>(ps.bwd_center.data(),
                                                    ps.bwd_center.data() + ps.bwd_center.size());
        }
        stats.push_back(std::move(row));
    }
    j["phrasings"] = std::move(stats);

    j["singular_values"] = std::vector<double>(
        model.singular_values.data(), model.singular_values.data() + model.singular_values.size());
    j["diagnostics"] = diagnostics_to_json(model.diagnostics);

    if (full && model.latent) {
        const LatentSpace& space = *model.latent;
        nlohmann::ordered_json latent;
        latent["k"] = space.k;
        latent["dropped_first"] = space.dropped_first;
        latent["zero_rows"] = space.zero_rows();
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < space.row_embeddings.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(space.k));
            for (int d = 0; d < space.k; ++d) row[static_cast<std::size_t>(d)] = space.row_embeddings(i, d);
            rows.push_back(row);
        }
        latent["row_embeddings"] = std::move(rows);
        j["latent"] = std::move(latent);
    }
    return j;
}

inline void save_model(const OrientationModel& model, const std::string& path, bool full = false) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << model_to_json(model, full).dump(2) << '\n';
    if (!out) throw DataError("I/O error while writing model: " + path);
}

// Loads and validates a model file: format, major version, dense vocabulary
// ids, ranges inside [0, 2], and the orientation identity
// orientation = bwd_range - fwd_range recomputed to 1e-12.
inline OrientationModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("model file is not valid JSON: " + path);

    if (j.value("format", "") != kModelFormat)
        throw DataError("not an orientation model file: " + path);
    const std::string version = j.value("version", "0.0");
    const int major = std::atoi(version.c_str());
    if (major != OrientationModel::kMajorVersion)
        throw DataError("unsupported model version " + version + " (this build reads " +
                        std::to_string(OrientationModel::kMajorVersion) + ".x)");

    OrientationModel model;
    model.config = config_from_json(j.at("config"));

    const auto& vocab = j.at("agent_vocabulary");
    model.agent_vocab.role = Role::Agent;
    model.agent_vocab.total_docs = j.value("agent_total_docs", 0L);
    int expected_id = 0;
    for (const auto& row : vocab) {
        if (row.at("id").get<int>() != expected_id)
            throw DataError("model vocabulary ids are not dense at id " +
                            std::to_string(expected_id));
        ++expected_id;
        const auto phrase = row.at("phrasing").get<std::string>();
        model.agent_vocab.ids.emplace(phrase, model.agent_vocab.size());
        model.agent_vocab.phrasings.push_back(phrase);
        model.agent_vocab.doc_frequency.push_back(row.at("df").get<int>());
        model.agent_vocab.utterance_frequency.push_back(row.at("uf").get<int>());
        model.agent_idf.push_back(row.at("idf").get<double>());
    }

    for (const auto& row : j.at("phrasings")) {
        PhrasingStats ps;
        ps.id = row.at("id").get<int>();
        ps.phrasing = row.at("phrasing").get<std::string>();
        ps.fwd_range = row.at("fwd_range").get<double>();
        ps.bwd_range = row.at("bwd_range").get<double>();
        ps.orientation = row.at("orientation").get<double>();
        ps.n_replies = row.at("n_replies").get<int>();
        ps.n_preds = row.at("n_preds").get<int>();
        if (ps.id < 0 || ps.id >= model.agent_vocab.size())
            throw DataError("model phrasing id out of range: " + std::to_string(ps.id));
        if (ps.fwd_range < 0.0 || ps.fwd_range > 2.0 || ps.bwd_range < 0.0 || ps.bwd_range > 2.0)
            throw DataError("model range outside [0,2] for \"" + ps.phrasing + "\"");
        if (std::abs(ps.orientation - (ps.bwd_range - ps.fwd_range)) > 1e-12)
            throw DataError("model invariant violated: orientation != bwd - fwd for \"" +
                            ps.phrasing + "\"");
        if (row.contains("fwd_center")) {
            const auto fc = row.at("fwd_center").get<std::vector<double>>();
            const auto bc = row.at("bwd_center").get<std::vector<double>>();
            ps.fwd_center = Eigen::Map<const Eigen::VectorXd>(fc.data(),
                                                              static_cast<Eigen::Index>(fc.size()));
            ps.bwd_center = Eigen::Map<const Eigen::VectorXd>(bc.data(),
                                                              static_cast<Eigen::Index>(bc.size()));
        }
        model.stats.push_back(std::move(ps));
    }

    const auto sv = j.value("singular_values", std::vector<double>{});
    model.singular_values =
        Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
    if (j.contains("diagnostics")) model.diagnostics = diagnostics_from_json(j.at("diagnostics"));

    if (j.contains("latent")) {
        const auto& latent = j.at("latent");
        LatentSpace space;
        space.k = latent.at("k").get<int>();
        space.dropped_first = latent.at("dropped_first").get<bool>();
        space.singular_values = model.singular_values;
        const auto& rows = latent.at("row_embeddings");
        space.row_embeddings.resize(static_cast<Eigen::Index>(rows.size()), space.k);
        space.zero_flags.assign(rows.size(), 0);
        Eigen::Index i = 0;
        for (const auto& row : rows) {
            const auto vals = row.get<std::vector<double>>();
            for (int d = 0; d < space.k; ++d)
                space.row_embeddings(i, d) = vals[static_cast<std::size_t>(d)];
            ++i;
        }
        for (int r : latent.at("zero_rows").get<std::vector<int>>())
            space.zero_flags[static_cast<std::size_t>(r)] = 1;
        model.latent = std::move(space);
    }

    model.rebuild_index();
    return model;
}

}  // namespace orient
