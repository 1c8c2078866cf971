#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orient/config.hpp"
#include "orient/corpus.hpp"
#include "orient/orientation.hpp"
#include "orient/phrasing.hpp"
#include "orient/vectorize.hpp"

namespace orient {

// A single tf-idf space over the union of both roles' utterances, so agent
// messages can be compared with their client neighbors directly. Each
// utterance is tokenized with its own role's extractor; the vocabulary is
// uncapped.
struct SharedSpace {
    TfIdfModel tfidf;
    SparseMatrix matrix;
    std::vector<std::vector<int>> rows;  // conversation ordinal -> utterance index -> row
};

inline SharedSpace build_shared_space(const Corpus& merged, const ExtractorConfig& agent_ex,
                                      const ExtractorConfig& client_ex) {
    std::vector<std::vector<std::vector<std::string>>> docs;
    SharedSpace space;
    space.rows.resize(merged.conversations.size());
    for (std::size_t c = 0; c < merged.conversations.size(); ++c) {
        const auto& conv = merged.conversations[c];
        space.rows[c].assign(conv.utterances.size(), -1);
        for (const auto& utt : conv.utterances) {
            const ExtractorConfig& ex = utt.role == Role::Agent ? agent_ex : client_ex;
            std::vector<std::vector<std::string>> lists;
            for (auto& s : sentence_phrasings(utt, ex)) lists.push_back(std::move(s.phrasings));
            space.rows[c][static_cast<std::size_t>(utt.index)] = static_cast<int>(docs.size());
            docs.push_back(std::move(lists));
        }
    }
    if (docs.empty()) throw DataError("build_shared_space: empty corpus");
    Vocabulary vocab = build_vocabulary(docs, Role::Agent, /*top_k=*/0, /*min_utterances=*/1);
    std::vector<Bag> bags;
    bags.reserve(docs.size());
    for (const auto& d : docs) bags.push_back(make_bag(d, vocab));
    space.tfidf = fit_tfidf(bags, std::move(vocab), true);
    space.matrix = transform_tfidf(bags, space.tfidf);
    return space;
}

// cosine_distance(utterance, reply) - cosine_distance(utterance, predecessor)
// in the shared tf-idf space. nullopt when a neighbor is missing or any of
// the three vectors is zero.
inline std::optional<double> naive_distance(const SharedSpace& space, int conv, int utt_index) {
    const auto& rows = space.rows[static_cast<std::size_t>(conv)];
    const int n = static_cast<int>(rows.size());
    if (utt_index - 1 < 0 || utt_index + 1 >= n) return std::nullopt;
    const int self = rows[static_cast<std::size_t>(utt_index)];
    const int pred = rows[static_cast<std::size_t>(utt_index - 1)];
    const int reply = rows[static_cast<std::size_t>(utt_index + 1)];
    if (self < 0 || pred < 0 || reply < 0) return std::nullopt;
    if (space.matrix.row_is_zero(self) || space.matrix.row_is_zero(pred) ||
        space.matrix.row_is_zero(reply))
        return std::nullopt;
    return cosine_distance_rows(space.matrix, self, reply) -
           cosine_distance_rows(space.matrix, self, pred);
}

// Minimum over sentences of the tf-idf weighted average backwards-range of
// the sentence's in-model phrasings; nullopt without coverage. Uses the
// fitted model's ranges as-is.
inline std::optional<double> backwards_range_score(const Utterance& utt,
                                                   const OrientationModel& model) {
    std::optional<double> best;
    for (const auto& sentence : sentence_phrasings(utt, model.config.agent_extractor)) {
        std::map<int, int> tf;
        for (const auto& p : sentence.phrasings) {
            const int id = model.agent_vocab.id_of(p);
            if (id >= 0 && model.stats_for(id)) ++tf[id];
        }
        if (tf.empty()) continue;
        double acc = 0.0, weight_sum = 0.0;
        for (const auto& [id, count] : tf) {
            const double w =
                static_cast<double>(count) * model.agent_idf[static_cast<std::size_t>(id)];
            acc += w * model.stats_for(id)->bwd_range;
            weight_sum += w;
        }
        if (weight_sum <= 0.0) continue;
        const double sentence_score = acc / weight_sum;
        if (!best || sentence_score < *best) best = sentence_score;
    }
    return best;
}

// Literal rule: the message contains a '?' character.
inline bool has_question(const std::string& text) {
    return text.find('?') != std::string::npos;
}

struct BaselineRow {
    std::string conversation_id;
    std::string utterance_id;
    int index = 0;
    std::optional<double> naive_distance;
    std::optional<double> bwd_range_min;
    bool has_question = false;
};

// All three alternative measures for every agent utterance of a merged
// corpus.
inline std::vector<BaselineRow> compute_baselines(const Corpus& merged,
                                                  const OrientationModel& model) {
    SharedSpace space = build_shared_space(merged, model.config.agent_extractor,
                                           model.config.client_extractor);
    std::vector<BaselineRow> rows;
    for (std::size_t c = 0; c < merged.conversations.size(); ++c) {
        const auto& conv = merged.conversations[c];
        for (const auto& utt : conv.utterances) {
            if (utt.role != Role::Agent) continue;
            BaselineRow row;
            row.conversation_id = conv.conversation_id;
            row.utterance_id = utt.utterance_id;
            row.index = utt.index;
            row.naive_distance = naive_distance(space, static_cast<int>(c), utt.index);
            row.bwd_range_min = backwards_range_score(utt, model);
            row.has_question = has_question(utt.text);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace orient
