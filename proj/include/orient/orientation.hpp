#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orient/config.hpp"
#include "orient/corpus.hpp"
#include "orient/embedding.hpp"
#include "orient/errors.hpp"
#include "orient/phrasing.hpp"
#include "orient/vectorize.hpp"

namespace orient {

// Per-phrasing context sets: for every agent phrasing, the client utterances
// observed as replies to (and predecessors of) agent utterances containing
// it, weighted by the phrasing's entry in the unit-normalized tf-idf vector
// of that agent utterance.
struct ContextMembers {
    std::vector<WeightedMember> replies;
    std::vector<WeightedMember> predecessors;
};

struct ContextSets {
    std::vector<ContextMembers> by_id;       // indexed by agent vocabulary id
    std::vector<std::uint8_t> supported;     // met the support floor in both directions
    int observed = 0;                        // phrasings with at least one member
    int dropped_min_support = 0;
};

// A training pair located in the canonical conversation list.
struct PairRef {
    int conv = 0;  // canonical conversation ordinal
    ContextPair pair;
};

inline ContextSets collect_context_sets(const std::vector<PairRef>& pairs,
                                        const SparseMatrix& agent_matrix,
                                        const std::vector<std::vector<int>>& agent_rows,
                                        const std::vector<std::vector<int>>& client_rows,
                                        const LatentSpace& client_space, int min_support) {
    ContextSets sets;
    sets.by_id.resize(static_cast<std::size_t>(agent_matrix.n_cols));
    sets.supported.assign(static_cast<std::size_t>(agent_matrix.n_cols), 0);

    for (const auto& ref : pairs) {
        const int arow = agent_rows[static_cast<std::size_t>(ref.conv)]
                                   [static_cast<std::size_t>(ref.pair.agent_index)];
        const int crow = client_rows[static_cast<std::size_t>(ref.conv)]
                                    [static_cast<std::size_t>(ref.pair.client_index)];
        if (arow < 0 || crow < 0) continue;
        if (client_space.is_zero_row(crow)) continue;
        for (std::int64_t k = agent_matrix.row_ptr[arow]; k < agent_matrix.row_ptr[arow + 1]; ++k) {
            const int w = agent_matrix.col_idx[k];
            const double weight = agent_matrix.values[k];
            if (weight <= 0.0) continue;
            auto& members = sets.by_id[static_cast<std::size_t>(w)];
            if (ref.pair.direction == PairDirection::Reply)
                members.replies.push_back({crow, weight});
            else
                members.predecessors.push_back({crow, weight});
        }
    }

    for (std::size_t w = 0; w < sets.by_id.size(); ++w) {
        const auto& members = sets.by_id[w];
        const int nr = static_cast<int>(members.replies.size());
        const int np = static_cast<int>(members.predecessors.size());
        if (nr == 0 && np == 0) continue;
        ++sets.observed;
        if (nr >= min_support && np >= min_support)
            sets.supported[w] = 1;
        else
            ++sets.dropped_min_support;
    }
    return sets;
}

struct RangeResult {
    double range = 0.0;
    Eigen::VectorXd center;
};

// The spread of a weighted member set: the unweighted mean cosine distance
// from each member embedding to the set's central point. The center is the
// weighted average mapped through the inverse singular values (or the plain
// weighted sum when configured). Undefined when the center degenerates.
inline std::optional<RangeResult> compute_range(const std::vector<WeightedMember>& members,
                                                const LatentSpace& space,
                                                CentralPointMode mode = CentralPointMode::Paper) {
    Eigen::VectorXd center = Eigen::VectorXd::Zero(space.k);
    int usable = 0;
    for (const auto& m : members) {
        if (m.weight <= 0.0 || space.is_zero_row(m.row)) continue;
        center += m.weight * space.row_embeddings.row(m.row).transpose();
        ++usable;
    }
    if (usable == 0) return std::nullopt;
    if (mode == CentralPointMode::Paper)
        center = center.cwiseQuotient(space.singular_values);
    if (center.norm() < kZeroRowNorm) return std::nullopt;

    double sum = 0.0;
    for (const auto& m : members) {
        if (m.weight <= 0.0 || space.is_zero_row(m.row)) continue;
        sum += cosine_distance(space.row_embeddings.row(m.row).transpose(), center);
    }
    return RangeResult{sum / static_cast<double>(usable), std::move(center)};
}

struct PhrasingStats {
    int id = 0;
    std::string phrasing;
    double fwd_range = 0.0;     // spread of observed replies
    double bwd_range = 0.0;     // spread of observed predecessors
    double orientation = 0.0;   // bwd_range - fwd_range
    int n_replies = 0;
    int n_preds = 0;
    Eigen::VectorXd fwd_center;
    Eigen::VectorXd bwd_center;
};

struct FitDiagnostics {
    int n_conversations = 0;
    long n_utterances = 0;
    long n_pairs = 0;
    long n_pairs_kept = 0;
    int n_agent_docs = 0;
    int n_client_docs = 0;
    int agent_vocab_size = 0;
    int client_vocab_size = 0;
    int n_client_zero_rows = 0;
    int phrasings_observed = 0;
    int phrasings_scored = 0;
    int dropped_min_support = 0;
    int dropped_degenerate = 0;
    int tfidf_zero_df_warnings = 0;
    int svd_iterations = 0;
    double svd_last_change = 0.0;
};

struct OrientationModel {
    static constexpr int kMajorVersion = 1;
    static constexpr int kMinorVersion = 0;

    RunConfig config;
    Vocabulary agent_vocab;
    std::vector<double> agent_idf;           // by agent vocabulary id
    std::vector<PhrasingStats> stats;        // ascending id
    std::vector<int> stats_index;            // vocab id -> index into stats, or -1
    Eigen::VectorXd singular_values;         // retained client spectrum (diagnostics)
    FitDiagnostics diagnostics;
    std::optional<LatentSpace> latent;       // populated on request only

    const PhrasingStats* stats_for(int id) const {
        if (id < 0 || id >= static_cast<int>(stats_index.size())) return nullptr;
        const int ix = stats_index[static_cast<std::size_t>(id)];
        return ix < 0 ? nullptr : &stats[static_cast<std::size_t>(ix)];
    }

    void rebuild_index() {
        stats_index.assign(static_cast<std::size_t>(agent_vocab.size()), -1);
        for (std::size_t i = 0; i < stats.size(); ++i)
            stats_index[static_cast<std::size_t>(stats[i].id)] = static_cast<int>(i);
    }
};

// Everything the fit produces besides the model; handed back for diagnostics
// and verification.
struct FitArtifacts {
    std::vector<int> canonical_order;                 // corpus ordinal per processing slot
    std::vector<Conversation> merged;                 // canonical order
    std::vector<std::vector<ContextPair>> kept_pairs; // per canonical conversation
    std::vector<std::vector<int>> agent_rows;         // conv -> utterance index -> row (-1 none)
    std::vector<std::vector<int>> client_rows;
    TfIdfModel client_tfidf;
    SparseMatrix client_matrix;
    TfIdfModel agent_tfidf;
    SparseMatrix agent_matrix;
    SvdResult svd;
    LatentSpace space;
    ContextSets sets;
};

namespace detail {

// Training document membership per the configured policy.
inline void mark_training_docs(const std::vector<Conversation>& merged,
                               const std::vector<std::vector<ContextPair>>& kept_pairs,
                               TrainingDocsPolicy policy,
                               std::vector<std::vector<std::uint8_t>>& agent_in,
                               std::vector<std::vector<std::uint8_t>>& client_in) {
    agent_in.resize(merged.size());
    client_in.resize(merged.size());
    for (std::size_t c = 0; c < merged.size(); ++c) {
        agent_in[c].assign(merged[c].utterances.size(), 0);
        client_in[c].assign(merged[c].utterances.size(), 0);
        if (kept_pairs[c].empty()) continue;
        if (policy == TrainingDocsPolicy::Pairs) {
            for (const auto& p : kept_pairs[c]) {
                agent_in[c][static_cast<std::size_t>(p.agent_index)] = 1;
                client_in[c][static_cast<std::size_t>(p.client_index)] = 1;
            }
        } else {
            for (const auto& utt : merged[c].utterances) {
                auto& side = utt.role == Role::Agent ? agent_in : client_in;
                side[c][static_cast<std::size_t>(utt.index)] = 1;
            }
        }
    }
}

}  // namespace detail

// End-to-end fit: merge, pair, filter, vocabularies, client tf-idf + SVD
// latent space, agent tf-idf weights, context sets, per-phrasing ranges and
// orientations. Conversations are processed in conversation_id order so the
// result is independent of file order. Deterministic given the seed.
inline OrientationModel fit_orientation(const Corpus& corpus, const RunConfig& cfg,
                                        FitArtifacts* artifacts = nullptr) {
    cfg.validate();

    FitArtifacts local;
    FitArtifacts& art = artifacts ? *artifacts : local;

    art.canonical_order.resize(corpus.conversations.size());
    for (std::size_t i = 0; i < corpus.conversations.size(); ++i)
        art.canonical_order[i] = static_cast<int>(i);
    std::sort(art.canonical_order.begin(), art.canonical_order.end(), [&](int a, int b) {
        return corpus.conversations[static_cast<std::size_t>(a)].conversation_id <
               corpus.conversations[static_cast<std::size_t>(b)].conversation_id;
    });

    OrientationModel model;
    model.config = cfg;
    FitDiagnostics& diag = model.diagnostics;
    diag.n_conversations = static_cast<int>(corpus.conversations.size());

    art.merged.reserve(corpus.conversations.size());
    art.kept_pairs.resize(corpus.conversations.size());
    for (std::size_t slot = 0; slot < art.canonical_order.size(); ++slot) {
        const auto& conv =
            corpus.conversations[static_cast<std::size_t>(art.canonical_order[slot])];
        art.merged.push_back(merge_consecutive(conv));
        const Conversation& m = art.merged.back();
        diag.n_utterances += static_cast<long>(m.utterances.size());
        auto pairs = extract_pairs(m);
        diag.n_pairs += static_cast<long>(pairs.size());
        art.kept_pairs[slot] = filter_training_pairs(m, pairs, cfg.min_words, cfg.max_words);
        diag.n_pairs_kept += static_cast<long>(art.kept_pairs[slot].size());
    }

    std::vector<std::vector<std::uint8_t>> agent_in, client_in;
    detail::mark_training_docs(art.merged, art.kept_pairs, cfg.training_docs, agent_in, client_in);

    // Documents in canonical order; rows aligned with these lists.
    std::vector<std::vector<std::vector<std::string>>> agent_sentences, client_sentences;
    art.agent_rows.resize(art.merged.size());
    art.client_rows.resize(art.merged.size());
    for (std::size_t c = 0; c < art.merged.size(); ++c) {
        art.agent_rows[c].assign(art.merged[c].utterances.size(), -1);
        art.client_rows[c].assign(art.merged[c].utterances.size(), -1);
        for (const auto& utt : art.merged[c].utterances) {
            const auto ix = static_cast<std::size_t>(utt.index);
            const bool is_agent = utt.role == Role::Agent;
            if (is_agent && !agent_in[c][ix]) continue;
            if (!is_agent && !client_in[c][ix]) continue;
            const ExtractorConfig& ex = is_agent ? cfg.agent_extractor : cfg.client_extractor;
            std::vector<std::vector<std::string>> lists;
            for (auto& s : sentence_phrasings(utt, ex)) lists.push_back(std::move(s.phrasings));
            if (is_agent) {
                art.agent_rows[c][ix] = static_cast<int>(agent_sentences.size());
                agent_sentences.push_back(std::move(lists));
            } else {
                art.client_rows[c][ix] = static_cast<int>(client_sentences.size());
                client_sentences.push_back(std::move(lists));
            }
        }
    }
    diag.n_agent_docs = static_cast<int>(agent_sentences.size());
    diag.n_client_docs = static_cast<int>(client_sentences.size());
    if (agent_sentences.empty() || client_sentences.empty())
        throw DataError("fit_orientation: no training documents survive the pair filter (" +
                        std::to_string(diag.n_pairs_kept) + " pairs kept); empty vocabulary");

    Vocabulary agent_vocab = build_vocabulary(agent_sentences, Role::Agent, cfg.agent_top_k,
                                              cfg.agent_min_utterances);
    Vocabulary client_vocab = build_vocabulary(client_sentences, Role::Client, cfg.client_top_k,
                                               cfg.client_min_utterances);
    diag.agent_vocab_size = agent_vocab.size();
    diag.client_vocab_size = client_vocab.size();

    std::vector<Bag> client_bags;
    client_bags.reserve(client_sentences.size());
    for (const auto& s : client_sentences) client_bags.push_back(make_bag(s, client_vocab));
    art.client_tfidf = fit_tfidf(client_bags, std::move(client_vocab), true, cfg.log_tf);
    art.client_matrix = transform_tfidf(client_bags, art.client_tfidf);

    std::vector<int> client_zero_rows;
    for (int i = 0; i < art.client_matrix.n_rows; ++i)
        if (art.client_matrix.row_is_zero(i)) client_zero_rows.push_back(i);
    diag.n_client_zero_rows = static_cast<int>(client_zero_rows.size());

    const int k_total = cfg.svd_total_dims();
    if (k_total > std::min(art.client_matrix.n_rows, art.client_matrix.n_cols))
        throw ConfigError("fit_orientation: latent_dims too large for a " +
                          std::to_string(art.client_matrix.n_rows) + "x" +
                          std::to_string(art.client_matrix.n_cols) + " client matrix");
    art.svd = truncated_svd(art.client_matrix, k_total, cfg.seed, cfg.svd);
    diag.svd_iterations = art.svd.iterations;
    diag.svd_last_change = art.svd.last_change;
    art.space = make_latent_space(art.svd, cfg.latent_dims, cfg.drop_first, client_zero_rows);

    std::vector<Bag> agent_bags;
    agent_bags.reserve(agent_sentences.size());
    for (const auto& s : agent_sentences) agent_bags.push_back(make_bag(s, agent_vocab));
    art.agent_tfidf = fit_tfidf(agent_bags, std::move(agent_vocab), true, cfg.log_tf);
    art.agent_matrix = transform_tfidf(agent_bags, art.agent_tfidf);
    diag.tfidf_zero_df_warnings =
        art.client_tfidf.zero_df_warnings + art.agent_tfidf.zero_df_warnings;

    std::vector<PairRef> pair_refs;
    pair_refs.reserve(static_cast<std::size_t>(diag.n_pairs_kept));
    for (std::size_t c = 0; c < art.merged.size(); ++c)
        for (const auto& p : art.kept_pairs[c]) pair_refs.push_back({static_cast<int>(c), p});

    art.sets = collect_context_sets(pair_refs, art.agent_matrix, art.agent_rows, art.client_rows,
                                    art.space, cfg.min_support);
    diag.phrasings_observed = art.sets.observed;
    diag.dropped_min_support = art.sets.dropped_min_support;

    for (int w = 0; w < art.agent_tfidf.vocabulary.size(); ++w) {
        if (!art.sets.supported[static_cast<std::size_t>(w)]) continue;
        const auto& members = art.sets.by_id[static_cast<std::size_t>(w)];
        auto fwd = compute_range(members.replies, art.space, cfg.central_point_mode);
        auto bwd = compute_range(members.predecessors, art.space, cfg.central_point_mode);
        if (!fwd || !bwd) {
            ++diag.dropped_degenerate;
            continue;
        }
        PhrasingStats ps;
        ps.id = w;
        ps.phrasing = art.agent_tfidf.vocabulary.phrasings[static_cast<std::size_t>(w)];
        ps.fwd_range = fwd->range;
        ps.bwd_range = bwd->range;
        ps.orientation = ps.bwd_range - ps.fwd_range;
        ps.n_replies = static_cast<int>(members.replies.size());
        ps.n_preds = static_cast<int>(members.predecessors.size());
        ps.fwd_center = std::move(fwd->center);
        ps.bwd_center = std::move(bwd->center);
        model.stats.push_back(std::move(ps));
    }
    diag.phrasings_scored = static_cast<int>(model.stats.size());
    if (model.stats.empty())
        throw DataError("fit_orientation: no phrasing met the support floor (min_support=" +
                        std::to_string(cfg.min_support) + "); empty vocabulary of scored phrasings");

    model.agent_vocab = art.agent_tfidf.vocabulary;
    model.agent_idf = art.agent_tfidf.idf;
    model.singular_values = art.space.singular_values;
    model.rebuild_index();
    return model;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

struct SentenceScore {
    int position = 0;
    std::optional<double> omega;
    int covered_phrasings = 0;  // distinct in-model phrasings in the sentence
};

struct UtteranceScore {
    std::vector<SentenceScore> sentences;
    std::optional<double> omega_min;
    std::optional<double> omega_max;
};

// tf-idf weighted average orientation of the sentence's in-model phrasings;
// nullopt when the sentence has none.
inline std::optional<double> score_sentence(const std::vector<std::string>& phrasings,
                                            const OrientationModel& model,
                                            int* covered = nullptr) {
    std::map<int, int> tf;
    for (const auto& p : phrasings) {
        const int id = model.agent_vocab.id_of(p);
        if (id >= 0 && model.stats_for(id)) ++tf[id];
    }
    if (covered) *covered = static_cast<int>(tf.size());
    if (tf.empty()) return std::nullopt;
    double weight_sum = 0.0;
    double acc = 0.0;
    for (const auto& [id, count] : tf) {
        const double w = static_cast<double>(count) * model.agent_idf[static_cast<std::size_t>(id)];
        acc += w * model.stats_for(id)->orientation;
        weight_sum += w;
    }
    if (weight_sum <= 0.0) return std::nullopt;
    return acc / weight_sum;
}

inline UtteranceScore score_utterance(const Utterance& utt, const OrientationModel& model) {
    UtteranceScore result;
    for (const auto& sentence : sentence_phrasings(utt, model.config.agent_extractor)) {
        SentenceScore ss;
        ss.position = sentence.position;
        ss.omega = score_sentence(sentence.phrasings, model, &ss.covered_phrasings);
        if (ss.omega) {
            if (!result.omega_min || *ss.omega < *result.omega_min) result.omega_min = ss.omega;
            if (!result.omega_max || *ss.omega > *result.omega_max) result.omega_max = ss.omega;
        }
        result.sentences.push_back(std::move(ss));
    }
    return result;
}

struct ScoredUtterance {
    std::string conversation_id;
    std::string utterance_id;
    int index = 0;
    UtteranceScore score;
};

struct CoverageStats {
    long n_utterances = 0;
    long n_scored_utterances = 0;
    long n_sentences = 0;
    long n_scored_sentences = 0;

    double sentence_coverage() const {
        return n_sentences == 0 ? 0.0
                                : static_cast<double>(n_scored_sentences) /
                                      static_cast<double>(n_sentences);
    }
    double utterance_coverage() const {
        return n_utterances == 0 ? 0.0
                                 : static_cast<double>(n_scored_utterances) /
                                       static_cast<double>(n_utterances);
    }
};

// Scores every utterance of the given role in a merged corpus.
inline std::vector<ScoredUtterance> score_corpus(const Corpus& corpus,
                                                 const OrientationModel& model,
                                                 Role role = Role::Agent,
                                                 CoverageStats* coverage = nullptr) {
    std::vector<ScoredUtterance> rows;
    CoverageStats local;
    CoverageStats& cov = coverage ? *coverage : local;
    for (const auto& conv : corpus.conversations) {
        for (const auto& utt : conv.utterances) {
            if (utt.role != role) continue;
            ScoredUtterance row;
            row.conversation_id = conv.conversation_id;
            row.utterance_id = utt.utterance_id;
            row.index = utt.index;
            row.score = score_utterance(utt, model);
            ++cov.n_utterances;
            if (row.score.omega_min) ++cov.n_scored_utterances;
            cov.n_sentences += static_cast<long>(row.score.sentences.size());
            for (const auto& s : row.score.sentences)
                if (s.omega) ++cov.n_scored_sentences;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace orient
