#pragma once

#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "orient/corpus.hpp"
#include "orient/errors.hpp"
#include "orient/rng.hpp"

namespace orient {

// Synthetic two-party corpus with planted structure. Prompt phrasings are
// agent tokens whose replies are drawn from one assigned topic cluster while
// their predecessors are uniform background (so they should come out
// forwards-oriented); reflect phrasings are the mirror construction. Agent
// messages alternate between planted and neutral slots so that no client
// message is constrained from both sides.
struct PlantedSpec {
    int n_conversations = 200;
    int turns_per_conversation = 12;  // agent messages; total utterances = 2*turns + 1
    int words_per_message = 20;       // inside the default 15..45 training filter

    std::vector<std::vector<std::string>> topic_clusters;  // defaults: 3 x 40 words
    std::vector<std::string> prompt_phrasings;             // defaults: 4
    std::vector<std::string> reflect_phrasings;            // defaults: 4
    std::vector<std::string> neutral_phrasings;            // defaults: 4
    int client_background_words = 120;
    int agent_filler_words = 80;

    double noise_rate = 0.2;     // chance a cluster word is replaced by background
    bool stage_gradient = false; // prompt probability ramps up along the conversation
    std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<std::string> numbered_words(const std::string& prefix, int n) {
    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(n));
    char buf[64];
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof(buf), "%s%03d", prefix.c_str(), i);
        words.emplace_back(buf);
    }
    return words;
}

enum class SlotKind { Prompt, Reflect, Neutral };

}  // namespace detail

// Fills in the default clusters and phrasing lists for any field left empty.
inline PlantedSpec with_defaults(PlantedSpec spec, int n_clusters = 3) {
    if (spec.topic_clusters.empty())
        for (int c = 0; c < n_clusters; ++c)
            spec.topic_clusters.push_back(
                detail::numbered_words("topic" + std::string(1, static_cast<char>('a' + c)), 40));
    if (spec.prompt_phrasings.empty())
        spec.prompt_phrasings = detail::numbered_words("promptcue", 4);
    if (spec.reflect_phrasings.empty())
        spec.reflect_phrasings = detail::numbered_words("reflectcue", 4);
    if (spec.neutral_phrasings.empty())
        spec.neutral_phrasings = detail::numbered_words("neutralcue", 4);
    return spec;
}

inline void validate_spec(const PlantedSpec& spec) {
    if (spec.n_conversations < 1 || spec.turns_per_conversation < 1)
        throw ConfigError("planted spec: need at least one conversation and one turn");
    if (spec.words_per_message < 2) throw ConfigError("planted spec: messages too short");
    if (spec.noise_rate < 0.0 || spec.noise_rate >= 1.0)
        throw ConfigError("planted spec: noise_rate must be in [0, 1)");
    if (spec.topic_clusters.empty()) throw ConfigError("planted spec: no topic clusters");
    std::set<std::string> seen;
    for (const auto& cluster : spec.topic_clusters) {
        if (cluster.empty()) throw ConfigError("planted spec: empty topic cluster");
        for (const auto& w : cluster)
            if (!seen.insert(w).second)
                throw ConfigError("planted spec: clusters overlap on word \"" + w + "\"");
    }
    std::set<std::string> phr;
    for (const auto* list :
         {&spec.prompt_phrasings, &spec.reflect_phrasings, &spec.neutral_phrasings})
        for (const auto& p : *list)
            if (!phr.insert(p).second)
                throw ConfigError("planted spec: phrasing lists overlap on \"" + p + "\"");
    if (spec.prompt_phrasings.empty() || spec.reflect_phrasings.empty())
        throw ConfigError("planted spec: need prompt and reflect phrasings");
}

inline Corpus generate_planted_corpus(const PlantedSpec& spec) {
    validate_spec(spec);

    const std::vector<std::string> background =
        detail::numbered_words("bg", spec.client_background_words);
    const std::vector<std::string> filler =
        detail::numbered_words("fill", spec.agent_filler_words);

    // full client vocabulary for uniform/background draws
    std::vector<std::string> client_pool = background;
    for (const auto& cluster : spec.topic_clusters)
        client_pool.insert(client_pool.end(), cluster.begin(), cluster.end());

    auto cluster_of = [&](const std::string& phrase, const std::vector<std::string>& list) {
        for (std::size_t i = 0; i < list.size(); ++i)
            if (list[i] == phrase)
                return static_cast<int>(i % spec.topic_clusters.size());
        return 0;
    };

    Corpus corpus;
    char buf[64];
    for (int c = 0; c < spec.n_conversations; ++c) {
        Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(c)));
        const int turns = spec.turns_per_conversation;

        // agent slot plan: planted on even slots, neutral on odd ones
        std::vector<detail::SlotKind> kinds(static_cast<std::size_t>(turns));
        std::vector<std::string> planted(static_cast<std::size_t>(turns));
        for (int t = 0; t < turns; ++t) {
            if (t % 2 == 1) {
                kinds[static_cast<std::size_t>(t)] = detail::SlotKind::Neutral;
                planted[static_cast<std::size_t>(t)] = rng.pick(spec.neutral_phrasings);
                continue;
            }
            double p_prompt = 0.5;
            if (spec.stage_gradient) {
                const double pos =
                    turns > 1 ? static_cast<double>(t) / static_cast<double>(turns - 1) : 1.0;
                p_prompt = 0.05 + 0.9 * pos;
            }
            if (rng.bernoulli(p_prompt)) {
                kinds[static_cast<std::size_t>(t)] = detail::SlotKind::Prompt;
                planted[static_cast<std::size_t>(t)] = rng.pick(spec.prompt_phrasings);
            } else {
                kinds[static_cast<std::size_t>(t)] = detail::SlotKind::Reflect;
                planted[static_cast<std::size_t>(t)] = rng.pick(spec.reflect_phrasings);
            }
        }

        auto draw_client_words = [&](int controlled_cluster) {
            std::string text;
            for (int w = 0; w < spec.words_per_message; ++w) {
                const bool noisy = controlled_cluster >= 0 && rng.bernoulli(spec.noise_rate);
                const std::string& word =
                    controlled_cluster < 0 || noisy
                        ? rng.pick(client_pool)
                        : rng.pick(spec.topic_clusters[static_cast<std::size_t>(controlled_cluster)]);
                if (w) text += ' ';
                text += word;
            }
            return text;
        };

        Conversation conv;
        std::snprintf(buf, sizeof(buf), "synth-%05d", c);
        conv.conversation_id = buf;

        int index = 0;
        auto add = [&](Role role, std::string text) {
            Utterance utt;
            utt.conversation_id = conv.conversation_id;
            std::snprintf(buf, sizeof(buf), "%s-u%03d", conv.conversation_id.c_str(), index);
            utt.utterance_id = buf;
            utt.role = role;
            utt.index = index++;
            utt.text = std::move(text);
            utt.word_count = whitespace_word_count(utt.text);
            conv.utterances.push_back(std::move(utt));
        };

        for (int t = 0; t <= turns; ++t) {
            // client slot before agent turn t (the final slot has no agent after it)
            int controlled = -1;
            if (t > 0 && kinds[static_cast<std::size_t>(t - 1)] == detail::SlotKind::Prompt)
                controlled = cluster_of(planted[static_cast<std::size_t>(t - 1)], spec.prompt_phrasings);
            else if (t < turns && kinds[static_cast<std::size_t>(t)] == detail::SlotKind::Reflect)
                controlled = cluster_of(planted[static_cast<std::size_t>(t)], spec.reflect_phrasings);
            add(Role::Client, draw_client_words(controlled));

            if (t == turns) break;
            std::string text = planted[static_cast<std::size_t>(t)];
            for (int w = 1; w < spec.words_per_message; ++w) {
                text += ' ';
                text += rng.pick(filler);
            }
            add(Role::Agent, std::move(text));
        }
        corpus.conversations.push_back(std::move(conv));
    }
    return corpus;
}

// Sidecar ground truth: which phrasing is planted in which direction, plus
// the cluster words.
inline nlohmann::ordered_json planted_ground_truth(const PlantedSpec& spec) {
    nlohmann::ordered_json j;
    j["prompt_phrasings"] = spec.prompt_phrasings;
    j["reflect_phrasings"] = spec.reflect_phrasings;
    j["neutral_phrasings"] = spec.neutral_phrasings;
    j["topic_clusters"] = spec.topic_clusters;
    j["noise_rate"] = spec.noise_rate;
    j["stage_gradient"] = spec.stage_gradient;
    j["seed"] = spec.seed;
    j["n_conversations"] = spec.n_conversations;
    j["turns_per_conversation"] = spec.turns_per_conversation;
    return j;
}

}  // namespace orient
