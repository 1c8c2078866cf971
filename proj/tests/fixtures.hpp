#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "orient/corpus.hpp"
#include "orient/config.hpp"
#include "orient/synth.hpp"

namespace fixtures {

inline orient::Utterance make_utterance(const std::string& conv_id, int index, orient::Role role,
                                        const std::string& text) {
    orient::Utterance u;
    u.conversation_id = conv_id;
    u.utterance_id = conv_id + "-u" + std::to_string(index);
    u.role = role;
    u.index = index;
    u.text = text;
    u.word_count = orient::whitespace_word_count(text);
    return u;
}

inline orient::Conversation make_conversation(
    const std::string& conv_id,
    const std::vector<std::pair<orient::Role, std::string>>& turns) {
    orient::Conversation conv;
    conv.conversation_id = conv_id;
    int index = 0;
    for (const auto& [role, text] : turns) {
        conv.utterances.push_back(make_utterance(conv_id, index, role, text));
        ++index;
    }
    return conv;
}

// Scratch directory for files a test writes; removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("orient-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Small config suited to the planted fixtures used throughout the tests.
inline orient::RunConfig fixture_config(int latent_dims = 5, int min_support = 5) {
    orient::RunConfig cfg;
    cfg.latent_dims = latent_dims;
    cfg.min_support = min_support;
    cfg.agent_top_k = 0;
    cfg.client_top_k = 0;
    cfg.svd.tolerance = 1e-12;
    cfg.svd.max_iters = 5000;
    return cfg;
}

// A compact planted corpus (<= 200 utterances when turns/conversations kept
// at the defaults below).
inline orient::PlantedSpec small_planted_spec(std::uint64_t seed, int conversations = 11,
                                              int turns = 8) {
    orient::PlantedSpec spec;
    spec.n_conversations = conversations;
    spec.turns_per_conversation = turns;
    spec.words_per_message = 18;
    spec.noise_rate = 0.15;
    spec.seed = seed;
    spec.client_background_words = 60;
    spec.agent_filler_words = 30;
    spec.prompt_phrasings = {"promptcue000", "promptcue001"};
    spec.reflect_phrasings = {"reflectcue000", "reflectcue001"};
    spec.neutral_phrasings = {"neutralcue000", "neutralcue001"};
    for (int c = 0; c < 3; ++c)
        spec.topic_clusters.push_back(orient::detail::numbered_words(
            "topic" + std::string(1, static_cast<char>('a' + c)), 25));
    return spec;
}

}  // namespace fixtures
