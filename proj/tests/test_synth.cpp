#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "orient/synth.hpp"

#include "fixtures.hpp"

using namespace orient;

TEST_CASE("planted spec validation") {
    PlantedSpec spec = with_defaults(PlantedSpec{});
    CHECK_NOTHROW(validate_spec(spec));

    SECTION("overlapping clusters are rejected") {
        PlantedSpec bad = spec;
        bad.topic_clusters[1][0] = bad.topic_clusters[0][0];
        CHECK_THROWS_AS(validate_spec(bad), ConfigError);
    }
    SECTION("overlapping phrasing lists are rejected") {
        PlantedSpec bad = spec;
        bad.neutral_phrasings.push_back(bad.prompt_phrasings[0]);
        CHECK_THROWS_AS(validate_spec(bad), ConfigError);
    }
    SECTION("noise rate bounds") {
        PlantedSpec bad = spec;
        bad.noise_rate = 1.0;
        CHECK_THROWS_AS(validate_spec(bad), ConfigError);
    }
}

TEST_CASE("generator shape and determinism") {
    PlantedSpec spec = fixtures::small_planted_spec(5, 9, 7);
    Corpus a = generate_planted_corpus(spec);
    Corpus b = generate_planted_corpus(spec);

    SECTION("alternating roles, client first and last") {
        for (const auto& conv : a.conversations) {
            REQUIRE(conv.utterances.size() ==
                    static_cast<std::size_t>(2 * spec.turns_per_conversation + 1));
            CHECK(conv.utterances.front().role == Role::Client);
            CHECK(conv.utterances.back().role == Role::Client);
            for (std::size_t i = 1; i < conv.utterances.size(); ++i)
                CHECK(conv.utterances[i].role != conv.utterances[i - 1].role);
        }
    }
    SECTION("word counts sit inside the default training filter") {
        for (const auto& conv : a.conversations)
            for (const auto& utt : conv.utterances) {
                CHECK(utt.word_count >= 15);
                CHECK(utt.word_count <= 45);
            }
    }
    SECTION("same seed gives byte-identical corpora") {
        std::ostringstream sa, sb;
        save_corpus(a, sa);
        save_corpus(b, sb);
        CHECK(sa.str() == sb.str());
    }
    SECTION("different seeds differ") {
        PlantedSpec other = spec;
        other.seed = spec.seed + 1;
        std::ostringstream sa, sc;
        save_corpus(a, sa);
        save_corpus(generate_planted_corpus(other), sc);
        CHECK(sa.str() != sc.str());
    }
}

TEST_CASE("noise-free replies to a prompt contain only its cluster words") {
    PlantedSpec spec;
    spec.n_conversations = 10;
    spec.turns_per_conversation = 6;
    spec.words_per_message = 16;
    spec.noise_rate = 0.0;
    spec.seed = 3;
    spec.prompt_phrasings = {"promptcue000"};      // maps to cluster 0
    spec.reflect_phrasings = {"reflectcue000"};
    spec.neutral_phrasings = {"neutralcue000"};
    spec.topic_clusters = {orient::detail::numbered_words("topica", 20),
                           orient::detail::numbered_words("topicb", 20)};
    Corpus corpus = generate_planted_corpus(spec);

    std::set<std::string> cluster0(spec.topic_clusters[0].begin(), spec.topic_clusters[0].end());
    int checked = 0;
    for (const auto& conv : corpus.conversations) {
        for (std::size_t i = 0; i + 1 < conv.utterances.size(); ++i) {
            const auto& utt = conv.utterances[i];
            if (utt.role != Role::Agent) continue;
            if (utt.text.rfind("promptcue000", 0) != 0) continue;
            const auto& reply = conv.utterances[i + 1];
            std::istringstream words(reply.text);
            std::string w;
            while (words >> w) CHECK(cluster0.count(w) == 1);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("ground truth sidecar reflects the spec") {
    PlantedSpec spec = fixtures::small_planted_spec(9);
    auto truth = planted_ground_truth(spec);
    CHECK(truth.at("prompt_phrasings").get<std::vector<std::string>>() == spec.prompt_phrasings);
    CHECK(truth.at("seed").get<std::uint64_t>() == spec.seed);
    CHECK(truth.at("noise_rate").get<double>() == spec.noise_rate);
}
