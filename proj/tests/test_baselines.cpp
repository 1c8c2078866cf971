#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "orient/baselines.hpp"
#include "orient/synth.hpp"

#include "fixtures.hpp"

using namespace orient;

TEST_CASE("has_question is the literal rule") {
    CHECK(has_question("How are you?"));
    CHECK_FALSE(has_question("I see."));
    CHECK(has_question("Right? Ok."));
    CHECK(has_question("Right?\n  Ok."));
    CHECK(has_question("   spaced ?   ") == has_question("spaced ?"));
}

namespace {

Corpus shared_space_corpus() {
    Corpus corpus;
    corpus.conversations.push_back(fixtures::make_conversation(
        "t1", {{Role::Client, "alpha beta gamma"},
               {Role::Agent, "alpha beta gamma"},
               {Role::Client, "alpha beta gamma"}}));
    corpus.conversations.push_back(fixtures::make_conversation(
        "t2", {{Role::Client, "delta echo"},
               {Role::Agent, "delta echo"},
               {Role::Client, "zulu yankee xray"}}));
    corpus.conversations.push_back(fixtures::make_conversation(
        "t3", {{Role::Client, "mike november"}, {Role::Agent, "oscar papa"}}));
    return corpus;
}

}  // namespace

TEST_CASE("naive distance in the shared tf-idf space") {
    Corpus corpus = shared_space_corpus();
    ExtractorConfig ex;
    SharedSpace space = build_shared_space(corpus, ex, ex);

    SECTION("identical neighbors give zero") {
        auto d = naive_distance(space, 0, 1);
        REQUIRE(d);
        CHECK(*d == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("identical predecessor, disjoint reply gives 1") {
        auto d = naive_distance(space, 1, 1);
        REQUIRE(d);
        CHECK(*d == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("missing reply yields nothing") {
        CHECK_FALSE(naive_distance(space, 2, 1));
    }
    SECTION("matches a hand-computed tf-idf evaluation") {
        // brute-force: embed the three t2 utterances over the full vocabulary
        std::map<std::string, int> df;
        std::vector<std::map<std::string, int>> docs;
        ExtractorConfig cfg;
        for (const auto& conv : corpus.conversations)
            for (const auto& utt : conv.utterances) {
                std::map<std::string, int> tf;
                for (const auto& s : sentence_phrasings(utt, cfg))
                    for (const auto& p : s.phrasings) ++tf[p];
                for (const auto& [p, c] : tf) ++df[p];
                docs.push_back(std::move(tf));
            }
        const double n = static_cast<double>(docs.size());
        auto vec = [&](const std::map<std::string, int>& tf) {
            std::map<std::string, double> v;
            for (const auto& [p, c] : tf) v[p] = c * (1.0 + std::log(n / df[p]));
            return v;
        };
        auto cosd = [&](const std::map<std::string, double>& a,
                        const std::map<std::string, double>& b) {
            double dot = 0, na = 0, nb = 0;
            for (const auto& [p, x] : a) {
                na += x * x;
                auto it = b.find(p);
                if (it != b.end()) dot += x * it->second;
            }
            for (const auto& [p, x] : b) nb += x * x;
            return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
        };
        // docs 3,4,5 are conversation t2
        const auto pred = vec(docs[3]);
        const auto self = vec(docs[4]);
        const auto reply = vec(docs[5]);
        auto d = naive_distance(space, 1, 1);
        REQUIRE(d);
        CHECK(*d == Catch::Approx(cosd(self, reply) - cosd(self, pred)).margin(1e-12));
    }
}

TEST_CASE("backwards-range baseline uses the fitted table") {
    PlantedSpec spec = fixtures::small_planted_spec(1001, 30, 10);
    Corpus corpus = merge_consecutive(generate_planted_corpus(spec));
    RunConfig cfg = fixtures::fixture_config(4, 5);
    OrientationModel model = fit_orientation(corpus, cfg);

    const PhrasingStats* prompt = model.stats_for(model.agent_vocab.id_of("promptcue000"));
    const PhrasingStats* reflect = model.stats_for(model.agent_vocab.id_of("reflectcue000"));
    REQUIRE(prompt);
    REQUIRE(reflect);

    SECTION("single-phrasing message returns its backwards range") {
        Utterance utt = fixtures::make_utterance("x", 0, Role::Agent, "promptcue000");
        auto score = backwards_range_score(utt, model);
        REQUIRE(score);
        CHECK(*score == Catch::Approx(prompt->bwd_range).margin(1e-15));
    }
    SECTION("message score is the minimum over sentences") {
        Utterance utt =
            fixtures::make_utterance("x", 0, Role::Agent, "promptcue000. reflectcue000.");
        auto score = backwards_range_score(utt, model);
        REQUIRE(score);
        CHECK(*score ==
              Catch::Approx(std::min(prompt->bwd_range, reflect->bwd_range)).margin(1e-12));
    }
    SECTION("no coverage yields nothing") {
        Utterance utt = fixtures::make_utterance("x", 0, Role::Agent, "foreign words only");
        CHECK_FALSE(backwards_range_score(utt, model));
    }
}

TEST_CASE("compute_baselines populates all three measures per agent utterance") {
    PlantedSpec spec = fixtures::small_planted_spec(17, 10, 6);
    Corpus corpus = merge_consecutive(generate_planted_corpus(spec));
    RunConfig cfg = fixtures::fixture_config(4, 4);
    OrientationModel model = fit_orientation(corpus, cfg);

    auto rows = compute_baselines(corpus, model);
    long agents = 0;
    for (const auto& conv : corpus.conversations)
        for (const auto& utt : conv.utterances)
            if (utt.role == Role::Agent) ++agents;
    REQUIRE(static_cast<long>(rows.size()) == agents);
    for (const auto& row : rows) {
        // planted conversations always give agent turns both neighbors
        CHECK(row.naive_distance.has_value());
        CHECK(row.bwd_range_min.has_value());
        CHECK_FALSE(row.has_question);  // generator never emits '?'
    }
}
