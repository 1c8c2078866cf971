#include <catch2/catch_amalgamated.hpp>

#include "orient/phrasing.hpp"

#include "fixtures.hpp"

using namespace orient;

TEST_CASE("split_sentence_texts") {
    CHECK(split_sentence_texts("How are you? I'm here.") ==
          std::vector<std::string>{"How are you?", "I'm here."});
    CHECK(split_sentence_texts("no delimiters here") ==
          std::vector<std::string>{"no delimiters here"});
    CHECK(split_sentence_texts("Hi...  ") == std::vector<std::string>{"Hi..."});
    CHECK(split_sentence_texts("line one\nline two") ==
          std::vector<std::string>{"line one", "line two"});
    // a delimiter not followed by whitespace stays inside the sentence
    CHECK(split_sentence_texts("wait...what") == std::vector<std::string>{"wait...what"});
    CHECK(split_sentence_texts("a! b? c.") == std::vector<std::string>{"a!", "b?", "c."});
}

TEST_CASE("split_sentences honors external segmentation") {
    Utterance utt = fixtures::make_utterance("c", 0, Role::Agent, "ignored. text!");
    utt.provided_phrasings = {{"confided_to", "to_anyone"}, {"second_arc"}};
    auto sentences = split_sentences(utt);
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].phrasings == std::vector<std::string>{"confided_to", "to_anyone"});
    CHECK(sentences[1].position == 1);
}

TEST_CASE("tokenize lowercases and strips punctuation, keeping ? as a token") {
    ExtractorConfig cfg;
    CHECK(tokenize("How are YOU?", cfg) == std::vector<std::string>{"how", "are", "you", "?"});
    CHECK(tokenize("don't stop", cfg) == std::vector<std::string>{"dont", "stop"});
    CHECK(tokenize("Hello,world", cfg) == std::vector<std::string>{"helloworld"});
    ExtractorConfig raw;
    raw.lowercase = false;
    raw.strip_punct = false;
    CHECK(tokenize("Keep, IT!", raw) == std::vector<std::string>{"Keep,", "IT!"});
}

TEST_CASE("extract_phrasings modes") {
    Utterance utt = fixtures::make_utterance("c", 0, Role::Agent, "sounds frustrating");
    Sentence s{"sounds frustrating", {}, 0};

    ExtractorConfig uni;
    CHECK(extract_phrasings(s, uni, utt) == std::vector<std::string>{"sounds", "frustrating"});

    ExtractorConfig bi;
    bi.mode = ExtractorMode::Bigram;
    CHECK(extract_phrasings(s, bi, utt) == std::vector<std::string>{"sounds_frustrating"});

    ExtractorConfig both;
    both.mode = ExtractorMode::UniPlusBi;
    CHECK(extract_phrasings(s, both, utt) ==
          std::vector<std::string>{"sounds", "frustrating", "sounds_frustrating"});

    SECTION("duplicates within a sentence are retained") {
        Sentence dup{"so so so", {}, 0};
        CHECK(extract_phrasings(dup, uni, utt) == std::vector<std::string>{"so", "so", "so"});
    }

    SECTION("external passthrough") {
        Utterance ext = fixtures::make_utterance("c", 0, Role::Agent, "whatever");
        ext.provided_phrasings = {{"confided_to", "to_anyone"}};
        ExtractorConfig cfg;
        cfg.mode = ExtractorMode::External;
        Sentence es{"", {}, 0};
        CHECK(extract_phrasings(es, cfg, ext) ==
              std::vector<std::string>{"confided_to", "to_anyone"});
    }

    SECTION("external without provided phrasings is a record error") {
        Utterance bare = fixtures::make_utterance("c", 0, Role::Agent, "no arcs");
        ExtractorConfig cfg;
        cfg.mode = ExtractorMode::External;
        Sentence es{"", {}, 0};
        CHECK_THROWS_AS(extract_phrasings(es, cfg, bare), DataError);
    }
}

TEST_CASE("build_vocabulary ranks by utterance frequency with fixed tie-break") {
    // utterance counts: x:5, y:3, z:1
    std::vector<std::vector<std::vector<std::string>>> utts;
    for (int i = 0; i < 5; ++i) utts.push_back({{"x"}});
    for (int i = 0; i < 3; ++i) utts.push_back({{"y"}});
    utts.push_back({{"z"}});

    SECTION("top_k = 2 keeps the two most frequent") {
        Vocabulary v = build_vocabulary(utts, Role::Agent, 2, 1);
        REQUIRE(v.size() == 2);
        CHECK(v.phrasings == std::vector<std::string>{"x", "y"});
        CHECK(v.utterance_frequency[0] == 5);
    }
    SECTION("min_utterances filters before the cap") {
        std::vector<std::vector<std::vector<std::string>>> docs;
        for (int i = 0; i < 250; ++i) docs.push_back({{"x"}});
        for (int i = 0; i < 150; ++i) docs.push_back({{"y"}});
        Vocabulary v = build_vocabulary(docs, Role::Agent, 0, 200);
        REQUIRE(v.size() == 1);
        CHECK(v.phrasings[0] == "x");
    }
    SECTION("no cap keeps everything in rank order") {
        Vocabulary v = build_vocabulary(utts, Role::Agent, 0, 1);
        REQUIRE(v.size() == 3);
        CHECK(v.phrasings == std::vector<std::string>{"x", "y", "z"});
        CHECK(v.id_of("z") == 2);
    }
    SECTION("ties break lexicographically") {
        std::vector<std::vector<std::vector<std::string>>> tied = {{{"beta"}}, {{"alpha"}}};
        Vocabulary v = build_vocabulary(tied, Role::Agent, 0, 1);
        CHECK(v.phrasings == std::vector<std::string>{"alpha", "beta"});
    }
    SECTION("empty survivors are fatal") {
        CHECK_THROWS_AS(build_vocabulary(utts, Role::Agent, 0, 100), DataError);
    }
}

TEST_CASE("vocabulary counts distinct utterances, not occurrences") {
    // one utterance with w twice, one with w once: uf must be 2
    std::vector<std::vector<std::vector<std::string>>> utts = {{{"w", "w"}}, {{"w"}}, {{"q"}}};
    Vocabulary v = build_vocabulary(utts, Role::Agent, 0, 1);
    CHECK(v.utterance_frequency[static_cast<std::size_t>(v.id_of("w"))] == 2);
    CHECK(v.total_docs == 3);
}

TEST_CASE("vocabulary construction is deterministic") {
    orient::PlantedSpec spec = fixtures::small_planted_spec(5, 8, 6);
    orient::Corpus corpus = generate_planted_corpus(spec);
    auto collect = [&]() {
        std::vector<std::vector<std::vector<std::string>>> docs;
        ExtractorConfig cfg;
        for (const auto& conv : corpus.conversations)
            for (const auto& utt : conv.utterances) {
                std::vector<std::vector<std::string>> lists;
                for (auto& s : sentence_phrasings(utt, cfg)) lists.push_back(s.phrasings);
                docs.push_back(lists);
            }
        return build_vocabulary(docs, Role::Client, 50, 1);
    };
    Vocabulary a = collect();
    Vocabulary b = collect();
    CHECK(a.phrasings == b.phrasings);
    CHECK(a.utterance_frequency == b.utterance_frequency);
}
