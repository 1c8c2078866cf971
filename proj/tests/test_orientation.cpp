#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "orient/analysis.hpp"
#include "orient/orientation.hpp"
#include "orient/rng.hpp"
#include "orient/synth.hpp"

#include "fixtures.hpp"
#include "oracle.hpp"

using namespace orient;

namespace {

std::string words(const std::vector<std::string>& tokens) {
    std::string text;
    for (const auto& t : tokens) {
        if (!text.empty()) text += ' ';
        text += t;
    }
    return text;
}

// Conversations [client(x), agent(cue + filler), client(x)]: every reply
// member of "targetcue" equals its predecessor member, so its orientation
// must vanish.
Corpus symmetric_corpus() {
    Corpus corpus;
    Rng rng(41);
    const auto pool = orient::detail::numbered_words("pool", 40);
    const auto filler = orient::detail::numbered_words("fill", 20);
    for (int c = 0; c < 12; ++c) {
        std::vector<std::string> client_words;
        for (int i = 0; i < 16; ++i) client_words.push_back(rng.pick(pool));
        std::vector<std::string> agent_words = {"targetcue"};
        for (int i = 0; i < 15; ++i) agent_words.push_back(rng.pick(filler));
        const std::string x = words(client_words);
        corpus.conversations.push_back(fixtures::make_conversation(
            "sym-" + std::to_string(c),
            {{Role::Client, x}, {Role::Agent, words(agent_words)}, {Role::Client, x}}));
    }
    return corpus;
}

}  // namespace

TEST_CASE("collect_context_sets counts and weights") {
    // three conversations where "cue" appears mid-conversation with both
    // neighbors, one where it is conversation-final (no reply)
    Corpus corpus;
    auto filler16 = []() {
        std::string t = "f0";
        for (int i = 1; i < 16; ++i) t += " f" + std::to_string(i);
        return t;
    };
    for (int c = 0; c < 3; ++c)
        corpus.conversations.push_back(fixtures::make_conversation(
            "mid-" + std::to_string(c), {{Role::Client, filler16()},
                                         {Role::Agent, "cue " + filler16()},
                                         {Role::Client, filler16()}}));
    corpus.conversations.push_back(fixtures::make_conversation(
        "final", {{Role::Client, filler16()}, {Role::Agent, "finalcue " + filler16()}}));

    RunConfig cfg = fixtures::fixture_config(2, 3);
    FitArtifacts art;
    OrientationModel model = fit_orientation(corpus, cfg, &art);

    const int cue = art.agent_tfidf.vocabulary.id_of("cue");
    REQUIRE(cue >= 0);
    CHECK(art.sets.by_id[static_cast<std::size_t>(cue)].replies.size() == 3);
    CHECK(art.sets.by_id[static_cast<std::size_t>(cue)].predecessors.size() == 3);

    // conversation-final phrasing has no replies and is dropped
    const int final_cue = art.agent_tfidf.vocabulary.id_of("finalcue");
    REQUIRE(final_cue >= 0);
    CHECK(art.sets.by_id[static_cast<std::size_t>(final_cue)].replies.empty());
    CHECK_FALSE(art.sets.supported[static_cast<std::size_t>(final_cue)]);
    CHECK(model.stats_for(final_cue) == nullptr);
}

TEST_CASE("single-phrasing agent utterance carries weight 1") {
    // the agent's only in-vocabulary phrasing normalizes to a unit entry
    Corpus corpus;
    std::string sixteen = "solo";
    for (int i = 1; i < 16; ++i) sixteen += " solo";
    auto client16 = [](int c, int i) {
        std::string t = "c" + std::to_string(c);
        for (int j = 1; j < 16; ++j) t += " c" + std::to_string((c + i * j) % 9);
        return t;
    };
    for (int c = 0; c < 6; ++c)
        corpus.conversations.push_back(fixtures::make_conversation(
            "solo-" + std::to_string(c), {{Role::Client, client16(c, 1)},
                                          {Role::Agent, sixteen},
                                          {Role::Client, client16(c, 2)}}));

    RunConfig cfg = fixtures::fixture_config(2, 3);
    FitArtifacts art;
    fit_orientation(corpus, cfg, &art);
    const int solo = art.agent_tfidf.vocabulary.id_of("solo");
    REQUIRE(solo >= 0);
    for (const auto& member : art.sets.by_id[static_cast<std::size_t>(solo)].replies)
        CHECK(member.weight == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("compute_range analytic cases") {
    RowMajorMatrix u(2, 3);
    u << 1, 0, 0, 0, 1, 0;
    Eigen::VectorXd s(3);
    s << 2.0, 1.5, 1.0;
    LatentSpace space;
    space.row_embeddings = u;
    space.singular_values = s;
    space.k = 3;
    space.zero_flags.assign(2, 0);

    SECTION("single member on a latent axis has zero range") {
        auto r = compute_range({{0, 0.7}}, space);
        REQUIRE(r);
        CHECK(r->range == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("two axis members with identity spectrum") {
        LatentSpace iso = space;
        iso.singular_values = Eigen::VectorXd::Ones(3);
        auto r = compute_range({{0, 1.0}, {1, 1.0}}, iso);
        REQUIRE(r);
        CHECK(r->range == Catch::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SECTION("weight scaling leaves the range unchanged") {
        Rng rng(5);
        RowMajorMatrix ru(20, 4);
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 4; ++j) ru(i, j) = rng.normal();
            ru.row(i) /= ru.row(i).norm();
        }
        Eigen::VectorXd rs(4);
        rs << 3.0, 2.0, 1.5, 1.0;
        LatentSpace rspace;
        rspace.row_embeddings = ru;
        rspace.singular_values = rs;
        rspace.k = 4;
        rspace.zero_flags.assign(20, 0);
        std::vector<WeightedMember> members, scaled;
        for (int i = 0; i < 20; ++i) {
            const double w = 0.05 + rng.uniform01();
            members.push_back({i, w});
            scaled.push_back({i, 4.2 * w});
        }
        auto a = compute_range(members, rspace);
        auto b = compute_range(scaled, rspace);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(a->range == Catch::Approx(b->range).margin(1e-12));
    }
    SECTION("20-member set matches a brute-force evaluation") {
        Rng rng(6);
        RowMajorMatrix ru(20, 4);
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 4; ++j) ru(i, j) = rng.normal();
            ru.row(i) /= ru.row(i).norm();
        }
        Eigen::VectorXd rs(4);
        rs << 2.5, 2.0, 1.2, 0.8;
        LatentSpace rspace;
        rspace.row_embeddings = ru;
        rspace.singular_values = rs;
        rspace.k = 4;
        rspace.zero_flags.assign(20, 0);
        std::vector<WeightedMember> members;
        for (int i = 0; i < 20; ++i) members.push_back({i, 0.1 + rng.uniform01()});
        auto r = compute_range(members, rspace);
        REQUIRE(r);

        Eigen::VectorXd center = Eigen::VectorXd::Zero(4);
        for (const auto& m : members)
            for (int j = 0; j < 4; ++j) center(j) += m.weight * ru(m.row, j) / rs(j);
        double sum = 0.0;
        for (const auto& m : members)
            sum += oracle::detail::cosine_distance(ru.row(m.row).transpose(), center);
        CHECK(r->range == Catch::Approx(sum / 20.0).margin(1e-9));
    }
    SECTION("plain_mean skips the inverse singular value mapping") {
        auto paper = compute_range({{0, 1.0}, {1, 2.0}}, space, CentralPointMode::Paper);
        auto plain = compute_range({{0, 1.0}, {1, 2.0}}, space, CentralPointMode::PlainMean);
        REQUIRE(paper);
        REQUIRE(plain);
        CHECK(paper->range != plain->range);
        // plain mean of e1,e2 with weights 1,2: distances to (1,2,0)/norm
        Eigen::VectorXd center(3);
        center << 1.0, 2.0, 0.0;
        const double expected = (oracle::detail::cosine_distance(u.row(0).transpose(), center) +
                                 oracle::detail::cosine_distance(u.row(1).transpose(), center)) /
                                2.0;
        CHECK(plain->range == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("symmetric context sets force zero orientation") {
    Corpus corpus = symmetric_corpus();
    RunConfig cfg = fixtures::fixture_config(3, 5);
    FitArtifacts art;
    OrientationModel model = fit_orientation(corpus, cfg, &art);
    const int target = art.agent_tfidf.vocabulary.id_of("targetcue");
    REQUIRE(target >= 0);
    const PhrasingStats* stats = model.stats_for(target);
    REQUIRE(stats);
    CHECK(stats->n_replies == 12);
    CHECK(stats->n_preds == 12);
    CHECK(stats->orientation == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("planted corpus recovers orientation signs") {
    PlantedSpec spec = fixtures::small_planted_spec(1001, 30, 10);
    Corpus corpus = generate_planted_corpus(spec);
    RunConfig cfg = fixtures::fixture_config(4, 5);
    OrientationModel model = fit_orientation(corpus, cfg);
    double min_prompt = 10.0, max_reflect = -10.0;
    for (const auto& p : spec.prompt_phrasings) {
        const PhrasingStats* s = model.stats_for(model.agent_vocab.id_of(p));
        REQUIRE(s);
        CHECK(s->orientation > 0.0);
        min_prompt = std::min(min_prompt, s->orientation);
    }
    for (const auto& p : spec.reflect_phrasings) {
        const PhrasingStats* s = model.stats_for(model.agent_vocab.id_of(p));
        REQUIRE(s);
        CHECK(s->orientation < 0.0);
        max_reflect = std::max(max_reflect, s->orientation);
    }
    CHECK(min_prompt > max_reflect);
}

TEST_CASE("fit matches the dense oracle on a small fixture") {
    PlantedSpec spec = fixtures::small_planted_spec(2024, 11, 8);
    Corpus corpus = generate_planted_corpus(spec);
    REQUIRE(corpus.total_utterances() <= 200);

    RunConfig cfg = fixtures::fixture_config(4, 5);
    OrientationModel model = fit_orientation(corpus, cfg);
    oracle::DenseFit dense = oracle::dense_fit(corpus, cfg);

    REQUIRE(!model.stats.empty());
    CHECK(model.stats.size() == dense.stats.size());
    for (const auto& ps : model.stats) {
        auto it = dense.stats.find(ps.phrasing);
        REQUIRE(it != dense.stats.end());
        CHECK(ps.n_replies == it->second.n_replies);
        CHECK(ps.n_preds == it->second.n_preds);
        CHECK(ps.fwd_range == Catch::Approx(it->second.fwd_range).margin(1e-6));
        CHECK(ps.bwd_range == Catch::Approx(it->second.bwd_range).margin(1e-6));
        CHECK(ps.orientation == Catch::Approx(it->second.omega).margin(1e-6));
    }
}

TEST_CASE("orientation invariants on a fixture") {
    PlantedSpec spec = fixtures::small_planted_spec(77, 14, 8);
    Corpus corpus = generate_planted_corpus(spec);
    RunConfig cfg = fixtures::fixture_config(4, 5);
    OrientationModel forward = fit_orientation(corpus, cfg);

    SECTION("same seed reproduces the model exactly") {
        OrientationModel again = fit_orientation(corpus, cfg);
        REQUIRE(again.stats.size() == forward.stats.size());
        for (std::size_t i = 0; i < forward.stats.size(); ++i) {
            CHECK(again.stats[i].phrasing == forward.stats[i].phrasing);
            CHECK(again.stats[i].fwd_range == forward.stats[i].fwd_range);
            CHECK(again.stats[i].bwd_range == forward.stats[i].bwd_range);
        }
    }

    SECTION("reversal swaps the ranges and negates orientation") {
        OrientationModel reversed = fit_orientation(reverse_conversations(corpus), cfg);
        REQUIRE(reversed.stats.size() == forward.stats.size());
        for (const auto& ps : forward.stats) {
            const PhrasingStats* rs = reversed.stats_for(ps.id);
            REQUIRE(rs);
            CHECK(rs->phrasing == ps.phrasing);
            CHECK(rs->fwd_range == Catch::Approx(ps.bwd_range).margin(1e-9));
            CHECK(rs->bwd_range == Catch::Approx(ps.fwd_range).margin(1e-9));
            CHECK(rs->orientation == Catch::Approx(-ps.orientation).margin(1e-9));
            CHECK(rs->n_replies == ps.n_preds);
        }
    }

    SECTION("conversation order permutation changes nothing") {
        Corpus shuffled = corpus;
        Rng rng(8);
        for (std::size_t i = shuffled.conversations.size(); i > 1; --i)
            std::swap(shuffled.conversations[i - 1],
                      shuffled.conversations[static_cast<std::size_t>(rng.below(i))]);
        OrientationModel permuted = fit_orientation(shuffled, cfg);
        REQUIRE(permuted.stats.size() == forward.stats.size());
        for (std::size_t i = 0; i < forward.stats.size(); ++i) {
            CHECK(permuted.stats[i].fwd_range == forward.stats[i].fwd_range);
            CHECK(permuted.stats[i].bwd_range == forward.stats[i].bwd_range);
        }
    }

    SECTION("corpus duplication moves orientations by less than 1e-6") {
        Corpus doubled = corpus;
        for (const auto& conv : corpus.conversations) {
            Conversation copy = conv;
            copy.conversation_id += "-dup";
            for (auto& utt : copy.utterances) {
                utt.conversation_id = copy.conversation_id;
                utt.utterance_id += "-dup";
            }
            doubled.conversations.push_back(std::move(copy));
        }
        OrientationModel dup = fit_orientation(doubled, cfg);
        for (const auto& ps : forward.stats) {
            const int id = dup.agent_vocab.id_of(ps.phrasing);
            const PhrasingStats* ds = dup.stats_for(id);
            REQUIRE(ds);
            CHECK(ds->n_replies == 2 * ps.n_replies);
            CHECK(ds->orientation == Catch::Approx(ps.orientation).margin(1e-6));
        }
    }
}

TEST_CASE("empty corpus cannot be fitted") {
    Corpus corpus;
    CHECK_THROWS_AS(fit_orientation(corpus, fixtures::fixture_config()), DataError);
}

TEST_CASE("scoring sentences and utterances") {
    PlantedSpec spec = fixtures::small_planted_spec(1001, 30, 10);
    Corpus corpus = generate_planted_corpus(spec);
    RunConfig cfg = fixtures::fixture_config(4, 5);
    OrientationModel model = fit_orientation(corpus, cfg);

    const PhrasingStats* prompt = model.stats_for(model.agent_vocab.id_of("promptcue000"));
    const PhrasingStats* reflect = model.stats_for(model.agent_vocab.id_of("reflectcue000"));
    REQUIRE(prompt);
    REQUIRE(reflect);
    REQUIRE(prompt->orientation > 0.0);
    REQUIRE(reflect->orientation < 0.0);

    SECTION("single in-model phrasing scores exactly its orientation") {
        auto omega = score_sentence({"promptcue000"}, model);
        REQUIRE(omega);
        CHECK(*omega == Catch::Approx(prompt->orientation).margin(1e-15));
    }
    SECTION("weighted average respects tf and idf") {
        auto omega = score_sentence({"promptcue000", "reflectcue000"}, model);
        REQUIRE(omega);
        const double wp = model.agent_idf[static_cast<std::size_t>(prompt->id)];
        const double wr = model.agent_idf[static_cast<std::size_t>(reflect->id)];
        const double expected =
            (wp * prompt->orientation + wr * reflect->orientation) / (wp + wr);
        CHECK(*omega == Catch::Approx(expected).margin(1e-12));
        // convexity: between the two constituent orientations
        CHECK(*omega <= prompt->orientation);
        CHECK(*omega >= reflect->orientation);
    }
    SECTION("tf weighting counts repeats") {
        auto omega = score_sentence({"promptcue000", "promptcue000", "reflectcue000"}, model);
        const double wp = 2.0 * model.agent_idf[static_cast<std::size_t>(prompt->id)];
        const double wr = model.agent_idf[static_cast<std::size_t>(reflect->id)];
        const double expected =
            (wp * prompt->orientation + wr * reflect->orientation) / (wp + wr);
        REQUIRE(omega);
        CHECK(*omega == Catch::Approx(expected).margin(1e-12));
    }
    SECTION("no in-model phrasing yields no score") {
        int covered = 99;
        CHECK_FALSE(score_sentence({"zzz-unknown"}, model, &covered));
        CHECK(covered == 0);
    }
    SECTION("utterance min/max over sentences") {
        Utterance single =
            fixtures::make_utterance("s", 0, Role::Agent, "promptcue000.");
        UtteranceScore one = score_utterance(single, model);
        REQUIRE(one.omega_min);
        CHECK(*one.omega_min == *one.omega_max);

        Utterance both = fixtures::make_utterance(
            "s", 0, Role::Agent, "reflectcue000. promptcue000.");
        UtteranceScore two = score_utterance(both, model);
        REQUIRE(two.omega_min);
        REQUIRE(two.omega_max);
        CHECK(*two.omega_min < 0.0);
        CHECK(*two.omega_max > 0.0);
        CHECK(*two.omega_min <= *two.omega_max);
        CHECK(two.sentences.size() == 2);
    }
    SECTION("unscorable utterance reports both bounds undefined") {
        Utterance blank = fixtures::make_utterance("s", 0, Role::Agent, "nothing known here");
        UtteranceScore score = score_utterance(blank, model);
        CHECK_FALSE(score.omega_min);
        CHECK_FALSE(score.omega_max);
        CHECK(score.sentences.size() == 1);
        CHECK(score.sentences[0].covered_phrasings == 0);
    }
}

TEST_CASE("score_corpus shape and coverage") {
    PlantedSpec spec = fixtures::small_planted_spec(313, 12, 8);
    Corpus corpus = merge_consecutive(generate_planted_corpus(spec));
    RunConfig cfg = fixtures::fixture_config(4, 4);
    OrientationModel model = fit_orientation(corpus, cfg);

    SECTION("empty corpus gives an empty table") {
        CoverageStats cov;
        CHECK(score_corpus(Corpus{}, model, Role::Agent, &cov).empty());
        CHECK(cov.n_utterances == 0);
    }
    SECTION("one row per agent utterance") {
        CoverageStats cov;
        auto rows = score_corpus(corpus, model, Role::Agent, &cov);
        long agents = 0;
        for (const auto& conv : corpus.conversations)
            for (const auto& utt : conv.utterances)
                if (utt.role == Role::Agent) ++agents;
        CHECK(static_cast<long>(rows.size()) == agents);
        CHECK(cov.n_utterances == agents);
        CHECK(cov.utterance_coverage() > 0.9);  // planted cues are in-model
        for (const auto& row : rows)
            if (row.score.omega_min) CHECK(*row.score.omega_min <= *row.score.omega_max);
    }
    SECTION("scoring the reversed corpus with the reversed fit negates the bounds") {
        Corpus reversed = reverse_conversations(corpus);
        OrientationModel rmodel = fit_orientation(reversed, cfg);
        auto fwd = score_corpus(corpus, model);
        auto rev = score_corpus(reversed, rmodel);
        REQUIRE(fwd.size() == rev.size());
        ScoreTable rtable(rev);
        for (const auto& row : fwd) {
            // same utterance sits at the mirrored index in the reversed corpus
            const Conversation* conv = nullptr;
            for (const auto& c : corpus.conversations)
                if (c.conversation_id == row.conversation_id) conv = &c;
            REQUIRE(conv);
            const int mirrored = static_cast<int>(conv->utterances.size()) - 1 - row.index;
            const ScoredUtterance* mirror = rtable.find(row.conversation_id, mirrored);
            REQUIRE(mirror);
            if (!row.score.omega_min) {
                CHECK_FALSE(mirror->score.omega_min);
                continue;
            }
            CHECK(*mirror->score.omega_max ==
                  Catch::Approx(-*row.score.omega_min).margin(1e-9));
            CHECK(*mirror->score.omega_min ==
                  Catch::Approx(-*row.score.omega_max).margin(1e-9));
        }
    }
}

TEST_CASE("degenerate projections are rejected") {
    LatentSpace space;
    space.k = 2;
    space.row_embeddings = RowMajorMatrix::Zero(2, 2);
    space.singular_values = Eigen::VectorXd::Ones(2);
    space.zero_flags.assign(2, 1);
    CHECK_THROWS_AS(project_weighted_bag({{0, 1.0}, {1, 1.0}}, space), DegenerateError);
    CHECK_FALSE(compute_range({{0, 1.0}}, space));
}
