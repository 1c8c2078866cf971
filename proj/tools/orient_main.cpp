// orient — measure how conversation turns balance advancing the interaction
// forwards against addressing what was already said.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "orient/commands.hpp"

namespace {

struct ConfigFlags {
    std::string profile = "counseling";
    std::string config_file;
    // flag-provided overrides, applied last
    CLI::App* app = nullptr;

    void attach(CLI::App& cmd, orient::RunConfig& staging) {
        app = &cmd;
        cmd.add_option("--profile", profile, "parameter preset (counseling|court)")
            ->capture_default_str();
        cmd.add_option("--config", config_file, "JSON config file overlaying the profile");
        cmd.add_option("--seed", staging.seed, "random seed (default from ORIENT_SEED if set)");
        cmd.add_option("--min-words", staging.min_words, "training pair lower word bound");
        cmd.add_option("--max-words", staging.max_words, "training pair upper word bound");
        cmd.add_option("--agent-top-k", staging.agent_top_k, "agent vocabulary cap (0 = none)");
        cmd.add_option("--client-top-k", staging.client_top_k, "client vocabulary cap (0 = none)");
        cmd.add_option("--agent-min-utterances", staging.agent_min_utterances,
                       "agent vocabulary utterance floor");
        cmd.add_option("--client-min-utterances", staging.client_min_utterances,
                       "client vocabulary utterance floor");
        cmd.add_option("--latent-dims", staging.latent_dims, "retained latent dimensions");
        cmd.add_flag("--keep-first-dim,!--drop-first-dim", keep_first,
                     "keep the first SVD dimension instead of dropping it");
        cmd.add_option("--min-support", staging.min_support,
                       "required replies and predecessors per phrasing");
        cmd.add_option("--n-segments", staging.n_segments, "conversation segments");
        cmd.add_option("--min-agent-msgs", staging.min_agent_msgs,
                       "agent messages required for segmentation");
        cmd.add_option("--agent-mode", agent_mode, "agent extractor (unigram|bigram|uni+bi|external)");
        cmd.add_option("--client-mode", client_mode,
                       "client extractor (unigram|bigram|uni+bi|external)");
        cmd.add_option("--central-point-mode", central_mode, "paper|plain_mean");
        cmd.add_option("--training-docs", training_docs, "pairs|conversations");
        cmd.add_flag("--log-tf", staging.log_tf, "sublinear term frequency");
        cmd.add_option("--svd-tolerance", staging.svd.tolerance, "SVD convergence tolerance");
        cmd.add_option("--svd-max-iters", staging.svd.max_iters, "SVD iteration cap");
        cmd.add_option("--bootstrap-resamples", staging.bootstrap_resamples, "bootstrap resamples");
        cmd.add_option("--bootstrap-level", staging.bootstrap_level, "bootstrap confidence level");
        cmd.add_option("--window-first", staging.counselor_window_first,
                       "first conversation position for counselor analysis");
        cmd.add_option("--window-last", staging.counselor_window_last,
                       "last conversation position for counselor analysis");
        cmd.add_option("--min-conversations", staging.counselor_min_conversations,
                       "conversations required per counselor");
        cmd.add_option("--length-buckets", staging.length_buckets, "length bucket count");
    }

    bool keep_first = false;
    std::string agent_mode, client_mode, central_mode, training_docs;

    // precedence: defaults < profile < config file < flags
    orient::RunConfig resolve(const orient::RunConfig& staging) const {
        orient::RunConfig cfg = orient::profile_config(profile);
        if (const char* env = std::getenv("ORIENT_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw orient::ConfigError("cannot open config file: " + config_file);
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (j.is_discarded()) throw orient::ConfigError("config file is not valid JSON");
            orient::overlay_config(cfg, j);
        }
        auto set_if = [&](const std::string& flag, auto member, auto value) {
            if (app->count(flag)) cfg.*member = value;
        };
        set_if("--seed", &orient::RunConfig::seed, staging.seed);
        set_if("--min-words", &orient::RunConfig::min_words, staging.min_words);
        set_if("--max-words", &orient::RunConfig::max_words, staging.max_words);
        set_if("--agent-top-k", &orient::RunConfig::agent_top_k, staging.agent_top_k);
        set_if("--client-top-k", &orient::RunConfig::client_top_k, staging.client_top_k);
        set_if("--agent-min-utterances", &orient::RunConfig::agent_min_utterances,
               staging.agent_min_utterances);
        set_if("--client-min-utterances", &orient::RunConfig::client_min_utterances,
               staging.client_min_utterances);
        set_if("--latent-dims", &orient::RunConfig::latent_dims, staging.latent_dims);
        if (app->count("--keep-first-dim") || app->count("--drop-first-dim"))
            cfg.drop_first = !keep_first;
        set_if("--min-support", &orient::RunConfig::min_support, staging.min_support);
        set_if("--n-segments", &orient::RunConfig::n_segments, staging.n_segments);
        set_if("--min-agent-msgs", &orient::RunConfig::min_agent_msgs, staging.min_agent_msgs);
        if (app->count("--agent-mode"))
            cfg.agent_extractor.mode = orient::parse_extractor_mode(agent_mode);
        if (app->count("--client-mode"))
            cfg.client_extractor.mode = orient::parse_extractor_mode(client_mode);
        if (app->count("--central-point-mode"))
            cfg.central_point_mode = orient::parse_central_point_mode(central_mode);
        if (app->count("--training-docs"))
            cfg.training_docs = orient::parse_training_docs(training_docs);
        if (app->count("--log-tf")) cfg.log_tf = staging.log_tf;
        if (app->count("--svd-max-iters")) cfg.svd.max_iters = staging.svd.max_iters;
        if (app->count("--svd-tolerance")) cfg.svd.tolerance = staging.svd.tolerance;
        set_if("--bootstrap-resamples", &orient::RunConfig::bootstrap_resamples,
               staging.bootstrap_resamples);
        set_if("--bootstrap-level", &orient::RunConfig::bootstrap_level, staging.bootstrap_level);
        set_if("--window-first", &orient::RunConfig::counselor_window_first,
               staging.counselor_window_first);
        set_if("--window-last", &orient::RunConfig::counselor_window_last,
               staging.counselor_window_last);
        set_if("--min-conversations", &orient::RunConfig::counselor_min_conversations,
               staging.counselor_min_conversations);
        set_if("--length-buckets", &orient::RunConfig::length_buckets, staging.length_buckets);
        cfg.validate();
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orient: forwards/backwards orientation of conversation turns"};
    app.require_subcommand(1);

    orient::RunConfig staging;  // receives flag values before precedence resolution

    // fit
    auto* fit = app.add_subcommand("fit", "fit an orientation model from a JSONL corpus");
    std::string fit_corpus, fit_model;
    bool fit_full = false;
    fit->add_option("--corpus", fit_corpus, "corpus JSONL")->required();
    fit->add_option("--out", fit_model, "model file to write")->required();
    fit->add_flag("--full", fit_full, "embed centers and latent space in the model");
    ConfigFlags fit_cfg;
    fit_cfg.attach(*fit, staging);

    // score
    auto* score = app.add_subcommand("score", "score utterances with a fitted model");
    std::string score_corpus, score_model, score_out, score_role = "agent";
    score->add_option("--corpus", score_corpus, "corpus JSONL")->required();
    score->add_option("--model", score_model, "model file")->required();
    score->add_option("--out", score_out, "scores JSONL (default stdout)");
    score->add_option("--role", score_role, "role to score (agent|client)")
        ->check(CLI::IsMember({"agent", "client"}));

    // analyze
    auto* analyze = app.add_subcommand("analyze", "aggregate scores into reports");
    std::string an_which, an_scores, an_corpus, an_model, an_group, an_out;
    analyze->add_option("--which", an_which, "segments|summaries|counselors|lengths|baselines")
        ->required();
    analyze->add_option("--scores", an_scores, "scores JSONL from `score`");
    analyze->add_option("--corpus", an_corpus, "corpus JSONL")->required();
    analyze->add_option("--model", an_model, "model file (baselines only)");
    analyze->add_option("--group-by", an_group, "metadata key for grouped segment profiles");
    analyze->add_option("--out", an_out, "CSV output (default stdout)");
    ConfigFlags an_cfg;
    an_cfg.attach(*analyze, staging);

    // baseline
    auto* baseline = app.add_subcommand("baseline", "alternative per-utterance measures");
    std::string bl_corpus, bl_model, bl_out;
    baseline->add_option("--corpus", bl_corpus, "corpus JSONL")->required();
    baseline->add_option("--model", bl_model, "model file")->required();
    baseline->add_option("--out", bl_out, "baselines JSONL (default stdout)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a planted synthetic corpus");
    std::string sy_out, sy_truth;
    orient::PlantedSpec spec;
    int sy_clusters = 3;
    synth->add_option("--out", sy_out, "corpus JSONL to write")->required();
    synth->add_option("--truth", sy_truth, "ground-truth sidecar JSON");
    synth->add_option("--conversations", spec.n_conversations, "conversation count")
        ->capture_default_str();
    synth->add_option("--turns", spec.turns_per_conversation, "agent messages per conversation")
        ->capture_default_str();
    synth->add_option("--words", spec.words_per_message, "words per message")
        ->capture_default_str();
    synth->add_option("--clusters", sy_clusters, "topic cluster count")->capture_default_str();
    synth->add_option("--noise", spec.noise_rate, "noise rate in [0,1)")->capture_default_str();
    synth->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
    synth->add_flag("--stage-gradient", spec.stage_gradient,
                    "ramp forwards-oriented cues up along each conversation");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "summarize a model file");
    std::string in_model;
    int in_top = 10;
    bool in_vocab = false;
    inspect->add_option("--model", in_model, "model file")->required();
    inspect->add_option("--top", in_top, "phrasings to list per direction")->capture_default_str();
    inspect->add_flag("--vocab", in_vocab, "dump the vocabulary as JSON instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) {
            orient::cmd_fit(fit_corpus, fit_cfg.resolve(staging), fit_model, fit_full);
        } else if (*score) {
            orient::cmd_score(score_corpus, score_model, score_out,
                              orient::parse_role(score_role));
        } else if (*analyze) {
            const orient::RunConfig cfg = an_cfg.resolve(staging);
            if (an_which != "baselines" && an_scores.empty())
                throw orient::ConfigError("analyze " + an_which + " requires --scores");
            if (an_out.empty() || an_out == "-") {
                orient::cmd_analyze(an_which, an_scores, an_corpus, an_model, an_group, cfg,
                                    std::cout);
            } else {
                std::ofstream out(an_out);
                if (!out) throw orient::DataError("cannot open output file: " + an_out);
                orient::cmd_analyze(an_which, an_scores, an_corpus, an_model, an_group, cfg, out);
            }
        } else if (*baseline) {
            orient::cmd_baseline(bl_corpus, bl_model, bl_out);
        } else if (*synth) {
            if (const char* env = std::getenv("ORIENT_SEED"); env && !synth->count("--seed"))
                spec.seed = std::strtoull(env, nullptr, 10);
            orient::cmd_synth(orient::with_defaults(spec, sy_clusters), sy_out, sy_truth);
        } else if (*inspect) {
            orient::cmd_inspect(in_model, in_top, in_vocab, std::cout);
        }
    } catch (const orient::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
