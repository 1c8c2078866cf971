#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "orient/corpus.hpp"
#include "orient/errors.hpp"

namespace orient {

struct Sentence {
    std::string text;
    std::vector<std::string> phrasings;
    int position = 0;  // 0-based within the utterance
};

enum class ExtractorMode { Unigram, Bigram, UniPlusBi, External };

inline const char* extractor_mode_name(ExtractorMode m) {
    switch (m) {
        case ExtractorMode::Unigram: return "unigram";
        case ExtractorMode::Bigram: return "bigram";
        case ExtractorMode::UniPlusBi: return "uni+bi";
        case ExtractorMode::External: return "external";
    }
    return "unigram";
}

inline ExtractorMode parse_extractor_mode(const std::string& s) {
    if (s == "unigram") return ExtractorMode::Unigram;
    if (s == "bigram") return ExtractorMode::Bigram;
    if (s == "uni+bi") return ExtractorMode::UniPlusBi;
    if (s == "external") return ExtractorMode::External;
    throw ConfigError("unknown extractor mode: \"" + s + "\"");
}

struct ExtractorConfig {
    ExtractorMode mode = ExtractorMode::Unigram;
    bool lowercase = true;
    bool strip_punct = true;
};

// Splits on '.', '!' or '?' followed by whitespace or end of text, and on
// newlines; the delimiter stays with its sentence. Sentences are trimmed and
// empty pieces dropped. Never returns an empty list for non-blank text.
inline std::vector<std::string> split_sentence_texts(const std::string& text) {
    std::vector<std::string> pieces;
    std::string current;
    const std::size_t n = text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char c = text[i];
        if (c == '\n') {
            pieces.push_back(current);
            current.clear();
            continue;
        }
        current.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            const bool at_end = (i + 1 == n);
            const unsigned char next = at_end ? ' ' : static_cast<unsigned char>(text[i + 1]);
            if (at_end || std::isspace(next)) {
                pieces.push_back(current);
                current.clear();
            }
        }
    }
    pieces.push_back(current);

    std::vector<std::string> sentences;
    for (auto& p : pieces) {
        std::string t = trim_copy(p);
        if (!t.empty()) sentences.push_back(std::move(t));
    }
    if (sentences.empty()) {
        std::string whole = trim_copy(text);
        if (!whole.empty()) sentences.push_back(std::move(whole));
    }
    return sentences;
}

// Sentences of an utterance. When the record carries pre-extracted phrasings,
// that external segmentation is authoritative: one sentence per inner list,
// phrasing lists attached verbatim, text left empty.
inline std::vector<Sentence> split_sentences(const Utterance& utt) {
    std::vector<Sentence> sentences;
    if (utt.provided_phrasings) {
        int pos = 0;
        for (const auto& list : *utt.provided_phrasings)
            sentences.push_back(Sentence{"", list, pos++});
        return sentences;
    }
    int pos = 0;
    for (auto& text : split_sentence_texts(utt.text))
        sentences.push_back(Sentence{std::move(text), {}, pos++});
    return sentences;
}

// Whitespace tokenization with optional ASCII lowercasing. With strip_punct,
// punctuation characters are removed from tokens except '?', which is emitted
// as a standalone token.
inline std::vector<std::string> tokenize(const std::string& text, const ExtractorConfig& cfg) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
            continue;
        }
        if (cfg.strip_punct && std::ispunct(c)) {
            if (c == '?') {
                flush();
                tokens.emplace_back("?");
            }
            continue;
        }
        current.push_back(cfg.lowercase ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    flush();
    return tokens;
}

// Phrasings of one sentence. Duplicates are retained; term frequency matters
// downstream. External mode passes through the parent utterance's provided
// list for this sentence position.
inline std::vector<std::string> extract_phrasings(const Sentence& sentence,
                                                  const ExtractorConfig& cfg,
                                                  const Utterance& parent) {
    if (cfg.mode == ExtractorMode::External) {
        if (!parent.provided_phrasings ||
            sentence.position >= static_cast<int>(parent.provided_phrasings->size()))
            throw DataError("external phrasings missing for utterance " + parent.utterance_id +
                            " sentence " + std::to_string(sentence.position));
        return (*parent.provided_phrasings)[static_cast<std::size_t>(sentence.position)];
    }
    const std::vector<std::string> tokens = tokenize(sentence.text, cfg);
    std::vector<std::string> out;
    if (cfg.mode == ExtractorMode::Unigram || cfg.mode == ExtractorMode::UniPlusBi)
        out.insert(out.end(), tokens.begin(), tokens.end());
    if (cfg.mode == ExtractorMode::Bigram || cfg.mode == ExtractorMode::UniPlusBi)
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
            out.push_back(tokens[i] + "_" + tokens[i + 1]);
    return out;
}

// Sentences with phrasings filled in for a whole utterance. External mode
// takes the record's pre-extracted lists and never touches the tokenizer;
// the n-gram modes always run the text splitter.
inline std::vector<Sentence> sentence_phrasings(const Utterance& utt, const ExtractorConfig& cfg) {
    if (cfg.mode == ExtractorMode::External) {
        if (!utt.provided_phrasings)
            throw DataError("external phrasings missing for utterance " + utt.utterance_id);
        return split_sentences(utt);  // external segmentation, lists attached verbatim
    }
    std::vector<Sentence> sentences;
    int pos = 0;
    for (auto& text : split_sentence_texts(utt.text))
        sentences.push_back(Sentence{std::move(text), {}, pos++});
    for (auto& s : sentences) s.phrasings = extract_phrasings(s, cfg, utt);
    return sentences;
}

struct Vocabulary {
    Role role = Role::Agent;
    std::vector<std::string> phrasings;              // id -> phrasing, in rank order
    std::unordered_map<std::string, int> ids;        // phrasing -> id
    std::vector<int> doc_frequency;                  // sentences containing the phrasing
    std::vector<int> utterance_frequency;            // utterances containing the phrasing
    long total_docs = 0;                             // number of utterances counted

    int size() const { return static_cast<int>(phrasings.size()); }
    int id_of(const std::string& phrase) const {
        auto it = ids.find(phrase);
        return it == ids.end() ? -1 : it->second;
    }
};

// Ranks phrasings by the number of distinct utterances containing them
// (ties broken lexicographically), keeps those with utterance frequency >=
// min_utterances, then truncates to the top_k most frequent. top_k <= 0 means
// no cap. Input: per utterance, the phrasing lists of its sentences.
inline Vocabulary build_vocabulary(
    const std::vector<std::vector<std::vector<std::string>>>& utterance_sentences, Role role,
    int top_k, int min_utterances = 1) {
    std::map<std::string, std::pair<int, int>> counts;  // phrasing -> (uf, sentence df)
    for (const auto& sentences : utterance_sentences) {
        std::unordered_set<std::string> in_utt;
        for (const auto& sentence : sentences) {
            std::unordered_set<std::string> in_sent;
            for (const auto& p : sentence) {
                if (in_sent.insert(p).second) counts[p].second += 1;
                in_utt.insert(p);
            }
        }
        for (const auto& p : in_utt) counts[p].first += 1;
    }

    std::vector<std::pair<std::string, std::pair<int, int>>> ranked;
    ranked.reserve(counts.size());
    for (const auto& [phrase, c] : counts)
        if (c.first >= min_utterances) ranked.emplace_back(phrase, c);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.first < b.first;
    });
    if (top_k > 0 && static_cast<int>(ranked.size()) > top_k)
        ranked.resize(static_cast<std::size_t>(top_k));
    if (ranked.empty())
        throw DataError("build_vocabulary: no phrasing met min_utterances=" +
                        std::to_string(min_utterances) + " over " +
                        std::to_string(utterance_sentences.size()) + " utterances");

    Vocabulary vocab;
    vocab.role = role;
    vocab.total_docs = static_cast<long>(utterance_sentences.size());
    vocab.phrasings.reserve(ranked.size());
    for (const auto& [phrase, c] : ranked) {
        vocab.ids.emplace(phrase, static_cast<int>(vocab.phrasings.size()));
        vocab.phrasings.push_back(phrase);
        vocab.utterance_frequency.push_back(c.first);
        vocab.doc_frequency.push_back(c.second);
    }
    return vocab;
}

}  // namespace orient
