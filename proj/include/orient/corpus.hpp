#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "json.hpp"

#include "orient/errors.hpp"

namespace orient {

enum class Role { Agent, Client };

inline const char* role_name(Role r) { return r == Role::Agent ? "agent" : "client"; }

inline Role parse_role(const std::string& s) {
    if (s == "agent") return Role::Agent;
    if (s == "client") return Role::Client;
    throw DataError("unknown role: \"" + s + "\"");
}

// Conversation metadata values; arrays/objects are stored as dumped JSON text.
using MetaValue = std::variant<bool, std::int64_t, double, std::string>;
using Metadata = std::map<std::string, MetaValue>;

inline nlohmann::json meta_to_json(const MetaValue& v) {
    return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

inline MetaValue meta_from_json(const nlohmann::json& j) {
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

inline int whitespace_word_count(const std::string& text) {
    int count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        const bool space = (c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                            c == '\f' || c == '\v');
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

inline std::string trim_copy(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\n\r\f\v");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\n\r\f\v");
    return s.substr(b, e - b + 1);
}

struct Utterance {
    std::string conversation_id;
    std::string utterance_id;
    Role role = Role::Agent;
    int index = 0;  // position within the conversation; 0-based after merging
    std::string text;
    // One inner list per externally segmented sentence; when present, the
    // built-in sentence splitter is bypassed for this utterance.
    std::optional<std::vector<std::vector<std::string>>> provided_phrasings;
    int word_count = 0;
};

struct Conversation {
    std::string conversation_id;
    std::vector<Utterance> utterances;
    Metadata metadata;

    std::optional<std::string> agent_id() const {
        auto it = metadata.find("agent_id");
        if (it == metadata.end()) return std::nullopt;
        if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        return std::nullopt;
    }
    std::optional<bool> bool_meta(const std::string& key) const {
        auto it = metadata.find(key);
        if (it == metadata.end()) return std::nullopt;
        if (const auto* b = std::get_if<bool>(&it->second)) return *b;
        return std::nullopt;
    }
};

struct Corpus {
    std::vector<Conversation> conversations;  // in first-appearance (file) order

    std::size_t total_utterances() const {
        std::size_t n = 0;
        for (const auto& c : conversations) n += c.utterances.size();
        return n;
    }
};

enum class PairDirection { Reply, Predecessor };

// Adjacent (agent, client) utterance pair within one merged conversation.
// Reply: client immediately follows the agent utterance.
// Predecessor: client immediately precedes it.
struct ContextPair {
    int agent_index = 0;
    int client_index = 0;
    PairDirection direction = PairDirection::Reply;
};

struct Segment {
    int segment_index = 0;
    std::vector<int> agent_utterance_indices;  // merged-conversation indices
};

// ---------------------------------------------------------------------------
// Loading / saving
// ---------------------------------------------------------------------------

struct RecordError {
    std::size_t line = 0;
    std::string message;
};

struct LoadReport {
    std::vector<RecordError> record_errors;
    std::size_t dropped_empty_text = 0;
    std::size_t dropped_conversations = 0;  // all utterances invalid/empty
};

struct LoadOptions {
    bool keep_unknown_fields = true;  // fold unrecognized record fields into metadata
};

namespace detail {

inline const std::unordered_set<std::string>& known_record_fields() {
    static const std::unordered_set<std::string> fields = {
        "conversation_id", "utterance_id", "role", "index", "text", "phrasings", "meta"};
    return fields;
}

}  // namespace detail

// Reads a JSON Lines corpus, one utterance record per line:
//   {"conversation_id": str, "utterance_id": str, "role": "agent"|"client",
//    "index": int, "text": str, "phrasings": [[str,...],...]?, "meta": {...}?}
// Malformed records are collected into `report` and skipped; utterances whose
// text is empty after trimming are dropped with a count. A duplicate
// (conversation_id, index) is fatal since the ordering becomes ambiguous.
inline Corpus load_corpus(const std::string& path, const LoadOptions& options = {},
                          LoadReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);

    LoadReport local;
    LoadReport& rep = report ? *report : local;

    Corpus corpus;
    std::unordered_map<std::string, std::size_t> conv_slot;
    std::unordered_set<std::string> seen_keys;  // conversation_id + '\x1f' + index

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_copy(line).empty()) continue;

        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            rep.record_errors.push_back({line_no, "invalid JSON object"});
            continue;
        }

        std::string missing;
        for (const char* field : {"conversation_id", "utterance_id", "role", "index", "text"}) {
            if (!j.contains(field)) {
                missing = field;
                break;
            }
        }
        if (!missing.empty()) {
            rep.record_errors.push_back({line_no, "missing required field \"" + missing + "\""});
            continue;
        }

        Utterance utt;
        try {
            utt.conversation_id = j.at("conversation_id").get<std::string>();
            utt.utterance_id = j.at("utterance_id").get<std::string>();
            utt.role = parse_role(j.at("role").get<std::string>());
            utt.index = j.at("index").get<int>();
            utt.text = j.at("text").get<std::string>();
        } catch (const std::exception& e) {
            rep.record_errors.push_back({line_no, std::string("bad field value: ") + e.what()});
            continue;
        }

        if (j.contains("phrasings")) {
            try {
                utt.provided_phrasings =
                    j.at("phrasings").get<std::vector<std::vector<std::string>>>();
            } catch (const std::exception&) {
                rep.record_errors.push_back({line_no, "\"phrasings\" must be a list of string lists"});
                continue;
            }
        }

        const std::string key = utt.conversation_id + '\x1f' + std::to_string(utt.index);
        if (!seen_keys.insert(key).second) {
            throw DataError("duplicate (conversation_id, index) at line " +
                            std::to_string(line_no) + ": " + utt.conversation_id + "/" +
                            std::to_string(utt.index));
        }

        auto slot = conv_slot.find(utt.conversation_id);
        if (slot == conv_slot.end()) {
            slot = conv_slot.emplace(utt.conversation_id, corpus.conversations.size()).first;
            corpus.conversations.push_back(Conversation{utt.conversation_id, {}, {}});
        }
        Conversation& conv = corpus.conversations[slot->second];

        if (j.contains("meta") && j.at("meta").is_object()) {
            for (auto it = j.at("meta").begin(); it != j.at("meta").end(); ++it)
                conv.metadata[it.key()] = meta_from_json(it.value());
        }
        if (options.keep_unknown_fields) {
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!detail::known_record_fields().count(it.key()))
                    conv.metadata[it.key()] = meta_from_json(it.value());
            }
        }

        if (trim_copy(utt.text).empty()) {
            ++rep.dropped_empty_text;
            continue;
        }
        utt.word_count = whitespace_word_count(utt.text);
        conv.utterances.push_back(std::move(utt));
    }
    if (in.bad()) throw DataError("I/O error while reading: " + path);

    for (auto& conv : corpus.conversations)
        std::sort(conv.utterances.begin(), conv.utterances.end(),
                  [](const Utterance& a, const Utterance& b) { return a.index < b.index; });

    // Conversations left without any valid utterance are dropped.
    std::vector<Conversation> kept;
    kept.reserve(corpus.conversations.size());
    for (auto& conv : corpus.conversations) {
        if (conv.utterances.empty())
            ++rep.dropped_conversations;
        else
            kept.push_back(std::move(conv));
    }
    corpus.conversations = std::move(kept);
    return corpus;
}

// Writes the JSONL schema accepted by load_corpus. Conversation metadata is
// emitted once, on the first record of each conversation.
inline void save_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& conv : corpus.conversations) {
        bool first = true;
        for (const auto& utt : conv.utterances) {
            nlohmann::ordered_json j;
            j["conversation_id"] = utt.conversation_id;
            j["utterance_id"] = utt.utterance_id;
            j["role"] = role_name(utt.role);
            j["index"] = utt.index;
            j["text"] = utt.text;
            if (utt.provided_phrasings) j["phrasings"] = *utt.provided_phrasings;
            if (first && !conv.metadata.empty()) {
                nlohmann::ordered_json meta;
                for (const auto& [k, v] : conv.metadata) meta[k] = meta_to_json(v);
                j["meta"] = meta;
            }
            out << j.dump() << '\n';
            first = false;
        }
    }
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open output file: " + path);
    save_corpus(corpus, out);
    if (!out) throw DataError("I/O error while writing: " + path);
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

// Concatenates maximal runs of same-role utterances with a newline separator
// and reassigns indices 0..n-1. Idempotent. The merged utterance keeps the
// first member's utterance_id; provided phrasing lists are concatenated.
inline Conversation merge_consecutive(const Conversation& conv) {
    Conversation merged;
    merged.conversation_id = conv.conversation_id;
    merged.metadata = conv.metadata;
    for (const auto& utt : conv.utterances) {
        if (!merged.utterances.empty() && merged.utterances.back().role == utt.role) {
            Utterance& prev = merged.utterances.back();
            prev.text += '\n';
            prev.text += utt.text;
            prev.word_count = whitespace_word_count(prev.text);
            if (utt.provided_phrasings) {
                if (!prev.provided_phrasings) prev.provided_phrasings.emplace();
                prev.provided_phrasings->insert(prev.provided_phrasings->end(),
                                                utt.provided_phrasings->begin(),
                                                utt.provided_phrasings->end());
            }
        } else {
            Utterance copy = utt;
            copy.index = static_cast<int>(merged.utterances.size());
            merged.utterances.push_back(std::move(copy));
        }
    }
    return merged;
}

inline Corpus merge_consecutive(const Corpus& corpus) {
    Corpus merged;
    merged.conversations.reserve(corpus.conversations.size());
    for (const auto& conv : corpus.conversations)
        merged.conversations.push_back(merge_consecutive(conv));
    return merged;
}

// Emits one pair per adjacent (agent, client) or (client, agent) step of a
// merged conversation; a client utterance can appear in both a Reply pair
// (with the agent before it) and a Predecessor pair (with the agent after it).
inline std::vector<ContextPair> extract_pairs(const Conversation& conv) {
    std::vector<ContextPair> pairs;
    for (std::size_t i = 0; i + 1 < conv.utterances.size(); ++i) {
        const Utterance& a = conv.utterances[i];
        const Utterance& b = conv.utterances[i + 1];
        if (a.role == Role::Agent && b.role == Role::Client)
            pairs.push_back({a.index, b.index, PairDirection::Reply});
        else if (a.role == Role::Client && b.role == Role::Agent)
            pairs.push_back({b.index, a.index, PairDirection::Predecessor});
    }
    return pairs;
}

// Keeps pairs where both member utterances have a word count inside
// [min_words, max_words].
inline std::vector<ContextPair> filter_training_pairs(const Conversation& conv,
                                                      const std::vector<ContextPair>& pairs,
                                                      int min_words, int max_words) {
    if (min_words > max_words)
        throw ConfigError("filter_training_pairs: min_words " + std::to_string(min_words) +
                          " exceeds max_words " + std::to_string(max_words));
    std::vector<ContextPair> kept;
    kept.reserve(pairs.size());
    for (const auto& p : pairs) {
        const int wa = conv.utterances[static_cast<std::size_t>(p.agent_index)].word_count;
        const int wc = conv.utterances[static_cast<std::size_t>(p.client_index)].word_count;
        if (wa >= min_words && wa <= max_words && wc >= min_words && wc <= max_words)
            kept.push_back(p);
    }
    return kept;
}

// Reverses the utterance order of every conversation and reassigns indices;
// replies and predecessors trade places.
inline Corpus reverse_conversations(const Corpus& corpus) {
    Corpus reversed = corpus;
    for (auto& conv : reversed.conversations) {
        std::reverse(conv.utterances.begin(), conv.utterances.end());
        for (std::size_t i = 0; i < conv.utterances.size(); ++i)
            conv.utterances[i].index = static_cast<int>(i);
    }
    return reversed;
}

// Partitions the agent messages of a merged conversation into n_segments
// contiguous groups whose sizes differ by at most one, smaller groups first.
// Returns nullopt when the conversation has fewer than min_agent_msgs agent
// messages.
inline std::optional<std::vector<Segment>> segment_conversation(const Conversation& conv,
                                                                int n_segments = 5,
                                                                int min_agent_msgs = 10) {
    if (n_segments < 1)
        throw ConfigError("segment_conversation: n_segments must be >= 1");
    std::vector<int> agent_indices;
    for (const auto& utt : conv.utterances)
        if (utt.role == Role::Agent) agent_indices.push_back(utt.index);
    if (static_cast<int>(agent_indices.size()) < min_agent_msgs) return std::nullopt;

    const int n = static_cast<int>(agent_indices.size());
    const int base = n / n_segments;
    const int remainder = n % n_segments;
    std::vector<Segment> segments;
    segments.reserve(static_cast<std::size_t>(n_segments));
    int pos = 0;
    for (int s = 0; s < n_segments; ++s) {
        const int size = base + (s >= n_segments - remainder ? 1 : 0);
        Segment seg;
        seg.segment_index = s;
        for (int i = 0; i < size; ++i)
            seg.agent_utterance_indices.push_back(agent_indices[static_cast<std::size_t>(pos++)]);
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace orient
