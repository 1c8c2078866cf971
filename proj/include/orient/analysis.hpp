#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "orient/config.hpp"
#include "orient/corpus.hpp"
#include "orient/errors.hpp"
#include "orient/orientation.hpp"
#include "orient/rng.hpp"

namespace orient {

// ---------------------------------------------------------------------------
// Statistical machinery
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
};

// Percentile bootstrap interval for the mean. Each resample draws its own
// seed from the base seed, so the computation is order-independent and
// reproducible.
inline ConfidenceInterval bootstrap_ci(const std::vector<double>& values, int n_resamples,
                                       double level, std::uint64_t seed) {
    if (values.empty()) throw DataError("bootstrap_ci: empty input");
    if (n_resamples < 1) throw ConfigError("bootstrap_ci: n_resamples must be >= 1");
    if (level <= 0.0 || level >= 1.0) throw ConfigError("bootstrap_ci: level must be in (0,1)");
    const std::size_t n = values.size();
    std::vector<double> means(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(b)));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += values[static_cast<std::size_t>(rng.below(n))];
        means[static_cast<std::size_t>(b)] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double alpha = 1.0 - level;
    const auto lo =
        static_cast<std::size_t>(std::floor(alpha / 2.0 * static_cast<double>(n_resamples)));
    auto hi = static_cast<std::size_t>(
        std::ceil((1.0 - alpha / 2.0) * static_cast<double>(n_resamples)));
    hi = hi == 0 ? 0 : hi - 1;
    return {means[std::min(lo, means.size() - 1)], means[std::min(hi, means.size() - 1)]};
}

namespace detail {

// Midranks of the pooled values (1-based, doubled so they stay integral under
// ties). Returns 2*rank per element.
inline std::vector<long> double_midranks(const std::vector<double>& pooled) {
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<long> rank2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // ranks i+1 .. j+1 averaged; doubled average = (i+1) + (j+1)
        const long r2 = static_cast<long>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) rank2[order[t]] = r2;
        i = j + 1;
    }
    return rank2;
}

// Tie correction term sum(t^3 - t) over tie groups of the pooled values.
inline double tie_term(const std::vector<double>& pooled) {
    std::map<double, long> groups;
    for (double x : pooled) ++groups[x];
    double s = 0.0;
    for (const auto& [value, t] : groups) {
        const double td = static_cast<double>(t);
        s += td * td * td - td;
    }
    return s;
}

// Distribution of the doubled rank-sum of an m-subset of the pooled midranks,
// conditional on the observed tie pattern: counts[r2] = number of m-subsets
// whose doubled rank-sum equals r2. Dynamic programming over tie groups.
inline std::vector<double> rank_sum_distribution(const std::vector<long>& rank2, std::size_t m) {
    std::map<long, long> groups;  // doubled midrank -> multiplicity
    for (long r : rank2) ++groups[r];
    long max_r2 = 0;
    for (long r : rank2) max_r2 += r;
    std::vector<double> dist(static_cast<std::size_t>(max_r2) + 1, 0.0);
    // dp[chosen][sum]; rolled over groups
    std::vector<std::vector<double>> dp(m + 1,
                                        std::vector<double>(static_cast<std::size_t>(max_r2) + 1, 0.0));
    dp[0][0] = 1.0;
    for (const auto& [r2, t] : groups) {
        // binomial choices from this tie group
        std::vector<double> choose(static_cast<std::size_t>(t) + 1, 1.0);
        for (long j = 1; j <= t; ++j)
            choose[static_cast<std::size_t>(j)] =
                choose[static_cast<std::size_t>(j - 1)] * static_cast<double>(t - j + 1) /
                static_cast<double>(j);
        for (std::size_t c = m + 1; c-- > 0;) {
            for (std::size_t s = dist.size(); s-- > 0;) {
                const double base = dp[c][s];
                if (base == 0.0) continue;
                dp[c][s] = 0.0;  // re-add j = 0 below
                const long j_max = std::min<long>(t, static_cast<long>(m - c));
                for (long j = 0; j <= j_max; ++j) {
                    const std::size_t ns = s + static_cast<std::size_t>(j * r2);
                    if (ns < dist.size())
                        dp[c + static_cast<std::size_t>(j)][ns] +=
                            base * choose[static_cast<std::size_t>(j)];
                }
            }
        }
    }
    for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = dp[m][s];
    return dist;
}

}  // namespace detail

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the first sample
    double p = 1.0;  // two-sided
    bool exact = false;
};

inline constexpr int kExactTestLimit = 12;  // per-sample size for exact p-values

// Mann-Whitney U with midranks for ties. Exact p (conditional on the tie
// pattern) when both samples have at most kExactTestLimit observations;
// otherwise a normal approximation with tie-corrected variance and a
// continuity correction. Two-sided p is P(|U - mn/2| >= |u_obs - mn/2|).
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw DataError("mann_whitney_u: empty sample");
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<long> rank2 = detail::double_midranks(pooled);

    long rank2_a = 0;
    for (std::size_t i = 0; i < m; ++i) rank2_a += rank2[i];
    // 2U = 2R_a - m(m+1)
    const long u2 = rank2_a - static_cast<long>(m * (m + 1));
    const double u = static_cast<double>(u2) / 2.0;

    MannWhitneyResult result;
    result.u = u;

    bool all_equal = true;
    for (double x : pooled)
        if (x != pooled[0]) {
            all_equal = false;
            break;
        }
    if (all_equal) {
        result.p = 1.0;
        result.exact = true;
        return result;
    }

    const long mn2 = static_cast<long>(m) * static_cast<long>(n);  // 2 * (mn/2)
    if (m <= kExactTestLimit && n <= kExactTestLimit) {
        const std::vector<double> dist = detail::rank_sum_distribution(rank2, m);
        // doubled U for a doubled rank-sum s: s - m(m+1)
        const long deviation = std::abs(u2 - mn2);
        double total = 0.0, extreme = 0.0;
        for (std::size_t s = 0; s < dist.size(); ++s) {
            if (dist[s] == 0.0) continue;
            total += dist[s];
            const long u2s = static_cast<long>(s) - static_cast<long>(m * (m + 1));
            if (std::abs(u2s - mn2) >= deviation) extreme += dist[s];
        }
        result.p = std::min(1.0, extreme / total);
        result.exact = true;
        return result;
    }

    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double total = md + nd;
    const double mu = md * nd / 2.0;
    double var = md * nd * (total + 1.0) / 12.0;
    const double ties = detail::tie_term(pooled);
    if (ties > 0.0) var -= md * nd * ties / (12.0 * total * (total - 1.0));
    if (var <= 0.0) {
        result.p = 1.0;
        return result;
    }
    double z = std::abs(u - mu) - 0.5;  // continuity correction toward the mean
    z = std::max(0.0, z) / std::sqrt(var);
    result.p = std::min(1.0, 2.0 * (1.0 - standard_normal_cdf(z)));
    return result;
}

struct WilcoxonResult {
    double w = 0.0;  // rank sum of positive differences
    double p = 1.0;  // two-sided
    int n_nonzero = 0;
    bool exact = false;
};

// Wilcoxon signed-rank test on paired differences. Zeros are dropped, ties
// among |d| get midranks. Exact distribution (conditional on the tie pattern)
// for up to kExactTestLimit nonzero differences, else a tie-corrected normal
// approximation with continuity correction.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& diffs) {
    std::vector<double> abs_d;
    std::vector<bool> positive;
    for (double d : diffs) {
        if (d == 0.0) continue;
        abs_d.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    WilcoxonResult result;
    result.n_nonzero = static_cast<int>(abs_d.size());
    if (abs_d.empty()) {
        result.w = 0.0;
        result.p = 1.0;
        result.exact = true;
        return result;
    }
    const std::vector<long> rank2 = detail::double_midranks(abs_d);
    long w2 = 0;
    long total2 = 0;
    for (std::size_t i = 0; i < abs_d.size(); ++i) {
        total2 += rank2[i];
        if (positive[i]) w2 += rank2[i];
    }
    result.w = static_cast<double>(w2) / 2.0;

    const std::size_t n = abs_d.size();
    if (n <= static_cast<std::size_t>(kExactTestLimit)) {
        // distribution of 2W over all 2^n sign assignments
        std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
        dist[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(rank2[i]);
            for (std::size_t s = dist.size(); s-- > r;)
                if (dist[s - r] != 0.0) dist[s] += dist[s - r];
        }
        const long dev2 = std::abs(2 * w2 - total2);  // |2W - n(n+1)/2| doubled midpoint
        double total = 0.0, extreme = 0.0;
        for (std::size_t s = 0; s < dist.size(); ++s) {
            if (dist[s] == 0.0) continue;
            total += dist[s];
            if (std::abs(2 * static_cast<long>(s) - total2) >= dev2) extreme += dist[s];
        }
        result.p = std::min(1.0, extreme / total);
        result.exact = true;
        return result;
    }

    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    var -= detail::tie_term(abs_d) / 48.0;
    if (var <= 0.0) {
        result.p = 1.0;
        return result;
    }
    double z = std::abs(result.w - mu) - 0.5;
    z = std::max(0.0, z) / std::sqrt(var);
    result.p = std::min(1.0, 2.0 * (1.0 - standard_normal_cdf(z)));
    return result;
}

// Mean difference over the pooled standard deviation (n-1 denominators).
inline double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw DataError("cohens_d: need n >= 2 per sample");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sa = 0.0, sb = 0.0;
    for (double x : a) sa += (x - ma) * (x - ma);
    for (double x : b) sb += (x - mb) * (x - mb);
    const double pooled_var =
        (sa + sb) / static_cast<double>(a.size() + b.size() - 2);
    if (pooled_var <= 0.0) throw DegenerateError("cohens_d: zero pooled variance");
    return (ma - mb) / std::sqrt(pooled_var);
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("pearson_r: bad input sizes");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw DegenerateError("pearson_r: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Score aggregation
// ---------------------------------------------------------------------------

// Scores keyed for joining back onto a corpus.
class ScoreTable {
public:
    explicit ScoreTable(const std::vector<ScoredUtterance>& rows) {
        for (const auto& r : rows) by_key_.emplace(r.conversation_id + '\x1f' + std::to_string(r.index), &r);
    }
    const ScoredUtterance* find(const std::string& conversation_id, int index) const {
        auto it = by_key_.find(conversation_id + '\x1f' + std::to_string(index));
        return it == by_key_.end() ? nullptr : it->second;
    }

private:
    std::unordered_map<std::string, const ScoredUtterance*> by_key_;
};

struct ConversationSummary {
    std::string conversation_id;
    std::optional<double> mean_omega_min;
    std::optional<double> mean_omega_max;
    int length_messages = 0;  // total messages after merging
    int n_agent_messages = 0;
    int n_scored = 0;
    const Conversation* conversation = nullptr;  // outcome metadata passthrough
};

// Arithmetic means of omega_min / omega_max over the scored agent messages of
// one merged conversation.
inline ConversationSummary conversation_summary(const Conversation& merged,
                                                const ScoreTable& scores) {
    ConversationSummary s;
    s.conversation_id = merged.conversation_id;
    s.length_messages = static_cast<int>(merged.utterances.size());
    s.conversation = &merged;
    double sum_min = 0.0, sum_max = 0.0;
    for (const auto& utt : merged.utterances) {
        if (utt.role != Role::Agent) continue;
        ++s.n_agent_messages;
        const ScoredUtterance* row = scores.find(merged.conversation_id, utt.index);
        if (!row || !row->score.omega_min) continue;
        ++s.n_scored;
        sum_min += *row->score.omega_min;
        sum_max += *row->score.omega_max;
    }
    if (s.n_scored > 0) {
        s.mean_omega_min = sum_min / s.n_scored;
        s.mean_omega_max = sum_max / s.n_scored;
    }
    return s;
}

struct ConversationSegmentMeans {
    std::string conversation_id;
    const Conversation* conversation = nullptr;
    std::vector<std::optional<double>> seg_mean_min;  // per segment
    std::vector<std::optional<double>> seg_mean_max;
};

// Per-conversation per-segment means; conversations below the agent-message
// threshold are skipped (count reported via n_excluded).
inline std::vector<ConversationSegmentMeans> per_conversation_segments(
    const Corpus& merged, const ScoreTable& scores, int n_segments, int min_agent_msgs,
    int* n_excluded = nullptr) {
    std::vector<ConversationSegmentMeans> out;
    int excluded = 0;
    for (const auto& conv : merged.conversations) {
        auto segments = segment_conversation(conv, n_segments, min_agent_msgs);
        if (!segments) {
            ++excluded;
            continue;
        }
        ConversationSegmentMeans csm;
        csm.conversation_id = conv.conversation_id;
        csm.conversation = &conv;
        csm.seg_mean_min.resize(static_cast<std::size_t>(n_segments));
        csm.seg_mean_max.resize(static_cast<std::size_t>(n_segments));
        for (const auto& seg : *segments) {
            double sum_min = 0.0, sum_max = 0.0;
            int n = 0;
            for (int utt_index : seg.agent_utterance_indices) {
                const ScoredUtterance* row = scores.find(conv.conversation_id, utt_index);
                if (!row || !row->score.omega_min) continue;
                ++n;
                sum_min += *row->score.omega_min;
                sum_max += *row->score.omega_max;
            }
            if (n > 0) {
                csm.seg_mean_min[static_cast<std::size_t>(seg.segment_index)] = sum_min / n;
                csm.seg_mean_max[static_cast<std::size_t>(seg.segment_index)] = sum_max / n;
            }
        }
        out.push_back(std::move(csm));
    }
    if (n_excluded) *n_excluded = excluded;
    return out;
}

struct SegmentProfile {
    std::string group_key;    // empty when ungrouped
    std::string group_value;  // empty when ungrouped
    int n_segments = 0;
    std::vector<double> mean_omega_min;   // macroaveraged per segment
    std::vector<double> mean_omega_max;
    std::vector<int> n_conversations;     // contributing per segment
    std::vector<std::vector<double>> values_min;  // per segment, per conversation
    std::vector<std::vector<double>> values_max;
    int n_excluded = 0;
};

inline std::string meta_value_string(const MetaValue& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        nlohmann::json j = *d;
        return j.dump();
    }
    return std::get<std::string>(v);
}

// Macroaveraged segment profiles: each conversation contributes its own
// per-segment mean once, regardless of message count. With group_by set, one
// profile per observed value of that metadata key.
inline std::vector<SegmentProfile> segment_profile(const Corpus& merged, const ScoreTable& scores,
                                                   int n_segments, int min_agent_msgs,
                                                   const std::string& group_by = "") {
    int excluded = 0;
    const auto per_conv =
        per_conversation_segments(merged, scores, n_segments, min_agent_msgs, &excluded);

    std::map<std::string, std::vector<const ConversationSegmentMeans*>> groups;
    for (const auto& csm : per_conv) {
        std::string value;
        if (!group_by.empty()) {
            auto it = csm.conversation->metadata.find(group_by);
            value = it == csm.conversation->metadata.end() ? "(missing)"
                                                           : meta_value_string(it->second);
        }
        groups[value].push_back(&csm);
    }

    std::vector<SegmentProfile> profiles;
    for (const auto& [value, members] : groups) {
        SegmentProfile p;
        p.group_key = group_by;
        p.group_value = value;
        p.n_segments = n_segments;
        p.n_excluded = excluded;
        p.mean_omega_min.assign(static_cast<std::size_t>(n_segments), 0.0);
        p.mean_omega_max.assign(static_cast<std::size_t>(n_segments), 0.0);
        p.n_conversations.assign(static_cast<std::size_t>(n_segments), 0);
        p.values_min.resize(static_cast<std::size_t>(n_segments));
        p.values_max.resize(static_cast<std::size_t>(n_segments));
        for (const auto* csm : members)
            for (int s = 0; s < n_segments; ++s) {
                const auto si = static_cast<std::size_t>(s);
                if (!csm->seg_mean_min[si]) continue;
                p.values_min[si].push_back(*csm->seg_mean_min[si]);
                p.values_max[si].push_back(*csm->seg_mean_max[si]);
            }
        for (int s = 0; s < n_segments; ++s) {
            const auto si = static_cast<std::size_t>(s);
            p.n_conversations[si] = static_cast<int>(p.values_min[si].size());
            if (!p.values_min[si].empty()) {
                p.mean_omega_min[si] = mean_of(p.values_min[si]);
                p.mean_omega_max[si] = mean_of(p.values_max[si]);
            }
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

// ---------------------------------------------------------------------------
// Counselor-level analysis
// ---------------------------------------------------------------------------

enum class OutcomeKind { Helpful, Length };

struct CounselorTendency {
    std::string agent_id;
    int n_conversations = 0;  // within the analysis window
    int n_tendency = 0;
    int n_outcome = 0;
    std::optional<double> tendency_omega_min;
    std::optional<double> tendency_omega_max;
    std::optional<double> outcome_helpful_rate;  // rated conversations only
    std::optional<double> outcome_mean_length;
};

// Splits each agent's conversations (corpus order, restricted to the 1-based
// window [first, last]) into interleaved halves: odd positions measure the
// orientation tendency, even positions measure the outcome. Agents with
// fewer than min_conversations total are excluded.
inline std::vector<CounselorTendency> counselor_split(
    const std::vector<ConversationSummary>& summaries, int window_first, int window_last,
    int min_conversations) {
    if (window_first < 1 || window_last < window_first)
        throw ConfigError("counselor_split: invalid window");

    std::vector<std::string> agent_order;
    std::map<std::string, std::vector<const ConversationSummary*>> by_agent;
    for (const auto& s : summaries) {
        if (!s.conversation) continue;
        auto agent = s.conversation->agent_id();
        if (!agent) continue;
        auto [it, inserted] = by_agent.try_emplace(*agent);
        if (inserted) agent_order.push_back(*agent);
        it->second.push_back(&s);
    }

    std::vector<CounselorTendency> out;
    for (const auto& agent : agent_order) {
        const auto& convs = by_agent[agent];
        if (static_cast<int>(convs.size()) < min_conversations) continue;
        CounselorTendency row;
        row.agent_id = agent;
        std::vector<double> t_min, t_max, o_len;
        int rated = 0, helpful = 0;
        const int last = std::min(window_last, static_cast<int>(convs.size()));
        for (int pos = window_first; pos <= last; ++pos) {
            const ConversationSummary* s = convs[static_cast<std::size_t>(pos - 1)];
            ++row.n_conversations;
            const int window_pos = pos - window_first + 1;
            if (window_pos % 2 == 1) {  // tendency half
                ++row.n_tendency;
                if (s->mean_omega_min) {
                    t_min.push_back(*s->mean_omega_min);
                    t_max.push_back(*s->mean_omega_max);
                }
            } else {  // outcome half
                ++row.n_outcome;
                o_len.push_back(static_cast<double>(s->length_messages));
                if (auto h = s->conversation->bool_meta("helpful")) {
                    ++rated;
                    if (*h) ++helpful;
                }
            }
        }
        if (!t_min.empty()) {
            row.tendency_omega_min = mean_of(t_min);
            row.tendency_omega_max = mean_of(t_max);
        }
        if (rated > 0)
            row.outcome_helpful_rate = static_cast<double>(helpful) / static_cast<double>(rated);
        if (!o_len.empty()) row.outcome_mean_length = mean_of(o_len);
        out.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Length buckets
// ---------------------------------------------------------------------------

struct LengthBucket {
    int bucket = 0;
    int min_length = 0;
    int max_length = 0;
    int n_conversations = 0;
    double mean_omega_min = 0.0;
    double mean_omega_max = 0.0;
    std::vector<double> values_min;
    std::vector<double> values_max;
};

// Groups conversation summaries into n_buckets quantile buckets of message
// count (custom edges override). Buckets that would be empty are dropped.
inline std::vector<LengthBucket> length_buckets(const std::vector<ConversationSummary>& summaries,
                                                int n_buckets,
                                                const std::vector<int>& custom_edges = {}) {
    std::vector<const ConversationSummary*> scored;
    for (const auto& s : summaries)
        if (s.mean_omega_min) scored.push_back(&s);
    if (scored.empty()) return {};

    std::vector<int> edges = custom_edges;  // upper bounds, inclusive
    if (edges.empty()) {
        std::vector<int> lengths;
        lengths.reserve(scored.size());
        for (const auto* s : scored) lengths.push_back(s->length_messages);
        std::sort(lengths.begin(), lengths.end());
        for (int b = 1; b <= n_buckets; ++b) {
            const auto ix = static_cast<std::size_t>(
                std::min<long>(static_cast<long>(lengths.size()) - 1,
                               static_cast<long>(std::ceil(static_cast<double>(b) *
                                                           static_cast<double>(lengths.size()) /
                                                           n_buckets)) -
                                   1));
            edges.push_back(lengths[ix]);
        }
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    std::sort(edges.begin(), edges.end());

    std::vector<LengthBucket> buckets(edges.size());
    for (std::size_t b = 0; b < edges.size(); ++b) {
        buckets[b].bucket = static_cast<int>(b);
        buckets[b].max_length = edges[b];
        buckets[b].min_length = b == 0 ? 0 : edges[b - 1] + 1;
    }
    for (const auto* s : scored) {
        std::size_t b = 0;
        while (b + 1 < edges.size() && s->length_messages > edges[b]) ++b;
        buckets[b].values_min.push_back(*s->mean_omega_min);
        buckets[b].values_max.push_back(*s->mean_omega_max);
    }
    std::vector<LengthBucket> out;
    for (auto& bucket : buckets) {
        if (bucket.values_min.empty()) continue;
        bucket.n_conversations = static_cast<int>(bucket.values_min.size());
        bucket.mean_omega_min = mean_of(bucket.values_min);
        bucket.mean_omega_max = mean_of(bucket.values_max);
        out.push_back(std::move(bucket));
    }
    for (std::size_t b = 0; b < out.size(); ++b) out[b].bucket = static_cast<int>(b);
    return out;
}

}  // namespace orient
