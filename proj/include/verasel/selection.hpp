#pragma once

// The selection algorithm: weight table over [0, W), hash-stream index
// draws, threshold-driven iterative selection, and stratified layer
// assignment. Everything here is a pure function of its inputs; tables are
// values and removal returns a new table.

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <vector>

#include "verasel/roster.hpp"

namespace verasel {

class DegenerateEpochError : public Error {
public:
    using Error::Error;
};

/// Threshold fraction in (0, 1]. Kept exact; all comparisons use integer
/// cross-multiplication so every client stops at the same round.
struct Fraction {
    std::uint64_t num = 1;
    std::uint64_t den = 2;

    bool valid() const { return den != 0 && num != 0 && num <= den; }

    std::string str() const {
        return std::to_string(num) + "/" + std::to_string(den);
    }

    /// Accepts "n/d", "0.5", or "1".
    static Fraction parse(std::string_view s) {
        auto slash = s.find('/');
        try {
            if (slash != std::string_view::npos) {
                std::uint64_t n = std::stoull(std::string(s.substr(0, slash)));
                std::uint64_t d = std::stoull(std::string(s.substr(slash + 1)));
                return Fraction{n, d};
            }
            auto dot = s.find('.');
            if (dot == std::string_view::npos) {
                return Fraction{std::stoull(std::string(s)), 1};
            }
            std::string digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
            std::size_t frac_digits = s.size() - dot - 1;
            if (frac_digits > 18) throw Error("fraction: too many decimal digits");
            std::uint64_t den = 1;
            for (std::size_t i = 0; i < frac_digits; ++i) den *= 10;
            return Fraction{std::stoull(digits), den};
        } catch (const std::logic_error&) {
            throw Error("cannot parse fraction: " + std::string(s));
        }
    }
};

inline bool threshold_reached(std::uint64_t cumulative, Fraction tau,
                              std::uint64_t total) {
    return static_cast<unsigned __int128>(cumulative) * tau.den >=
           static_cast<unsigned __int128>(tau.num) * total;
}

struct WeightTable {
    struct Segment {
        NodeId id;
        std::uint64_t weight = 0;
    };

    std::vector<Segment> segments;  // roster order; intervals are implied prefix sums
    std::uint64_t total = 0;        // W
};

/// Step (c): append w_i intervals per member, in roster order; W = |WT|.
inline WeightTable build_weight_table(const ValidatedRoster& roster) {
    WeightTable t;
    t.segments.reserve(roster.members.size());
    for (const auto& m : roster.members) {
        t.segments.push_back(WeightTable::Segment{m.id, m.weight});
        t.total += m.weight;
    }
    return t;
}

/// Step (e) mapping: the node owning the half-open interval containing idx.
inline const NodeId& lookup(const WeightTable& table, std::uint64_t idx) {
    if (idx >= table.total) {
        throw Error("weight table lookup: index " + std::to_string(idx) +
                    " out of range [0, " + std::to_string(table.total) + ")");
    }
    std::uint64_t begin = 0;
    for (const auto& seg : table.segments) {
        if (idx < begin + seg.weight) return seg.id;
        begin += seg.weight;
    }
    throw Error("weight table lookup: intervals not exhaustive");  // unreachable
}

/// Step (e) removal: drop the node's segment; later segments shift down so
/// [0, W) stays exhaustive.
inline WeightTable remove_node(const WeightTable& table, const NodeId& id) {
    WeightTable out;
    out.segments.reserve(table.segments.size());
    bool found = false;
    for (const auto& seg : table.segments) {
        if (!found && seg.id == id) {
            found = true;
            continue;
        }
        out.segments.push_back(seg);
        out.total += seg.weight;
    }
    if (!found) throw Error("weight table remove: unknown node");
    return out;
}

/// Step (d) index stream. Round t (1-based) consumes the t-th commitment of
/// the sorted roster: H(y_(t-1)). Once every commitment has been consumed,
/// the stream restarts with a counter suffix, H(y_(p) || counter), so the
/// values stay fresh for thresholds near 1.
inline Hash256 draw_stream(const ValidatedRoster& roster, std::uint64_t round) {
    if (roster.members.empty()) {
        throw DegenerateEpochError("draw_stream: empty roster");
    }
    if (round == 0) throw Error("draw_stream: rounds are 1-based");
    const std::uint64_t m = roster.members.size();
    const std::uint64_t position = (round - 1) % m;
    const std::uint64_t counter = (round - 1) / m;
    if (counter == 0) return roster.members[position].hash_int;
    auto enc = be64(counter);
    return sha256({view(roster.members[position].commitment_y), ByteView(enc.data(), 8)});
}

struct SelectedNode {
    NodeId id;
    std::uint64_t weight = 0;
    std::uint64_t round = 0;
};

struct ActiveSet {
    std::uint64_t epoch = 0;
    std::vector<SelectedNode> selected;
    std::uint64_t cumulative_weight = 0;
    std::uint64_t total_weight = 0;
    Fraction threshold;
    std::map<NodeId, std::uint32_t> layer_of;

    /// Canonical one-line rendering; used for cross-client agreement checks.
    std::string canonical_string() const {
        std::ostringstream out;
        out << "epoch=" << epoch << " tau=" << threshold.str() << " cum="
            << cumulative_weight << " total=" << total_weight << " selected=";
        for (const auto& s : selected) {
            out << to_hex(view(s.id)) << ':' << s.weight << ':' << s.round << ';';
        }
        out << " layers=";
        for (const auto& [id, layer] : layer_of) {
            out << to_hex(view(id)) << ':' << layer << ';';
        }
        return out.str();
    }
};

namespace detail {

// Fenwick tree over roster positions; removal zeroes a weight. Prefix-sum
// semantics match the compacting table exactly, at O(log n) per draw.
class WeightedIndex {
public:
    explicit WeightedIndex(const std::vector<std::uint64_t>& weights)
        : n_(weights.size()), tree_(weights.size() + 1, 0) {
        for (std::size_t i = 0; i < n_; ++i) add(i, static_cast<std::int64_t>(weights[i]));
        for (std::size_t i = 0; i < n_; ++i) total_ += weights[i];
        top_ = 1;
        while ((top_ << 1) <= n_) top_ <<= 1;
    }

    std::uint64_t total() const { return total_; }

    /// Position whose interval contains idx (0 <= idx < total()).
    std::size_t find(std::uint64_t idx) const {
        std::size_t pos = 0;
        std::uint64_t remaining = idx;
        for (std::size_t step = top_; step > 0; step >>= 1) {
            std::size_t next = pos + step;
            if (next <= n_ && tree_[next] <= remaining) {
                pos = next;
                remaining -= tree_[next];
            }
        }
        return pos;  // 0-based
    }

    void remove(std::size_t pos, std::uint64_t weight) {
        add(pos, -static_cast<std::int64_t>(weight));
        total_ -= weight;
    }

private:
    void add(std::size_t pos, std::int64_t delta) {
        for (std::size_t i = pos + 1; i <= n_; i += i & (~i + 1)) {
            tree_[i] = static_cast<std::uint64_t>(static_cast<std::int64_t>(tree_[i]) + delta);
        }
    }

    std::size_t n_;
    std::vector<std::uint64_t> tree_;
    std::uint64_t total_ = 0;
    std::size_t top_ = 1;
};

}  // namespace detail

/// Steps (d)-(f): draw an index, move the owning node to the active set,
/// compact, stop at the first round where cumulative weight meets the
/// threshold.
inline ActiveSet select_active_set(const ValidatedRoster& roster, Fraction tau) {
    if (!tau.valid()) {
        throw Error("select_active_set: threshold must be in (0, 1]");
    }
    if (roster.members.empty()) {
        throw DegenerateEpochError("select_active_set: empty roster");
    }

    std::vector<std::uint64_t> weights;
    weights.reserve(roster.members.size());
    for (const auto& m : roster.members) weights.push_back(m.weight);
    detail::WeightedIndex index(weights);

    ActiveSet active;
    active.epoch = roster.epoch;
    active.threshold = tau;
    active.total_weight = index.total();

    for (std::uint64_t round = 1;
         !threshold_reached(active.cumulative_weight, tau, active.total_weight);
         ++round) {
        const std::uint64_t idx = draw_stream(roster, round).mod(index.total());
        const std::size_t pos = index.find(idx);
        const auto& member = roster.members[pos];
        active.selected.push_back(SelectedNode{member.id, member.weight, round});
        active.cumulative_weight += member.weight;
        index.remove(pos, member.weight);
    }
    return active;
}

/// §3.4 layer placement: layer(i) = H(y_i) mod l for each selected node.
inline ActiveSet assign_layers(ActiveSet active, const ValidatedRoster& roster,
                               std::uint32_t layers) {
    if (layers == 0) throw Error("assign_layers: layer count must be >= 1");
    std::map<NodeId, const RosterMember*> by_id;
    for (const auto& m : roster.members) by_id[m.id] = &m;
    active.layer_of.clear();
    for (const auto& s : active.selected) {
        auto it = by_id.find(s.id);
        if (it == by_id.end()) {
            throw Error("assign_layers: selected node missing from roster");
        }
        active.layer_of[s.id] =
            static_cast<std::uint32_t>(it->second->hash_int.mod(layers));
    }
    return active;
}

}  // namespace verasel
