#pragma once

// Statistical validation machinery: bandwidth sampling, the trusted-party
// selection oracle, per-node selection frequencies, the two-sample
// Kolmogorov-Smirnov test, chi-square uniformity, and the analytic
// collision-probability helper.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <vector>

#include "verasel/rng.hpp"
#include "verasel/selection.hpp"

namespace verasel {

/// Heavy-tailed (log-normal) bandwidth generator, weights quantized to
/// positive integers. Defaults elsewhere are tuned so 1000 nodes total
/// about 9970 weight units.
inline std::vector<std::uint64_t> sample_bandwidths_parametric(std::size_t n,
                                                               double mu,
                                                               double sigma,
                                                               DetRng& rng) {
    if (n == 0) throw Error("sample_bandwidths: need n >= 1");
    std::vector<std::uint64_t> weights;
    weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = std::exp(mu + sigma * rng.normal());
        auto quantized = static_cast<std::uint64_t>(std::llround(w));
        weights.push_back(std::max<std::uint64_t>(1, quantized));
    }
    return weights;
}

/// One positive integer weight per row.
inline std::vector<std::uint64_t> load_bandwidths_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open weights csv: " + path.string());
    std::vector<std::uint64_t> weights;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::uint64_t w = 0;
        try {
            std::size_t used = 0;
            w = std::stoull(line, &used);
            if (used != line.size()) throw Error("trailing characters");
        } catch (const std::exception&) {
            throw Error("weights csv line " + std::to_string(lineno) +
                        ": not a positive integer: '" + line + "'");
        }
        if (w == 0) {
            throw Error("weights csv line " + std::to_string(lineno) +
                        ": weight must be >= 1");
        }
        weights.push_back(w);
    }
    if (weights.empty()) throw Error("weights csv is empty: " + path.string());
    return weights;
}

/// The evaluation benchmark: unverifiable weighted sampling without
/// replacement by a trusted party, drawing until the cumulative weight
/// meets the threshold. Returns selected node indices in draw order.
inline std::vector<std::uint32_t> simple_weighted_select(
    const std::vector<std::uint64_t>& weights, Fraction tau, DetRng& rng) {
    if (weights.empty()) throw Error("simple_weighted_select: empty weights");
    if (!tau.valid()) throw Error("simple_weighted_select: threshold must be in (0, 1]");
    for (auto w : weights) {
        if (w == 0) throw Error("simple_weighted_select: weights must be >= 1");
    }
    detail::WeightedIndex index(weights);
    const std::uint64_t total = index.total();
    std::vector<std::uint32_t> selected;
    std::uint64_t cumulative = 0;
    while (!threshold_reached(cumulative, tau, total)) {
        const std::uint64_t idx = rng.below(index.total());
        const std::size_t pos = index.find(idx);
        selected.push_back(static_cast<std::uint32_t>(pos));
        cumulative += weights[pos];
        index.remove(pos, weights[pos]);
    }
    return selected;
}

struct FrequencyProfile {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> counts;  // per node

    std::vector<double> frequencies() const {
        std::vector<double> out;
        out.reserve(counts.size());
        for (auto c : counts) {
            out.push_back(trials == 0 ? 0.0
                                      : static_cast<double>(c) / static_cast<double>(trials));
        }
        return out;
    }

    std::uint64_t total_selections() const {
        std::uint64_t sum = 0;
        for (auto c : counts) sum += c;
        return sum;
    }
};

/// Per-node inclusion frequency over `trials` runs of a subset-producing
/// callable (indices into [0, n_nodes)).
inline FrequencyProfile selection_frequencies(
    std::size_t n_nodes, std::uint64_t trials,
    const std::function<std::vector<std::uint32_t>(std::uint64_t)>& run) {
    if (trials == 0) throw Error("selection_frequencies: trials must be >= 1");
    FrequencyProfile profile;
    profile.trials = trials;
    profile.counts.assign(n_nodes, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (auto idx : run(t)) {
            if (idx >= n_nodes) throw Error("selection_frequencies: index out of range");
            profile.counts[idx] += 1;
        }
    }
    return profile;
}

struct KsResult {
    double statistic = 0.0;   // D
    double critical = 0.0;    // D_alpha
    double alpha = 0.0;
    std::size_t n = 0, m = 0;
    bool accept = false;
};

/// Asymptotic two-sample critical value: c(alpha) * sqrt((n+m)/(n*m)) with
/// c(alpha) = sqrt(-ln(alpha/2) / 2). c(0.05) = 1.358.
inline double ks_critical(std::size_t n, std::size_t m, double alpha) {
    if (n == 0 || m == 0) throw Error("ks_critical: empty sample");
    if (alpha <= 0.0 || alpha >= 1.0) throw Error("ks_critical: alpha must be in (0,1)");
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    const double nd = static_cast<double>(n), md = static_cast<double>(m);
    return c * std::sqrt((nd + md) / (nd * md));
}

/// D = sup |F_a - F_b| over the merged sample.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                              double alpha) {
    if (a.empty() || b.empty()) throw Error("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.alpha = alpha;
    r.n = a.size();
    r.m = b.size();
    r.critical = ks_critical(r.n, r.m, alpha);
    r.accept = d <= r.critical;
    return r;
}

/// m(m-1) / 2^(n_bits+1), evaluated exactly via ldexp when the exponent is
/// representable and in log-space beyond that. Extended precision keeps the
/// result nonzero for output sizes far past double range.
inline long double collision_probability(std::uint64_t m, std::uint32_t n_bits) {
    if (m < 2) return 0.0L;
    const long double pairs =
        static_cast<long double>(m) * static_cast<long double>(m - 1);
    const int shift = static_cast<int>(n_bits) + 1;
    if (shift <= 900) {
        return std::ldexp(pairs, -shift);
    }
    const long double log2_value = std::log2(pairs) - static_cast<long double>(shift);
    return std::exp2(log2_value);
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::uint32_t df = 0;

    bool passes(double alpha) const;
};

/// Upper critical values of the chi-square distribution for the fixed alpha
/// table {0.05, 0.01, 0.001}; Wilson-Hilferty beyond df = 10.
inline double chi_square_critical(std::uint32_t df, double alpha) {
    if (df == 0) throw Error("chi_square_critical: df must be >= 1");
    struct Row {
        double a05, a01, a001;
    };
    static constexpr Row table[10] = {
        {3.841, 6.635, 10.828}, {5.991, 9.210, 13.816}, {7.815, 11.345, 16.266},
        {9.488, 13.277, 18.467}, {11.070, 15.086, 20.515}, {12.592, 16.812, 22.458},
        {14.067, 18.475, 24.322}, {15.507, 20.090, 26.124}, {16.919, 21.666, 27.877},
        {18.307, 23.209, 29.588}};
    double z;
    if (alpha == 0.05) z = 1.6449;
    else if (alpha == 0.01) z = 2.3263;
    else if (alpha == 0.001) z = 3.0902;
    else throw Error("chi_square_critical: alpha must be one of 0.05, 0.01, 0.001");
    if (df <= 10) {
        const Row& row = table[df - 1];
        return alpha == 0.05 ? row.a05 : (alpha == 0.01 ? row.a01 : row.a001);
    }
    // Wilson-Hilferty cube approximation.
    const double d = static_cast<double>(df);
    const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

inline bool ChiSquareResult::passes(double alpha) const {
    return statistic <= chi_square_critical(df, alpha);
}

/// Chi-square statistic of observed bucket counts against the uniform
/// expectation.
inline ChiSquareResult chi_square_uniform(const std::vector<std::uint64_t>& counts) {
    if (counts.size() < 2) throw Error("chi_square_uniform: need >= 2 buckets");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error("chi_square_uniform: zero total count");
    const double expected =
        static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    return ChiSquareResult{stat, static_cast<std::uint32_t>(counts.size() - 1)};
}

}  // namespace verasel
