#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "verasel/rng.hpp"
#include "verasel/stats.hpp"

using namespace verasel;

TEST_CASE("parametric bandwidths at defaults total near the target") {
    crypto_init();
    DetRng rng(4242);
    auto weights = sample_bandwidths_parametric(1000, 1.58, 1.2, rng);
    REQUIRE(weights.size() == 1000);
    std::uint64_t total = 0;
    for (auto w : weights) {
        CHECK(w >= 1);
        total += w;
    }
    CHECK(total > 9970 * 0.9);
    CHECK(total < 9970 * 1.1);
}

TEST_CASE("csv bandwidths") {
    auto dir = std::filesystem::temp_directory_path() / "verasel_stats_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "w.csv";

    std::ofstream(path) << "5\n3\n2\n";
    CHECK(load_bandwidths_csv(path) == std::vector<std::uint64_t>{5, 3, 2});

    std::ofstream(path, std::ios::trunc) << "5\n0\n2\n";
    CHECK_THROWS_AS(load_bandwidths_csv(path), Error);

    std::ofstream(path, std::ios::trunc) << "5\nx\n";
    CHECK_THROWS_AS(load_bandwidths_csv(path), Error);

    CHECK_THROWS_AS(load_bandwidths_csv(dir / "missing.csv"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("simple_weighted_select basics") {
    DetRng rng(1);
    std::vector<std::uint64_t> one = {7};
    auto sel = simple_weighted_select(one, Fraction{1, 2}, rng);
    CHECK(sel == std::vector<std::uint32_t>{0});

    std::vector<std::uint64_t> weights = {5, 3, 2};
    auto all = simple_weighted_select(weights, Fraction{1, 1}, rng);
    CHECK(all.size() == 3);

    std::vector<std::uint64_t> empty;
    CHECK_THROWS_AS(simple_weighted_select(empty, Fraction{1, 2}, rng), Error);
    CHECK_THROWS_AS(simple_weighted_select(weights, Fraction{0, 1}, rng), Error);
}

TEST_CASE("simple_weighted_select first-draw law") {
    // Pr[node drawn first] = w_i / W, checked to 3 sigma over 100k trials.
    std::vector<std::uint64_t> weights = {5, 3, 2};
    const std::uint64_t trials = 100000;
    DetRng rng(314159);
    std::vector<std::uint64_t> first_counts(3, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto sel = simple_weighted_select(weights, Fraction{1, 10}, rng);
        first_counts[sel[0]] += 1;
    }
    const double expected[] = {0.5, 0.3, 0.2};
    for (std::size_t i = 0; i < 3; ++i) {
        const double p = expected[i];
        const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(trials));
        const double freq =
            static_cast<double>(first_counts[i]) / static_cast<double>(trials);
        CHECK(std::fabs(freq - p) <= 3 * sigma);
    }
}

TEST_CASE("selection_frequencies bookkeeping") {
    auto profile = selection_frequencies(3, 10, [](std::uint64_t) {
        return std::vector<std::uint32_t>{0};
    });
    CHECK(profile.counts == std::vector<std::uint64_t>{10, 0, 0});
    CHECK(profile.frequencies()[0] == 1.0);
    CHECK(profile.frequencies()[1] == 0.0);

    // Sum of counts equals the sum of subset sizes.
    DetRng rng(5);
    std::uint64_t total_size = 0;
    auto profile2 = selection_frequencies(8, 50, [&](std::uint64_t) {
        std::vector<std::uint32_t> subset;
        for (std::uint32_t i = 0; i < 8; ++i) {
            if (rng.below(2)) subset.push_back(i);
        }
        total_size += subset.size();
        return subset;
    });
    CHECK(profile2.total_selections() == total_size);
    CHECK_THROWS_AS(selection_frequencies(3, 0, nullptr), Error);
}

TEST_CASE("ks two-sample test") {
    std::vector<double> a = {0.1, 0.2, 0.3, 0.4};
    auto same = ks_two_sample(a, a, 0.05);
    CHECK(same.statistic == 0.0);
    CHECK(same.accept);

    std::vector<double> zeros(100, 0.0), ones(100, 1.0);
    auto disjoint = ks_two_sample(zeros, ones, 0.05);
    CHECK(disjoint.statistic == 1.0);
    CHECK_FALSE(disjoint.accept);

    // The critical value the protocol's evaluation quotes: n = m = 3000,
    // alpha = 0.05 gives 0.0351.
    CHECK(std::fabs(ks_critical(3000, 3000, 0.05) - 0.0351) < 0.0001);

    CHECK_THROWS_AS(ks_two_sample({}, a, 0.05), Error);
    CHECK_THROWS_AS(ks_two_sample(a, a, 1.5), Error);
}

TEST_CASE("ks statistic symmetry and monotone invariance") {
    DetRng rng(777);
    std::vector<double> a, b;
    for (int i = 0; i < 400; ++i) a.push_back(rng.unit());
    for (int i = 0; i < 300; ++i) b.push_back(rng.unit() * rng.unit());

    auto ab = ks_two_sample(a, b, 0.05);
    auto ba = ks_two_sample(b, a, 0.05);
    CHECK(ab.statistic == Catch::Approx(ba.statistic));

    auto transform = [](std::vector<double> v) {
        for (auto& x : v) x = std::exp(3.0 * x + 1.0);
        return v;
    };
    auto tr = ks_two_sample(transform(a), transform(b), 0.05);
    CHECK(tr.statistic == Catch::Approx(ab.statistic));
}

TEST_CASE("negative control: uniform unweighted selection is rejected") {
    // Ten nodes with a strongly skewed weight vector; the protocol-faithful
    // oracle concentrates on the heavy node, a broken uniform arm cannot.
    std::vector<std::uint64_t> weights = {1, 1, 1, 1, 1, 1, 1, 1, 1, 91};
    const std::uint64_t trials = 4000;

    DetRng oracle_rng(2025);
    auto oracle = selection_frequencies(10, trials, [&](std::uint64_t) {
        return simple_weighted_select(weights, Fraction{1, 2}, oracle_rng);
    });

    DetRng broken_rng(2026);
    auto broken = selection_frequencies(10, trials, [&](std::uint64_t) {
        // Uniform unweighted: pick nodes ignoring weight until half the
        // node count is selected.
        std::vector<std::uint32_t> pool = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        std::vector<std::uint32_t> subset;
        while (subset.size() < 5) {
            std::size_t pick = broken_rng.below(pool.size());
            subset.push_back(pool[pick]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        return subset;
    });

    auto ks = ks_two_sample(oracle.frequencies(), broken.frequencies(), 0.05);
    CHECK_FALSE(ks.accept);
}

TEST_CASE("collision probability helper") {
    CHECK(collision_probability(0, 8) == 0.0L);
    CHECK(collision_probability(1, 8) == 0.0L);
    CHECK(collision_probability(2, 1) == 0.5L);

    // 1000 nodes, 256-bit outputs: frozen from an arbitrary-precision
    // evaluation of m(m-1)/2^257.
    const long double expected = 4.3137661932696750904e-72L;
    const long double got = collision_probability(1000, 256);
    CHECK(fabsl(got - expected) / expected < 1e-6L);

    // Log-space branch stays finite and positive far beyond double range.
    const long double tiny = collision_probability(1000, 2000);
    CHECK(tiny > 0.0L);
    CHECK(tiny < 1e-570L);
}

TEST_CASE("chi-square uniformity") {
    CHECK(chi_square_uniform({25, 25, 25, 25}).statistic == 0.0);

    // All mass in one of k buckets: statistic = (k-1) * total.
    ChiSquareResult all_in_one = chi_square_uniform({120, 0, 0, 0});
    CHECK(all_in_one.statistic == Catch::Approx(3 * 120.0));
    CHECK(all_in_one.df == 3);
    CHECK_FALSE(all_in_one.passes(0.001));

    CHECK(chi_square_uniform({26, 24, 25, 25}).passes(0.05));
    CHECK_THROWS_AS(chi_square_uniform({5}), Error);
    CHECK_THROWS_AS(chi_square_uniform({0, 0}), Error);

    // Critical-value table spot checks (standard chi-square quantiles).
    CHECK(chi_square_critical(3, 0.001) == Catch::Approx(16.266));
    CHECK(chi_square_critical(9, 0.001) == Catch::Approx(27.877));
    CHECK(chi_square_critical(3, 0.05) == Catch::Approx(7.815));
    // Wilson-Hilferty for df beyond the table: chi2(0.95, 20) ~ 31.410.
    CHECK(chi_square_critical(20, 0.05) == Catch::Approx(31.410).epsilon(0.01));
    CHECK_THROWS_AS(chi_square_critical(0, 0.05), Error);
    CHECK_THROWS_AS(chi_square_critical(3, 0.2), Error);
}

TEST_CASE("deterministic rng is reproducible") {
    DetRng a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.u64() == b.u64());
    DetRng c(10);
    CHECK(a.u64() != c.u64());

    DetRng d(11);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t v = d.below(7);
        CHECK(v < 7);
    }
    CHECK_THROWS_AS(d.below(0), Error);

    // derive() is stateless and label-separated.
    CHECK(DetRng::derive("a", 1, 2) == DetRng::derive("a", 1, 2));
    CHECK(DetRng::derive("a", 1, 2) != DetRng::derive("b", 1, 2));
    CHECK(DetRng::derive("a", 1, 2) != DetRng::derive("a", 1, 3));
}
