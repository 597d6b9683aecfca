#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "gspq/error.hpp"
#include "gspq/funcquant.hpp"
#include "oracles.hpp"

using namespace gspq;

namespace {
const DistortionTable& table() {
    static const DistortionTable t(1024);
    return t;
}

// Σ_j λ_j d_{n_j} over the first L coordinates, unassigned ones counting d_1 = 1.
double objective(const Spectrum& s, const std::vector<int>& levels) {
    double total = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        total += s[j].lambda * (j < levels.size() ? table()(levels[j]) : 1.0);
    }
    return total;
}

// Every level vector (no ordering imposed) with product <= budget.
double brute_force_best(const Spectrum& s, long budget) {
    double best = objective(s, {});
    std::vector<int> cur;
    std::function<void(long)> walk = [&](long left) {
        if (cur.size() == s.size()) return;
        for (int n = 2; n <= left && n <= table().max_n(); ++n) {
            cur.push_back(n);
            best = std::min(best, objective(s, cur));
            walk(left / n);
            cur.pop_back();
        }
    };
    walk(budget);
    return best;
}
}  // namespace

TEST_CASE("allocation examples") {
    const Spectrum w = spectrum_batch({0.0, 1.0}, 16);
    const Allocation one = allocate(w, 1, AllocMethod::exhaustive, table());
    CHECK(one.size() == 0);
    CHECK(one.codebook_size() == 1);

    const Allocation two = allocate(w, 2, AllocMethod::exhaustive, table());
    CHECK(two.levels == std::vector<int>{2});

    // λ_1 dominates λ_2 by a factor 9, so a single coordinate takes budget 3
    const Allocation three = allocate(w, 3, AllocMethod::exhaustive, table());
    CHECK(three.levels == std::vector<int>{3});
}

TEST_CASE("exhaustive allocation matches an unordered brute-force search") {
    for (double k : {0.0, 0.5, 2.0}) {
        const Spectrum s = spectrum_batch({k, 1.0}, 8);
        for (long budget : {2L, 4L, 7L, 16L, 30L, 64L, 128L}) {
            const Allocation a = allocate(s, budget, AllocMethod::exhaustive, table());
            CHECK(a.codebook_size() <= budget);
            for (std::size_t j = 1; j < a.size(); ++j) CHECK(a.levels[j] <= a.levels[j - 1]);
            for (int n : a.levels) CHECK(n >= 2);
            CHECK(objective(s, a.levels) == doctest::Approx(brute_force_best(s, budget)).epsilon(1e-14));
        }
    }
}

TEST_CASE("greedy allocation") {
    for (double k : {0.0, 0.5}) {
        const Spectrum s = spectrum_batch({k, 1.0}, 16);
        const Allocation e = allocate(s, 16, AllocMethod::exhaustive, table());
        const Allocation g = allocate(s, 16, AllocMethod::greedy, table());
        CHECK(g.codebook_size() <= 16);
        const ProductQuantizer pe = build(s, e, table()), pg = build(s, g, table());
        CHECK(exact_distortion(pg).upper <= exact_distortion(pe).upper * 1.01);
    }
    const Spectrum s = spectrum_batch({0.5, 1.0}, 64);
    for (long budget : {256L, 4096L}) {
        const ProductQuantizer pe = build(s, allocate(s, budget, AllocMethod::exhaustive, table()), table());
        const ProductQuantizer pg = build(s, allocate(s, budget, AllocMethod::greedy, table()), table());
        CHECK(exact_distortion(pe).upper <= exact_distortion(pg).upper);
    }
}

TEST_CASE("allocation errors") {
    const Spectrum s = spectrum_batch({0.5, 1.0}, 3);
    CHECK_THROWS_AS(allocate(s, 0, AllocMethod::exhaustive, table()), DomainError);
    CHECK_THROWS_AS(allocate(s, 16, AllocMethod::exhaustive, table()), DomainError);
    CHECK_NOTHROW(allocate(s, 15, AllocMethod::exhaustive, table()));
    try {
        allocate(s, 1024, AllocMethod::greedy, table());
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("10") != std::string::npos);
    }
}

TEST_CASE("build and exact distortion") {
    const ProcessParams p(0.5, 1.0);
    const Spectrum s = spectrum_batch(p, 100);

    const ProductQuantizer empty = build(s, allocate(s, 1, AllocMethod::exhaustive, table()), table());
    CHECK(exact_distortion(empty).lower == trace(p));
    CHECK(exact_distortion(empty).upper == trace(p));

    for (long budget : {2L, 16L, 256L}) {
        const Allocation a = allocate(s, budget, AllocMethod::exhaustive, table());
        const ProductQuantizer pq = build(s, a, table());
        const DistortionBounds b = exact_distortion(pq);
        double core = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) core += s[j].lambda * table()(a.levels[j]);
        CHECK(pq.distortion_core == doctest::Approx(core).epsilon(1e-15));
        CHECK(b.lower <= b.upper);
        CHECK(b.upper - b.lower <= 1e-3 * b.upper);
        CHECK(b.upper < trace(p));
        // core + tail reproduces trace - Σ_{j<=m} λ_j (1 - d_{n_j})
        double gain = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) gain += s[j].lambda * (1.0 - table()(a.levels[j]));
        CHECK(b.lower <= trace(p) - gain + 1e-15);
        CHECK(trace(p) - gain <= b.upper + 1e-15);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const auto& unit = table().quantizer(a.levels[j]).points;
            for (std::size_t i = 0; i < unit.size(); ++i) {
                CHECK(pq.codepoints[j][i] == doctest::Approx(std::sqrt(s[j].lambda) * unit[i]));
            }
        }
    }
}

TEST_CASE("build rejects malformed allocations") {
    const Spectrum s = spectrum_batch({0.5, 1.0}, 4);
    CHECK_THROWS_AS(build(s, Allocation{{2, 3}, 16}, table()), DomainError);
    CHECK_THROWS_AS(build(s, Allocation{{4, 4}, 15}, table()), DomainError);
    CHECK_THROWS_AS(build(s, Allocation{{2, 2, 2, 2, 2}, 64}, table()), DomainError);
    CHECK_THROWS_AS(build(s, Allocation{{1}, 4}, table()), DomainError);
}

TEST_CASE("upper bound is non-increasing in the budget") {
    for (double k : {0.0, 0.5}) {
        const Spectrum s = spectrum_batch({k, 1.0}, 64);
        double prev = trace(ProcessParams{k, 1.0});
        for (long budget = 2; budget <= 512; ++budget) {
            const double u = exact_distortion(build(s, allocate(s, budget, AllocMethod::exhaustive, table()), table())).upper;
            CHECK(u <= prev + 1e-16);
            prev = u;
        }
    }
}

TEST_CASE("distortion scales with T² when k/T is fixed") {
    const ProcessParams a(0.3, 1.0), b(0.6, 2.0);
    const Spectrum sa = spectrum_batch(a, 64), sb = spectrum_batch(b, 64);
    for (long budget : {4L, 64L, 1000L}) {
        const Allocation la = allocate(sa, budget, AllocMethod::exhaustive, table());
        const Allocation lb = allocate(sb, budget, AllocMethod::exhaustive, table());
        CHECK(la.levels == lb.levels);
        const auto da = exact_distortion(build(sa, la, table()));
        const auto db = exact_distortion(build(sb, lb, table()));
        CHECK(db.upper == doctest::Approx(4.0 * da.upper).epsilon(1e-12));
        CHECK(db.lower == doctest::Approx(4.0 * da.lower).epsilon(1e-12));
    }
}

TEST_CASE("codebook paths") {
    const ProcessParams p(0.5, 1.0);
    const Spectrum s = spectrum_batch(p, 10);
    const ProductQuantizer pq = build(s, allocate(s, 16, AllocMethod::exhaustive, table()), table());
    const auto grid = uniform_grid(1.0, 33);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);
    const auto paths = codebook_paths(pq, grid);
    REQUIRE(static_cast<long>(paths.size()) == pq.allocation.codebook_size());
    for (std::size_t c = 0; c < paths.size(); ++c) {
        CHECK(flat_index(pq, paths[c].index) == c);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double v = 0.0;
            for (std::size_t j = 0; j < pq.codepoints.size(); ++j) {
                v += pq.codepoints[j][paths[c].index[j]] * eigenfunction(s[j], p, grid[g]);
            }
            CHECK(paths[c].values[g] == doctest::Approx(v).epsilon(1e-13).scale(1.0));
        }
    }
    // the zero codebook is one flat path
    const ProductQuantizer empty = build(s, Allocation{{}, 1}, table());
    const auto zero = codebook_paths(empty, grid);
    REQUIRE(zero.size() == 1);
    for (double v : zero[0].values) CHECK(v == 0.0);

    const Spectrum big = spectrum_batch(p, 20);
    const ProductQuantizer wide = build(big, allocate(big, 8192, AllocMethod::exhaustive, table()), table());
    CHECK_THROWS_AS(codebook_paths(wide, grid), DomainError);
    CHECK_THROWS_AS(uniform_grid(1.0, 1), DomainError);
}

TEST_CASE("nearest level tie rule") {
    const std::vector<double> pts{-1.0, 0.0, 1.0};
    CHECK(nearest_level(pts, 0.5) == 1);
    CHECK(nearest_level(pts, -0.5) == 0);
    CHECK(nearest_level(pts, 0.50001) == 2);
    CHECK(nearest_level(pts, -7.0) == 0);
    CHECK(nearest_level(pts, 7.0) == 2);
}

TEST_CASE("nearest codeword against brute force in coefficient and path space") {
    const ProcessParams p(0.5, 1.0);
    const Spectrum s = spectrum_batch(p, 12);
    const ProductQuantizer pq = build(s, allocate(s, 64, AllocMethod::exhaustive, table()), table());
    const auto grid = uniform_grid(1.0, 513);
    const auto paths = codebook_paths(pq, grid);
    const std::size_t m = pq.codepoints.size();
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> coef(m);
        for (std::size_t j = 0; j < m; ++j) coef[j] = std::sqrt(s[j].lambda) * z(rng);
        const auto idx = nearest(pq, coef);
        const std::size_t got = flat_index(pq, idx);

        std::size_t best = 0;
        double best_d = INFINITY;
        for (std::size_t c = 0; c < paths.size(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double diff = coef[j] - pq.codepoints[j][paths[c].index[j]];
                d += diff * diff;
            }
            if (d < best_d) best_d = d, best = c;
        }
        CHECK(got == best);

        // same answer from the L² distance of rendered paths (trapezoid on 512 intervals)
        std::vector<double> x(grid.size(), 0.0);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            for (std::size_t j = 0; j < m; ++j) x[g] += coef[j] * eigenfunction(s[j], p, grid[g]);
        }
        std::size_t best_path = 0;
        double best_l2 = INFINITY;
        for (std::size_t c = 0; c < paths.size(); ++c) {
            double d = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double diff = x[g] - paths[c].values[g];
                d += (g == 0 || g + 1 == grid.size() ? 0.5 : 1.0) * diff * diff;
            }
            if (d < best_l2) best_l2 = d, best_path = c;
        }
        CHECK(got == best_path);
    }
    CHECK_THROWS_AS(nearest(pq, std::vector<double>(m - 1, 0.0)), DomainError);
}

TEST_CASE("stable_sum") {
    CHECK(stable_sum({}) == 0.0);
    CHECK(stable_sum({1e16, 1.0, -1e16}) == 1.0);
    std::vector<double> tiny(1000000, 1e-10);
    tiny.push_back(1.0);
    CHECK(stable_sum(tiny) == doctest::Approx(1.0001).epsilon(1e-15));
}
