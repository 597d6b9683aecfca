#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gspq/error.hpp"
#include "gspq/kernel.hpp"
#include "gspq/parallel.hpp"
#include "gspq/spectrum.hpp"
#include "oracles.hpp"

using namespace gspq;
constexpr double kPi = std::numbers::pi;

TEST_CASE("solve_root: closed form at k = 0") {
    CHECK(solve_root({0.0, 1.0}, 3) == 5.0 * kPi / 2.0);
    for (int ell = 1; ell <= 50; ++ell) CHECK(solve_root({0.0, 2.5}, ell) == bracket_upper(ell));
}

TEST_CASE("solve_root against the high-precision bisection oracle") {
    // frozen oracle values (50-digit bisection)
    CHECK(solve_root({1.0, 1.0}, 1) == doctest::Approx(0.86033358901937976).epsilon(1e-14));
    CHECK(solve_root({0.5, 1.0}, 1) == doctest::Approx(1.0768739863118037).epsilon(1e-14));
    CHECK(solve_root({0.5, 1.0}, 1000) == doctest::Approx(3138.4516981930174).epsilon(1e-15));

    for (double k : {0.01, 0.3, 0.5, 0.99, 2.0, 40.0}) {
        for (int ell : {1, 2, 3, 10, 57, 400, 1000}) {
            const double want = static_cast<double>(oracle::bisection_root(k, 1.0, ell));
            CHECK(solve_root({k, 1.0}, ell) == doctest::Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("solve_root: k = 0.5 root lies strictly below the Wiener root") {
    const double x = solve_root({0.5, 1.0}, 1);
    CHECK(x > 0.0);
    CHECK(x < kPi / 2.0);
}

TEST_CASE("solve_root rejects bad arguments") {
    CHECK_THROWS_AS(solve_root({0.5, 1.0}, 0), DomainError);
    CHECK_THROWS_AS(solve_root({0.5, 1.0}, 1, 0.0), DomainError);
}

TEST_CASE("eigenvalue examples") {
    CHECK(eigenvalue({0.0, 1.0}, 1) == doctest::Approx(4.0 / (kPi * kPi)).epsilon(1e-15));
    CHECK(eigenvalue({0.0, 2.0}, 2) == doctest::Approx(16.0 / (9.0 * kPi * kPi)).epsilon(1e-15));
    const double lam = eigenvalue({0.5, 1.0}, 1);
    CHECK(lam > 4.0 / (kPi * kPi));
    CHECK(lam == doctest::Approx(oracle::bisection_lambda(0.5, 1.0, 1)).epsilon(1e-14));
}

TEST_CASE("eigen pairs satisfy bracket, enclosure and residual invariants") {
    for (double k : {0.0, 0.01, 0.3, 0.7, 0.99, 5.0}) {
        for (double T : {0.5, 1.0, 3.0}) {
            const ProcessParams p(k, T);
            const Spectrum s = spectrum_batch(p, 300);
            for (const auto& e : s.pairs) {
                CHECK(e.x > bracket_lower(e.ell));
                CHECK(e.x <= bracket_upper(e.ell));
                CHECK(e.lambda >= T * T / (bracket_upper(e.ell) * bracket_upper(e.ell)) * (1.0 - 4e-16));
                if (e.ell >= 2) CHECK(e.lambda < T * T / (bracket_lower(e.ell) * bracket_lower(e.ell)));
                CHECK(root_residual(p, e) <= kDefaultRootTol * (1.0 + p.slope() * e.x));
            }
        }
    }
}

TEST_CASE("eigenvalues strictly decrease in ell and increase in k") {
    std::vector<Spectrum> grid;
    for (int i = 0; i < 100; ++i) grid.push_back(spectrum_batch({0.01 * i, 1.0}, 200));
    for (const auto& s : grid) {
        for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].lambda < s[i - 1].lambda);
    }
    for (std::size_t g = 1; g < grid.size(); ++g) {
        for (std::size_t i = 0; i < 200; ++i) CHECK(grid[g][i].lambda > grid[g - 1][i].lambda);
    }
}

TEST_CASE("first ten eigenvalues increase with k") {
    const auto s0 = spectrum_batch({0.0, 1.0}, 10), s3 = spectrum_batch({0.3, 1.0}, 10),
               s5 = spectrum_batch({0.5, 1.0}, 10), s7 = spectrum_batch({0.7, 1.0}, 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(s0[i].lambda < s3[i].lambda);
        CHECK(s3[i].lambda < s5[i].lambda);
        CHECK(s5[i].lambda < s7[i].lambda);
    }
}

TEST_CASE("eigenfunction examples") {
    const ProcessParams w(0.0, 1.0);
    const EigenPair e1 = eigen_pair(w, 1);
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0}) {
        CHECK(eigenfunction(e1, w, t) ==
              doctest::Approx(std::numbers::sqrt2 * std::sin(kPi * t / 2.0)).epsilon(1e-14));
    }
    for (int ell : {1, 4, 9}) CHECK(eigenfunction(eigen_pair(w, ell), w, 0.0) == 0.0);

    const ProcessParams p(0.7, 2.0);
    const EigenPair e = eigen_pair(p, 3);
    CHECK(eigenfunction(e, p, 0.0) == doctest::Approx(e.norm * 0.7 / std::sqrt(e.lambda)));
    CHECK_THROWS_AS(eigenfunction(e, p, 2.5), DomainError);
}

TEST_CASE("closed-form norm agrees with quadrature") {
    for (double k : {0.0, 0.5, 3.0}) {
        const ProcessParams p(k, 1.5);
        for (int ell : {1, 2, 7, 40}) {
            const EigenPair e = eigen_pair(p, ell);
            const double omega = e.x / p.T();
            auto raw = [&](double t) {
                const double v = std::sin(omega * t) + k * omega * std::cos(omega * t);
                return v * v;
            };
            const double integral = oracle::composite_gauss(raw, 0.0, p.T(), 32);
            CHECK(e.norm == doctest::Approx(1.0 / std::sqrt(integral)).epsilon(1e-12));
        }
    }
}

TEST_CASE("orthonormality and Fredholm residual") {
    for (double k : {0.0, 0.5}) {
        const ProcessParams p(k, 1.0);
        const Spectrum s = spectrum_batch(p, 10);
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = 0; j < 10; ++j) {
                auto prod = [&](double t) {
                    return eigenfunction(s[i], p, t) * eigenfunction(s[j], p, t);
                };
                const double ip = oracle::composite_gauss(prod, 0.0, 1.0);
                CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
            }
        }
        for (std::size_t i = 0; i < 10; ++i) {
            double worst = 0.0;
            for (int g = 0; g < 64; ++g) {
                const double t = g / 63.0;
                auto integrand = [&](double u) { return covariance(p, t, u) * eigenfunction(s[i], p, u); };
                const double left = t > 0.0 ? oracle::composite_gauss(integrand, 0.0, t, 4) : 0.0;
                const double right = t < 1.0 ? oracle::composite_gauss(integrand, t, 1.0, 4) : 0.0;
                worst = std::max(worst, std::abs(left + right - s[i].lambda * eigenfunction(s[i], p, t)));
            }
            CHECK(worst <= 1e-6);
        }
    }
}

TEST_CASE("c-sequence") {
    for (double T : {0.3, 1.0, 7.0}) {
        for (const auto& e : c_sequence(ProcessParams{0.0, T}, 500)) CHECK(e.c == 1.0);
    }
    const auto cs = c_sequence(ProcessParams{0.5, 1.0}, 1000);
    CHECK(cs[1].c == doctest::Approx(1.6727134613161788).epsilon(1e-13));
    CHECK(cs[1].c > 1.5);  // the 3/2 bound does not hold at ell = 2
    CHECK(cs[999].c > 1.0);
    CHECK(cs[999].c < 1.01);
    CHECK(cs[999].c == doctest::Approx(oracle::bisection_c(0.5, 1.0, 1000)).epsilon(1e-13));

    // envelope |c_ell - 1| <= C / ell for ell >= 2; C = 2.5 is the value of
    // ell((2ell-1)²/(2ell-2)² - 1) at ell = 2, the provable worst case
    for (int i = 0; i < 100; ++i) {
        const ProcessParams p(0.01 * i, 1.0);
        for (const auto& e : c_sequence(p, 1000)) {
            CHECK(e.c >= 1.0);
            if (e.ell >= 2) {
                const double provable = std::pow((2.0 * e.ell - 1.0) / (2.0 * e.ell - 2.0), 2);
                CHECK(e.c < provable);
                CHECK(e.ell * (e.c - 1.0) <= 2.5);
            }
        }
    }
}

TEST_CASE("c equals the eigenvalue ratio against the Wiener process") {
    const auto s = spectrum_batch({0.3, 2.0}, 50), w = spectrum_batch({0.0, 2.0}, 50);
    const auto cs = c_sequence(s);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(cs[i].c == doctest::Approx(s[i].lambda / w[i].lambda).epsilon(1e-14));
    }
}

TEST_CASE("tail bounds") {
    const TailBounds whole = tail_bounds({0.0, 1.0}, 0);
    CHECK(whole.lower == 0.5);
    CHECK(whole.upper == 0.5);

    // the lower enclosure is the exact Wiener tail
    const TailBounds w = tail_bounds({0.0, 1.0}, 1);
    CHECK(w.lower == doctest::Approx(0.5 - 4.0 / (kPi * kPi)).epsilon(1e-14));

    // against a 10^6-term partial summation
    const ProcessParams p(0.3, 1.0);
    const Spectrum s = spectrum_batch(p, 1000000);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = s.size(); i-- > 0;) (i < 100 ? head : tail) += s[i].lambda;
    const TailBounds t100 = tail_bounds(p, 100);
    const TailBounds far = tail_bounds(p, s.size());
    CHECK(t100.lower <= tail + far.upper);
    CHECK(tail + far.lower <= t100.upper);
    CHECK(t100.lower <= trace(p) - head);
    CHECK(trace(p) - head <= t100.upper);

    double prev = tail_bounds(p, 1).upper;
    for (std::size_t L : {10u, 100u, 1000u, 10000u}) {
        const TailBounds b = tail_bounds(p, L);
        CHECK(b.lower <= b.upper);
        CHECK(b.upper < prev);
        CHECK(b.upper * static_cast<double>(L) <= 1.0 / (kPi * kPi) * 1.01 + 1.0 / (kPi * kPi * L));
        prev = b.upper;
    }
}

TEST_CASE("trace sandwich") {
    for (double k : {0.0, 0.3, 0.5, 0.7, 2.0}) {
        for (double T : {0.5, 1.0, 4.0}) {
            const ProcessParams p(k, T);
            for (std::size_t L : {1u, 10u, 1000u}) {
                const Spectrum s = spectrum_batch(p, L);
                double sum = 0.0;
                for (std::size_t i = L; i-- > 0;) sum += s[i].lambda;
                const TailBounds b = tail_bounds(p, L);
                CHECK(sum + b.lower <= trace(p) * (1.0 + 1e-15));
                CHECK(trace(p) <= (sum + b.upper) * (1.0 + 1e-15));
            }
        }
    }
}

TEST_CASE("unbracketed Newton") {
    const ProcessParams p(0.5, 1.0);
    for (int ell = 1; ell <= 1000; ++ell) {
        const NewtonOutcome o = newton_unbracketed(p, ell);
        CHECK(o.converged);
        CHECK(o.in_bracket);
        CHECK(std::abs(o.x - solve_root(p, ell)) <= 1e-9);
    }
    const NewtonOutcome w = newton_unbracketed({0.0, 1.0}, 1);
    CHECK(w.x == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(w.in_bracket);
    CHECK(newton_unbracketed({0.99, 1.0}, 2).in_bracket);

    // a start to the right of the root throws the iterate out of its interval
    const ProcessParams steep(50.0, 1.0);
    const NewtonOutcome escaped = newton_unbracketed(steep, 3, 1.5);
    CHECK_FALSE(escaped.in_bracket);
}

TEST_CASE("spectrum_batch is schedule independent") {
    const ProcessParams p(0.42, 1.3);
    set_thread_count(1);
    const Spectrum a = spectrum_batch(p, 2000);
    set_thread_count(4);
    const Spectrum b = spectrum_batch(p, 2000);
    set_thread_count(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].lambda == b[i].lambda);
        CHECK(a[i].norm == b[i].norm);
    }
}
