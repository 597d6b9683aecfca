#include "gspq/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "gspq/error.hpp"
#include "gspq/normal.hpp"
#include "gspq/parallel.hpp"

namespace gspq {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

void validate(const ProductQuantizer& pq, const McConfig& cfg) {
    if (cfg.samples < 1) throw DomainError("mc: samples must be >= 1");
    if (cfg.truncation < pq.allocation.size()) {
        throw DomainError("mc: truncation " + std::to_string(cfg.truncation) +
                          " below allocation length " + std::to_string(pq.allocation.size()));
    }
    if (cfg.truncation > pq.spectrum.size()) {
        throw DomainError("mc: truncation exceeds spectrum length " +
                          std::to_string(pq.spectrum.size()));
    }
}

// Squared coefficient-space distance to the nearest codeword over the first
// `truncation` coordinates.
double sample_score(const ProductQuantizer& pq, std::span<const double> xi) {
    double s = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double coef = std::sqrt(pq.spectrum[j].lambda) * xi[j];
        double diff = coef;
        if (j < pq.codepoints.size()) {
            diff -= pq.codepoints[j][static_cast<std::size_t>(nearest_level(pq.codepoints[j], coef))];
        }
        s += diff * diff;
    }
    return s;
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t coordinate) noexcept {
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ sample);
    const std::uint64_t bits = splitmix64(key ^ splitmix64(coordinate + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_coefficients(const Spectrum& spectrum, std::size_t truncation,
                                        std::uint64_t seed, std::uint64_t sample) {
    if (truncation > spectrum.size()) throw DomainError("truncation exceeds spectrum length");
    std::vector<double> xi(truncation);
    for (std::size_t j = 0; j < truncation; ++j) {
        xi[j] = normal::quantile(counter_uniform(seed, sample, j));
    }
    return xi;
}

McEstimate estimate_distortion(const ProductQuantizer& pq, const McConfig& cfg) {
    validate(pq, cfg);
    std::vector<double> scores(cfg.samples);
    parallel_for(cfg.samples, [&](std::size_t i) {
        scores[i] = sample_score(pq, sample_coefficients(pq.spectrum, cfg.truncation, cfg.seed, i));
    });

    const auto n = static_cast<double>(cfg.samples);
    const double mean = pairwise_sum(scores) / n;
    for (double& s : scores) s = (s - mean) * (s - mean);
    const double var = cfg.samples > 1 ? pairwise_sum(scores) / (n - 1.0) : 0.0;

    std::vector<double> rest;
    for (std::size_t j = cfg.truncation; j < pq.spectrum.size(); ++j) {
        rest.push_back(pq.spectrum[j].lambda);
    }
    const double partial = stable_sum(std::move(rest));
    const TailBounds far = tail_bounds(pq.spectrum.params, pq.spectrum.size());

    McEstimate est;
    est.mean = mean + partial + 0.5 * (far.lower + far.upper);
    est.std_error = std::sqrt(var / n);
    est.samples = cfg.samples;
    est.tail_half_width = 0.5 * (far.upper - far.lower);
    return est;
}

double path_space_check(const ProductQuantizer& pq, const McConfig& cfg) {
    validate(pq, cfg);
    if (cfg.grid < 64 || cfg.grid % 2 != 0) {
        throw DomainError("path_space_check: grid must be an even count >= 64");
    }
    const double T = pq.spectrum.params.T();
    const std::vector<double> grid = uniform_grid(T, cfg.grid + 1);
    const double h = T / static_cast<double>(cfg.grid);
    std::vector<double> weights(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double w = (g == 0 || g + 1 == grid.size()) ? 1.0 : (g % 2 == 1 ? 4.0 : 2.0);
        weights[g] = w * h / 3.0;
    }

    const std::vector<QuantizedPath> codebook = codebook_paths(pq, grid);
    std::vector<std::vector<double>> basis(cfg.truncation, std::vector<double>(grid.size()));
    for (std::size_t j = 0; j < cfg.truncation; ++j) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            basis[j][g] = eigenfunction(pq.spectrum[j], pq.spectrum.params, grid[g]);
        }
    }

    std::vector<double> gaps(cfg.samples);
    parallel_for(cfg.samples, [&](std::size_t i) {
        const auto xi = sample_coefficients(pq.spectrum, cfg.truncation, cfg.seed, i);
        std::vector<double> path(grid.size(), 0.0);
        for (std::size_t j = 0; j < cfg.truncation; ++j) {
            const double coef = std::sqrt(pq.spectrum[j].lambda) * xi[j];
            for (std::size_t g = 0; g < grid.size(); ++g) path[g] += coef * basis[j][g];
        }
        double best = std::numeric_limits<double>::infinity();
        for (const auto& word : codebook) {
            double d = 0.0;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double diff = path[g] - word.values[g];
                d += weights[g] * diff * diff;
            }
            best = std::min(best, d);
        }
        gaps[i] = std::abs(best - sample_score(pq, xi));
    });
    return *std::max_element(gaps.begin(), gaps.end());
}

}  // namespace gspq
