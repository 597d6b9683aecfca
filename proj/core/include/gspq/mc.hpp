#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gspq/funcquant.hpp"
#include "gspq/spectrum.hpp"

namespace gspq {

struct McConfig {
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::size_t truncation = 32;  ///< simulated KL coordinates m'
    std::size_t grid = 512;       ///< Simpson intervals for path_space_check (even)
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    double tail_half_width = 0.0;  ///< half-width of the analytic tail beyond m'
};

/// Uniform variate in (0, 1) keyed by (seed, sample, coordinate). Stateless,
/// so any subset of draws can be produced in any order.
double counter_uniform(std::uint64_t seed, std::uint64_t sample, std::uint64_t coordinate) noexcept;

/// Standard normal ξ_1..ξ_truncation for one sample; X = Σ √λ_j ξ_j φ_j.
std::vector<double> sample_coefficients(const Spectrum& spectrum, std::size_t truncation,
                                        std::uint64_t seed, std::uint64_t sample);

/// Monte Carlo estimate of E min_a ‖X - a‖². Each sample is scored in
/// coefficient space over the first m' coordinates; Σ_{j>m'} λ_j is added
/// from the midpoint of its enclosure. Per-sample scores are reduced by
/// pairwise summation, so the result does not depend on thread count.
McEstimate estimate_distortion(const ProductQuantizer& pq, const McConfig& cfg);

/// Largest gap, over cfg.samples paths truncated at m' coordinates, between
/// the coefficient-space minimum distance² and the minimum over rendered
/// codewords of the Simpson-rule ‖X - a‖² on a uniform grid.
double path_space_check(const ProductQuantizer& pq, const McConfig& cfg);

}  // namespace gspq
