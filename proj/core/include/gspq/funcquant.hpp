#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gspq/gauss1d.hpp"
#include "gspq/spectrum.hpp"

namespace gspq {

inline constexpr std::size_t kRenderCap = 4096;

/// Levels per KL coordinate, non-increasing, each >= 2. An empty allocation
/// is the one-codeword quantizer (the zero path).
struct Allocation {
    std::vector<int> levels;
    long budget = 1;

    std::size_t size() const noexcept { return levels.size(); }
    long codebook_size() const noexcept;
};

enum class AllocMethod { exhaustive, greedy };

struct DistortionBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Cartesian product of scaled scalar quantizers over the leading KL
/// coordinates. Codeword (i_1, ..., i_m) is the path Σ_j codepoints[j][i_j] φ_j.
struct ProductQuantizer {
    Spectrum spectrum;
    Allocation allocation;
    std::vector<std::vector<double>> codepoints;  ///< √λ_j times the optimal N(0,1) points
    double distortion_core = 0.0;                 ///< Σ_{j<=m} λ_j d_{n_j}
    TailBounds tail;                              ///< encloses Σ_{j>m} λ_j
};

struct QuantizedPath {
    std::vector<int> index;  ///< level index per coordinate
    std::vector<double> grid;
    std::vector<double> values;
};

/// Level vector minimising Σ_{j<=m} λ_j d_{n_j} + (upper bound of Σ_{j>m} λ_j)
/// under Π n_j <= budget. Exhaustive search walks every non-increasing vector
/// (ties go to the lexicographically smaller one); greedy raises one level by
/// one at a time, taking the largest distortion decrease. Levels never exceed
/// table.max_n().
///
/// Throws DomainError for budget < 1 and when the spectrum holds fewer than
/// floor(log2 budget) pairs (the message carries the required length).
Allocation allocate(const Spectrum& spectrum, long budget, AllocMethod method,
                    const DistortionTable& table);

ProductQuantizer build(const Spectrum& spectrum, const Allocation& allocation,
                       const DistortionTable& table);

/// Interval holding E min_a ‖X - a‖²: core plus the tail enclosure.
DistortionBounds exact_distortion(const ProductQuantizer& pq) noexcept;

/// All codewords rendered on `grid` (points in [0, T]), in row-major order
/// of the level indices. Throws DomainError above kRenderCap codewords.
std::vector<QuantizedPath> codebook_paths(const ProductQuantizer& pq, std::span<const double> grid);

/// Nearest codeword for a path with KL coordinates ⟨X, φ_j⟩ = coefficients[j].
/// Decided coordinate by coordinate; equidistant candidates resolve to the
/// lower level index. Throws DomainError if fewer than m coefficients are given.
std::vector<int> nearest(const ProductQuantizer& pq, std::span<const double> coefficients);

/// Index of the point closest to v in an increasing list; ties go low.
int nearest_level(std::span<const double> points, double v) noexcept;

/// Row-major position of a level-index tuple, matching codebook_paths order.
std::size_t flat_index(const ProductQuantizer& pq, std::span<const int> index);

/// n equally spaced points covering [0, T] inclusive (n >= 2).
std::vector<double> uniform_grid(double T, std::size_t n);

/// Σ values with Neumaier compensation, added smallest magnitude first.
double stable_sum(std::vector<double> values);

}  // namespace gspq
