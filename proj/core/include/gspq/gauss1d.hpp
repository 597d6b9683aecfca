#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gspq {

inline constexpr int kDefaultTableSize = 1024;

/// Quadratic n-level quantizer of the standard normal.
struct ScalarQuantizer {
    int n = 0;
    std::vector<double> points;      ///< strictly increasing, symmetric about 0
    std::vector<double> boundaries;  ///< n-1 midpoints of adjacent points
    double distortion = 0.0;         ///< E min_i (Z - a_i)²
    int iterations = 0;
};

struct QuantizerOptions {
    double tol = 1e-12;  ///< max-norm change of the points at convergence
    int max_iter = 500;
};

/// Stationary (hence optimal, the normal being log-concave) n-level quantizer.
/// Throws DomainError for n < 1 and ConvergenceError, carrying the last step
/// size, when max_iter is exhausted.
ScalarQuantizer optimize(int n, const QuantizerOptions& opts = {});

/// Conditional means E[Z | cell_i] of the nearest-neighbour cells of `points`.
std::vector<double> centroids(std::span<const double> points);

/// Cell probabilities P(Z ∈ cell_i).
std::vector<double> cell_probabilities(std::span<const double> points);

/// E min_i (Z - a_i)² for arbitrary increasing points, evaluated cell by cell.
double distortion(std::span<const double> points);

/// Optimal quantizers for n = 1..max_n, built once and then read-only.
class DistortionTable {
public:
    explicit DistortionTable(int max_n = kDefaultTableSize);

    int max_n() const noexcept { return static_cast<int>(quantizers_.size()); }

    /// d_n; throws DomainError outside 1..max_n.
    double operator()(int n) const;
    const ScalarQuantizer& quantizer(int n) const;

    /// (n, d_n) rows in increasing n.
    std::vector<std::pair<int, double>> rows() const;

private:
    std::vector<ScalarQuantizer> quantizers_;
};

/// lim n^{r/d} e_{n,r}^r for the standard normal. Only r = 2, d = 1 is
/// supported: (1/12)(∫ f^{1/3})³ = π√3/2. Other pairs throw DomainError.
double zador_limit(int r, int d);

}  // namespace gspq
