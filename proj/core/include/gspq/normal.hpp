#pragma once

namespace gspq::normal {

/// Standard normal density.
double pdf(double x) noexcept;

/// Φ(x), routed through erfc so both tails keep full relative precision.
double cdf(double x) noexcept;

/// 1 - Φ(x) without cancellation.
double ccdf(double x) noexcept;

/// Φ⁻¹(p) for p in (0, 1) by Wichura's AS 241 (PPND16), relative error
/// about 1e-16. Returns ∓infinity at p = 0 / 1 and NaN outside [0, 1].
double quantile(double p) noexcept;

/// P(lo < Z <= hi), accurate when both ends sit in the same tail.
double interval_probability(double lo, double hi) noexcept;

}  // namespace gspq::normal
