#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gspq/kernel.hpp"
#include "gspq/spectrum.hpp"

namespace gspq {

/// Eigenvalue envelope φ(x) = c x^{-b} (ln x)^{-a}, regularly varying of index -b.
struct RegVarying {
    double c = 1.0;
    double b = 2.0;
    double a = 0.0;
};

/// e_n ~ coefficient (ln n)^{-log_power} (ln ln n)^{-loglog_power}.
struct SharpRate {
    double coefficient = 0.0;
    double log_power = 0.0;
    double loglog_power = 0.0;
};

struct RateFit {
    double coefficient = 0.0;  ///< exp(intercept)
    double exponent = 0.0;     ///< slope of log(distortion) on log(ln n)
    double r2 = 0.0;
};

struct ErrorBounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct CInfEstimate {
    double estimate = 0.0;
    double half_width = 0.0;  ///< max |residual| of the tail fit
    double slope = 0.0;       ///< fitted C in c_ell ≈ c_inf + C / ell
};

/// Coefficient and exponents of the quadratic quantization error for a
/// Gaussian process with eigenvalues ~ φ: C = (c (b/2)^{b-1} b/(b-1))^{1/2},
/// powers (b-1)/2 and a/2. Throws DomainError unless b > 1 and c > 0.
SharpRate sharp_constant(const RegVarying& phi);

/// (√2 T/π, √3 T/π) (ln n)^{-1/2}. Throws DomainError for n < 2.
ErrorBounds theta_bounds(const ProcessParams& p, double n);

/// Same bounds with ln n supplied directly (must be > 0).
ErrorBounds theta_bounds_log(const ProcessParams& p, double log_n);

/// √(2 c_inf) T / π. Throws DomainError for c_inf < 1.
double remark_constant(double c_inf, double T);

/// Least squares of c_ell against 1/ell over the last `window` fraction of
/// the sequence; the intercept estimates the limit. Needs >= 100 entries.
CInfEstimate estimate_c_inf(std::span<const CSeqEntry> cseq, double window = 0.5);

/// Least squares of log(distortion) on log(ln n). Distortion is the squared
/// error, so an error decaying like (ln n)^{-1/2} fits an exponent of -1.
/// Needs >= 4 points with distinct n >= 2.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace gspq
