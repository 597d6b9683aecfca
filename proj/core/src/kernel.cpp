#include "gspq/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gspq/error.hpp"

namespace gspq {

ProcessParams::ProcessParams(double k, double T) : k_(k), T_(T) {
    if (!std::isfinite(k) || k < 0.0) {
        throw DomainError("k must be finite and >= 0, got " + std::to_string(k));
    }
    if (!std::isfinite(T) || T <= 0.0) {
        throw DomainError("T must be finite and > 0, got " + std::to_string(T));
    }
}

double covariance(const ProcessParams& p, double t, double s) {
    auto inside = [&](double v) { return std::isfinite(v) && v >= 0.0 && v <= p.T(); };
    if (!inside(t) || !inside(s)) {
        throw DomainError("covariance: time arguments must lie in [0, T]");
    }
    return p.k() + std::min(t, s);
}

double trace(const ProcessParams& p) noexcept {
    return p.k() * p.T() + 0.5 * p.T() * p.T();
}

}  // namespace gspq
