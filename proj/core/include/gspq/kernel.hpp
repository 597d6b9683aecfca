#pragma once

namespace gspq {

/// Parameters of the Wiener process started from a centred Gaussian point,
/// Z_t = W_{k+t} on [0, T]. k = 0 is the standard Wiener process.
class ProcessParams {
public:
    /// Throws DomainError unless k >= 0 and T > 0 (both finite).
    ProcessParams(double k, double T);

    double k() const noexcept { return k_; }
    double T() const noexcept { return T_; }

    /// Slope k/T of the line in cot(x) = (k/T) x.
    double slope() const noexcept { return k_ / T_; }

    friend bool operator==(const ProcessParams&, const ProcessParams&) = default;

private:
    double k_;
    double T_;
};

/// (k+t) ∧ (k+s). Throws DomainError if t or s lies outside [0, T].
double covariance(const ProcessParams& p, double t, double s);

/// ∫₀ᵀ K(t,t) dt = kT + T²/2, equal to the sum of all eigenvalues.
double trace(const ProcessParams& p) noexcept;

}  // namespace gspq
