#pragma once

#include <cstddef>
#include <vector>

#include "gspq/kernel.hpp"

namespace gspq {

inline constexpr double kDefaultRootTol = 1e-12;
inline constexpr int kRootIterationBudget = 200;

/// One eigenpair of the covariance operator.
///
/// The root x of cot(x) = (k/T) x lies in ((ell-1)π, (2ell-1)π/2]. It is
/// solved in the reduced variable `phase` = x - (ell-1)π so that residuals
/// stay accurate at large ell; `x` is (ell-1)π + phase rounded once.
struct EigenPair {
    int ell = 0;
    double x = 0.0;
    double phase = 0.0;
    double lambda = 0.0;  ///< T² / x²
    double norm = 0.0;    ///< L²([0,T]) normalisation of sin(t/√λ) + (k/√λ) cos(t/√λ)
};

/// Leading eigenpairs ell = 1..L of one process, in index order.
struct Spectrum {
    ProcessParams params;
    std::vector<EigenPair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    const EigenPair& operator[](std::size_t i) const { return pairs[i]; }
};

struct CSeqEntry {
    int ell = 0;
    double c = 0.0;  ///< λ_ell / λ_ell^(Wiener) = λ_ell ((2ell-1)π/2)² / T²
};

struct TailBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Outcome of undamped Newton from the fixed start (ell-1)π + offset.
struct NewtonOutcome {
    double x = 0.0;
    bool converged = false;
    bool in_bracket = false;
    int iterations = 0;
};

/// (ell-1)π and (2ell-1)π/2, the bracket ends of the ell-th root.
double bracket_lower(int ell) noexcept;
double bracket_upper(int ell) noexcept;

/// Root of cot(x) = (k/T) x in ((ell-1)π, (2ell-1)π/2].
///
/// Safeguarded Newton in the reduced variable with a bisection fallback.
/// k = 0 returns (2ell-1)π/2 without iterating. Throws DomainError for
/// ell < 1 or tol <= 0 and ConvergenceError if the budget runs out.
double solve_root(const ProcessParams& p, int ell, double tol = kDefaultRootTol);

double eigenvalue(const ProcessParams& p, int ell, double tol = kDefaultRootTol);

EigenPair eigen_pair(const ProcessParams& p, int ell, double tol = kDefaultRootTol);

/// Normalised eigenfunction at t ∈ [0, T].
double eigenfunction(const EigenPair& pair, const ProcessParams& p, double t);

/// |cot(x) - (k/T) x| evaluated through the reduced phase.
double root_residual(const ProcessParams& p, const EigenPair& pair) noexcept;

/// Same residual for an arbitrary x, reduced modulo π first.
double root_residual(const ProcessParams& p, double x) noexcept;

/// Eigenpairs 1..count, solved independently (in parallel when allowed) and
/// stored in index order. Solver failures are rethrown naming the index.
Spectrum spectrum_batch(const ProcessParams& p, std::size_t count, double tol = kDefaultRootTol);

std::vector<CSeqEntry> c_sequence(const Spectrum& s);
std::vector<CSeqEntry> c_sequence(const ProcessParams& p, std::size_t count);

/// Enclosure of Σ_{ell > after} λ_ell from T²/((ell-½)π)² <= λ_ell < T²/((ell-1)π)²
/// summed exactly through the trigamma function. after = 0 returns the trace
/// on both sides.
TailBounds tail_bounds(const ProcessParams& p, std::size_t after);

/// Plain Newton on cot(x) - (k/T) x from (ell-1)π + start_offset. No bracket
/// protection: a run that lands in another interval reports in_bracket = false.
NewtonOutcome newton_unbracketed(const ProcessParams& p, int ell, double start_offset = 1e-5,
                                 double tol = kDefaultRootTol, int max_iter = kRootIterationBudget);

}  // namespace gspq
