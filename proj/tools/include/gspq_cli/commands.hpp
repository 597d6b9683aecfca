#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "gspq/funcquant.hpp"
#include "gspq_cli/io.hpp"

namespace gspq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

std::string tool_version();

struct EigenOptions {
    std::vector<double> k{0.0};
    double T = 1.0;
    int count = 1000;
    std::string method = "bracketed";  // or "paper-newton"
    double tol = 1e-12;
};

/// k,T,ell,x,lambda,c,residual,in_bracket rows sorted by (k, ell).
std::string eigen_csv(const EigenOptions& opts);

struct CseqOptions {
    std::vector<double> k{0.5};
    double T = 1.0;
    int count = 1000;
};

/// k,T,ell,c rows. One diagnostic line per k goes to `diag`, comparing the
/// largest c_ell for ell >= 2 with 3/2.
std::string cseq_csv(const CseqOptions& opts, std::ostream& diag);

struct QuantizerOptions {
    double k = 0.5;
    double T = 1.0;
    long budget = 16;
    int grid = 129;
    bool paths = true;
    AllocMethod alloc = AllocMethod::exhaustive;
    int count = 1000;
};

/// Codebook document: params, allocation, per-coordinate eigen data and
/// points, distortion brackets and (optionally) rendered paths.
Json quantizer_json(const QuantizerOptions& opts);

struct DistortionOptions {
    double k = 0.5;
    double T = 1.0;
    std::vector<long> budgets{4, 16, 64, 256};
    std::size_t mc_samples = 10000;
    std::uint64_t seed = 1;
    std::size_t truncation = 32;
    AllocMethod alloc = AllocMethod::exhaustive;
    int count = 1000;
};

/// n,distortion_lower,distortion_upper,mc_mean,mc_stderr,theta_lower,theta_upper.
std::string distortion_csv(const DistortionOptions& opts);

/// Rate fit report for a distortion table (needs n and distortion_upper or
/// distortion columns).
Json rate_report_from_distortion(const CsvTable& table);

/// Per-(k, T) limit estimates for a c-sequence table (k,T,ell,c).
Json rate_report_from_cseq(const CsvTable& table);

/// fig1.csv, fig2.csv and manifest.json into `outdir` (created if missing).
void write_figures(const std::string& outdir);

/// Full command line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gspq::cli
