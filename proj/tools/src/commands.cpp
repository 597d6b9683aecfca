#include "gspq_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "gspq/error.hpp"
#include "gspq/mc.hpp"
#include "gspq/rate.hpp"
#include "gspq/spectrum.hpp"

#ifndef GSPQ_VERSION
#define GSPQ_VERSION "0.0.0"
#endif

namespace gspq::cli {

namespace {

constexpr const char* kEigenHeader = "k,T,ell,x,lambda,c,residual,in_bracket\n";
constexpr const char* kCseqHeader = "k,T,ell,c\n";
constexpr const char* kDistortionHeader =
    "n,distortion_lower,distortion_upper,mc_mean,mc_stderr,theta_lower,theta_upper\n";

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

std::string alloc_name(AllocMethod m) { return m == AllocMethod::greedy ? "greedy" : "exhaustive"; }

struct Output {
    std::string path;
    std::string bytes;
};

Json manifest(const std::string& command, Json parameters, const Json& seed,
              const std::vector<Output>& outputs, const std::vector<std::string>& notes = {}) {
    Json m;
    m["command"] = command;
    m["parameters"] = std::move(parameters);
    m["seed"] = seed;
    m["version"] = tool_version();
    Json files = Json::array();
    for (const auto& o : outputs) {
        files.push_back({{"path", o.path}, {"sha256", sha256_hex(o.bytes)}, {"bytes", o.bytes.size()}});
    }
    m["outputs"] = std::move(files);
    if (!notes.empty()) m["diagnostics"] = notes;
    return m;
}

void deliver(const std::string& path, const std::string& bytes, std::ostream& out) {
    if (path == "-") {
        out << bytes;
    } else {
        write_file(path, bytes);
    }
}

void deliver_manifest(const std::string& manifest_path, const Json& m) {
    if (!manifest_path.empty()) write_file(manifest_path, to_json_text(m));
}

int table_size_for(long budget) {
    return static_cast<int>(std::clamp<long>(budget, 2, kDefaultTableSize));
}

}  // namespace

std::string tool_version() { return GSPQ_VERSION; }

std::string eigen_csv(const EigenOptions& opts) {
    require(opts.count >= 1, "--count must be >= 1");
    require(opts.method == "bracketed" || opts.method == "paper-newton",
            "--method must be bracketed or paper-newton");
    std::ostringstream csv;
    csv << kEigenHeader;
    for (double k : sorted_unique(opts.k)) {
        const ProcessParams p(k, opts.T);
        auto row = [&](int ell, double x, double residual, bool in_bracket) {
            const double r = bracket_upper(ell) / x;
            csv << format_double(k) << ',' << format_double(opts.T) << ',' << ell << ','
                << format_double(x) << ',' << format_double((opts.T / x) * (opts.T / x)) << ','
                << format_double(r * r) << ',' << format_double(residual) << ','
                << (in_bracket ? "true" : "false") << '\n';
        };
        if (opts.method == "bracketed") {
            Spectrum s = [&] {
                try {
                    return spectrum_batch(p, static_cast<std::size_t>(opts.count), opts.tol);
                } catch (const ConvergenceError& e) {
                    throw ConvergenceError("k=" + format_double(k) + ", " + e.what(), e.lo(), e.hi());
                }
            }();
            for (const auto& e : s.pairs) row(e.ell, e.x, root_residual(p, e), true);
        } else {
            for (int ell = 1; ell <= opts.count; ++ell) {
                const NewtonOutcome o = newton_unbracketed(p, ell, 1e-5, opts.tol);
                row(ell, o.x, root_residual(p, o.x), o.in_bracket);
            }
        }
    }
    return csv.str();
}

std::string cseq_csv(const CseqOptions& opts, std::ostream& diag) {
    require(opts.count >= 1, "--count must be >= 1");
    std::ostringstream csv;
    csv << kCseqHeader;
    for (double k : sorted_unique(opts.k)) {
        const ProcessParams p(k, opts.T);
        const auto cs = c_sequence(p, static_cast<std::size_t>(opts.count));
        for (const auto& e : cs) {
            csv << format_double(k) << ',' << format_double(opts.T) << ',' << e.ell << ','
                << format_double(e.c) << '\n';
        }
        if (cs.size() >= 2) {
            const auto top = std::max_element(cs.begin() + 1, cs.end(),
                                              [](const auto& a, const auto& b) { return a.c < b.c; });
            diag << "k=" << format_double(k) << ": max c_l over l>=2 is " << format_double(top->c)
                 << " at l=" << top->ell << (top->c < 1.5 ? ", below 3/2" : ", NOT below 3/2")
                 << '\n';
        }
    }
    return csv.str();
}

Json quantizer_json(const QuantizerOptions& opts) {
    require(opts.budget >= 1, "--budget must be >= 1");
    require(opts.count >= 1, "--count must be >= 1");
    require(!opts.paths || opts.budget <= static_cast<long>(kRenderCap),
            "budget above render cap " + std::to_string(kRenderCap) + "; pass --no-paths");
    require(!opts.paths || opts.grid >= 2, "--grid must be >= 2");

    const ProcessParams p(opts.k, opts.T);
    const Spectrum s = spectrum_batch(p, static_cast<std::size_t>(opts.count));
    const DistortionTable table(table_size_for(opts.budget));
    const Allocation a = allocate(s, opts.budget, opts.alloc, table);
    const ProductQuantizer pq = build(s, a, table);
    const DistortionBounds d = exact_distortion(pq);

    Json doc;
    doc["params"] = {{"k", opts.k}, {"T", opts.T}};
    doc["budget"] = opts.budget;
    doc["alloc"] = alloc_name(opts.alloc);
    doc["allocation"] = a.levels;
    doc["codebook_size"] = a.codebook_size();
    doc["spectrum_length"] = s.size();
    Json coords = Json::array();
    for (std::size_t j = 0; j < a.size(); ++j) {
        const auto& e = s[j];
        coords.push_back({{"ell", e.ell},
                          {"x", e.x},
                          {"lambda", e.lambda},
                          {"norm", e.norm},
                          {"levels", a.levels[j]},
                          {"unit_distortion", table(a.levels[j])},
                          {"points", pq.codepoints[j]}});
    }
    doc["coordinates"] = std::move(coords);
    doc["distortion"] = {{"lower", d.lower}, {"upper", d.upper}, {"core", pq.distortion_core}};

    if (opts.paths) {
        const auto grid = uniform_grid(opts.T, static_cast<std::size_t>(opts.grid));
        doc["grid"] = grid;
        Json paths = Json::array();
        for (const auto& path : codebook_paths(pq, grid)) {
            paths.push_back({{"index", path.index}, {"values", path.values}});
        }
        doc["paths"] = std::move(paths);
    }
    return doc;
}

std::string distortion_csv(const DistortionOptions& opts) {
    require(!opts.budgets.empty(), "--budgets must list at least one size");
    for (long n : opts.budgets) require(n >= 2, "--budgets entries must be >= 2");
    require(opts.mc_samples >= 1, "--mc-samples must be >= 1");
    require(opts.count >= 1 && static_cast<std::size_t>(opts.count) >= opts.truncation,
            "--count must be >= --truncation");

    const ProcessParams p(opts.k, opts.T);
    const Spectrum s = spectrum_batch(p, static_cast<std::size_t>(opts.count));
    const long largest = *std::max_element(opts.budgets.begin(), opts.budgets.end());
    const DistortionTable table(table_size_for(largest));

    std::ostringstream csv;
    csv << kDistortionHeader;
    for (long n : opts.budgets) {
        const ProductQuantizer pq = build(s, allocate(s, n, opts.alloc, table), table);
        const DistortionBounds d = exact_distortion(pq);
        McConfig cfg;
        cfg.samples = opts.mc_samples;
        cfg.seed = opts.seed;
        cfg.truncation = std::max(opts.truncation, pq.allocation.size());
        const McEstimate mc = estimate_distortion(pq, cfg);
        const ErrorBounds th = theta_bounds(p, static_cast<double>(n));
        csv << n << ',' << format_double(d.lower) << ',' << format_double(d.upper) << ','
            << format_double(mc.mean) << ',' << format_double(mc.std_error) << ','
            << format_double(th.lower * th.lower) << ',' << format_double(th.upper * th.upper)
            << '\n';
    }
    return csv.str();
}

Json rate_report_from_distortion(const CsvTable& table) {
    const std::size_t n_col = table.column("n");
    const std::size_t d_col = table.has_column("distortion_upper") ? table.column("distortion_upper")
                                                                    : table.column("distortion");
    std::vector<std::pair<double, double>> points;
    for (const auto& r : table.rows) points.emplace_back(r[n_col], r[d_col]);
    const RateFit fit = fit_rate(points);

    Json report;
    report["source"] = "distortion";
    report["fit"] = {{"coefficient", fit.coefficient}, {"exponent", fit.exponent}, {"r2", fit.r2}};
    report["error_exponent"] = fit.exponent / 2.0;

    if (table.has_column("theta_lower") && table.has_column("theta_upper")) {
        const std::size_t lo = table.column("theta_lower"), hi = table.column("theta_upper");
        std::vector<std::size_t> order(table.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](auto a, auto b) { return table.rows[a][n_col] < table.rows[b][n_col]; });
        Json rows = Json::array();
        Json enters_at = nullptr;
        for (std::size_t i : order) {
            const auto& r = table.rows[i];
            const bool inside = r[lo] <= r[d_col] && r[d_col] <= r[hi];
            rows.push_back({{"n", r[n_col]}, {"inside", inside}});
            if (!inside) {
                enters_at = nullptr;
            } else if (enters_at.is_null()) {
                enters_at = r[n_col];
            }
        }
        report["sandwich"] = {{"rows", std::move(rows)}, {"enters_at", enters_at}};
    }
    return report;
}

Json rate_report_from_cseq(const CsvTable& table) {
    const std::size_t k_col = table.column("k"), t_col = table.column("T");
    const std::size_t l_col = table.column("ell"), c_col = table.column("c");

    std::vector<std::pair<double, double>> keys;
    std::map<std::pair<double, double>, std::vector<CSeqEntry>> groups;
    for (const auto& r : table.rows) {
        const std::pair key{r[k_col], r[t_col]};
        if (!groups.contains(key)) keys.push_back(key);
        groups[key].push_back({static_cast<int>(r[l_col]), r[c_col]});
    }

    Json report;
    report["source"] = "cseq";
    Json entries = Json::array();
    for (const auto& key : keys) {
        auto& seq = groups[key];
        std::sort(seq.begin(), seq.end(), [](const auto& a, const auto& b) { return a.ell < b.ell; });
        const CInfEstimate est = estimate_c_inf(seq);
        // every c_ell is >= 1, so is the limit; the fit can undershoot by its residual
        const double c_inf = std::max(1.0, est.estimate);
        entries.push_back({{"k", key.first},
                           {"T", key.second},
                           {"count", seq.size()},
                           {"c_inf", est.estimate},
                           {"half_width", est.half_width},
                           {"slope", est.slope},
                           {"remark_coefficient", remark_constant(c_inf, key.second)},
                           {"wiener_coefficient", remark_constant(1.0, key.second)}});
    }
    report["estimates"] = std::move(entries);
    return report;
}

void write_figures(const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec || !fs::is_directory(outdir)) {
        throw std::runtime_error("cannot create output directory '" + outdir + "'");
    }

    EigenOptions fig1;
    fig1.k = {0.0, 0.3, 0.5, 0.7};
    fig1.count = 10;
    CseqOptions fig2;
    fig2.k = {0.3, 0.5, 0.7};
    fig2.count = 1000;

    std::ostringstream diag;
    const std::vector<Output> outputs{{"fig1.csv", eigen_csv(fig1)}, {"fig2.csv", cseq_csv(fig2, diag)}};
    for (const auto& o : outputs) write_file((fs::path(outdir) / o.path).string(), o.bytes);

    std::vector<std::string> notes;
    std::istringstream diag_lines(diag.str());
    for (std::string line; std::getline(diag_lines, line);) notes.push_back(line);
    const Json params = {{"fig1", {{"k", fig1.k}, {"T", fig1.T}, {"count", fig1.count}}},
                         {"fig2", {{"k", fig2.k}, {"T", fig2.T}, {"count", fig2.count}}}};
    write_file((fs::path(outdir) / "manifest.json").string(),
               to_json_text(manifest("figures", params, nullptr, outputs, notes)));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Functional quantization of the Wiener process with Gaussian starting point"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    const std::map<std::string, AllocMethod> alloc_map{{"exhaustive", AllocMethod::exhaustive},
                                                       {"greedy", AllocMethod::greedy}};

    EigenOptions eo;
    std::string eigen_out = "-", eigen_manifest;
    auto* eigen = app.add_subcommand("eigen", "Roots, eigenvalues and c-sequence per (k, ell)");
    eigen->add_option("--k", eo.k, "Comma-separated k values")->delimiter(',')->required();
    eigen->add_option("--T", eo.T, "Horizon")->capture_default_str();
    eigen->add_option("--count", eo.count, "Eigenpairs per k")->capture_default_str();
    eigen->add_option("--method", eo.method, "bracketed | paper-newton")
        ->check(CLI::IsMember({"bracketed", "paper-newton"}))
        ->capture_default_str();
    eigen->add_option("--tol", eo.tol, "Relative root tolerance")->capture_default_str();
    eigen->add_option("--out", eigen_out, "Output CSV ('-' for stdout)")->capture_default_str();
    eigen->add_option("--manifest", eigen_manifest, "Write a run manifest here");

    CseqOptions co;
    std::string cseq_out = "-", cseq_manifest;
    auto* cseq = app.add_subcommand("cseq", "c_ell = lambda_ell / lambda_ell(Wiener)");
    cseq->add_option("--k", co.k, "Comma-separated k values")->delimiter(',')->required();
    cseq->add_option("--T", co.T, "Horizon")->capture_default_str();
    cseq->add_option("--count", co.count, "Entries per k")->capture_default_str();
    cseq->add_option("--out", cseq_out, "Output CSV ('-' for stdout)")->capture_default_str();
    cseq->add_option("--manifest", cseq_manifest, "Write a run manifest here");

    QuantizerOptions qo;
    bool no_paths = false;
    std::string quant_out = "-", quant_manifest;
    auto* quant = app.add_subcommand("quantizer", "Optimal product codebook for a budget");
    quant->add_option("--k", qo.k, "Starting-point variance")->required();
    quant->add_option("--T", qo.T, "Horizon")->capture_default_str();
    quant->add_option("--budget", qo.budget, "Codebook size bound")->required();
    quant->add_option("--grid", qo.grid, "Points of the rendering grid")->capture_default_str();
    quant->add_option("--alloc", qo.alloc, "exhaustive | greedy")
        ->transform(CLI::CheckedTransformer(alloc_map, CLI::ignore_case));
    quant->add_option("--count", qo.count, "Spectrum length")->capture_default_str();
    quant->add_flag("--no-paths", no_paths, "Omit rendered paths");
    quant->add_option("--out", quant_out, "Output JSON ('-' for stdout)")->capture_default_str();
    quant->add_option("--manifest", quant_manifest, "Write a run manifest here");

    DistortionOptions dopt;
    std::string dist_out = "-", dist_manifest;
    auto* dist = app.add_subcommand("distortion", "Distortion brackets, Monte Carlo and bounds");
    dist->add_option("--k", dopt.k, "Starting-point variance")->required();
    dist->add_option("--T", dopt.T, "Horizon")->capture_default_str();
    dist->add_option("--budgets", dopt.budgets, "Comma-separated codebook sizes")
        ->delimiter(',')
        ->required();
    dist->add_option("--mc-samples", dopt.mc_samples, "Monte Carlo samples")->capture_default_str();
    dist->add_option("--seed", dopt.seed, "Monte Carlo seed")->capture_default_str();
    dist->add_option("--truncation", dopt.truncation, "Simulated KL coordinates")
        ->capture_default_str();
    dist->add_option("--alloc", dopt.alloc, "exhaustive | greedy")
        ->transform(CLI::CheckedTransformer(alloc_map, CLI::ignore_case));
    dist->add_option("--count", dopt.count, "Spectrum length")->capture_default_str();
    dist->add_option("--out", dist_out, "Output CSV ('-' for stdout)")->capture_default_str();
    dist->add_option("--manifest", dist_manifest, "Write a run manifest here");

    std::string rate_input, rate_cseq, rate_out = "-", rate_manifest;
    auto* rate = app.add_subcommand("rate", "Fit rates or estimate the c-sequence limit");
    auto* in_opt = rate->add_option("--input", rate_input, "Distortion CSV")->check(CLI::ExistingFile);
    auto* cs_opt = rate->add_option("--cseq", rate_cseq, "c-sequence CSV")->check(CLI::ExistingFile);
    in_opt->excludes(cs_opt);
    rate->add_option("--out", rate_out, "Output JSON ('-' for stdout)")->capture_default_str();
    rate->add_option("--manifest", rate_manifest, "Write a run manifest here");

    std::string fig_dir;
    auto* figures = app.add_subcommand("figures", "Figure datasets plus manifest");
    figures->add_option("--outdir", fig_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*eigen) {
            const std::string csv = eigen_csv(eo);
            deliver(eigen_out, csv, out);
            deliver_manifest(eigen_manifest,
                             manifest("eigen",
                                      {{"k", eo.k}, {"T", eo.T}, {"count", eo.count},
                                       {"method", eo.method}, {"tol", eo.tol}},
                                      nullptr, {{eigen_out, csv}}));
        } else if (*cseq) {
            const std::string csv = cseq_csv(co, err);
            deliver(cseq_out, csv, out);
            deliver_manifest(cseq_manifest,
                             manifest("cseq", {{"k", co.k}, {"T", co.T}, {"count", co.count}},
                                      nullptr, {{cseq_out, csv}}));
        } else if (*quant) {
            qo.paths = !no_paths;
            const std::string text = to_json_text(quantizer_json(qo));
            deliver(quant_out, text, out);
            deliver_manifest(quant_manifest,
                             manifest("quantizer",
                                      {{"k", qo.k}, {"T", qo.T}, {"budget", qo.budget},
                                       {"grid", qo.grid}, {"paths", qo.paths},
                                       {"alloc", alloc_name(qo.alloc)}, {"count", qo.count}},
                                      nullptr, {{quant_out, text}}));
        } else if (*dist) {
            const std::string csv = distortion_csv(dopt);
            deliver(dist_out, csv, out);
            deliver_manifest(dist_manifest,
                             manifest("distortion",
                                      {{"k", dopt.k}, {"T", dopt.T}, {"budgets", dopt.budgets},
                                       {"mc_samples", dopt.mc_samples},
                                       {"truncation", dopt.truncation},
                                       {"alloc", alloc_name(dopt.alloc)}, {"count", dopt.count}},
                                      dopt.seed, {{dist_out, csv}}));
        } else if (*rate) {
            if (rate_input.empty() == rate_cseq.empty()) {
                err << "rate: give exactly one of --input or --cseq\n" << rate->help();
                return kExitUsage;
            }
            const bool from_cseq = !rate_cseq.empty();
            std::ifstream f(from_cseq ? rate_cseq : rate_input);
            const CsvTable table = read_csv(f);
            const std::string text = to_json_text(from_cseq ? rate_report_from_cseq(table)
                                                            : rate_report_from_distortion(table));
            deliver(rate_out, text, out);
            deliver_manifest(rate_manifest,
                             manifest("rate",
                                      {{from_cseq ? "cseq" : "input",
                                        from_cseq ? rate_cseq : rate_input}},
                                      nullptr, {{rate_out, text}}));
        } else if (*figures) {
            write_figures(fig_dir);
        }
    } catch (const ConvergenceError& e) {
        err << "numeric failure: " << e.what() << " (bracket [" << format_double(e.lo()) << ", "
            << format_double(e.hi()) << "])\n";
        return kExitNumeric;
    } catch (const CsvError& e) {
        err << "malformed CSV, " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace gspq::cli
