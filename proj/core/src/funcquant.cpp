#include "gspq/funcquant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gspq/error.hpp"
#include "gspq/parallel.hpp"

namespace gspq {

namespace {

int floor_log2(long n) {
    int r = 0;
    while (n >= 2) {
        n /= 2;
        ++r;
    }
    return r;
}

struct Candidate {
    std::vector<int> levels;
    double gain = 0.0;  // Σ λ_j (d_{n_j} - 1), lower is better
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return std::lexicographical_compare(a.levels.begin(), a.levels.end(), b.levels.begin(),
                                        b.levels.end());
}

class ExhaustiveSearch {
public:
    ExhaustiveSearch(const Spectrum& s, long budget, const DistortionTable& table, int depth)
        : spectrum_(s), budget_(budget), table_(table), depth_(depth) {}

    Candidate best_with_first(int first) const {
        Candidate current{{first}, gain(0, first)};
        Candidate best = current;
        descend(current, first, first, best);
        return best;
    }

private:
    double gain(std::size_t j, int n) const { return spectrum_[j].lambda * (table_(n) - 1.0); }

    void descend(Candidate& current, int prev, long product, Candidate& best) const {
        const std::size_t j = current.levels.size();
        if (static_cast<int>(j) >= depth_) return;
        const long room = budget_ / product;
        const int top = static_cast<int>(std::min<long>({prev, room}));
        for (int n = 2; n <= top; ++n) {
            current.levels.push_back(n);
            const double g = gain(j, n);
            current.gain += g;
            if (better(current, best)) best = current;
            descend(current, n, product * n, best);
            current.gain -= g;
            current.levels.pop_back();
        }
    }

    const Spectrum& spectrum_;
    long budget_;
    const DistortionTable& table_;
    int depth_;
};

Allocation greedy(const Spectrum& s, long budget, const DistortionTable& table, int depth) {
    std::vector<int> levels;
    long product = 1;
    for (;;) {
        int best_j = -1;
        double best_drop = 0.0;
        const int open = std::min<int>(static_cast<int>(levels.size()) + 1, depth);
        for (int j = 0; j < open; ++j) {
            const int cur = j < static_cast<int>(levels.size()) ? levels[j] : 1;
            const int next = cur + 1;
            if (next > table.max_n()) continue;
            if (j > 0 && next > levels[j - 1]) continue;
            if (product / cur * next > budget) continue;
            const double drop = s[j].lambda * (table(cur) - table(next));
            if (best_j < 0 || drop > best_drop) {
                best_j = j;
                best_drop = drop;
            }
        }
        if (best_j < 0) break;
        if (best_j == static_cast<int>(levels.size())) {
            levels.push_back(2);
            product *= 2;
        } else {
            product = product / levels[best_j] * (levels[best_j] + 1);
            ++levels[best_j];
        }
    }
    return {levels, budget};
}

}  // namespace

long Allocation::codebook_size() const noexcept {
    long p = 1;
    for (int n : levels) p *= n;
    return p;
}

double stable_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

Allocation allocate(const Spectrum& spectrum, long budget, AllocMethod method,
                    const DistortionTable& table) {
    if (budget < 1) throw DomainError("allocation budget must be >= 1");
    const int depth = floor_log2(budget);
    if (static_cast<int>(spectrum.size()) < std::max(depth, 1)) {
        throw DomainError("spectrum too short for budget " + std::to_string(budget) +
                          ": need at least " + std::to_string(std::max(depth, 1)) + " pairs");
    }
    if (budget == 1) return {{}, 1};
    if (method == AllocMethod::greedy) return greedy(spectrum, budget, table, depth);

    const ExhaustiveSearch search(spectrum, budget, table, depth);
    const int top = static_cast<int>(std::min<long>(budget, table.max_n()));
    std::vector<Candidate> per_first(static_cast<std::size_t>(top - 1));
    parallel_for(per_first.size(), [&](std::size_t i) {
        per_first[i] = search.best_with_first(static_cast<int>(i) + 2);
    });

    Candidate best;  // empty allocation, gain 0
    for (const auto& c : per_first) {
        if (better(c, best)) best = c;
    }
    return {best.levels, budget};
}

ProductQuantizer build(const Spectrum& spectrum, const Allocation& allocation,
                       const DistortionTable& table) {
    const std::size_t m = allocation.size();
    if (m > spectrum.size()) throw DomainError("allocation longer than the spectrum");
    if (allocation.codebook_size() > allocation.budget) {
        throw DomainError("allocation exceeds its budget");
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (allocation.levels[j] < 2 || (j > 0 && allocation.levels[j] > allocation.levels[j - 1])) {
            throw DomainError("allocation levels must be non-increasing and >= 2");
        }
    }

    ProductQuantizer pq{spectrum, allocation, {}, 0.0, {}};
    std::vector<double> core_terms;
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = spectrum[j].lambda;
        const ScalarQuantizer& q = table.quantizer(allocation.levels[j]);
        std::vector<double> scaled(q.points.size());
        const double sd = std::sqrt(lambda);
        std::transform(q.points.begin(), q.points.end(), scaled.begin(),
                       [sd](double a) { return sd * a; });
        pq.codepoints.push_back(std::move(scaled));
        core_terms.push_back(lambda * q.distortion);
    }
    pq.distortion_core = stable_sum(std::move(core_terms));

    if (m == 0) {
        pq.tail = tail_bounds(spectrum.params, 0);
    } else {
        std::vector<double> rest;
        for (std::size_t j = m; j < spectrum.size(); ++j) rest.push_back(spectrum[j].lambda);
        const double partial = stable_sum(std::move(rest));
        const TailBounds far = tail_bounds(spectrum.params, spectrum.size());
        pq.tail = {partial + far.lower, partial + far.upper};
    }
    return pq;
}

DistortionBounds exact_distortion(const ProductQuantizer& pq) noexcept {
    return {pq.distortion_core + pq.tail.lower, pq.distortion_core + pq.tail.upper};
}

std::size_t flat_index(const ProductQuantizer& pq, std::span<const int> index) {
    if (index.size() != pq.codepoints.size()) throw DomainError("index tuple has wrong length");
    std::size_t flat = 0;
    for (std::size_t j = 0; j < index.size(); ++j) {
        flat = flat * pq.codepoints[j].size() + static_cast<std::size_t>(index[j]);
    }
    return flat;
}

std::vector<QuantizedPath> codebook_paths(const ProductQuantizer& pq, std::span<const double> grid) {
    const auto count = static_cast<std::size_t>(pq.allocation.codebook_size());
    if (count > kRenderCap) {
        throw DomainError("codebook of " + std::to_string(count) + " paths exceeds render cap " +
                          std::to_string(kRenderCap));
    }
    const std::size_t m = pq.codepoints.size();
    std::vector<std::vector<double>> basis(m, std::vector<double>(grid.size()));
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            basis[j][g] = eigenfunction(pq.spectrum[j], pq.spectrum.params, grid[g]);
        }
    }

    std::vector<QuantizedPath> out;
    out.reserve(count);
    std::vector<int> index(m, 0);
    for (std::size_t c = 0; c < count; ++c) {
        QuantizedPath path{index, {grid.begin(), grid.end()}, std::vector<double>(grid.size(), 0.0)};
        for (std::size_t j = 0; j < m; ++j) {
            const double coef = pq.codepoints[j][static_cast<std::size_t>(index[j])];
            for (std::size_t g = 0; g < grid.size(); ++g) path.values[g] += coef * basis[j][g];
        }
        out.push_back(std::move(path));
        for (std::size_t j = m; j-- > 0;) {  // odometer, last coordinate fastest
            if (++index[j] < static_cast<int>(pq.codepoints[j].size())) break;
            index[j] = 0;
        }
    }
    return out;
}

int nearest_level(std::span<const double> points, double v) noexcept {
    const auto it = std::lower_bound(points.begin(), points.end(), v);
    if (it == points.begin()) return 0;
    const auto hi = static_cast<int>(it - points.begin());
    if (it == points.end()) return hi - 1;
    return (v - points[hi - 1] <= points[hi] - v) ? hi - 1 : hi;
}

std::vector<int> nearest(const ProductQuantizer& pq, std::span<const double> coefficients) {
    const std::size_t m = pq.codepoints.size();
    if (coefficients.size() < m) {
        throw DomainError("nearest: need at least " + std::to_string(m) + " coefficients");
    }
    std::vector<int> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = nearest_level(pq.codepoints[j], coefficients[j]);
    return out;
}

std::vector<double> uniform_grid(double T, std::size_t n) {
    if (n < 2) throw DomainError("grid needs at least 2 points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = T;
    return g;
}

}  // namespace gspq
