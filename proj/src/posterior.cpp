#include "abcms/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abcms/errors.hpp"

namespace abcms {

std::string method_name(MethodTag tag) {
    switch (tag) {
        case MethodTag::AR: return "AR";
        case MethodTag::Reg: return "Reg";
        case MethodTag::RegN: return "RegN";
        case MethodTag::NN: return "NN";
        case MethodTag::RegC: return "RegC";
        case MethodTag::RegNC: return "RegNC";
        case MethodTag::NNC: return "NNC";
    }
    return "?";
}

MethodTag method_from_name(const std::string& name) {
    if (name == "AR") return MethodTag::AR;
    if (name == "Reg") return MethodTag::Reg;
    if (name == "RegN") return MethodTag::RegN;
    if (name == "NN") return MethodTag::NN;
    if (name == "RegC") return MethodTag::RegC;
    if (name == "RegNC") return MethodTag::RegNC;
    if (name == "NNC") return MethodTag::NNC;
    throw config_error("unknown method: " + name);
}

bool default_weighted(MethodTag tag) { return tag != MethodTag::AR; }

std::vector<double> PosteriorDraws::component(int c) const {
    std::vector<double> out(count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = draw(i, c);
    return out;
}

void PosteriorDraws::validate() const {
    if (count() == 0) throw empty_posterior_error("posterior has no draws");
    double wsum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw numeric_error("posterior weights must be finite and nonnegative");
        wsum += w;
    }
    if (!(wsum > 0.0)) throw numeric_error("posterior weights sum to zero");
}

namespace {

struct SortedWeighted {
    std::vector<double> x;  // ascending
    std::vector<double> pos;  // CDF knot positions in [0,1]
};

SortedWeighted sort_with_positions(std::span<const double> values,
                                   std::span<const double> weights) {
    const std::size_t m = values.size();
    if (m == 0) throw empty_posterior_error("weighted_quantile: no values");
    if (weights.size() != m)
        throw dimension_mismatch_error("weighted_quantile: weight length mismatch");
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    SortedWeighted sw;
    sw.x.resize(m);
    sw.pos.resize(m);
    double cum = 0.0, total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += weights[idx[i]];
    if (!(total > 0.0)) throw numeric_error("weighted_quantile: zero total weight");
    const double denom = total - weights[idx[m - 1]];
    for (std::size_t i = 0; i < m; ++i) {
        sw.x[i] = values[idx[i]];
        sw.pos[i] = denom > 0.0 ? cum / denom : (i == 0 ? 0.0 : 1.0);
        cum += weights[idx[i]];
    }
    sw.pos[m - 1] = 1.0;
    return sw;
}

double interp_at(const SortedWeighted& sw, double p) {
    if (p <= sw.pos.front()) return sw.x.front();
    if (p >= sw.pos.back()) return sw.x.back();
    auto it = std::upper_bound(sw.pos.begin(), sw.pos.end(), p);
    const std::size_t hi = static_cast<std::size_t>(it - sw.pos.begin());
    const std::size_t lo = hi - 1;
    const double span = sw.pos[hi] - sw.pos[lo];
    if (span <= 0.0) return sw.x[lo];
    const double f = (p - sw.pos[lo]) / span;
    return sw.x[lo] + f * (sw.x[hi] - sw.x[lo]);
}

std::vector<double> weights_or_uniform(const PosteriorDraws& p, bool weighted) {
    if (weighted) return p.weights;
    return std::vector<double>(p.count(), 1.0);
}

} // namespace

double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double p) {
    const auto sw = sort_with_positions(values, weights);
    return interp_at(sw, p);
}

double posterior_moment(const PosteriorDraws& p, int component, int power,
                        bool weighted) {
    p.validate();
    if (component < 0 || component >= p.k_theta)
        throw dimension_mismatch_error("posterior_moment: bad component");
    if (power < 1) throw std::domain_error("posterior_moment: power must be >= 1");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.count(); ++i) {
        const double w = weighted ? p.weights[i] : 1.0;
        num += w * std::pow(p.draw(i, component), power);
        den += w;
    }
    return num / den;
}

double posterior_mean(const PosteriorDraws& p, int component, bool weighted) {
    return posterior_moment(p, component, 1, weighted);
}

double posterior_std(const PosteriorDraws& p, int component, bool weighted) {
    const double mu = posterior_mean(p, component, weighted);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.count(); ++i) {
        const double w = weighted ? p.weights[i] : 1.0;
        const double d = p.draw(i, component) - mu;
        num += w * d * d;
        den += w;
    }
    return std::sqrt(num / den);
}

IntervalEstimate credible_interval(const PosteriorDraws& p, int component,
                                   double level, IntervalKind kind, bool weighted) {
    p.validate();
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("credible_interval: level must be in (0,1)");
    const auto vals = p.component(component);
    const auto w = weights_or_uniform(p, weighted);
    const auto sw = sort_with_positions(vals, w);

    IntervalEstimate est;
    est.level = level;
    est.kind = kind;
    if (kind == IntervalKind::equal_tailed) {
        const double a = (1.0 - level) / 2.0;
        est.lower = interp_at(sw, a);
        est.upper = interp_at(sw, 1.0 - a);
        return est;
    }

    // HPD on the interpolated inverse CDF: minimize q(a+level) - q(a).
    // The length is piecewise linear in a, so the minimum sits at a knot
    // of either endpoint; leftmost window wins ties.
    const std::size_t m = sw.x.size();
    std::vector<double> cand;
    cand.reserve(2 * m + 1);
    cand.push_back(0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (sw.pos[i] <= 1.0 - level) cand.push_back(sw.pos[i]);
        const double a = sw.pos[i] - level;
        if (a > 0.0 && a <= 1.0 - level) cand.push_back(a);
    }
    cand.push_back(1.0 - level);
    std::sort(cand.begin(), cand.end());
    double best_a = 0.0;
    double best_len = std::numeric_limits<double>::infinity();
    for (double a : cand) {
        const double len = interp_at(sw, a + level) - interp_at(sw, a);
        if (len < best_len - 1e-15) {
            best_len = len;
            best_a = a;
        }
    }
    est.lower = interp_at(sw, best_a);
    est.upper = interp_at(sw, best_a + level);
    return est;
}

std::pair<double, double> shape_stats(const PosteriorDraws& p, int component) {
    p.validate();
    if (p.count() < 4)
        throw insufficient_data_error("shape_stats: need at least 4 draws");
    const double mu = posterior_mean(p, component, true);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.count(); ++i) {
        const double w = p.weights[i];
        const double d = p.draw(i, component) - mu;
        m2 += w * d * d;
        m3 += w * d * d * d;
        m4 += w * d * d * d * d;
        den += w;
    }
    m2 /= den;
    m3 /= den;
    m4 /= den;
    if (!(m2 > 0.0))
        throw undefined_shape_error("shape_stats: zero variance");
    return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

double coverage_tally(std::span<const IntervalEstimate> intervals, double target) {
    if (intervals.empty())
        throw insufficient_data_error("coverage_tally: empty interval list");
    std::size_t hit = 0;
    for (const auto& iv : intervals)
        if (iv.contains(target)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(intervals.size());
}

} // namespace abcms
