#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace abcms {

enum class MethodTag { AR, Reg, RegN, NN, RegC, RegNC, NNC };

std::string method_name(MethodTag tag);
MethodTag method_from_name(const std::string& name);

// Summaries of accept/reject posteriors are conventionally unweighted;
// all adjusted posteriors use their kernel weights.
bool default_weighted(MethodTag tag);

struct PosteriorDraws {
    int k_theta = 0;
    std::vector<double> draws;    // count() * k_theta, row-major
    std::vector<double> weights;  // count()
    double epsilon = 0.0;
    double alpha_hat = 0.0;
    MethodTag tag = MethodTag::AR;
    std::vector<std::size_t> source_rows;  // reference-table provenance

    std::size_t count() const { return weights.size(); }
    double draw(std::size_t i, int component) const {
        return draws[i * static_cast<std::size_t>(k_theta) +
                     static_cast<std::size_t>(component)];
    }
    std::vector<double> component(int c) const;
    void validate() const;
};

enum class IntervalKind { equal_tailed, hpd };

struct IntervalEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    IntervalKind kind = IntervalKind::equal_tailed;

    bool contains(double x) const { return lower <= x && x <= upper; }
    double length() const { return upper - lower; }
};

// Weighted quantile on the piecewise-linear inverse CDF with knots at
// positions C_{i-1} / (W - w_(M)) over the sorted values; reduces to the
// 1+(M-1)p order-statistic interpolation rule under equal weights.
double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double p);

double posterior_moment(const PosteriorDraws& p, int component, int power,
                        bool weighted = true);
double posterior_mean(const PosteriorDraws& p, int component, bool weighted = true);
double posterior_std(const PosteriorDraws& p, int component, bool weighted = true);

IntervalEstimate credible_interval(const PosteriorDraws& p, int component,
                                   double level, IntervalKind kind,
                                   bool weighted = true);

// (skewness, excess kurtosis) of the weighted empirical distribution.
std::pair<double, double> shape_stats(const PosteriorDraws& p, int component);

double coverage_tally(std::span<const IntervalEstimate> intervals, double target);

} // namespace abcms
