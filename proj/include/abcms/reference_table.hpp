#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abcms/models.hpp"
#include "abcms/posterior.hpp"

namespace abcms {

// Stored prior draws and their simulated summaries. Row i is generated
// from stream id i of the master seed, so the table is reproducible
// from its metadata and invariant to the degree of parallelism.
struct ReferenceTable {
    int k_theta = 0;
    int k_eta = 0;
    std::vector<double> theta;  // rows() * k_theta, row-major
    std::vector<double> eta;    // rows() * k_eta, row-major

    std::string scenario_id;
    int n = 0;
    std::uint64_t master_seed = 0;

    std::size_t rows() const {
        return k_theta > 0 ? theta.size() / static_cast<std::size_t>(k_theta) : 0;
    }
    std::span<const double> theta_row(std::size_t i) const {
        return {theta.data() + i * static_cast<std::size_t>(k_theta),
                static_cast<std::size_t>(k_theta)};
    }
    std::span<const double> eta_row(std::size_t i) const {
        return {eta.data() + i * static_cast<std::size_t>(k_eta),
                static_cast<std::size_t>(k_eta)};
    }
};

struct DistanceVec {
    std::vector<double> d;
    std::string metric = "euclidean";
};

struct Tolerance {
    double epsilon = 0.0;
    std::optional<double> quantile_level;
};

ReferenceTable generate_table(const Scenario& sc, std::size_t N,
                              std::uint64_t master_seed, int threads = 1);

DistanceVec compute_distances(const ReferenceTable& table, const SummaryVec& eta_obs);

// Type-1 (order-statistic) quantile: epsilon = ceil(q*N)-th smallest
// distance, so exactly ceil(q*N) rows are accepted when distances are
// distinct.
Tolerance quantile_tolerance(const DistanceVec& d, double q);

// Inclusive threshold d <= epsilon. Attaches kernel weights
// w_i = 1 - (d_i/eps)^2; uniform weights when eps = 0 (exact matches).
PosteriorDraws accept(const ReferenceTable& table, const DistanceVec& d,
                      const Tolerance& tol);

} // namespace abcms
