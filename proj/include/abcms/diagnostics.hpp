#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abcms/models.hpp"
#include "abcms/posterior.hpp"
#include "abcms/reference_table.hpp"

namespace abcms {

// Acceptance fraction against tolerance, with a linearity reference in
// eps^k_theta anchored at the endpoint pairs. Curvature flags
// incompatibility between observed and simulated summaries.
struct AcceptCurve {
    std::vector<double> eps;
    std::vector<double> alpha_hat;
    std::vector<double> alpha_ref;
    int k_theta = 1;
    double score = 0.0;  // mean |alpha_hat - alpha_ref| / q_hi
};

AcceptCurve accept_curve(const DistanceVec& d, int J, double q_lo, double q_hi,
                         int k_theta);

// Re-runs the curve with selected table rows treated as pseudo-observed
// data, distances taken against the remaining rows.
std::vector<AcceptCurve> accept_curve_benchmark(const ReferenceTable& table,
                                                std::span<const std::size_t> rows,
                                                int J, double q_lo, double q_hi,
                                                int k_theta);

enum class HKind { identity, square_cube, custom };

struct HSpec {
    HKind kind = HKind::square_cube;
    std::vector<int> powers;  // used when kind == custom

    static HSpec from_name(const std::string& name);
    std::string name() const;
    // h(theta) stacked over all components of theta
    std::vector<double> eval(std::span<const double> theta) const;
};

// T = sqrt(n) || E_ar[h] - E_reg[h] ||. The AR expectation follows the
// accept/reject convention (unweighted); the adjusted side uses its
// kernel weights. force_unweighted drops weights on both sides.
double reg_discrepancy_statistic(const PosteriorDraws& p_ar,
                                 const PosteriorDraws& p_reg, const HSpec& h, int n,
                                 bool force_unweighted = false);

struct CutoffConfig {
    int B = 100;
    double level = 0.95;
    std::size_t N = 25000;
    double q = 0.01;
    int threads = 1;
};

// Simulates B observed datasets from the assumed model at theta_cal,
// runs the accept/reject + linear-adjustment pipeline on each with a
// fresh reference table, and returns the level-quantile of the
// resulting statistics.
double calibrate_cutoff(const Scenario& sc, const ThetaVec& theta_cal,
                        const CutoffConfig& cfg, const HSpec& h,
                        std::uint64_t master_seed,
                        std::vector<double>* statistics = nullptr);

struct DiscrepancyReport {
    double T = 0.0;
    double t_n = 0.0;
    bool flagged = false;
    std::string h_name;
    int B = 0;
    ThetaVec theta_cal;
};

inline bool detect(double T, double t_n) { return T > t_n; }

} // namespace abcms
