#include "abcms/reference_table.hpp"

#include <algorithm>
#include <cmath>

#include "abcms/errors.hpp"
#include "abcms/parallel.hpp"

namespace abcms {

ReferenceTable generate_table(const Scenario& sc, std::size_t N,
                              std::uint64_t master_seed, int threads) {
    sc.validate();
    if (N < 1) throw config_error("generate_table: N must be >= 1");
    ReferenceTable t;
    t.k_theta = sc.k_theta();
    t.k_eta = sc.k_eta();
    t.scenario_id = sc.id();
    t.n = sc.n;
    t.master_seed = master_seed;
    t.theta.resize(N * static_cast<std::size_t>(t.k_theta));
    t.eta.resize(N * static_cast<std::size_t>(t.k_eta));

    parallel_for(N, threads, [&](std::size_t i) {
        RngStream rng = RngStream::from(master_seed, i);
        const ThetaVec th = prior_sample(sc, rng);
        const SummaryVec s = table_summary(sc, th, rng);
        std::copy(th.begin(), th.end(),
                  t.theta.begin() + static_cast<std::ptrdiff_t>(
                                        i * static_cast<std::size_t>(t.k_theta)));
        std::copy(s.begin(), s.end(),
                  t.eta.begin() + static_cast<std::ptrdiff_t>(
                                      i * static_cast<std::size_t>(t.k_eta)));
    });
    return t;
}

DistanceVec compute_distances(const ReferenceTable& table, const SummaryVec& eta_obs) {
    if (static_cast<int>(eta_obs.size()) != table.k_eta)
        throw dimension_mismatch_error("compute_distances: summary length mismatch");
    DistanceVec dv;
    dv.d.resize(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto row = table.eta_row(i);
        double ss = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double diff = row[j] - eta_obs[j];
            ss += diff * diff;
        }
        dv.d[i] = std::sqrt(ss);
    }
    return dv;
}

Tolerance quantile_tolerance(const DistanceVec& d, double q) {
    if (d.d.empty()) throw empty_posterior_error("quantile_tolerance: no distances");
    if (!(q > 0.0 && q <= 1.0))
        throw std::domain_error("quantile_tolerance: q must be in (0,1]");
    const std::size_t N = d.d.size();
    // absorb fp error in q*N so that e.g. 0.1 * 100 lands on 10, not 11
    std::size_t k = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(N) - 1e-9));
    if (k < 1) k = 1;
    if (k > N) k = N;
    std::vector<double> sorted(d.d);
    std::nth_element(sorted.begin(),
                     sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end());
    Tolerance tol;
    tol.epsilon = sorted[k - 1];
    tol.quantile_level = q;
    return tol;
}

PosteriorDraws accept(const ReferenceTable& table, const DistanceVec& d,
                      const Tolerance& tol) {
    if (d.d.size() != table.rows())
        throw dimension_mismatch_error("accept: distance count != table rows");
    if (tol.epsilon < 0.0) throw std::domain_error("accept: negative tolerance");

    PosteriorDraws p;
    p.k_theta = table.k_theta;
    p.epsilon = tol.epsilon;
    p.tag = MethodTag::AR;
    const double eps = tol.epsilon;
    for (std::size_t i = 0; i < d.d.size(); ++i) {
        if (d.d[i] <= eps) {
            const auto row = table.theta_row(i);
            p.draws.insert(p.draws.end(), row.begin(), row.end());
            const double w =
                eps > 0.0 ? 1.0 - (d.d[i] / eps) * (d.d[i] / eps) : 1.0;
            p.weights.push_back(w);
            p.source_rows.push_back(i);
        }
    }
    if (p.count() == 0)
        throw empty_posterior_error(
            "accept: no draws within tolerance (epsilon too small)");
    p.alpha_hat =
        static_cast<double>(p.count()) / static_cast<double>(table.rows());
    // ties exactly at the threshold carry zero kernel weight; fall back to
    // uniform weights if nothing else survived
    double wmax = 0.0;
    for (double w : p.weights) wmax = std::max(wmax, w);
    if (wmax <= 0.0) std::fill(p.weights.begin(), p.weights.end(), 1.0);
    return p;
}

} // namespace abcms
