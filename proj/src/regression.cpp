#include "abcms/regression.hpp"

#include <algorithm>
#include <cmath>

#include "abcms/errors.hpp"

namespace abcms {

double epanechnikov_weight(double t, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("epanechnikov_weight: eps must be > 0");
    if (t > eps) return 0.0;
    const double r = t / eps;
    return 0.75 / eps * (1.0 - r * r);
}

namespace {

// Cholesky solve of the symmetric positive-definite system A x = b for
// several right-hand sides. A is p x p row-major and is overwritten.
void spd_solve(std::vector<double>& A, int p, std::vector<double>& B, int nrhs) {
    for (int j = 0; j < p; ++j) {
        double diag = A[static_cast<std::size_t>(j) * p + j];
        for (int k = 0; k < j; ++k) {
            const double l = A[static_cast<std::size_t>(j) * p + k];
            diag -= l * l;
        }
        if (!(diag > 1e-14))
            throw singular_design_error("weighted design is singular");
        const double ljj = std::sqrt(diag);
        A[static_cast<std::size_t>(j) * p + j] = ljj;
        for (int i = j + 1; i < p; ++i) {
            double v = A[static_cast<std::size_t>(i) * p + j];
            for (int k = 0; k < j; ++k)
                v -= A[static_cast<std::size_t>(i) * p + k] *
                     A[static_cast<std::size_t>(j) * p + k];
            A[static_cast<std::size_t>(i) * p + j] = v / ljj;
        }
    }
    // forward then backward substitution, per rhs column
    for (int r = 0; r < nrhs; ++r) {
        double* b = B.data() + static_cast<std::size_t>(r) * p;
        for (int i = 0; i < p; ++i) {
            double v = b[i];
            for (int k = 0; k < i; ++k)
                v -= A[static_cast<std::size_t>(i) * p + k] * b[k];
            b[i] = v / A[static_cast<std::size_t>(i) * p + i];
        }
        for (int i = p - 1; i >= 0; --i) {
            double v = b[i];
            for (int k = i + 1; k < p; ++k)
                v -= A[static_cast<std::size_t>(k) * p + i] * b[k];
            b[i] = v / A[static_cast<std::size_t>(i) * p + i];
        }
    }
}

// Weighted least squares of each response column on [1, X] where
// X_i = eta_row(i) - center. Returns (intercepts, slopes) per response.
struct WlsResult {
    std::vector<double> intercepts;
    std::vector<double> slopes;  // per response, k_eta entries
    double weight_sum = 0.0;
};

WlsResult wls_on_design(const PosteriorDraws& p, const ReferenceTable& table,
                        const SummaryVec& center,
                        const std::vector<double>& responses, int n_resp) {
    const std::size_t m = p.count();
    const int ke = table.k_eta;
    const int dim = ke + 1;
    if (static_cast<int>(center.size()) != ke)
        throw dimension_mismatch_error("wls: center length mismatch");
    if (m < static_cast<std::size_t>(ke + 2))
        throw insufficient_data_error("wls: need at least k_eta + 2 draws");
    if (p.source_rows.size() != m)
        throw dimension_mismatch_error("wls: posterior lacks table provenance");

    double wsum = 0.0;
    for (double w : p.weights) wsum += w;
    if (!(wsum > 0.0)) throw numeric_error("wls: all weights zero");

    std::vector<double> xtx(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> xty(static_cast<std::size_t>(dim) * n_resp, 0.0);
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < m; ++i) {
        const double w = p.weights[i];
        if (w <= 0.0) continue;
        x[0] = 1.0;
        const auto row = table.eta_row(p.source_rows[i]);
        for (int j = 0; j < ke; ++j)
            x[static_cast<std::size_t>(j + 1)] = row[static_cast<std::size_t>(j)] -
                                                 center[static_cast<std::size_t>(j)];
        for (int a = 0; a < dim; ++a) {
            const double wxa = w * x[static_cast<std::size_t>(a)];
            for (int b = a; b < dim; ++b)
                xtx[static_cast<std::size_t>(a) * dim + b] +=
                    wxa * x[static_cast<std::size_t>(b)];
            for (int r = 0; r < n_resp; ++r)
                xty[static_cast<std::size_t>(r) * dim + a] +=
                    wxa * responses[i * static_cast<std::size_t>(n_resp) +
                                    static_cast<std::size_t>(r)];
        }
    }
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < a; ++b)
            xtx[static_cast<std::size_t>(a) * dim + b] =
                xtx[static_cast<std::size_t>(b) * dim + a];

    spd_solve(xtx, dim, xty, n_resp);

    WlsResult out;
    out.weight_sum = wsum;
    out.intercepts.resize(static_cast<std::size_t>(n_resp));
    out.slopes.resize(static_cast<std::size_t>(n_resp) * ke);
    for (int r = 0; r < n_resp; ++r) {
        out.intercepts[static_cast<std::size_t>(r)] =
            xty[static_cast<std::size_t>(r) * dim];
        for (int j = 0; j < ke; ++j)
            out.slopes[static_cast<std::size_t>(r) * ke + j] =
                xty[static_cast<std::size_t>(r) * dim + j + 1];
    }
    return out;
}

} // namespace

double RegressionFit::predict(int comp, std::span<const double> eta) const {
    double v = intercepts[static_cast<std::size_t>(comp)];
    for (int j = 0; j < k_eta; ++j)
        v += slope(comp, j) *
             (eta[static_cast<std::size_t>(j)] - center[static_cast<std::size_t>(j)]);
    return v;
}

RegressionFit fit_local_linear(const PosteriorDraws& p, const ReferenceTable& table,
                               const SummaryVec& eta_obs) {
    p.validate();
    const int kt = p.k_theta;
    std::vector<double> resp(p.count() * static_cast<std::size_t>(kt));
    for (std::size_t i = 0; i < p.count(); ++i)
        for (int c = 0; c < kt; ++c)
            resp[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                p.draw(i, c);
    const auto wls = wls_on_design(p, table, eta_obs, resp, kt);

    RegressionFit fit;
    fit.k_theta = kt;
    fit.k_eta = table.k_eta;
    fit.intercepts = wls.intercepts;
    fit.slopes = wls.slopes;
    fit.center = eta_obs;
    fit.weight_sum = wls.weight_sum;
    return fit;
}

PosteriorDraws adjust_linear(const PosteriorDraws& p, const ReferenceTable& table,
                             const RegressionFit& fit) {
    PosteriorDraws out = p;
    out.tag = MethodTag::Reg;
    for (std::size_t i = 0; i < p.count(); ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        for (int c = 0; c < p.k_theta; ++c) {
            double shift = 0.0;
            for (int j = 0; j < fit.k_eta; ++j)
                shift += fit.slope(c, j) * (row[static_cast<std::size_t>(j)] -
                                            fit.center[static_cast<std::size_t>(j)]);
            out.draws[i * static_cast<std::size_t>(p.k_theta) +
                      static_cast<std::size_t>(c)] -= shift;
        }
    }
    return out;
}

SummaryVec regn_center(const Scenario& sc, const ThetaVec& theta_hat, int M_sim,
                       std::uint64_t master_seed) {
    if (M_sim < 1) throw config_error("regn_center: M_sim must be >= 1");
    SummaryVec acc(static_cast<std::size_t>(sc.k_eta()), 0.0);
    for (int m = 0; m < M_sim; ++m) {
        RngStream rng = RngStream::from(master_seed, static_cast<std::uint64_t>(m));
        const auto data = simulate(sc, theta_hat, Which::assumed, rng);
        const auto s = summarize(sc, data);
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += s[j];
    }
    for (auto& v : acc) v /= static_cast<double>(M_sim);
    return acc;
}

PosteriorDraws adjust_regn(const PosteriorDraws& p, const ReferenceTable& table,
                           const RegressionFit& fit, const SummaryVec& eta_hat) {
    if (eta_hat.size() != fit.center.size())
        throw dimension_mismatch_error("adjust_regn: eta_hat length mismatch");
    PosteriorDraws out = p;
    out.tag = MethodTag::RegN;
    for (std::size_t i = 0; i < p.count(); ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        for (int c = 0; c < p.k_theta; ++c) {
            double shift = 0.0;
            for (int j = 0; j < fit.k_eta; ++j)
                shift += fit.slope(c, j) * (eta_hat[static_cast<std::size_t>(j)] -
                                            row[static_cast<std::size_t>(j)]);
            out.draws[i * static_cast<std::size_t>(p.k_theta) +
                      static_cast<std::size_t>(c)] += shift;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// nonlinear (neural network) adjustment

namespace {

struct NnWork {
    std::vector<double> xs;  // m * k_eta standardized inputs
    std::vector<double> ys;  // m * k_theta standardized outputs
    std::vector<double> wn;  // weights scaled to mean 1
};

double weighted_mean(const std::vector<double>& v, const std::vector<double>& w,
                     std::size_t m, std::size_t stride, std::size_t off) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        num += w[i] * v[i * stride + off];
        den += w[i];
    }
    return num / den;
}

} // namespace

ThetaVec NonlinearFit::predict(std::span<const double> eta) const {
    std::vector<double> a(static_cast<std::size_t>(hidden));
    for (int h = 0; h < hidden; ++h) {
        double s = b1[static_cast<std::size_t>(h)];
        for (int j = 0; j < k_eta; ++j) {
            const double x = (eta[static_cast<std::size_t>(j)] -
                              center[static_cast<std::size_t>(j)] -
                              x_mean[static_cast<std::size_t>(j)]) /
                             x_sd[static_cast<std::size_t>(j)];
            s += w1[static_cast<std::size_t>(j) * hidden + h] * x;
        }
        a[static_cast<std::size_t>(h)] = 1.0 / (1.0 + std::exp(-s));
    }
    ThetaVec out(static_cast<std::size_t>(k_theta));
    for (int c = 0; c < k_theta; ++c) {
        double s = b2[static_cast<std::size_t>(c)];
        for (int h = 0; h < hidden; ++h)
            s += w2[static_cast<std::size_t>(h) * k_theta + c] *
                 a[static_cast<std::size_t>(h)];
        out[static_cast<std::size_t>(c)] = s * y_sd[static_cast<std::size_t>(c)] +
                                           y_mean[static_cast<std::size_t>(c)];
    }
    return out;
}

NonlinearFit fit_nonlinear(const PosteriorDraws& p, const ReferenceTable& table,
                           const SummaryVec& eta_obs, const NnConfig& cfg) {
    p.validate();
    const std::size_t m = p.count();
    const int ke = table.k_eta;
    const int kt = p.k_theta;
    const int H = cfg.hidden;
    if (H < 1) throw config_error("fit_nonlinear: hidden units must be >= 1");
    if (m < 10 * static_cast<std::size_t>(ke))
        throw insufficient_data_error("fit_nonlinear: need at least 10*k_eta draws");

    NonlinearFit fit;
    fit.k_eta = ke;
    fit.k_theta = kt;
    fit.hidden = H;
    fit.center = eta_obs;

    NnWork wk;
    wk.wn.resize(m);
    double wsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) wsum += p.weights[i];
    for (std::size_t i = 0; i < m; ++i)
        wk.wn[i] = p.weights[i] * static_cast<double>(m) / wsum;

    // standardization by weighted mean/sd of the shifted design
    std::vector<double> x(m * static_cast<std::size_t>(ke));
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        for (int j = 0; j < ke; ++j)
            x[i * static_cast<std::size_t>(ke) + static_cast<std::size_t>(j)] =
                row[static_cast<std::size_t>(j)] - eta_obs[static_cast<std::size_t>(j)];
    }
    fit.x_mean.resize(static_cast<std::size_t>(ke));
    fit.x_sd.resize(static_cast<std::size_t>(ke));
    for (int j = 0; j < ke; ++j) {
        const double mu = weighted_mean(x, p.weights, m, static_cast<std::size_t>(ke),
                                        static_cast<std::size_t>(j));
        double ss = 0.0, den = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d =
                x[i * static_cast<std::size_t>(ke) + static_cast<std::size_t>(j)] - mu;
            ss += p.weights[i] * d * d;
            den += p.weights[i];
        }
        double sd = std::sqrt(ss / den);
        if (!(sd > 1e-12)) sd = 1.0;
        fit.x_mean[static_cast<std::size_t>(j)] = mu;
        fit.x_sd[static_cast<std::size_t>(j)] = sd;
    }
    std::vector<double> y(m * static_cast<std::size_t>(kt));
    for (std::size_t i = 0; i < m; ++i)
        for (int c = 0; c < kt; ++c)
            y[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                p.draw(i, c);
    fit.y_mean.resize(static_cast<std::size_t>(kt));
    fit.y_sd.resize(static_cast<std::size_t>(kt));
    for (int c = 0; c < kt; ++c) {
        const double mu = weighted_mean(y, p.weights, m, static_cast<std::size_t>(kt),
                                        static_cast<std::size_t>(c));
        double ss = 0.0, den = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d =
                y[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] - mu;
            ss += p.weights[i] * d * d;
            den += p.weights[i];
        }
        double sd = std::sqrt(ss / den);
        if (!(sd > 1e-12)) sd = 1.0;
        fit.y_mean[static_cast<std::size_t>(c)] = mu;
        fit.y_sd[static_cast<std::size_t>(c)] = sd;
    }

    wk.xs.resize(m * static_cast<std::size_t>(ke));
    wk.ys.resize(m * static_cast<std::size_t>(kt));
    for (std::size_t i = 0; i < m; ++i) {
        for (int j = 0; j < ke; ++j)
            wk.xs[i * static_cast<std::size_t>(ke) + static_cast<std::size_t>(j)] =
                (x[i * static_cast<std::size_t>(ke) + static_cast<std::size_t>(j)] -
                 fit.x_mean[static_cast<std::size_t>(j)]) /
                fit.x_sd[static_cast<std::size_t>(j)];
        for (int c = 0; c < kt; ++c)
            wk.ys[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                (y[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] -
                 fit.y_mean[static_cast<std::size_t>(c)]) /
                fit.y_sd[static_cast<std::size_t>(c)];
    }

    // symmetric uniform init scaled by fan-in
    RngStream rng = RngStream::from(cfg.seed, 0x6e6eULL);
    fit.w1.resize(static_cast<std::size_t>(ke) * H);
    fit.b1.resize(static_cast<std::size_t>(H));
    fit.w2.resize(static_cast<std::size_t>(H) * kt);
    fit.b2.resize(static_cast<std::size_t>(kt));
    for (auto& v : fit.w1) v = rng.uniform(-0.5, 0.5) / static_cast<double>(ke);
    for (auto& v : fit.b1) v = rng.uniform(-0.5, 0.5) / static_cast<double>(ke);
    for (auto& v : fit.w2) v = rng.uniform(-0.5, 0.5) / static_cast<double>(H);
    for (auto& v : fit.b2) v = rng.uniform(-0.5, 0.5) / static_cast<double>(H);

    const std::size_t np =
        fit.w1.size() + fit.b1.size() + fit.w2.size() + fit.b2.size();
    std::vector<double> grad(np), madam(np, 0.0), vadam(np, 0.0);
    std::vector<double> act(m * static_cast<std::size_t>(H));
    std::vector<double> gpred(m * static_cast<std::size_t>(kt));

    const double b1a = 0.9, b2a = 0.999, epsa = 1e-8;
    for (int ep = 1; ep <= cfg.epochs; ++ep) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        // forward
        for (std::size_t i = 0; i < m; ++i) {
            for (int h = 0; h < H; ++h) {
                double s = fit.b1[static_cast<std::size_t>(h)];
                for (int j = 0; j < ke; ++j)
                    s += fit.w1[static_cast<std::size_t>(j) * H + h] *
                         wk.xs[i * static_cast<std::size_t>(ke) +
                               static_cast<std::size_t>(j)];
                act[i * static_cast<std::size_t>(H) + static_cast<std::size_t>(h)] =
                    1.0 / (1.0 + std::exp(-s));
            }
            for (int c = 0; c < kt; ++c) {
                double s = fit.b2[static_cast<std::size_t>(c)];
                for (int h = 0; h < H; ++h)
                    s += fit.w2[static_cast<std::size_t>(h) * kt + c] *
                         act[i * static_cast<std::size_t>(H) +
                             static_cast<std::size_t>(h)];
                const double err =
                    s - wk.ys[i * static_cast<std::size_t>(kt) +
                              static_cast<std::size_t>(c)];
                loss += wk.wn[i] * err * err;
                gpred[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                    2.0 * wk.wn[i] * err / static_cast<double>(m);
            }
        }
        if (!std::isfinite(loss))
            throw divergence_error("fit_nonlinear: loss diverged (reduce step)");
        // backward
        double* g_w1 = grad.data();
        double* g_b1 = g_w1 + fit.w1.size();
        double* g_w2 = g_b1 + fit.b1.size();
        double* g_b2 = g_w2 + fit.w2.size();
        for (std::size_t i = 0; i < m; ++i) {
            for (int h = 0; h < H; ++h) {
                const double a =
                    act[i * static_cast<std::size_t>(H) + static_cast<std::size_t>(h)];
                double gz = 0.0;
                for (int c = 0; c < kt; ++c) {
                    const double gp = gpred[i * static_cast<std::size_t>(kt) +
                                            static_cast<std::size_t>(c)];
                    g_w2[static_cast<std::size_t>(h) * kt + c] += gp * a;
                    gz += gp * fit.w2[static_cast<std::size_t>(h) * kt + c];
                }
                gz *= a * (1.0 - a);
                g_b1[h] += gz;
                for (int j = 0; j < ke; ++j)
                    g_w1[static_cast<std::size_t>(j) * H + h] +=
                        gz * wk.xs[i * static_cast<std::size_t>(ke) +
                                   static_cast<std::size_t>(j)];
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            for (int c = 0; c < kt; ++c)
                g_b2[c] += gpred[i * static_cast<std::size_t>(kt) +
                                 static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < fit.w1.size(); ++k)
            g_w1[k] += cfg.decay * fit.w1[k];
        for (std::size_t k = 0; k < fit.w2.size(); ++k)
            g_w2[k] += cfg.decay * fit.w2[k];
        // Adam update
        const double bc1 = 1.0 - std::pow(b1a, ep);
        const double bc2 = 1.0 - std::pow(b2a, ep);
        auto update = [&](double* params, const double* g, std::size_t off,
                          std::size_t cnt) {
            for (std::size_t k = 0; k < cnt; ++k) {
                madam[off + k] = b1a * madam[off + k] + (1.0 - b1a) * g[k];
                vadam[off + k] = b2a * vadam[off + k] + (1.0 - b2a) * g[k] * g[k];
                params[k] -= cfg.step * (madam[off + k] / bc1) /
                             (std::sqrt(vadam[off + k] / bc2) + epsa);
            }
        };
        std::size_t off = 0;
        update(fit.w1.data(), g_w1, off, fit.w1.size());
        off += fit.w1.size();
        update(fit.b1.data(), g_b1, off, fit.b1.size());
        off += fit.b1.size();
        update(fit.w2.data(), g_w2, off, fit.w2.size());
        off += fit.w2.size();
        update(fit.b2.data(), g_b2, off, fit.b2.size());
    }

    // exact weighted ridge solve of the output layer given the learned
    // hidden features
    for (std::size_t i = 0; i < m; ++i)
        for (int h = 0; h < H; ++h) {
            double s = fit.b1[static_cast<std::size_t>(h)];
            for (int j = 0; j < ke; ++j)
                s += fit.w1[static_cast<std::size_t>(j) * H + h] *
                     wk.xs[i * static_cast<std::size_t>(ke) +
                           static_cast<std::size_t>(j)];
            act[i * static_cast<std::size_t>(H) + static_cast<std::size_t>(h)] =
                1.0 / (1.0 + std::exp(-s));
        }
    const int dim = H + 1;
    std::vector<double> gram(static_cast<std::size_t>(dim) * dim, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(dim) * kt, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double w = wk.wn[i];
        for (int a = 0; a < dim; ++a) {
            const double fa =
                a < H ? act[i * static_cast<std::size_t>(H) + static_cast<std::size_t>(a)]
                      : 1.0;
            for (int b = a; b < dim; ++b) {
                const double fb =
                    b < H
                        ? act[i * static_cast<std::size_t>(H) + static_cast<std::size_t>(b)]
                        : 1.0;
                gram[static_cast<std::size_t>(a) * dim + b] += w * fa * fb;
            }
            for (int c = 0; c < kt; ++c)
                rhs[static_cast<std::size_t>(c) * dim + a] +=
                    w * fa * wk.ys[i * static_cast<std::size_t>(kt) +
                                   static_cast<std::size_t>(c)];
        }
    }
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < a; ++b)
            gram[static_cast<std::size_t>(a) * dim + b] =
                gram[static_cast<std::size_t>(b) * dim + a];
        if (a < H)
            gram[static_cast<std::size_t>(a) * dim + a] +=
                cfg.decay * static_cast<double>(m);
        else
            gram[static_cast<std::size_t>(a) * dim + a] += 1e-10;
    }
    spd_solve(gram, dim, rhs, kt);
    for (int c = 0; c < kt; ++c) {
        for (int h = 0; h < H; ++h)
            fit.w2[static_cast<std::size_t>(h) * kt + c] =
                rhs[static_cast<std::size_t>(c) * dim + h];
        fit.b2[static_cast<std::size_t>(c)] =
            rhs[static_cast<std::size_t>(c) * dim + H];
    }
    return fit;
}

PosteriorDraws adjust_nonlinear(const PosteriorDraws& p, const ReferenceTable& table,
                                const NonlinearFit& fit) {
    PosteriorDraws out = p;
    out.tag = MethodTag::NN;
    const ThetaVec at_obs = fit.predict(fit.center);
    for (std::size_t i = 0; i < p.count(); ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        const ThetaVec at_row = fit.predict(row);
        for (int c = 0; c < p.k_theta; ++c)
            out.draws[i * static_cast<std::size_t>(p.k_theta) +
                      static_cast<std::size_t>(c)] +=
                at_obs[static_cast<std::size_t>(c)] - at_row[static_cast<std::size_t>(c)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// heteroskedasticity correction

namespace {

template <class Fit, class ScaleFitter>
PosteriorDraws hetero_impl(const PosteriorDraws& p, const ReferenceTable& table,
                           const Fit& fit, const SummaryVec& center,
                           MethodTag out_tag, ScaleFitter&& fit_scale) {
    p.validate();
    const std::size_t m = p.count();
    const int kt = p.k_theta;

    // first-stage conditional means and residuals
    std::vector<double> mean_at_row(m * static_cast<std::size_t>(kt));
    std::vector<double> log_r2(m * static_cast<std::size_t>(kt));
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        for (int c = 0; c < kt; ++c) {
            double mu;
            if constexpr (std::is_same_v<Fit, RegressionFit>)
                mu = fit.predict(c, row);
            else
                mu = fit.predict(row)[static_cast<std::size_t>(c)];
            mean_at_row[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                mu;
            const double r = p.draw(i, c) - mu;
            log_r2[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                std::log(r * r + 1e-12);
        }
    }

    // second-stage scale model sigma(x) = exp(fit(log r^2)/2)
    auto scale_model = fit_scale(log_r2);

    std::vector<double> mean_at_center(static_cast<std::size_t>(kt));
    std::vector<double> sd_at_center(static_cast<std::size_t>(kt));
    for (int c = 0; c < kt; ++c) {
        if constexpr (std::is_same_v<Fit, RegressionFit>)
            mean_at_center[static_cast<std::size_t>(c)] = fit.predict(c, center);
        else
            mean_at_center[static_cast<std::size_t>(c)] =
                fit.predict(center)[static_cast<std::size_t>(c)];
        sd_at_center[static_cast<std::size_t>(c)] =
            std::exp(0.5 * scale_model(c, center));
    }

    PosteriorDraws out = p;
    out.tag = out_tag;
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = table.eta_row(p.source_rows[i]);
        for (int c = 0; c < kt; ++c) {
            const double sd_row = std::exp(0.5 * scale_model(c, row));
            if (!(sd_row > 1e-12))
                throw degenerate_scale_error("hetero_correct: fitted scale ~ 0");
            const double resid =
                p.draw(i, c) -
                mean_at_row[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)];
            out.draws[i * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c)] =
                mean_at_center[static_cast<std::size_t>(c)] +
                resid * sd_at_center[static_cast<std::size_t>(c)] / sd_row;
        }
    }
    return out;
}

} // namespace

PosteriorDraws hetero_correct(const PosteriorDraws& p, const ReferenceTable& table,
                              const RegressionFit& fit, const SummaryVec& center,
                              MethodTag out_tag) {
    return hetero_impl(p, table, fit, center, out_tag,
                       [&](const std::vector<double>& log_r2) {
                           const auto wls =
                               wls_on_design(p, table, fit.center, log_r2, p.k_theta);
                           RegressionFit sfit;
                           sfit.k_theta = p.k_theta;
                           sfit.k_eta = table.k_eta;
                           sfit.intercepts = wls.intercepts;
                           sfit.slopes = wls.slopes;
                           sfit.center = fit.center;
                           sfit.weight_sum = wls.weight_sum;
                           return [sfit](int c, std::span<const double> eta) {
                               return sfit.predict(c, eta);
                           };
                       });
}

PosteriorDraws hetero_correct(const PosteriorDraws& p, const ReferenceTable& table,
                              const NonlinearFit& fit, const SummaryVec& center,
                              MethodTag out_tag, const NnConfig& cfg) {
    return hetero_impl(
        p, table, fit, center, out_tag, [&](const std::vector<double>& log_r2) {
            PosteriorDraws q = p;
            q.draws = log_r2;
            NnConfig scfg = cfg;
            scfg.seed = cfg.seed + 1;
            const auto sfit = fit_nonlinear(q, table, fit.center, scfg);
            return [sfit](int c, std::span<const double> eta) {
                return sfit.predict(eta)[static_cast<std::size_t>(c)];
            };
        });
}

} // namespace abcms
