#include "lsv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lsv/black.hpp"
#include "lsv/errors.hpp"
#include "lsv/summation.hpp"

namespace lsv {

double quartic_kernel(double x, double h) {
    const double u = x / h;
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return 0.9375 * w * w;
}

double bandwidth_rule(Eigen::Index n_particles, double t, double vol_scale, double spot) {
    const double h = 1.5 * vol_scale * spot * std::sqrt(std::max(t, 0.0)) *
                     std::pow(static_cast<double>(n_particles), -0.2);
    return std::max(h, 1e-4 * spot);
}

WeightedEstimate kernel_conditional_ratio(const Eigen::Ref<const Eigen::ArrayXd>& spot,
                                          const Eigen::Ref<const Eigen::ArrayXd>& v,
                                          const Eigen::Ref<const Eigen::ArrayXd>& df,
                                          double strike, double bandwidth) {
    if (!(bandwidth > 0.0)) throw ValidationError("kernel_conditional_ratio: bandwidth must be positive");
    const Eigen::Index m = spot.size();
    Eigen::ArrayXd w(m);
    Eigen::Index used = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        w[i] = df[i] * quartic_kernel(spot[i] - strike, bandwidth);
        if (w[i] != 0.0) ++used;
    }
    WeightedEstimate out;
    out.n_used = used;
    out.denominator = deterministic_sum(w);
    if (!(out.denominator > 0.0)) {
        std::ostringstream os;
        os << "kernel estimator: no particle within bandwidth at strike " << strike;
        throw NoMassError(os.str());
    }
    out.numerator = deterministic_sum(m, [&](Eigen::Index i) { return w[i] * v[i]; });
    out.value = out.numerator / out.denominator;
    const double sw2 = deterministic_sum(m, [&](Eigen::Index i) { return w[i] * w[i]; });
    out.ess = out.denominator * out.denominator / sw2;
    const double var_num = deterministic_sum(m, [&](Eigen::Index i) {
        const double dv = v[i] - out.value;
        return w[i] * w[i] * dv * dv;
    });
    out.se = std::sqrt(var_num) / out.denominator;
    return out;
}

void ConditionalEstimator::Basis::build(const Eigen::ArrayXd& mu_in,
                                        const Eigen::ArrayXd& sigma2_in, double scale,
                                        const Eigen::ArrayXd& df_in, const Eigen::ArrayXd& aux_in,
                                        const Eigen::ArrayXd* extra_in) {
    const Eigen::Index m = mu_in.size();
    idx.clear();
    idx.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
        if (sigma2_in[i] > 0.0) idx.push_back(i);  // zero-variance particles are flagged upstream

    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ka = mu_in[a] / std::sqrt(scale * sigma2_in[a]);
        const double kb = mu_in[b] / std::sqrt(scale * sigma2_in[b]);
        return ka < kb;
    });

    const Eigen::Index n = static_cast<Eigen::Index>(idx.size());
    key.resize(n);
    inv_sd.resize(n);
    inv_sig.resize(n);
    mu.resize(n);
    df.resize(n);
    aux.resize(n);
    if (extra_in) extra.resize(n);
    inv_sd_lo = std::numeric_limits<double>::infinity();
    inv_sd_hi = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index i = idx[static_cast<std::size_t>(j)];
        const double isd = 1.0 / std::sqrt(scale * sigma2_in[i]);
        key[j] = mu_in[i] * isd;
        inv_sd[j] = isd;
        inv_sig[j] = 1.0 / std::sqrt(sigma2_in[i]);
        mu[j] = mu_in[i];
        df[j] = df_in[i];
        aux[j] = aux_in[i];
        if (extra_in) extra[j] = (*extra_in)[i];
        inv_sd_lo = std::min(inv_sd_lo, isd);
        inv_sd_hi = std::max(inv_sd_hi, isd);
    }
}

std::pair<Eigen::Index, Eigen::Index> ConditionalEstimator::Basis::window(double log_k,
                                                                          double c) const {
    const double a = log_k * inv_sd_lo;
    const double b = log_k * inv_sd_hi;
    const double lo_key = std::min(a, b) - c;
    const double hi_key = std::max(a, b) + c;
    const double* begin = key.data();
    const double* end = key.data() + key.size();
    const Eigen::Index lo = std::lower_bound(begin, end, lo_key) - begin;
    const Eigen::Index hi = std::upper_bound(begin, end, hi_key) - begin;
    return {lo, hi};
}

Eigen::Index ConditionalEstimator::Basis::prefix_below(double log_k, double c) const {
    const double a = log_k * inv_sd_lo;
    const double b = log_k * inv_sd_hi;
    const double hi_key = std::max(a, b) + c;
    const double* begin = key.data();
    return std::upper_bound(begin, begin + key.size(), hi_key) - begin;
}

Eigen::Index ConditionalEstimator::Basis::suffix_above(double log_k, double c) const {
    const double a = log_k * inv_sd_lo;
    const double b = log_k * inv_sd_hi;
    const double lo_key = std::min(a, b) - c;
    const double* begin = key.data();
    return std::lower_bound(begin, begin + key.size(), lo_key) - begin;
}

ConditionalEstimator::ConditionalEstimator(const KnotStats& stats, double d_max)
    : m_(stats.mu.size()), d_max_(d_max) {
    prune_ = std::isfinite(d_max) && d_max > 0.0;
    const double scale = 1.0 - stats.rho_hat2;
    if (!(scale > 1e-12))
        throw ValidationError("ConditionalEstimator: ρ̂² too close to 1, conditional law degenerate");
    exact_.build(stats.mu, stats.sigma2, scale, stats.df, stats.v, &stats.r);
    if (stats.has_lognormal) {
        has_logn_ = true;
        nu_t_ = stats.nu_t;
        rho_t_ = stats.rho_t;
        logn_.build(stats.mu_t, stats.sigma2_t, 1.0, stats.df, stats.xi_t, nullptr);
    }
}

WeightedEstimate ConditionalEstimator::exact_ratio(double strike) const {
    if (!(strike > 0.0)) throw ValidationError("exact_ratio: strike must be positive");
    const double log_k = std::log(strike);
    auto [lo, hi] = prune_ ? exact_.window(log_k, d_max_)
                           : std::pair<Eigen::Index, Eigen::Index>{0, exact_.key.size()};
    const Eigen::Index n = hi - lo;
    WeightedEstimate out;
    if (n <= 0) {
        std::ostringstream os;
        os << "exact estimator: no mass at strike " << strike;
        throw NoMassError(os.str());
    }
    Eigen::ArrayXd w(n), val(n);
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index s = lo + j;
        const double d = exact_.key[s] - log_k * exact_.inv_sd[s];
        if (prune_ && std::abs(d) > d_max_) {
            w[j] = 0.0;
            val[j] = 0.0;
            continue;
        }
        w[j] = exact_.df[s] * std::exp(-0.5 * d * d) * exact_.inv_sig[s];
        val[j] = exact_.aux[s];
        ++used;
    }
    out.n_used = used;
    out.denominator = deterministic_sum(w);
    if (!(out.denominator > 0.0)) {
        std::ostringstream os;
        os << "exact estimator: no mass at strike " << strike;
        throw NoMassError(os.str());
    }
    out.numerator = deterministic_sum(n, [&](Eigen::Index j) { return w[j] * val[j]; });
    out.value = out.numerator / out.denominator;
    const double sw2 = deterministic_sum(n, [&](Eigen::Index j) { return w[j] * w[j]; });
    out.ess = out.denominator * out.denominator / sw2;
    const double var_num = deterministic_sum(n, [&](Eigen::Index j) {
        const double dv = val[j] - out.value;
        return w[j] * w[j] * dv * dv;
    });
    out.se = std::sqrt(var_num) / out.denominator;
    return out;
}

WeightedEstimate ConditionalEstimator::lognormal_ratio(double strike) const {
    if (!has_logn_)
        throw Error("lognormal estimator requested for a model outside the lognormal family");
    if (!(strike > 0.0)) throw ValidationError("lognormal_ratio: strike must be positive");
    const double log_k = std::log(strike);
    auto [lo, hi] = prune_ ? logn_.window(log_k, d_max_)
                           : std::pair<Eigen::Index, Eigen::Index>{0, logn_.key.size()};
    const Eigen::Index n = hi - lo;
    if (n <= 0) {
        std::ostringstream os;
        os << "lognormal estimator: no mass at strike " << strike;
        throw NoMassError(os.str());
    }
    const double half_res_var = 0.5 * (1.0 - rho_t_ * rho_t_) * nu_t_;
    const double rho_sq_nu = rho_t_ * std::sqrt(nu_t_);
    Eigen::ArrayXd w(n), val(n);
    Eigen::Index used = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index s = lo + j;
        const double d = logn_.key[s] - log_k * logn_.inv_sd[s];
        if (prune_ && std::abs(d) > d_max_) {
            w[j] = 0.0;
            val[j] = 0.0;
            continue;
        }
        const double z = -d;  // (log K - mu_t)/sd
        w[j] = logn_.df[s] * std::exp(-0.5 * d * d) * logn_.inv_sig[s];
        // conditional mean of V given log S = log K and the particle's past
        val[j] = std::exp(logn_.aux[s] + rho_sq_nu * z + half_res_var);
        ++used;
    }
    WeightedEstimate out;
    out.n_used = used;
    out.denominator = deterministic_sum(w);
    if (!(out.denominator > 0.0)) {
        std::ostringstream os;
        os << "lognormal estimator: no mass at strike " << strike;
        throw NoMassError(os.str());
    }
    out.numerator = deterministic_sum(n, [&](Eigen::Index j) { return w[j] * val[j]; });
    out.value = out.numerator / out.denominator;
    const double sw2 = deterministic_sum(n, [&](Eigen::Index j) { return w[j] * w[j]; });
    out.ess = out.denominator * out.denominator / sw2;
    const double var_num = deterministic_sum(n, [&](Eigen::Index j) {
        const double dv = val[j] - out.value;
        return w[j] * w[j] * dv * dv;
    });
    out.se = std::sqrt(var_num) / out.denominator;
    return out;
}

double ConditionalEstimator::rate_adjustment(double strike, double rbar, double spot0,
                                             RateBranch branch, double phi_prune) const {
    if (!(strike > 0.0)) throw ValidationError("rate_adjustment: strike must be positive");
    const double log_k = std::log(strike);
    const bool upper = branch == RateBranch::Auto ? (strike > spot0) : (branch == RateBranch::UpperTail);
    // Window cutoff from the tail bound Φ(-x) <= e^{-x²/2}/2: everything
    // outside |d| <= c_cut has Φ-factor below phi_prune for sure.
    const double c_cut = (phi_prune > 0.0 && phi_prune < 0.5)
                             ? std::sqrt(-2.0 * std::log(2.0 * phi_prune))
                             : std::numeric_limits<double>::infinity();
    double sum;
    if (upper) {
        // contributions die where Φ(-d) < prune  <=>  d > c_cut
        const Eigen::Index hi = phi_prune > 0.0 ? exact_.prefix_below(log_k, c_cut) : exact_.key.size();
        sum = deterministic_sum(hi, [&](Eigen::Index s) {
            const double d = exact_.key[s] - log_k * exact_.inv_sd[s];
            const double phi = norm_cdf(-d);
            if (phi < phi_prune) return 0.0;
            return exact_.df[s] * (exact_.extra[s] - rbar) * phi;
        });
    } else {
        const Eigen::Index lo = phi_prune > 0.0 ? exact_.suffix_above(log_k, c_cut) : 0;
        const Eigen::Index n = exact_.key.size() - lo;
        sum = -deterministic_sum(n, [&](Eigen::Index j) {
            const Eigen::Index s = lo + j;
            const double d = exact_.key[s] - log_k * exact_.inv_sd[s];
            const double phi = norm_cdf(d);
            if (phi < phi_prune) return 0.0;
            return exact_.df[s] * (exact_.extra[s] - rbar) * phi;
        });
    }
    return sum / static_cast<double>(m_);
}

std::vector<Eigen::Index> ConditionalEstimator::prune_particles(double strike) const {
    const double log_k = std::log(strike);
    auto [lo, hi] = prune_ ? exact_.window(log_k, d_max_)
                           : std::pair<Eigen::Index, Eigen::Index>{0, exact_.key.size()};
    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (Eigen::Index s = lo; s < hi; ++s) {
        const double d = exact_.key[s] - log_k * exact_.inv_sd[s];
        if (!prune_ || std::abs(d) <= d_max_) out.push_back(exact_.idx[static_cast<std::size_t>(s)]);
    }
    return out;
}

} // namespace lsv
