#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsv/engine.hpp"

namespace lsv {

struct WeightedEstimate {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
    double ess = 0.0;   // (Σw)² / Σw² over denominator weights
    double se = 0.0;    // linearized standard error of the ratio
    Eigen::Index n_used = 0;
};

constexpr double kDefaultDMax = 8.0;
constexpr double kPhiPrune = 1e-14;

/// Quartic (biweight) kernel (15/16)(1-(x/h)²)² 1{|x|<=h}.
double quartic_kernel(double x, double h);

/// Rule-of-thumb bandwidth 1.5 · vol_scale · spot · sqrt(t) · M^{-1/5},
/// floored at 1e-4 · spot.
double bandwidth_rule(Eigen::Index n_particles, double t, double vol_scale, double spot);

/// Nadaraya-Watson benchmark: Σ D V K_h(S-K) / Σ D K_h(S-K).
WeightedEstimate kernel_conditional_ratio(const Eigen::Ref<const Eigen::ArrayXd>& spot,
                                          const Eigen::Ref<const Eigen::ArrayXd>& v,
                                          const Eigen::Ref<const Eigen::ArrayXd>& df,
                                          double strike, double bandwidth);

enum class RateBranch { Auto, UpperTail, LowerTail };

/// Closed-form conditional-expectation estimators over one knot's ensemble.
///
/// Particles are sorted once by mu/sd so every strike's admissible set
/// |d_i(K)| <= d_max is a contiguous window located by binary search; sorted
/// order also fixes the summation order, making results independent of the
/// input particle ordering.
class ConditionalEstimator {
public:
    ConditionalEstimator(const KnotStats& stats, double d_max = kDefaultDMax);

    /// Ratio of D V e^{-d²/2}/σ weights to D e^{-d²/2}/σ weights.
    /// Throws NoMassError when every particle is pruned at this strike.
    WeightedEstimate exact_ratio(double strike) const;

    /// Bivariate-lognormal closed form (lognormal variance family only).
    WeightedEstimate lognormal_ratio(double strike) const;

    /// E[D (r - r̄) 1{S>K}] via the Gaussian-cdf tail representation:
    /// mean of D (r - r̄) Φ(-d) for K > spot0, -mean of D (r - r̄) Φ(d)
    /// otherwise.  `phi_prune <= 0` disables the tail cutoff.
    double rate_adjustment(double strike, double rbar, double spot0,
                           RateBranch branch = RateBranch::Auto,
                           double phi_prune = kPhiPrune) const;

    /// Particles with |d_i(K)| <= d_max, as original ensemble indices.
    std::vector<Eigen::Index> prune_particles(double strike) const;

    double d_max() const { return d_max_; }
    bool has_lognormal() const { return has_logn_; }

private:
    struct Basis {
        Eigen::ArrayXd key;       // mu * inv_sd, ascending
        Eigen::ArrayXd inv_sd;    // 1/sqrt(scale * sigma2)
        Eigen::ArrayXd inv_sig;   // 1/sqrt(sigma2)
        Eigen::ArrayXd mu;
        Eigen::ArrayXd df;
        Eigen::ArrayXd aux;       // V (exact basis) or xi_tilde (lognormal basis)
        Eigen::ArrayXd extra;     // r (exact basis only)
        std::vector<Eigen::Index> idx;
        double inv_sd_lo = 0.0, inv_sd_hi = 0.0;

        void build(const Eigen::ArrayXd& mu_in, const Eigen::ArrayXd& sigma2_in, double scale,
                   const Eigen::ArrayXd& df_in, const Eigen::ArrayXd& aux_in,
                   const Eigen::ArrayXd* extra_in);
        // candidate window for |d| <= c
        std::pair<Eigen::Index, Eigen::Index> window(double log_k, double c) const;
        // candidate prefix for d <= c / suffix for d >= -c
        Eigen::Index prefix_below(double log_k, double c) const;
        Eigen::Index suffix_above(double log_k, double c) const;
    };

    Eigen::Index m_ = 0;
    double d_max_ = kDefaultDMax;
    bool prune_ = true;
    bool has_logn_ = false;
    double nu_t_ = 0.0, rho_t_ = 0.0;
    Basis exact_;
    Basis logn_;
};

} // namespace lsv
