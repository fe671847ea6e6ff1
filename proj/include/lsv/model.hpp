#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "lsv/correlation.hpp"
#include "lsv/grid.hpp"
#include "lsv/rng.hpp"
#include "lsv/volterra.hpp"

namespace lsv {

/// Piecewise-constant forward-variance curve ξ_0(t) (left-continuous).
struct ForwardVarianceCurve {
    Eigen::ArrayXd times;   // ascending, times[0] = 0
    Eigen::ArrayXd values;  // value on [times[k], times[k+1])

    static ForwardVarianceCurve flat(double xi);
    double at(double t) const;
    void validate() const;
};

/// Short rate dr = (r0 - κ r) dt + σ dY with r(0) = r0.
/// Long-run mean is r0/κ — the drift is kept in this exact form on purpose,
/// it is NOT the κ(θ - r) parameterization.
struct VasicekParams {
    double kappa = 1.0;
    double sigma = 0.005;
    double r0 = 0.015;

    double long_run() const { return r0 / kappa; }
    double mean(double t) const;      // E[r_t]
    double variance(double t) const;  // Var[r_t]
    double zcb(double t) const;       // analytic bond price
    double forward_rate(double t) const;
    void validate() const;
};

struct RoughBergomiParams {
    double hurst = 0.2;
    double beta = 0.5;
    double nu = 2.0;
    ForwardVarianceCurve xi0 = ForwardVarianceCurve::flat(0.04);
    double rho_sv = -0.8;  // spot-vol driver correlation
    double rho_sr = 0.0;   // spot-rate driver correlation
    double rho_vr = 0.0;   // vol-rate driver correlation; must be zero (see model.cpp)
    VasicekParams rates;
};

struct Bergomi2FParams {
    double kappa_x = 0.5;
    double kappa_y = 8.0;
    double theta = 0.8;
    double nu = 4.0;
    ForwardVarianceCurve xi0 = ForwardVarianceCurve::flat(0.04);
    double rho_sx = -0.1;
    double rho_sy = -0.8;
    double rho_xy = 0.3;
    double rho_sr = 0.0;
    double rho_xr = 0.0;
    double rho_yr = 0.0;
    VasicekParams rates;

    /// Bergomi normalization so Var(log V) is ν²-scaled.
    double alpha() const;
};

struct ConstVolParams {
    double v0 = 0.04;
    double rho_sr = 0.0;
    VasicekParams rates;
};

enum class VarianceKind { ConstVol, RoughBergomi, Bergomi2F };

/// Conditional-law scalars of log V_{t_i} given everything generated through
/// the previous simulation node (lognormal variance family only).
struct LognormalStepParams {
    double nu_tilde = 0.0;  // conditional variance
    double rho = 0.0;       // corr(ΔW, log V_{t_i} | past)
    double nu_unc = 0.0;    // unconditional variance (diagnostics)
    double xi_unc = 0.0;    // unconditional mean (diagnostics)
};

/// Maps particle indices to stream indices; implements antithetic pairing and
/// the frozen-driver modes used by the moment-check and regression harnesses.
struct StreamPolicy {
    enum class Kind { Plain, Antithetic, FrozenZ, FrozenPast };
    Kind kind = Kind::Plain;
    int free_from_step = 1;  // FrozenPast: drivers shared strictly before this step

    std::uint64_t z_particle(std::uint64_t u, int step) const {
        switch (kind) {
            case Kind::Antithetic: return u >> 1;
            case Kind::FrozenZ: return 0;
            case Kind::FrozenPast: return step < free_from_step ? 0 : u;
            case Kind::Plain: break;
        }
        return u;
    }
    std::uint64_t eps_particle(std::uint64_t u) const {
        return kind == Kind::Antithetic ? (u >> 1) : u;
    }
    double eps_sign(std::uint64_t u) const {
        return (kind == Kind::Antithetic && (u & 1)) ? -1.0 : 1.0;
    }
    bool shares_z() const { return kind == Kind::Antithetic || kind == Kind::FrozenZ; }
};

class ModelSession;

/// Hybrid LSV driver set: spot Brownian W, an n-dimensional block Z carrying
/// the variance drivers and the Vasicek rate driver, and the variance process
/// itself.  Immutable; per-run state lives in ModelSession.
class HybridModel {
public:
    static HybridModel rough_bergomi(RoughBergomiParams p);
    static HybridModel bergomi_2f(Bergomi2FParams p);
    static HybridModel const_vol(ConstVolParams p);

    VarianceKind kind() const { return kind_; }
    bool lognormal_family() const { return kind_ != VarianceKind::ConstVol; }
    const CorrelationStructure& correlation() const { return corr_; }
    const VasicekParams& rates() const { return rates_; }
    double v0() const;

    /// Representative vol level for bandwidth rules and diagnostics.
    double vol_scale() const;

    std::unique_ptr<ModelSession> start_session(const TimeGrid& grid, Eigen::Index n_particles,
                                                StreamPolicy policy, NormalStream rng) const;

    const RoughBergomiParams& rough_params() const;
    const Bergomi2FParams& bergomi_params() const;
    const ConstVolParams& const_params() const;

private:
    friend class ModelSession;
    HybridModel() = default;

    VarianceKind kind_ = VarianceKind::ConstVol;
    CorrelationStructure corr_;
    VasicekParams rates_;
    RoughBergomiParams rough_;
    Bergomi2FParams bergomi_;
    ConstVolParams cvol_;
};

/// Per-run state: current variance and short rate per particle, staged values
/// for the next node, the parallel spot-driver increment, and (lognormal
/// family) the per-particle conditional mean of log V at the upcoming node.
class ModelSession {
public:
    ModelSession(const HybridModel& model, const TimeGrid& grid, Eigen::Index n_particles,
                 StreamPolicy policy, NormalStream rng);

    /// Prepares the move from node step-1 to node `step` (1-based).
    /// `knot_index` >= 0 requests the per-particle conditional mean of
    /// log V at this node (lognormal family); -1 otherwise.
    void draw_step(int step, int knot_index);
    /// Commits staged v/r; current() values then refer to node `step`.
    void advance();

    const Eigen::ArrayXd& v() const { return v_; }
    const Eigen::ArrayXd& r() const { return r_; }
    const Eigen::ArrayXd& dw_par() const { return dw_par_; }
    const Eigen::ArrayXd& v_next() const { return v_next_; }
    const Eigen::ArrayXd& r_next() const { return r_next_; }
    const Eigen::ArrayXd& xi_tilde() const { return xi_tilde_; }

    LognormalStepParams lognormal_params(int step) const;
    const HybridModel& model() const { return model_; }

private:
    void prepare_rough();
    void draw_rough(int step, int knot_index);
    void draw_bergomi(int step, bool need_xi);
    void draw_const(int step);

    Eigen::Index g_row(Eigen::Index u) const {
        if (policy_.kind == StreamPolicy::Kind::FrozenZ) return 0;
        if (policy_.kind == StreamPolicy::Kind::Antithetic) return u >> 1;
        return u;
    }

    const HybridModel& model_;
    TimeGrid grid_;
    Eigen::Index m_ = 0;
    StreamPolicy policy_;
    NormalStream rng_;

    Eigen::ArrayXd v_, r_, v_next_, r_next_, dw_par_, xi_tilde_;

    // joint per-step factor: standardized raw increments of Z first, then the
    // OU innovations (variance factors and/or rate), lower-triangular
    Eigen::MatrixXd step_chol_;
    int n_raw_ = 0;
    int n_innov_ = 0;

    // rough pregeneration
    VolterraFactor volterra_;
    Eigen::MatrixXd g_path_;    // (z-particles) x n_steps
    Eigen::MatrixXd g_cond_;    // (z-particles) x n_knots: E[G_knot | past]
    Eigen::Index m_z_ = 0;

    // 2F OU states
    Eigen::ArrayXd ou_x_, ou_y_, ou_x_next_, ou_y_next_;

    // cached per-step constants
    double ex_ = 0.0, ey_ = 0.0, er_ = 0.0;  // e^{-κ dt}
    double nu_tilde_2f_ = 0.0, rho_2f_ = 0.0;
};

/// Driver increments materialized for statistical tests (spec op
/// simulate_drivers): spot increments dW, block increments dZ, and the
/// parallel component dW^|| = ρ_WZᵀ Σ_Z^{-1} ΔZ.
struct DriverPaths {
    Eigen::MatrixXd dw;                // M x n_steps
    std::vector<Eigen::MatrixXd> dz;   // per driver: M x n_steps
    Eigen::MatrixXd dw_par;            // M x n_steps
};

DriverPaths simulate_drivers(const CorrelationStructure& cs, const TimeGrid& grid,
                             Eigen::Index n_particles, std::uint64_t seed);

} // namespace lsv
