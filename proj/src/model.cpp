#include "lsv/model.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "lsv/errors.hpp"

namespace lsv {

namespace {

// Stream identifiers within a (particle, step) counter. Streams 0..2 feed the
// per-step joint factor (up to 6 normals), stream 8 the Volterra residual,
// stream 16 the engine's idiosyncratic spot noise.
constexpr std::uint64_t kStreamFactor0 = 0;
constexpr std::uint64_t kStreamVolterraRes = 8;

// Joint Gaussian of the standardized raw increments of Z (first) and the
// one-step OU innovations I_a = ∫ e^{-κ_a (t_k - s)} dZ^{(a)}_s (after).
// Ordering raw-first keeps the raw block equal to chol(Σ_Z), so raw draws are
// unchanged when innovations are added, and row 0 stays e_0 when Σ_Z has unit
// diagonal (the Volterra pregeneration relies on that).
Eigen::MatrixXd build_step_factor(const Eigen::MatrixXd& sigma_z,
                                  const std::vector<std::pair<int, double>>& innovations,
                                  double dt) {
    const int n = static_cast<int>(sigma_z.rows());
    const int q = static_cast<int>(innovations.size());
    Eigen::MatrixXd cov(n + q, n + q);
    cov.topLeftCorner(n, n) = sigma_z;
    for (int a = 0; a < q; ++a) {
        const auto [da, ka] = innovations[static_cast<std::size_t>(a)];
        const double load = (1.0 - std::exp(-ka * dt)) / ka / std::sqrt(dt);
        for (int b = 0; b < n; ++b) {
            cov(n + a, b) = sigma_z(da, b) * load;
            cov(b, n + a) = cov(n + a, b);
        }
        for (int b = 0; b <= a; ++b) {
            const auto [db, kb] = innovations[static_cast<std::size_t>(b)];
            const double c =
                sigma_z(da, db) * (1.0 - std::exp(-(ka + kb) * dt)) / (ka + kb);
            cov(n + a, n + b) = c;
            cov(n + b, n + a) = c;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd jittered =
            cov + 1e-13 * Eigen::MatrixXd::Identity(n + q, n + q);
        llt.compute(jittered);
        if (llt.info() != Eigen::Success)
            throw Error("step factor: joint covariance not factorizable");
    }
    return llt.matrixL();
}

} // namespace

ForwardVarianceCurve ForwardVarianceCurve::flat(double xi) {
    ForwardVarianceCurve c;
    c.times = Eigen::ArrayXd::Zero(1);
    c.values = Eigen::ArrayXd::Constant(1, xi);
    c.validate();
    return c;
}

double ForwardVarianceCurve::at(double t) const {
    Eigen::Index k = 0;
    while (k + 1 < times.size() && times[k + 1] <= t) ++k;
    return values[k];
}

void ForwardVarianceCurve::validate() const {
    if (times.size() != values.size() || times.size() < 1 || times[0] != 0.0)
        throw ValidationError("ForwardVarianceCurve: grid must start at 0");
    for (Eigen::Index i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1]))
            throw ValidationError("ForwardVarianceCurve: times must be increasing");
        if (!(values[i] > 0.0)) throw ValidationError("ForwardVarianceCurve: ξ0 must be positive");
    }
}

void VasicekParams::validate() const {
    if (!(kappa > 0.0)) throw ValidationError("VasicekParams: κ must be positive");
    if (!(sigma >= 0.0)) throw ValidationError("VasicekParams: σ must be non-negative");
}

double VasicekParams::mean(double t) const {
    const double th = long_run();
    return th + (r0 - th) * std::exp(-kappa * t);
}

double VasicekParams::variance(double t) const {
    return sigma * sigma * (1.0 - std::exp(-2.0 * kappa * t)) / (2.0 * kappa);
}

double VasicekParams::zcb(double t) const {
    const double b = (1.0 - std::exp(-kappa * t)) / kappa;
    const double th = long_run();
    const double log_a = (th - 0.5 * sigma * sigma / (kappa * kappa)) * (b - t) -
                         0.25 * sigma * sigma * b * b / kappa;
    return std::exp(log_a - b * r0);
}

double VasicekParams::forward_rate(double t) const {
    const double e = std::exp(-kappa * t);
    const double b = (1.0 - e) / kappa;
    return r0 * e + long_run() * (1.0 - e) - 0.5 * sigma * sigma * b * b;
}

double Bergomi2FParams::alpha() const {
    const double w = (1.0 - theta) * (1.0 - theta) + theta * theta +
                     2.0 * theta * (1.0 - theta) * rho_xy;
    return 1.0 / std::sqrt(w);
}

HybridModel HybridModel::rough_bergomi(RoughBergomiParams p) {
    if (!(p.hurst > 0.0) || !(p.hurst <= 0.5))
        throw ValidationError("RoughBergomiParams: H must be in (0, 1/2]");
    if (!(p.beta >= 0.0)) throw ValidationError("RoughBergomiParams: β must be non-negative");
    if (!(p.nu > 0.0)) throw ValidationError("RoughBergomiParams: ν must be positive");
    if (p.rho_vr != 0.0)
        throw ValidationError(
            "RoughBergomiParams: vol-rate driver correlation must be zero for the rough model");
    p.xi0.validate();
    p.rates.validate();
    HybridModel m;
    m.kind_ = VarianceKind::RoughBergomi;
    m.rough_ = std::move(p);
    m.rates_ = m.rough_.rates;
    Eigen::VectorXd rho(2);
    rho << m.rough_.rho_sv, m.rough_.rho_sr;
    Eigen::MatrixXd sz(2, 2);
    sz << 1.0, m.rough_.rho_vr, m.rough_.rho_vr, 1.0;
    m.corr_ = CorrelationStructure::make(rho, sz);
    return m;
}

HybridModel HybridModel::bergomi_2f(Bergomi2FParams p) {
    if (!(p.kappa_x > 0.0) || !(p.kappa_y > 0.0))
        throw ValidationError("Bergomi2FParams: mean reversions must be positive");
    if (!(p.theta >= 0.0) || !(p.theta <= 1.0))
        throw ValidationError("Bergomi2FParams: θ must lie in [0, 1]");
    if (!(p.nu > 0.0)) throw ValidationError("Bergomi2FParams: ν must be positive");
    p.xi0.validate();
    p.rates.validate();
    HybridModel m;
    m.kind_ = VarianceKind::Bergomi2F;
    m.bergomi_ = std::move(p);
    m.rates_ = m.bergomi_.rates;
    Eigen::VectorXd rho(3);
    rho << m.bergomi_.rho_sx, m.bergomi_.rho_sy, m.bergomi_.rho_sr;
    Eigen::MatrixXd sz(3, 3);
    sz << 1.0, m.bergomi_.rho_xy, m.bergomi_.rho_xr,
          m.bergomi_.rho_xy, 1.0, m.bergomi_.rho_yr,
          m.bergomi_.rho_xr, m.bergomi_.rho_yr, 1.0;
    m.corr_ = CorrelationStructure::make(rho, sz);
    return m;
}

HybridModel HybridModel::const_vol(ConstVolParams p) {
    if (!(p.v0 > 0.0)) throw ValidationError("ConstVolParams: V0 must be positive");
    p.rates.validate();
    HybridModel m;
    m.kind_ = VarianceKind::ConstVol;
    m.cvol_ = p;
    m.rates_ = p.rates;
    Eigen::VectorXd rho(1);
    rho << p.rho_sr;
    Eigen::MatrixXd sz = Eigen::MatrixXd::Identity(1, 1);
    m.corr_ = CorrelationStructure::make(rho, sz);
    return m;
}

double HybridModel::v0() const {
    switch (kind_) {
        case VarianceKind::ConstVol: return cvol_.v0;
        case VarianceKind::RoughBergomi: return rough_.xi0.at(0.0);
        case VarianceKind::Bergomi2F: return bergomi_.xi0.at(0.0);
    }
    return 0.0;
}

double HybridModel::vol_scale() const { return std::sqrt(v0()); }

const RoughBergomiParams& HybridModel::rough_params() const {
    if (kind_ != VarianceKind::RoughBergomi) throw Error("model is not rough Bergomi");
    return rough_;
}
const Bergomi2FParams& HybridModel::bergomi_params() const {
    if (kind_ != VarianceKind::Bergomi2F) throw Error("model is not 2F Bergomi");
    return bergomi_;
}
const ConstVolParams& HybridModel::const_params() const {
    if (kind_ != VarianceKind::ConstVol) throw Error("model is not constant-vol");
    return cvol_;
}

std::unique_ptr<ModelSession> HybridModel::start_session(const TimeGrid& grid,
                                                         Eigen::Index n_particles,
                                                         StreamPolicy policy,
                                                         NormalStream rng) const {
    return std::make_unique<ModelSession>(*this, grid, n_particles, policy, rng);
}

ModelSession::ModelSession(const HybridModel& model, const TimeGrid& grid,
                           Eigen::Index n_particles, StreamPolicy policy, NormalStream rng)
    : model_(model), grid_(grid), m_(n_particles), policy_(policy), rng_(rng) {
    grid_.validate();
    const double dt = grid_.dt;
    const auto& rates = model_.rates();
    er_ = std::exp(-rates.kappa * dt);

    v_ = Eigen::ArrayXd::Constant(m_, model_.v0());
    r_ = Eigen::ArrayXd::Constant(m_, rates.r0);
    v_next_.resize(m_);
    r_next_.resize(m_);
    dw_par_.resize(m_);
    xi_tilde_ = Eigen::ArrayXd::Zero(m_);

    switch (model_.kind()) {
        case VarianceKind::ConstVol: {
            n_raw_ = 1;
            n_innov_ = 1;
            step_chol_ = build_step_factor(model_.correlation().sigma_z, {{0, rates.kappa}}, dt);
            v_next_ = v_;
            break;
        }
        case VarianceKind::RoughBergomi: {
            n_raw_ = 2;
            n_innov_ = 1;
            step_chol_ = build_step_factor(model_.correlation().sigma_z, {{1, rates.kappa}}, dt);
            prepare_rough();
            break;
        }
        case VarianceKind::Bergomi2F: {
            const auto& p = model_.bergomi_params();
            n_raw_ = 3;
            n_innov_ = 3;
            step_chol_ = build_step_factor(
                model_.correlation().sigma_z,
                {{0, p.kappa_x}, {1, p.kappa_y}, {2, rates.kappa}}, dt);
            ex_ = std::exp(-p.kappa_x * dt);
            ey_ = std::exp(-p.kappa_y * dt);
            ou_x_ = Eigen::ArrayXd::Zero(m_);
            ou_y_ = Eigen::ArrayXd::Zero(m_);
            ou_x_next_.resize(m_);
            ou_y_next_.resize(m_);
            const double a = p.nu * p.alpha();
            const double vx = (1.0 - std::exp(-2.0 * p.kappa_x * dt)) / (2.0 * p.kappa_x);
            const double vy = (1.0 - std::exp(-2.0 * p.kappa_y * dt)) / (2.0 * p.kappa_y);
            const double vxy =
                p.rho_xy * (1.0 - std::exp(-(p.kappa_x + p.kappa_y) * dt)) / (p.kappa_x + p.kappa_y);
            nu_tilde_2f_ = a * a *
                           ((1.0 - p.theta) * (1.0 - p.theta) * vx + p.theta * p.theta * vy +
                            2.0 * p.theta * (1.0 - p.theta) * vxy);
            const double ax = (1.0 - ex_) / p.kappa_x;
            const double ay = (1.0 - ey_) / p.kappa_y;
            rho_2f_ = a * ((1.0 - p.theta) * p.rho_sx * ax + p.theta * p.rho_sy * ay) /
                      (std::sqrt(dt) * std::sqrt(nu_tilde_2f_));
            break;
        }
    }
}

void ModelSession::prepare_rough() {
    const auto& p = model_.rough_params();
    const int n = grid_.n_steps;
    volterra_ = build_volterra_factor(p.hurst, p.beta, p.nu, grid_.dt, n);

    m_z_ = policy_.kind == StreamPolicy::Kind::FrozenZ
               ? 1
               : (policy_.kind == StreamPolicy::Kind::Antithetic ? (m_ + 1) / 2 : m_);
    // FrozenPast keeps one row per particle; sharing happens inside the streams
    g_path_.resize(m_z_, n);
    const int n_knots = grid_.n_knots();
    g_cond_.resize(m_z_, n_knots);

    // strict-lower rows of the loadings at knot steps: E[G_knot | vars <= knot-1]
    Eigen::MatrixXd bk(n_knots, n), rk(n_knots, n);
    for (int kk = 0; kk < n_knots; ++kk) {
        const int s = grid_.knot_steps[static_cast<std::size_t>(kk)];
        bk.row(kk) = volterra_.load_z.row(s - 1);
        rk.row(kk) = volterra_.load_res.row(s - 1);
        bk(kk, s - 1) = 0.0;
        rk(kk, s - 1) = 0.0;
    }

    const Eigen::Index block = 4096;
    const Eigen::Index n_blocks = (m_z_ + block - 1) / block;
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < n_blocks; ++b) {
        const Eigen::Index lo = b * block;
        const Eigen::Index rows = std::min(block, m_z_ - lo);
        Eigen::MatrixXd zv(rows, n), res(rows, n);
        for (Eigen::Index u = 0; u < rows; ++u)
            for (int k = 0; k < n; ++k) {
                const std::uint64_t sid =
                    policy_.kind == StreamPolicy::Kind::FrozenPast
                        ? policy_.z_particle(static_cast<std::uint64_t>(lo + u), k + 1)
                        : static_cast<std::uint64_t>(lo + u);
                double z0, z1;
                rng_.pair(sid, static_cast<std::uint64_t>(k + 1), kStreamFactor0, z0, z1);
                zv(u, k) = z0;  // = first joint-factor output: vol-driver increment / sqrt(dt)
                rng_.pair(sid, static_cast<std::uint64_t>(k + 1), kStreamVolterraRes, z0, z1);
                res(u, k) = z0;
            }
        g_path_.middleRows(lo, rows).noalias() =
            zv * volterra_.load_z.transpose() + res * volterra_.load_res.transpose();
        g_cond_.middleRows(lo, rows).noalias() = zv * bk.transpose() + res * rk.transpose();
    }
}

void ModelSession::draw_step(int step, int knot_index) {
    switch (model_.kind()) {
        case VarianceKind::ConstVol: draw_const(step); break;
        case VarianceKind::RoughBergomi: draw_rough(step, knot_index); break;
        case VarianceKind::Bergomi2F: draw_bergomi(step, knot_index >= 0); break;
    }
}

void ModelSession::draw_rough(int step, int knot_index) {
    const auto& p = model_.rough_params();
    const auto& cs = model_.correlation();
    const double dt = grid_.dt;
    const double sdt = std::sqrt(dt);
    const double t = grid_.time(step);
    const double xi_t = p.xi0.at(t);
    const double var_g = volterra_.var_g[step - 1];
    const double level = xi_t * std::exp(-0.5 * var_g);
    const double xi_unc = std::log(xi_t) - 0.5 * var_g;
    const double th = model_.rates().long_run();
    const double pull = th * (1.0 - er_);
    const double sig_r = model_.rates().sigma;
    const double p0 = cs.proj[0], p1 = cs.proj[1];
    const double l10 = step_chol_(1, 0), l11 = step_chol_(1, 1);
    const double l20 = step_chol_(2, 0), l21 = step_chol_(2, 1), l22 = step_chol_(2, 2);

#pragma omp parallel for schedule(static)
    for (Eigen::Index u = 0; u < m_; ++u) {
        const std::uint64_t zu = policy_.z_particle(static_cast<std::uint64_t>(u), step);
        const Eigen::Index row = g_row(u);
        double zv, z1, z2, zpad;
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0, zv, z1);
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0 + 1, z2, zpad);
        const double dz_v = sdt * zv;  // row 0 of the factor is e_0
        const double dz_r = sdt * (l10 * zv + l11 * z1);
        const double ir = l20 * zv + l21 * z1 + l22 * z2;
        dw_par_[u] = p0 * dz_v + p1 * dz_r;
        r_next_[u] = er_ * r_[u] + pull + sig_r * ir;
        v_next_[u] = level * std::exp(g_path_(row, step - 1));
        if (knot_index >= 0) xi_tilde_[u] = xi_unc + g_cond_(row, knot_index);
    }
}

void ModelSession::draw_bergomi(int step, bool need_xi) {
    const auto& p = model_.bergomi_params();
    const auto& cs = model_.correlation();
    const double dt = grid_.dt;
    const double sdt = std::sqrt(dt);
    const double t = grid_.time(step);
    const double xi_t = p.xi0.at(t);
    const double a = p.nu * p.alpha();
    const double vx = (1.0 - std::exp(-2.0 * p.kappa_x * t)) / (2.0 * p.kappa_x);
    const double vy = (1.0 - std::exp(-2.0 * p.kappa_y * t)) / (2.0 * p.kappa_y);
    const double vxy =
        p.rho_xy * (1.0 - std::exp(-(p.kappa_x + p.kappa_y) * t)) / (p.kappa_x + p.kappa_y);
    const double nu_unc = a * a *
                          ((1.0 - p.theta) * (1.0 - p.theta) * vx + p.theta * p.theta * vy +
                           2.0 * p.theta * (1.0 - p.theta) * vxy);
    const double xi_unc = std::log(xi_t) - 0.5 * nu_unc;
    const double th = model_.rates().long_run();
    const double pull = th * (1.0 - er_);
    const double sig_r = model_.rates().sigma;
    const double wx = a * (1.0 - p.theta), wy = a * p.theta;

#pragma omp parallel for schedule(static)
    for (Eigen::Index u = 0; u < m_; ++u) {
        const std::uint64_t zu = policy_.z_particle(static_cast<std::uint64_t>(u), step);
        double z[6];
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0, z[0], z[1]);
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0 + 1, z[2], z[3]);
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0 + 2, z[4], z[5]);
        double eta[6];
        for (int i = 0; i < 6; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j) acc += step_chol_(i, j) * z[j];
            eta[i] = acc;
        }
        double dwp = 0.0;
        for (int b = 0; b < 3; ++b) dwp += cs.proj[b] * sdt * eta[b];
        dw_par_[u] = dwp;
        const double x_new = ex_ * ou_x_[u] + eta[3];
        const double y_new = ey_ * ou_y_[u] + eta[4];
        if (need_xi) xi_tilde_[u] = xi_unc + wx * ex_ * ou_x_[u] + wy * ey_ * ou_y_[u];
        ou_x_next_[u] = x_new;
        ou_y_next_[u] = y_new;
        r_next_[u] = er_ * r_[u] + pull + sig_r * eta[5];
        v_next_[u] = xi_t * std::exp(wx * x_new + wy * y_new - 0.5 * nu_unc);
    }
}

void ModelSession::draw_const(int step) {
    const auto& cs = model_.correlation();
    const double sdt = std::sqrt(grid_.dt);
    const double th = model_.rates().long_run();
    const double pull = th * (1.0 - er_);
    const double sig_r = model_.rates().sigma;
    const double l10 = step_chol_(1, 0), l11 = step_chol_(1, 1);
    const double p0 = cs.proj[0];

#pragma omp parallel for schedule(static)
    for (Eigen::Index u = 0; u < m_; ++u) {
        const std::uint64_t zu = policy_.z_particle(static_cast<std::uint64_t>(u), step);
        double zr, z1;
        rng_.pair(zu, static_cast<std::uint64_t>(step), kStreamFactor0, zr, z1);
        const double ir = l10 * zr + l11 * z1;
        dw_par_[u] = p0 * sdt * zr;
        r_next_[u] = er_ * r_[u] + pull + sig_r * ir;
    }
}

void ModelSession::advance() {
    v_.swap(v_next_);
    r_.swap(r_next_);
    if (model_.kind() == VarianceKind::Bergomi2F) {
        ou_x_.swap(ou_x_next_);
        ou_y_.swap(ou_y_next_);
    }
    if (model_.kind() == VarianceKind::ConstVol) v_next_ = v_;
}

LognormalStepParams ModelSession::lognormal_params(int step) const {
    LognormalStepParams out;
    switch (model_.kind()) {
        case VarianceKind::ConstVol:
            throw Error("lognormal conditional law requested for a non-lognormal model");
        case VarianceKind::RoughBergomi: {
            const auto& p = model_.rough_params();
            out.nu_tilde = volterra_.nu_tilde[step - 1];
            out.rho = p.rho_sv * volterra_.g_diag[step - 1] / std::sqrt(out.nu_tilde);
            out.nu_unc = volterra_.var_g[step - 1];
            out.xi_unc = std::log(p.xi0.at(grid_.time(step))) - 0.5 * out.nu_unc;
            break;
        }
        case VarianceKind::Bergomi2F: {
            const auto& p = model_.bergomi_params();
            const double t = grid_.time(step);
            const double a = p.nu * p.alpha();
            const double vx = (1.0 - std::exp(-2.0 * p.kappa_x * t)) / (2.0 * p.kappa_x);
            const double vy = (1.0 - std::exp(-2.0 * p.kappa_y * t)) / (2.0 * p.kappa_y);
            const double vxy = p.rho_xy * (1.0 - std::exp(-(p.kappa_x + p.kappa_y) * t)) /
                               (p.kappa_x + p.kappa_y);
            out.nu_tilde = nu_tilde_2f_;
            out.rho = rho_2f_;
            out.nu_unc = a * a *
                         ((1.0 - p.theta) * (1.0 - p.theta) * vx + p.theta * p.theta * vy +
                          2.0 * p.theta * (1.0 - p.theta) * vxy);
            out.xi_unc = std::log(p.xi0.at(t)) - 0.5 * out.nu_unc;
            break;
        }
    }
    return out;
}

DriverPaths simulate_drivers(const CorrelationStructure& cs, const TimeGrid& grid,
                             Eigen::Index n_particles, std::uint64_t seed) {
    const int n = cs.n();
    const int steps = grid.n_steps;
    const double sdt = std::sqrt(grid.dt);
    const double c_perp = std::sqrt(std::max(0.0, 1.0 - cs.rho_hat2)) * sdt;
    NormalStream rng(seed);

    DriverPaths out;
    out.dw.resize(n_particles, steps);
    out.dw_par.resize(n_particles, steps);
    out.dz.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(n_particles, steps));

#pragma omp parallel for schedule(static)
    for (Eigen::Index u = 0; u < n_particles; ++u) {
        Eigen::VectorXd zeta(n), dz(n);
        for (int k = 1; k <= steps; ++k) {
            for (int j = 0; j < n; j += 2) {
                double z0, z1;
                rng.pair(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(k),
                         kStreamFactor0 + static_cast<std::uint64_t>(j / 2), z0, z1);
                zeta[j] = z0;
                if (j + 1 < n) zeta[j + 1] = z1;
            }
            dz.noalias() = cs.chol_z * zeta * sdt;
            double dwp = 0.0;
            for (int j = 0; j < n; ++j) {
                out.dz[static_cast<std::size_t>(j)](u, k - 1) = dz[j];
                dwp += cs.proj[j] * dz[j];
            }
            double e0, e1;
            rng.pair(static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(k), 16, e0, e1);
            out.dw_par(u, k - 1) = dwp;
            out.dw(u, k - 1) = dwp + c_perp * e0;
        }
    }
    return out;
}

} // namespace lsv
