#include "lsv/discount_curve.hpp"

#include <cmath>

#include "lsv/errors.hpp"

namespace lsv {

DiscountCurve::DiscountCurve(Eigen::ArrayXd tenors, Eigen::ArrayXd zcb) {
    if (tenors.size() != zcb.size() || tenors.size() < 1)
        throw ValidationError("DiscountCurve: mismatched or empty tenor/zcb grids");
    double prev = 0.0;
    for (Eigen::Index i = 0; i < tenors.size(); ++i) {
        if (!(tenors[i] > prev))
            throw ValidationError("DiscountCurve: tenors must be strictly increasing and positive");
        if (!(zcb[i] > 0.0)) throw ValidationError("DiscountCurve: ZCB must be strictly positive");
        prev = tenors[i];
    }
    t_.resize(tenors.size() + 1);
    log_z_.resize(tenors.size() + 1);
    t_[0] = 0.0;
    log_z_[0] = 0.0;
    for (Eigen::Index i = 0; i < tenors.size(); ++i) {
        t_[i + 1] = tenors[i];
        log_z_[i + 1] = std::log(zcb[i]);
    }
}

DiscountCurve DiscountCurve::flat(double rate, double horizon) {
    Eigen::ArrayXd t(1), z(1);
    t[0] = horizon;
    z[0] = std::exp(-rate * horizon);
    return DiscountCurve(t, z);
}

double DiscountCurve::log_zcb(double t) const {
    if (t <= 0.0) return 0.0;
    const Eigen::Index n = t_.size();
    if (t >= t_[n - 1]) {
        // continue the last forward rate
        const double slope = (log_z_[n - 1] - log_z_[n - 2]) / (t_[n - 1] - t_[n - 2]);
        return log_z_[n - 1] + slope * (t - t_[n - 1]);
    }
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (t_[mid] <= t ? lo : hi) = mid;
    }
    const double w = (t - t_[lo]) / (t_[lo + 1] - t_[lo]);
    return (1.0 - w) * log_z_[lo] + w * log_z_[lo + 1];
}

double DiscountCurve::zcb(double t) const { return std::exp(log_zcb(t)); }

double DiscountCurve::mean_short_rate(double t) const {
    if (t < 0.0) throw ValidationError("mean_short_rate: negative time");
    const double eps = 1e-6;
    if (t < eps) return -(log_zcb(t + eps) - log_zcb(t)) / eps;
    return -(log_zcb(t + eps) - log_zcb(t - eps)) / (2.0 * eps);
}

} // namespace lsv
