#pragma once

#include <Eigen/Core>

namespace lsv {

/// Zero-coupon bond curve, log-linear in ZCB between tenors, ZCB(0) = 1.
class DiscountCurve {
public:
    DiscountCurve() = default;

    /// tenors strictly increasing and positive; zcb strictly positive.
    DiscountCurve(Eigen::ArrayXd tenors, Eigen::ArrayXd zcb);

    /// Flat continuously-compounded rate.
    static DiscountCurve flat(double rate, double horizon = 50.0);

    double zcb(double t) const;

    /// Mean short rate r̄_t = -d/dt log ZCB(t), centered finite difference
    /// (one-sided at t = 0).
    double mean_short_rate(double t) const;

    double max_tenor() const { return t_[t_.size() - 1]; }
    const Eigen::ArrayXd& tenors() const { return t_; }

private:
    double log_zcb(double t) const;

    Eigen::ArrayXd t_;       // with 0 prepended
    Eigen::ArrayXd log_z_;   // log ZCB at t_, log_z_[0] = 0
};

} // namespace lsv
