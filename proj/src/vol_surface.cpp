#include "lsv/vol_surface.hpp"

#include <cmath>
#include <sstream>

#include "lsv/black.hpp"
#include "lsv/errors.hpp"

namespace lsv {

double SviSlice::total_var(double k) const {
    const double u = k - m;
    return a + b * (rho * u + std::sqrt(u * u + sigma * sigma));
}

double SviSlice::dk(double k) const {
    const double u = k - m;
    return b * (rho + u / std::sqrt(u * u + sigma * sigma));
}

double SviSlice::dk2(double k) const {
    const double u = k - m;
    const double r = std::sqrt(u * u + sigma * sigma);
    return b * sigma * sigma / (r * r * r);
}

ImpliedVolSurface::ImpliedVolSurface(double spot, DiscountCurve curve, std::vector<VolSlice> slices)
    : spot_(spot), curve_(std::move(curve)), slices_(std::move(slices)) {
    if (spot_ <= 0.0) throw ValidationError("ImpliedVolSurface: spot must be positive");
    if (slices_.empty()) throw ValidationError("ImpliedVolSurface: no slices");
    double prev_t = 0.0;
    for (const auto& s : slices_) {
        if (!(s.maturity > prev_t))
            throw ValidationError("ImpliedVolSurface: maturities must be strictly increasing");
        prev_t = s.maturity;
        if (s.strikes.size() != s.vols.size() || s.strikes.size() < 1)
            throw ValidationError("ImpliedVolSurface: mismatched strike/vol grids");
        for (Eigen::Index j = 0; j < s.strikes.size(); ++j) {
            if (!(s.strikes[j] > 0.0)) throw ValidationError("ImpliedVolSurface: strikes must be positive");
            if (j > 0 && !(s.strikes[j] > s.strikes[j - 1]))
                throw ValidationError("ImpliedVolSurface: strikes must be strictly increasing");
            if (!(s.vols[j] > 0.0)) {
                std::ostringstream os;
                os << "ImpliedVolSurface: non-positive vol at (K=" << s.strikes[j]
                   << ", T=" << s.maturity << ")";
                throw ValidationError(os.str());
            }
        }
    }
    forwards_.reserve(slices_.size());
    w_of_k_.reserve(slices_.size());
    for (const auto& s : slices_) {
        const double fwd = forward(s.maturity);
        forwards_.push_back(fwd);
        Eigen::ArrayXd k(s.strikes.size()), w(s.strikes.size());
        for (Eigen::Index j = 0; j < s.strikes.size(); ++j) {
            k[j] = std::log(s.strikes[j] / fwd);
            w[j] = s.vols[j] * s.vols[j] * s.maturity;
        }
        w_of_k_.emplace_back(std::move(k), std::move(w), Extrapolation::Flat);
    }
    validate();
}

void ImpliedVolSurface::validate() const {
    // Static no-arbitrage on the quoted grid: discounted call prices must be
    // decreasing and convex in strike (slopes in [-ZCB, 0], non-decreasing).
    const double tol = 1e-9 * spot_;
    for (std::size_t i = 0; i < slices_.size(); ++i) {
        const auto& s = slices_[i];
        if (s.strikes.size() < 2) continue;
        const double df = curve_.zcb(s.maturity);
        const double fwd = forwards_[i];
        double prev_slope = -df;
        for (Eigen::Index j = 0; j + 1 < s.strikes.size(); ++j) {
            const double c0 = df * black_call_w(fwd, s.strikes[j], s.vols[j] * s.vols[j] * s.maturity);
            const double c1 =
                df * black_call_w(fwd, s.strikes[j + 1], s.vols[j + 1] * s.vols[j + 1] * s.maturity);
            const double slope = (c1 - c0) / (s.strikes[j + 1] - s.strikes[j]);
            if (slope > tol || slope < -df - tol || slope < prev_slope - tol / spot_) {
                std::ostringstream os;
                os << "ImpliedVolSurface: arbitrage violation between strikes " << s.strikes[j]
                   << " and " << s.strikes[j + 1] << " at T=" << s.maturity;
                throw ValidationError(os.str());
            }
            prev_slope = slope;
        }
    }
}

void ImpliedVolSurface::slice_var(int i, double k, double& w, double& wk, double& wkk) const {
    const auto& sp = w_of_k_[static_cast<std::size_t>(i)];
    w = sp(k);
    wk = sp.derivative(k);
    wkk = sp.second_derivative(k);
}

ImpliedVolSurface::VarJet ImpliedVolSurface::var_jet(double strike, double maturity) const {
    if (!(strike > 0.0) || !(maturity > 0.0))
        throw ValidationError("ImpliedVolSurface: strike and maturity must be positive");
    const double k = std::log(strike / forward(maturity));
    const int n = static_cast<int>(slices_.size());

    // locate bracketing slices
    int hi = 0;
    while (hi < n && slices_[static_cast<std::size_t>(hi)].maturity < maturity - 1e-14) ++hi;

    VarJet jet{};
    if (hi == 0) {
        // below the first maturity: w linear from w(.,0) = 0
        double w1, wk1, wkk1;
        slice_var(0, k, w1, wk1, wkk1);
        const double t1 = slices_[0].maturity;
        const double f = maturity / t1;
        jet.w = f * w1;
        jet.dk = f * wk1;
        jet.dk2 = f * wkk1;
        jet.dt = w1 / t1;
        return jet;
    }
    if (hi == n) {
        // beyond the last maturity: continue the last inter-slice slope
        double wA, wkA, wkkA, wB, wkB, wkkB;
        slice_var(n - 2 >= 0 ? n - 2 : 0, k, wA, wkA, wkkA);
        slice_var(n - 1, k, wB, wkB, wkkB);
        const double tA = n >= 2 ? slices_[static_cast<std::size_t>(n - 2)].maturity : 0.0;
        const double tB = slices_[static_cast<std::size_t>(n - 1)].maturity;
        const double slope = n >= 2 ? (wB - wA) / (tB - tA) : wB / tB;
        const double slope_k = n >= 2 ? (wkB - wkA) / (tB - tA) : wkB / tB;
        const double slope_k2 = n >= 2 ? (wkkB - wkkA) / (tB - tA) : wkkB / tB;
        const double dtau = maturity - tB;
        jet.w = wB + std::max(slope, 0.0) * dtau;
        jet.dk = wkB + slope_k * dtau;
        jet.dk2 = wkkB + slope_k2 * dtau;
        jet.dt = std::max(slope, 0.0);
        return jet;
    }
    const int lo = hi - 1;
    const double tA = slices_[static_cast<std::size_t>(lo)].maturity;
    const double tB = slices_[static_cast<std::size_t>(hi)].maturity;
    double wA, wkA, wkkA, wB, wkB, wkkB;
    slice_var(lo, k, wA, wkA, wkkA);
    slice_var(hi, k, wB, wkB, wkkB);
    const double f = (maturity - tA) / (tB - tA);
    jet.w = (1.0 - f) * wA + f * wB;
    jet.dk = (1.0 - f) * wkA + f * wkB;
    jet.dk2 = (1.0 - f) * wkkA + f * wkkB;
    jet.dt = (wB - wA) / (tB - tA);
    return jet;
}

double ImpliedVolSurface::total_var(double strike, double maturity) const {
    return var_jet(strike, maturity).w;
}

double ImpliedVolSurface::vol(double strike, double maturity) const {
    return std::sqrt(total_var(strike, maturity) / maturity);
}

double ImpliedVolSurface::call(double strike, double maturity) const {
    return curve_.zcb(maturity) * black_call_w(forward(maturity), strike, total_var(strike, maturity));
}

void check_svi_density(const SviSlice& s) {
    if (!(s.b >= 0.0) || !(std::abs(s.rho) < 1.0) || !(s.sigma > 0.0))
        throw ValidationError("SviSlice: need b >= 0, |rho| < 1, sigma > 0");
    const double w_min = s.a + s.b * s.sigma * std::sqrt(1.0 - s.rho * s.rho);
    if (!(w_min > 0.0)) throw ValidationError("SviSlice: minimum total variance must be positive");
    // numeric density scan: g(k) >= 0 up to tolerance on a wide grid
    for (int i = 0; i <= 400; ++i) {
        const double k = -2.0 + 4.0 * i / 400.0;
        const double w = s.total_var(k);
        const double wk = s.dk(k);
        const double wkk = s.dk2(k);
        const double half_kwk_w = k * wk / (2.0 * w);
        const double g = (1.0 - half_kwk_w) * (1.0 - half_kwk_w) -
                         0.25 * wk * wk * (1.0 / w + 0.25) + 0.5 * wkk;
        if (g < -1e-10) {
            std::ostringstream os;
            os << "SviSlice T=" << s.maturity << ": negative density at k=" << k << " (g=" << g << ")";
            throw ValidationError(os.str());
        }
    }
}

ImpliedVolSurface synthesize_surface(const SyntheticSurfaceSpec& spec, const DiscountCurve& curve) {
    if (spec.slices.empty()) throw ValidationError("SyntheticSurfaceSpec: no slices");
    if (!(spec.k_max > spec.k_min) || spec.n_strikes < 3)
        throw ValidationError("SyntheticSurfaceSpec: bad strike grid");
    for (const auto& s : spec.slices) check_svi_density(s);
    // calendar scan at fixed log-moneyness
    for (std::size_t i = 1; i < spec.slices.size(); ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double k = -1.5 + 3.0 * j / 100.0;
            if (spec.slices[i].total_var(k) < spec.slices[i - 1].total_var(k) - 1e-12) {
                std::ostringstream os;
                os << "SyntheticSurfaceSpec: calendar arbitrage between T="
                   << spec.slices[i - 1].maturity << " and T=" << spec.slices[i].maturity
                   << " at k=" << k;
                throw ValidationError(os.str());
            }
        }
    }
    std::vector<VolSlice> out;
    out.reserve(spec.slices.size());
    for (const auto& s : spec.slices) {
        const double fwd = spec.spot / curve.zcb(s.maturity);
        VolSlice v;
        v.maturity = s.maturity;
        v.strikes.resize(spec.n_strikes);
        v.vols.resize(spec.n_strikes);
        for (int j = 0; j < spec.n_strikes; ++j) {
            const double k = spec.k_min + (spec.k_max - spec.k_min) * j / (spec.n_strikes - 1);
            v.strikes[j] = fwd * std::exp(k);
            v.vols[j] = std::sqrt(s.total_var(k) / s.maturity);
        }
        out.push_back(std::move(v));
    }
    return ImpliedVolSurface(spec.spot, curve, std::move(out));
}

} // namespace lsv
