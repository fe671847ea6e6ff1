#pragma once

#include <cmath>

namespace lsv {

template <class T>
T norm_cdf(T x) {
    return T(0.5) * std::erfc(-x * T(0.70710678118654752440084436210485));
}

template <class T>
T norm_pdf(T x) {
    return T(0.39894228040143267793994605993438) * std::exp(T(-0.5) * x * x);
}

/// Undiscounted Black call on forward F with total implied variance w = σ²T.
template <class T>
T black_call_w(T forward, T strike, T total_var) {
    if (total_var <= T(0)) return std::max(forward - strike, T(0));
    const T s = std::sqrt(total_var);
    const T d1 = std::log(forward / strike) / s + T(0.5) * s;
    return forward * norm_cdf(d1) - strike * norm_cdf(d1 - s);
}

template <class T>
T black_call(T forward, T strike, T vol, T expiry, T discount) {
    return discount * black_call_w(forward, strike, vol * vol * expiry);
}

template <class T>
T black_put(T forward, T strike, T vol, T expiry, T discount) {
    return black_call(forward, strike, vol, expiry, discount) - discount * (forward - strike);
}

/// dC/dσ (discounted).
template <class T>
T black_vega(T forward, T strike, T vol, T expiry, T discount) {
    const T s = vol * std::sqrt(expiry);
    if (s <= T(0)) return T(0);
    const T d1 = std::log(forward / strike) / s + T(0.5) * s;
    return discount * forward * norm_pdf(d1) * std::sqrt(expiry);
}

/// Black implied volatility via safeguarded Newton (bisection fallback).
/// Throws ValidationError when the price violates static bounds.
double implied_vol_black(double price, double forward, double strike, double expiry,
                         double discount, double tol = 1e-12);

} // namespace lsv
