#include "lsv/leverage_surface.hpp"

#include <sstream>

#include "lsv/errors.hpp"

namespace lsv {

LeverageSurface::LeverageSurface(Eigen::ArrayXd knot_times, Eigen::ArrayXd strikes)
    : knot_times_(std::move(knot_times)), strikes_(std::move(strikes)) {
    if (knot_times_.size() < 1 || knot_times_[0] != 0.0)
        throw ValidationError("LeverageSurface: knot times must start at 0");
    for (Eigen::Index i = 1; i < knot_times_.size(); ++i)
        if (!(knot_times_[i] > knot_times_[i - 1]))
            throw ValidationError("LeverageSurface: knot times must be strictly increasing");
    if (strikes_.size() < 2) throw ValidationError("LeverageSurface: need at least two strikes");
    for (Eigen::Index j = 1; j < strikes_.size(); ++j)
        if (!(strikes_[j] > strikes_[j - 1]))
            throw ValidationError("LeverageSurface: strikes must be strictly increasing");
    slices_.resize(static_cast<std::size_t>(knot_times_.size()));
    values_.resize(static_cast<std::size_t>(knot_times_.size()));
    set_.assign(static_cast<std::size_t>(knot_times_.size()), false);
}

void LeverageSurface::set_slice(int index, const Eigen::ArrayXd& lambda) {
    if (index < 0 || index >= n_slices()) throw ValidationError("LeverageSurface: slice index");
    if (lambda.size() != strikes_.size())
        throw ValidationError("LeverageSurface: slice size mismatch");
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
        if (!(lambda[j] > 0.0) || !std::isfinite(lambda[j])) {
            std::ostringstream os;
            os << "LeverageSurface: non-positive leverage at slice " << index << ", strike "
               << strikes_[j];
            throw ValidationError(os.str());
        }
    slices_[static_cast<std::size_t>(index)] = CubicSpline(strikes_, lambda);
    values_[static_cast<std::size_t>(index)] = lambda;
    set_[static_cast<std::size_t>(index)] = true;
}

const Eigen::ArrayXd& LeverageSurface::slice_values(int index) const {
    if (!slice_set(index)) throw Error("LeverageSurface: slice not set");
    return values_[static_cast<std::size_t>(index)];
}

int LeverageSurface::slice_index(double t) const {
    int lo = 0;
    for (Eigen::Index i = 1; i < knot_times_.size() && knot_times_[i] <= t; ++i) lo = static_cast<int>(i);
    return lo;
}

double LeverageSurface::value(double spot, double t) const {
    const int idx = slice_index(t);
    if (!set_[static_cast<std::size_t>(idx)]) throw Error("LeverageSurface: slice not set");
    return slices_[static_cast<std::size_t>(idx)](spot);
}

} // namespace lsv
