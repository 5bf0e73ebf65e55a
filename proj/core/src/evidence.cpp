#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kcd/stats.hpp"

namespace kcd::stats {

FisherResult fisher_combine(std::span<const double> pvals) {
    if (pvals.empty()) throw std::invalid_argument("Fisher combination of zero p-values");
    FisherResult out;
    out.k = pvals.size();
    double sum = 0.0;
    for (double p : pvals) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
        if (p < kFisherFloor) {
            ++out.clamped;
            p = kFisherFloor;
        }
        sum += std::log(p);
    }
    out.statistic = -2.0 * sum;
    out.p_value = chi2_sf(out.statistic, 2.0 * static_cast<double>(out.k));
    return out;
}

BiasPersistence bias_persistence(double max_bias, int rounds) {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    BiasPersistence out;
    out.expected = std::exp2(-static_cast<double>(rounds) / 3.0);
    out.ratio = max_bias / out.expected;
    out.flag = out.ratio >= kBiasPersistenceFactor;
    return out;
}

}  // namespace kcd::stats
