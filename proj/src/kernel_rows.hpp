#pragma once

// Row bodies shared by the serial and OpenMP kernels.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "fuelclust/kernels.hpp"

namespace fuelclust::kernels::detail {

inline double e_step_row(std::span<const double> x, std::span<const ComponentFactor> factors, double* resp_row) {
    const std::size_t k = factors.size();
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        const double w = factors[j].log_weight + component_log_density(x, factors[j]);
        resp_row[j] = w;
        peak = std::max(peak, w);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        resp_row[j] = std::exp(resp_row[j] - peak);
        total += resp_row[j];
    }
    for (std::size_t j = 0; j < k; ++j) {
        resp_row[j] /= total;
    }
    return peak + std::log(total);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() == 1) {
        return std::fabs(a[0] - b[0]);
    }
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double delta = a[d] - b[d];
        acc += delta * delta;
    }
    return std::sqrt(acc);
}

// sums must have room for k entries.
inline double silhouette_row(const Samples& data, std::span<const std::size_t> labels,
                             std::span<const std::size_t> sizes, std::size_t i, double* sums) {
    const std::size_t k = sizes.size();
    const std::size_t own = labels[i];
    if (sizes[own] <= 1) {
        return 0.0;
    }
    std::fill(sums, sums + k, 0.0);
    const auto xi = data.row(i);
    for (std::size_t j = 0; j < data.size(); ++j) {
        sums[labels[j]] += distance(xi, data.row(j));
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        if (c != own && sizes[c] > 0) {
            b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        }
    }
    const double scale = std::max(a, b);
    if (!(scale > 0.0) || !std::isfinite(b)) {
        return 0.0;
    }
    return (b - a) / scale;
}

inline std::vector<std::size_t> cluster_sizes(std::span<const std::size_t> labels, std::size_t k) {
    std::vector<std::size_t> sizes(k, 0);
    for (auto label : labels) {
        ++sizes[label];
    }
    return sizes;
}

} // namespace fuelclust::kernels::detail
