#include <cmath>
#include <vector>

#include "fuelclust/error.hpp"
#include "fuelclust/kernels.hpp"
#include "kernel_rows.hpp"

namespace fuelclust::kernels {

double component_log_density(std::span<const double> x, const ComponentFactor& factor) {
    const std::size_t dim = x.size();
    if (dim == 1) {
        const double z = (x[0] - factor.mean[0]) / factor.chol[0];
        return factor.log_norm - 0.5 * z * z;
    }
    // Forward substitution L z = x - mu; the Mahalanobis term is |z|^2.
    double z_buf[16];
    std::vector<double> z_heap;
    double* z = z_buf;
    if (dim > 16) {
        z_heap.resize(dim);
        z = z_heap.data();
    }
    double quad = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        double acc = x[r] - factor.mean[r];
        for (std::size_t c = 0; c < r; ++c) {
            acc -= factor.chol[r * dim + c] * z[c];
        }
        z[r] = acc / factor.chol[r * dim + r];
        quad += z[r] * z[r];
    }
    return factor.log_norm - 0.5 * quad;
}

namespace serial {

void e_step_rows(const Samples& data, std::span<const ComponentFactor> factors, std::span<double> resp,
                 std::span<double> row_log_density) {
    const std::size_t k = factors.size();
    for (std::size_t n = 0; n < data.size(); ++n) {
        row_log_density[n] = detail::e_step_row(data.row(n), factors, resp.data() + n * k);
    }
}

void silhouette_widths(const Samples& data, std::span<const std::size_t> labels, std::size_t k,
                       std::span<double> widths) {
    const auto sizes = detail::cluster_sizes(labels, k);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < data.size(); ++i) {
        widths[i] = detail::silhouette_row(data, labels, sizes, i, sums.data());
    }
}

} // namespace serial

} // namespace fuelclust::kernels
