#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fuelclust/kernels.hpp"
#include "kernel_rows.hpp"

namespace fuelclust::kernels::omp {

namespace {

// Below this many rows the fork/join cost outweighs the work.
constexpr std::int64_t parallel_min_rows = 256;

} // namespace

void e_step_rows(const Samples& data, std::span<const ComponentFactor> factors, std::span<double> resp,
                 std::span<double> row_log_density) {
    const std::size_t k = factors.size();
    const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(static) if (n >= parallel_min_rows)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto row = static_cast<std::size_t>(i);
        row_log_density[row] = detail::e_step_row(data.row(row), factors, resp.data() + row * k);
    }
}

void silhouette_widths(const Samples& data, std::span<const std::size_t> labels, std::size_t k,
                       std::span<double> widths) {
    const auto sizes = detail::cluster_sizes(labels, k);
    const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel if (n >= parallel_min_rows)
    {
        std::vector<double> sums(k);
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < n; ++i) {
            widths[static_cast<std::size_t>(i)] =
                detail::silhouette_row(data, labels, sizes, static_cast<std::size_t>(i), sums.data());
        }
    }
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace fuelclust::kernels::omp
