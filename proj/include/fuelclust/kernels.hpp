#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fuelclust/samples.hpp"

/**
 * @file kernels.hpp
 *
 * Data-parallel inner loops of the pipeline. Every kernel exists twice with the same
 * signature: `serial::` is the plain reference loop and `omp::` splits the outer
 * sample loop across OpenMP threads. Each output row depends only on its own input
 * row, so both variants produce bit-identical results for any thread count.
 */
namespace fuelclust::kernels {

/// Precomputed per-component terms for evaluating ln(pi_j N(x | mu_j, Sigma_j)).
struct ComponentFactor {
    double log_weight = 0.0;   ///< ln pi_j, -inf for an empty component
    double log_norm = 0.0;     ///< -d/2 ln(2 pi) - 1/2 ln|Sigma_j|
    std::vector<double> mean;  ///< length d
    std::vector<double> chol;  ///< lower Cholesky factor of Sigma_j, row-major d x d
};

/// ln N(x | mu, Sigma) from a factored component (the weight is not included).
double component_log_density(std::span<const double> x, const ComponentFactor& factor);

namespace serial {

/**
 * E-step over all rows.
 *
 * @param[out] resp N x K row-major responsibilities; each row sums to one.
 * @param[out] row_log_density ln p(x_n) for each row.
 */
void e_step_rows(const Samples& data, std::span<const ComponentFactor> factors, std::span<double> resp,
                 std::span<double> row_log_density);

/// Silhouette width of every sample. Singleton members get 0.
void silhouette_widths(const Samples& data, std::span<const std::size_t> labels, std::size_t k,
                       std::span<double> widths);

} // namespace serial

namespace omp {

void e_step_rows(const Samples& data, std::span<const ComponentFactor> factors, std::span<double> resp,
                 std::span<double> row_log_density);

void silhouette_widths(const Samples& data, std::span<const std::size_t> labels, std::size_t k,
                       std::span<double> widths);

/// Threads OpenMP would use for a parallel region, 1 when built without OpenMP.
int max_threads();

} // namespace omp

} // namespace fuelclust::kernels
