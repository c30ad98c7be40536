#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuelclust/kernels.hpp"
#include "fuelclust/samples.hpp"

namespace fuelclust {

struct GaussianComponent {
    double weight = 1.0;
    std::vector<double> mean;        ///< length d
    std::vector<double> covariance;  ///< d x d, row-major, symmetric positive definite
};

struct MixtureModel {
    std::size_t dimension = 1;
    std::vector<GaussianComponent> components;

    std::size_t k() const noexcept { return components.size(); }

    /// Throws InvalidArgument on empty models, inconsistent shapes or weights not summing to one.
    void check() const;
};

/// Soft assignment produced by the E-step.
struct Responsibilities {
    std::size_t rows = 0;
    std::size_t k = 0;
    std::vector<double> gamma;             ///< rows x k, row-major; each row sums to 1
    std::vector<double> effective_counts;  ///< column sums of gamma
    double log_likelihood = 0.0;           ///< sum_n ln p(x_n) under the model that produced gamma

    double at(std::size_t n, std::size_t j) const noexcept { return gamma[n * k + j]; }
};

enum class InitStrategy { quantile, kmeans_pp };

const char* to_string(InitStrategy strategy);
InitStrategy parse_init_strategy(const std::string& text);

struct EmConfig {
    std::uint64_t seed = 0;
    int max_iterations = 200;
    double tolerance = 1e-6;         ///< absolute change in total log-likelihood
    int n_restarts = 4;
    double covariance_floor = 1e-6;  ///< relative to the global per-dimension sample variance
    InitStrategy init = InitStrategy::quantile;
};

struct FitResult {
    MixtureModel model;
    std::vector<double> log_likelihood_trace;  ///< initial model first, then one entry per iteration
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
    std::size_t restart = 0;                   ///< index of the winning restart

    double log_likelihood() const { return log_likelihood_trace.back(); }
};

/// ln N(x | mean, covariance); covariance is d x d row-major.
double gaussian_log_density(std::span<const double> x, std::span<const double> mean,
                            std::span<const double> covariance);

/// p(x) = sum_j pi_j N(x | mu_j, Sigma_j), accumulated in log space.
double mixture_density(std::span<const double> x, const MixtureModel& model);

/// sum_n ln p(x_n).
double log_likelihood(const Samples& data, const MixtureModel& model);

Responsibilities e_step(const Samples& data, const MixtureModel& model);

/**
 * Re-estimates weights, means and covariances from responsibilities, in that order.
 * The covariance of every component then gets `covariance_floor * var_d` added to
 * its diagonal, where var_d is the population variance of dimension d over all
 * samples (1 when that variance is zero).
 *
 * Throws ComponentCollapse when a component's effective count is below epsilon.
 */
MixtureModel m_step(const Samples& data, const Responsibilities& resp, double covariance_floor = 1e-6);

/// Per-dimension amounts added to covariance diagonals for the given relative floor.
std::vector<double> covariance_floor_values(const Samples& data, double covariance_floor);

/// Starting model for EM. `quantile` ignores the seed.
MixtureModel init_model(const Samples& data, std::size_t k, InitStrategy strategy, std::uint64_t seed,
                        double covariance_floor = 1e-6);

/// EM with restarts; the restart with the highest final log-likelihood wins (lower index on ties).
FitResult fit_em(const Samples& data, std::size_t k, const EmConfig& config = {});

/// Hard labels by maximum responsibility, ties to the lower component index.
Assignment assign(const Samples& data, const MixtureModel& model);

/// One Gaussian per hard cluster: the M-step applied to one-hot responsibilities.
MixtureModel moment_model(const Samples& data, const Assignment& assignment, double covariance_floor = 1e-6);

/// Cholesky-factored form of a component, as consumed by the kernels.
kernels::ComponentFactor factor_component(const GaussianComponent& component, std::size_t dimension);

/// Seed of restart r derived from the base seed.
std::uint64_t restart_seed(std::uint64_t base, std::size_t restart);

nlohmann::ordered_json to_json(const MixtureModel& model);
nlohmann::ordered_json to_json(const FitResult& fit);
MixtureModel model_from_json(const nlohmann::json& j);

} // namespace fuelclust
