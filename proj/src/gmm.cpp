#include "fuelclust/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fuelclust/error.hpp"

namespace fuelclust {

namespace {

constexpr double collapse_epsilon = 1e-8;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<kernels::ComponentFactor> factor_model(const MixtureModel& model) {
    std::vector<kernels::ComponentFactor> factors;
    factors.reserve(model.k());
    for (const auto& c : model.components) {
        factors.push_back(factor_component(c, model.dimension));
    }
    return factors;
}

void require_dimension(std::size_t got, std::size_t expected) {
    if (got != expected) {
        throw InvalidArgument("dimension mismatch: got " + std::to_string(got) + ", expected " +
                              std::to_string(expected));
    }
}

// Linear interpolation between order statistics of an ascending sequence.
double sorted_quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Population covariance over all samples plus the floor on the diagonal.
std::vector<double> global_covariance(const Samples& data, std::span<const double> floor) {
    const std::size_t dim = data.dim();
    const auto n = static_cast<double>(data.size());
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        for (std::size_t d = 0; d < dim; ++d) {
            mean[d] += x[d];
        }
    }
    for (auto& m : mean) {
        m /= n;
    }
    std::vector<double> cov(dim * dim, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                cov[r * dim + c] += (x[r] - mean[r]) * (x[c] - mean[c]);
            }
        }
    }
    for (auto& v : cov) {
        v /= n;
    }
    for (std::size_t d = 0; d < dim; ++d) {
        cov[d * dim + d] += floor[d];
    }
    return cov;
}

// Uniform double in [0, 1) from the top 53 bits, identical on every standard library.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> kmeans_pp_centers(const Samples& data, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = data.size();
    std::vector<std::size_t> centers;
    centers.push_back(std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n))));

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
        const auto c = data.row(centers.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            double d2 = 0.0;
            for (std::size_t d = 0; d < data.dim(); ++d) {
                d2 += (x[d] - c[d]) * (x[d] - c[d]);
            }
            nearest[i] = std::min(nearest[i], d2);
            total += nearest[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = unit_uniform(rng) * total;
            double running = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                running += nearest[i];
                if (running > target && nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // Every sample coincides with a chosen center.
            pick = std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n)));
        }
        centers.push_back(pick);
    }
    return centers;
}

struct RunResult {
    FitResult fit;
    bool collapsed = false;
};

RunResult run_em(const Samples& data, MixtureModel model, const EmConfig& config) {
    RunResult out;
    auto& fit = out.fit;
    try {
        auto resp = e_step(data, model);
        double current = resp.log_likelihood;
        fit.log_likelihood_trace.push_back(current);
        for (int it = 1; it <= config.max_iterations; ++it) {
            model = m_step(data, resp, config.covariance_floor);
            resp = e_step(data, model);
            fit.log_likelihood_trace.push_back(resp.log_likelihood);
            fit.iterations = it;
            if (std::fabs(resp.log_likelihood - current) < config.tolerance) {
                fit.converged = true;
                break;
            }
            current = resp.log_likelihood;
        }
    } catch (const ComponentCollapse&) {
        out.collapsed = true;
    } catch (const NotPositiveDefinite&) {
        out.collapsed = true;
    }
    fit.model = std::move(model);
    return out;
}

} // namespace

void MixtureModel::check() const {
    if (components.empty()) {
        throw InvalidArgument("mixture model has no components");
    }
    if (dimension == 0) {
        throw InvalidArgument("mixture model dimension must be positive");
    }
    double total = 0.0;
    for (const auto& c : components) {
        if (c.mean.size() != dimension || c.covariance.size() != dimension * dimension) {
            throw InvalidArgument("mixture component shape does not match model dimension");
        }
        if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
            throw InvalidArgument("mixture weight outside [0, 1]");
        }
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw InvalidArgument("mixture weights do not sum to one");
    }
}

const char* to_string(InitStrategy strategy) {
    return strategy == InitStrategy::quantile ? "quantile" : "kmeans_pp";
}

InitStrategy parse_init_strategy(const std::string& text) {
    if (text == "quantile") {
        return InitStrategy::quantile;
    }
    if (text == "kmeans_pp" || text == "kmeans++") {
        return InitStrategy::kmeans_pp;
    }
    throw InvalidArgument("unknown init strategy '" + text + "' (expected quantile or kmeans_pp)");
}

kernels::ComponentFactor factor_component(const GaussianComponent& component, std::size_t dimension) {
    require_dimension(component.mean.size(), dimension);
    if (component.covariance.size() != dimension * dimension) {
        throw InvalidArgument("covariance is not d x d");
    }
    kernels::ComponentFactor f;
    f.log_weight = component.weight > 0.0 ? std::log(component.weight) : -std::numeric_limits<double>::infinity();
    f.mean = component.mean;
    f.chol.assign(dimension * dimension, 0.0);

    double log_det_half = 0.0;
    if (dimension == 1) {
        const double var = component.covariance[0];
        if (!(var > 0.0) || !std::isfinite(var)) {
            throw NotPositiveDefinite("variance " + std::to_string(var) + " is not positive");
        }
        f.chol[0] = std::sqrt(var);
        log_det_half = std::log(f.chol[0]);
    } else {
        const Eigen::Map<const RowMatrix> cov(component.covariance.data(), static_cast<Eigen::Index>(dimension),
                                              static_cast<Eigen::Index>(dimension));
        Eigen::LLT<RowMatrix> llt(cov);
        if (llt.info() != Eigen::Success) {
            throw NotPositiveDefinite("covariance matrix is not positive definite");
        }
        const RowMatrix lower = llt.matrixL();
        for (std::size_t r = 0; r < dimension; ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                f.chol[r * dimension + c] = lower(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
            log_det_half += std::log(f.chol[r * dimension + r]);
        }
    }
    f.log_norm = -0.5 * static_cast<double>(dimension) * std::log(2.0 * std::numbers::pi) - log_det_half;
    return f;
}

double gaussian_log_density(std::span<const double> x, std::span<const double> mean,
                            std::span<const double> covariance) {
    require_dimension(x.size(), mean.size());
    GaussianComponent c{1.0, {mean.begin(), mean.end()}, {covariance.begin(), covariance.end()}};
    return kernels::component_log_density(x, factor_component(c, mean.size()));
}

double mixture_density(std::span<const double> x, const MixtureModel& model) {
    model.check();
    require_dimension(x.size(), model.dimension);
    const auto factors = factor_model(model);
    std::vector<double> terms;
    terms.reserve(factors.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& f : factors) {
        terms.push_back(f.log_weight + kernels::component_log_density(x, f));
        peak = std::max(peak, terms.back());
    }
    if (!std::isfinite(peak)) {
        return 0.0;
    }
    double total = 0.0;
    for (double t : terms) {
        total += std::exp(t - peak);
    }
    return std::exp(peak + std::log(total));
}

Responsibilities e_step(const Samples& data, const MixtureModel& model) {
    model.check();
    require_dimension(data.dim(), model.dimension);
    if (data.empty()) {
        throw InvalidArgument("e_step needs at least one sample");
    }
    const auto factors = factor_model(model);
    Responsibilities resp;
    resp.rows = data.size();
    resp.k = model.k();
    resp.gamma.resize(resp.rows * resp.k);
    std::vector<double> row_ll(resp.rows);
    kernels::omp::e_step_rows(data, factors, resp.gamma, row_ll);

    resp.effective_counts.assign(resp.k, 0.0);
    for (std::size_t n = 0; n < resp.rows; ++n) {
        for (std::size_t j = 0; j < resp.k; ++j) {
            resp.effective_counts[j] += resp.gamma[n * resp.k + j];
        }
    }
    double total = 0.0;
    for (double v : row_ll) {
        total += v;
    }
    resp.log_likelihood = total;
    return resp;
}

double log_likelihood(const Samples& data, const MixtureModel& model) {
    return e_step(data, model).log_likelihood;
}

std::vector<double> covariance_floor_values(const Samples& data, double covariance_floor) {
    const std::size_t dim = data.dim();
    std::vector<double> out(dim, covariance_floor);
    if (data.empty()) {
        return out;
    }
    const auto n = static_cast<double>(data.size());
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            mean += data.row(i)[d];
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double delta = data.row(i)[d] - mean;
            var += delta * delta;
        }
        var /= n;
        out[d] = covariance_floor * (var > 0.0 ? var : 1.0);
    }
    return out;
}

MixtureModel m_step(const Samples& data, const Responsibilities& resp, double covariance_floor) {
    if (resp.rows != data.size()) {
        throw InvalidArgument("responsibilities do not match the number of samples");
    }
    const std::size_t dim = data.dim();
    const std::size_t k = resp.k;
    const auto n_total = static_cast<double>(data.size());
    const auto floor = covariance_floor_values(data, covariance_floor);

    MixtureModel model;
    model.dimension = dim;
    model.components.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        double nj = 0.0;
        for (std::size_t n = 0; n < resp.rows; ++n) {
            nj += resp.at(n, j);
        }
        if (!(nj >= collapse_epsilon)) {
            throw ComponentCollapse(j);
        }
        auto& comp = model.components[j];
        comp.weight = nj / n_total;

        comp.mean.assign(dim, 0.0);
        for (std::size_t n = 0; n < resp.rows; ++n) {
            const double g = resp.at(n, j);
            const auto x = data.row(n);
            for (std::size_t d = 0; d < dim; ++d) {
                comp.mean[d] += g * x[d];
            }
        }
        for (auto& m : comp.mean) {
            m /= nj;
        }

        comp.covariance.assign(dim * dim, 0.0);
        for (std::size_t n = 0; n < resp.rows; ++n) {
            const double g = resp.at(n, j);
            const auto x = data.row(n);
            for (std::size_t r = 0; r < dim; ++r) {
                const double dr = x[r] - comp.mean[r];
                for (std::size_t c = 0; c <= r; ++c) {
                    comp.covariance[r * dim + c] += g * dr * (x[c] - comp.mean[c]);
                }
            }
        }
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                const double v = comp.covariance[r * dim + c] / nj;
                comp.covariance[r * dim + c] = v;
                comp.covariance[c * dim + r] = v;
            }
            comp.covariance[r * dim + r] += floor[r];
        }
        // Validates positive definiteness.
        (void)factor_component(comp, dim);
    }
    return model;
}

MixtureModel init_model(const Samples& data, std::size_t k, InitStrategy strategy, std::uint64_t seed,
                        double covariance_floor) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    if (k > data.size()) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of samples (" +
                              std::to_string(data.size()) + ")");
    }
    const std::size_t dim = data.dim();
    const auto floor = covariance_floor_values(data, covariance_floor);
    const auto cov = global_covariance(data, floor);

    MixtureModel model;
    model.dimension = dim;
    model.components.resize(k);
    for (auto& c : model.components) {
        c.weight = 1.0 / static_cast<double>(k);
        c.covariance = cov;
        c.mean.assign(dim, 0.0);
    }

    if (strategy == InitStrategy::quantile) {
        std::vector<double> column(data.size());
        for (std::size_t d = 0; d < dim; ++d) {
            for (std::size_t i = 0; i < data.size(); ++i) {
                column[i] = data.row(i)[d];
            }
            std::sort(column.begin(), column.end());
            for (std::size_t j = 0; j < k; ++j) {
                const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
                model.components[j].mean[d] = sorted_quantile(column, q);
            }
        }
    } else {
        const auto centers = kmeans_pp_centers(data, k, seed);
        for (std::size_t j = 0; j < k; ++j) {
            const auto x = data.row(centers[j]);
            model.components[j].mean.assign(x.begin(), x.end());
        }
    }
    return model;
}

std::uint64_t restart_seed(std::uint64_t base, std::size_t restart) {
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(restart) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

FitResult fit_em(const Samples& data, std::size_t k, const EmConfig& config) {
    if (k == 0) {
        throw InvalidArgument("k must be at least 1");
    }
    if (k > data.size()) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of samples (" +
                              std::to_string(data.size()) + ")");
    }
    const std::size_t restarts = static_cast<std::size_t>(std::max(1, config.n_restarts));

    std::optional<FitResult> best;
    for (std::size_t r = 0; r < restarts; ++r) {
        // The first restart uses the configured strategy; later ones need randomness to differ.
        const auto strategy = r == 0 ? config.init : InitStrategy::kmeans_pp;
        const auto seed = restart_seed(config.seed, r);
        auto run = run_em(data, init_model(data, k, strategy, seed, config.covariance_floor), config);
        if (run.collapsed) {
            continue;
        }
        run.fit.restart = r;
        if (!best || run.fit.log_likelihood() > best->log_likelihood()) {
            best = std::move(run.fit);
        }
    }
    if (!best) {
        throw FitFailure("all " + std::to_string(restarts) + " EM restarts collapsed for k = " + std::to_string(k));
    }
    best->seed = config.seed;
    return std::move(*best);
}

Assignment assign(const Samples& data, const MixtureModel& model) {
    const auto resp = e_step(data, model);
    Assignment out;
    out.k = model.k();
    out.labels.resize(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < out.k; ++j) {
            if (resp.at(n, j) > resp.at(n, best)) {
                best = j;
            }
        }
        out.labels[n] = best;
    }
    return out;
}

MixtureModel moment_model(const Samples& data, const Assignment& assignment, double covariance_floor) {
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    assignment.check();
    Responsibilities resp;
    resp.rows = data.size();
    resp.k = assignment.k;
    resp.gamma.assign(resp.rows * resp.k, 0.0);
    resp.effective_counts.assign(resp.k, 0.0);
    for (std::size_t n = 0; n < resp.rows; ++n) {
        resp.gamma[n * resp.k + assignment.labels[n]] = 1.0;
        resp.effective_counts[assignment.labels[n]] += 1.0;
    }
    return m_step(data, resp, covariance_floor);
}

nlohmann::ordered_json to_json(const MixtureModel& model) {
    nlohmann::ordered_json j;
    j["dimension"] = model.dimension;
    auto comps = nlohmann::ordered_json::array();
    for (const auto& c : model.components) {
        nlohmann::ordered_json item;
        item["weight"] = c.weight;
        item["mean"] = c.mean;
        auto cov = nlohmann::ordered_json::array();
        for (std::size_t r = 0; r < model.dimension; ++r) {
            cov.push_back(std::vector<double>(c.covariance.begin() + static_cast<std::ptrdiff_t>(r * model.dimension),
                                              c.covariance.begin() +
                                                  static_cast<std::ptrdiff_t>((r + 1) * model.dimension)));
        }
        item["covariance"] = std::move(cov);
        comps.push_back(std::move(item));
    }
    j["components"] = std::move(comps);
    return j;
}

nlohmann::ordered_json to_json(const FitResult& fit) {
    auto j = to_json(fit.model);
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["seed"] = fit.seed;
    j["log_likelihood"] = fit.log_likelihood();
    return j;
}

MixtureModel model_from_json(const nlohmann::json& j) {
    MixtureModel model;
    try {
        model.dimension = j.at("dimension").get<std::size_t>();
        for (const auto& item : j.at("components")) {
            GaussianComponent c;
            c.weight = item.at("weight").get<double>();
            c.mean = item.at("mean").get<std::vector<double>>();
            for (const auto& row : item.at("covariance")) {
                for (const auto& v : row) {
                    c.covariance.push_back(v.get<double>());
                }
            }
            model.components.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed mixture model JSON: ") + e.what());
    }
    model.check();
    return model;
}

} // namespace fuelclust
