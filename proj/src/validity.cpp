#include "fuelclust/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuelclust/error.hpp"
#include "fuelclust/kernels.hpp"
#include "kernel_rows.hpp"

namespace fuelclust {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

void require_partition(const Samples& data, const Assignment& assignment) {
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    if (assignment.k < 2) {
        throw InvalidArgument("validity indices need at least two clusters");
    }
    assignment.check();
}

void require_non_empty(const Assignment& assignment) {
    for (auto size : assignment.sizes()) {
        if (size == 0) {
            throw InvalidArgument("validity index requested for a clustering with an empty cluster");
        }
    }
}

double squared(const std::vector<double>& a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        acc += (a[d] - b[d]) * (a[d] - b[d]);
    }
    return acc;
}

double euclidean(const std::vector<double>& a, std::span<const double> b) {
    return std::sqrt(squared(a, b));
}

} // namespace

const char* to_string(SilhouetteMode mode) {
    switch (mode) {
    case SilhouetteMode::mean_samples:
        return "mean_samples";
    case SilhouetteMode::mean_clusters:
        return "mean_clusters";
    case SilhouetteMode::max_clusters:
        return "max_clusters";
    }
    return "unknown";
}

SilhouetteMode parse_silhouette_mode(const std::string& text) {
    if (text == "mean_samples") {
        return SilhouetteMode::mean_samples;
    }
    if (text == "mean_clusters") {
        return SilhouetteMode::mean_clusters;
    }
    if (text == "max_clusters") {
        return SilhouetteMode::max_clusters;
    }
    throw InvalidArgument("unknown silhouette mode '" + text + "'");
}

ClusterGeometry cluster_geometry(const Samples& data, const Assignment& assignment) {
    if (assignment.size() != data.size()) {
        throw InvalidArgument("assignment does not match the number of samples");
    }
    assignment.check();
    const std::size_t k = assignment.k;
    const std::size_t dim = data.dim();
    ClusterGeometry g;
    g.sizes = assignment.sizes();
    g.centroids.assign(k, std::vector<double>(dim, 0.0));
    g.within_scatters.assign(k, 0.0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.row(n);
        auto& c = g.centroids[assignment.labels[n]];
        for (std::size_t d = 0; d < dim; ++d) {
            c[d] += x[d];
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (g.sizes[i] > 0) {
            for (auto& v : g.centroids[i]) {
                v /= static_cast<double>(g.sizes[i]);
            }
        }
    }
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto label = assignment.labels[n];
        g.within_scatters[label] += euclidean(g.centroids[label], data.row(n));
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (g.sizes[i] > 0) {
            g.within_scatters[i] /= static_cast<double>(g.sizes[i]);
        }
    }
    return g;
}

double silhouette_width(std::size_t i, const Samples& data, const Assignment& assignment) {
    require_partition(data, assignment);
    if (i >= data.size()) {
        throw InvalidArgument("sample index out of range");
    }
    const auto sizes = assignment.sizes();
    std::vector<double> sums(assignment.k);
    return kernels::detail::silhouette_row(data, assignment.labels, sizes, i, sums.data());
}

std::vector<double> silhouette_widths(const Samples& data, const Assignment& assignment) {
    require_partition(data, assignment);
    std::vector<double> widths(data.size());
    kernels::omp::silhouette_widths(data, assignment.labels, assignment.k, widths);
    return widths;
}

double silhouette_index(const Samples& data, const Assignment& assignment, SilhouetteMode mode) {
    require_partition(data, assignment);
    require_non_empty(assignment);
    const auto widths = silhouette_widths(data, assignment);

    if (mode == SilhouetteMode::mean_samples) {
        double total = 0.0;
        for (double w : widths) {
            total += w;
        }
        return total / static_cast<double>(widths.size());
    }

    const auto sizes = assignment.sizes();
    std::vector<double> per_cluster(assignment.k, 0.0);
    for (std::size_t n = 0; n < widths.size(); ++n) {
        per_cluster[assignment.labels[n]] += widths[n];
    }
    for (std::size_t c = 0; c < assignment.k; ++c) {
        per_cluster[c] /= static_cast<double>(sizes[c]);
    }
    if (mode == SilhouetteMode::max_clusters) {
        return *std::max_element(per_cluster.begin(), per_cluster.end());
    }
    double total = 0.0;
    for (double v : per_cluster) {
        total += v;
    }
    return total / static_cast<double>(assignment.k);
}

IndexValue calinski_harabasz(const Samples& data, const Assignment& assignment) {
    require_partition(data, assignment);
    require_non_empty(assignment);
    const auto geometry = cluster_geometry(data, assignment);
    const std::size_t dim = data.dim();

    std::vector<double> overall(dim, 0.0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.row(n);
        for (std::size_t d = 0; d < dim; ++d) {
            overall[d] += x[d];
        }
    }
    for (auto& v : overall) {
        v /= static_cast<double>(data.size());
    }

    double between = 0.0;
    for (std::size_t i = 0; i < assignment.k; ++i) {
        between += static_cast<double>(geometry.sizes[i]) * squared(overall, geometry.centroids[i]);
    }
    double within = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        within += squared(geometry.centroids[assignment.labels[n]], data.row(n));
    }
    if (!(within > 0.0)) {
        return {infinity, true};
    }
    const auto n = static_cast<double>(data.size());
    const auto k = static_cast<double>(assignment.k);
    return {(between / within) * ((n - k) / (k - 1.0)), false};
}

IndexValue davies_bouldin(const Samples& data, const Assignment& assignment) {
    require_partition(data, assignment);
    require_non_empty(assignment);
    const auto geometry = cluster_geometry(data, assignment);
    const std::size_t k = assignment.k;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) {
                continue;
            }
            const double separation = euclidean(geometry.centroids[i], geometry.centroids[j]);
            if (!(separation > 0.0)) {
                return {infinity, true};
            }
            worst = std::max(worst, (geometry.within_scatters[i] + geometry.within_scatters[j]) / separation);
        }
        total += worst;
    }
    return {total / static_cast<double>(k), false};
}

ValidityScores score_clustering(const Samples& data, const Assignment& assignment, SilhouetteMode mode) {
    ValidityScores s;
    s.k = assignment.k;
    s.silhouette = silhouette_index(data, assignment, mode);
    const auto chi = calinski_harabasz(data, assignment);
    const auto dbi = davies_bouldin(data, assignment);
    s.calinski_harabasz = chi.value;
    s.calinski_harabasz_degenerate = chi.degenerate;
    s.davies_bouldin = dbi.value;
    s.davies_bouldin_degenerate = dbi.degenerate;
    return s;
}

nlohmann::ordered_json to_json(const ValidityScores& scores) {
    auto number = [](double v, bool degenerate) -> nlohmann::ordered_json {
        if (degenerate || !std::isfinite(v)) {
            return nullptr;
        }
        return v;
    };
    nlohmann::ordered_json j;
    j["k"] = scores.k;
    j["si"] = number(scores.silhouette, scores.silhouette_degenerate);
    j["chi"] = number(scores.calinski_harabasz, scores.calinski_harabasz_degenerate);
    j["dbi"] = number(scores.davies_bouldin, scores.davies_bouldin_degenerate);
    j["si_degenerate"] = scores.silhouette_degenerate;
    j["chi_degenerate"] = scores.calinski_harabasz_degenerate;
    j["dbi_degenerate"] = scores.davies_bouldin_degenerate;
    return j;
}

} // namespace fuelclust
