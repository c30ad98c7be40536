#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuelclust/samples.hpp"

namespace fuelclust {

/// How per-sample silhouette widths are reduced to one dataset score.
enum class SilhouetteMode {
    mean_samples,   ///< mean width over all samples (the usual definition)
    mean_clusters,  ///< mean over clusters of the per-cluster mean width
    max_clusters,   ///< largest per-cluster mean width
};

const char* to_string(SilhouetteMode mode);
SilhouetteMode parse_silhouette_mode(const std::string& text);

/// An index value that may be a +infinity sentinel for a degenerate clustering.
struct IndexValue {
    double value = 0.0;
    bool degenerate = false;
};

struct ValidityScores {
    std::size_t k = 0;
    double silhouette = 0.0;
    double calinski_harabasz = 0.0;
    double davies_bouldin = 0.0;
    bool silhouette_degenerate = false;
    bool calinski_harabasz_degenerate = false;
    bool davies_bouldin_degenerate = false;
};

struct ClusterGeometry {
    std::vector<std::vector<double>> centroids;
    std::vector<double> within_scatters;  ///< mean member-to-centroid Euclidean distance
    std::vector<std::size_t> sizes;
};

/// Centroids, mean scatter and sizes. Empty clusters get a zero centroid and size 0.
ClusterGeometry cluster_geometry(const Samples& data, const Assignment& assignment);

/// S_i = (b_i - a_i) / max(a_i, b_i); 0 for a singleton member.
double silhouette_width(std::size_t i, const Samples& data, const Assignment& assignment);

/// Widths of all samples (OpenMP kernel).
std::vector<double> silhouette_widths(const Samples& data, const Assignment& assignment);

double silhouette_index(const Samples& data, const Assignment& assignment,
                        SilhouetteMode mode = SilhouetteMode::mean_samples);

/// (BC / WC) * (N - K) / (K - 1); +infinity sentinel when WC is zero.
IndexValue calinski_harabasz(const Samples& data, const Assignment& assignment);

/// Mean over clusters of max_{j != i} (d_i + d_j) / |c_i - c_j|; +infinity sentinel on coincident centroids.
IndexValue davies_bouldin(const Samples& data, const Assignment& assignment);

/// All three indices at once.
ValidityScores score_clustering(const Samples& data, const Assignment& assignment,
                                SilhouetteMode mode = SilhouetteMode::mean_samples);

nlohmann::ordered_json to_json(const ValidityScores& scores);

} // namespace fuelclust
