#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "fuelclust/analysis.hpp"
#include "fuelclust/gmm.hpp"
#include "fuelclust/ingest.hpp"

namespace fuelclust {

enum class ChartKind { histogram, mixture_overlay, stacked_bars, boxplots };

const char* to_string(ChartKind kind);

struct HistogramPayload {
    Histogram histogram;
};

/// Component j of the model is drawn in the color of cluster j.
struct MixtureOverlayPayload {
    MixtureModel model;
    std::vector<double> values;
    std::vector<std::size_t> labels;
};

struct StackedBarsPayload {
    ProportionTable proportions;
    std::size_t max_groups = 50;  ///< only the first groups are drawn
};

struct BoxplotsPayload {
    std::vector<OutlierReport> clusters;
};

using ChartPayload = std::variant<HistogramPayload, MixtureOverlayPayload, StackedBarsPayload, BoxplotsPayload>;

using Palette = std::map<std::size_t, std::string>;

struct ChartSpec {
    ChartKind kind = ChartKind::histogram;
    std::string title;
    std::string x_label;
    std::string y_label;
    ChartPayload payload;
    Palette palette;
};

/// Fixed colors keyed by cluster id; ids past the base list cycle through it.
Palette default_palette(std::size_t clusters);

/// Weighted component densities pi_j N(x | mu_j, Sigma_j) at evenly spaced x.
struct CurveSamples {
    std::vector<double> xs;
    std::vector<std::vector<double>> per_component;  ///< [component][point]
};

CurveSamples curve_samples(const MixtureModel& model, double lo, double hi, std::size_t points);

/// Self-contained SVG 1.1 document. Throws InvalidArgument when payload and kind disagree
/// or the palette misses a cluster id.
std::string render_svg(const ChartSpec& spec);

/// render_svg written to a file; IoError when it cannot be written.
void render(const ChartSpec& spec, const std::filesystem::path& out);

} // namespace fuelclust
