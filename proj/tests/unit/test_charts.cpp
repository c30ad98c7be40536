#include <gtest/gtest.h>

#include <filesystem>
#include <regex>

#include "fuelclust/charts.hpp"
#include "fuelclust/error.hpp"
#include "support/synthetic.hpp"

using namespace fuelclust;

namespace {

std::vector<std::string> attribute_values(const std::string& svg, const std::string& element_class,
                                          const std::string& attribute) {
    const std::regex re("class=\"" + element_class + "\"[^>]*?" + attribute + "=\"([^\"]*)\"");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        out.push_back((*it)[1]);
    }
    return out;
}

std::size_t count(const std::string& svg, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

MixtureModel four_components() {
    MixtureModel m;
    m.components = {{0.1, {20}, {10}}, {0.5, {45}, {25}}, {0.3, {64}, {30}}, {0.1, {95}, {200}}};
    return m;
}

} // namespace

TEST(Charts, HistogramBarsMatchCounts) {
    const auto fleet = testsupport::reference_fleet(1);
    const auto h = histogram(fleet.table.efficiencies(), 10);
    const auto svg = render_svg({ChartKind::histogram, "t", "x", "y", HistogramPayload{h}, {}});
    const auto counts = attribute_values(svg, "bar", "data-count");
    ASSERT_EQ(counts.size(), 10U);
    for (std::size_t b = 0; b < 10; ++b) {
        EXPECT_EQ(counts[b], std::to_string(h.counts[b]));
    }
    const auto heights = attribute_values(svg, "bar", "height");
    const auto peak = std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin();
    for (std::size_t b = 0; b < 10; ++b) {
        EXPECT_NEAR(std::stod(heights[b]) / std::stod(heights[peak]),
                    static_cast<double>(h.counts[b]) / static_cast<double>(h.counts[peak]), 0.01);
    }
    EXPECT_EQ(svg.find("<script"), std::string::npos);
}

TEST(Charts, MixtureCurvesAndPointsShareColors) {
    const std::vector<double> values{15, 44, 47, 60, 66, 120};
    const std::vector<std::size_t> labels{0, 1, 1, 2, 2, 3};
    const auto palette = default_palette(4);
    const auto svg =
        render_svg({ChartKind::mixture_overlay, "t", "x", "y", MixtureOverlayPayload{four_components(), values, labels}, palette});
    EXPECT_EQ(count(svg, "class=\"curve\""), 4U);
    EXPECT_EQ(count(svg, "class=\"point\""), values.size());
    const std::regex curve_re("class=\"curve\" data-component=\"(\\d+)\" stroke=\"([^\"]+)\"");
    std::map<std::string, std::string> curve_color;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), curve_re); it != std::sregex_iterator(); ++it) {
        curve_color[(*it)[1]] = (*it)[2];
    }
    const std::regex point_re("class=\"point\" data-cluster=\"(\\d+)\"[^>]*fill=\"([^\"]+)\"");
    std::size_t points = 0;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), point_re); it != std::sregex_iterator(); ++it) {
        EXPECT_EQ(curve_color.at((*it)[1]), (*it)[2]);
        ++points;
    }
    EXPECT_EQ(points, values.size());
}

TEST(Charts, StackedBarsSumToHundredWithDashedAverages) {
    const auto f = testsupport::driver_fleet(12, 3, 1);
    const auto props = group_proportions(f.table, f.assignment, GroupKey::driver);
    const auto svg = render_svg({ChartKind::stacked_bars, "t", "x", "y", StackedBarsPayload{props}, default_palette(4)});
    const auto pct = attribute_values(svg, "segment", "data-percent");
    ASSERT_EQ(pct.size(), 12U * 4U);
    for (std::size_t g = 0; g < 12; ++g) {
        double s = 0;
        for (std::size_t c = 0; c < 4; ++c) {
            s += std::stod(pct[g * 4 + c]);
        }
        EXPECT_NEAR(s, 100.0, 1e-9);
    }
    EXPECT_EQ(count(svg, "class=\"average\""), 4U);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    const auto avg = attribute_values(svg, "average", "data-percent");
    for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_NEAR(std::stod(avg[c]), 100.0 * props.overall[c], 1e-9);
    }
}

TEST(Charts, BoxplotsShowOutliers) {
    const std::vector<double> v{1, 2, 3, 4, 100};
    auto r = boxplot_outliers(v);
    const auto svg = render_svg({ChartKind::boxplots, "t", "x", "y", BoxplotsPayload{{r}}, default_palette(1)});
    EXPECT_EQ(count(svg, "class=\"box\""), 1U);
    EXPECT_EQ(count(svg, "class=\"outlier\""), 1U);
}

TEST(Charts, DeterministicOutput) {
    const auto fleet = testsupport::reference_fleet(3);
    const auto v = fleet.table.efficiencies();
    MixtureOverlayPayload p{four_components(), v, fleet.truth};
    const ChartSpec spec{ChartKind::mixture_overlay, "t", "x", "y", p, default_palette(4)};
    EXPECT_EQ(render_svg(spec), render_svg(spec));
}

TEST(Charts, RejectsMismatchedSpecs) {
    const auto h = histogram({1, 2, 3}, 2);
    EXPECT_THROW(render_svg({ChartKind::boxplots, "t", "x", "y", HistogramPayload{h}, {}}), InvalidArgument);
    const std::vector<double> values{1, 2};
    const std::vector<std::size_t> labels{0, 3};
    EXPECT_THROW(render_svg({ChartKind::mixture_overlay, "t", "x", "y",
                             MixtureOverlayPayload{four_components(), values, labels}, default_palette(2)}),
                 InvalidArgument);
    EXPECT_THROW(render({ChartKind::histogram, "t", "x", "y", HistogramPayload{h}, {}},
                        "/nonexistent_dir_for_test/chart.svg"),
                 IoError);
}

TEST(CurveSamples, StandardNormalPeak) {
    MixtureModel m;
    m.components = {{1.0, {0.0}, {1.0}}};
    const auto c = curve_samples(m, -4, 4, 3);
    ASSERT_EQ(c.xs.size(), 3U);
    EXPECT_DOUBLE_EQ(c.xs[1], 0.0);
    EXPECT_NEAR(c.per_component[0][1], 0.3989423, 1e-7);
}

TEST(CurveSamples, SumEqualsMixtureDensity) {
    const auto m = four_components();
    const auto c = curve_samples(m, 0, 200, 101);
    for (std::size_t i = 0; i < c.xs.size(); ++i) {
        double s = 0;
        for (const auto& comp : c.per_component) {
            s += comp[i];
        }
        EXPECT_NEAR(s, mixture_density({&c.xs[i], 1}, m), 1e-12);
    }
}

TEST(CurveSamples, ZeroWeightAndErrors) {
    MixtureModel m;
    m.components = {{0.0, {0.0}, {1.0}}, {1.0, {3.0}, {1.0}}};
    const auto c = curve_samples(m, -1, 1, 5);
    for (double y : c.per_component[0]) {
        EXPECT_EQ(y, 0.0);
    }
    EXPECT_THROW(curve_samples(m, 1, 1, 5), InvalidArgument);
    EXPECT_THROW(curve_samples(m, 0, 1, 1), InvalidArgument);
    MixtureModel two_d;
    two_d.dimension = 2;
    two_d.components = {{1.0, {0, 0}, {1, 0, 0, 1}}};
    EXPECT_THROW(curve_samples(two_d, 0, 1, 3), InvalidArgument);
}
