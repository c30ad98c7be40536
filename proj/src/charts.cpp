#include "fuelclust/charts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "fuelclust/error.hpp"
#include "fuelclust/format.hpp"

namespace fuelclust {

namespace {

constexpr double width = 900.0;
constexpr double height = 520.0;
constexpr double margin_left = 80.0;
constexpr double margin_right = 130.0;
constexpr double margin_top = 50.0;
constexpr double margin_bottom = 70.0;
constexpr double plot_w = width - margin_left - margin_right;
constexpr double plot_h = height - margin_top - margin_bottom;
constexpr const char* font = "font-family=\"DejaVu Sans, Arial, sans-serif\"";

std::string num(double v) {
    return fmt::fixed(v, 2);
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Maps data coordinates onto the plot area.
struct Frame {
    double x_lo, x_hi, y_lo, y_hi;

    double x(double v) const { return margin_left + (v - x_lo) / (x_hi - x_lo) * plot_w; }
    double y(double v) const { return margin_top + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h; }
};

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0;
    if (norm <= 1.0) {
        step = 1.0;
    } else if (norm <= 2.0) {
        step = 2.0;
    } else if (norm <= 5.0) {
        step = 5.0;
    }
    return step * mag;
}

std::string tick_label(double v, double step) {
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step)));
    return fmt::fixed(v, decimals);
}

void open_document(std::ostringstream& out, const ChartSpec& spec) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\" data-kind=\""
        << to_string(spec.kind) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" " << font << ">"
        << escape(spec.title) << "</text>\n";
}

void draw_axes(std::ostringstream& out, const ChartSpec& spec, const Frame& f, bool x_ticks) {
    const double x0 = margin_left;
    const double y0 = margin_top + plot_h;
    out << "<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0 + plot_w) << "\" y2=\""
        << num(y0) << "\"/>\n";
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(margin_top) << "\" x2=\"" << num(x0) << "\" y2=\""
        << num(y0) << "\"/>\n";
    out << "</g>\n";

    out << "<g class=\"ticks\" font-size=\"11\" " << font << ">\n";
    const double ystep = nice_step(f.y_hi - f.y_lo, 5);
    for (double v = std::ceil(f.y_lo / ystep) * ystep; v <= f.y_hi + ystep * 1e-9; v += ystep) {
        const double y = f.y(v);
        out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
            << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << num(x0 - 7) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
            << tick_label(v, ystep) << "</text>\n";
    }
    if (x_ticks) {
        const double xstep = nice_step(f.x_hi - f.x_lo, 8);
        for (double v = std::ceil(f.x_lo / xstep) * xstep; v <= f.x_hi + xstep * 1e-9; v += xstep) {
            const double x = f.x(v);
            out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\""
                << num(y0 + 4) << "\" stroke=\"#000000\"/>\n";
            out << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
                << tick_label(v, xstep) << "</text>\n";
        }
    }
    out << "</g>\n";

    out << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\"" << num(height - 18)
        << "\" text-anchor=\"middle\" font-size=\"13\" " << font << ">" << escape(spec.x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << num(margin_top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
        << font << " transform=\"rotate(-90 20 " << num(margin_top + plot_h / 2) << ")\">" << escape(spec.y_label)
        << "</text>\n";
}

void draw_legend(std::ostringstream& out, const Palette& palette, std::size_t clusters, const std::string& prefix) {
    const double x = margin_left + plot_w + 20;
    out << "<g class=\"legend\" font-size=\"12\" " << font << ">\n";
    for (std::size_t c = 0; c < clusters; ++c) {
        const double y = margin_top + 10 + 20 * static_cast<double>(c);
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 10) << "\" width=\"12\" height=\"12\" fill=\""
            << palette.at(c) << "\"/>\n";
        out << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y) << "\">" << prefix << c << "</text>\n";
    }
    out << "</g>\n";
}

void require_palette(const Palette& palette, std::size_t clusters) {
    for (std::size_t c = 0; c < clusters; ++c) {
        if (palette.find(c) == palette.end()) {
            throw InvalidArgument("palette has no color for cluster " + std::to_string(c));
        }
    }
}

// Deterministic jitter in [0, 1) keyed by sample index.
double jitter(std::size_t index) {
    std::uint64_t z = static_cast<std::uint64_t>(index) + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

void render_histogram(std::ostringstream& out, const ChartSpec& spec, const HistogramPayload& p) {
    const auto& h = p.histogram;
    if (h.counts.empty() || h.bin_edges.size() != h.counts.size() + 1) {
        throw InvalidArgument("histogram payload is malformed");
    }
    const auto peak = static_cast<double>(*std::max_element(h.counts.begin(), h.counts.end()));
    Frame f{h.bin_edges.front(), h.bin_edges.back(), 0.0, peak > 0 ? peak * 1.1 : 1.0};
    draw_axes(out, spec, f, true);
    out << "<g class=\"bars\" fill=\"#add8e6\" stroke=\"#4a7ca8\" stroke-width=\"1\">\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double x0 = f.x(h.bin_edges[b]);
        const double x1 = f.x(h.bin_edges[b + 1]);
        const double top = f.y(static_cast<double>(h.counts[b]));
        out << "<rect class=\"bar\" data-count=\"" << h.counts[b] << "\" x=\"" << num(x0) << "\" y=\"" << num(top)
            << "\" width=\"" << num(x1 - x0) << "\" height=\"" << num(f.y(0.0) - top) << "\"/>\n";
    }
    out << "</g>\n";
}

void render_mixture(std::ostringstream& out, const ChartSpec& spec, const MixtureOverlayPayload& p) {
    if (p.model.dimension != 1) {
        throw InvalidArgument("mixture overlay needs a one-dimensional model");
    }
    if (p.values.size() != p.labels.size() || p.values.empty()) {
        throw InvalidArgument("mixture overlay values and labels must be non-empty and aligned");
    }
    const std::size_t k = p.model.k();
    for (auto label : p.labels) {
        if (label >= k) {
            throw InvalidArgument("mixture overlay label has no matching component");
        }
    }
    require_palette(spec.palette, k);

    auto [lo_it, hi_it] = std::minmax_element(p.values.begin(), p.values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
    lo -= pad;
    hi += pad;
    const auto curves = curve_samples(p.model, lo, hi, 400);
    double peak = 0.0;
    for (const auto& c : curves.per_component) {
        peak = std::max(peak, *std::max_element(c.begin(), c.end()));
    }
    Frame f{lo, hi, 0.0, peak > 0 ? peak * 1.15 : 1.0};
    draw_axes(out, spec, f, true);

    out << "<g class=\"curves\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t j = 0; j < k; ++j) {
        out << "<path class=\"curve\" data-component=\"" << j << "\" stroke=\"" << spec.palette.at(j) << "\" d=\"";
        for (std::size_t i = 0; i < curves.xs.size(); ++i) {
            out << (i == 0 ? "M" : " L") << num(f.x(curves.xs[i])) << "," << num(f.y(curves.per_component[j][i]));
        }
        out << "\"/>\n";
    }
    out << "</g>\n";

    // Points sit just above the x axis, spread vertically by a per-index jitter.
    const double band = 0.06 * (f.y_hi - f.y_lo);
    out << "<g class=\"points\" fill-opacity=\"0.7\">\n";
    for (std::size_t n = 0; n < p.values.size(); ++n) {
        const double y = f.y(band * (0.15 + 0.85 * jitter(n)));
        out << "<circle class=\"point\" data-cluster=\"" << p.labels[n] << "\" cx=\"" << num(f.x(p.values[n]))
            << "\" cy=\"" << num(y) << "\" r=\"2\" fill=\"" << spec.palette.at(p.labels[n]) << "\"/>\n";
    }
    out << "</g>\n";
    draw_legend(out, spec.palette, k, "Cluster ");
}

void render_stacked(std::ostringstream& out, const ChartSpec& spec, const StackedBarsPayload& p) {
    const auto& props = p.proportions;
    const std::size_t k = props.k;
    require_palette(spec.palette, k);
    const std::size_t groups = std::min(props.rows.size(), p.max_groups);
    Frame f{0.0, static_cast<double>(std::max<std::size_t>(groups, 1)), 0.0, 100.0};
    draw_axes(out, spec, f, false);

    const double slot = plot_w / static_cast<double>(std::max<std::size_t>(groups, 1));
    const double bar_w = slot * 0.8;
    out << "<g class=\"bars\">\n";
    for (std::size_t g = 0; g < groups; ++g) {
        const double x = margin_left + slot * static_cast<double>(g) + (slot - bar_w) / 2;
        double base = 0.0;
        out << "<g class=\"stack\" data-group=\"" << escape(props.group_ids[g]) << "\">\n";
        for (std::size_t c = 0; c < k; ++c) {
            const double pct = 100.0 * props.rows[g][c];
            const double top = f.y(base + pct);
            out << "<rect class=\"segment\" data-cluster=\"" << c << "\" data-percent=\"" << fmt::shortest(pct)
                << "\" x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(bar_w) << "\" height=\""
                << num(f.y(base) - top) << "\" fill=\"" << spec.palette.at(c) << "\"/>\n";
            base += pct;
        }
        out << "</g>\n";
        out << "<text x=\"" << num(x + bar_w / 2) << "\" y=\"" << num(margin_top + plot_h + 12)
            << "\" font-size=\"8\" text-anchor=\"end\" " << font << " transform=\"rotate(-60 " << num(x + bar_w / 2)
            << " " << num(margin_top + plot_h + 12) << ")\">" << escape(props.group_ids[g]) << "</text>\n";
    }
    out << "</g>\n";

    // Dashed line per cluster at the upper edge of its overall share in the stack.
    out << "<g class=\"averages\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\">\n";
    double cumulative = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        cumulative += 100.0 * props.overall[c];
        const double y = f.y(cumulative);
        out << "<line class=\"average\" data-cluster=\"" << c << "\" data-percent=\""
            << fmt::shortest(100.0 * props.overall[c]) << "\" x1=\"" << num(margin_left) << "\" y1=\"" << num(y)
            << "\" x2=\"" << num(margin_left + plot_w) << "\" y2=\"" << num(y) << "\" stroke=\""
            << spec.palette.at(c) << "\"/>\n";
    }
    out << "</g>\n";
    draw_legend(out, spec.palette, k, "C");
}

void render_boxplots(std::ostringstream& out, const ChartSpec& spec, const BoxplotsPayload& p) {
    if (p.clusters.empty()) {
        throw InvalidArgument("boxplot payload has no clusters");
    }
    std::size_t max_id = 0;
    double lo = p.clusters.front().q1;
    double hi = p.clusters.front().q3;
    for (const auto& r : p.clusters) {
        max_id = std::max(max_id, r.cluster_id);
        lo = std::min({lo, r.whisker_low, r.q1});
        hi = std::max({hi, r.whisker_high, r.q3});
        for (double v : r.outlier_values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    require_palette(spec.palette, max_id + 1);
    const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
    Frame f{0.0, static_cast<double>(p.clusters.size()), lo - pad, hi + pad};
    draw_axes(out, spec, f, false);

    const double slot = plot_w / static_cast<double>(p.clusters.size());
    const double box_w = std::min(slot * 0.5, 80.0);
    for (std::size_t i = 0; i < p.clusters.size(); ++i) {
        const auto& r = p.clusters[i];
        const double cx = margin_left + slot * (static_cast<double>(i) + 0.5);
        const std::string& color = spec.palette.at(r.cluster_id);
        out << "<g class=\"boxplot\" data-cluster=\"" << r.cluster_id << "\" stroke=\"#000000\" stroke-width=\"1\">\n";
        out << "<line class=\"whisker\" x1=\"" << num(cx) << "\" y1=\"" << num(f.y(r.whisker_low)) << "\" x2=\""
            << num(cx) << "\" y2=\"" << num(f.y(r.q1)) << "\"/>\n";
        out << "<line class=\"whisker\" x1=\"" << num(cx) << "\" y1=\"" << num(f.y(r.q3)) << "\" x2=\"" << num(cx)
            << "\" y2=\"" << num(f.y(r.whisker_high)) << "\"/>\n";
        for (double w : {r.whisker_low, r.whisker_high}) {
            out << "<line class=\"cap\" x1=\"" << num(cx - box_w / 4) << "\" y1=\"" << num(f.y(w)) << "\" x2=\""
                << num(cx + box_w / 4) << "\" y2=\"" << num(f.y(w)) << "\"/>\n";
        }
        out << "<rect class=\"box\" x=\"" << num(cx - box_w / 2) << "\" y=\"" << num(f.y(r.q3)) << "\" width=\""
            << num(box_w) << "\" height=\"" << num(f.y(r.q1) - f.y(r.q3)) << "\" fill=\"" << color << "\"/>\n";
        out << "<line class=\"median\" x1=\"" << num(cx - box_w / 2) << "\" y1=\"" << num(f.y(r.median))
            << "\" x2=\"" << num(cx + box_w / 2) << "\" y2=\"" << num(f.y(r.median)) << "\" stroke-width=\"2\"/>\n";
        for (double v : r.outlier_values) {
            out << "<circle class=\"outlier\" cx=\"" << num(cx) << "\" cy=\"" << num(f.y(v))
                << "\" r=\"3\" fill=\"none\"/>\n";
        }
        out << "</g>\n";
        out << "<text x=\"" << num(cx) << "\" y=\"" << num(margin_top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"12\" " << font << ">Cluster " << r.cluster_id << "</text>\n";
    }
}

} // namespace

const char* to_string(ChartKind kind) {
    switch (kind) {
    case ChartKind::histogram:
        return "histogram";
    case ChartKind::mixture_overlay:
        return "mixture_overlay";
    case ChartKind::stacked_bars:
        return "stacked_bars";
    case ChartKind::boxplots:
        return "boxplots";
    }
    return "unknown";
}

Palette default_palette(std::size_t clusters) {
    // Orange, green, purple, brown first, then a few distinct extras.
    static const char* base[] = {"#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e6c229",
                                 "#1f77b4", "#d62728", "#17becf", "#7f7f7f", "#bcbd22"};
    constexpr std::size_t base_size = sizeof(base) / sizeof(base[0]);
    Palette palette;
    for (std::size_t c = 0; c < clusters; ++c) {
        palette[c] = base[c % base_size];
    }
    return palette;
}

CurveSamples curve_samples(const MixtureModel& model, double lo, double hi, std::size_t points) {
    if (model.dimension != 1) {
        throw InvalidArgument("curve sampling needs a one-dimensional model");
    }
    if (points < 2) {
        throw InvalidArgument("curve sampling needs at least two points");
    }
    if (!(hi > lo)) {
        throw InvalidArgument("curve sampling range is empty");
    }
    model.check();
    CurveSamples out;
    out.xs.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        out.xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    out.per_component.assign(model.k(), std::vector<double>(points, 0.0));
    for (std::size_t j = 0; j < model.k(); ++j) {
        const auto& comp = model.components[j];
        if (comp.weight == 0.0) {
            continue;
        }
        const auto factor = factor_component(comp, 1);
        for (std::size_t i = 0; i < points; ++i) {
            const double x[1] = {out.xs[i]};
            out.per_component[j][i] = std::exp(factor.log_weight + kernels::component_log_density(x, factor));
        }
    }
    return out;
}

std::string render_svg(const ChartSpec& spec) {
    std::ostringstream out;
    open_document(out, spec);
    switch (spec.kind) {
    case ChartKind::histogram:
        if (const auto* p = std::get_if<HistogramPayload>(&spec.payload)) {
            render_histogram(out, spec, *p);
            break;
        }
        throw InvalidArgument("histogram chart needs a histogram payload");
    case ChartKind::mixture_overlay:
        if (const auto* p = std::get_if<MixtureOverlayPayload>(&spec.payload)) {
            render_mixture(out, spec, *p);
            break;
        }
        throw InvalidArgument("mixture overlay chart needs a mixture payload");
    case ChartKind::stacked_bars:
        if (const auto* p = std::get_if<StackedBarsPayload>(&spec.payload)) {
            render_stacked(out, spec, *p);
            break;
        }
        throw InvalidArgument("stacked bar chart needs a proportion payload");
    case ChartKind::boxplots:
        if (const auto* p = std::get_if<BoxplotsPayload>(&spec.payload)) {
            render_boxplots(out, spec, *p);
            break;
        }
        throw InvalidArgument("boxplot chart needs a boxplot payload");
    }
    out << "</svg>\n";
    return out.str();
}

void render(const ChartSpec& spec, const std::filesystem::path& out) {
    fmt::write_file(out, render_svg(spec));
}

} // namespace fuelclust
