#include "mmgof/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mmgof/error.hpp"

namespace mmgof {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};

std::string escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    const double rounded = std::round(v * 100.0) / 100.0;
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, rounded == 0.0 ? 0.0 : rounded);
    return std::string(buf, ptr);
}

}  // namespace

std::string svg_chart(const std::vector<Series>& series, const ChartLabels& labels, double reference) {
    double x_min = 0.0, x_max = 1.0;
    bool first = true;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) fail(ErrorKind::Shape, "series '" + s.name + "' has mismatched x and y");
        for (double x : s.x) {
            if (!std::isfinite(x)) continue;
            x_min = first ? x : std::min(x_min, x);
            x_max = first ? x : std::max(x_max, x);
            first = false;
        }
    }
    if (x_max <= x_min) x_max = x_min + 1.0;
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * plot_h; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           escape(labels.title) + "</text>\n";

    // Frame, ticks and axis labels.
    out += "<g stroke=\"black\" fill=\"none\" stroke-width=\"1\">\n";
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
           "\"/>\n";
    out += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = i / 5.0;
        out += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
               num(py(y)) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + num(y) + "</text>\n";
        const double x = x_min + (x_max - x_min) * i / 5.0;
        out += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(px(x)) + "\" y2=\"" +
               num(kTop + plot_h + 4) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(px(x)) + "\" y=\"" + num(kTop + plot_h + 17) + "\" text-anchor=\"middle\">" + num(x) +
               "</text>\n";
    }
    out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) + "\" text-anchor=\"middle\">" +
           escape(labels.x_axis) + "</text>\n";
    out += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(kTop + plot_h / 2) + ")\">" + escape(labels.y_axis) + "</text>\n";
    out += "</g>\n";

    if (reference > 0.0 && reference < 1.0) {
        out += "<line class=\"reference\" x1=\"" + num(kLeft) + "\" y1=\"" + num(py(reference)) + "\" x2=\"" +
               num(kLeft + plot_w) + "\" y2=\"" + num(py(reference)) +
               "\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto* color = kColors[s % std::size(kColors)];
        std::string points;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(series[s].y[i])) continue;
            if (!points.empty()) points += ' ';
            points += num(px(series[s].x[i])) + "," + num(py(series[s].y[i]));
        }
        out += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        const double ly = kTop + 12 + 18.0 * static_cast<double>(s);
        out += "<line x1=\"" + num(kWidth - kRight + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kWidth - kRight + 32) +
               "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + num(kWidth - kRight + 38) + "\" y=\"" + num(ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[s].name) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace mmgof
