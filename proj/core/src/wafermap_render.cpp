#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "trapqa/yieldmap.hpp"

namespace trapqa {

std::string_view outcome_color(FailureCode code) {
    switch (code) {
        case FailureCode::Pass: return "#2e9e44";
        case FailureCode::ContinuityFail: return "#7b3fa0";
        case FailureCode::LeakDcRf: return "#e6c200";
        case FailureCode::LeakDcDc: return "#f08c00";
        case FailureCode::LeakDcGnd: return "#8b0000";
        case FailureCode::LeakRf: return "#d81b60";
        case FailureCode::HwFail: return "#808080";
        case FailureCode::ResFailDc: return "#1e88e5";
        case FailureCode::ResFailRf: return "#00acc1";
        case FailureCode::ResFailTs: return "#5e35b1";
    }
    return "#000000";
}

namespace {

void appendf(std::string& out, const char* fmt, auto... args) {
    char buf[512];
    const int n = std::snprintf(buf, sizeof buf, fmt, args...);
    out.append(buf, static_cast<std::size_t>(std::clamp(n, 0, static_cast<int>(sizeof buf) - 1)));
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
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

}  // namespace

std::string render_svg(const WaferResult& result, const RenderOptions& options) {
    validate(result);
    const WaferLayout& layout = result.layout;
    const double s = options.pixels_per_mm;
    const double r_mm = layout.radius() * 1e3;
    const double margin = 20.0;
    const double legend_w = 190.0;
    const double map = 2.0 * r_mm * s;
    const double width = map + 2.0 * margin + legend_w;
    const double height = std::max(map + 2.0 * margin, 360.0);
    const double cx = margin + r_mm * s;
    const double cy = margin + r_mm * s;
    auto px = [&](double x_m) { return cx + x_m * 1e3 * s; };
    auto py = [&](double y_m) { return cy - y_m * 1e3 * s; };

    std::string out;
    appendf(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
            width, height, width, height);
    appendf(out, "<title>%s</title>\n", escape_xml(options.title).c_str());
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    appendf(out, "<circle class=\"wafer\" cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"#f4f4f4\" stroke=\"#000000\" stroke-width=\"1\"/>\n",
            cx, cy, r_mm * s);

    const double w = layout.params.chip_width, h = layout.params.chip_height;
    out += "<g class=\"chips\" stroke=\"#ffffff\" stroke-width=\"0.5\">\n";
    for (std::size_t i = 0; i < result.results.size(); ++i) {
        const Site& site = layout.sites[i];
        const FailureCode code = result.results[i].outcome;
        appendf(out,
                "<rect data-chip=\"%d\" data-outcome=\"%s\" x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                site.chip_id, std::string(to_string(code)).c_str(), px(site.x - 0.5 * w), py(site.y + 0.5 * h),
                w * 1e3 * s, h * 1e3 * s, std::string(outcome_color(code)).c_str());
    }
    out += "</g>\n";

    if (options.draw_shots) {
        out += "<g class=\"shots\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\">\n";
        for (const auto& shot : layout.shots) {
            appendf(out, "<rect data-shot=\"%d\" x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\"/>\n", shot.index,
                    px(shot.x1), py(shot.y2), (shot.x2 - shot.x1) * 1e3 * s, (shot.y2 - shot.y1) * 1e3 * s);
        }
        out += "</g>\n";
    }

    if (!options.starred_cells.empty()) {
        out += "<g class=\"stars\" fill=\"#ff0000\" stroke=\"#000000\" stroke-width=\"0.3\">\n";
        const double rad = 0.35 * std::min(w, h) * 1e3 * s;
        for (std::size_t i = 0; i < result.results.size(); ++i) {
            const Site& site = layout.sites[i];
            if (result.results[i].outcome != options.star_code) continue;
            if (std::find(options.starred_cells.begin(), options.starred_cells.end(), site.cell) ==
                options.starred_cells.end()) {
                continue;
            }
            std::string pts;
            for (int k = 0; k < 10; ++k) {
                const double a = -1.5707963267948966 + k * 0.6283185307179586;
                const double rr = (k % 2 == 0) ? rad : 0.4 * rad;
                appendf(pts, "%.2f,%.2f ", px(site.x) + rr * std::cos(a), py(site.y) + rr * std::sin(a));
            }
            pts.pop_back();
            appendf(out, "<polygon data-star=\"%d\" points=\"%s\"/>\n", site.chip_id, pts.c_str());
        }
        out += "</g>\n";
    }

    out += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
    const double lx = map + 2.0 * margin;
    double ly = margin + 10.0;
    appendf(out, "<text x=\"%.2f\" y=\"%.2f\" font-weight=\"bold\">%s</text>\n", lx, ly, escape_xml(options.title).c_str());
    std::vector<FailureCode> codes{FailureCode::Pass};
    codes.insert(codes.end(), std::begin(kAllFailureCodes), std::end(kAllFailureCodes));
    for (FailureCode c : codes) {
        ly += 18.0;
        appendf(out, "<rect x=\"%.2f\" y=\"%.2f\" width=\"12\" height=\"12\" fill=\"%s\"/>\n", lx, ly - 10.0,
                std::string(outcome_color(c)).c_str());
        appendf(out, "<text x=\"%.2f\" y=\"%.2f\">%s %s</text>\n", lx + 18.0, ly, std::string(to_string(c)).c_str(),
                std::string(outcome_color(c)).c_str());
    }
    const YieldStats stats = yield_stats(result);
    ly += 26.0;
    if (stats.yield) {
        appendf(out, "<text x=\"%.2f\" y=\"%.2f\">yield %.1f%% (%d/%d)</text>\n", lx, ly, 100.0 * *stats.yield,
                stats.passes, stats.total);
    } else {
        appendf(out, "<text x=\"%.2f\" y=\"%.2f\">yield undefined (no results)</text>\n", lx, ly);
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string render_csv(const WaferResult& result) {
    validate(result);
    std::string out = "chip_id,x,y,shot,cell,outcome\n";
    for (std::size_t i = 0; i < result.layout.sites.size(); ++i) {
        const Site& s = result.layout.sites[i];
        const std::string outcome =
            result.results.empty() ? std::string("UNTESTED") : std::string(to_string(result.results[i].outcome));
        appendf(out, "%d,%.3f,%.3f,%d,r%dc%d,%s\n", s.chip_id, s.x * 1e3, s.y * 1e3, s.shot, s.cell.row, s.cell.col,
                outcome.c_str());
    }
    return out;
}

}  // namespace trapqa
