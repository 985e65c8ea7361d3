#include "maintcast/report.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace maintcast {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

std::string render_summary_svg(std::span<const AggregateSummary> summary) {
    std::map<Representation, std::vector<const AggregateSummary*>> panels;
    for (const auto& s : summary) panels[s.task].push_back(&s);

    const double panel_w = 260, panel_h = 260, top = 40, left = 50, plot_h = 180;
    const double width = left + panel_w * static_cast<double>(std::max<std::size_t>(panels.size(), 1)) + 20;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                      num(panel_h + top) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    double x0 = left;
    for (const auto& [task, rows] : panels) {
        auto y = [&](double acc) { return top + plot_h * (1.0 - acc); };
        svg += "<text x=\"" + num(x0 + panel_w / 2 - 20) + "\" y=\"20\" font-size=\"13\">" +
               std::string(to_string(task)) + "</text>\n";
        svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(top) + "\" width=\"" + num(panel_w - 30) + "\" height=\"" +
               num(plot_h) + "\" fill=\"none\" stroke=\"#999\"/>\n";
        for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0})
            svg += "<text x=\"" + num(x0 - 30) + "\" y=\"" + num(y(tick) + 4) + "\">" + num(tick) + "</text>\n";
        const double slot = (panel_w - 30) / static_cast<double>(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& s = *rows[i];
            const double cx = x0 + slot * (static_cast<double>(i) + 0.5), half = slot * 0.25;
            svg += "<line x1=\"" + num(cx) + "\" x2=\"" + num(cx) + "\" y1=\"" + num(y(s.min)) + "\" y2=\"" +
                   num(y(s.max)) + "\" stroke=\"#333\"/>\n";
            svg += "<rect x=\"" + num(cx - half) + "\" y=\"" + num(y(s.q3)) + "\" width=\"" + num(2 * half) +
                   "\" height=\"" + num(std::max(0.5, y(s.q1) - y(s.q3))) +
                   "\" fill=\"#9ecae1\" stroke=\"#333\"/>\n";
            svg += "<line x1=\"" + num(cx - half) + "\" x2=\"" + num(cx + half) + "\" y1=\"" + num(y(s.median)) +
                   "\" y2=\"" + num(y(s.median)) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
            svg += "<text x=\"" + num(cx - half) + "\" y=\"" + num(top + plot_h + 16) + "\">" +
                   std::string(to_string(s.model)) + "</text>\n";
        }
        x0 += panel_w;
    }
    svg += "</svg>\n";
    return svg;
}

ConfusionTable parse_confusion_csv(std::string_view text) {
    ConfusionTable t;
    const auto lines = split(text, '\n');
    std::size_t row = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cols = split(trim(lines[i]), ',');
        if (t.labels.empty()) {
            if (cols.size() < 2 || cols[0] != "truth") throw Error(Errc::MalformedRecord, "confusion header");
            t.labels.assign(cols.begin() + 1, cols.end());
            continue;
        }
        if (cols.size() != t.labels.size() + 1 || row >= t.labels.size() || cols[0] != t.labels[row])
            throw Error(Errc::MalformedRecord, "confusion row " + std::to_string(i + 1));
        for (std::size_t c = 1; c < cols.size(); ++c) t.counts.push_back(std::stoll(cols[c]));
        ++row;
    }
    if (t.labels.empty() || row != t.labels.size()) throw Error(Errc::MalformedRecord, "incomplete confusion matrix");
    return t;
}

std::string render_confusion_svg(const std::string& title, const ConfusionTable& m) {
    const std::size_t n = m.labels.size();
    const double cell = n > 6 ? 28 : 60, left = 90, top = 50;
    const double side = cell * static_cast<double>(n);
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(left + side + 20) + "\" height=\"" +
                      num(top + side + 40) + "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    svg += "<text x=\"10\" y=\"20\" font-size=\"13\">" + escape(title) + " (rows: truth)</text>\n";
    for (std::size_t r = 0; r < n; ++r) {
        const double y = top + cell * static_cast<double>(r);
        std::int64_t row_total = 0;
        for (std::size_t c = 0; c < n; ++c) row_total += m.counts[r * n + c];
        svg += "<text x=\"10\" y=\"" + num(y + cell / 2) + "\">" + escape(m.labels[r]) + "</text>\n";
        for (std::size_t c = 0; c < n; ++c) {
            const double x = left + cell * static_cast<double>(c);
            const auto count = m.counts[r * n + c];
            const double share = row_total ? static_cast<double>(count) / static_cast<double>(row_total) : 0.0;
            const int shade = static_cast<int>(255 - 200 * share);
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
                   "\" fill=\"rgb(" + std::to_string(shade) + "," + std::to_string(shade) + ",255)\" stroke=\"#fff\"/>\n";
            svg += "<text x=\"" + num(x + 3) + "\" y=\"" + num(y + cell / 2) + "\">" + std::to_string(count) + "</text>\n";
        }
    }
    for (std::size_t c = 0; c < n; ++c)
        svg += "<text x=\"" + num(left + cell * static_cast<double>(c) + 2) + "\" y=\"" + num(top + side + 14) + "\">" +
               escape(m.labels[c]) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace maintcast
