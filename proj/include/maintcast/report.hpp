#pragma once

#include "maintcast/eval.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>
#include <string>

namespace maintcast {

/// One box per (task, model): whiskers at min/max, box at Q1..Q3, median line.
std::string render_summary_svg(std::span<const AggregateSummary> summary);

struct ConfusionTable {
    std::vector<std::string> labels;
    std::vector<std::int64_t> counts;  // row = truth
};

/// Reads the output of format_confusion_csv. Throws MalformedRecord.
ConfusionTable parse_confusion_csv(std::string_view text);

/// Row-normalized heatmap with counts printed in each cell.
std::string render_confusion_svg(const std::string& title, const ConfusionTable& m);

}  // namespace maintcast
