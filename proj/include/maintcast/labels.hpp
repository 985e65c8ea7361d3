#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maintcast {

/// Target representation of one forecasting task.
enum class Representation { Raw, Bucket, Slope, TrendType };

std::string_view to_string(Representation r);
std::optional<Representation> parse_representation(std::string_view text);

/// Integer codes used for the categorical representations.
enum class Bucket { Low = 0, Moderate = 1, High = 2 };
enum class Trend { Downward = 0, Stable = 1, Upward = 2 };

std::string_view to_string(Bucket b);
std::string_view to_string(Trend t);

/// Round half away from zero.
inline long round_half_away(double v) { return static_cast<long>(v < 0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5)); }

/// Maps a model output onto the task's discrete label space:
/// Raw rounds and clips to 0..10, Bucket/TrendType round and clip to {0,1,2},
/// Slope rounds to a multiple of `slope_step` inside [-10, 10].
double discretize(Representation task, double value, double slope_step = 1.0);

/// Ordered label space of a task (canonical order is ascending).
std::vector<double> label_space(Representation task, double slope_step = 1.0);

/// Human-readable label for CSV output.
std::string label_name(Representation task, double label);

}  // namespace maintcast
