#include "maintcast/labels.hpp"

#include "maintcast/textio.hpp"

#include <algorithm>

namespace maintcast {

std::string_view to_string(Representation r) {
    switch (r) {
        case Representation::Raw: return "raw";
        case Representation::Bucket: return "bucket";
        case Representation::Slope: return "slope";
        case Representation::TrendType: return "trend";
    }
    return "raw";
}

std::optional<Representation> parse_representation(std::string_view text) {
    if (text == "raw") return Representation::Raw;
    if (text == "bucket") return Representation::Bucket;
    if (text == "slope") return Representation::Slope;
    if (text == "trend") return Representation::TrendType;
    return std::nullopt;
}

std::string_view to_string(Bucket b) {
    switch (b) {
        case Bucket::Low: return "low";
        case Bucket::Moderate: return "moderate";
        case Bucket::High: return "high";
    }
    return "low";
}

std::string_view to_string(Trend t) {
    switch (t) {
        case Trend::Downward: return "downward";
        case Trend::Stable: return "stable";
        case Trend::Upward: return "upward";
    }
    return "stable";
}

namespace {

long slope_limit(double step) { return static_cast<long>(std::floor(10.0 / step + 1e-9)); }

}  // namespace

double discretize(Representation task, double value, double slope_step) {
    switch (task) {
        case Representation::Raw:
            return static_cast<double>(std::clamp(round_half_away(value), 0L, 10L));
        case Representation::Bucket:
        case Representation::TrendType:
            return static_cast<double>(std::clamp(round_half_away(value), 0L, 2L));
        case Representation::Slope: {
            const long limit = slope_limit(slope_step);
            const long k = std::clamp(round_half_away(value / slope_step), -limit, limit);
            return static_cast<double>(k) * slope_step;
        }
    }
    return value;
}

std::vector<double> label_space(Representation task, double slope_step) {
    std::vector<double> out;
    switch (task) {
        case Representation::Raw:
            for (int i = 0; i <= 10; ++i) out.push_back(i);
            break;
        case Representation::Bucket:
        case Representation::TrendType:
            out = {0.0, 1.0, 2.0};
            break;
        case Representation::Slope: {
            const long limit = slope_limit(slope_step);
            for (long k = -limit; k <= limit; ++k) out.push_back(static_cast<double>(k) * slope_step);
            break;
        }
    }
    return out;
}

std::string label_name(Representation task, double label) {
    switch (task) {
        case Representation::Bucket: return std::string(to_string(static_cast<Bucket>(static_cast<int>(label))));
        case Representation::TrendType: return std::string(to_string(static_cast<Trend>(static_cast<int>(label))));
        default: return format_double(label);
    }
}

}  // namespace maintcast
