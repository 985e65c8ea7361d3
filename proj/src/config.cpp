#include "maintcast/config.hpp"

#include "maintcast/error.hpp"
#include "maintcast/textio.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace maintcast {

namespace pt = boost::property_tree;

Date config_date(const std::string& text) {
    auto d = parse_iso_date(text);
    if (!d) throw Error(Errc::InvalidConfig, "not a date: " + text);
    return *d;
}

std::vector<int> parse_int_list(const std::string& text) {
    auto to_int = [&](std::string_view s) {
        s = trim(s);
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            throw Error(Errc::InvalidConfig, "not an integer list: " + text);
        return v;
    };
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        if (trim(part).empty()) continue;
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(to_int(part));
            continue;
        }
        const int lo = to_int(std::string_view(part).substr(0, dash));
        const int hi = to_int(std::string_view(part).substr(dash + 1));
        if (hi < lo) throw Error(Errc::InvalidConfig, "descending range: " + part);
        for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F name) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::string(name(v[i]));
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <typename Fn>
    void read(const std::string& key, Fn&& assign) {
        used_.insert(key);
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return;
        try {
            assign(std::string(trim(*v)));
        } catch (const Error& e) {
            throw Error(Errc::InvalidConfig, key + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(Errc::InvalidConfig, key + ": bad value '" + *v + "'");
        }
    }

    void reject_unknown() const {
        for (const auto& [section, body] : tree_) {
            if (body.empty() && !body.data().empty())
                throw Error(Errc::InvalidConfig, "key outside a section: " + section);
            for (const auto& [key, value] : body)
                if (!used_.count(section + "." + key))
                    throw Error(Errc::InvalidConfig, "unknown key: " + section + "." + key);
        }
    }

private:
    const pt::ptree& tree_;
    std::set<std::string> used_;
};

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw Error(Errc::InvalidConfig, "not a boolean: " + s);
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error(Errc::InvalidConfig, "not a number: " + s);
    return v;
}

int to_int(const std::string& s) {
    const auto v = parse_int_list(s);
    if (v.size() != 1) throw Error(Errc::InvalidConfig, "not an integer: " + s);
    return v.front();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(Errc::InvalidConfig, std::string("config syntax: ") + e.what());
    }
    RunConfig c;
    Reader r(tree);
    r.read("paths.events", [&](const std::string& v) { c.paths.events = v; });
    r.read("paths.metadata", [&](const std::string& v) { c.paths.metadata = v; });
    r.read("paths.dependencies", [&](const std::string& v) { c.paths.dependencies = v; });
    r.read("paths.library_map", [&](const std::string& v) { c.paths.library_map = v; });
    r.read("paths.output_dir", [&](const std::string& v) { c.paths.output_dir = v; });
    r.read("period.start", [&](const std::string& v) { c.period.first = config_date(v); });
    r.read("period.end", [&](const std::string& v) { c.period.last = config_date(v); });
    r.read("selection.fraction", [&](const std::string& v) { c.selection_fraction = to_double(v); });
    r.read("selection.restrict", [&](const std::string& v) { c.restrict_to_selection = to_bool(v); });
    r.read("grid.tasks", [&](const std::string& v) {
        c.grid.tasks.clear();
        for (const auto& s : split(v, ',')) {
            auto t = parse_representation(trim(s));
            if (!t) throw Error(Errc::InvalidConfig, "unknown task " + s);
            c.grid.tasks.push_back(*t);
        }
    });
    r.read("grid.models", [&](const std::string& v) {
        c.grid.models.clear();
        for (const auto& s : split(v, ',')) {
            auto m = parse_model_kind(trim(s));
            if (!m) throw Error(Errc::InvalidConfig, "unknown model " + s);
            c.grid.models.push_back(*m);
        }
    });
    r.read("grid.windows", [&](const std::string& v) { c.grid.windows = parse_int_list(v); });
    r.read("grid.horizons", [&](const std::string& v) { c.grid.horizons = parse_int_list(v); });
    r.read("grid.shifts", [&](const std::string& v) { c.grid.shifts = to_int(v); });
    r.read("grid.seed", [&](const std::string& v) { c.grid.seed = std::stoull(v); });
    r.read("grid.trend_epsilon", [&](const std::string& v) { c.grid.epsilon = to_double(v); });
    r.read("grid.slope_step", [&](const std::string& v) { c.grid.slope_step = to_double(v); });
    r.read("flags.gate_boundary_inclusive", [&](const std::string& v) { c.gate_boundary_inclusive = to_bool(v); });
    r.read("flags.calendar_months", [&](const std::string& v) { c.calendar_months = to_bool(v); });
    r.read("flags.forest_median", [&](const std::string& v) { c.forest_median = to_bool(v); });
    r.read("flags.reverse_pagerank_edges", [&](const std::string& v) { c.reverse_pagerank_edges = to_bool(v); });
    r.read("models.forest_trees", [&](const std::string& v) { c.forest_trees = to_int(v); });
    r.read("models.lstm_max_epochs", [&](const std::string& v) { c.lstm_max_epochs = to_int(v); });
    r.read("models.ridge_lambda", [&](const std::string& v) { c.ridge_lambda = to_double(v); });
    r.read("synth.persistent", [&](const std::string& v) { c.synth.persistent = to_int(v); });
    r.read("synth.decaying", [&](const std::string& v) { c.synth.decaying = to_int(v); });
    r.read("synth.bursty", [&](const std::string& v) { c.synth.bursty = to_int(v); });
    r.read("synth.seed", [&](const std::string& v) { c.synth.seed = std::stoull(v); });
    r.read("synth.created_on", [&](const std::string& v) { c.synth.created_on = config_date(v); });
    r.read("synth.n_days", [&](const std::string& v) { c.synth.n_days = to_int(v); });
    r.read("fetch.endpoint", [&](const std::string& v) { c.fetch.endpoint = v; });
    r.read("fetch.token_env", [&](const std::string& v) { c.fetch.token_env = v; });
    r.read("fetch.request_budget", [&](const std::string& v) { c.fetch.request_budget = to_int(v); });
    r.read("fetch.repos", [&](const std::string& v) {
        c.fetch.repos.clear();
        for (const auto& s : split(v, ','))
            if (!trim(s).empty()) c.fetch.repos.emplace_back(trim(s));
    });
    r.reject_unknown();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_file(path));
    } catch (const Error& e) {
        if (e.code() == Errc::Io) throw Error(Errc::InvalidConfig, e.what());
        throw;
    }
}

std::string format_config(const RunConfig& c) {
    auto b = [](bool v) { return v ? "true" : "false"; };
    std::ostringstream o;
    o << "[paths]\n"
      << "events = " << c.paths.events.string() << "\n"
      << "metadata = " << c.paths.metadata.string() << "\n"
      << "dependencies = " << c.paths.dependencies.string() << "\n"
      << "library_map = " << c.paths.library_map.string() << "\n"
      << "output_dir = " << c.paths.output_dir.string() << "\n\n"
      << "[period]\nstart = " << format_date(c.period.first) << "\nend = " << format_date(c.period.last) << "\n\n"
      << "[selection]\nfraction = " << format_double(c.selection_fraction)
      << "\nrestrict = " << b(c.restrict_to_selection) << "\n\n"
      << "[grid]\n"
      << "tasks = " << join(c.grid.tasks, [](Representation r) { return to_string(r); }) << "\n"
      << "models = " << join(c.grid.models, [](ModelKind m) { return to_string(m); }) << "\n"
      << "windows = " << join_ints(c.grid.windows) << "\n"
      << "horizons = " << join_ints(c.grid.horizons) << "\n"
      << "shifts = " << c.grid.shifts << "\n"
      << "seed = " << c.grid.seed << "\n"
      << "trend_epsilon = " << format_double(c.grid.epsilon) << "\n"
      << "slope_step = " << format_double(c.grid.slope_step) << "\n\n"
      << "[flags]\n"
      << "gate_boundary_inclusive = " << b(c.gate_boundary_inclusive) << "\n"
      << "calendar_months = " << b(c.calendar_months) << "\n"
      << "forest_median = " << b(c.forest_median) << "\n"
      << "reverse_pagerank_edges = " << b(c.reverse_pagerank_edges) << "\n\n"
      << "[models]\n"
      << "forest_trees = " << c.forest_trees << "\n"
      << "lstm_max_epochs = " << c.lstm_max_epochs << "\n"
      << "ridge_lambda = " << format_double(c.ridge_lambda) << "\n\n"
      << "[synth]\n"
      << "persistent = " << c.synth.persistent << "\n"
      << "decaying = " << c.synth.decaying << "\n"
      << "bursty = " << c.synth.bursty << "\n"
      << "seed = " << c.synth.seed << "\n"
      << "created_on = " << format_date(c.synth.created_on) << "\n"
      << "n_days = " << c.synth.n_days << "\n\n"
      << "[fetch]\n"
      << "endpoint = " << c.fetch.endpoint << "\n"
      << "token_env = " << c.fetch.token_env << "\n"
      << "request_budget = " << c.fetch.request_budget << "\n"
      << "repos = " << join(c.fetch.repos, [](const std::string& s) { return s; }) << "\n";
    return o.str();
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : format_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> validate_config(const RunConfig& c, PathCheck check) {
    auto problems = c.grid.problems();
    if (c.period.empty()) problems.emplace_back("period start after period end");
    if (!(c.selection_fraction > 0 && c.selection_fraction <= 1)) problems.emplace_back("selection fraction outside (0,1]");
    if (c.forest_trees < 1) problems.emplace_back("forest_trees must be >= 1");
    if (c.lstm_max_epochs < 1) problems.emplace_back("lstm_max_epochs must be >= 1");
    if (c.ridge_lambda < 0) problems.emplace_back("ridge_lambda must be >= 0");
    if (c.synth.persistent < 0 || c.synth.decaying < 0 || c.synth.bursty < 0)
        problems.emplace_back("synth counts must be >= 0");
    if (c.synth.n_days < 120) problems.emplace_back("synth n_days must be >= 120");
    if (c.fetch.request_budget < 1) problems.emplace_back("fetch request_budget must be >= 1");
    if (c.restrict_to_selection && c.paths.dependencies.empty())
        problems.emplace_back("selection.restrict needs paths.dependencies");
    if (c.paths.output_dir.empty()) problems.emplace_back("paths.output_dir is empty");

    auto need = [&](const std::filesystem::path& p, const char* key) {
        if (p.empty()) problems.push_back(std::string("paths.") + key + " is not set");
        else if (!std::filesystem::exists(p)) problems.push_back(std::string("paths.") + key + " does not exist: " + p.string());
    };
    if (check == PathCheck::Inputs || check == PathCheck::InputsAndDependencies) {
        need(c.paths.events, "events");
        need(c.paths.metadata, "metadata");
    }
    if (check == PathCheck::InputsAndDependencies) need(c.paths.dependencies, "dependencies");
    else if (check != PathCheck::None && !c.paths.dependencies.empty()) need(c.paths.dependencies, "dependencies");
    if (check != PathCheck::None && !c.paths.library_map.empty()) need(c.paths.library_map, "library_map");
    return problems;
}

}  // namespace maintcast
