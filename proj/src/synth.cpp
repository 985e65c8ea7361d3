#include "maintcast/synth.hpp"

#include "maintcast/error.hpp"
#include "maintcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace maintcast {

std::string regime_name(const Regime& r) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Persistent>) return "persistent";
            else if constexpr (std::is_same_v<T, Decaying>) return "decaying";
            else if constexpr (std::is_same_v<T, Bursty>) return "bursty";
            else if constexpr (std::is_same_v<T, Abandoned>) return "abandoned";
            else return "noise";
        },
        r);
}

std::vector<std::string> RegimeSpec::problems() const {
    std::vector<std::string> out;
    if (repo_id.empty()) out.emplace_back("empty repo id");
    if (n_days < 120) out.emplace_back("n_days must be >= 120");
    if (archived_on && *archived_on < created_on) out.emplace_back("archived before created");
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Persistent>) {
                if (v.level < 0 || v.level > 10) out.emplace_back("persistent level outside 0..10");
            } else if constexpr (std::is_same_v<T, Decaying>) {
                if (!(v.start >= 0) || v.start > 10) out.emplace_back("decaying start outside 0..10");
                if (!(v.half_life_days > 0)) out.emplace_back("half-life must be positive");
            } else if constexpr (std::is_same_v<T, Bursty>) {
                if (!(v.base_rate >= 0) || !(v.burst_rate >= 0)) out.emplace_back("rates must be >= 0");
                if (!(v.burst_prob >= 0 && v.burst_prob <= 1)) out.emplace_back("burst probability outside [0,1]");
            } else if constexpr (std::is_same_v<T, Abandoned>) {
                if (v.active_days < 0) out.emplace_back("active_days must be >= 0");
            } else {
                if (!(v.rate >= 0)) out.emplace_back("rates must be >= 0");
            }
        },
        regime);
    return out;
}

namespace {

constexpr int kAuthorPool = 3;

int activities_per_window(int level) { return static_cast<int>(std::lround(level * 9.0 / 7.0)); }

// Evenly spaced offsets within one 90-day period.
std::vector<bool> even_pattern(int per_window) {
    std::vector<bool> on(90, false);
    for (int j = 0; j < per_window; ++j) on[static_cast<std::size_t>(j * 90 / per_window)] = true;
    return on;
}

// Number of events on a day with expected count `rate`.
int draw_count(double rate, std::uint64_t seed, std::uint64_t day) {
    const double whole = std::floor(rate);
    Rng rng(derive_seed(seed, {day, 0xd1}));
    return static_cast<int>(whole) + (rng.bernoulli(rate - whole) ? 1 : 0);
}

class Emitter {
public:
    Emitter(const RegimeSpec& spec) : spec_(spec) {}

    void emit(Date d) { emit(d, count_); }

    /// `slot` picks the kind and author, so periodic schedules give periodic features.
    void emit(Date d, std::uint64_t slot) {
        if (spec_.archived_on && d > *spec_.archived_on) return;
        ActivityEvent e;
        e.repo_id = spec_.repo_id;
        e.date = d;
        e.author = spec_.repo_id + "-dev" + std::to_string(slot % kAuthorPool);
        if (slot % 3 == 2) {
            e.kind = EventKind::IssueComment;
            e.role = AuthorRole::Member;
            e.role_label = "MEMBER";
        } else {
            e.kind = EventKind::Commit;
        }
        ++count_;
        events_.push_back(std::move(e));
    }

    std::vector<ActivityEvent> take() {
        std::sort(events_.begin(), events_.end(), canonical_less);
        return std::move(events_);
    }

private:
    const RegimeSpec& spec_;
    std::vector<ActivityEvent> events_;
    std::uint64_t count_ = 0;
};

}  // namespace

SyntheticRepo generate_repo_activity(const RegimeSpec& spec) {
    if (auto p = spec.problems(); !p.empty()) throw Error(Errc::InvalidSpec, spec.repo_id + ": " + p.front());
    SyntheticRepo out;
    out.meta.repo_id = spec.repo_id;
    out.meta.created_on = spec.created_on;
    out.meta.archived_on = spec.archived_on;
    out.meta.url = "https://github.com/synthetic/" + spec.repo_id;

    Emitter em(spec);
    const auto day = [&](int i) { return add_days(spec.created_on, i); };
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Persistent> || std::is_same_v<T, Abandoned>) {
                int level = 10, stop = spec.n_days;
                if constexpr (std::is_same_v<T, Persistent>) level = v.level;
                else stop = std::min(v.active_days, spec.n_days);
                const int k = activities_per_window(level);
                if (k == 0) return;
                const auto pattern = even_pattern(k);
                for (int i = 0, slot = 0; i < stop; ++i) {
                    if (i % 90 == 0) slot = 0;
                    if (pattern[static_cast<std::size_t>(i % 90)]) em.emit(day(i), static_cast<std::uint64_t>(slot++));
                }
            } else if constexpr (std::is_same_v<T, Decaying>) {
                // deterministic: emit whenever the cumulative expected count crosses an integer
                double cumulative = 0.0;
                long emitted = 0;
                for (int i = 0; i < spec.n_days; ++i) {
                    const double level = v.start * std::pow(0.5, i / v.half_life_days);
                    cumulative += level * 9.0 / 7.0 / 90.0;
                    while (emitted < static_cast<long>(std::floor(cumulative + 1e-9))) {
                        em.emit(day(i));
                        ++emitted;
                    }
                }
            } else if constexpr (std::is_same_v<T, Bursty>) {
                for (int i = 0; i < spec.n_days; ++i) {
                    const auto segment = static_cast<std::uint64_t>(i / 30);
                    Rng seg_rng(derive_seed(spec.seed, {segment, 0xb0}));
                    const double rate = seg_rng.bernoulli(v.burst_prob) ? v.burst_rate : v.base_rate;
                    for (int n = draw_count(rate, spec.seed, static_cast<std::uint64_t>(i)); n > 0; --n) em.emit(day(i));
                }
            } else {
                for (int i = 0; i < spec.n_days; ++i)
                    for (int n = draw_count(v.rate, spec.seed, static_cast<std::uint64_t>(i)); n > 0; --n) em.emit(day(i));
            }
        },
        spec.regime);
    out.events = em.take();
    return out;
}

Corpus generate_corpus(const std::vector<RegimeSpec>& specs) {
    if (specs.empty()) throw Error(Errc::InvalidSpec, "no regime specs");
    std::map<std::string, RepoMetadata> meta;
    std::vector<ActivityEvent> events;
    Date first = specs.front().span().first, last = specs.front().span().last;
    for (const auto& s : specs) {
        auto repo = generate_repo_activity(s);
        if (!meta.emplace(s.repo_id, repo.meta).second) throw Error(Errc::InvalidSpec, "duplicate repo " + s.repo_id);
        events.insert(events.end(), std::make_move_iterator(repo.events.begin()),
                      std::make_move_iterator(repo.events.end()));
        first = std::min(first, s.span().first);
        last = std::max(last, s.span().last);
    }
    return build_corpus(std::move(meta), events, {first, last}, 1);
}

std::vector<RegimeSpec> mixed_preset(const MixedPreset& preset) {
    std::vector<RegimeSpec> specs;
    auto add = [&](std::string prefix, int i, Regime r) {
        char id[32];
        std::snprintf(id, sizeof id, "%s-%03d", prefix.c_str(), i);
        RegimeSpec s;
        s.repo_id = id;
        s.regime = r;
        s.seed = derive_seed(preset.seed, {static_cast<std::uint64_t>(specs.size())});
        s.created_on = preset.created_on;
        s.n_days = preset.n_days;
        specs.push_back(std::move(s));
    };
    // levels whose +-1 rounding slack stays inside one bucket
    constexpr int kLevels[] = {1, 4, 5, 6, 9};
    for (int i = 0; i < preset.persistent; ++i) add("persistent", i, Persistent{kLevels[i % 5]});
    for (int i = 0; i < preset.decaying; ++i)
        add("decaying", i, Decaying{9.0 + (i % 2), 60.0 + 30.0 * (i % 3)});
    for (int i = 0; i < preset.bursty; ++i) add("bursty", i, Bursty{0.02 + 0.01 * (i % 3), 0.4, 0.3});
    return specs;
}

DependencySnapshot synthetic_dependencies(const std::vector<std::string>& repo_ids, std::uint64_t seed,
                                          int unlinked_libraries) {
    DependencySnapshot snap;
    std::vector<std::string> libs;
    for (const auto& id : repo_ids) {
        libs.push_back("lib-" + id);
        snap.library_to_repo[libs.back()] = id;
    }
    for (int i = 0; i < unlinked_libraries; ++i) {
        libs.push_back("lib-unlinked-" + std::to_string(i));
        snap.library_to_repo[libs.back()] = "";
    }
    if (libs.size() < 2) return snap;
    // preferential toward low indices so a few libraries dominate
    Rng rng(seed);
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < libs.size(); ++i) {
        const int deps = 1 + static_cast<int>(rng.below(4));
        for (int d = 0; d < deps; ++d) {
            const double u = rng.uniform();
            auto j = static_cast<std::size_t>(u * u * static_cast<double>(libs.size()));
            if (j >= libs.size()) j = libs.size() - 1;
            if (j == i) continue;
            if (seen.emplace(libs[i], libs[j]).second) snap.edges.emplace_back(libs[i], libs[j]);
        }
    }
    return snap;
}

std::string format_dependency_edges(const DependencySnapshot& snapshot) {
    std::string out = "dependent,dependency\n";
    for (const auto& [a, b] : snapshot.edges) out += a + ',' + b + '\n';
    return out;
}

std::string format_library_map(const DependencySnapshot& snapshot) {
    std::string out = "library,repo\n";
    for (const auto& [lib, repo] : snapshot.library_to_repo) out += lib + ',' + repo + '\n';
    return out;
}

}  // namespace maintcast
