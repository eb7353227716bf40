// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"
#include "mimosim/ftr.hpp"
#include "mimosim/parallel.hpp"
#include "mimosim/reference_channel.hpp"
#include "mimosim/types.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace mimosim {

/// Candidate (m, K, Delta) values; K is linear.
struct ParameterGrid {
    std::vector<double> m_values;
    std::vector<double> k_values;
    std::vector<double> delta_values;

    static ParameterGrid default_grid()
    {
        ParameterGrid g;
        g.m_values = {0.5, 1, 2, 5, 10, 20, 50, 100, 500};
        for (double k_db : {-10.0, -5.0, 0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 20.0, 25.0, 30.0}) {
            g.k_values.push_back(std::pow(10.0, k_db / 10.0));
        }
        for (int i = 0; i <= 10; ++i) {
            g.delta_values.push_back(i / 10.0);
        }
        return g;
    }

    [[nodiscard]] std::size_t size() const noexcept { return m_values.size() * k_values.size() * delta_values.size(); }

    /// Grid triple at flat index; delta varies fastest, then k, then m.
    [[nodiscard]] std::tuple<double, double, double> at(std::size_t index) const
    {
        const std::size_t nd = delta_values.size();
        const std::size_t nk = k_values.size();
        return {m_values[index / (nk * nd)], k_values[(index / nd) % nk], delta_values[index % nd]};
    }

    void validate() const
    {
        if (m_values.empty() || k_values.empty() || delta_values.empty()) {
            throw ConfigError("parameter grid: every axis needs at least one value");
        }
        auto ascending = [](const std::vector<double>& v) { return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end(); };
        if (!ascending(m_values) || !ascending(k_values) || !ascending(delta_values)) {
            throw ConfigError("parameter grid: axis values must be strictly ascending");
        }
        if (!(m_values.front() > 0.0) || !std::isfinite(m_values.back())) {
            throw ConfigError("parameter grid: m values must be positive and finite");
        }
        if (!(k_values.front() >= 0.0) || !std::isfinite(k_values.back())) {
            throw ConfigError("parameter grid: k values must be nonnegative and finite");
        }
        if (!(delta_values.front() >= 0.0) || !(delta_values.back() <= 1.0)) {
            throw ConfigError("parameter grid: delta values must lie in [0, 1]");
        }
    }

    /// TOML with arrays m, delta and either k (linear) or k_db.
    static ParameterGrid parse(std::string_view text, const std::string& source = "<string>")
    {
        toml::table root;
        try {
            root = toml::parse(text, source);
        } catch (const toml::parse_error& e) {
            throw ConfigError("grid file " + source + ": " + std::string(e.description()));
        }
        auto numbers = [&](std::string_view key) {
            std::vector<double> out;
            const auto* arr = root[key].as_array();
            if (arr == nullptr) {
                return out;
            }
            for (const auto& node : *arr) {
                const auto v = node.value<double>();
                if (!v) {
                    throw ConfigError(source + ": '" + std::string(key) + "' must hold numbers");
                }
                out.push_back(*v);
            }
            return out;
        };
        for (const auto& [key, node] : root) {
            const auto name = key.str();
            if (name != "m" && name != "k" && name != "k_db" && name != "delta") {
                throw ConfigError(source + ": unknown key '" + std::string(name) + "'");
            }
            if (!node.is_array()) {
                throw ConfigError(source + ": '" + std::string(name) + "' must be an array");
            }
        }
        if (root.contains("k") && root.contains("k_db")) {
            throw ConfigError(source + ": give either k or k_db, not both");
        }
        ParameterGrid g;
        g.m_values = numbers("m");
        g.delta_values = numbers("delta");
        if (root.contains("k_db")) {
            for (double k_db : numbers("k_db")) {
                g.k_values.push_back(std::pow(10.0, k_db / 10.0));
            }
        } else {
            g.k_values = numbers("k");
        }
        g.validate();
        return g;
    }

    static ParameterGrid load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open grid file " + path.string());
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str(), path.string());
    }
};

inline constexpr double kAdClampEpsilon = 1e-15;

namespace detail {

inline double clamp_probability(double p) noexcept { return std::clamp(p, kAdClampEpsilon, 1.0 - kAdClampEpsilon); }

inline double clamp_log_probability(double lp) noexcept
{
    static const double lo = std::log(kAdClampEpsilon);
    static const double hi = std::log1p(-kAdClampEpsilon);
    return std::clamp(lp, lo, hi);
}

/// -n - (1/n) sum_i [(2i - 1) ln F_i + (2n + 1 - 2i) ln(1 - F_i)], i 1-based.
template <class LogPair>
double anderson_darling_from_logs(std::size_t n, LogPair&& log_pair)
{
    double s = 0.0;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [ln_cdf, ln_sf] = log_pair(i);
        const double w = 2.0 * static_cast<double>(i) + 1.0;
        s += w * clamp_log_probability(ln_cdf) + (2.0 * nd - w) * clamp_log_probability(ln_sf);
    }
    return -nd - s / nd;
}

}  // namespace detail

/**
 * Anderson-Darling distance A^2 = -n - S(F) between ascending samples and a
 * candidate CDF. cdf(x) may return a probability, a Probability {cdf, sf}, or
 * a std::pair of natural-log probabilities; probabilities are clamped to
 * [1e-15, 1 - 1e-15] before logs.
 */
template <class Cdf>
double anderson_darling_statistic(const std::vector<double>& sorted_samples, Cdf&& cdf)
{
    if (sorted_samples.empty()) {
        throw DomainError("anderson_darling_statistic: no samples");
    }
    if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
        throw PreconditionError("anderson_darling_statistic: samples must be sorted ascending");
    }
    return detail::anderson_darling_from_logs(sorted_samples.size(), [&](std::size_t i) -> std::pair<double, double> {
        using R = std::decay_t<decltype(cdf(sorted_samples[i]))>;
        const auto r = cdf(sorted_samples[i]);
        if constexpr (std::is_same_v<R, Probability>) {
            return {std::log(detail::clamp_probability(r.cdf)), std::log(detail::clamp_probability(r.sf))};
        } else if constexpr (std::is_same_v<R, std::pair<double, double>>) {
            return r;
        } else {
            const double p = detail::clamp_probability(static_cast<double>(r));
            return {std::log(p), std::log1p(-p)};
        }
    });
}

/**
 * FTR CDF tabulated on a log-spaced x grid shared by all tables, storing
 * ln F and ln(1 - F) with monotone cubic Hermite slopes in ln x. The grid is
 * coarse below kXBreak, where ln F is close to linear in ln x, and fine
 * above it, where the bulk of any unit-mean distribution sits. Below the
 * first node the CDF is taken as linear in x; past the last node ln(1 - F) is
 * extended linearly in x.
 */
class FtrCdfTable {
public:
    static constexpr double kX0 = 1e-7;
    static constexpr double kXBreak = 1e-3;
    static constexpr int kCoarsePerDecade = 12;
    static constexpr int kFinePerDecade = 128;
    static constexpr std::size_t kCoarseNodes = 4 * kCoarsePerDecade;  // log10(kXBreak / kX0) decades
    static constexpr double kTailStop = 1e-17;
    static constexpr double kMaxX = 1e4;

    static double coarse_step() noexcept { return std::log(10.0) / kCoarsePerDecade; }
    static double fine_step() noexcept { return std::log(10.0) / kFinePerDecade; }

    static double log_node(std::size_t j) noexcept
    {
        if (j < kCoarseNodes) {
            return std::log(kX0) + coarse_step() * static_cast<double>(j);
        }
        return std::log(kXBreak) + fine_step() * static_cast<double>(j - kCoarseNodes);
    }
    static double node(std::size_t j) noexcept { return std::exp(log_node(j)); }

    FtrCdfTable() = default;

    FtrCdfTable(const FtrParameters& p, const QuadratureConfig& quad)
    {
        for (std::size_t j = 0;; ++j) {
            const double x = node(j);
            const auto pr = ftr_distribution(p, x, quad);
            ln_cdf_.push_back(std::log(std::max(pr.cdf, 1e-300)));
            ln_sf_.push_back(std::log(std::max(pr.sf, 1e-300)));
            if (j > kCoarseNodes && (pr.sf < kTailStop || x > kMaxX)) {
                break;
            }
        }
        d_cdf_ = pchip_slopes(ln_cdf_);
        d_sf_ = pchip_slopes(ln_sf_);
        const std::size_t last = ln_sf_.size() - 1;
        tail_slope_ = (ln_sf_[last] - ln_sf_[last - 1]) / (node(last) - node(last - 1));
    }

    [[nodiscard]] std::size_t nodes() const noexcept { return ln_cdf_.size(); }

    /// Where a sample falls on the shared grid, with its Hermite basis weights
    /// (the slope weights already carry the interval width).
    struct Location {
        double x = 0.0;
        std::size_t j = 0;
        bool below = false;
        double h00 = 0.0, h10 = 0.0, h01 = 0.0, h11 = 0.0;
    };

    static Location locate(double x) noexcept
    {
        Location loc;
        loc.x = x;
        if (!(x > kX0)) {
            loc.below = true;
            return loc;
        }
        const double lx = std::log(x);
        double u = 0.0;
        double h = 0.0;
        if (x < kXBreak) {
            u = (lx - std::log(kX0)) / coarse_step();
            loc.j = std::min(static_cast<std::size_t>(u), kCoarseNodes - 1);
            h = coarse_step();
        } else {
            u = (lx - std::log(kXBreak)) / fine_step();
            const auto k = static_cast<std::size_t>(std::min(u, 1e15));
            loc.j = kCoarseNodes + k;
            u += static_cast<double>(kCoarseNodes);
            h = fine_step();
        }
        const double t = std::clamp(u - static_cast<double>(loc.j), 0.0, 1.0);
        const double t2 = t * t;
        const double t3 = t2 * t;
        loc.h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        loc.h10 = h * (t3 - 2.0 * t2 + t);
        loc.h01 = -2.0 * t3 + 3.0 * t2;
        loc.h11 = h * (t3 - t2);
        return loc;
    }

    /// {ln F(x), ln(1 - F(x))}
    [[nodiscard]] std::pair<double, double> log_probabilities(const Location& loc) const noexcept
    {
        if (loc.below) {
            if (!(loc.x > 0.0)) {
                return {-std::numeric_limits<double>::infinity(), 0.0};
            }
            const double ln_cdf = ln_cdf_[0] + std::log(loc.x / kX0);
            return {ln_cdf, std::log1p(-std::exp(ln_cdf))};
        }
        const std::size_t last = ln_cdf_.size() - 1;
        if (loc.j >= last) {
            const double ln_sf = ln_sf_[last] + tail_slope_ * (loc.x - node(last));
            return {std::log1p(-std::exp(ln_sf)), ln_sf};
        }
        const std::size_t j = loc.j;
        return {loc.h00 * ln_cdf_[j] + loc.h10 * d_cdf_[j] + loc.h01 * ln_cdf_[j + 1] + loc.h11 * d_cdf_[j + 1],
                loc.h00 * ln_sf_[j] + loc.h10 * d_sf_[j] + loc.h01 * ln_sf_[j + 1] + loc.h11 * d_sf_[j + 1]};
    }

    [[nodiscard]] std::pair<double, double> log_probabilities(double x) const noexcept { return log_probabilities(locate(x)); }

private:
    // Fritsch-Carlson weighted harmonic-mean slopes (per unit ln x).
    static std::vector<double> pchip_slopes(const std::vector<double>& y)
    {
        const std::size_t n = y.size();
        std::vector<double> d(n, 0.0);
        if (n < 2) {
            return d;
        }
        auto width = [](std::size_t j) { return log_node(j + 1) - log_node(j); };
        d[0] = (y[1] - y[0]) / width(0);
        d[n - 1] = (y[n - 1] - y[n - 2]) / width(n - 2);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const double h0 = width(j - 1);
            const double h1 = width(j);
            const double a = (y[j] - y[j - 1]) / h0;
            const double b = (y[j + 1] - y[j]) / h1;
            if (a * b <= 0.0) {
                continue;
            }
            const double w1 = 2.0 * h1 + h0;
            const double w2 = h1 + 2.0 * h0;
            d[j] = (w1 + w2) / (w1 / a + w2 / b);
        }
        return d;
    }

    std::vector<double> ln_cdf_;
    std::vector<double> ln_sf_;
    std::vector<double> d_cdf_;
    std::vector<double> d_sf_;
    double tail_slope_ = 0.0;
};

/// Thread-safe memo of FtrCdfTable by (m, k, delta, quadrature).
class FtrCdfCache {
public:
    std::shared_ptr<const FtrCdfTable> get(double m, double k, double delta, const QuadratureConfig& quad)
    {
        const Key key{m, k, delta, quad.xi_nodes, quad.phase_nodes, static_cast<int>(quad.xi_method)};
        {
            const std::lock_guard lock(mutex_);
            const auto it = tables_.find(key);
            if (it != tables_.end()) {
                return it->second;
            }
        }
        auto table = std::make_shared<const FtrCdfTable>(ftr_from_k_delta(m, k, delta), quad);
        const std::lock_guard lock(mutex_);
        return tables_.emplace(key, std::move(table)).first->second;
    }

    [[nodiscard]] std::size_t size() const
    {
        const std::lock_guard lock(mutex_);
        return tables_.size();
    }

    void clear()
    {
        const std::lock_guard lock(mutex_);
        tables_.clear();
    }

    static FtrCdfCache& shared()
    {
        static FtrCdfCache cache;
        return cache;
    }

private:
    using Key = std::tuple<double, double, double, int, int, int>;
    mutable std::mutex mutex_;
    std::map<Key, std::shared_ptr<const FtrCdfTable>> tables_;
};

enum class CdfEvaluation { tabulated, direct };

struct FitOptions {
    QuadratureConfig quad{};
    CdfEvaluation evaluation = CdfEvaluation::tabulated;
    unsigned workers = 0;  // 0: hardware concurrency, 1: sequential
    FtrCdfCache* cache = nullptr;  // nullptr: FtrCdfCache::shared()
    std::size_t min_samples = 100;
};

struct FitResult {
    FtrParameters params;
    double a2 = 0.0;
    std::size_t grid_index = 0;
};

/// Copy of the samples divided by their mean and sorted ascending.
inline std::vector<double> normalized_sorted(const std::vector<double>& samples)
{
    if (samples.empty()) {
        throw DomainError("cannot normalize an empty sample set");
    }
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw DomainError("sample mean must be positive and finite");
    }
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [mean](double v) { return v / mean; });
    std::sort(out.begin(), out.end());
    return out;
}

/**
 * Exhaustive grid search for the FTR triple minimizing A^2 against the samples
 * (normalized to unit mean). Ties resolve to the first triple in (m, k, delta)
 * order, so the outcome does not depend on the worker count.
 */
inline FitResult fit_ftr(const std::vector<double>& samples, const ParameterGrid& grid, const FitOptions& options = {})
{
    grid.validate();
    options.quad.validate();
    if (samples.size() < options.min_samples) {
        throw DomainError("fit_ftr: need at least " + std::to_string(options.min_samples) + " samples, got " +
                          std::to_string(samples.size()));
    }
    for (double v : samples) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError("fit_ftr: samples must be finite and nonnegative");
        }
    }
    const auto sorted = normalized_sorted(samples);
    const std::size_t n = sorted.size();
    std::vector<double> a2(grid.size());

    if (options.evaluation == CdfEvaluation::direct) {
        parallel_for(
            grid.size(),
            [&](std::size_t idx) {
                const auto [m, k, delta] = grid.at(idx);
                const auto p = ftr_from_k_delta(m, k, delta);
                a2[idx] = anderson_darling_statistic(sorted, [&](double x) { return ftr_distribution(p, x, options.quad); });
            },
            options.workers);
    } else {
        FtrCdfCache& cache = options.cache != nullptr ? *options.cache : FtrCdfCache::shared();
        std::vector<FtrCdfTable::Location> where(n);
        std::transform(sorted.begin(), sorted.end(), where.begin(), [](double x) { return FtrCdfTable::locate(x); });
        parallel_for(
            grid.size(),
            [&](std::size_t idx) {
                const auto [m, k, delta] = grid.at(idx);
                const auto table = cache.get(m, k, delta, options.quad);
                a2[idx] = detail::anderson_darling_from_logs(n, [&](std::size_t i) { return table->log_probabilities(where[i]); });
            },
            options.workers);
    }

    std::size_t best = 0;
    for (std::size_t idx = 1; idx < a2.size(); ++idx) {
        if (a2[idx] < a2[best]) {
            best = idx;
        }
    }
    const auto [m, k, delta] = grid.at(best);
    return {ftr_from_k_delta(m, k, delta), a2[best], best};
}

inline FitResult fit_ftr(const FadingSampleSet& set, const ParameterGrid& grid, const FitOptions& options = {})
{
    set.validate(options.min_samples);
    return fit_ftr(set.samples, grid, options);
}

struct CalibrationEntry {
    FtrParameters params;
    double a2 = 0.0;

    friend bool operator==(const CalibrationEntry& a, const CalibrationEntry& b)
    {
        return a.params.m == b.params.m && a.params.k == b.params.k && a.params.delta == b.params.delta &&
               a.params.v1 == b.params.v1 && a.params.v2 == b.params.v2 && a.params.sigma2 == b.params.sigma2 &&
               a.a2 == b.a2;
    }
};

/// (scenario, condition) -> fitted FTR parameters. Carrier frequency is not part of the key.
class CalibrationTable {
public:
    using Key = std::pair<Scenario, LinkCondition>;

    void insert(Scenario s, LinkCondition c, const CalibrationEntry& entry)
    {
        entry.params.validate();
        if (!entries_.emplace(Key{s, c}, entry).second) {
            throw ConfigError("calibration table already has an entry for " + key_name(s, c));
        }
    }

    [[nodiscard]] const CalibrationEntry& get(Scenario s, LinkCondition c) const
    {
        const auto it = entries_.find({s, c});
        if (it == entries_.end()) {
            throw LookupError("calibration table has no entry for " + key_name(s, c));
        }
        return it->second;
    }

    [[nodiscard]] bool contains(Scenario s, LinkCondition c) const { return entries_.count({s, c}) != 0; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const std::map<Key, CalibrationEntry>& entries() const noexcept { return entries_; }

    friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;

    void write_csv(std::ostream& os) const
    {
        os.precision(17);
        os << "scenario,condition,m,k,delta,v1,v2,sigma2,a2\n";
        for (const auto& [key, e] : entries_) {
            os << to_string(key.first) << ',' << to_string(key.second) << ',' << e.params.m << ',' << e.params.k << ','
               << e.params.delta << ',' << e.params.v1 << ',' << e.params.v2 << ',' << e.params.sigma2 << ',' << e.a2
               << '\n';
        }
    }

    void save(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out) {
            throw ConfigError("cannot write calibration table " + path.string());
        }
        write_csv(out);
    }

    static CalibrationTable read_csv(std::istream& is, const std::string& source = "<stream>")
    {
        std::string line;
        if (!std::getline(is, line) || strip_cr(line) != "scenario,condition,m,k,delta,v1,v2,sigma2,a2") {
            throw ConfigError(source + ": missing calibration table header");
        }
        CalibrationTable table;
        std::size_t line_no = 1;
        while (std::getline(is, line)) {
            ++line_no;
            line = strip_cr(line);
            if (line.empty()) {
                continue;
            }
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) {
                fields.push_back(field);
            }
            const std::string where = source + ":" + std::to_string(line_no);
            if (fields.size() != 9) {
                throw ConfigError(where + ": expected 9 fields, got " + std::to_string(fields.size()));
            }
            double v[7];
            for (int i = 0; i < 7; ++i) {
                std::size_t used = 0;
                try {
                    v[i] = std::stod(fields[static_cast<std::size_t>(i) + 2], &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used == 0 || used != fields[static_cast<std::size_t>(i) + 2].size()) {
                    throw ConfigError(where + ": bad number '" + fields[static_cast<std::size_t>(i) + 2] + "'");
                }
            }
            CalibrationEntry e;
            e.params = {v[0], v[1], v[2], v[3], v[4], v[5]};
            e.a2 = v[6];
            try {
                table.insert(parse_scenario(fields[0]), parse_condition(fields[1]), e);
            } catch (const DomainError& err) {
                throw ConfigError(where + ": " + err.what());
            }
        }
        return table;
    }

    static CalibrationTable load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open calibration table " + path.string());
        }
        return read_csv(in, path.string());
    }

private:
    static std::string key_name(Scenario s, LinkCondition c)
    {
        return std::string(to_string(s)) + "/" + std::string(to_string(c));
    }
    static std::string strip_cr(std::string s)
    {
        if (!s.empty() && s.back() == '\r') {
            s.pop_back();
        }
        return s;
    }

    std::map<Key, CalibrationEntry> entries_;
};

/// Fits every sample set and stores the results; each (scenario, condition) may appear once.
inline CalibrationTable build_calibration_table(const std::vector<FadingSampleSet>& sets, const ParameterGrid& grid,
                                                const FitOptions& options = {})
{
    std::map<CalibrationTable::Key, std::size_t> seen;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (!seen.emplace(CalibrationTable::Key{sets[i].scenario, sets[i].condition}, i).second) {
            throw ConfigError("duplicate sample sets for " + std::string(to_string(sets[i].scenario)) + "/" +
                              std::string(to_string(sets[i].condition)));
        }
    }
    CalibrationTable table;
    for (const auto& set : sets) {
        const auto fit = fit_ftr(set, grid, options);
        table.insert(set.scenario, set.condition, {fit.params, fit.a2});
    }
    return table;
}

inline const FtrParameters& lookup_ftr_params(const CalibrationTable& table, Scenario s, LinkCondition c)
{
    return table.get(s, c).params;
}

}  // namespace mimosim
