// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/antenna.hpp"
#include "mimosim/calibration.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/ftr.hpp"
#include "mimosim/parallel.hpp"
#include "mimosim/propagation.hpp"
#include "mimosim/reference_channel.hpp"
#include "mimosim/rng.hpp"
#include "mimosim/stats.hpp"
#include "mimosim/types.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mimosim {

enum class ChannelModel { reference, ftr_fast };

inline std::string_view to_string(ChannelModel m) noexcept { return m == ChannelModel::reference ? "reference" : "ftr-fast"; }

inline ChannelModel parse_model(std::string_view s)
{
    if (s == "reference") {
        return ChannelModel::reference;
    }
    if (s == "ftr-fast" || s == "ftr") {
        return ChannelModel::ftr_fast;
    }
    throw ConfigError("unknown channel model '" + std::string(s) + "' (expected reference or ftr-fast)");
}

inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    if (!(bandwidth_hz > 0.0)) {
        throw DomainError("bandwidth must be positive");
    }
    return kThermalNoiseDbmPerHz + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

/// P_R = P_T - loss + 10 log10(gain) + 10 log10(fading), all in dB(m).
inline double rx_power_dbm(double ptx_dbm, double loss_db, double gain, double fading)
{
    if (!(gain > 0.0)) {
        throw DomainError("rx_power_dbm: gain must be positive");
    }
    if (!(fading > 0.0)) {
        throw DomainError("rx_power_dbm: fading must be positive");
    }
    return ptx_dbm - loss_db + 10.0 * std::log10(gain) + 10.0 * std::log10(fading);
}

inline double rx_power_dbm(double ptx_dbm, const ScenarioParams& params, const LinkGeometry& link, double gain,
                           double fading, double shadow_db = 0.0)
{
    return rx_power_dbm(ptx_dbm, large_scale_loss_db(params, link, shadow_db), gain, fading);
}

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Array boresight lies in the horizontal plane at azimuth bearing (radians, global frame).
struct GnbSite {
    Position position{0.0, 0.0, 10.0};
    double bearing = 0.0;
    double tx_power_dbm = 30.0;
    UpaConfig upa{8, 8};
};

struct UeNode {
    Position position{0.0, 0.0, 1.5};
    UpaConfig upa{};
};

/// Uniform UE placement inside a disk, keeping min_distance (2D) from every gNB.
struct UeDropArea {
    std::size_t count = 10;
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 100.0;
    double min_distance = 10.0;
    double height = 1.5;
    UpaConfig upa{};
};

struct DropConfig {
    Scenario scenario = Scenario::umi;
    ChannelModel model = ChannelModel::reference;
    double fc_ghz = 28.0;
    double bandwidth_hz = 100e6;
    double noise_figure_db = 7.0;
    std::vector<GnbSite> gnbs;
    std::vector<UeNode> ues;  // fixed UEs, present in every drop
    std::optional<UeDropArea> ue_drop;
    std::optional<double> p_los;
    bool shadowing = true;
    bool cached_assembly = true;
    ReferenceChannelConfig reference = ReferenceChannelConfig::for_scenario(Scenario::umi);
    std::size_t drops = 100;
    std::uint64_t seed = 1;

    [[nodiscard]] std::size_t ue_count() const noexcept { return ues.size() + (ue_drop ? ue_drop->count : 0); }

    void validate() const
    {
        if (gnbs.empty()) {
            throw ConfigError("drop config: at least one gNB required");
        }
        if (ue_count() == 0) {
            throw ConfigError("drop config: at least one UE required");
        }
        if (!(fc_ghz >= kMinCarrierGhz && fc_ghz <= kMaxCarrierGhz)) {
            throw ConfigError("drop config: fc_ghz must lie in [0.5, 100]");
        }
        if (!(bandwidth_hz > 0.0)) {
            throw ConfigError("drop config: bandwidth_hz must be positive");
        }
        if (p_los && !(*p_los >= 0.0 && *p_los <= 1.0)) {
            throw ConfigError("drop config: p_los must lie in [0, 1]");
        }
        if (drops == 0) {
            throw ConfigError("drop config: drops must be at least 1");
        }
        for (const auto& g : gnbs) {
            g.upa.validate();
        }
        for (const auto& u : ues) {
            u.upa.validate();
        }
        if (ue_drop) {
            ue_drop->upa.validate();
            if (!(ue_drop->radius > 0.0) || !(ue_drop->min_distance >= 0.0) || ue_drop->min_distance >= ue_drop->radius * 2.0) {
                throw ConfigError("drop config: ue_drop needs radius > 0 and a reachable min_distance");
            }
        }
        reference.validate();
    }

    static DropConfig parse(std::string_view text, const std::string& source = "<string>");
    static DropConfig load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open drop config " + path.string());
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str(), path.string());
    }
};

namespace detail {

class TomlReader {
public:
    TomlReader(const toml::table& t, std::string where) : table_(t), where_(std::move(where)) {}

    template <class T>
    std::optional<T> get(std::string_view key)
    {
        seen_.emplace_back(key);
        const auto* node = table_.get(key);
        if (node == nullptr) {
            return std::nullopt;
        }
        if constexpr (std::is_same_v<T, bool>) {
            if (const auto v = node->value_exact<bool>()) {
                return *v;
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (const auto v = node->value_exact<std::string>()) {
                return *v;
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (const auto v = node->value_exact<std::int64_t>(); v && *v >= 0) {
                return static_cast<T>(*v);
            }
        } else {
            if (const auto v = node->value<double>()) {
                return *v;
            }
        }
        throw ConfigError(where_ + ": '" + std::string(key) + "' has the wrong type");
    }

    template <class T>
    void read(std::string_view key, T& out)
    {
        if (auto v = get<T>(key)) {
            out = *v;
        }
    }

    std::vector<double> numbers(std::string_view key, std::size_t count)
    {
        seen_.emplace_back(key);
        const auto* arr = table_.get_as<toml::array>(key);
        if (arr == nullptr) {
            return {};
        }
        std::vector<double> out;
        for (const auto& n : *arr) {
            const auto v = n.value<double>();
            if (!v) {
                throw ConfigError(where_ + ": '" + std::string(key) + "' must hold numbers");
            }
            out.push_back(*v);
        }
        if (out.size() != count) {
            throw ConfigError(where_ + ": '" + std::string(key) + "' needs " + std::to_string(count) + " numbers");
        }
        return out;
    }

    const toml::table* table(std::string_view key)
    {
        seen_.emplace_back(key);
        const auto* node = table_.get(key);
        if (node == nullptr) {
            return nullptr;
        }
        if (!node->is_table()) {
            throw ConfigError(where_ + ": '" + std::string(key) + "' must be a table");
        }
        return node->as_table();
    }

    const toml::array* array(std::string_view key)
    {
        seen_.emplace_back(key);
        const auto* node = table_.get(key);
        if (node == nullptr) {
            return nullptr;
        }
        if (!node->is_array()) {
            throw ConfigError(where_ + ": '" + std::string(key) + "' must be an array");
        }
        return node->as_array();
    }

    void reject_unknown() const
    {
        for (const auto& [key, node] : table_) {
            if (std::find(seen_.begin(), seen_.end(), key.str()) == seen_.end()) {
                throw ConfigError(where_ + ": unknown key '" + std::string(key.str()) + "'");
            }
        }
    }

    [[nodiscard]] const std::string& where() const noexcept { return where_; }

private:
    const toml::table& table_;
    std::string where_;
    std::vector<std::string> seen_;
};

inline UpaConfig parse_upa(const toml::table& t, const std::string& where)
{
    TomlReader r(t, where);
    UpaConfig upa;
    if (auto v = r.get<std::int64_t>("uh")) {
        upa.u_h = static_cast<int>(*v);
    }
    if (auto v = r.get<std::int64_t>("uv")) {
        upa.u_v = static_cast<int>(*v);
    }
    r.read("dh", upa.d_h);
    r.read("dv", upa.d_v);
    if (auto v = r.get<std::string>("pattern")) {
        upa.pattern = parse_pattern(*v);
    }
    r.reject_unknown();
    upa.validate();
    return upa;
}

inline const toml::table& element_table(const toml::node& node, const std::string& where)
{
    const auto* t = node.as_table();
    if (t == nullptr) {
        throw ConfigError(where + " must be a table");
    }
    return *t;
}

}  // namespace detail

/**
 * Drop configuration in TOML:
 *
 *     scenario = "UMi"
 *     model = "reference"            # or "ftr-fast"
 *     fc_ghz = 28.0
 *     bandwidth_hz = 100e6
 *     noise_figure_db = 7.0
 *     drops = 100
 *     seed = 1
 *     shadowing = true
 *     p_los = 0.9                    # optional override of the scenario LoS probability
 *
 *     [reference]                    # optional reference-channel knobs
 *     clusters = 0
 *     angular_spread_deg = 10.0
 *     k_factor_db = 9.0
 *
 *     [[gnb]]
 *     position = [0.0, 0.0, 10.0]
 *     bearing_deg = 0.0
 *     tx_power_dbm = 30.0
 *     upa = { uh = 8, uv = 8, dh = 0.5, dv = 0.5, pattern = "isotropic" }
 *
 *     [[ue]]                         # fixed UEs
 *     position = [50.0, 0.0, 1.5]
 *     upa = { uh = 2, uv = 2 }
 *
 *     [ue_drop]                      # UEs re-placed every drop
 *     count = 10
 *     center = [0.0, 0.0]
 *     radius = 100.0
 *     min_distance = 10.0
 *     height = 1.5
 *     upa = { uh = 2, uv = 2 }
 */
inline DropConfig DropConfig::parse(std::string_view text, const std::string& source)
{
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ConfigError("drop config " + source + ": " + std::string(e.description()));
    }
    DropConfig cfg;
    detail::TomlReader r(root, source);
    if (auto v = r.get<std::string>("scenario")) {
        cfg.scenario = parse_scenario(*v);
    }
    cfg.reference = ReferenceChannelConfig::for_scenario(cfg.scenario);
    if (auto v = r.get<std::string>("model")) {
        cfg.model = parse_model(*v);
    }
    r.read("fc_ghz", cfg.fc_ghz);
    r.read("bandwidth_hz", cfg.bandwidth_hz);
    r.read("noise_figure_db", cfg.noise_figure_db);
    r.read("drops", cfg.drops);
    r.read("seed", cfg.seed);
    r.read("shadowing", cfg.shadowing);
    r.read("cached_assembly", cfg.cached_assembly);
    if (auto v = r.get<double>("p_los")) {
        cfg.p_los = *v;
    }

    if (const auto* ref = r.table("reference")) {
        detail::TomlReader rr(*ref, source + ": [reference]");
        if (auto v = rr.get<std::int64_t>("clusters")) {
            cfg.reference.n_clusters = static_cast<int>(*v);
        }
        rr.read("angular_spread_deg", cfg.reference.angular_spread_deg);
        rr.read("k_factor_db", cfg.reference.k_factor_db);
        rr.read("k_factor_spread_db", cfg.reference.k_factor_spread_db);
        rr.read("power_decay", cfg.reference.power_decay);
        rr.read("power_jitter_db", cfg.reference.power_jitter_db);
        rr.read("max_elements", cfg.reference.max_elements);
        rr.reject_unknown();
    }

    if (const auto* gnbs = r.array("gnb")) {
        for (std::size_t i = 0; i < gnbs->size(); ++i) {
            const std::string where = source + ": gnb[" + std::to_string(i) + "]";
            detail::TomlReader g(detail::element_table(*gnbs->get(i), where), where);
            GnbSite site;
            if (const auto pos = g.numbers("position", 3); !pos.empty()) {
                site.position = {pos[0], pos[1], pos[2]};
            }
            if (auto v = g.get<double>("bearing_deg")) {
                site.bearing = *v * std::numbers::pi / 180.0;
            }
            g.read("tx_power_dbm", site.tx_power_dbm);
            if (const auto* upa = g.table("upa")) {
                site.upa = detail::parse_upa(*upa, where + ".upa");
            }
            g.reject_unknown();
            cfg.gnbs.push_back(site);
        }
    }
    if (const auto* ues = r.array("ue")) {
        for (std::size_t i = 0; i < ues->size(); ++i) {
            const std::string where = source + ": ue[" + std::to_string(i) + "]";
            detail::TomlReader u(detail::element_table(*ues->get(i), where), where);
            UeNode ue;
            if (const auto pos = u.numbers("position", 3); !pos.empty()) {
                ue.position = {pos[0], pos[1], pos[2]};
            }
            if (const auto* upa = u.table("upa")) {
                ue.upa = detail::parse_upa(*upa, where + ".upa");
            }
            u.reject_unknown();
            cfg.ues.push_back(ue);
        }
    }
    if (const auto* area = r.table("ue_drop")) {
        const std::string where = source + ": [ue_drop]";
        detail::TomlReader a(*area, where);
        UeDropArea d;
        a.read("count", d.count);
        if (const auto c = a.numbers("center", 2); !c.empty()) {
            d.center_x = c[0];
            d.center_y = c[1];
        }
        a.read("radius", d.radius);
        a.read("min_distance", d.min_distance);
        a.read("height", d.height);
        if (const auto* upa = a.table("upa")) {
            d.upa = detail::parse_upa(*upa, where + ".upa");
        }
        a.reject_unknown();
        cfg.ue_drop = d;
    }
    r.reject_unknown();
    cfg.validate();
    return cfg;
}

struct SinrRecord {
    std::size_t drop = 0;
    std::size_t ue = 0;
    std::size_t serving_gnb = 0;
    LinkCondition condition = LinkCondition::los;
    double sinr_db = 0.0;
    double rx_power_dbm = 0.0;
    double interference_dbm = -std::numeric_limits<double>::infinity();
    double noise_dbm = 0.0;
};

/// Direction of `to` as seen from `from` in a frame whose boresight has azimuth `bearing`.
inline Direction local_direction(const Position& from, const Position& to, double bearing)
{
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double dz = to.z - from.z;
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(r > 0.0)) {
        return {};
    }
    const double theta = std::acos(std::clamp(dz / r, -1.0, 1.0));
    return {theta, Direction::wrap_angle(std::atan2(dy, dx) - bearing)};
}

struct PlacedUe {
    Position position;
    UpaConfig upa;
};

/// UE positions for one drop: fixed UEs first, then those placed in ue_drop.
inline std::vector<PlacedUe> place_ues(const DropConfig& cfg, std::size_t drop_index)
{
    std::vector<PlacedUe> out;
    for (const auto& u : cfg.ues) {
        out.push_back({u.position, u.upa});
    }
    if (cfg.ue_drop) {
        const auto& area = *cfg.ue_drop;
        RngStream rng = RngStream::from_path(cfg.seed, {stream::placement, drop_index});
        for (std::size_t i = 0; i < area.count; ++i) {
            for (int attempt = 0;; ++attempt) {
                if (attempt > 100000) {
                    throw ConfigError("ue_drop: cannot place a UE outside min_distance of every gNB");
                }
                const double r = area.radius * std::sqrt(rng.uniform());
                const double a = rng.phase();
                const Position p{area.center_x + r * std::cos(a), area.center_y + r * std::sin(a), area.height};
                const bool clear = std::all_of(cfg.gnbs.begin(), cfg.gnbs.end(), [&](const GnbSite& g) {
                    return std::hypot(p.x - g.position.x, p.y - g.position.y) >= area.min_distance;
                });
                if (clear) {
                    out.push_back({p, area.upa});
                    break;
                }
            }
        }
    }
    return out;
}

/// Everything run_drop needs besides the drop configuration.
struct SimulationInputs {
    const ScenarioTable* scenarios = nullptr;
    const CalibrationTable* calibration = nullptr;  // required for ftr-fast
    Kernel kernel = Kernel::optimized;
};

/**
 * One drop. Every (gNB, UE) link gets its own LoS draw, shadowing sample and
 * fading draw from substreams keyed by (drop, gNB, UE), so both channel models
 * see the same geometry, LoS states and shadowing. UEs attach to the gNB with
 * the strongest large-scale received power; each gNB schedules one of its
 * UEs at random and interferes toward it (a gNB without UEs keeps its beam at
 * boresight). The UE steers at its serving gNB.
 */
inline std::vector<SinrRecord> run_drop(const DropConfig& cfg, const SimulationInputs& in, std::size_t drop_index)
{
    if (in.scenarios == nullptr) {
        throw ConfigError("run_drop: scenario table missing");
    }
    if (cfg.model == ChannelModel::ftr_fast && in.calibration == nullptr) {
        throw ConfigError("run_drop: ftr-fast needs a calibration table");
    }
    const auto ues = place_ues(cfg, drop_index);
    const std::size_t n_g = cfg.gnbs.size();
    const std::size_t n_u = ues.size();
    const double noise_dbm = noise_power_dbm(cfg.bandwidth_hz, cfg.noise_figure_db);

    struct Link {
        LinkCondition condition;
        double loss_db;
        Direction at_gnb;  // toward the UE, gNB frame
        Direction at_ue;   // toward the gNB, UE frame (oriented later)
    };
    std::vector<Link> links(n_g * n_u);
    auto link = [&](std::size_t g, std::size_t u) -> Link& { return links[g * n_u + u]; };

    for (std::size_t g = 0; g < n_g; ++g) {
        for (std::size_t u = 0; u < n_u; ++u) {
            const auto& site = cfg.gnbs[g];
            const auto& p = ues[u].position;
            const double d2d = std::hypot(p.x - site.position.x, p.y - site.position.y);
            const double dz = p.z - site.position.z;
            LinkGeometry geo{std::max(std::sqrt(d2d * d2d + dz * dz), 1e-3), d2d, cfg.fc_ghz};
            RngStream los_rng = RngStream::from_path(cfg.seed, {stream::los, drop_index, g, u});
            const auto condition = determine_los(cfg.scenario, d2d, los_rng, cfg.p_los);
            const auto& params = in.scenarios->get(cfg.scenario, condition);
            RngStream sf_rng = RngStream::from_path(cfg.seed, {stream::shadowing, drop_index, g, u});
            const double shadow = shadowing_db(params, sf_rng, cfg.shadowing);
            link(g, u) = {condition, large_scale_loss_db(params, geo, shadow), local_direction(site.position, p, site.bearing), {}};
        }
    }

    std::vector<std::size_t> serving(n_u, 0);
    std::vector<std::vector<std::size_t>> attached(n_g);
    for (std::size_t u = 0; u < n_u; ++u) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < n_g; ++g) {
            const double p = cfg.gnbs[g].tx_power_dbm - link(g, u).loss_db;
            if (p > best) {
                best = p;
                serving[u] = g;
            }
        }
        attached[serving[u]].push_back(u);
    }
    // UE arrays face their serving gNB.
    for (std::size_t u = 0; u < n_u; ++u) {
        const auto& s = cfg.gnbs[serving[u]].position;
        const auto& p = ues[u].position;
        const double bearing = std::atan2(s.y - p.y, s.x - p.x);
        for (std::size_t g = 0; g < n_g; ++g) {
            link(g, u).at_ue = local_direction(p, cfg.gnbs[g].position, bearing);
        }
    }
    RngStream sched = RngStream::from_path(cfg.seed, {stream::scheduling, drop_index});
    std::vector<std::optional<std::size_t>> scheduled(n_g);
    for (std::size_t g = 0; g < n_g; ++g) {
        if (!attached[g].empty()) {
            scheduled[g] = attached[g][sched.index(attached[g].size())];
        }
    }

    // Received power of gNB g at UE u with gNB beam toward `target` (nullopt: boresight).
    auto received = [&](std::size_t g, std::size_t u, std::optional<std::size_t> target) {
        const auto& site = cfg.gnbs[g];
        const auto& l = link(g, u);
        const Direction steer_tx = target ? link(g, *target).at_gnb : Direction{};
        const Direction steer_rx = link(serving[u], u).at_ue;
        double gain = 0.0;
        double fading = 1.0;
        if (cfg.model == ChannelModel::ftr_fast) {
            const double eta = in.scenarios->get(cfg.scenario, l.condition).eta;
            gain = beamforming_gain(site.upa, l.at_gnb, steer_tx, LinkCondition::los, 1.0) *
                   beamforming_gain(ues[u].upa, l.at_ue, steer_rx, LinkCondition::los, 1.0);
            if (l.condition == LinkCondition::nlos) {
                gain *= eta;
            }
            RngStream rng = RngStream::from_path(cfg.seed, {stream::fading, drop_index, g, u});
            fading = sample_ftr_power(lookup_ftr_params(*in.calibration, cfg.scenario, l.condition), rng);
        } else {
            RngStream rng = RngStream::from_path(cfg.seed, {stream::clusters, drop_index, g, u});
            const auto cs = generate_cluster_params(cfg.reference, l.condition, rng, l.at_gnb, l.at_ue);
            const auto h = assemble_channel(cs, site.upa, ues[u].upa, cfg.cached_assembly, nullptr, cfg.reference.max_elements);
            gain = small_scale_gain(h, steering_vector(ues[u].upa, steer_rx), steering_vector(site.upa, steer_tx), in.kernel) *
                   element_gain(site.upa.pattern, l.at_gnb) * element_gain(ues[u].upa.pattern, l.at_ue);
        }
        gain = std::max(gain, std::numeric_limits<double>::min());
        fading = std::max(fading, std::numeric_limits<double>::min());
        return rx_power_dbm(site.tx_power_dbm, l.loss_db, gain, fading);
    };

    std::vector<SinrRecord> out(n_u);
    for (std::size_t u = 0; u < n_u; ++u) {
        SinrRecord rec;
        rec.drop = drop_index;
        rec.ue = u;
        rec.serving_gnb = serving[u];
        rec.condition = link(serving[u], u).condition;
        rec.noise_dbm = noise_dbm;
        rec.rx_power_dbm = received(serving[u], u, u);
        double interference_mw = 0.0;
        for (std::size_t g = 0; g < n_g; ++g) {
            if (g != serving[u]) {
                interference_mw += std::pow(10.0, received(g, u, scheduled[g]) / 10.0);
            }
        }
        rec.interference_dbm = interference_mw > 0.0 ? 10.0 * std::log10(interference_mw) : -std::numeric_limits<double>::infinity();
        rec.sinr_db = rec.rx_power_dbm - 10.0 * std::log10(interference_mw + std::pow(10.0, noise_dbm / 10.0));
        out[u] = rec;
    }
    return out;
}

/// All drops of cfg, concatenated in drop order.
inline std::vector<SinrRecord> run_drops(const DropConfig& cfg, const SimulationInputs& in, unsigned workers = 0)
{
    cfg.validate();
    std::vector<std::vector<SinrRecord>> per_drop(cfg.drops);
    parallel_for(
        cfg.drops, [&](std::size_t d) { per_drop[d] = run_drop(cfg, in, d); }, workers);
    std::vector<SinrRecord> out;
    for (auto& v : per_drop) {
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

inline std::vector<EcdfStep> sinr_ecdf(const std::vector<SinrRecord>& records)
{
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
        values.push_back(r.sinr_db);
    }
    return ecdf(std::move(values));
}

inline void write_sinr_csv(std::ostream& os, const std::vector<SinrRecord>& records)
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "drop,ue,serving_gnb,condition,sinr_db,rx_power_dbm,interference_dbm,noise_dbm\n";
    for (const auto& r : records) {
        os << r.drop << ',' << r.ue << ',' << r.serving_gnb << ',' << to_string(r.condition) << ',' << r.sinr_db << ','
           << r.rx_power_dbm << ',' << r.interference_dbm << ',' << r.noise_dbm << '\n';
    }
}

}  // namespace mimosim
