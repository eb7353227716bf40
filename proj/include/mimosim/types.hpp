// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"

#include <string>
#include <string_view>

namespace mimosim {

enum class LinkCondition { los, nlos };

inline std::string_view to_string(LinkCondition c) noexcept { return c == LinkCondition::los ? "LoS" : "NLoS"; }

inline LinkCondition parse_condition(std::string_view s)
{
    if (s == "LoS" || s == "los" || s == "LOS") {
        return LinkCondition::los;
    }
    if (s == "NLoS" || s == "nlos" || s == "NLOS") {
        return LinkCondition::nlos;
    }
    throw ConfigError("unknown LoS condition '" + std::string(s) + "' (expected LoS or NLoS)");
}

enum class Scenario { umi, uma, rma, inh_office_mixed, inh_office_open };

inline constexpr Scenario kAllScenarios[] = {Scenario::umi, Scenario::uma, Scenario::rma, Scenario::inh_office_mixed,
                                             Scenario::inh_office_open};

inline std::string_view to_string(Scenario s) noexcept
{
    switch (s) {
    case Scenario::umi: return "UMi";
    case Scenario::uma: return "UMa";
    case Scenario::rma: return "RMa";
    case Scenario::inh_office_mixed: return "InH-OfficeMixed";
    case Scenario::inh_office_open: return "InH-OfficeOpen";
    }
    return "?";
}

inline Scenario parse_scenario(std::string_view s)
{
    for (auto sc : kAllScenarios) {
        if (to_string(sc) == s) {
            return sc;
        }
    }
    throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

}  // namespace mimosim
