#pragma once

#include <algorithm>
#include <cstdint>

#include "driftnet/common.hpp"

namespace driftnet {

enum class Stage { Early, Chronic, Late };

/// A virus lineage with an evolvable early transmission rate.  family ties a
/// strain back to the seeded strain it descends from; serial is unique per
/// mutation event within a run.
struct Strain {
    double chronic_rate = 0.0;
    double early_rate = 0.0;
    int family = 0;
    std::uint64_t serial = 0;

    double early_factor() const {
        return chronic_rate > 0.0 ? early_rate / chronic_rate : 0.0;
    }

    static Strain from_factor(double chronic, double factor, int family,
                              std::uint64_t serial) {
        Strain s;
        s.chronic_rate = chronic;
        s.early_rate = std::min(1.0, factor * chronic);
        s.family = family;
        s.serial = serial;
        return s;
    }
};

struct Infection {
    Strain strain;
    Stage stage = Stage::Early;
    Step infected_at = 0;
    std::int64_t early_duration = 0;   // drawn at infection (geometric model)
    std::int64_t chronic_duration = 0; // drawn on entering Chronic when a late stage exists
    Step chronic_at = -1;
    bool treated = false;

    // Standard tests only see the infection once the early stage has passed.
    bool detectable() const { return stage != Stage::Early; }

    double stage_rate(double late_factor = 7.0) const {
        switch (stage) {
        case Stage::Early: return strain.early_rate;
        case Stage::Chronic: return strain.chronic_rate;
        case Stage::Late: return std::min(1.0, late_factor * strain.chronic_rate);
        }
        return strain.chronic_rate;
    }
};

} // namespace driftnet
