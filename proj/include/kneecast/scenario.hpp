#pragma once

#include <string>
#include <string_view>

namespace kneecast {

/// Input configuration: EMG only (SIC), EMG + knee history (DIC), each
/// optionally with thigh/shank interaction forces.
enum class Scenario { SIC, DIC, SIC_F, DIC_F };

constexpr bool uses_kinematics(Scenario s) { return s == Scenario::DIC || s == Scenario::DIC_F; }
constexpr bool uses_forces(Scenario s) { return s == Scenario::SIC_F || s == Scenario::DIC_F; }

std::string_view to_string(Scenario s);
/// Accepts "SIC", "DIC", "SIC_F", "DIC_F" (case-insensitive, '-' allowed for '_').
Scenario parse_scenario(std::string_view name);

}  // namespace kneecast
