#include "kneecast/scenario.hpp"

#include <algorithm>
#include <cctype>

#include "kneecast/error.hpp"

namespace kneecast {

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::SIC: return "SIC";
    case Scenario::DIC: return "DIC";
    case Scenario::SIC_F: return "SIC_F";
    case Scenario::DIC_F: return "DIC_F";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  std::string norm(name);
  std::transform(norm.begin(), norm.end(), norm.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  if (norm == "SIC") return Scenario::SIC;
  if (norm == "DIC") return Scenario::DIC;
  if (norm == "SIC_F") return Scenario::SIC_F;
  if (norm == "DIC_F") return Scenario::DIC_F;
  throw ConfigError("unknown scenario '" + std::string(name) + "'", "scenario");
}

}  // namespace kneecast
