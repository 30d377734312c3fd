#pragma once

#include "pfto/adapt.hpp"
#include "pfto/problem.hpp"

#include <string>

namespace pfto {

struct RunConfig {
    ProblemSpec spec;
    AfemConfig afem;
};

/// Flat `key = value` file. `preset` selects the base (default left_inflow), every other
/// key overrides one field. Blank lines and text after '#' are ignored.
[[nodiscard]] RunConfig load_config(const std::string& path);
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Applies one override; throws a Config error naming the key on bad input.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Validates every parameter group; errors name the offending field.
void validate(const RunConfig& cfg);

[[nodiscard]] const std::vector<std::string>& config_keys();

} // namespace pfto
