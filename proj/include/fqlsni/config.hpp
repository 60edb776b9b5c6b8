#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fqlsni/scenario.hpp"

namespace fqlsni {

/// Parses a sectioned key = value scenario file. Missing keys keep their
/// defaults; unknown sections or keys throw ConfigError so typos surface.
///
///   [scenario]  name duration dt seed output_dir qtable_dump_interval
///               settle_band_fraction settle_band_floor
///   [plant]     m Ix Iy Iz Jr Km Kf L g Cdx Cdy Cdz Cax Cay Caz
///   [actuator]  enabled thrust_max moment_max
///   [fql]       eta sigma explore_duration epsilon gamma_actions tau_actions
///   [gain_bounds] gamma_min gamma_max tau_min tau_max
///   [rules]     centers widths labels input_min input_max
///   [channel.z] [channel.roll] [channel.pitch] [channel.yaw]
///               controller reference amplitude period offset start
///               gamma tau beta kp ki kd derivative_tf integrator_limit
///               fuzzy_gamma_rates fuzzy_tau_rates
///   [dryden]    enabled length_scales intensities airspeed cap seed
///   [gust]      enabled amplitude duration start axis
///   [coupling]  wind_torque_gain
///   [bias]      enabled mass Ix Iy Iz
///
/// List values are comma separated. When a channel sets gamma but not beta,
/// beta becomes gamma + 1.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: every field written out explicitly.
std::string to_config_text(const ScenarioConfig& cfg);

}  // namespace fqlsni
