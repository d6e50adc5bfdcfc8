#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stegokey/hierarchy.hpp"
#include "stegokey/poly_keys.hpp"

namespace stegokey {

/// One deployment: the scheme parameters plus the class DAG, loaded from the
/// shared text config. Format, one directive per line, '#' comments:
///
///   [scheme]
///   seed = <hex bytes>
///   t = 2
///   m = 7            # optional; minimal valid value when absent
///   p = 2147483647
///   epoch = 0
///   dummies = 11,12,13
///
///   class 1 param=5 parents=
///   class 3 param=13 parents=1,2 users=31,32
struct Config {
    Scheme scheme;
    Hierarchy hierarchy;
    std::optional<std::uint32_t> configured_m; // as written, before choose_m
    std::vector<std::string> warnings;         // non-fatal validation notes
};

Config parse_config(const std::string& text);
std::string serialize_config(const Config& config);

Config load_config(const std::string& path);

} // namespace stegokey
