#pragma once

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "covshift/distributions.hpp"

namespace covshift {

// Raised for malformed or unreadable configuration (instance files, specs).
class config_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Instance documents look like
//   {"pair": {"kind": "hard_big", "alpha": 2, "C": 12, "M": 16}}
//   {"pair": {"kind": "hard_small", "alpha": 0.5}}
//   {"pair": {"kind": "power", "kappa": 1}}
//   {"pair": {"kind": "custom", "P": <dist>, "Q": <dist>, "family": {...}}}
// with <dist> one of
//   {"type": "uniform", "a": 0, "b": 1}, {"type": "power", "kappa": 1},
//   {"type": "reverse_power", "alpha": 2}, {"type": "point_mass", "location": 1},
//   {"type": "mixture", "components": [{"weight": 0.5, "dist": <dist>}, ...]}
// and family {"kind": "big"|"small", "alpha", "C"} | {"kind": "transfer",
// "gamma", "K"?} | {"kind": "lr_bounded", "b"}.

Distribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const Distribution& dist);

SourceTargetPair pair_from_json(const nlohmann::json& j);
nlohmann::json pair_to_json(const SourceTargetPair& pair);

nlohmann::json read_json_file(const std::filesystem::path& path);
SourceTargetPair load_instance(const std::filesystem::path& path);

} // namespace covshift
