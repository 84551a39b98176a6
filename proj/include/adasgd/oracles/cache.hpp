#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace adasgd::oracles {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// JSON oracle results stored as <root>/oracle-cache/<kind>-<hash>.json, where
/// the hash covers the kind and the canonical dump of the key document.
class OracleCache {
 public:
  explicit OracleCache(std::filesystem::path root);

  std::filesystem::path path_for(std::string_view kind, const nlohmann::json& key) const;
  /// Returns the cached value if present and its stored key matches.
  std::optional<nlohmann::json> load(std::string_view kind, const nlohmann::json& key) const;
  void store(std::string_view kind, const nlohmann::json& key, const nlohmann::json& value) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace adasgd::oracles
