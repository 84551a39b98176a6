#include "adasgd/oracles/cache.hpp"

#include <cstdio>
#include <fstream>

namespace adasgd::oracles {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

OracleCache::OracleCache(std::filesystem::path root) : dir_(std::move(root) / "oracle-cache") {}

std::filesystem::path OracleCache::path_for(std::string_view kind, const nlohmann::json& key) const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(std::string(kind) + "\n" + key.dump())));
  return dir_ / (std::string(kind) + "-" + hex + ".json");
}

std::optional<nlohmann::json> OracleCache::load(std::string_view kind, const nlohmann::json& key) const {
  std::ifstream in(path_for(kind, key));
  if (!in) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(in);
    if (doc.at("kind") != kind || doc.at("key") != key) return std::nullopt;
    return doc.at("value");
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void OracleCache::store(std::string_view kind, const nlohmann::json& key, const nlohmann::json& value) const {
  std::filesystem::create_directories(dir_);
  const auto target = path_for(kind, key);
  const auto temp = std::filesystem::path(target).concat(".tmp");
  {
    std::ofstream out(temp);
    out << nlohmann::json{{"kind", kind}, {"key", key}, {"value", value}}.dump(2) << '\n';
  }
  std::filesystem::rename(temp, target);
}

}  // namespace adasgd::oracles
