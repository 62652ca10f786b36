#pragma once

#include "datamon/monitor.hpp"

#include <optional>
#include <string>

namespace datamon {

constexpr int cache_format_version = 1;

/// Content digest (FNV-1a, hex) of the inputs that determine the artifacts.
std::string artifact_digest(const Property& p, const Signature& sig, const TheoryConfig& cfg);

std::string artifacts_to_json(const Artifacts& art, const std::string& digest);
/// Throws Error on a version or digest mismatch.
Artifacts artifacts_from_json(const std::string& text, const Signature& sig, const std::string& digest);

/// dir/<digest>.json, or nullopt when absent.
std::optional<Artifacts> load_cached(const std::string& dir, const Signature& sig, const std::string& digest);
void store_cached(const std::string& dir, const Artifacts& art, const std::string& digest);

} // namespace datamon
