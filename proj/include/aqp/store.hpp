#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqp/plan_adviser.hpp"
#include "aqp/profile.hpp"
#include "aqp/vector_model.hpp"
#include "aqp/workload_sim.hpp"

namespace aqp {

inline constexpr const char* kStoreVersion = "aqp-store/1";
inline constexpr const char* kManifestVersion = "aqp-manifest/1";

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The file could not be read or written.
struct StoreIoError : StoreError {
  using StoreError::StoreError;
};
// The file parses but carries an unsupported version tag.
struct StoreVersionError : StoreError {
  using StoreError::StoreError;
};
// The file is not valid JSON or violates the store schema.
struct StoreSchemaError : StoreError {
  using StoreError::StoreError;
};

// Everything long-lived: corpus statistics, per-user profiles (sorted by
// user id), and the plan registry.
struct ProfileStore {
  CorpusStats corpus;
  std::vector<UserProfile> profiles;
  PlanRegistry registry;

  friend bool operator==(const ProfileStore&, const ProfileStore&) = default;
};

// Lowest ids not yet taken, for allocating across all profiles.
std::uint32_t next_category_id(const ProfileStore& store);
std::uint32_t next_plan_id(const ProfileStore& store);

// Writes the canonical serialization: keys sorted, no insignificant
// whitespace, reals printed with %.17g. Equal stores produce equal bytes.
void save_store(const ProfileStore& store, const std::string& path);

// Loads and validates a store file. Throws StoreIoError, StoreVersionError,
// or StoreSchemaError.
ProfileStore load_store(const std::string& path);

// Per-window CSV with the exact header
//   window,proficiency,hit_rate,cost_adaptive,cost_baseline
// Deterministic bytes for equal metrics.
void export_metrics(const Metrics& m, const std::string& path);

// Reproducibility sidecar written next to run outputs.
struct RunManifest {
  std::string command;
  SimConfig config;
  bool baseline = false;
  std::uint64_t start_event = 0;
  std::uint64_t end_event = 0;  // exclusive
  std::string metrics_path;
  std::optional<std::string> store_path;
};

void save_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace aqp
