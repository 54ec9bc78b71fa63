#include "aqp/store.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace aqp {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

void append_entries(std::string& out, const QueryVector& v) {
  out += '[';
  bool first = true;
  for (const auto& [id, w] : v.entries()) {
    if (!first) out += ',';
    first = false;
    out += '[';
    out += std::to_string(id);
    out += ',';
    out += fmt_double(w);
    out += ']';
  }
  out += ']';
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw StoreIoError("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw StoreIoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw StoreIoError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw StoreIoError("read failed: " + path);
  return ss.str();
}

const json& require(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw StoreSchemaError(std::string(where) + ": missing key '" + key + "'");
  }
  return *it;
}

std::uint64_t as_uint(const json& v, const char* where) {
  if (!v.is_number_unsigned()) {
    throw StoreSchemaError(std::string(where) + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::uint32_t as_uint32(const json& v, const char* where) {
  const std::uint64_t n = as_uint(v, where);
  if (n > UINT32_MAX) throw StoreSchemaError(std::string(where) + ": value out of range");
  return static_cast<std::uint32_t>(n);
}

double as_double(const json& v, const char* where) {
  if (!v.is_number()) throw StoreSchemaError(std::string(where) + ": expected a number");
  return v.get<double>();
}

QueryVector as_vector(const json& v, const char* where) {
  if (!v.is_array()) throw StoreSchemaError(std::string(where) + ": expected an array");
  std::vector<QueryVector::Entry> entries;
  entries.reserve(v.size());
  for (const auto& pair : v) {
    if (!pair.is_array() || pair.size() != 2) {
      throw StoreSchemaError(std::string(where) + ": expected [feature_id, weight] pairs");
    }
    entries.emplace_back(as_uint32(pair[0], where), as_double(pair[1], where));
  }
  try {
    return QueryVector(std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw StoreSchemaError(std::string(where) + ": " + e.what());
  }
}

}  // namespace

std::uint32_t next_category_id(const ProfileStore& store) {
  std::uint32_t next = 0;
  for (const auto& p : store.profiles) {
    if (!p.categories.empty()) next = std::max(next, p.categories.back().id + 1);
  }
  return next;
}

std::uint32_t next_plan_id(const ProfileStore& store) {
  const auto& plans = store.registry.plans();
  return plans.empty() ? 0 : plans.rbegin()->first + 1;
}

void save_store(const ProfileStore& store, const std::string& path) {
  std::string out;
  out.reserve(1 << 16);
  out += "{\"corpus\":{\"feature_query_counts\":[";
  bool first = true;
  for (const auto& [id, n] : store.corpus.feature_query_counts()) {
    if (!first) out += ',';
    first = false;
    out += '[';
    out += std::to_string(id);
    out += ',';
    out += std::to_string(n);
    out += ']';
  }
  out += "],\"total_queries\":";
  out += std::to_string(store.corpus.total_queries());
  out += "},\"profiles\":[";

  first = true;
  for (const auto& p : store.profiles) {
    if (!first) out += ',';
    first = false;
    out += "{\"categories\":[";
    bool first_cat = true;
    for (const auto& c : p.categories) {
      if (!first_cat) out += ',';
      first_cat = false;
      out += "{\"created_at\":";
      out += std::to_string(c.created_at);
      out += ",\"desc_neg\":";
      append_entries(out, c.desc_neg);
      out += ",\"desc_pos\":";
      append_entries(out, c.desc_pos);
      out += ",\"id\":";
      out += std::to_string(c.id);
      out += ",\"linked_plan\":";
      out += c.linked_plan ? std::to_string(*c.linked_plan) : "null";
      out += ",\"usage_count\":";
      out += std::to_string(c.usage_count);
      out += '}';
    }
    out += "],\"user_id\":";
    out += std::to_string(p.user_id);
    out += '}';
  }
  out += "],\"registry\":{\"default_fresh_cost\":";
  out += fmt_double(store.registry.default_fresh_cost());
  out += ",\"default_prepared_cost\":";
  out += fmt_double(store.registry.default_prepared_cost());
  out += ",\"fallback_cost_total\":";
  out += fmt_double(store.registry.fallback_cost_total());
  out += ",\"fallback_count\":";
  out += std::to_string(store.registry.fallback_count());
  out += ",\"plans\":[";
  first = true;
  for (const auto& [id, plan] : store.registry.plans()) {
    if (!first) out += ',';
    first = false;
    out += "{\"category_id\":";
    out += std::to_string(plan.category_id);
    out += ",\"fresh_cost\":";
    out += fmt_double(plan.fresh_cost);
    out += ",\"hit_count\":";
    out += std::to_string(plan.hit_count);
    out += ",\"plan_id\":";
    out += std::to_string(plan.plan_id);
    out += ",\"prepared_cost\":";
    out += fmt_double(plan.prepared_cost);
    out += '}';
  }
  out += "],\"prepared_cost_total\":";
  out += fmt_double(store.registry.prepared_cost_total());
  out += "},\"version\":";
  out += json_string(kStoreVersion);
  out += "}\n";
  write_text(out, path);
}

ProfileStore load_store(const std::string& path) {
  const std::string text = read_text(path);
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw StoreSchemaError("malformed JSON: " + path);
  if (!doc.is_object()) throw StoreSchemaError("store root must be an object");

  const json& version = require(doc, "version", "store");
  if (!version.is_string()) throw StoreSchemaError("store: version must be a string");
  if (version.get<std::string>() != kStoreVersion) {
    throw StoreVersionError("unsupported store version: " + version.get<std::string>());
  }

  ProfileStore store;

  const json& corpus = require(doc, "corpus", "store");
  if (!corpus.is_object()) throw StoreSchemaError("corpus must be an object");
  std::map<FeatureId, std::uint64_t> counts;
  const json& fqc = require(corpus, "feature_query_counts", "corpus");
  if (!fqc.is_array()) throw StoreSchemaError("corpus: feature_query_counts must be an array");
  for (const auto& pair : fqc) {
    if (!pair.is_array() || pair.size() != 2) {
      throw StoreSchemaError("corpus: expected [feature_id, count] pairs");
    }
    const FeatureId id = as_uint32(pair[0], "corpus");
    if (!counts.emplace(id, as_uint(pair[1], "corpus")).second) {
      throw StoreSchemaError("corpus: duplicate feature id " + std::to_string(id));
    }
  }
  try {
    store.corpus = CorpusStats::from_parts(as_uint(require(corpus, "total_queries", "corpus"), "corpus"),
                                           std::move(counts));
  } catch (const std::invalid_argument& e) {
    throw StoreSchemaError(std::string("corpus: ") + e.what());
  }

  const json& profiles = require(doc, "profiles", "store");
  if (!profiles.is_array()) throw StoreSchemaError("profiles must be an array");
  for (const auto& pj : profiles) {
    if (!pj.is_object()) throw StoreSchemaError("profile must be an object");
    UserProfile p;
    p.user_id = as_uint32(require(pj, "user_id", "profile"), "profile.user_id");
    const json& cats = require(pj, "categories", "profile");
    if (!cats.is_array()) throw StoreSchemaError("profile: categories must be an array");
    for (const auto& cj : cats) {
      if (!cj.is_object()) throw StoreSchemaError("category must be an object");
      Category c;
      c.id = as_uint32(require(cj, "id", "category"), "category.id");
      c.desc_pos = as_vector(require(cj, "desc_pos", "category"), "category.desc_pos");
      c.desc_neg = as_vector(require(cj, "desc_neg", "category"), "category.desc_neg");
      c.usage_count = as_uint(require(cj, "usage_count", "category"), "category.usage_count");
      if (c.usage_count == 0) throw StoreSchemaError("category: usage_count must be positive");
      c.created_at = as_uint(require(cj, "created_at", "category"), "category.created_at");
      const json& lp = require(cj, "linked_plan", "category");
      if (!lp.is_null()) c.linked_plan = as_uint32(lp, "category.linked_plan");
      if (!p.categories.empty() && c.id <= p.categories.back().id) {
        throw StoreSchemaError("profile " + std::to_string(p.user_id) +
                               ": category ids must be strictly increasing");
      }
      p.categories.push_back(std::move(c));
    }
    store.profiles.push_back(std::move(p));
  }
  std::sort(store.profiles.begin(), store.profiles.end(),
            [](const UserProfile& a, const UserProfile& b) { return a.user_id < b.user_id; });
  for (std::size_t i = 1; i < store.profiles.size(); ++i) {
    if (store.profiles[i].user_id == store.profiles[i - 1].user_id) {
      throw StoreSchemaError("duplicate profile for user " +
                             std::to_string(store.profiles[i].user_id));
    }
  }

  const json& reg = require(doc, "registry", "store");
  if (!reg.is_object()) throw StoreSchemaError("registry must be an object");
  std::map<std::uint32_t, PlanCandidate> plans;
  const json& plans_json = require(reg, "plans", "registry");
  if (!plans_json.is_array()) throw StoreSchemaError("registry: plans must be an array");
  for (const auto& pj : plans_json) {
    if (!pj.is_object()) throw StoreSchemaError("plan must be an object");
    PlanCandidate plan;
    plan.plan_id = as_uint32(require(pj, "plan_id", "plan"), "plan.plan_id");
    plan.category_id = as_uint32(require(pj, "category_id", "plan"), "plan.category_id");
    plan.prepared_cost = as_double(require(pj, "prepared_cost", "plan"), "plan.prepared_cost");
    plan.fresh_cost = as_double(require(pj, "fresh_cost", "plan"), "plan.fresh_cost");
    plan.hit_count = as_uint(require(pj, "hit_count", "plan"), "plan.hit_count");
    if (!plans.emplace(plan.plan_id, plan).second) {
      throw StoreSchemaError("registry: duplicate plan id " + std::to_string(plan.plan_id));
    }
  }
  try {
    store.registry = PlanRegistry::from_parts(
        std::move(plans),
        as_double(require(reg, "default_prepared_cost", "registry"), "registry.default_prepared_cost"),
        as_double(require(reg, "default_fresh_cost", "registry"), "registry.default_fresh_cost"),
        as_uint(require(reg, "fallback_count", "registry"), "registry.fallback_count"),
        as_double(require(reg, "prepared_cost_total", "registry"), "registry.prepared_cost_total"),
        as_double(require(reg, "fallback_cost_total", "registry"), "registry.fallback_cost_total"));
  } catch (const std::invalid_argument& e) {
    throw StoreSchemaError(std::string("registry: ") + e.what());
  }

  for (const auto& p : store.profiles) {
    for (const auto& c : p.categories) {
      if (c.linked_plan && store.registry.plan(*c.linked_plan) == nullptr) {
        throw StoreSchemaError("category " + std::to_string(c.id) +
                               " links missing plan " + std::to_string(*c.linked_plan));
      }
    }
  }
  return store;
}

void export_metrics(const Metrics& m, const std::string& path) {
  const std::size_t n = m.proficiency.size();
  if (m.window_hit_rate.size() != n || m.window_cost_adaptive.size() != n ||
      m.window_cost_baseline.size() != n) {
    throw std::invalid_argument("metrics window vectors differ in length");
  }
  std::string out = "window,proficiency,hit_rate,cost_adaptive,cost_baseline\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(i);
    out += ',';
    out += fmt_double(m.proficiency[i]);
    out += ',';
    out += fmt_double(m.window_hit_rate[i]);
    out += ',';
    out += fmt_double(m.window_cost_adaptive[i]);
    out += ',';
    out += fmt_double(m.window_cost_baseline[i]);
    out += '\n';
  }
  write_text(out, path);
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
  const SimConfig& cfg = manifest.config;
  std::string out = "{\"baseline\":";
  out += manifest.baseline ? "true" : "false";
  out += ",\"command\":";
  out += json_string(manifest.command);
  out += ",\"config\":{\"advise_threshold\":";
  out += fmt_double(cfg.advise_threshold);
  out += ",\"drift_at\":";
  out += cfg.drift_at ? std::to_string(*cfg.drift_at) : "null";
  out += ",\"drift_permutation\":";
  if (cfg.drift_permutation) {
    out += '[';
    for (std::size_t i = 0; i < cfg.drift_permutation->size(); ++i) {
      if (i) out += ',';
      out += std::to_string((*cfg.drift_permutation)[i]);
    }
    out += ']';
  } else {
    out += "null";
  }
  out += ",\"fresh_cost\":";
  out += fmt_double(cfg.fresh_cost);
  out += ",\"learn\":{\"alpha\":";
  out += fmt_double(cfg.learn.alpha);
  out += ",\"beta\":";
  out += fmt_double(cfg.learn.beta);
  out += ",\"clamp_negative\":";
  out += cfg.learn.clamp_negative ? "true" : "false";
  out += ",\"gamma\":";
  out += fmt_double(cfg.learn.gamma);
  out += ",\"lambda\":";
  out += fmt_double(cfg.learn.lambda);
  out += ",\"theta\":";
  out += fmt_double(cfg.learn.theta);
  out += "},\"num_groups\":";
  out += std::to_string(cfg.num_groups);
  out += ",\"num_queries\":";
  out += std::to_string(cfg.num_queries);
  out += ",\"num_templates\":";
  out += std::to_string(cfg.num_templates);
  out += ",\"num_users\":";
  out += std::to_string(cfg.num_users);
  out += ",\"prepared_cost\":";
  out += fmt_double(cfg.prepared_cost);
  out += ",\"seed\":";
  out += std::to_string(cfg.seed);
  out += ",\"warmup_fraction\":";
  out += fmt_double(cfg.warmup_fraction);
  out += ",\"window_size\":";
  out += std::to_string(cfg.window_size);
  out += "},\"end_event\":";
  out += std::to_string(manifest.end_event);
  out += ",\"metrics_path\":";
  out += json_string(manifest.metrics_path);
  out += ",\"start_event\":";
  out += std::to_string(manifest.start_event);
  out += ",\"store_path\":";
  out += manifest.store_path ? json_string(*manifest.store_path) : "null";
  out += ",\"version\":";
  out += json_string(kManifestVersion);
  out += "}\n";
  write_text(out, path);
}

}  // namespace aqp
