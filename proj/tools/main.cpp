#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aqp/ga_optimizer.hpp"
#include "aqp/plan_adviser.hpp"
#include "aqp/profile.hpp"
#include "aqp/store.hpp"
#include "aqp/vector_model.hpp"
#include "aqp/workload_sim.hpp"

namespace {

using namespace aqp;

// One record of a query file: the raw feature counts of a query plus the
// feedback that accompanies it.
struct QueryRecord {
  std::uint32_t user_id = 0;
  RawCounts raw;
  FeedbackType feedback = FeedbackType::positive;
  bool sample = true;
  std::optional<std::uint32_t> forced_category;
};

std::vector<QueryRecord> load_query_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open query file: " + path);
  const nlohmann::json doc = nlohmann::json::parse(f, nullptr, false);
  if (doc.is_discarded()) throw std::runtime_error("query file is not valid JSON: " + path);
  if (!doc.is_array()) throw std::runtime_error("query file must be a JSON array");

  std::vector<QueryRecord> records;
  records.reserve(doc.size());
  for (const auto& e : doc) {
    if (!e.is_object()) throw std::runtime_error("query record must be an object");
    QueryRecord rec;
    if (const auto it = e.find("user_id"); it != e.end()) {
      if (!it->is_number_unsigned()) throw std::runtime_error("user_id must be a nonnegative integer");
      rec.user_id = it->get<std::uint32_t>();
    }
    const auto counts = e.find("counts");
    if (counts == e.end() || !counts->is_array()) {
      throw std::runtime_error("query record needs a counts array of [feature_id, count] pairs");
    }
    for (const auto& pair : *counts) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
          !pair[1].is_number_unsigned()) {
        throw std::runtime_error("counts entries must be [feature_id, count] pairs");
      }
      rec.raw.counts[pair[0].get<FeatureId>()] = pair[1].get<std::uint64_t>();
    }
    if (const auto it = e.find("feedback"); it != e.end()) {
      const std::string fb = it->get<std::string>();
      if (fb == "positive") {
        rec.feedback = FeedbackType::positive;
      } else if (fb == "negative") {
        rec.feedback = FeedbackType::negative;
      } else {
        throw std::runtime_error("feedback must be \"positive\" or \"negative\"");
      }
    }
    if (const auto it = e.find("sample"); it != e.end()) {
      if (!it->is_boolean()) throw std::runtime_error("sample must be a boolean");
      rec.sample = it->get<bool>();
    }
    if (const auto it = e.find("forced_category"); it != e.end() && !it->is_null()) {
      if (!it->is_number_unsigned()) throw std::runtime_error("forced_category must be an id");
      rec.forced_category = it->get<std::uint32_t>();
    }
    if (!rec.sample && !rec.forced_category) {
      throw std::runtime_error("a record without a sample needs forced_category");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

UserProfile& profile_for(ProfileStore& store, std::uint32_t user_id) {
  auto it = std::lower_bound(store.profiles.begin(), store.profiles.end(), user_id,
                             [](const UserProfile& p, std::uint32_t id) { return p.user_id < id; });
  if (it == store.profiles.end() || it->user_id != user_id) {
    it = store.profiles.insert(it, UserProfile{user_id, {}});
  }
  return *it;
}

std::vector<FeatureId> present_features(const RawCounts& raw) {
  std::vector<FeatureId> features;
  features.reserve(raw.counts.size());
  for (const auto& [id, count] : raw.counts) {
    if (count > 0) features.push_back(id);
  }
  return features;
}

int cmd_simulate(const SimConfig& cfg, bool baseline, const std::string& out_path,
                 const std::string& store_path) {
  const std::vector<WorkloadEvent> events = generate(cfg);
  const SimOutput out = run(events, cfg, !baseline);
  export_metrics(out.metrics, out_path);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config = cfg;
  manifest.baseline = baseline;
  manifest.start_event = 0;
  manifest.end_event = events.size();
  manifest.metrics_path = out_path;
  if (!store_path.empty()) manifest.store_path = store_path;
  const std::string manifest_path = out_path + ".manifest.json";
  save_manifest(manifest, manifest_path);

  if (!store_path.empty()) {
    save_store(ProfileStore{out.state.corpus, out.state.profiles, out.state.registry}, store_path);
  }

  std::printf("events=%zu windows=%zu window_size=%llu\n", events.size(),
              out.metrics.proficiency.size(),
              static_cast<unsigned long long>(resolved_window_size(cfg, events.size())));
  std::printf("plan_hit_rate=%.17g categories_created=%llu\n", out.metrics.plan_hit_rate,
              static_cast<unsigned long long>(out.metrics.categories_created));
  std::printf("total_cost_adaptive=%.17g total_cost_baseline=%.17g\n",
              out.metrics.total_cost_adaptive, out.metrics.total_cost_baseline);
  if (out.metrics.adaptation_latency) {
    std::printf("adaptation_latency=%llu\n",
                static_cast<unsigned long long>(*out.metrics.adaptation_latency));
  } else if (cfg.drift_at && !baseline) {
    std::printf("adaptation_latency=none\n");
  }
  std::printf("metrics: %s\nmanifest: %s\n", out_path.c_str(), manifest_path.c_str());
  if (!store_path.empty()) std::printf("store: %s\n", store_path.c_str());
  return 0;
}

int cmd_learn(const std::string& store_path, const std::string& input_path,
              const std::string& out_path, const LearnConfig& learn_cfg) {
  ProfileStore store = load_store(store_path);
  const std::vector<QueryRecord> records = load_query_file(input_path);
  std::uint32_t next_category = next_category_id(store);
  std::uint32_t next_plan = next_plan_id(store);

  for (const QueryRecord& rec : records) {
    const std::vector<FeatureId> features = present_features(rec.raw);
    store.corpus = observe(store.corpus, features);
    const QueryVector q = build_vector(rec.raw, store.corpus);
    UserProfile& profile = profile_for(store, rec.user_id);

    LearnOptions opts;
    opts.sample_provided = rec.sample;
    opts.forced_category = rec.forced_category;
    opts.new_category_id = next_category;
    opts.event_index = store.corpus.total_queries() - 1;
    LearnResult learned = learn(profile, q, rec.feedback, learn_cfg, opts);

    if (learned.created_id) {
      ++next_category;
      store.registry.register_plan(PlanCandidate{next_plan, *learned.created_id,
                                                 store.registry.default_prepared_cost(),
                                                 store.registry.default_fresh_cost(), 0});
      learned.profile.find_category(*learned.created_id)->linked_plan = next_plan;
      std::printf("user=%u created category=%u plan=%u\n", rec.user_id, *learned.created_id,
                  next_plan);
      ++next_plan;
    } else if (learned.updated_id) {
      std::printf("user=%u updated category=%u\n", rec.user_id, *learned.updated_id);
    } else {
      std::printf("user=%u ignored (zero query vector)\n", rec.user_id);
    }
    profile = std::move(learned.profile);
  }

  save_store(store, out_path);
  std::printf("applied %zu queries\nstore: %s\n", records.size(), out_path.c_str());
  return 0;
}

int cmd_advise(const std::string& store_path, const std::string& input_path, double threshold) {
  const ProfileStore store = load_store(store_path);
  const std::vector<QueryRecord> records = load_query_file(input_path);
  const UserProfile empty_profile;

  for (std::size_t i = 0; i < records.size(); ++i) {
    const QueryRecord& rec = records[i];
    const QueryVector q = build_vector(rec.raw, store.corpus);
    const UserProfile* profile = &empty_profile;
    for (const UserProfile& p : store.profiles) {
      if (p.user_id == rec.user_id) {
        profile = &p;
        break;
      }
    }
    const Recommendation r = advise(q, *profile, store.registry, threshold);
    if (r.fallback) {
      std::printf("query=%zu user=%u decision=fallback score=%.17g cost=%.17g\n", i, rec.user_id,
                  r.score, r.estimated_cost);
    } else {
      std::printf("query=%zu user=%u decision=plan plan=%u category=%u score=%.17g cost=%.17g\n",
                  i, rec.user_id, *r.plan_id, store.registry.plan(*r.plan_id)->category_id,
                  r.score, r.estimated_cost);
    }
  }
  return 0;
}

int cmd_ga_optimize(const std::string& store_path, const std::string& input_path,
                    std::uint32_t user_id, std::uint32_t category_id, const GaConfig& ga,
                    bool apply, const std::string& out_path) {
  ProfileStore store = load_store(store_path);
  UserProfile* profile = nullptr;
  for (UserProfile& p : store.profiles) {
    if (p.user_id == user_id) {
      profile = &p;
      break;
    }
  }
  if (profile == nullptr) throw std::runtime_error("unknown user " + std::to_string(user_id));
  Category* category = profile->find_category(category_id);
  if (category == nullptr) {
    throw std::runtime_error("user " + std::to_string(user_id) + " has no category " +
                             std::to_string(category_id));
  }

  EvaluationSet set;
  for (const QueryRecord& rec : load_query_file(input_path)) {
    set.queries.push_back(build_vector(rec.raw, store.corpus));
  }

  const EvolveResult result = evolve(*category, set, ga);
  std::printf("initial_fitness=%.17g best_fitness=%.17g generations=%zu\n",
              result.best_per_generation.front(), result.best.fitness, ga.generations);

  if (apply) {
    if (result.best.chromosome.is_zero()) {
      throw std::runtime_error("refusing to apply a zero descriptor");
    }
    category->desc_pos = result.best.chromosome;
    save_store(store, out_path);
    std::printf("applied to category=%u\nstore: %s\n", category_id, out_path.c_str());
  }
  return 0;
}

void print_vector(const char* label, const QueryVector& v) {
  std::printf("  %s:", label);
  if (v.is_zero()) {
    std::printf(" (empty)");
  }
  for (const auto& [id, w] : v.entries()) {
    std::printf(" [%u]=%.17g", id, w);
  }
  std::printf("\n");
}

int cmd_profiles_show(const std::string& store_path, std::optional<std::uint32_t> user_id) {
  const ProfileStore store = load_store(store_path);
  for (const UserProfile& p : store.profiles) {
    if (user_id && p.user_id != *user_id) continue;
    std::printf("user=%u categories=%zu\n", p.user_id, p.categories.size());
    if (user_id) {
      for (const Category& c : p.categories) {
        std::printf("category id=%u usage=%llu created_at=%llu plan=", c.id,
                    static_cast<unsigned long long>(c.usage_count),
                    static_cast<unsigned long long>(c.created_at));
        if (c.linked_plan) {
          std::printf("%u\n", *c.linked_plan);
        } else {
          std::printf("none\n");
        }
        print_vector("desc_pos", c.desc_pos);
        print_vector("desc_neg", c.desc_neg);
      }
    }
  }
  if (user_id) {
    bool found = false;
    for (const UserProfile& p : store.profiles) found = found || p.user_id == *user_id;
    if (!found) throw std::runtime_error("unknown user " + std::to_string(*user_id));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive query-plan advisor"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the synthetic workload");
  SimConfig sim_cfg;
  bool baseline = false;
  std::string sim_out = "metrics.csv";
  std::string sim_store;
  sim->add_option("--users", sim_cfg.num_users, "number of simulated users");
  sim->add_option("--queries", sim_cfg.num_queries, "stream length");
  sim->add_option("--seed", sim_cfg.seed, "generator seed");
  sim->add_option("--templates", sim_cfg.num_templates, "query templates");
  sim->add_option("--groups", sim_cfg.num_groups, "command groups");
  std::int64_t drift_at = -1;
  sim->add_option("--drift-at", drift_at, "event index where user interests shift");
  sim->add_option("--threshold", sim_cfg.advise_threshold, "advise score threshold");
  sim->add_option("--window", sim_cfg.window_size, "metrics window size (0 = stream/20)");
  sim->add_option("--warmup", sim_cfg.warmup_fraction, "warmup fraction of the stream");
  sim->add_flag("--baseline", baseline, "replay without learning or advising");
  sim->add_option("--out", sim_out, "metrics CSV path");
  sim->add_option("--store", sim_store, "write the final store here");

  // learn
  auto* lrn = app.add_subcommand("learn", "apply a query file to a store");
  std::string lrn_store, lrn_input, lrn_out;
  LearnConfig learn_cfg;
  lrn->add_option("--store", lrn_store, "store file")->required();
  lrn->add_option("--input", lrn_input, "query file (JSON array)")->required();
  lrn->add_option("--out", lrn_out, "output store path (default: overwrite --store)");
  lrn->add_option("--theta", learn_cfg.theta, "relevance threshold");
  lrn->add_option("--gamma", learn_cfg.gamma, "retention factor");
  lrn->add_option("--beta", learn_cfg.beta, "relevant pull");
  lrn->add_option("--lambda", learn_cfg.lambda, "non-relevant push");
  lrn->add_option("--alpha", learn_cfg.alpha, "feedback rate");
  bool no_clamp = false;
  lrn->add_flag("--no-clamp", no_clamp, "keep negative weights");

  // advise
  auto* adv = app.add_subcommand("advise", "recommend plans for a query file");
  std::string adv_store, adv_input;
  double adv_threshold = 0.3;
  adv->add_option("--store", adv_store, "store file")->required();
  adv->add_option("--input", adv_input, "query file (JSON array)")->required();
  adv->add_option("--threshold", adv_threshold, "advise score threshold");

  // ga-optimize
  auto* ga = app.add_subcommand("ga-optimize", "evolve a category descriptor");
  std::string ga_store, ga_input, ga_out;
  std::uint32_t ga_user = 0, ga_category = 0;
  GaConfig ga_cfg;
  bool ga_apply = false;
  ga->add_option("--store", ga_store, "store file")->required();
  ga->add_option("--input", ga_input, "evaluation query file")->required();
  ga->add_option("--user", ga_user, "profile owner")->required();
  ga->add_option("--category", ga_category, "category to optimize")->required();
  ga->add_option("--generations", ga_cfg.generations, "generations to run");
  ga->add_option("--pop", ga_cfg.population_size, "population size");
  ga->add_option("--seed", ga_cfg.seed, "GA seed");
  ga->add_flag("--apply", ga_apply, "write the evolved descriptor back");
  ga->add_option("--out", ga_out, "output store path (default: overwrite --store)");

  // profiles show
  auto* profiles = app.add_subcommand("profiles", "inspect stored profiles");
  profiles->require_subcommand(1);
  auto* show = profiles->add_subcommand("show", "dump categories of a user");
  std::string show_store;
  std::int64_t show_user = -1;
  show->add_option("--store", show_store, "store file")->required();
  show->add_option("--user", show_user, "user to dump (default: list all)");

  // init
  auto* init = app.add_subcommand("init", "create an empty store");
  std::string init_store;
  double init_prepared = 1.0, init_fresh = 10.0;
  init->add_option("--store", init_store, "store file to create")->required();
  init->add_option("--prepared-cost", init_prepared, "default prepared-plan cost");
  init->add_option("--fresh-cost", init_fresh, "default fresh-optimization cost");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      if (drift_at >= 0) sim_cfg.drift_at = static_cast<std::uint64_t>(drift_at);
      return cmd_simulate(sim_cfg, baseline, sim_out, sim_store);
    }
    if (lrn->parsed()) {
      learn_cfg.clamp_negative = !no_clamp;
      return cmd_learn(lrn_store, lrn_input, lrn_out.empty() ? lrn_store : lrn_out, learn_cfg);
    }
    if (adv->parsed()) {
      return cmd_advise(adv_store, adv_input, adv_threshold);
    }
    if (ga->parsed()) {
      return cmd_ga_optimize(ga_store, ga_input, ga_user, ga_category, ga_cfg, ga_apply,
                             ga_out.empty() ? ga_store : ga_out);
    }
    if (show->parsed()) {
      std::optional<std::uint32_t> user;
      if (show_user >= 0) user = static_cast<std::uint32_t>(show_user);
      return cmd_profiles_show(show_store, user);
    }
    if (init->parsed()) {
      save_store(ProfileStore{{}, {}, PlanRegistry(init_prepared, init_fresh)}, init_store);
      std::printf("store: %s\n", init_store.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
