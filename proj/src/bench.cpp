#include "ssbo/bench.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ssbo/errors.hpp"

namespace ssbo::bench {

namespace {

using nlohmann::json;

// ---- enum <-> string ----

AcquisitionKind acquisition_from(const std::string& s) {
  if (s == "ss-ucb") return AcquisitionKind::ss_ucb;
  if (s == "max-mean") return AcquisitionKind::max_mean;
  if (s == "mean-ucb") return AcquisitionKind::mean_ucb;
  if (s == "independent") return AcquisitionKind::independent;
  if (s == "random") return AcquisitionKind::random;
  throw ConfigError("unknown acquisition kind: " + s);
}

ObjectiveKind objective_from(const std::string& s) {
  if (s == "ackley") return ObjectiveKind::ackley;
  if (s == "michalewicz") return ObjectiveKind::michalewicz;
  if (s == "rastrigin") return ObjectiveKind::rastrigin;
  if (s == "schwefel") return ObjectiveKind::schwefel;
  if (s == "seq-linear-quadratic") return ObjectiveKind::seq_linear_quadratic;
  throw ConfigError("unknown objective kind: " + s);
}

BetaKind beta_from(const std::string& s) {
  if (s == "theorem-discrete") return BetaKind::theorem_discrete;
  if (s == "constant") return BetaKind::constant;
  throw ConfigError("unknown beta schedule kind: " + s);
}

// ---- json plumbing ----

void deep_merge(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && base.contains(it.key()) &&
        base[it.key()].is_object())
      deep_merge(base[it.key()], *it);
    else
      base[it.key()] = *it;
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
}

json default_condition() {
  return json{
      {"domain",
       {{"kind", "grid"}, {"cells_per_dim", 64}, {"sequence_length", 5}}},
      {"family",
       {{"means_per_dim", 32},
        {"std_fractions", default_grid_std_fractions()},
        {"mutation_rates", default_mutation_rates()}}},
      {"acquisition",
       {{"kind", "ss-ucb"},
        {"beta",
         {{"kind", "theorem-discrete"}, {"delta", 0.1}, {"value", 4.0}}}}},
      {"run",
       {{"mode", "sequential"},
        {"batch_size", 1},
        {"observations", 200},
        {"noise_variance", "auto"}}},
      {"objective",
       {{"kind", "ackley"},
        {"dim", 2},
        {"michalewicz_m", 10},
        {"oracle_seed", 0}}},
  };
}

void validate_condition_keys(const json& c, const std::string& name) {
  check_keys(c, {"domain", "family", "acquisition", "run", "objective"},
             "condition \"" + name + "\"");
  check_keys(c.at("domain"), {"kind", "cells_per_dim", "sequence_length"},
             name + ".domain");
  check_keys(c.at("family"),
             {"means_per_dim", "std_fractions", "mutation_rates"},
             name + ".family");
  check_keys(c.at("acquisition"), {"kind", "beta"}, name + ".acquisition");
  check_keys(c.at("acquisition").at("beta"), {"kind", "delta", "value"},
             name + ".acquisition.beta");
  check_keys(c.at("run"),
             {"mode", "batch_size", "observations", "noise_variance"},
             name + ".run");
  check_keys(c.at("objective"),
             {"kind", "dim", "michalewicz_m", "oracle_seed"},
             name + ".objective");
}

RunConfig condition_to_config(const json& c, const std::string& name) {
  validate_condition_keys(c, name);
  RunConfig rc;
  try {
    const std::string dk = c.at("domain").at("kind").get<std::string>();
    if (dk == "grid")
      rc.domain_kind = Domain::Kind::grid;
    else if (dk == "sequence")
      rc.domain_kind = Domain::Kind::sequence;
    else
      throw ConfigError("unknown domain kind: " + dk);
    rc.grid_cells = c.at("domain").at("cells_per_dim").get<int>();
    rc.seq_length = c.at("domain").at("sequence_length").get<int>();

    rc.means_per_dim = c.at("family").at("means_per_dim").get<int>();
    rc.std_fractions =
        c.at("family").at("std_fractions").get<std::vector<double>>();
    rc.mutation_rates =
        c.at("family").at("mutation_rates").get<std::vector<double>>();

    rc.acquisition.kind =
        acquisition_from(c.at("acquisition").at("kind").get<std::string>());
    const json& b = c.at("acquisition").at("beta");
    rc.acquisition.beta.kind = beta_from(b.at("kind").get<std::string>());
    rc.acquisition.beta.delta = b.at("delta").get<double>();
    rc.acquisition.beta.value = b.at("value").get<double>();

    const std::string mode = c.at("run").at("mode").get<std::string>();
    if (mode == "sequential")
      rc.mode = RunMode::sequential;
    else if (mode == "batch")
      rc.mode = RunMode::batch;
    else
      throw ConfigError("unknown run mode: " + mode);
    rc.batch_size = c.at("run").at("batch_size").get<int>();
    rc.total_observations = c.at("run").at("observations").get<int>();
    const json& nv = c.at("run").at("noise_variance");
    if (nv.is_string()) {
      if (nv.get<std::string>() != "auto")
        throw ConfigError("noise_variance must be a number or \"auto\"");
      rc.observation_noise_variance = -1.0;
    } else {
      rc.observation_noise_variance = nv.get<double>();
      if (rc.observation_noise_variance < 0.0)
        throw ConfigError("noise_variance must be >= 0");
    }

    rc.objective.kind =
        objective_from(c.at("objective").at("kind").get<std::string>());
    rc.objective.dim = c.at("objective").at("dim").get<int>();
    rc.objective.michalewicz_m =
        c.at("objective").at("michalewicz_m").get<int>();
    rc.objective.oracle_seed =
        c.at("objective").at("oracle_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("condition \"" + name + "\": " + e.what());
  }
  if (rc.grid_cells < 1 || rc.seq_length < 1 || rc.batch_size < 1 ||
      rc.total_observations < 1 || rc.means_per_dim < 1)
    throw ConfigError("condition \"" + name + "\": counts must be >= 1");
  return rc;
}

bool safe_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' &&
        ch != '-')
      return false;
  return true;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kTraceHeader =
    "replicate,t,round,theta_index,variance_label,x_index,x_coords_or_seq,y,"
    "f_true,inst_regret,simple_regret";

}  // namespace

std::string config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_experiment(json root, const json& condition_overrides,
                                  const json& top_overrides) {
  if (!root.is_object()) throw ConfigError("config root must be an object");
  deep_merge(root, top_overrides);
  check_keys(root, {"experiment", "replicates", "base_seed", "out", "defaults",
                    "conditions"},
             "config root");

  ExperimentConfig out;
  try {
    out.experiment = root.value("experiment", std::string("experiment"));
    out.replicates = root.value("replicates", 50);
    out.base_seed = root.value("base_seed", std::uint64_t{0});
    out.out_dir = root.value("out", std::string("out"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config root: ") + e.what());
  }
  if (out.replicates < 1) throw ConfigError("replicates must be >= 1");

  json defaults = default_condition();
  if (root.contains("defaults")) deep_merge(defaults, root.at("defaults"));

  if (!root.contains("conditions") || !root.at("conditions").is_array() ||
      root.at("conditions").empty())
    throw ConfigError("config needs a non-empty conditions array");

  json effective_conditions = json::array();
  std::set<std::string> seen;
  for (const json& raw : root.at("conditions")) {
    if (!raw.is_object() || !raw.contains("name"))
      throw ConfigError("every condition needs a name");
    const std::string name = raw.at("name").get<std::string>();
    if (!safe_name(name))
      throw ConfigError("condition name must be [A-Za-z0-9_-]: " + name);
    if (!seen.insert(name).second)
      throw ConfigError("duplicate condition name: " + name);
    json merged = defaults;
    json patch = raw;
    patch.erase("name");
    deep_merge(merged, patch);
    deep_merge(merged, condition_overrides);
    Condition cond;
    cond.name = name;
    cond.config = condition_to_config(merged, name);
    out.conditions.push_back(std::move(cond));
    merged["name"] = name;
    effective_conditions.push_back(std::move(merged));
  }

  out.effective = json{{"experiment", out.experiment},
                       {"replicates", out.replicates},
                       {"base_seed", out.base_seed},
                       {"conditions", std::move(effective_conditions)}};
  return out;
}

ExperimentConfig load_experiment_file(const std::filesystem::path& path,
                                      const json& condition_overrides,
                                      const json& top_overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  return parse_experiment(std::move(root), condition_overrides, top_overrides);
}

int worker_count(int replicates) {
  int workers = 0;
  if (const char* env = std::getenv("SSBO_THREADS")) {
    workers = std::atoi(env);
    if (workers < 1)
      throw ConfigError("SSBO_THREADS must be a positive integer");
  } else {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  return std::min(workers, replicates);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace,
                     const Domain& domain) {
  os << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << trace.replicate_id << ',' << r.t << ',' << r.round << ','
       << r.theta_index << ',' << fmt_double(r.variance_label) << ','
       << r.x_index << ',' << domain.label(r.x_index) << ','
       << fmt_double(r.y) << ',' << fmt_double(r.f_true) << ','
       << fmt_double(r.inst_regret) << ',' << fmt_double(r.simple_regret)
       << '\n';
  }
}

std::vector<RunTrace> read_trace_csvs(
    const std::vector<std::filesystem::path>& files) {
  std::vector<RunTrace> traces;
  traces.reserve(files.size());
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
      throw SchemaMismatch("unexpected trace header in " + path.string());
    RunTrace tr;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f;
      f.reserve(11);
      size_t pos = 0;
      while (true) {
        const size_t comma = line.find(',', pos);
        f.push_back(line.substr(pos, comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (f.size() != 11)
        throw SchemaMismatch("bad trace row in " + path.string());
      TraceRow row;
      const int replicate = std::stoi(f[0]);
      row.t = std::stoi(f[1]);
      row.round = std::stoi(f[2]);
      row.theta_index = std::stoi(f[3]);
      row.variance_label = std::strtod(f[4].c_str(), nullptr);
      row.x_index = std::stoi(f[5]);
      row.y = std::strtod(f[7].c_str(), nullptr);
      row.f_true = std::strtod(f[8].c_str(), nullptr);
      row.inst_regret = std::strtod(f[9].c_str(), nullptr);
      row.simple_regret = std::strtod(f[10].c_str(), nullptr);
      if (first) {
        tr.replicate_id = replicate;
        first = false;
      } else if (tr.replicate_id != replicate) {
        throw SchemaMismatch("mixed replicate ids in " + path.string());
      }
      tr.rows.push_back(row);
    }
    traces.push_back(std::move(tr));
  }
  return traces;
}

void write_summary_csv(std::ostream& os, const CurveSummary& s) {
  os << "t,inst_mean,inst_p10,inst_p90,simple_mean,simple_p10,simple_p90,"
        "mean_variance_label\n";
  for (Eigen::Index k = 0; k < s.t.size(); ++k) {
    os << s.t(k) << ',' << fmt_double(s.inst_mean(k)) << ','
       << fmt_double(s.inst_p10(k)) << ',' << fmt_double(s.inst_p90(k)) << ','
       << fmt_double(s.simple_mean(k)) << ',' << fmt_double(s.simple_p10(k))
       << ',' << fmt_double(s.simple_p90(k)) << ','
       << fmt_double(s.mean_variance_label(k)) << '\n';
  }
}

namespace {

json bound_to_json(const BoundReport& b, int replicate) {
  return json{{"replicate", replicate},
              {"horizon", b.horizon},
              {"domain_size", b.domain_size},
              {"beta_horizon", b.beta_horizon},
              {"c1", b.c1},
              {"info_gain", b.info_gain},
              {"pi_star", b.pi_star_value},
              {"bound_value", b.bound_value},
              {"cumulative_regret", b.cumulative_regret},
              {"cumulative_regret_gp", b.cumulative_regret_gp},
              {"ratio", b.ratio}};
}

struct ConditionResult {
  std::string name;
  std::vector<RunTrace> traces;
  CurveSummary summary;
  bool has_bound = false;
  json bound;
};

ConditionResult run_condition(const Condition& cond, int replicates,
                              std::uint64_t base_seed, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem = build_problem(cond.config);

  ConditionResult result;
  result.name = cond.name;
  result.traces.resize(replicates);

  const int workers = worker_count(replicates);
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto body = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        RunConfig rc = cond.config;
        rc.rng_seed = base_seed + static_cast<std::uint64_t>(r);
        rc.replicate_id = r;
        result.traces[r] = rc.mode == RunMode::batch
                               ? run_batch(problem, rc)
                               : run_sequential(problem, rc);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  result.summary = aggregate(result.traces);
  if (cond.config.acquisition.kind == AcquisitionKind::ss_ucb) {
    result.has_bound = true;
    result.bound = bound_to_json(
        bound_report(result.traces[0], problem, cond.config.acquisition.beta),
        0);
  }
  const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  log << "condition " << cond.name << ": " << replicates << " replicates in "
      << dt / 1000.0 << " s\n";
  return result;
}

}  // namespace

void execute_experiment(const ExperimentConfig& config, std::ostream& log) {
  // Everything is buffered; files appear only if every run succeeds.
  std::vector<ConditionResult> results;
  std::vector<const Domain*> domains;  // parallel to results, for labels
  std::vector<Domain> built_domains;
  results.reserve(config.conditions.size());
  built_domains.reserve(config.conditions.size());

  for (const Condition& cond : config.conditions) {
    results.push_back(
        run_condition(cond, config.replicates, config.base_seed, log));
    // Rebuild just the domain for trace labels (cheap next to the runs).
    RunConfig rc = cond.config;
    if (rc.domain_kind == Domain::Kind::grid) {
      const auto [lo, hi] = objective_range(rc.objective.kind);
      built_domains.push_back(
          Domain::grid(rc.objective.dim, lo, hi, rc.grid_cells));
    } else {
      built_domains.push_back(Domain::dna_sequences(rc.seq_length));
    }
  }

  namespace fs = std::filesystem;
  const fs::path out(config.out_dir);
  fs::create_directories(out / "traces");
  fs::create_directories(out / "summary");

  for (size_t c = 0; c < results.size(); ++c) {
    const ConditionResult& res = results[c];
    for (int r = 0; r < config.replicates; ++r) {
      const fs::path p =
          out / "traces" / (res.name + "_r" + std::to_string(r) + ".csv");
      std::ofstream os(p, std::ios::binary);
      if (!os) throw ConfigError("cannot write " + p.string());
      write_trace_csv(os, res.traces[r], built_domains[c]);
    }
    {
      const fs::path p = out / "summary" / (res.name + "_summary.csv");
      std::ofstream os(p, std::ios::binary);
      if (!os) throw ConfigError("cannot write " + p.string());
      write_summary_csv(os, res.summary);
    }
    if (res.has_bound) {
      const fs::path p = out / "summary" / (res.name + "_bound.json");
      std::ofstream os(p, std::ios::binary);
      if (!os) throw ConfigError("cannot write " + p.string());
      os << res.bound.dump(2) << '\n';
    }
  }

  json manifest{{"schema_version", 1},
                {"generator", "ssbo_bench"},
                {"created_utc", utc_now()},
                {"experiment", config.experiment},
                {"replicates", config.replicates},
                {"base_seed", config.base_seed},
                {"config_hash", config_hash(config.effective)},
                {"config", config.effective},
                {"trace_columns", json::array({"replicate", "t", "round",
                                               "theta_index", "variance_label",
                                               "x_index", "x_coords_or_seq",
                                               "y", "f_true", "inst_regret",
                                               "simple_regret"})}};
  json names = json::array();
  for (const auto& res : results) names.push_back(res.name);
  manifest["conditions"] = names;
  {
    std::ofstream os(out / "manifest.json", std::ios::binary);
    if (!os) throw ConfigError("cannot write manifest");
    os << manifest.dump(2) << '\n';
  }
  log << "wrote " << out.string() << "\n";
}

void write_report(const std::filesystem::path& out_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = out_dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw MissingManifest("no manifest.json under " + out_dir.string());
  json manifest;
  {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw SchemaMismatch(std::string("manifest parse error: ") + e.what());
    }
  }
  if (manifest.value("schema_version", -1) != 1)
    throw SchemaMismatch("unsupported manifest schema_version");
  if (!manifest.contains("config"))
    throw SchemaMismatch("manifest lacks embedded config");
  if (manifest.value("config_hash", std::string{}) !=
      config_hash(manifest.at("config")))
    throw SchemaMismatch("manifest config hash does not match its config");

  json root = manifest.at("config");
  root["out"] = out_dir.string();
  const ExperimentConfig config = parse_experiment(std::move(root));

  fs::create_directories(out_dir / "summary");
  for (const Condition& cond : config.conditions) {
    std::vector<fs::path> files;
    for (int r = 0; r < config.replicates; ++r) {
      fs::path p = out_dir / "traces" /
                   (cond.name + "_r" + std::to_string(r) + ".csv");
      if (!fs::exists(p))
        throw MissingManifest("missing trace file: " + p.string());
      files.push_back(std::move(p));
    }
    const std::vector<RunTrace> traces = read_trace_csvs(files);
    const CurveSummary summary = aggregate(traces);
    {
      std::ofstream os(out_dir / "summary" / (cond.name + "_summary.csv"),
                       std::ios::binary);
      write_summary_csv(os, summary);
    }
    if (cond.config.acquisition.kind == AcquisitionKind::ss_ucb) {
      // The bound needs the problem, not the run mode: skip the penalty
      // precomputation by building the sequential variant.
      RunConfig rc = cond.config;
      rc.mode = RunMode::sequential;
      const Problem problem = build_problem(rc);
      const BoundReport b =
          bound_report(traces[0], problem, cond.config.acquisition.beta);
      std::ofstream os(out_dir / "summary" / (cond.name + "_bound.json"),
                       std::ios::binary);
      os << bound_to_json(b, 0).dump(2) << '\n';
    }
    log << "report: " << cond.name << " rebuilt from " << files.size()
        << " traces\n";
  }
}

}  // namespace ssbo::bench
