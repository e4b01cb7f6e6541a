// glossfs command-line front end: select, eval, sweep, synth, verify.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "glossfs/glossfs.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

// Carries an exit code up to main.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{kExitUsage, msg}; }
[[noreturn]] void data_error(const std::string& msg) { throw Failure{kExitData, msg}; }

void check(glossfs_status st) {
  if (st != GLOSSFS_OK) data_error(glossfs_last_error());
}

struct MatrixFree { void operator()(glossfs_matrix* p) const { glossfs_matrix_free(p); } };
struct LabelsFree { void operator()(glossfs_labels* p) const { glossfs_labels_free(p); } };
struct GraphFree { void operator()(glossfs_graph* p) const { glossfs_graph_free(p); } };
struct SelectionFree { void operator()(glossfs_selection* p) const { glossfs_selection_free(p); } };
using Matrix = std::unique_ptr<glossfs_matrix, MatrixFree>;
using Labels = std::unique_ptr<glossfs_labels, LabelsFree>;
using Graph = std::unique_ptr<glossfs_graph, GraphFree>;
using Selection = std::unique_ptr<glossfs_selection, SelectionFree>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  glossfs_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) data_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) data_error("cannot write " + path.string());
  out << text;
  if (!out) data_error("write failed for " + path.string());
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string num(double v) { return fmt("%.6f", v); }
std::string grid_value(double v) { return fmt("%g", v); }

// ---------------------------------------------------------------------------
// Settings: built-in defaults, then the --config file, then explicit flags.

json builtin_defaults() {
  json d;
  d["select"] = json::parse(take_string([] {
    char* s = nullptr;
    check(glossfs_default_config(&s));
    return s;
  }()));
  // the toolkit-wide defaults used by every subcommand
  d["select"]["K"] = 100;
  d["select"]["m"] = 5;
  d["select"]["mu"] = 1.0;
  d["select"]["max_iter"] = 30;
  d["select"]["delta_omega"] = 0.99;
  d["eval"] = {{"runs", 20}, {"threads", 1}, {"seeding", "kmeans++"}, {"baseline", json::array()}};
  d["sweep"] = {{"methods", {"gloss"}},
                {"kappa", {20, 30, 40, 50, 60, 70, 80, 90, 100}},
                {"beta", {0.01, 0.1, 1, 10, 40, 70, 100}},
                {"mu", {1.0}},
                {"jobs", 1}};
  return d;
}

std::string merge_select(const json& base, const json& patch) {
  char* out = nullptr;
  if (glossfs_merge_config(base.dump().c_str(), patch.dump().c_str(), &out) != GLOSSFS_OK)
    usage_error(std::string("invalid configuration: ") + glossfs_last_error());
  return take_string(out);
}

void merge_section(json& target, const json& patch, const std::string& section) {
  if (!patch.is_object()) usage_error("config section '" + section + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    if (!target.contains(key)) usage_error("unknown key '" + key + "' in config section '" + section + "'");
    if (target[key].type() != value.type() &&
        !(target[key].is_number() && value.is_number()))
      usage_error("wrong type for '" + section + "." + key + "'");
    target[key] = value;
  }
}

json load_config_file(json settings, const std::string& path) {
  json file;
  try {
    file = json::parse(read_file(path));
  } catch (const json::exception& e) {
    usage_error("cannot parse config " + path + ": " + e.what());
  } catch (const Failure& f) {
    usage_error(f.message);
  }
  if (!file.is_object()) usage_error("config file must hold a JSON object");
  for (const auto& [section, patch] : file.items()) {
    if (section == "select")
      settings["select"] = json::parse(merge_select(settings["select"], patch));
    else if (section == "eval" || section == "sweep")
      merge_section(settings[section], patch, section);
    else
      usage_error("unknown config section '" + section + "' (expected select, eval or sweep)");
  }
  return settings;
}

// Options shared by the subcommands that run a selection.
struct SelectFlags {
  std::string method;
  long long kappa = 0;
  double beta = 0, mu = 0, delta_omega = 0, tol = 0;
  long long K = 0, m = 0;
  int max_iter = 0;
  std::uint64_t seed = 0;
  std::string graph, sigma;
  double gram_reg = 0;
  bool no_extrapolate = false;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App& app, bool with_kappa, bool with_grid_values) {
    opts["method"] = app.add_option("--method", method, "gloss, glpsl, all or random")
                         ->check(CLI::IsMember({"gloss", "glpsl", "all", "all_features", "random"}));
    if (with_kappa)
      opts["kappa"] = app.add_option("--kappa", kappa, "number of features to select")
                          ->check(CLI::PositiveNumber);
    if (with_grid_values) {
      opts["beta"] = app.add_option("--beta", beta, "row-sparsity weight")->check(CLI::NonNegativeNumber);
      opts["mu"] = app.add_option("--mu", mu, "locality weight")->check(CLI::NonNegativeNumber);
    }
    opts["K"] = app.add_option("-K,--dim", K, "subspace dimension K")->check(CLI::PositiveNumber);
    opts["m"] = app.add_option("--neighbors", m, "kNN size m")->check(CLI::PositiveNumber);
    opts["max_iter"] = app.add_option("--max-iter", max_iter, "solver iterations")
                           ->check(CLI::NonNegativeNumber);
    opts["delta_omega"] = app.add_option("--delta-omega", delta_omega, "extrapolation cap in [0,1)")
                              ->check(CLI::Range(0.0, 1.0));
    opts["tol"] = app.add_option("--tol", tol, "relative objective change for early stop")
                      ->check(CLI::NonNegativeNumber);
    opts["seed"] = app.add_option("--seed", seed, "seed for initialization and evaluation");
    opts["graph"] = app.add_option("--graph", graph, "lpp or lle")->check(CLI::IsMember({"lpp", "lle"}));
    opts["sigma"] = app.add_option("--sigma", sigma, "heat-kernel width or 'median'");
    opts["gram_reg"] = app.add_option("--gram-reg", gram_reg, "LLE Gram regularizer")
                           ->check(CLI::NonNegativeNumber);
    opts["extrapolate"] = app.add_flag("--no-extrapolate", no_extrapolate, "disable extrapolation");
  }

  bool given(const std::string& key) const {
    auto it = opts.find(key);
    return it != opts.end() && it->second->count() > 0;
  }

  json patch() const {
    json p = json::object();
    if (given("method")) p["method"] = method;
    if (given("kappa")) p["kappa"] = kappa;
    if (given("beta")) p["beta"] = beta;
    if (given("mu")) p["mu"] = mu;
    if (given("K")) p["K"] = K;
    if (given("m")) p["m"] = m;
    if (given("max_iter")) p["max_iter"] = max_iter;
    if (given("delta_omega")) p["delta_omega"] = delta_omega;
    if (given("tol")) p["tol"] = tol;
    if (given("seed")) p["seed"] = seed;
    if (given("graph")) p["graph"] = graph;
    if (given("gram_reg")) p["gram_reg"] = gram_reg;
    if (given("extrapolate")) p["extrapolate"] = !no_extrapolate;
    if (given("sigma")) {
      if (sigma == "median") {
        p["sigma"] = "median";
      } else {
        try {
          std::size_t used = 0;
          const double v = std::stod(sigma, &used);
          if (used != sigma.size()) throw std::invalid_argument(sigma);
          p["sigma"] = v;
        } catch (const std::exception&) {
          usage_error("--sigma expects a number or 'median'");
        }
      }
    }
    return p;
  }
};

struct Common {
  std::string config_path;
  bool show_config = false;

  void add(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_flag("--show-config", show_config, "print the effective configuration and exit");
  }

  json settings() const {
    json s = builtin_defaults();
    if (!config_path.empty()) s = load_config_file(std::move(s), config_path);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Shared pieces.

Matrix load_matrix(const std::string& path, bool header) {
  glossfs_matrix* m = nullptr;
  check(glossfs_matrix_load_csv(path.c_str(), header ? 1 : 0, &m));
  return Matrix(m);
}

Labels load_labels(const std::string& path) {
  glossfs_labels* l = nullptr;
  check(glossfs_labels_load(path.c_str(), &l));
  return Labels(l);
}

Matrix normalized(const glossfs_matrix* m) {
  glossfs_matrix* out = nullptr;
  check(glossfs_matrix_normalize(m, &out, nullptr));
  return Matrix(out);
}

Selection run_select(const glossfs_matrix* m, const glossfs_graph* g, const json& config) {
  glossfs_selection* s = nullptr;
  check(glossfs_select(m, g, config.dump().c_str(), &s));
  return Selection(s);
}

std::vector<std::size_t> indices(const glossfs_selection* s) {
  std::size_t count = 0;
  check(glossfs_selection_count(s, &count));
  std::vector<std::size_t> out(count);
  if (count) check(glossfs_selection_indices(s, out.data(), count));
  return out;
}

std::string selection_json(const glossfs_selection* s) {
  char* out = nullptr;
  check(glossfs_selection_json(s, &out));
  return take_string(out);
}

struct EvalSpec {
  int runs = 20;
  int threads = 1;
  bool uniform = false;
  std::uint64_t seed = 0;
};

EvalSpec eval_spec(const json& settings) {
  EvalSpec e;
  e.runs = settings["eval"]["runs"].get<int>();
  e.threads = settings["eval"]["threads"].get<int>();
  const auto seeding = settings["eval"]["seeding"].get<std::string>();
  if (seeding != "kmeans++" && seeding != "uniform")
    usage_error("eval.seeding must be kmeans++ or uniform");
  e.uniform = seeding == "uniform";
  e.seed = settings["select"]["seed"].get<std::uint64_t>();
  if (e.runs < 1) usage_error("eval.runs must be >= 1");
  if (e.threads < 1) usage_error("eval.threads must be >= 1");
  return e;
}

glossfs_eval_summary evaluate(const glossfs_matrix* m, const glossfs_labels* truth,
                              const std::vector<std::size_t>& selected, const EvalSpec& spec) {
  glossfs_eval_summary out{};
  check(glossfs_evaluate(m, truth, selected.data(), selected.size(), spec.runs, spec.seed,
                         spec.threads, spec.uniform ? 1 : 0, &out));
  return out;
}

void check_lengths(const glossfs_matrix* m, const glossfs_labels* l) {
  std::size_t n = 0, d = 0, ln = 0, classes = 0;
  check(glossfs_matrix_shape(m, &n, &d));
  check(glossfs_labels_info(l, &ln, &classes));
  if (n != ln)
    data_error("label count " + std::to_string(ln) + " does not match matrix rows " + std::to_string(n));
}

const char* kEvalHeader = "method,dataset,kappa,beta,mu,K,m,acc_mean,acc_std,nmi_mean,nmi_std,seconds\n";

std::string eval_row(const std::string& method, const std::string& dataset, std::size_t kappa,
                     const json& config, const glossfs_eval_summary& r, double seconds) {
  std::ostringstream row;
  row << method << ',' << dataset << ',' << kappa << ','
      << grid_value(config["beta"].get<double>()) << ',' << grid_value(config["mu"].get<double>())
      << ',' << config["K"].get<long long>() << ',' << config["m"].get<long long>() << ','
      << num(r.acc_mean) << ',' << num(r.acc_std) << ',' << num(r.nmi_mean) << ','
      << num(r.nmi_std) << ',' << fmt("%.3f", seconds) << '\n';
  return row.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-")
    std::cout << text << std::flush;
  else
    write_file(output, text);
}

std::string dataset_name(const std::string& given, const std::string& input) {
  return given.empty() ? fs::path(input).stem().string() : given;
}

// Runs worker(i) for i in [0, count) on at most `jobs` threads.
template <class F>
void parallel_for(std::size_t count, int jobs, F&& worker) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) worker(i);
  };
  const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < width; ++t) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Subcommands.

struct SelectCmd {
  Common common;
  SelectFlags flags;
  std::string input, output;
  bool header = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("select", "rank features and print the selection as JSON");
    common.add(*sub);
    flags.add(*sub, true, true);
    sub->add_option("-i,--input", input, "data matrix CSV (rows are samples)");
    sub->add_flag("--header", header, "input has a header row");
    sub->add_option("-o,--output", output, "write JSON here instead of stdout");
  }

  int run() {
    json settings = common.settings();
    settings["select"] = json::parse(merge_select(settings["select"], flags.patch()));
    if (common.show_config) {
      std::cout << settings.dump(2) << '\n';
      return 0;
    }
    if (input.empty()) usage_error("select needs --input");
    const auto m = load_matrix(input, header);
    const auto s = run_select(m.get(), nullptr, settings["select"]);
    emit(json::parse(selection_json(s.get())).dump(2) + "\n", output);
    return 0;
  }
};

struct EvalCmd {
  Common common;
  SelectFlags flags;
  std::string input, labels, ranking, output, dataset;
  std::vector<std::string> baselines;
  int runs = 0, threads = 0;
  bool header = false, uniform = false;
  CLI::Option* runs_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* baseline_opt = nullptr;
  CLI::Option* uniform_opt = nullptr;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("eval", "cluster on selected features and report ACC/NMI");
    common.add(*sub);
    flags.add(*sub, true, true);
    sub->add_option("-i,--input", input, "data matrix CSV");
    sub->add_flag("--header", header, "input has a header row");
    sub->add_option("-l,--labels", labels, "ground-truth labels, one per line");
    sub->add_option("-r,--ranking", ranking, "selection JSON from `select`")->check(CLI::ExistingFile);
    baseline_opt = sub->add_option("--baseline", baselines, "extra rows: all and/or random")
                       ->check(CLI::IsMember({"all", "random"}));
    runs_opt = sub->add_option("--runs", runs, "k-means restarts")->check(CLI::PositiveNumber);
    threads_opt = sub->add_option("--threads", threads, "evaluation threads")->check(CLI::PositiveNumber);
    uniform_opt = sub->add_flag("--uniform-seeding", uniform, "uniform k-means seeding");
    sub->add_option("--dataset", dataset, "name for the dataset column");
    sub->add_option("-o,--output", output, "write CSV here instead of stdout");
  }

  int run() {
    json settings = common.settings();
    settings["select"] = json::parse(merge_select(settings["select"], flags.patch()));
    if (runs_opt->count()) settings["eval"]["runs"] = runs;
    if (threads_opt->count()) settings["eval"]["threads"] = threads;
    if (uniform_opt->count()) settings["eval"]["seeding"] = uniform ? "uniform" : "kmeans++";
    if (baseline_opt->count()) settings["eval"]["baseline"] = baselines;
    const EvalSpec spec = eval_spec(settings);
    if (common.show_config) {
      std::cout << settings.dump(2) << '\n';
      return 0;
    }
    if (input.empty() || labels.empty()) usage_error("eval needs --input and --labels");

    const auto m = load_matrix(input, header);
    const auto truth = load_labels(labels);
    check_lengths(m.get(), truth.get());
    std::size_t n = 0, d = 0;
    check(glossfs_matrix_shape(m.get(), &n, &d));
    const auto x = normalized(m.get());
    const std::string name = dataset_name(dataset, input);
    json config = settings["select"];
    std::string out = kEvalHeader;

    std::vector<std::size_t> chosen;
    std::string method;
    auto t0 = std::chrono::steady_clock::now();
    if (!ranking.empty()) {
      const std::string text = read_file(ranking);
      glossfs_selection* raw = nullptr;
      check(glossfs_selection_from_json(text.c_str(), &raw));
      const Selection s(raw);
      chosen = indices(s.get());
      const json parsed = json::parse(text);
      method = parsed.value("method", std::string("ranking"));
      if (parsed.contains("metadata") && parsed["metadata"].contains("config")) {
        const json& c = parsed["metadata"]["config"];
        for (const char* key : {"beta", "mu", "K", "m"})
          if (c.contains(key)) config[key] = c[key];
      }
      if (flags.given("kappa")) {
        if (static_cast<std::size_t>(flags.kappa) > chosen.size())
          data_error("--kappa exceeds the " + std::to_string(chosen.size()) + " ranked features");
        chosen.resize(static_cast<std::size_t>(flags.kappa));
      }
      for (std::size_t j : chosen)
        if (j >= d) data_error("ranking index " + std::to_string(j) + " out of range");
    } else {
      const auto s = run_select(x.get(), nullptr, config);
      chosen = indices(s.get());
      method = config["method"].get<std::string>();
    }
    auto r = evaluate(x.get(), truth.get(), chosen, spec);
    out += eval_row(method, name, chosen.size(), config, r, seconds_since(t0));

    for (const auto& b : settings["eval"]["baseline"]) {
      t0 = std::chrono::steady_clock::now();
      std::vector<std::size_t> base;
      if (b == "all") {
        base.resize(d);
        for (std::size_t j = 0; j < d; ++j) base[j] = j;
        method = "all_features";
      } else if (b == "random") {
        json rc = config;
        rc["method"] = "random";
        rc["kappa"] = chosen.size();
        base = indices(run_select(x.get(), nullptr, rc).get());
        method = "random";
      } else {
        usage_error("unknown baseline '" + b.get<std::string>() + "'");
      }
      r = evaluate(x.get(), truth.get(), base, spec);
      out += eval_row(method, name, base.size(), config, r, seconds_since(t0));
    }
    emit(out, output);
    return 0;
  }
};

struct SweepCmd {
  Common common;
  SelectFlags flags;
  std::string input, labels, out_dir, dataset;
  std::vector<std::string> methods;
  std::vector<double> kappa_grid, beta_grid, mu_grid;
  int jobs = 0, runs = 0;
  bool header = false;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("sweep", "evaluate every cell of a kappa x beta x mu grid");
    common.add(*sub);
    flags.add(*sub, false, false);
    sub->add_option("-i,--input", input, "data matrix CSV");
    sub->add_flag("--header", header, "input has a header row");
    sub->add_option("-l,--labels", labels, "ground-truth labels");
    sub->add_option("--out-dir", out_dir, "directory for result files");
    sub->add_option("--dataset", dataset, "name for the dataset column");
    opts["methods"] = sub->add_option("--methods", methods, "comma-separated methods")
                          ->delimiter(',')
                          ->check(CLI::IsMember({"gloss", "glpsl", "all", "all_features", "random"}));
    opts["kappa"] = sub->add_option("--kappa-grid", kappa_grid, "comma-separated kappa values")
                        ->delimiter(',')
                        ->check(CLI::PositiveNumber);
    opts["beta"] = sub->add_option("--beta-grid", beta_grid, "comma-separated beta values")
                       ->delimiter(',')
                       ->check(CLI::NonNegativeNumber);
    opts["mu"] = sub->add_option("--mu-grid", mu_grid, "comma-separated mu values")
                     ->delimiter(',')
                     ->check(CLI::NonNegativeNumber);
    opts["jobs"] = sub->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    opts["runs"] = sub->add_option("--runs", runs, "k-means restarts per cell")->check(CLI::PositiveNumber);
  }

  struct Unit {
    std::string method;
    double beta, mu;
    std::vector<std::size_t> ranking;
    std::string error;
    double seconds = 0;
  };
  struct Cell {
    std::size_t unit;
    std::size_t kappa;
    double beta, mu;
    glossfs_eval_summary result{};
    std::string status = "ok";
    double seconds = 0;
  };

  int run() {
    json settings = common.settings();
    settings["select"] = json::parse(merge_select(settings["select"], flags.patch()));
    if (opts["methods"]->count()) settings["sweep"]["methods"] = methods;
    if (opts["kappa"]->count()) settings["sweep"]["kappa"] = kappa_grid;
    if (opts["beta"]->count()) settings["sweep"]["beta"] = beta_grid;
    if (opts["mu"]->count()) settings["sweep"]["mu"] = mu_grid;
    if (opts["jobs"]->count()) settings["sweep"]["jobs"] = jobs;
    if (opts["runs"]->count()) settings["eval"]["runs"] = runs;
    const EvalSpec spec = eval_spec(settings);
    if (common.show_config) {
      std::cout << settings.dump(2) << '\n';
      return 0;
    }
    if (input.empty() || labels.empty() || out_dir.empty())
      usage_error("sweep needs --input, --labels and --out-dir");

    const json& sw = settings["sweep"];
    std::vector<std::string> method_list;
    for (const auto& v : sw["methods"]) {
      std::string name = v.get<std::string>();
      method_list.push_back(name == "all" ? "all_features" : name);
    }
    std::vector<std::size_t> kappas;
    for (const auto& v : sw["kappa"]) {
      const double k = v.get<double>();
      if (!(k >= 1) || k != std::floor(k)) usage_error("kappa grid values must be positive integers");
      kappas.push_back(static_cast<std::size_t>(k));
    }
    const auto betas = sw["beta"].get<std::vector<double>>();
    const auto mus = sw["mu"].get<std::vector<double>>();
    const int width = sw["jobs"].get<int>();
    if (method_list.empty() || kappas.empty() || betas.empty() || mus.empty())
      usage_error("every grid needs at least one value");
    if (width < 1) usage_error("sweep.jobs must be >= 1");
    std::sort(method_list.begin(), method_list.end());
    method_list.erase(std::unique(method_list.begin(), method_list.end()), method_list.end());
    auto sorted_unique = [](auto v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    };
    kappas = sorted_unique(kappas);
    const auto beta_list = sorted_unique(betas);
    const auto mu_list = sorted_unique(mus);

    const auto m = load_matrix(input, header);
    const auto truth = load_labels(labels);
    check_lengths(m.get(), truth.get());
    std::size_t n = 0, d = 0;
    check(glossfs_matrix_shape(m.get(), &n, &d));
    const auto x = normalized(m.get());
    const std::string name = dataset_name(dataset, input);
    const json base = settings["select"];

    glossfs_graph* raw_graph = nullptr;
    check(glossfs_graph_build(x.get(), base.dump().c_str(), &raw_graph));
    const Graph graph(raw_graph);

    // A ranking does not depend on kappa, so one selection serves every kappa
    // through its prefixes. Only gloss depends on beta and mu; all_features is
    // a single cell with kappa = d.
    const std::size_t top = std::min(kappas.back(), d);
    std::vector<Unit> units;
    std::vector<Cell> cells;
    for (const auto& method : method_list) {
      if (method == "all_features") {
        units.push_back({method, beta_list.front(), mu_list.front(), {}, {}, 0});
        cells.push_back({units.size() - 1, d, beta_list.front(), mu_list.front()});
        continue;
      }
      const bool shared = method != "gloss";
      if (shared) units.push_back({method, beta_list.front(), mu_list.front(), {}, {}, 0});
      for (double b : beta_list)
        for (double mu : mu_list) {
          if (!shared) units.push_back({method, b, mu, {}, {}, 0});
          for (std::size_t k : kappas) cells.push_back({units.size() - 1, k, b, mu});
        }
    }

    parallel_for(units.size(), width, [&](std::size_t i) {
      Unit& u = units[i];
      json c = base;
      c["method"] = u.method;
      c["beta"] = u.beta;
      c["mu"] = u.mu;
      c["kappa"] = u.method == "all_features" ? d : top;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        u.ranking = indices(run_select(x.get(), graph.get(), c).get());
      } catch (const Failure& f) {
        u.error = f.message;
      }
      u.seconds = seconds_since(t0);
    });
    parallel_for(cells.size(), width, [&](std::size_t i) {
      Cell& cell = cells[i];
      const Unit& u = units[cell.unit];
      if (!u.error.empty()) {
        cell.status = "error: " + u.error;
        return;
      }
      const std::size_t k = cell.kappa;
      if (k > u.ranking.size()) {
        cell.status = "error: kappa " + std::to_string(k) + " exceeds d = " + std::to_string(d);
        return;
      }
      const std::vector<std::size_t> chosen(u.ranking.begin(),
                                            u.ranking.begin() + static_cast<std::ptrdiff_t>(k));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        cell.result = evaluate(x.get(), truth.get(), chosen, spec);
      } catch (const Failure& f) {
        cell.status = "error: " + f.message;
      }
      cell.seconds = seconds_since(t0);
    });

    fs::create_directories(out_dir);
    write_outputs(fs::path(out_dir), name, base, units, cells, kappas, beta_list, mu_list);

    std::size_t failed = 0;
    for (const auto& c : cells) failed += c.status != "ok";
    report_best(units, cells);
    if (failed == cells.size()) {
      std::cerr << "error: every sweep cell failed (" << cells.front().status << ")\n";
      return kExitData;
    }
    if (failed) std::cerr << "warning: " << failed << " of " << cells.size() << " cells failed\n";
    return 0;
  }

  static std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
  }

  void write_outputs(const fs::path& dir, const std::string& name, const json& base,
                     const std::vector<Unit>& units, const std::vector<Cell>& cells,
                     const std::vector<std::size_t>& kappas, const std::vector<double>& betas,
                     const std::vector<double>& mus) const {
    // cells are generated in (method, beta, mu, kappa) order; re-sort by (method, kappa, beta, mu)
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Cell& ca = cells[a];
      const Cell& cb = cells[b];
      return std::tie(units[ca.unit].method, ca.kappa, ca.beta, ca.mu) <
             std::tie(units[cb.unit].method, cb.kappa, cb.beta, cb.mu);
    });

    std::string results =
        "method,dataset,kappa,beta,mu,K,m,acc_mean,acc_std,nmi_mean,nmi_std,status\n";
    std::string timings = "method,kappa,beta,mu,select_seconds,eval_seconds\n";
    for (std::size_t i : order) {
      const Cell& c = cells[i];
      const Unit& u = units[c.unit];
      const bool ok = c.status == "ok";
      const std::string key = u.method + ',' + std::to_string(c.kappa) + ',' + grid_value(c.beta) +
                              ',' + grid_value(c.mu);
      results += u.method + ',' + csv_field(name) + ',' + key.substr(u.method.size() + 1) + ',' +
                 std::to_string(base["K"].get<long long>()) + ',' +
                 std::to_string(base["m"].get<long long>()) + ',' +
                 (ok ? num(c.result.acc_mean) : "") + ',' + (ok ? num(c.result.acc_std) : "") +
                 ',' + (ok ? num(c.result.nmi_mean) : "") + ',' +
                 (ok ? num(c.result.nmi_std) : "") + ',' + csv_field(c.status) + '\n';
      timings += key + ',' + fmt("%.4f", u.seconds) + ',' + fmt("%.4f", c.seconds) + '\n';
    }
    write_file(dir / "results.csv", results);
    write_file(dir / "timings.csv", timings);

    // kappa x beta matrices, one file per method, metric and mu
    const std::vector<std::pair<std::string, double glossfs_eval_summary::*>> metrics{
        {"acc_mean", &glossfs_eval_summary::acc_mean},
        {"acc_std", &glossfs_eval_summary::acc_std},
        {"nmi_mean", &glossfs_eval_summary::nmi_mean},
        {"nmi_std", &glossfs_eval_summary::nmi_std}};
    std::map<std::tuple<std::string, std::size_t, double, double>, const Cell*> lookup;
    for (const auto& c : cells) {
      lookup[{units[c.unit].method, c.kappa, c.beta, c.mu}] = &c;
    }
    std::vector<std::string> method_list;
    for (const auto& u : units)
      if (u.method != "all_features" && (method_list.empty() || method_list.back() != u.method))
        method_list.push_back(u.method);
    for (const auto& method : method_list)
      for (double mu : mus)
        for (const auto& [metric, field] : metrics) {
          std::string text = "kappa";
          for (double b : betas) text += ",beta=" + grid_value(b);
          text += '\n';
          for (std::size_t k : kappas) {
            text += std::to_string(k);
            for (double b : betas) {
              const Cell* c = lookup.at({method, k, b, mu});
              text += ',';
              if (c->status == "ok") text += num(c->result.*field);
            }
            text += '\n';
          }
          std::string file = method + '_' + metric;
          if (mus.size() > 1) file += "_mu" + grid_value(mu);
          write_file(dir / (file + ".csv"), text);
        }
  }

  static void report_best(const std::vector<Unit>& units, const std::vector<Cell>& cells) {
    std::map<std::string, const Cell*> best;
    for (const auto& c : cells) {
      if (c.status != "ok") continue;
      const std::string& method = units[c.unit].method;
      auto it = best.find(method);
      if (it == best.end() || c.result.acc_mean > it->second->result.acc_mean) best[method] = &c;
    }
    for (const auto& [method, c] : best) {
      std::cout << "best " << method << ": acc " << fmt("%.2f", 100 * c->result.acc_mean) << " +- "
                << fmt("%.2f", 100 * c->result.acc_std) << ", nmi "
                << fmt("%.2f", 100 * c->result.nmi_mean) << " +- "
                << fmt("%.2f", 100 * c->result.nmi_std) << " at kappa=" << c->kappa
                << " beta=" << grid_value(c->beta) << " mu=" << grid_value(c->mu) << '\n';
    }
  }
};

struct SynthCmd {
  std::string out_dir;
  std::size_t n = 100, d = 30, kappa = 5, mix = 0;
  double noise = 0.0, separation = 4.0;
  std::uint64_t seed = 0;
  int classes = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("synth", "write a planted synthetic instance");
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    sub->add_option("-n,--rows", n, "samples")->capture_default_str()->check(CLI::Range(2, 1 << 30));
    sub->add_option("-d,--cols", d, "features")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--kappa", kappa, "planted columns")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--noise", noise, "Gaussian noise sigma")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "generator seed")->capture_default_str();
    sub->add_option("--mix", mix, "planted columns per mixed column, 0 = all")->capture_default_str();
    sub->add_option("--classes", classes, "add class structure with this many classes")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--separation", separation, "class center scale")->capture_default_str();
  }

  int run() {
    glossfs_synth_options o{n, d, kappa, noise, seed, mix, classes, separation};
    glossfs_matrix* raw_m = nullptr;
    glossfs_labels* raw_l = nullptr;
    std::vector<std::size_t> truth(kappa);
    check(glossfs_synthesize(&o, &raw_m, classes > 0 ? &raw_l : nullptr, truth.data()));
    const Matrix m(raw_m);
    const Labels l(raw_l);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    check(glossfs_matrix_save_csv(m.get(), (dir / "X.csv").string().c_str()));
    if (l) check(glossfs_labels_save(l.get(), (dir / "labels.csv").string().c_str()));
    std::string lines;
    for (std::size_t j : truth) lines += std::to_string(j) + '\n';
    write_file(dir / "true_features.csv", lines);
    std::cout << "wrote " << (dir / "X.csv").string() << " (" << n << " x " << d << ")"
              << (l ? ", labels.csv" : "") << ", true_features.csv\n";
    return 0;
  }
};

struct VerifyCmd {
  std::string suite = "all";
  std::size_t cases = 0;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("verify", "cross-check fast routines against their oracles");
    sub->add_option("--suite", suite, "all, prox, assignment or greedy")
        ->capture_default_str()
        ->check(CLI::IsMember({"all", "prox", "assignment", "greedy"}));
    sub->add_option("--cases", cases, "cases per suite, 0 = suite default")->capture_default_str();
    sub->add_option("--seed", seed, "case generator seed")->capture_default_str();
  }

  int run() {
    char* out = nullptr;
    check(glossfs_verify(suite.c_str(), cases, seed, &out));
    const std::string text = take_string(out);
    std::cout << text << '\n';
    for (const auto& r : json::parse(text))
      if (!r["passed"].get<bool>()) return kExitData;
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised feature selection with graph-regularized subspace learning"};
  app.set_version_flag("--version", glossfs_version());
  app.require_subcommand(0, 1);
  bool show_config = false;
  app.add_flag("--show-config", show_config, "print the built-in defaults and exit");

  SelectCmd select;
  EvalCmd eval;
  SweepCmd sweep;
  SynthCmd synth;
  VerifyCmd verify;
  select.add(app);
  eval.add(app);
  sweep.add(app);
  synth.add(app);
  verify.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("select")) return select.run();
    if (app.got_subcommand("eval")) return eval.run();
    if (app.got_subcommand("sweep")) return sweep.run();
    if (app.got_subcommand("synth")) return synth.run();
    if (app.got_subcommand("verify")) return verify.run();
    if (show_config) {
      std::cout << builtin_defaults().dump(2) << '\n';
      return 0;
    }
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    if (f.code == kExitUsage) std::cerr << "run with --help for usage\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
