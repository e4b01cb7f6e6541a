#include "glossfs/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "glossfs/error.hpp"
#include "glossfs/greedy.hpp"

namespace glossfs {

using nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::Gloss: return "gloss";
    case Method::Glpsl: return "glpsl";
    case Method::AllFeatures: return "all_features";
    case Method::Random: return "random";
  }
  return "gloss";
}

Method parse_method(const std::string& name) {
  if (name == "gloss") return Method::Gloss;
  if (name == "glpsl") return Method::Glpsl;
  if (name == "all_features" || name == "all") return Method::AllFeatures;
  if (name == "random") return Method::Random;
  fail(ErrorKind::InvalidArgument, "unknown method '" + name +
                                       "' (expected gloss, glpsl, all_features or random)");
}

json to_json(const SelectSettings& s) {
  json j;
  j["method"] = to_string(s.method);
  j["K"] = s.solver.K;
  j["kappa"] = s.solver.kappa;
  j["mu"] = s.solver.mu;
  j["beta"] = s.solver.beta;
  j["delta_omega"] = s.solver.delta_omega;
  j["max_iter"] = s.solver.max_iter;
  j["tol"] = s.solver.tol;
  j["seed"] = s.solver.seed;
  j["graph"] = to_string(s.solver.graph_kind);
  j["m"] = s.solver.m;
  j["extrapolate"] = s.solver.extrapolate;
  if (s.sigma.fixed)
    j["sigma"] = *s.sigma.fixed;
  else
    j["sigma"] = "median";
  j["gram_reg"] = s.gram_reg;
  return j;
}

namespace {

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::InvalidArgument, std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

SelectSettings merge_settings(const SelectSettings& base, const json& patch) {
  if (!patch.is_object()) fail(ErrorKind::InvalidArgument, "config must be a JSON object");
  static const std::set<std::string> known = {
      "method", "K",    "kappa", "mu",    "beta",        "delta_omega", "max_iter",
      "tol",    "seed", "graph", "m",     "extrapolate", "sigma",       "gram_reg"};
  for (const auto& [key, _] : patch.items())
    if (!known.count(key)) fail(ErrorKind::InvalidArgument, "unknown config key '" + key + "'");

  SelectSettings s = base;
  if (patch.contains("method")) s.method = parse_method(get_as<std::string>(patch, "method"));
  if (patch.contains("K")) s.solver.K = get_as<Index>(patch, "K");
  if (patch.contains("kappa")) s.solver.kappa = get_as<Index>(patch, "kappa");
  if (patch.contains("mu")) s.solver.mu = get_as<double>(patch, "mu");
  if (patch.contains("beta")) s.solver.beta = get_as<double>(patch, "beta");
  if (patch.contains("delta_omega")) s.solver.delta_omega = get_as<double>(patch, "delta_omega");
  if (patch.contains("max_iter")) s.solver.max_iter = get_as<int>(patch, "max_iter");
  if (patch.contains("tol")) s.solver.tol = get_as<double>(patch, "tol");
  if (patch.contains("seed")) s.solver.seed = get_as<std::uint64_t>(patch, "seed");
  if (patch.contains("graph"))
    s.solver.graph_kind = parse_graph_kind(get_as<std::string>(patch, "graph"));
  if (patch.contains("m")) s.solver.m = get_as<Index>(patch, "m");
  if (patch.contains("extrapolate")) s.solver.extrapolate = get_as<bool>(patch, "extrapolate");
  if (patch.contains("gram_reg")) s.gram_reg = get_as<double>(patch, "gram_reg");
  if (patch.contains("sigma")) {
    const auto& v = patch.at("sigma");
    if (v.is_string() && v.get<std::string>() == "median")
      s.sigma = SigmaPolicy::median();
    else if (v.is_number())
      s.sigma = SigmaPolicy::value(v.get<double>());
    else
      fail(ErrorKind::InvalidArgument, "sigma must be \"median\" or a number");
  }
  return s;
}

json to_json(const SelectionRecord& r) {
  json j;
  j["method"] = to_string(r.method);
  j["selected"] = r.selected;
  if (r.scores.size() > 0)
    j["scores"] = std::vector<double>(r.scores.data(), r.scores.data() + r.scores.size());
  if (!r.residual_history.empty()) j["residual_history"] = r.residual_history;
  j["metadata"] = r.metadata;
  return j;
}

SelectionRecord selection_from_json(const json& j) {
  SelectionRecord r;
  try {
    r.method = parse_method(j.at("method").get<std::string>());
    r.selected = j.at("selected").get<std::vector<Index>>();
    if (j.contains("scores")) {
      const auto scores = j.at("scores").get<std::vector<double>>();
      r.scores = Eigen::Map<const Eigen::VectorXd>(scores.data(),
                                                   static_cast<Index>(scores.size()));
    }
    if (j.contains("residual_history"))
      r.residual_history = j.at("residual_history").get<std::vector<double>>();
    if (j.contains("metadata")) r.metadata = j.at("metadata");
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed ranking JSON: ") + e.what());
  }
  return r;
}

SimilarityGraph build_graph(const DataMatrix& x, const SelectSettings& s) {
  if (s.solver.graph_kind == GraphKind::Lle) return lle_weights(x, s.solver.m, s.gram_reg);
  return lpp_similarity(x, s.solver.m, s.sigma);
}

SelectionRecord run_selection(const DataMatrix& x, const SimilarityGraph* graph,
                              const SelectSettings& s) {
  const auto start = std::chrono::steady_clock::now();
  const Index d = x.cols();
  SelectionRecord r;
  r.method = s.method;
  r.metadata["config"] = to_json(s);
  r.metadata["normalization"] = "unit_l2_columns_before_graph";
  r.metadata["n"] = x.rows();
  r.metadata["d"] = d;

  auto need_graph = [&]() -> const SimilarityGraph& {
    if (!graph) fail(ErrorKind::InvalidArgument, "method needs a similarity graph");
    r.metadata["graph"] = to_string(graph->kind);
    if (graph->kind == GraphKind::Lpp)
      r.metadata["sigma"] = graph->sigma;
    else
      r.metadata["gram_reg"] = s.gram_reg;
    return *graph;
  };

  switch (s.method) {
    case Method::Gloss: {
      const auto lap = laplacian(need_graph());
      auto result = gloss_run(x, lap, s.solver);
      r.selected = result.ranking.selected;
      r.scores = result.ranking.scores;
      r.metadata["iterations"] = result.state.iter;
      r.metadata["restarts"] = result.state.restarts;
      r.metadata["objective_history"] = result.state.objective_history;
      r.metadata["momentum_reset_on_restart"] = false;
      r.metadata["final_lipschitz"] = result.state.lipschitz;
      break;
    }
    case Method::Glpsl: {
      if (s.solver.kappa < 1 || s.solver.kappa > d)
        fail(ErrorKind::InvalidArgument, "kappa must lie in [1, d]");
      auto result = glpsl_select(x, need_graph(), s.solver.kappa);
      r.selected = result.selected;
      r.residual_history = result.residual_history;
      r.metadata["greedy_mu"] = 1.0;
      break;
    }
    case Method::AllFeatures: {
      r.selected.resize(static_cast<std::size_t>(d));
      std::iota(r.selected.begin(), r.selected.end(), Index{0});
      break;
    }
    case Method::Random: {
      if (s.solver.kappa < 1 || s.solver.kappa > d)
        fail(ErrorKind::InvalidArgument, "kappa must lie in [1, d]");
      std::vector<Index> all(static_cast<std::size_t>(d));
      std::iota(all.begin(), all.end(), Index{0});
      std::mt19937_64 rng(s.solver.seed);
      std::shuffle(all.begin(), all.end(), rng);
      r.selected.assign(all.begin(), all.begin() + s.solver.kappa);
      break;
    }
  }
  r.metadata["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace glossfs
