#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "glossfs/dataset.hpp"
#include "glossfs/eval.hpp"
#include "glossfs/graph.hpp"
#include "glossfs/solver.hpp"

namespace glossfs {

enum class Method { Gloss, Glpsl, AllFeatures, Random };

std::string to_string(Method method);
Method parse_method(const std::string& name);

// Everything a selection run needs besides the data.
struct SelectSettings {
  Method method = Method::Gloss;
  SolverConfig solver;
  SigmaPolicy sigma;
  double gram_reg = 1e-3;
};

nlohmann::json to_json(const SelectSettings& settings);

// Missing keys keep the values already in `base`; unknown keys are rejected.
SelectSettings merge_settings(const SelectSettings& base, const nlohmann::json& patch);

struct SelectionRecord {
  Method method = Method::Gloss;
  std::vector<Index> selected;
  Eigen::VectorXd scores;                 // gloss only
  std::vector<double> residual_history;   // glpsl only
  nlohmann::json metadata;
};

nlohmann::json to_json(const SelectionRecord& record);
SelectionRecord selection_from_json(const nlohmann::json& j);

// Builds the graph the settings ask for on an already normalized matrix.
SimilarityGraph build_graph(const DataMatrix& normalized, const SelectSettings& settings);

// Runs the configured method. `x` must be normalized and `graph` built on it
// (unused by all_features and random).
SelectionRecord run_selection(const DataMatrix& x, const SimilarityGraph* graph,
                              const SelectSettings& settings);

}  // namespace glossfs
