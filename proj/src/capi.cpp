#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>

#include "glossfs/config.hpp"
#include "glossfs/dataset.hpp"
#include "glossfs/error.hpp"
#include "glossfs/eval.hpp"
#include "glossfs/glossfs.h"
#include "glossfs/graph.hpp"
#include "glossfs/oracle.hpp"

struct glossfs_matrix {
  glossfs::DataMatrix data;
};

struct glossfs_labels {
  glossfs::LabelVector labels;
};

struct glossfs_graph {
  glossfs::SimilarityGraph graph;
  glossfs::Index n = 0;
};

struct glossfs_selection {
  glossfs::SelectionRecord record;
};

namespace {

thread_local std::string last_error;

glossfs_status set_error(glossfs_status status, const std::string& message) {
  last_error = message;
  return status;
}

glossfs_status map_kind(glossfs::ErrorKind kind) {
  switch (kind) {
    case glossfs::ErrorKind::InvalidArgument: return GLOSSFS_ERR_INVALID_ARGUMENT;
    case glossfs::ErrorKind::Io: return GLOSSFS_ERR_IO;
    case glossfs::ErrorKind::Parse: return GLOSSFS_ERR_PARSE;
    case glossfs::ErrorKind::Numerical: return GLOSSFS_ERR_NUMERICAL;
  }
  return GLOSSFS_ERR_INTERNAL;
}

template <class F>
glossfs_status guarded(F&& body) {
  try {
    body();
    return GLOSSFS_OK;
  } catch (const glossfs::Error& e) {
    return set_error(map_kind(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(GLOSSFS_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(GLOSSFS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(GLOSSFS_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(GLOSSFS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* what) {
  if (!condition) glossfs::fail(glossfs::ErrorKind::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_config(const char* text) {
  if (!text || !*text) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    glossfs::fail(glossfs::ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
}

glossfs::SelectSettings settings_from(const char* text) {
  return glossfs::merge_settings(glossfs::SelectSettings{}, parse_config(text));
}

// The matrix itself when already normalized, otherwise a normalized copy.
const glossfs::DataMatrix& normalized(const glossfs::DataMatrix& m,
                                      std::optional<glossfs::DataMatrix>& storage) {
  if (m.normalized()) return m;
  storage.emplace(glossfs::normalize_features(m).matrix);
  return *storage;
}

}  // namespace

extern "C" {

const char* glossfs_version(void) { return "1.0.0"; }

const char* glossfs_last_error(void) { return last_error.c_str(); }

const char* glossfs_status_string(glossfs_status status) {
  switch (status) {
    case GLOSSFS_OK: return "ok";
    case GLOSSFS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case GLOSSFS_ERR_IO: return "i/o error";
    case GLOSSFS_ERR_PARSE: return "parse error";
    case GLOSSFS_ERR_NUMERICAL: return "numerical error";
    case GLOSSFS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void glossfs_string_free(char* s) { delete[] s; }

glossfs_status glossfs_matrix_load_csv(const char* path, int has_header, glossfs_matrix** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new glossfs_matrix{glossfs::load_matrix(path, has_header != 0)};
  });
}

glossfs_status glossfs_matrix_from_rows(const double* values, size_t n, size_t d,
                                        glossfs_matrix** out) {
  return guarded([&] {
    require(values && out, "null argument");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < d; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * d + j];
    *out = new glossfs_matrix{glossfs::DataMatrix(std::move(m))};
  });
}

glossfs_status glossfs_matrix_save_csv(const glossfs_matrix* m, const char* path) {
  return guarded([&] {
    require(m && path, "null argument");
    glossfs::save_matrix(m->data, path);
  });
}

glossfs_status glossfs_matrix_shape(const glossfs_matrix* m, size_t* n, size_t* d) {
  return guarded([&] {
    require(m, "null matrix");
    if (n) *n = static_cast<size_t>(m->data.rows());
    if (d) *d = static_cast<size_t>(m->data.cols());
  });
}

glossfs_status glossfs_matrix_copy_rows(const glossfs_matrix* m, double* out, size_t capacity) {
  return guarded([&] {
    require(m && out, "null argument");
    const auto& v = m->data.values();
    require(capacity >= static_cast<size_t>(v.size()), "output buffer too small");
    const auto d = static_cast<size_t>(v.cols());
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        out[static_cast<size_t>(i) * d + static_cast<size_t>(j)] = v(i, j);
  });
}

int glossfs_matrix_is_normalized(const glossfs_matrix* m) {
  return m && m->data.normalized() ? 1 : 0;
}

glossfs_status glossfs_matrix_normalize(const glossfs_matrix* m, glossfs_matrix** out,
                                        size_t* zero_columns) {
  return guarded([&] {
    require(m && out, "null argument");
    auto result = glossfs::normalize_features(m->data);
    if (zero_columns) *zero_columns = result.zero_columns.size();
    *out = new glossfs_matrix{std::move(result.matrix)};
  });
}

void glossfs_matrix_free(glossfs_matrix* m) { delete m; }

glossfs_status glossfs_synthesize(const glossfs_synth_options* opts, glossfs_matrix** matrix,
                                  glossfs_labels** labels, size_t* true_features) {
  return guarded([&] {
    require(opts && matrix && true_features, "null argument");
    glossfs::PlantedOptions o;
    o.n = static_cast<glossfs::Index>(opts->n);
    o.d = static_cast<glossfs::Index>(opts->d);
    o.kappa = static_cast<glossfs::Index>(opts->kappa);
    o.noise_sigma = opts->noise_sigma;
    o.seed = opts->seed;
    o.mix = static_cast<glossfs::Index>(opts->mix);
    o.classes = opts->classes;
    o.separation = opts->separation;
    auto inst = glossfs::synthesize_planted(o);
    auto* m = new glossfs_matrix{std::move(inst.matrix)};
    glossfs_labels* l = nullptr;
    if (labels && opts->classes > 0) {
      try {
        l = new glossfs_labels{std::move(inst.labels)};
      } catch (...) {
        delete m;
        throw;
      }
    }
    for (size_t j = 0; j < inst.true_features.size(); ++j)
      true_features[j] = static_cast<size_t>(inst.true_features[j]);
    *matrix = m;
    if (labels) *labels = l;
  });
}

glossfs_status glossfs_labels_load(const char* path, glossfs_labels** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new glossfs_labels{glossfs::load_labels(path)};
  });
}

glossfs_status glossfs_labels_from_array(const long long* ids, size_t n, glossfs_labels** out) {
  return guarded([&] {
    require(ids && out, "null argument");
    require(n > 0, "label vector is empty");
    *out = new glossfs_labels{glossfs::LabelVector::from_raw(std::vector<long long>(ids, ids + n))};
  });
}

glossfs_status glossfs_labels_save(const glossfs_labels* l, const char* path) {
  return guarded([&] {
    require(l && path, "null argument");
    glossfs::save_labels(l->labels, path);
  });
}

glossfs_status glossfs_labels_info(const glossfs_labels* l, size_t* n, size_t* classes) {
  return guarded([&] {
    require(l, "null labels");
    if (n) *n = l->labels.size();
    if (classes) *classes = static_cast<size_t>(l->labels.classes);
  });
}

void glossfs_labels_free(glossfs_labels* l) { delete l; }

glossfs_status glossfs_default_config(char** out_json) {
  return guarded([&] {
    require(out_json, "null argument");
    *out_json = dup_string(glossfs::to_json(glossfs::SelectSettings{}).dump(2));
  });
}

glossfs_status glossfs_merge_config(const char* base_json, const char* config_json,
                                    char** out_json) {
  return guarded([&] {
    require(out_json, "null argument");
    auto base = settings_from(base_json);
    auto merged = glossfs::merge_settings(base, parse_config(config_json));
    if (merged.sigma.fixed)
      require(*merged.sigma.fixed > 0.0, "sigma must be positive");
    require(merged.gram_reg >= 0.0, "gram_reg must be >= 0");
    // kappa is checked against d at run time
    auto probe = merged.solver;
    probe.validate(std::max<glossfs::Index>(probe.kappa, 1));
    *out_json = dup_string(glossfs::to_json(merged).dump(2));
  });
}

glossfs_status glossfs_graph_build(const glossfs_matrix* m, const char* config_json,
                                   glossfs_graph** out) {
  return guarded([&] {
    require(m && out, "null argument");
    const auto settings = settings_from(config_json);
    std::optional<glossfs::DataMatrix> storage;
    const auto& x = normalized(m->data, storage);
    *out = new glossfs_graph{glossfs::build_graph(x, settings), x.rows()};
  });
}

glossfs_status glossfs_graph_sigma(const glossfs_graph* g, double* sigma) {
  return guarded([&] {
    require(g && sigma, "null argument");
    *sigma = g->graph.sigma;
  });
}

void glossfs_graph_free(glossfs_graph* g) { delete g; }

glossfs_status glossfs_select(const glossfs_matrix* m, const glossfs_graph* graph,
                              const char* config_json, glossfs_selection** out) {
  return guarded([&] {
    require(m && out, "null argument");
    auto settings = settings_from(config_json);
    std::optional<glossfs::DataMatrix> storage;
    const auto& x = normalized(m->data, storage);

    std::optional<glossfs::SimilarityGraph> owned;
    const glossfs::SimilarityGraph* g = nullptr;
    const bool needs_graph = settings.method == glossfs::Method::Gloss ||
                             settings.method == glossfs::Method::Glpsl;
    if (needs_graph) {
      if (graph) {
        require(graph->n == x.rows(), "graph was built for a different sample count");
        settings.solver.graph_kind = graph->graph.kind;
        settings.solver.m = graph->graph.m;
        g = &graph->graph;
      } else {
        owned.emplace(glossfs::build_graph(x, settings));
        g = &*owned;
      }
    }
    *out = new glossfs_selection{glossfs::run_selection(x, g, settings)};
  });
}

glossfs_status glossfs_selection_from_json(const char* json, glossfs_selection** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new glossfs_selection{glossfs::selection_from_json(nlohmann::json::parse(json))};
  });
}

glossfs_status glossfs_selection_count(const glossfs_selection* s, size_t* count) {
  return guarded([&] {
    require(s && count, "null argument");
    *count = s->record.selected.size();
  });
}

glossfs_status glossfs_selection_indices(const glossfs_selection* s, size_t* out,
                                         size_t capacity) {
  return guarded([&] {
    require(s && out, "null argument");
    require(capacity >= s->record.selected.size(), "output buffer too small");
    for (size_t i = 0; i < s->record.selected.size(); ++i)
      out[i] = static_cast<size_t>(s->record.selected[i]);
  });
}

glossfs_status glossfs_selection_json(const glossfs_selection* s, char** out_json) {
  return guarded([&] {
    require(s && out_json, "null argument");
    *out_json = dup_string(glossfs::to_json(s->record).dump(2));
  });
}

void glossfs_selection_free(glossfs_selection* s) { delete s; }

glossfs_status glossfs_evaluate(const glossfs_matrix* m, const glossfs_labels* truth,
                                const size_t* selected, size_t count, int runs, uint64_t seed,
                                int threads, int uniform_seeding, glossfs_eval_summary* out) {
  return guarded([&] {
    require(m && truth && out, "null argument");
    require(count == 0 || selected, "null selection");
    std::vector<glossfs::Index> cols(count);
    for (size_t i = 0; i < count; ++i) cols[i] = static_cast<glossfs::Index>(selected[i]);
    glossfs::EvalOptions options;
    options.runs = runs;
    options.seed = seed;
    options.threads = threads;
    options.kmeans.seeding =
        uniform_seeding ? glossfs::Seeding::Uniform : glossfs::Seeding::PlusPlus;
    const auto r = glossfs::evaluate_selection(m->data, cols, truth->labels, options);
    *out = glossfs_eval_summary{r.runs, r.acc_mean, r.acc_std, r.nmi_mean, r.nmi_std};
  });
}

glossfs_status glossfs_verify(const char* suite, size_t cases, uint64_t seed, char** out_json) {
  return guarded([&] {
    require(out_json, "null argument");
    const std::string which = suite && *suite ? suite : "all";
    require(which == "all" || which == "prox" || which == "assignment" || which == "greedy",
            "unknown verify suite (expected all, prox, assignment or greedy)");
    std::vector<glossfs::oracle::OracleReport> reports;
    if (which == "all" || which == "prox")
      reports.push_back(glossfs::oracle::verify_prox(cases ? cases : 1000, seed));
    if (which == "all" || which == "assignment")
      reports.push_back(glossfs::oracle::verify_assignment(cases ? cases : 200, seed));
    if (which == "all" || which == "greedy")
      reports.push_back(glossfs::oracle::verify_greedy_residual(cases ? cases : 50, seed));
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) {
      j.push_back({{"name", r.name},
                   {"case_count", r.case_count},
                   {"max_abs_error", r.max_abs_error},
                   {"max_rel_error", r.max_rel_error},
                   {"tolerance", r.tolerance},
                   {"passed", r.passed()},
                   {"failures", r.failures}});
    }
    *out_json = dup_string(j.dump(2));
  });
}

}  // extern "C"
