#include "commands.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "engine.hpp"
#include "intentgrasp/ambiguity.hpp"
#include "intentgrasp/errors.hpp"
#include "reference_tables.hpp"

namespace intentgrasp::app {
namespace {

std::string fixed(double value, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void print_matrix(std::ostream& out, const std::string& title, const Matrix& m,
                  const std::vector<std::string>& names) {
  out << title << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "  %-10s", names[static_cast<std::size_t>(i)].c_str());
    out << label;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      char cell[32];
      std::snprintf(cell, sizeof cell, "%10.4f", m(i, j));
      out << cell;
    }
    out << "\n";
  }
}

std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag) {
  return flag ? flag : seed_from_environment();
}

void print_target(std::ostream& out, const ZoneLayout& layout, const HumanProbabilityVector& u,
                  const TargetProbabilityVector& v) {
  out << "target probability vector v\n";
  for (std::size_t k = 0; k < layout.zone_count(); ++k) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-28s %s\n", layout.name_of(layout.zone(k)).c_str(), fixed(v.v[k]).c_str());
    out << line;
  }
  out << "  inaction probability (dropped) " << fixed(u.inaction()) << "\n";
}

}  // namespace

int run_command(const std::function<int()>& body, Console& console) {
  try {
    return body();
  } catch (const IoError& e) {
    console.err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const FormatError& e) {
    console.err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InsufficientSamples& e) {
    console.err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    console.err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_generate(const GenerateOptions& options, Console& console) {
  const auto load_spec = [&]() -> GeneratorSpec {
    const std::filesystem::path spec_path(options.spec);
    if (std::filesystem::exists(spec_path)) {
      return generator_spec_from_json(Json::parse(read_text_file(spec_path), nullptr, false));
    }
    if (builtin_specs().count(options.spec) != 0) return builtin_spec(options.spec);
    if (spec_path.has_extension() || options.spec.find('/') != std::string::npos) {
      throw IoError("generator spec file not found: " + options.spec);
    }
    throw ValidationError("unknown generator spec '" + options.spec + "'");
  };
  GeneratorSpec spec = load_spec();
  if (const auto seed = effective_seed(options.seed)) spec.seed = *seed;
  if (options.samples_per_zone) spec.samples_per_zone = *options.samples_per_zone;

  const Dataset data = generate(spec);
  if (options.out) {
    save_dataset(data, *options.out);
  } else if (!console.json) {
    console.out << dataset_to_text(data);
    return kExitOk;
  }
  if (console.json) {
    Json summary{{"object", data.object},
                 {"seed", data.seed},
                 {"samples", data.samples.size()},
                 {"layout", layout_to_json(data.layout)}};
    summary["path"] = options.out ? Json(options.out->string()) : Json(nullptr);
    if (!options.out) summary["dataset"] = dataset_to_text(data);
    console.out << dump_json(summary) << "\n";
  } else {
    console.out << "wrote " << data.samples.size() << " samples of " << data.object << " (seed " << data.seed
                << ") to " << options.out->string() << "\n";
  }
  return kExitOk;
}

int cmd_fit(const FitOptions& options, Console& console) {
  const Dataset data = load_dataset(options.data);
  const ZoneLayout layout = options.layout ? parse_layout(*options.layout, data.layout.tasks()) : data.layout;
  ModelConfig config;
  config.priors = options.uniform_priors ? PriorMode::Uniform : PriorMode::InclusiveCount;
  config.mle.diagonal = options.diagonal;
  config.mle.regularization = options.ridge;
  const MultiTaskModel model = fit_model(data.samples, layout, data.schema, config);
  if (options.out) save_model(model, *options.out);

  double prior_sum = 0.0;
  for (const auto& c : model.classes()) prior_sum += c.prior;
  if (console.json) {
    Json summary = model_summary_json(data.object, model);
    summary["prior_sum"] = prior_sum;
    summary["path"] = options.out ? Json(options.out->string()) : Json(nullptr);
    if (!options.out) summary["model"] = model_to_json(model);
    console.out << dump_json(summary) << "\n";
    return kExitOk;
  }
  console.out << "fitted " << model.class_count() << " classes on " << data.samples.size() << " samples\n";
  for (const auto& c : model.classes()) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-28s prior %s\n", layout.name_of(c.tasks).c_str(), fixed(c.prior).c_str());
    console.out << line;
  }
  console.out << "prior sum " << fixed(prior_sum, 12) << "\n";
  if (options.out) console.out << "model written to " << options.out->string() << "\n";
  return kExitOk;
}

int cmd_intent(const IntentOptions& options, Console& console) {
  const ModelEntry entry = resolve_model(options.model, effective_seed(options.seed));
  const ZoneLayout& layout = entry.model->layout();
  const Json result = intent_json({options.w}, layout, options.clarify_threshold);
  if (console.json) {
    console.out << dump_json(result) << "\n";
    return kExitOk;
  }
  const auto u = joint_events({options.w});
  if (result.at("clarification_needed").get<bool>()) {
    console.out << "inaction probability " << fixed(u.inaction()) << " reached the clarification threshold "
                << fixed(*options.clarify_threshold) << "; ask the operator to clarify\n";
    return kExitOk;
  }
  const auto v = target_vector(u, layout);
  print_target(console.out, layout, u, v);
  const auto w_rec = reconstruct_intent(v.v, layout).w;
  console.out << "intent reconstructed from v:";
  for (std::size_t t = 0; t < layout.task_count(); ++t) console.out << " " << layout.tasks()[t] << " " << fixed(w_rec[t]);
  console.out << "\n";
  return kExitOk;
}

int cmd_plan(const PlanOptions& options, Console& console) {
  const auto seed = effective_seed(options.seed);
  const ModelEntry entry = resolve_model(options.model, seed);
  const auto& model = *entry.model;
  const ZoneLayout& layout = model.layout();
  if (options.w.size() != layout.task_count()) throw DimensionMismatch("intent w", layout.task_count(), options.w.size());

  const auto u = joint_events({options.w});
  std::optional<TargetProbabilityVector> target;
  try {
    target = target_vector(u, layout, options.clarify_threshold);
  } catch (const ClarificationNeeded& e) {
    if (console.json) {
      console.out << dump_json(Json{{"clarification_needed", true}, {"inaction", e.inaction_probability()}}) << "\n";
    } else {
      console.out << "inaction probability " << fixed(e.inaction_probability())
                  << " reached the clarification threshold; no plan produced\n";
    }
    return kExitOk;
  }
  if (!console.json) {
    print_target(console.out, layout, u, *target);
    console.out.flush();
  }

  PlanningProblem problem{entry.model, target->v, std::nullopt, std::nullopt, {}};
  if (options.lower || options.upper) {
    Bounds bounds = default_bounds(model);
    const auto apply = [&](const std::optional<std::vector<double>>& values, Vector& dest, const char* what) {
      if (!values) return;
      if (values->size() != model.dim()) throw DimensionMismatch(what, model.dim(), values->size());
      for (std::size_t i = 0; i < values->size(); ++i) dest[static_cast<Eigen::Index>(i)] = (*values)[i];
    };
    apply(options.lower, bounds.lower, "lower bounds");
    apply(options.upper, bounds.upper, "upper bounds");
    problem.bounds = bounds;
  }
  PlanConfig config;
  config.strategy = parse_solver(options.solver);
  if (seed) config.seed = *seed;
  if (options.max_iterations) config.max_iterations = *options.max_iterations;
  if (options.time_limit_seconds) {
    config.time_limit = std::chrono::milliseconds(static_cast<long long>(*options.time_limit_seconds * 1000.0));
  }
  const PlanResult result = plan(problem, config);

  Json doc = plan_result_to_json(result, layout);
  doc["model"] = entry.name;
  doc["w"] = options.w;
  doc["target"] = target->v;
  if (options.out) write_text_file_atomic(*options.out, dump_json(doc) + "\n");
  if (console.json) {
    console.out << dump_json(doc) << "\n";
    return kExitOk;
  }

  auto& out = console.out;
  if (!result.converged) out << "NONCONVERGED (" << result.termination << ")\n";
  out << "solver " << to_string(result.solver) << ": " << result.termination << " after " << result.iterations
      << " iterations\n";
  out << "residual " << general(result.residual) << " (initial pose " << general(result.initial_residual) << ")"
      << (result.feasible ? "" : ", constraints violated") << "\n";
  out << "planned pose\n";
  for (std::size_t i = 0; i < model.dim(); ++i) {
    const auto& f = model.schema()[i];
    char line[96];
    std::snprintf(line, sizeof line, "  %-12s %12.6f %s\n", f.name.c_str(), result.x[static_cast<Eigen::Index>(i)],
                  f.unit.c_str());
    out << line;
  }
  out << "zone                           target  posterior\n";
  for (std::size_t k = 0; k < layout.zone_count(); ++k) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-28s %s   %s\n", layout.name_of(layout.zone(k)).c_str(),
                  fixed(target->v[k]).c_str(), fixed(result.posterior[static_cast<Eigen::Index>(k)]).c_str());
    out << line;
  }
  const auto w_rec = doc.at("reconstructed_intent").get<std::vector<double>>();
  out << "reconstructed intent:";
  for (std::size_t t = 0; t < layout.task_count(); ++t) out << " " << layout.tasks()[t] << " " << fixed(w_rec[t]);
  out << "\n";
  if (options.out) out << "result written to " << options.out->string() << "\n";
  return kExitOk;
}

int cmd_ambiguity(const AmbiguityOptions& options, Console& console) {
  const ModelEntry entry = resolve_model(options.model, effective_seed(options.seed));
  std::vector<LabeledSample> samples = entry.samples;
  if (options.data) samples = load_dataset(*options.data, entry.model->schema()).samples;
  const DivergenceReport report = divergence_matrices(*entry.model, samples);
  if (console.json) {
    console.out << dump_json(report_to_json(report)) << "\n";
    return kExitOk;
  }
  print_matrix(console.out, "nonsymmetric KL (row: true population, column: inference)", report.nonsymmetric,
               report.tasks);
  print_matrix(console.out, "symmetric KL", report.symmetric, report.tasks);
  print_matrix(console.out, "Pinsker bounds", report.pinsker, report.tasks);
  console.out << "eigenvalues of the symmetric matrix:";
  for (double e : report.eigenvalues) console.out << " " << fixed(e);
  console.out << "\n";
  if (!report.refit_tasks.empty()) {
    console.out << "populations refit from training samples (no singleton class):";
    for (const auto& t : report.refit_tasks) console.out << " " << t;
    console.out << "\n";
  }
  return kExitOk;
}

int cmd_reproduce_tables(Console& console) {
  const TableReport report = reproduce_reference_tables();
  if (console.json) {
    console.out << dump_json(to_json(report)) << "\n";
  } else {
    console.out << to_text(report);
  }
  return report.passed() ? kExitOk : kExitValidation;
}

}  // namespace intentgrasp::app
