#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "service.hpp"

using namespace intentgrasp::app;

int main(int argc, char** argv) {
  CLI::App app{"Intent-uncertainty-aware grasp planning with inclusive multi-task Gaussian models"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Machine-readable JSON output");

  GenerateOptions gen;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic labeled grasp dataset");
  generate->add_option("--spec", gen.spec, "Built-in spec (cup7, cup5, cup4, flashlight7) or spec JSON file")
      ->required();
  generate->add_option("--out,-o", gen_out, "Dataset file (JSON lines); stdout when omitted");
  generate->add_option("--seed", gen.seed, "Seed (falls back to INTENTGRASP_SEED, then the spec's seed)");
  generate->add_option("--samples-per-zone", gen.samples_per_zone, "Draws per zone");

  FitOptions fit;
  std::string fit_out, fit_layout;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an inclusive multi-task model to a dataset");
  fit_cmd->add_option("--data,-d", fit.data, "Dataset file")->required();
  fit_cmd->add_option("--layout", fit_layout, "seven, five, four, full, or zones like U,T,U+T");
  fit_cmd->add_option("--out,-o", fit_out, "Model file");
  fit_cmd->add_flag("--uniform-priors", fit.uniform_priors, "Uniform class priors instead of inclusive counts");
  fit_cmd->add_flag("--diagonal", fit.diagonal, "Diagonal covariances");
  fit_cmd->add_option("--ridge", fit.ridge, "Covariance ridge added to the diagonal");

  IntentOptions intent;
  auto* intent_cmd = app.add_subcommand("intent", "Turn task probabilities w into the target vector v");
  intent_cmd->add_option("--model,-m", intent.model, "Model file or built-in name")->required();
  intent_cmd->add_option("-w", intent.w, "Per-task probabilities, comma separated")->required()->delimiter(',');
  intent_cmd->add_option("--clarify-threshold", intent.clarify_threshold, "Inaction mass that requests clarification");
  intent_cmd->add_option("--seed", intent.seed, "Seed for built-in models");

  PlanOptions plan_opts;
  std::string plan_out;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a grasp pose whose posterior matches the intent");
  plan_cmd->add_option("--model,-m", plan_opts.model, "Model file or built-in name")->required();
  plan_cmd->add_option("-w", plan_opts.w, "Per-task probabilities, comma separated")->required()->delimiter(',');
  plan_cmd->add_option("--solver", plan_opts.solver, "pgd (projected gradient) or alm (augmented Lagrangian)")
      ->capture_default_str();
  plan_cmd->add_option("--seed", plan_opts.seed, "Seed for candidate draws (falls back to INTENTGRASP_SEED)");
  plan_cmd->add_option("--max-iter", plan_opts.max_iterations, "Iteration budget");
  plan_cmd->add_option("--lower", plan_opts.lower, "Lower bounds, comma separated")->delimiter(',');
  plan_cmd->add_option("--upper", plan_opts.upper, "Upper bounds, comma separated")->delimiter(',');
  plan_cmd->add_option("--clarify-threshold", plan_opts.clarify_threshold, "Inaction mass that requests clarification");
  plan_cmd->add_option("--time-limit", plan_opts.time_limit_seconds, "Wall-clock budget in seconds");
  plan_cmd->add_option("--out,-o", plan_out, "Also write the JSON result here");

  AmbiguityOptions amb;
  std::string amb_data;
  auto* amb_cmd = app.add_subcommand("ambiguity", "KL divergence matrices between task populations");
  amb_cmd->add_option("--model,-m", amb.model, "Model file or built-in name")->required();
  amb_cmd->add_option("--data,-d", amb_data, "Training data, needed when the layout lacks singleton classes");
  amb_cmd->add_option("--seed", amb.seed, "Seed for built-in models");

  auto* tables_cmd = app.add_subcommand("reproduce-tables", "Recompute published target vectors and reconstructions");

  std::string listen = "127.0.0.1:8630";
  std::string static_dir = "webui/dist";
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API with the built-in models");
  serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--static", static_dir, "Directory served at /")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  Console console{std::cout, std::cerr, json};
  if (*generate) {
    if (!gen_out.empty()) gen.out = gen_out;
    return run_command([&] { return cmd_generate(gen, console); }, console);
  }
  if (*fit_cmd) {
    if (!fit_out.empty()) fit.out = fit_out;
    if (!fit_layout.empty()) fit.layout = fit_layout;
    return run_command([&] { return cmd_fit(fit, console); }, console);
  }
  if (*intent_cmd) return run_command([&] { return cmd_intent(intent, console); }, console);
  if (*plan_cmd) {
    if (!plan_out.empty()) plan_opts.out = plan_out;
    return run_command([&] { return cmd_plan(plan_opts, console); }, console);
  }
  if (*amb_cmd) {
    if (!amb_data.empty()) amb.data = amb_data;
    return run_command([&] { return cmd_ambiguity(amb, console); }, console);
  }
  if (*tables_cmd) return run_command([&] { return cmd_reproduce_tables(console); }, console);
  if (*serve_cmd) {
    return run_command(
        [&] {
          Service service;
          service.load_builtin_models();
          return run_http_server(service, listen, static_dir);
        },
        console);
  }
  return kExitValidation;
}
