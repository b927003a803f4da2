#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "engine.hpp"
#include "intentgrasp/dataset.hpp"
#include "intentgrasp/errors.hpp"
#include "intentgrasp/json_io.hpp"

namespace intentgrasp::app {
namespace {

namespace fs = std::filesystem;

struct CommandRun {
  int code;
  std::string out;
  std::string err;
};

template <typename F>
CommandRun run(bool json, F&& body) {
  std::ostringstream out, err;
  Console console{out, err, json};
  const int code = run_command([&] { return body(console); }, console);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "intentgrasp_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CmdGenerate, DeterministicFiles) {
  GenerateOptions options{"cup7", scratch("a.jsonl"), 42, std::nullopt};
  ASSERT_EQ(run(false, [&](Console& c) { return cmd_generate(options, c); }).code, kExitOk);
  options.out = scratch("b.jsonl");
  ASSERT_EQ(run(false, [&](Console& c) { return cmd_generate(options, c); }).code, kExitOk);
  EXPECT_EQ(read_text_file(scratch("a.jsonl")), read_text_file(scratch("b.jsonl")));
  EXPECT_EQ(load_dataset(scratch("a.jsonl")).seed, 42u);
}

TEST(CmdGenerate, UnknownSpecAndMissingFile) {
  const CommandRun unknown = run(false, [](Console& c) { return cmd_generate({"teapot", std::nullopt, 1, std::nullopt}, c); });
  EXPECT_EQ(unknown.code, kExitValidation);
  EXPECT_NE(unknown.err.find("teapot"), std::string::npos);
  EXPECT_EQ(run(false, [](Console& c) { return cmd_generate({"nowhere/spec.json", std::nullopt, 1, std::nullopt}, c); })
                .code,
            kExitIo);
}

TEST(CmdGenerate, JsonEmbedsParsableDataset) {
  const CommandRun r = run(true, [](Console& c) { return cmd_generate({"cup4", std::nullopt, 3, 10}, c); });
  ASSERT_EQ(r.code, kExitOk);
  const Json j = Json::parse(r.out);
  const Dataset data = dataset_from_text(j["dataset"].get<std::string>());
  EXPECT_EQ(data.samples.size(), 40u);
  EXPECT_EQ(layout_from_json(j["layout"]), four_zone_layout());
}

TEST(CmdFit, SevenClassesAndPriorSum) {
  save_dataset(generate(builtin_spec("cup7")), scratch("cup7.jsonl"));
  FitOptions options;
  options.data = scratch("cup7.jsonl");
  options.out = scratch("cup7.model.json");
  const CommandRun text = run(false, [&](Console& c) { return cmd_fit(options, c); });
  ASSERT_EQ(text.code, kExitOk) << text.err;
  EXPECT_NE(text.out.find("fitted 7 classes"), std::string::npos);
  EXPECT_NE(text.out.find("prior sum 1.000000000000"), std::string::npos);
  EXPECT_EQ(load_model(scratch("cup7.model.json")).class_count(), 7u);

  const CommandRun json = run(true, [&](Console& c) { return cmd_fit(options, c); });
  EXPECT_NEAR(Json::parse(json.out)["prior_sum"].get<double>(), 1.0, 1e-12);
}

TEST(CmdFit, InsufficientSamplesNamesTheClass) {
  GeneratorSpec spec = builtin_spec("cup7");
  spec.samples_per_zone = 1;
  save_dataset(generate(spec), scratch("tiny.jsonl"));
  FitOptions options;
  options.data = scratch("tiny.jsonl");
  const CommandRun r = run(false, [&](Console& c) { return cmd_fit(options, c); });
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  options.data = scratch("absent.jsonl");
  EXPECT_EQ(run(false, [&](Console& c) { return cmd_fit(options, c); }).code, kExitIo);
}

TEST(CmdIntent, TextAndJson) {
  IntentOptions options{"cup7", {0.9, 0.1, 0.1}, std::nullopt, std::nullopt};
  const CommandRun text = run(false, [&](Console& c) { return cmd_intent(options, c); });
  ASSERT_EQ(text.code, kExitOk);
  EXPECT_NE(text.out.find("0.7933"), std::string::npos);
  const Json j = Json::parse(run(true, [&](Console& c) { return cmd_intent(options, c); }).out);
  EXPECT_NEAR(j["v"][0].get<double>(), 0.729 / 0.919, 1e-15);
  options.w = {0.9, 1.5, 0.1};
  EXPECT_EQ(run(false, [&](Console& c) { return cmd_intent(options, c); }).code, kExitValidation);
}

TEST(CmdPlan, PrintsTargetThenResult) {
  PlanOptions options;
  options.model = "cup7";
  options.w = {0.9, 0.9, 0.9};
  options.out = scratch("plan.json");
  const CommandRun r = run(false, [&](Console& c) { return cmd_plan(options, c); });
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto target_at = r.out.find("0.7297");
  ASSERT_NE(target_at, std::string::npos);
  EXPECT_LT(target_at, r.out.find("residual"));
  const PlanResult saved = plan_result_from_json(Json::parse(read_text_file(scratch("plan.json"))));
  EXPECT_LE(saved.residual, saved.initial_residual);
}

TEST(CmdPlan, NonConvergenceIsFlaggedWithExitZero) {
  PlanOptions options;
  options.model = "cup7";
  options.w = {0.9, 0.1, 0.1};
  options.max_iterations = 1;
  const CommandRun r = run(false, [&](Console& c) { return cmd_plan(options, c); });
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("NONCONVERGED"), std::string::npos);
  EXPECT_NE(r.out.find("0.7933"), std::string::npos);
}

TEST(CmdPlan, JsonRoundTripsAndIsDeterministic) {
  PlanOptions options;
  options.model = "flashlight7";
  options.w = {0.2, 0.7, 0.4};
  options.solver = "alm";
  options.seed = 5;
  const CommandRun a = run(true, [&](Console& c) { return cmd_plan(options, c); });
  const CommandRun b = run(true, [&](Console& c) { return cmd_plan(options, c); });
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const PlanResult r = plan_result_from_json(Json::parse(a.out));
  EXPECT_EQ(r.solver, SolverStrategy::AugmentedLagrangian);
  options.solver = "simplex";
  EXPECT_EQ(run(true, [&](Console& c) { return cmd_plan(options, c); }).code, kExitValidation);
}

TEST(CmdAmbiguity, JsonParsesToReport) {
  const CommandRun r = run(true, [](Console& c) { return cmd_ambiguity({"cup5", std::nullopt, std::nullopt}, c); });
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const DivergenceReport report = report_from_json(Json::parse(r.out));
  EXPECT_EQ(report.symmetric, report.nonsymmetric + report.nonsymmetric.transpose());
  EXPECT_EQ(report.refit_tasks, (std::vector<std::string>{"Handover"}));
}

TEST(CmdAmbiguity, IdenticalClassesGiveZeroMatrices) {
  std::vector<ModelClass> classes;
  const Gaussian g(Vector::Zero(7), Matrix::Identity(7, 7));
  const ZoneLayout layout = seven_zone_layout();
  for (TaskSet z : layout.zones()) classes.push_back({z, g, 1.0 / 7.0});
  save_model(MultiTaskModel(seven_zone_layout(), default_grasp_schema(), classes), scratch("flat.model.json"));
  const CommandRun r = run(true, [](Console& c) {
    return cmd_ambiguity({scratch("flat.model.json").string(), std::nullopt, std::nullopt}, c);
  });
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const DivergenceReport report = report_from_json(Json::parse(r.out));
  EXPECT_TRUE(report.nonsymmetric.isZero());
  EXPECT_TRUE(report.symmetric.isZero());
}

TEST(CmdReproduceTables, Passes) {
  const CommandRun text = run(false, [](Console& c) { return cmd_reproduce_tables(c); });
  EXPECT_EQ(text.code, kExitOk) << text.out;
  const Json j = Json::parse(run(true, [](Console& c) { return cmd_reproduce_tables(c); }).out);
  EXPECT_TRUE(j.is_object());
}

TEST(Engine, ParseLayoutAndResolveModel) {
  EXPECT_EQ(parse_layout("five", cup_tasks()), five_zone_layout());
  EXPECT_EQ(parse_layout("U,T,U+T", cup_tasks()).zone_count(), 3u);
  EXPECT_THROW(resolve_model("teapot", std::nullopt), ValidationError);
  EXPECT_THROW(resolve_model("models/none.json", std::nullopt), IoError);
  EXPECT_EQ(resolve_model("cup4", std::nullopt).model->class_count(), 4u);
}

}  // namespace
}  // namespace intentgrasp::app
