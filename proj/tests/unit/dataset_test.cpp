#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "intentgrasp/dataset.hpp"
#include "intentgrasp/errors.hpp"
#include "intentgrasp/json_io.hpp"

namespace intentgrasp {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / "intentgrasp_dataset_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Generate, EmptyWhenNoSamplesPerZone) {
  GeneratorSpec spec = builtin_spec("cup7");
  spec.samples_per_zone = 0;
  EXPECT_TRUE(generate(spec).samples.empty());
}

TEST(Generate, CountsLabelsAndUnitNorm) {
  const GeneratorSpec spec = builtin_spec("flashlight7");
  const Dataset data = generate(spec);
  ASSERT_EQ(data.samples.size(), spec.samples_per_zone * 7);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    EXPECT_EQ(data.samples[i].zone, spec.layout.zone(i / spec.samples_per_zone));
    EXPECT_NEAR(data.samples[i].x.segment(3, 3).norm(), 1.0, 1e-15);
  }
}

TEST(Generate, DeterministicTextPerSeed) {
  GeneratorSpec spec = builtin_spec("cup5");
  spec.seed = 42;
  const std::string a = dataset_to_text(generate(spec));
  EXPECT_EQ(a, dataset_to_text(generate(spec)));
  spec.seed = 43;
  EXPECT_NE(a, dataset_to_text(generate(spec)));
}

TEST(Generate, LargeSampleRecoversGeneratingMeans) {
  GeneratorSpec spec = builtin_spec("cup7");
  spec.samples_per_zone = 5000;
  const Dataset data = generate(spec);
  const auto d = static_cast<Eigen::Index>(spec.schema.size());
  // Dataset-wide standard deviation of each feature for standardization.
  Vector mean = Vector::Zero(d), sq = Vector::Zero(d);
  for (const auto& s : data.samples) {
    mean += s.x;
    sq += s.x.cwiseProduct(s.x);
  }
  const double n = static_cast<double>(data.samples.size());
  mean /= n;
  const Vector sd = (sq / n - mean.cwiseProduct(mean)).cwiseSqrt();

  for (const auto& gen : spec.zones) {
    std::vector<Vector> members;
    for (const auto& s : data.samples)
      if (s.zone == gen.zone) members.push_back(s.x);
    const Gaussian fitted = fit_mle(members);
    const Vector z = (fitted.mean() - gen.mean).cwiseQuotient(sd);
    EXPECT_LT(z.cwiseAbs().maxCoeff(), 0.05) << spec.layout.name_of(gen.zone);
  }
}

TEST(Generate, RejectsInvalidSpecs) {
  GeneratorSpec spec = builtin_spec("cup7");
  spec.zones.pop_back();
  EXPECT_THROW(generate(spec), ValidationError);
  spec = builtin_spec("cup7");
  spec.zones[0].mean[3] = 2.0;  // direction no longer unit norm
  EXPECT_THROW(generate(spec), ValidationError);
  EXPECT_THROW(builtin_spec("teapot"), ValidationError);
}

TEST(BuiltinSpecs, Layouts) {
  const auto specs = builtin_specs();
  ASSERT_EQ(specs.size(), 4u);
  EXPECT_EQ(specs.at("cup7").layout, seven_zone_layout());
  EXPECT_EQ(specs.at("cup5").layout, five_zone_layout());
  EXPECT_EQ(specs.at("cup4").layout, four_zone_layout());
  EXPECT_EQ(specs.at("flashlight7").layout, seven_zone_layout());
  for (const auto& [name, spec] : specs) {
    EXPECT_EQ(spec.zones.size(), spec.layout.zone_count()) << name;
    for (const auto& g : spec.zones) EXPECT_NEAR(g.mean.segment(3, 3).norm(), 1.0, 1e-12) << name;
  }
}

TEST(BuiltinSpecs, CupGeometry) {
  const GeneratorSpec cup = builtin_spec("cup7");
  auto mean_of = [&](TaskSet z) {
    for (const auto& g : cup.zones)
      if (g.zone == z) return g.mean;
    throw std::logic_error("zone missing");
  };
  const Vector usage = mean_of(TaskSet(1));
  const Vector transfer = mean_of(TaskSet(2));
  EXPECT_LT(usage[2], transfer[2]);
  EXPECT_LT(transfer[5], -0.9);  // palm direction close to the table normal
  // Reduced cups reuse the seven-zone generators.
  for (const auto& g : builtin_spec("cup4").zones) EXPECT_EQ(g.mean, mean_of(g.zone));
}

TEST(DatasetText, RoundTrip) {
  const Dataset& data = testing::builtin("cup7").data;
  const Dataset back = dataset_from_text(dataset_to_text(data));
  EXPECT_EQ(back.object, data.object);
  EXPECT_EQ(back.layout, data.layout);
  EXPECT_EQ(back.schema, data.schema);
  EXPECT_EQ(back.seed, data.seed);
  ASSERT_EQ(back.samples.size(), data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    ASSERT_EQ(back.samples[i].x, data.samples[i].x);
    ASSERT_EQ(back.samples[i].zone, data.samples[i].zone);
  }
  EXPECT_EQ(dataset_to_text(back), dataset_to_text(data));
}

TEST(DatasetText, MalformedInputs) {
  const std::string text = dataset_to_text(testing::builtin("cup4").data);
  EXPECT_THROW(dataset_from_text(""), FormatError);
  EXPECT_THROW(dataset_from_text(text.substr(0, text.size() / 2)), FormatError);
  // Whole records removed: the header count no longer matches.
  const auto cut = text.rfind('\n', text.size() - 2);
  EXPECT_THROW(dataset_from_text(text.substr(0, cut + 1)), FormatError);
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(dataset_from_text(wrong_version), FormatError);
  EXPECT_THROW(dataset_from_text("{\"format\":\"something-else\"}\n"), FormatError);
}

TEST(DatasetFiles, SaveLoadAndSchemaCheck) {
  const Dataset& data = testing::builtin("cup5").data;
  const fs::path path = scratch("cup5.jsonl");
  save_dataset(data, path);
  EXPECT_EQ(read_text_file(path), dataset_to_text(data));
  EXPECT_EQ(load_dataset(path, data.schema).samples.size(), data.samples.size());
  const FeatureSchema other({{"a", "m", -1, std::nullopt}});
  EXPECT_THROW(load_dataset(path, other), FormatError);
  EXPECT_THROW(load_dataset(scratch("missing.jsonl")), IoError);
}

TEST(ModelFiles, RoundTripPreservesPosteriors) {
  const auto& fx = testing::builtin("flashlight7");
  const fs::path path = scratch("flashlight7.model.json");
  save_model(*fx.model, path);
  const MultiTaskModel loaded = load_model(path, fx.model->schema());
  EXPECT_EQ(model_to_text(loaded), model_to_text(*fx.model));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vector x = fx.data.samples[i * 7].x + testing::random_vector(rng, 7, 0.01);
    EXPECT_LE((posterior_vector(loaded, x) - posterior_vector(*fx.model, x)).cwiseAbs().maxCoeff(), 1e-15);
  }
  for (std::size_t k = 0; k < loaded.class_count(); ++k) {
    EXPECT_EQ(loaded.classes()[k].gaussian.mean(), fx.model->classes()[k].gaussian.mean());
    EXPECT_EQ(loaded.classes()[k].gaussian.covariance(), fx.model->classes()[k].gaussian.covariance());
    EXPECT_EQ(loaded.classes()[k].prior, fx.model->classes()[k].prior);
  }
}

TEST(ModelFiles, Errors) {
  const std::string text = model_to_text(*testing::builtin("cup4").model);
  EXPECT_THROW(model_from_text(text.substr(0, text.size() - 10)), FormatError);
  Json j = Json::parse(text);
  j["version"] = 2;
  EXPECT_THROW(model_from_json(j), FormatError);
  j = Json::parse(text);
  j["classes"].erase(0);
  EXPECT_THROW(model_from_json(j), FormatError);
  j = Json::parse(text);
  j["classes"][0]["covariance"][0] = -1.0;
  EXPECT_THROW(model_from_json(j), FormatError);

  const fs::path path = scratch("cup4.model.json");
  write_text_file_atomic(path, text);
  EXPECT_THROW(load_model(path, FeatureSchema({{"a", "m", -1, std::nullopt}})), FormatError);
  EXPECT_THROW(load_model(scratch("nope") / "x.json"), IoError);
}

}  // namespace
}  // namespace intentgrasp
