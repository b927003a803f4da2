#include <cmath>

#include "intentgrasp/dataset.hpp"

namespace intentgrasp {

namespace {

// Object frame: origin at the base center, z up along the table normal,
// handle (when present) on the +x side. Palm direction points from the palm
// into the object.
struct ZonePose {
  std::uint32_t zone;
  double px, py, pz;
  double dx, dy, dz;
  double force;
};

constexpr double kPositionSd = 0.02;   // m
constexpr double kDirectionSd = 0.1;  // per unit-vector component
constexpr double kForceSd = 1.5;       // N

ZoneGenerator make_generator(const ZonePose& p) {
  const double n = std::sqrt(p.dx * p.dx + p.dy * p.dy + p.dz * p.dz);
  Vector mean(7);
  mean << p.px, p.py, p.pz, p.dx / n, p.dy / n, p.dz / n, p.force;
  Vector sd(7);
  sd << kPositionSd, kPositionSd, kPositionSd, kDirectionSd, kDirectionSd, kDirectionSd, kForceSd;
  return {TaskSet(p.zone), mean, Matrix(sd.array().square().matrix().asDiagonal())};
}

GeneratorSpec make_spec(std::string object, const std::vector<ZonePose>& poses) {
  std::vector<ZoneGenerator> zones;
  for (const auto& p : poses) zones.push_back(make_generator(p));
  return {std::move(object), seven_zone_layout(), default_grasp_schema(), std::move(zones), 200, 7};
}

// Usage: fingers dominate the handle, low palm leaves the rim free to drink.
// Transfer: palm perpendicular to the table and high, clearing the base.
// Handover: low palm on the far side, handle left free for the receiver.
// Mixed zones blend these: few fingers in the handle, palm height set by
// whether the rim (Usage) or the base (Transfer) must stay clear.
GeneratorSpec cup7() {
  return make_spec("cup", {
      {0b001, 0.070, 0.000, 0.040, -1.0, 0.0, 0.0, 6.0},
      {0b010, 0.020, 0.000, 0.100, -0.2, 0.0, -1.0, 9.0},
      {0b100, 0.065, -0.015, 0.030, -0.95, 0.0, 0.3, 5.0},
      {0b011, 0.055, 0.000, 0.070, -0.8, 0.0, -0.6, 8.0},
      {0b101, 0.068, 0.012, 0.035, -1.0, 0.15, 0.1, 5.5},
      {0b110, 0.035, 0.010, 0.090, -0.5, 0.1, -0.85, 7.5},
      {0b111, 0.050, 0.008, 0.065, -0.75, 0.05, -0.65, 7.0},
  });
}

// Usage (shining) wraps the barrel with the palm near-perpendicular to the
// table, resembling the cup's Transfer grasp; Transfer grips the barrel
// middle from the side; Handover holds the head end, leaving the grip free.
GeneratorSpec flashlight7() {
  return make_spec("flashlight", {
      {0b001, 0.000, 0.000, 0.110, 0.0, 0.1, -1.0, 9.0},
      {0b010, 0.000, 0.050, 0.030, 0.0, -1.0, 0.0, 7.0},
      {0b100, 0.090, 0.000, 0.040, -1.0, 0.0, -0.2, 4.0},
      {0b011, 0.000, 0.030, 0.080, 0.0, -0.6, -0.8, 8.5},
      {0b101, 0.050, 0.000, 0.090, -0.5, 0.0, -0.866, 6.5},
      {0b110, 0.045, 0.040, 0.035, -0.6, -0.8, 0.0, 5.5},
      {0b111, 0.030, 0.025, 0.070, -0.5, -0.5, -0.707, 7.0},
  });
}

}  // namespace

std::map<std::string, GeneratorSpec> builtin_specs() {
  std::map<std::string, GeneratorSpec> specs;
  const auto cup = cup7();
  specs.emplace("cup7", cup);
  specs.emplace("cup5", without_zones(cup, {TaskSet(0b100), TaskSet(0b101)}));
  specs.emplace("cup4", without_zones(cup, {TaskSet(0b100), TaskSet(0b101), TaskSet(0b001)}));
  specs.emplace("flashlight7", flashlight7());
  return specs;
}

}  // namespace intentgrasp
