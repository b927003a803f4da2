#include "intentgrasp/task_set.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "intentgrasp/errors.hpp"

namespace intentgrasp {

ZoneLayout::ZoneLayout(std::vector<std::string> tasks, std::vector<TaskSet> zones)
    : tasks_(std::move(tasks)), zones_(std::move(zones)) {
  if (tasks_.empty() || tasks_.size() > kMaxTasks) {
    throw ValidationError("layout needs between 1 and " + std::to_string(kMaxTasks) + " tasks");
  }
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].empty()) throw ValidationError("task names must be nonempty");
    for (std::size_t j = 0; j < i; ++j) {
      if (tasks_[i] == tasks_[j]) throw ValidationError("duplicate task name " + tasks_[i]);
    }
  }
  if (zones_.empty()) throw ValidationError("layout has no zones");
  const std::uint32_t limit = 1u << tasks_.size();
  for (std::size_t k = 0; k < zones_.size(); ++k) {
    if (zones_[k].empty()) throw ValidationError("layout contains the empty task set");
    if (zones_[k].mask() >= limit) {
      throw ValidationError("zone bitmask " + std::to_string(zones_[k].mask()) +
                            " exceeds the task count");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (zones_[j] == zones_[k]) {
        throw ValidationError("duplicate zone " + std::to_string(zones_[k].mask()));
      }
    }
  }
}

std::size_t ZoneLayout::index_of(TaskSet set) const noexcept {
  const auto it = std::find(zones_.begin(), zones_.end(), set);
  return static_cast<std::size_t>(it - zones_.begin());
}

std::string ZoneLayout::name_of(TaskSet set) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    if (!set.contains(t)) continue;
    if (!first) out += ",";
    out += tasks_[t];
    first = false;
  }
  return out + "}";
}

TaskSet ZoneLayout::parse(const std::string& text) const {
  if (!text.empty() && std::all_of(text.begin(), text.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; })) {
    std::uint32_t mask = 0;
    std::from_chars(text.data(), text.data() + text.size(), mask);
    if (mask == 0 || mask >= (1u << tasks_.size())) {
      throw ValidationError("task-set bitmask out of range: " + text);
    }
    return TaskSet(mask);
  }
  std::uint32_t mask = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('+', start), text.size());
    const std::string token = text.substr(start, end - start);
    bool found = false;
    for (std::size_t t = 0; t < tasks_.size() && !found; ++t) {
      if (token == tasks_[t] || (token.size() == 1 && token[0] == tasks_[t][0])) {
        mask |= 1u << t;
        found = true;
      }
    }
    if (!found) throw ValidationError("unknown task '" + token + "' in '" + text + "'");
    start = end + 1;
  }
  return TaskSet(mask);
}

std::vector<TaskSet> all_nonempty_subsets(std::size_t task_count) {
  if (task_count == 0 || task_count > kMaxTasks) {
    throw ValidationError("task count out of range");
  }
  std::vector<TaskSet> sets;
  for (std::uint32_t mask = 1; mask < (1u << task_count); ++mask) sets.emplace_back(mask);
  std::stable_sort(sets.begin(), sets.end(),
                   [](TaskSet a, TaskSet b) { return a.size() < b.size(); });
  return sets;
}

std::vector<std::string> cup_tasks() { return {"Usage", "Transfer", "Handover"}; }

ZoneLayout full_layout(std::vector<std::string> tasks) {
  auto zones = all_nonempty_subsets(tasks.size());
  return ZoneLayout(std::move(tasks), std::move(zones));
}

ZoneLayout seven_zone_layout() { return full_layout(cup_tasks()); }

ZoneLayout five_zone_layout() {
  auto zones = all_nonempty_subsets(3);
  std::erase_if(zones, [](TaskSet s) { return s.mask() == 0b100 || s.mask() == 0b101; });
  return ZoneLayout(cup_tasks(), std::move(zones));
}

ZoneLayout four_zone_layout() {
  auto zones = all_nonempty_subsets(3);
  std::erase_if(zones, [](TaskSet s) {
    return s.mask() == 0b100 || s.mask() == 0b101 || s.mask() == 0b001;
  });
  return ZoneLayout(cup_tasks(), std::move(zones));
}

}  // namespace intentgrasp
