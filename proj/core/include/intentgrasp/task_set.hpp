#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace intentgrasp {

inline constexpr std::size_t kMaxTasks = 8;

/// Subset of the principle tasks, bit i set when task i is included.
///
/// Doubles as zone identifier (an exact task-combination event) and class
/// identifier (the inclusive class of poses satisfying at least those tasks).
class TaskSet {
 public:
  constexpr TaskSet() = default;
  constexpr explicit TaskSet(std::uint32_t mask) : mask_(mask) {}

  constexpr std::uint32_t mask() const noexcept { return mask_; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr int size() const noexcept { return std::popcount(mask_); }
  constexpr bool contains(std::size_t task) const noexcept { return (mask_ >> task) & 1u; }
  constexpr bool is_superset_of(TaskSet other) const noexcept {
    return (mask_ & other.mask_) == other.mask_;
  }

  constexpr auto operator<=>(const TaskSet&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// Ordered task names plus the zones (nonempty, distinct task sets) a model
/// actually contains.
class ZoneLayout {
 public:
  ZoneLayout(std::vector<std::string> tasks, std::vector<TaskSet> zones);

  std::size_t task_count() const noexcept { return tasks_.size(); }
  std::size_t zone_count() const noexcept { return zones_.size(); }
  const std::vector<std::string>& tasks() const noexcept { return tasks_; }
  const std::vector<TaskSet>& zones() const noexcept { return zones_; }
  const TaskSet& zone(std::size_t k) const { return zones_.at(k); }

  /// Index of `set` among the zones, or zone_count() when absent.
  std::size_t index_of(TaskSet set) const noexcept;
  bool has(TaskSet set) const noexcept { return index_of(set) < zone_count(); }

  /// "{Usage,Transfer}" style label.
  std::string name_of(TaskSet set) const;
  /// Parses "Usage+Transfer", "U+T" (initials) or a decimal bitmask.
  TaskSet parse(const std::string& text) const;

  bool operator==(const ZoneLayout&) const = default;

 private:
  std::vector<std::string> tasks_;
  std::vector<TaskSet> zones_;
};

/// All 2^m - 1 nonempty subsets ordered by cardinality then bitmask, which
/// for three tasks gives U, T, H, UT, UH, TH, UTH.
std::vector<TaskSet> all_nonempty_subsets(std::size_t task_count);

/// Usage, Transfer, Handover.
std::vector<std::string> cup_tasks();

/// Full power-set layout over the given tasks.
ZoneLayout full_layout(std::vector<std::string> tasks);

/// Three-task layouts for the standard overlap structures.
ZoneLayout seven_zone_layout();
/// Seven-zone without {H} and {U,H}.
ZoneLayout five_zone_layout();
/// Five-zone without {U}.
ZoneLayout four_zone_layout();

}  // namespace intentgrasp
