#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace adasgd {

enum class ScheduleFamily { InverseSqrt, InverseT, Constant };

std::string_view to_string(ScheduleFamily family);
ScheduleFamily parse_schedule_family(std::string_view name);

/// Deterministic step-size map k -> eta_k, indexed by parameter update (k >= 1).
///
/// eta0 is multiplied by batch_scale so that experiments comparing batch sizes
/// B can use eta_k = eta0 * B * f(k) with a single schedule description.
struct StepSchedule {
  ScheduleFamily family = ScheduleFamily::InverseSqrt;
  double eta0 = 1.0;
  double batch_scale = 1.0;

  /// Throws std::invalid_argument for non-positive eta0/batch_scale.
  void validate() const;

  StepSchedule scaled_for_batch(std::uint64_t batch) const;

  bool operator==(const StepSchedule&) const = default;
};

/// Step size for update k. Throws std::invalid_argument when k == 0.
double step_size(const StepSchedule& schedule, std::uint64_t k);

}  // namespace adasgd
