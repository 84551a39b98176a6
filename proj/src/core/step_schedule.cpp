#include "adasgd/core/step_schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace adasgd {

std::string_view to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::InverseSqrt:
      return "inverse_sqrt";
    case ScheduleFamily::InverseT:
      return "inverse_t";
    case ScheduleFamily::Constant:
      return "constant";
  }
  return "unknown";
}

ScheduleFamily parse_schedule_family(std::string_view name) {
  if (name == "inverse_sqrt") return ScheduleFamily::InverseSqrt;
  if (name == "inverse_t") return ScheduleFamily::InverseT;
  if (name == "constant") return ScheduleFamily::Constant;
  throw std::invalid_argument("unknown schedule family '" + std::string(name) + "'");
}

void StepSchedule::validate() const {
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
    throw std::invalid_argument("step schedule eta0 must be positive and finite");
  }
  if (!(batch_scale > 0.0) || !std::isfinite(batch_scale)) {
    throw std::invalid_argument("step schedule batch_scale must be positive and finite");
  }
}

StepSchedule StepSchedule::scaled_for_batch(std::uint64_t batch) const {
  StepSchedule out = *this;
  out.batch_scale = static_cast<double>(batch);
  return out;
}

double step_size(const StepSchedule& schedule, std::uint64_t k) {
  if (k == 0) {
    throw std::invalid_argument("step schedules are 1-indexed; k = 0 is not defined");
  }
  const double base = schedule.eta0 * schedule.batch_scale;
  const auto t = static_cast<double>(k);
  switch (schedule.family) {
    case ScheduleFamily::InverseSqrt:
      return base / std::sqrt(t);
    case ScheduleFamily::InverseT:
      return base / t;
    case ScheduleFamily::Constant:
      return base;
  }
  throw std::logic_error("unhandled schedule family");
}

}  // namespace adasgd
