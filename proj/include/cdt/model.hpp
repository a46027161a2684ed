#pragma once

#include <optional>
#include <string>

#include "cdt/channel.hpp"
#include "cdt/estimator.hpp"

namespace cdt {

/// A channel together with the distortion measure, input cost, and estimator
/// mode it is meant to be solved with. Builders and the file loader produce
/// these; the solver and sweep consume them.
struct ChannelModel {
  StateChannel channel;
  std::optional<DistortionMatrix> distortion;  // absent: pure capacity-cost runs only
  CostVector cost;                             // empty means b == 0
  EstimatorMode estimator_mode = EstimatorMode::kRestricted;
  std::string id;
};

}  // namespace cdt
