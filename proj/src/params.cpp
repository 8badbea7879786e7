// Copyright 2026 the rfot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rfot/params.hpp"

#include "rfot/errors.hpp"
#include "rfot/util.hpp"

namespace rfot {

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIo: return "io";
    case StrategyKind::kCot: return "cot";
    case StrategyKind::kScCot: return "sc_cot";
    case StrategyKind::kTot: return "tot";
    case StrategyKind::kRfot: return "rfot";
  }
  return "unknown";
}

std::string_view strategy_display_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kIo: return "I/O Prompt";
    case StrategyKind::kCot: return "CoT";
    case StrategyKind::kScCot: return "SC-CoT";
    case StrategyKind::kTot: return "ToT";
    case StrategyKind::kRfot: return "RFoT";
  }
  return "unknown";
}

StrategyKind strategy_from_name(std::string_view name) {
  const std::string lowered = to_lower(trim(name));
  if (lowered == "io") return StrategyKind::kIo;
  if (lowered == "cot") return StrategyKind::kCot;
  if (lowered == "sc_cot" || lowered == "sc-cot") return StrategyKind::kScCot;
  if (lowered == "tot") return StrategyKind::kTot;
  if (lowered == "rfot") return StrategyKind::kRfot;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected io, cot, sc_cot, tot, or rfot)");
}

std::string_view aggregation_mode_name(AggregationMode mode) {
  return mode == AggregationMode::kMajorityVote ? "majority_vote" : "ordinal_mean";
}

AggregationMode aggregation_mode_from_name(std::string_view name) {
  const std::string lowered = to_lower(trim(name));
  if (lowered == "majority_vote") return AggregationMode::kMajorityVote;
  if (lowered == "ordinal_mean") return AggregationMode::kOrdinalMean;
  throw ConfigError("unknown aggregation mode '" + std::string(name) +
                    "' (expected majority_vote or ordinal_mean)");
}

}  // namespace rfot
