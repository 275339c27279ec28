// Copyright 2026 The guivec Authors.
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

#include "guivec/metrics.hpp"

#include <cstdio>

namespace guivec {

std::string topk_key(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "top_%g%%", percent);
  return buf;
}

nlohmann::json RankTally::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  out["count"] = count_;
  out["universe"] = universe_;
  out["top1"] = top1();
  for (std::size_t i = 0; i < percents_.size(); ++i) out[topk_key(percents_[i])] = topk(i);
  return out;
}

}  // namespace guivec
