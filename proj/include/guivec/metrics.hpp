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

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace guivec {

// Percent levels reported next to top-1.
inline const std::vector<double>& default_topk_percents() {
  static const std::vector<double> levels = {0.01, 0.1, 1.0, 5.0, 10.0};
  return levels;
}

// ceil(percent% of n), at least 1. The epsilon keeps exact products such as
// 0.1% of 1000 from rounding up to 2.
inline std::size_t topk_cutoff(double percent, std::size_t n) {
  const double raw = percent * static_cast<double>(n) / 100.0;
  const auto c = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return c < 1 ? 1 : c;
}

// 1-based rank of `correct` among `scores`: higher is better, equal scores are
// broken by the smaller index.
template <typename Derived>
std::size_t rank_of(const Eigen::DenseBase<Derived>& scores, Eigen::Index correct) {
  const double s = static_cast<double>(scores(correct));
  std::size_t rank = 1;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double v = static_cast<double>(scores(i));
    if (v > s || (v == s && i < correct)) ++rank;
  }
  return rank;
}

// Accumulates ranks into top-1 / top-k% accuracies.
class RankTally {
 public:
  explicit RankTally(std::size_t universe, std::vector<double> percents = default_topk_percents())
      : universe_(universe), percents_(std::move(percents)), hits_(percents_.size(), 0) {}

  // rank 0 records a miss (e.g. a target outside the candidate universe).
  void add(std::size_t rank) {
    ++count_;
    if (rank == 0) return;
    if (rank == 1) ++top1_;
    for (std::size_t i = 0; i < percents_.size(); ++i) {
      if (rank <= topk_cutoff(percents_[i], universe_)) ++hits_[i];
    }
  }

  std::size_t count() const { return count_; }
  double top1() const { return count_ ? static_cast<double>(top1_) / static_cast<double>(count_) : 0.0; }
  double topk(std::size_t i) const {
    return count_ ? static_cast<double>(hits_[i]) / static_cast<double>(count_) : 0.0;
  }
  const std::vector<double>& percents() const { return percents_; }

  nlohmann::json to_json() const;

 private:
  std::size_t universe_;
  std::vector<double> percents_;
  std::vector<std::size_t> hits_;
  std::size_t count_ = 0;
  std::size_t top1_ = 0;
};

// "top_0.01%" style key.
std::string topk_key(double percent);

}  // namespace guivec
