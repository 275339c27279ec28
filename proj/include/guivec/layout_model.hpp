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

#include <cstdint>
#include <string>
#include <vector>

#include "guivec/checkpoint.hpp"
#include "guivec/corpus.hpp"
#include "guivec/nn.hpp"

namespace guivec {

struct LayoutGrid {
  int width = 80;
  int height = 140;
  int cells() const { return width * height; }
};

inline constexpr float kBackgroundCell = 0.0f;
inline constexpr float kTextCell = 0.5f;
inline constexpr float kNonTextCell = 1.0f;

// Row-major (y, x) grid of channel codes.
class LayoutBitmap {
 public:
  explicit LayoutBitmap(LayoutGrid grid = {})
      : grid_(grid), cells_(static_cast<std::size_t>(grid.cells()), kBackgroundCell) {}

  const LayoutGrid& grid() const { return grid_; }
  float at(int x, int y) const { return cells_[index(x, y)]; }
  void set(int x, int y, float v) { cells_[index(x, y)] = v; }
  const std::vector<float>& cells() const { return cells_; }

  friend bool operator==(const LayoutBitmap& a, const LayoutBitmap& b) {
    return a.grid_.width == b.grid_.width && a.grid_.height == b.grid_.height && a.cells_ == b.cells_;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(grid_.width) + static_cast<std::size_t>(x);
  }
  LayoutGrid grid_;
  std::vector<float> cells_;
};

// Leaf components (excluding a childless root) painted in pre-order: text
// leaves 0.5, others 1.0. A cell is painted when the scaled box covers at
// least half of it. Throws DegenerateScreen when the root has zero area.
LayoutBitmap render_layout(const GuiScreen& screen, LayoutGrid grid = {});

// Binary PGM (P5), values 0/128/255.
std::string to_pgm(const LayoutBitmap& bitmap);

struct AutoencoderDims {
  int input = 11200;
  int hidden1 = 2048;
  int hidden2 = 256;
  int code = 64;
};

// Encoder input -> h1 -> h2 -> code, decoder mirrored; ReLU after every layer
// except the final decoder layer, whose output stays linear.
template <typename T>
class BasicLayoutAutoencoder {
 public:
  using Mat = nn::Matrix<T>;

  explicit BasicLayoutAutoencoder(AutoencoderDims dims = {});

  const AutoencoderDims& dims() const { return dims_; }
  void init(std::uint64_t seed);

  Mat encode(const Mat& batch) const;
  Mat reconstruct(const Mat& batch) const;
  // Mean squared reconstruction error over all cells of the batch.
  double loss(const Mat& batch) const;
  // Accumulates gradients of loss(batch); returns the loss.
  double forward_backward(const Mat& batch);

  std::vector<nn::Parameter<T>*> parameters();
  void zero_grad();

  Checkpoint to_checkpoint(const LayoutGrid& grid) const;
  static BasicLayoutAutoencoder from_checkpoint(const Checkpoint& ckpt, LayoutGrid* grid = nullptr);

  nn::DenseLayer<T> enc1, enc2, enc3, dec1, dec2, dec3;

 private:
  AutoencoderDims dims_;
};

using LayoutAutoencoder = BasicLayoutAutoencoder<float>;

// 64-d layout embedding of one bitmap. Throws ShapeMismatch when the bitmap
// size differs from the encoder input.
Eigen::VectorXd encode_layout(const LayoutBitmap& bitmap, const LayoutAutoencoder& model);

nn::Matrix<float> stack_bitmaps(const std::vector<LayoutBitmap>& bitmaps);

struct AutoencoderTrainingConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 20;
  std::uint64_t seed = 0;
};

struct AutoencoderTrainingResult {
  LayoutAutoencoder model;
  double initial_mse = 0.0;             // whole corpus, before the first update
  std::vector<double> epoch_mse;        // mean of batch losses within each epoch
  double final_mse = 0.0;               // whole corpus, after training
};

AutoencoderTrainingResult train_autoencoder(const std::vector<LayoutBitmap>& bitmaps,
                                            const AutoencoderTrainingConfig& config,
                                            AutoencoderDims dims = {});

extern template class BasicLayoutAutoencoder<float>;
extern template class BasicLayoutAutoencoder<double>;

}  // namespace guivec
