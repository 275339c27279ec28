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

#include "guivec/layout_model.hpp"

#include <algorithm>
#include <cmath>

#include "guivec/error.hpp"

namespace guivec {

LayoutBitmap render_layout(const GuiScreen& screen, LayoutGrid grid) {
  if (screen.nodes.empty()) throw DegenerateScreen("screen " + screen.screen_id + " has no nodes");
  const BoundingBox& root = screen.screen_bounds();
  if (root.width() <= 0 || root.height() <= 0) {
    throw DegenerateScreen("screen " + screen.screen_id + " has a zero-area root");
  }
  LayoutBitmap bitmap(grid);
  const double sw = root.width();
  const double sh = root.height();
  for (const GuiComponent& c : screen.nodes) {
    if (!c.children.empty() || !c.parent) continue;
    // Ratios of exact integers, so uniformly rescaled inputs give identical values.
    const double x0 = static_cast<double>(c.bounds.left - root.left) * grid.width / sw;
    const double x1 = static_cast<double>(c.bounds.right - root.left) * grid.width / sw;
    const double y0 = static_cast<double>(c.bounds.top - root.top) * grid.height / sh;
    const double y1 = static_cast<double>(c.bounds.bottom - root.top) * grid.height / sh;
    if (x1 <= x0 || y1 <= y0) continue;
    const float value = c.text ? kTextCell : kNonTextCell;
    const int cx_begin = std::max(0, static_cast<int>(std::floor(x0)));
    const int cx_end = std::min(grid.width, static_cast<int>(std::ceil(x1)));
    const int cy_begin = std::max(0, static_cast<int>(std::floor(y0)));
    const int cy_end = std::min(grid.height, static_cast<int>(std::ceil(y1)));
    for (int cy = cy_begin; cy < cy_end; ++cy) {
      const double oy = std::min(y1, cy + 1.0) - std::max(y0, static_cast<double>(cy));
      if (oy <= 0.0) continue;
      for (int cx = cx_begin; cx < cx_end; ++cx) {
        const double ox = std::min(x1, cx + 1.0) - std::max(x0, static_cast<double>(cx));
        if (ox > 0.0 && ox * oy >= 0.5) bitmap.set(cx, cy, value);
      }
    }
  }
  return bitmap;
}

std::string to_pgm(const LayoutBitmap& bitmap) {
  std::string out = "P5\n" + std::to_string(bitmap.grid().width) + " " +
                    std::to_string(bitmap.grid().height) + "\n255\n";
  out.reserve(out.size() + bitmap.cells().size());
  for (float v : bitmap.cells()) {
    unsigned char px = 0;
    if (v >= kNonTextCell) {
      px = 255;
    } else if (v >= kTextCell) {
      px = 128;
    }
    out += static_cast<char>(px);
  }
  return out;
}

template <typename T>
BasicLayoutAutoencoder<T>::BasicLayoutAutoencoder(AutoencoderDims dims)
    : enc1(dims.input, dims.hidden1, "encoder.0"),
      enc2(dims.hidden1, dims.hidden2, "encoder.1"),
      enc3(dims.hidden2, dims.code, "encoder.2"),
      dec1(dims.code, dims.hidden2, "decoder.0"),
      dec2(dims.hidden2, dims.hidden1, "decoder.1"),
      dec3(dims.hidden1, dims.input, "decoder.2"),
      dims_(dims) {}

template <typename T>
void BasicLayoutAutoencoder<T>::init(std::uint64_t seed) {
  nn::Rng rng(seed);
  for (auto* layer : {&enc1, &enc2, &enc3, &dec1, &dec2, &dec3}) layer->init_glorot(rng);
}

template <typename T>
typename BasicLayoutAutoencoder<T>::Mat BasicLayoutAutoencoder<T>::encode(const Mat& batch) const {
  return nn::relu<T>(enc3.forward(nn::relu<T>(enc2.forward(nn::relu<T>(enc1.forward(batch))))));
}

template <typename T>
typename BasicLayoutAutoencoder<T>::Mat BasicLayoutAutoencoder<T>::reconstruct(const Mat& batch) const {
  const Mat code = encode(batch);
  return dec3.forward(nn::relu<T>(dec2.forward(nn::relu<T>(dec1.forward(code)))));
}

template <typename T>
double BasicLayoutAutoencoder<T>::loss(const Mat& batch) const {
  return nn::mse<T>(reconstruct(batch), batch);
}

template <typename T>
double BasicLayoutAutoencoder<T>::forward_backward(const Mat& batch) {
  const Mat p1 = enc1.forward(batch);
  const Mat a1 = nn::relu<T>(p1);
  const Mat p2 = enc2.forward(a1);
  const Mat a2 = nn::relu<T>(p2);
  const Mat p3 = enc3.forward(a2);
  const Mat a3 = nn::relu<T>(p3);
  const Mat q1 = dec1.forward(a3);
  const Mat b1 = nn::relu<T>(q1);
  const Mat q2 = dec2.forward(b1);
  const Mat b2 = nn::relu<T>(q2);
  const Mat out = dec3.forward(b2);

  Mat grad;
  const double loss = nn::mse<T>(out, batch, &grad);
  grad = dec3.backward(b2, grad);
  grad = dec2.backward(b1, nn::relu_backward<T>(q2, grad));
  grad = dec1.backward(a3, nn::relu_backward<T>(q1, grad));
  grad = enc3.backward(a2, nn::relu_backward<T>(p3, grad));
  grad = enc2.backward(a1, nn::relu_backward<T>(p2, grad));
  enc1.backward(batch, nn::relu_backward<T>(p1, grad), /*need_input_grad=*/false);
  return loss;
}

template <typename T>
std::vector<nn::Parameter<T>*> BasicLayoutAutoencoder<T>::parameters() {
  std::vector<nn::Parameter<T>*> out;
  for (auto* layer : {&enc1, &enc2, &enc3, &dec1, &dec2, &dec3}) {
    for (auto* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
void BasicLayoutAutoencoder<T>::zero_grad() {
  nn::zero_grads(parameters());
}

template <typename T>
Checkpoint BasicLayoutAutoencoder<T>::to_checkpoint(const LayoutGrid& grid) const {
  Checkpoint ckpt;
  ckpt.header = {{"model", "layout_autoencoder"},
                 {"grid", {grid.width, grid.height}},
                 {"dims", {dims_.input, dims_.hidden1, dims_.hidden2, dims_.code}},
                 {"channels", {{"background", kBackgroundCell}, {"text", kTextCell}, {"non_text", kNonTextCell}}},
                 {"decoder_output", "linear"}};
  auto& self = const_cast<BasicLayoutAutoencoder&>(*this);
  add_parameters<T>(ckpt, self.parameters());
  return ckpt;
}

template <typename T>
BasicLayoutAutoencoder<T> BasicLayoutAutoencoder<T>::from_checkpoint(const Checkpoint& ckpt,
                                                                     LayoutGrid* grid) {
  if (ckpt.header.value("model", "") != "layout_autoencoder") {
    throw FormatError("checkpoint is not a layout autoencoder");
  }
  AutoencoderDims dims;
  const auto& d = ckpt.header.at("dims");
  dims.input = d.at(0);
  dims.hidden1 = d.at(1);
  dims.hidden2 = d.at(2);
  dims.code = d.at(3);
  if (grid) {
    grid->width = ckpt.header.at("grid").at(0);
    grid->height = ckpt.header.at("grid").at(1);
  }
  BasicLayoutAutoencoder model(dims);
  load_parameters<T>(ckpt, model.parameters());
  return model;
}

template class BasicLayoutAutoencoder<float>;
template class BasicLayoutAutoencoder<double>;

Eigen::VectorXd encode_layout(const LayoutBitmap& bitmap, const LayoutAutoencoder& model) {
  if (static_cast<int>(bitmap.cells().size()) != model.dims().input) {
    throw ShapeMismatch("bitmap has " + std::to_string(bitmap.cells().size()) +
                        " cells, encoder expects " + std::to_string(model.dims().input));
  }
  const nn::Matrix<float> x =
      Eigen::Map<const nn::Matrix<float>>(bitmap.cells().data(), 1, model.dims().input);
  return model.encode(x).row(0).transpose().cast<double>();
}

nn::Matrix<float> stack_bitmaps(const std::vector<LayoutBitmap>& bitmaps) {
  if (bitmaps.empty()) return {};
  const auto cols = static_cast<Eigen::Index>(bitmaps.front().cells().size());
  nn::Matrix<float> m(static_cast<Eigen::Index>(bitmaps.size()), cols);
  for (std::size_t i = 0; i < bitmaps.size(); ++i) {
    if (static_cast<Eigen::Index>(bitmaps[i].cells().size()) != cols) {
      throw ShapeMismatch("bitmaps have different grid sizes");
    }
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const nn::RowVector<float>>(bitmaps[i].cells().data(), cols);
  }
  return m;
}

namespace {

double corpus_mse(const LayoutAutoencoder& model, const nn::Matrix<float>& data, int batch) {
  double total = 0.0;
  for (Eigen::Index start = 0; start < data.rows(); start += batch) {
    const Eigen::Index n = std::min<Eigen::Index>(batch, data.rows() - start);
    total += model.loss(data.middleRows(start, n)) * static_cast<double>(n);
  }
  return total / static_cast<double>(data.rows());
}

}  // namespace

AutoencoderTrainingResult train_autoencoder(const std::vector<LayoutBitmap>& bitmaps,
                                            const AutoencoderTrainingConfig& config,
                                            AutoencoderDims dims) {
  if (bitmaps.empty()) throw EmptyCorpus("autoencoder training needs at least one bitmap");
  if (config.batch_size < 1 || config.epochs < 0) throw Error("invalid autoencoder training config");
  const nn::Matrix<float> data = stack_bitmaps(bitmaps);
  if (data.cols() != dims.input) {
    throw ShapeMismatch("bitmaps have " + std::to_string(data.cols()) + " cells, encoder expects " +
                        std::to_string(dims.input));
  }

  AutoencoderTrainingResult result{LayoutAutoencoder(dims)};
  LayoutAutoencoder& model = result.model;
  model.init(config.seed);
  nn::Rng order_rng(config.seed ^ 0x9E3779B97F4A7C15ull);
  nn::Adam<float> adam({.learning_rate = config.learning_rate});
  const int eval_batch = std::max(config.batch_size, 32);
  result.initial_mse = corpus_mse(model, data, eval_batch);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  const auto params = model.parameters();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    nn::shuffle(order.begin(), order.end(), order_rng);
    double sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size), order.size() - start);
      nn::Matrix<float> batch(static_cast<Eigen::Index>(n), data.cols());
      for (std::size_t j = 0; j < n; ++j) batch.row(static_cast<Eigen::Index>(j)) = data.row(order[start + j]);
      model.zero_grad();
      sum += model.forward_backward(batch) * static_cast<double>(n);
      adam.step(params);
    }
    result.epoch_mse.push_back(sum / static_cast<double>(order.size()));
  }
  result.final_mse = corpus_mse(model, data, eval_batch);
  return result;
}

}  // namespace guivec
