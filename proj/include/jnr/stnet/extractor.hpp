#pragma once

// Per-frame spatial feature extractor: grayscale preprocessing, three
// conv3x3-ReLU-maxpool2x2 blocks (8/16/32 channels), flatten, linear
// projection to feature_dim.
//
// Feature maps use a zero-padded row layout of width W+2 so that each 3x3 tap
// of a convolution is one long contiguous axpy/dot over the whole plane. The
// two trailing columns of every output row hold don't-care values and are
// forced to zero after each stage.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "jnr/core_types.hpp"
#include "jnr/stnet/model.hpp"

namespace jnr::stnet {

// Luminance (0.299r + 0.587g + 0.114b)/255, bilinear resize (half-pixel
// centers) to the configured input size. Shape {1, H, W}.
Tensor preprocess(const Frame& frame, const NetConfig& cfg);

struct ConvStage {
  int in_c = 0;
  int out_c = 0;
  int h = 0;  // conv input/output height
  int w = 0;  // conv input/output width
  std::vector<double> in_pad;        // in_c planes of (h+2)*(w+2)+2
  std::vector<double> act;           // out_c planes of h*(w+2), post-ReLU
  std::vector<std::uint32_t> argmax; // out_c * (h/2) * (w/2), offsets into an act plane

  int padded_width() const { return w + 2; }
  std::size_t in_plane() const { return static_cast<std::size_t>(h + 2) * (w + 2) + 2; }
  std::size_t out_plane() const { return static_cast<std::size_t>(h) * (w + 2); }
};

struct ExtractorCache {
  std::array<ConvStage, 3> stages;
  std::vector<double> flat;
  std::vector<double> features;
};

// image: {1, H, W} matching cfg. Fills cache and returns features (D).
const std::vector<double>& extractor_forward(const Tensor& image, const ModelParams& params,
                                             const NetConfig& cfg, ExtractorCache& cache);

// Accumulates parameter gradients for d(loss)/d(features) into grads.
void extractor_backward(ExtractorCache& cache, std::span<const double> d_features, const ModelParams& params,
                        ModelParams& grads);

std::vector<double> extract_features(const Tensor& image, const ModelParams& params, const NetConfig& cfg);
std::vector<std::vector<double>> extract_features(std::span<const Tensor> images, const ModelParams& params,
                                                  const NetConfig& cfg);

}  // namespace jnr::stnet
