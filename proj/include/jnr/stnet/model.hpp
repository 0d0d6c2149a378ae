#pragma once

// Network configuration and parameter container for the spatio-temporal
// jersey number classifier.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "jnr/stnet/tensor.hpp"

namespace jnr::stnet {

inline constexpr int kDigitClasses = 11;
inline constexpr std::array<int, 3> kConvChannels{8, 16, 32};

struct NetConfig {
  int input_height = 150;
  int input_width = 120;
  int feature_dim = 64;
  int hidden = 32;  // per direction; temporal vector has 2*hidden entries
  double learning_rate = 3e-3;
  int batch_size = 32;
  int iterations = 3000;
  int lr_decay_every = 2000;
  int lr_decay_until = 6000;
  double lr_decay_factor = 0.5;
  double weight_decay = 0.0;  // decoupled, weights only; 0 is plain Adam
  std::uint64_t seed = 0;

  void validate() const;

  // Spatial size after the three 2x2 pools.
  int pooled_height() const { return input_height / 8; }
  int pooled_width() const { return input_width / 8; }
  int flat_dim() const { return kConvChannels.back() * pooled_height() * pooled_width(); }
  int temporal_dim() const { return 2 * hidden; }

  // Architecture fields only (shape compatibility of checkpoints).
  bool same_architecture(const NetConfig& o) const {
    return input_height == o.input_height && input_width == o.input_width &&
           feature_dim == o.feature_dim && hidden == o.hidden;
  }
};

struct LstmParams {
  Tensor w_in;   // [4h][D], gate blocks ordered input, forget, candidate, output
  Tensor w_rec;  // [4h][h]
  Tensor bias;   // [4h]

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

struct ModelParams {
  std::array<Tensor, 3> conv_w;  // [out][in][3][3]
  std::array<Tensor, 3> conv_b;  // [out]
  Tensor proj_w;                 // [D][flat]
  Tensor proj_b;                 // [D]
  LstmParams fwd;
  LstmParams bwd;
  Tensor head1_w;  // [11][2h]
  Tensor head1_b;  // [11]
  Tensor head2_w;
  Tensor head2_b;

  static ModelParams zeros(const NetConfig& cfg);
  // Uniform in +-sqrt(1/fan_in) per weight matrix, zero biases except the
  // forget gate (+1).
  static ModelParams initialize(const NetConfig& cfg, std::uint64_t seed);

  // Stable (name, tensor) enumeration; checkpoint and optimizer order.
  std::vector<std::pair<std::string, Tensor*>> tensors();
  std::vector<std::pair<std::string, const Tensor*>> tensors() const;

  std::size_t parameter_count() const;
  bool all_finite() const;

  void set_zero();
  // this += scale * other
  void add_scaled(const ModelParams& other, double scale);

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

}  // namespace jnr::stnet
