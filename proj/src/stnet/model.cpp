#include "jnr/stnet/model.hpp"

#include <cmath>
#include <random>

#include "jnr/core_types.hpp"
#include "jnr/simd/kernels.hpp"

namespace jnr::stnet {

void NetConfig::validate() const {
  if (input_height < 8 || input_width < 8) throw Error("net input size must be at least 8x8");
  if (feature_dim < 1 || hidden < 1) throw Error("net.feature_dim and net.hidden must be positive");
  if (!(learning_rate > 0.0)) throw Error("net.learning_rate must be positive");
  if (batch_size < 1 || iterations < 1) throw Error("net.batch_size and net.iterations must be positive");
  if (lr_decay_every < 1 || lr_decay_until < 0) throw Error("learning-rate schedule values must be positive");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0)) throw Error("net.lr_decay_factor must lie in (0,1]");
  if (!(weight_decay >= 0.0)) throw Error("net.weight_decay must be non-negative");
}

namespace {

LstmParams lstm_zeros(std::size_t d, std::size_t h) {
  return {Tensor({4 * h, d}), Tensor({4 * h, h}), Tensor({4 * h})};
}

void uniform_fill(Tensor& t, double fan_in, std::mt19937_64& rng, double gain = 1.0) {
  const double bound = std::sqrt(gain / fan_in);
  for (auto& v : t.data) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = (2.0 * u - 1.0) * bound;
  }
}

}  // namespace

ModelParams ModelParams::zeros(const NetConfig& cfg) {
  ModelParams p;
  std::size_t in_c = 1;
  for (std::size_t l = 0; l < 3; ++l) {
    const auto out_c = static_cast<std::size_t>(kConvChannels[l]);
    p.conv_w[l] = Tensor({out_c, in_c, 3, 3});
    p.conv_b[l] = Tensor({out_c});
    in_c = out_c;
  }
  const auto d = static_cast<std::size_t>(cfg.feature_dim);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  p.proj_w = Tensor({d, static_cast<std::size_t>(cfg.flat_dim())});
  p.proj_b = Tensor({d});
  p.fwd = lstm_zeros(d, h);
  p.bwd = lstm_zeros(d, h);
  p.head1_w = Tensor({kDigitClasses, 2 * h});
  p.head1_b = Tensor({kDigitClasses});
  p.head2_w = Tensor({kDigitClasses, 2 * h});
  p.head2_b = Tensor({kDigitClasses});
  return p;
}

ModelParams ModelParams::initialize(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams p = zeros(cfg);
  std::mt19937_64 rng(seed);
  std::size_t in_c = 1;
  for (std::size_t l = 0; l < 3; ++l) {
    uniform_fill(p.conv_w[l], static_cast<double>(in_c * 9), rng, 6.0);
    in_c = static_cast<std::size_t>(kConvChannels[l]);
  }
  uniform_fill(p.proj_w, cfg.flat_dim(), rng, 3.0);
  const auto h = static_cast<std::size_t>(cfg.hidden);
  for (LstmParams* lp : {&p.fwd, &p.bwd}) {
    uniform_fill(lp->w_in, cfg.feature_dim, rng);
    uniform_fill(lp->w_rec, cfg.hidden, rng);
    for (std::size_t i = h; i < 2 * h; ++i) lp->bias[i] = 1.0;
  }
  uniform_fill(p.head1_w, cfg.temporal_dim(), rng);
  uniform_fill(p.head2_w, cfg.temporal_dim(), rng);
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (int l = 0; l < 3; ++l) {
    out.emplace_back("conv" + std::to_string(l + 1) + ".weight", &conv_w[l]);
    out.emplace_back("conv" + std::to_string(l + 1) + ".bias", &conv_b[l]);
  }
  out.emplace_back("proj.weight", &proj_w);
  out.emplace_back("proj.bias", &proj_b);
  out.emplace_back("lstm_fwd.w_in", &fwd.w_in);
  out.emplace_back("lstm_fwd.w_rec", &fwd.w_rec);
  out.emplace_back("lstm_fwd.bias", &fwd.bias);
  out.emplace_back("lstm_bwd.w_in", &bwd.w_in);
  out.emplace_back("lstm_bwd.w_rec", &bwd.w_rec);
  out.emplace_back("lstm_bwd.bias", &bwd.bias);
  out.emplace_back("head1.weight", &head1_w);
  out.emplace_back("head1.bias", &head1_b);
  out.emplace_back("head2.weight", &head2_w);
  out.emplace_back("head2.bias", &head2_b);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::tensors() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->tensors()) out.emplace_back(name, t);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors()) n += t->size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const auto& [name, t] : tensors()) {
    for (double v : t->data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void ModelParams::set_zero() {
  for (auto& [name, t] : tensors()) t->fill(0.0);
}

void ModelParams::add_scaled(const ModelParams& other, double scale) {
  auto mine = tensors();
  auto theirs = other.tensors();
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (!mine[i].second->same_shape(*theirs[i].second)) throw Error("parameter shape mismatch in " + mine[i].first);
    simd::axpy(scale, theirs[i].second->ptr(), mine[i].second->ptr(), mine[i].second->size());
  }
}

}  // namespace jnr::stnet
