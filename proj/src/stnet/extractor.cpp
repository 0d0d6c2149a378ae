#include "jnr/stnet/extractor.hpp"

#include <algorithm>
#include <cmath>

#include "jnr/simd/kernels.hpp"

namespace jnr::stnet {

Tensor preprocess(const Frame& frame, const NetConfig& cfg) {
  const int sw = frame.width(), sh = frame.height();
  std::vector<double> gray(static_cast<std::size_t>(sw) * sh);
  const auto& px = frame.pixels();
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = (0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2]) / 255.0;
  }
  const int dh = cfg.input_height, dw = cfg.input_width;
  Tensor out({1, static_cast<std::size_t>(dh), static_cast<std::size_t>(dw)});
  const double sy = static_cast<double>(sh) / dh, sx = static_cast<double>(sw) / dw;
  for (int y = 0; y < dh; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = fy - y0;
    for (int x = 0; x < dw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, sw - 1);
      const double wx = fx - x0;
      const double top = gray[static_cast<std::size_t>(y0) * sw + x0] * (1 - wx) + gray[static_cast<std::size_t>(y0) * sw + x1] * wx;
      const double bot = gray[static_cast<std::size_t>(y1) * sw + x0] * (1 - wx) + gray[static_cast<std::size_t>(y1) * sw + x1] * wx;
      out[static_cast<std::size_t>(y) * dw + x] = top * (1 - wy) + bot * wy;
    }
  }
  return out;
}

namespace {

void setup_stages(ExtractorCache& cache, const NetConfig& cfg) {
  int in_c = 1, h = cfg.input_height, w = cfg.input_width;
  for (std::size_t l = 0; l < 3; ++l) {
    ConvStage& s = cache.stages[l];
    s.in_c = in_c;
    s.out_c = kConvChannels[l];
    s.h = h;
    s.w = w;
    s.in_pad.assign(static_cast<std::size_t>(s.in_c) * s.in_plane(), 0.0);
    s.act.assign(static_cast<std::size_t>(s.out_c) * s.out_plane(), 0.0);
    s.argmax.assign(static_cast<std::size_t>(s.out_c) * (h / 2) * (w / 2), 0);
    in_c = s.out_c;
    h /= 2;
    w /= 2;
  }
}

// conv + ReLU + pool; pooled values go to `pooled(channel, oy, ox)`.
template <typename Sink>
void stage_forward(ConvStage& s, const Tensor& weight, const Tensor& bias, Sink&& pooled) {
  const int wp = s.padded_width();
  const std::size_t n = s.out_plane();
  for (int co = 0; co < s.out_c; ++co) {
    double* z = s.act.data() + co * n;
    std::fill(z, z + n, bias[co]);
    for (int ci = 0; ci < s.in_c; ++ci) {
      const double* in = s.in_pad.data() + ci * s.in_plane();
      simd::conv3x3(weight.ptr() + (static_cast<std::size_t>(co) * s.in_c + ci) * 9, in, wp, z, n);
    }
    for (int y = 0; y < s.h; ++y) {
      double* row = z + static_cast<std::size_t>(y) * wp;
      for (int x = 0; x < s.w; ++x) row[x] = row[x] > 0.0 ? row[x] : 0.0;
      row[s.w] = 0.0;
      row[s.w + 1] = 0.0;
    }
    const int ho = s.h / 2, wo = s.w / 2;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        std::uint32_t best = static_cast<std::uint32_t>((2 * oy) * wp + 2 * ox);
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const auto at = static_cast<std::uint32_t>((2 * oy + dy) * wp + 2 * ox + dx);
            if (z[at] > z[best]) best = at;
          }
        s.argmax[(static_cast<std::size_t>(co) * ho + oy) * wo + ox] = best;
        pooled(co, oy, ox, z[best]);
      }
    }
  }
}

// d_pooled(channel, oy, ox) -> gradient of the pooled output. Accumulates into
// weight/bias grads and, when d_in_pad is non-null, the padded-input gradient.
//
// The input gradient is a 3x3 correlation of dz with the flipped kernel, run
// over a copy of dz shifted right by the largest tap offset.
template <typename Source>
void stage_backward(ConvStage& s, const Tensor& weight, Tensor& d_weight, Tensor& d_bias, Source&& d_pooled,
                    double* d_in_pad) {
  const int wp = s.padded_width();
  const std::size_t n = s.out_plane();
  const std::size_t shift = 2 * static_cast<std::size_t>(wp) + 2;
  const int ho = s.h / 2, wo = s.w / 2;
  std::vector<double> dzp(s.in_plane() + shift, 0.0);
  double* dz = dzp.data() + shift;
  for (int co = 0; co < s.out_c; ++co) {
    std::fill(dz, dz + n, 0.0);
    const double* a = s.act.data() + co * n;
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        const auto at = s.argmax[(static_cast<std::size_t>(co) * ho + oy) * wo + ox];
        if (a[at] > 0.0) dz[at] += d_pooled(co, oy, ox);
      }
    double db = 0.0;
    for (std::size_t i = 0; i < n; ++i) db += dz[i];
    d_bias[co] += db;
    for (int ci = 0; ci < s.in_c; ++ci) {
      const double* in = s.in_pad.data() + ci * s.in_plane();
      const std::size_t kofs = (static_cast<std::size_t>(co) * s.in_c + ci) * 9;
      simd::conv3x3_grad(dz, in, wp, n, d_weight.ptr() + kofs);
      if (d_in_pad) {
        double flipped[9];
        for (int t = 0; t < 9; ++t) flipped[t] = weight[kofs + 8 - t];
        simd::conv3x3(flipped, dzp.data(), wp, d_in_pad + ci * s.in_plane(), s.in_plane());
      }
    }
  }
}

}  // namespace

const std::vector<double>& extractor_forward(const Tensor& image, const ModelParams& params, const NetConfig& cfg,
                                             ExtractorCache& cache) {
  if (image.shape != std::vector<std::size_t>{1, static_cast<std::size_t>(cfg.input_height),
                                              static_cast<std::size_t>(cfg.input_width)}) {
    throw Error("extractor input shape does not match net input size");
  }
  if (params.proj_w.shape.size() != 2 || params.proj_w.shape[1] != static_cast<std::size_t>(cfg.flat_dim()) ||
      params.proj_w.shape[0] != static_cast<std::size_t>(cfg.feature_dim)) {
    throw Error("extractor parameters do not match net config");
  }
  setup_stages(cache, cfg);

  ConvStage& s0 = cache.stages[0];
  for (int y = 0; y < s0.h; ++y) {
    std::copy_n(image.ptr() + static_cast<std::size_t>(y) * s0.w, s0.w,
                s0.in_pad.data() + static_cast<std::size_t>(y + 1) * s0.padded_width() + 1);
  }
  for (std::size_t l = 0; l < 2; ++l) {
    ConvStage& next = cache.stages[l + 1];
    const int nwp = next.padded_width();
    const std::size_t nplane = next.in_plane();
    stage_forward(cache.stages[l], params.conv_w[l], params.conv_b[l], [&](int c, int oy, int ox, double v) {
      next.in_pad[c * nplane + static_cast<std::size_t>(oy + 1) * nwp + ox + 1] = v;
    });
  }
  const int ho = cfg.pooled_height(), wo = cfg.pooled_width();
  cache.flat.assign(static_cast<std::size_t>(cfg.flat_dim()), 0.0);
  stage_forward(cache.stages[2], params.conv_w[2], params.conv_b[2], [&](int c, int oy, int ox, double v) {
    cache.flat[(static_cast<std::size_t>(c) * ho + oy) * wo + ox] = v;
  });

  cache.features.assign(params.proj_b.data.begin(), params.proj_b.data.end());
  simd::gemv(params.proj_w.ptr(), cfg.feature_dim, cache.flat.size(), cache.flat.data(), cache.features.data());
  return cache.features;
}

void extractor_backward(ExtractorCache& cache, std::span<const double> d_features, const ModelParams& params,
                        ModelParams& grads) {
  const std::size_t d = params.proj_b.size();
  const std::size_t flat_n = cache.flat.size();
  simd::ger(grads.proj_w.ptr(), d, flat_n, d_features.data(), cache.flat.data());
  for (std::size_t i = 0; i < d; ++i) grads.proj_b[i] += d_features[i];
  std::vector<double> d_flat(flat_n, 0.0);
  simd::gemv_t(params.proj_w.ptr(), d, flat_n, d_features.data(), d_flat.data());

  ConvStage& s2 = cache.stages[2];
  const int ho = s2.h / 2, wo = s2.w / 2;
  std::vector<double> d_in(static_cast<std::size_t>(s2.in_c) * s2.in_plane(), 0.0);
  stage_backward(
      s2, params.conv_w[2], grads.conv_w[2], grads.conv_b[2],
      [&](int c, int oy, int ox) { return d_flat[(static_cast<std::size_t>(c) * ho + oy) * wo + ox]; }, d_in.data());

  for (int l = 1; l >= 0; --l) {
    ConvStage& s = cache.stages[l];
    const ConvStage& next = cache.stages[l + 1];
    const int nwp = next.padded_width();
    const std::size_t nplane = next.in_plane();
    std::vector<double> upstream = std::move(d_in);
    if (l > 0) d_in.assign(static_cast<std::size_t>(s.in_c) * s.in_plane(), 0.0);
    stage_backward(
        s, params.conv_w[l], grads.conv_w[l], grads.conv_b[l],
        [&](int c, int oy, int ox) { return upstream[c * nplane + static_cast<std::size_t>(oy + 1) * nwp + ox + 1]; },
        l > 0 ? d_in.data() : nullptr);
  }
}

std::vector<double> extract_features(const Tensor& image, const ModelParams& params, const NetConfig& cfg) {
  ExtractorCache cache;
  return extractor_forward(image, params, cfg, cache);
}

std::vector<std::vector<double>> extract_features(std::span<const Tensor> images, const ModelParams& params,
                                                  const NetConfig& cfg) {
  std::vector<std::vector<double>> out;
  ExtractorCache cache;
  for (const auto& img : images) out.push_back(extractor_forward(img, params, cfg, cache));
  return out;
}

}  // namespace jnr::stnet
