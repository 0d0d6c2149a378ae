#include "jnr/spatial_context.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

namespace jnr {

void SpatialContextConfig::validate() const {
  if (bins < 2) throw Error("sc.bins must be >= 2");
  if (!(lhc_tau >= -1.0 && lhc_tau <= 1.0)) throw Error("sc.lhc_tau must lie in [-1,1]");
  if (!(ghc_tau >= -1.0 && ghc_tau <= 1.0)) throw Error("sc.ghc_tau must lie in [-1,1]");
  if (!(lhc_gap >= 0.0)) throw Error("sc.lhc_gap must be non-negative");
  if (!(lhc_voff >= 0.0)) throw Error("sc.lhc_voff must be non-negative");
}

double rgb_to_hue(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double rf = r, gf = g, bf = b;
  const double mx = std::max({rf, gf, bf});
  const double mn = std::min({rf, gf, bf});
  if (mx == mn) return 0.0;
  const double d = mx - mn;
  double h;
  if (mx == rf) {
    h = 60.0 * ((gf - bf) / d);
    if (h < 0.0) h += 360.0;
  } else if (mx == gf) {
    h = 60.0 * ((bf - rf) / d + 2.0);
  } else {
    h = 60.0 * ((rf - gf) / d + 4.0);
  }
  if (h >= 360.0) h -= 360.0;
  return h;
}

HueHistogram hue_histogram(const Frame& frame, const BBox& box, int bins) {
  if (bins < 2) throw Error("histogram needs at least 2 bins");
  HueHistogram h;
  h.bins.assign(bins, 0.0);
  // Pixel x is inside when x1 <= x + 0.5 < x2.
  const int x0 = std::max(0, static_cast<int>(std::ceil(box.x1 - 0.5)));
  const int x1 = std::min(frame.width(), static_cast<int>(std::ceil(box.x2 - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(box.y1 - 0.5)));
  const int y1 = std::min(frame.height(), static_cast<int>(std::ceil(box.y2 - 0.5)));
  std::vector<long> counts(bins, 0);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const Rgb c = frame.at(x, y);
      const double hue = rgb_to_hue(c.r, c.g, c.b);
      const int bin = std::min(bins - 1, static_cast<int>(hue * bins / 360.0));
      ++counts[bin];
      ++h.pixel_count;
    }
  }
  if (h.pixel_count == 0) {
    std::fill(h.bins.begin(), h.bins.end(), 1.0 / bins);
    return h;
  }
  for (int i = 0; i < bins; ++i) h.bins[i] = static_cast<double>(counts[i]) / h.pixel_count;
  return h;
}

double hist_correlation(const HueHistogram& a, const HueHistogram& b) {
  if (a.bins.size() != b.bins.size()) throw Error("histogram bin counts differ");
  const std::size_t n = a.bins.size();
  const double ma = std::accumulate(a.bins.begin(), a.bins.end(), 0.0) / n;
  const double mb = std::accumulate(b.bins.begin(), b.bins.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.bins[i] - ma, db = b.bins[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  const bool ca = saa == 0.0, cb = sbb == 0.0;
  if (ca || cb) return (ca && cb) ? 1.0 : 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

bool box_less(const Detection& a, const Detection& b) {
  return std::tie(a.box.x1, a.box.y1, a.box.x2, a.box.y2, a.confidence) <
         std::tie(b.box.x1, b.box.y1, b.box.x2, b.box.y2, b.confidence);
}

}  // namespace

std::vector<Detection> lhc_merge(std::span<const Detection> dets, const Frame& frame,
                                 const SpatialContextConfig& cfg) {
  std::vector<Detection> work(dets.begin(), dets.end());
  for (const auto& d : work) {
    if (d.frame_index != work.front().frame_index) throw Error("lhc_merge: detections span several frames");
  }
  std::sort(work.begin(), work.end(), box_less);
  std::vector<HueHistogram> hist;
  for (const auto& d : work) hist.push_back(hue_histogram(frame, d.box, cfg.bins));

  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < work.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < work.size() && !merged; ++j) {
        const BBox& a = work[i].box;
        const BBox& b = work[j].box;
        const double gap = std::max(0.0, std::max(a.x1, b.x1) - std::min(a.x2, b.x2));
        if (gap > cfg.lhc_gap * 0.5 * (a.width() + b.width())) continue;
        if (std::abs(a.center_y() - b.center_y()) > cfg.lhc_voff * std::min(a.height(), b.height())) continue;
        if (hist_correlation(hist[i], hist[j]) < cfg.lhc_tau) continue;
        work[i].box = unite(a, b);
        work[i].confidence = std::max(work[i].confidence, work[j].confidence);
        work.erase(work.begin() + j);
        hist.erase(hist.begin() + j);
        hist[i] = hue_histogram(frame, work[i].box, cfg.bins);
        merged = true;
      }
    }
    if (merged) {
      // Keep the left-to-right scan order after a union moved a left edge.
      std::vector<std::size_t> order(work.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t p, std::size_t q) { return box_less(work[p], work[q]); });
      std::vector<Detection> w2;
      std::vector<HueHistogram> h2;
      for (auto k : order) {
        w2.push_back(work[k]);
        h2.push_back(std::move(hist[k]));
      }
      work = std::move(w2);
      hist = std::move(h2);
    }
  }
  return work;
}

std::vector<std::size_t> ghc_cluster(std::span<const HueHistogram> hists, std::span<const int> frame_indices,
                                     double tau) {
  const std::size_t n = hists.size();
  if (frame_indices.size() != n) throw Error("ghc_cluster: histogram/frame count mismatch");
  if (n == 0) return {};

  std::vector<double> corr(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) corr[i * n + j] = corr[j * n + i] = hist_correlation(hists[i], hists[j]);
  }
  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0.0;
    for (auto i : a)
      for (auto j : b) s += corr[i * n + j];
    return s / static_cast<double>(a.size() * b.size());
  };

  // Clusters stay ordered by their smallest member.
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  while (clusters.size() > 1) {
    double best = -2.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double l = linkage(clusters[i], clusters[j]);
        if (l > best) {
          best = l;
          bi = i;
          bj = j;
        }
      }
    }
    if (best < tau) break;
    auto& into = clusters[bi];
    into.insert(into.end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(into.begin(), into.end());
    clusters.erase(clusters.begin() + bj);
  }

  auto cohesion = [&](const std::vector<std::size_t>& c) {
    if (c.size() < 2) return 1.0;
    double s = 0.0;
    for (std::size_t p = 0; p < c.size(); ++p)
      for (std::size_t q = p + 1; q < c.size(); ++q) s += corr[c[p] * n + c[q]];
    return s / (0.5 * static_cast<double>(c.size() * (c.size() - 1)));
  };
  auto min_frame = [&](const std::vector<std::size_t>& c) {
    int m = frame_indices[c.front()];
    for (auto i : c) m = std::min(m, frame_indices[i]);
    return m;
  };

  std::size_t pick = 0;
  for (std::size_t k = 1; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    const auto& p = clusters[pick];
    if (c.size() != p.size()) {
      if (c.size() > p.size()) pick = k;
      continue;
    }
    const double cc = cohesion(c), cp = cohesion(p);
    if (cc != cp) {
      if (cc > cp) pick = k;
      continue;
    }
    // Clusters are ordered by smallest member, so on a frame tie `pick` wins.
    if (min_frame(c) < min_frame(p)) pick = k;
  }
  return clusters[pick];
}

KeyframeResult ghc_select(std::span<const Detection> dets, std::span<const Frame> frames,
                          const SpatialContextConfig& cfg) {
  KeyframeResult result;
  if (dets.empty()) return result;
  std::vector<HueHistogram> hists;
  std::vector<int> fidx;
  for (const auto& d : dets) {
    if (d.frame_index < 0 || static_cast<std::size_t>(d.frame_index) >= frames.size()) {
      throw Error("detection references missing frame " + std::to_string(d.frame_index));
    }
    hists.push_back(hue_histogram(frames[d.frame_index], d.box, cfg.bins));
    fidx.push_back(d.frame_index);
  }
  for (auto i : ghc_cluster(hists, fidx, cfg.ghc_tau)) {
    result.kept_detections.push_back(dets[i]);
    result.keyframe_indices.push_back(dets[i].frame_index);
  }
  std::sort(result.keyframe_indices.begin(), result.keyframe_indices.end());
  result.keyframe_indices.erase(std::unique(result.keyframe_indices.begin(), result.keyframe_indices.end()),
                                result.keyframe_indices.end());
  return result;
}

KeyframeResult kfid(const Tracklet& t, const DetectorConfig& detector_cfg, const RoiConfig& roi_cfg,
                    const SpatialContextConfig& sc_cfg) {
  t.validate();
  roi_cfg.validate();
  sc_cfg.validate();
  const auto raw = localize_tracklet(t, detector_cfg);
  const auto in_roi = filter_by_roi(raw, t.frames, roi_cfg);

  std::map<int, std::vector<Detection>> per_frame;
  for (const auto& d : in_roi) per_frame[d.frame_index].push_back(d);
  std::vector<Detection> local;
  for (const auto& [index, dets] : per_frame) {
    auto merged = lhc_merge(dets, t.frames[index], sc_cfg);
    local.insert(local.end(), merged.begin(), merged.end());
  }
  return ghc_select(local, t.frames, sc_cfg);
}

}  // namespace jnr
