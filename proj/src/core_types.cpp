#include "jnr/core_types.hpp"

#include <algorithm>
#include <string>

namespace jnr {

Frame::Frame(int index, int width, int height, std::vector<std::uint8_t> pixels)
    : index_(index), width_(width), height_(height), pixels_(std::move(pixels)) {
  if (index < 0) throw Error("frame index must be non-negative");
  if (width < 1 || height < 1) throw Error("frame dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error("frame pixel buffer has " + std::to_string(pixels_.size()) + " bytes, expected " +
                std::to_string(static_cast<std::size_t>(width) * height * 3));
  }
}

Frame Frame::filled(int index, int width, int height, Rgb color) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < px.size(); i += 3) {
    px[i] = color.r;
    px[i + 1] = color.g;
    px[i + 2] = color.b;
  }
  return Frame(index, width, height, std::move(px));
}

double area(const BBox& b) { return (b.x2 - b.x1) * (b.y2 - b.y1); }

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
  const BBox r{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
               std::min(a.y2, b.y2)};
  if (!r.valid()) return std::nullopt;
  return r;
}

BBox unite(const BBox& a, const BBox& b) {
  return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
}

std::optional<BBox> clip_to_frame(const BBox& b, int width, int height) {
  return intersect(b, BBox{0.0, 0.0, static_cast<double>(width), static_cast<double>(height)});
}

double iou(const BBox& a, const BBox& b) {
  const auto i = intersect(a, b);
  if (!i) return 0.0;
  const double inter = area(*i);
  return inter / (area(a) + area(b) - inter);
}

JerseyLabel::JerseyLabel(int number) : number_(number) {
  if (number < kNone || number > 99) {
    throw Error("jersey number " + std::to_string(number) + " outside {-1} U [0,99]");
  }
}

DigitPair encode_label(JerseyLabel label) {
  const int n = label.number();
  if (n == JerseyLabel::kNone) return {DigitPair::kAbsent, DigitPair::kAbsent};
  if (n < 10) return {n, DigitPair::kAbsent};
  return {n / 10, n % 10};
}

JerseyLabel decode_pair(DigitPair pair) {
  if (!pair.valid()) throw Error("digit class outside 0..10");
  if (pair.d1 == DigitPair::kAbsent) {
    return pair.d2 == DigitPair::kAbsent ? JerseyLabel() : JerseyLabel(pair.d2);
  }
  if (pair.d2 == DigitPair::kAbsent) return JerseyLabel(pair.d1);
  return JerseyLabel(pair.d1 * 10 + pair.d2);
}

void Tracklet::validate() const {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].index() != static_cast<int>(i)) {
      throw Error("tracklet '" + id + "': frame indices are not dense from 0");
    }
  }
  for (const auto& d : detections) {
    if (d.frame_index < 0 || d.frame_index >= length()) {
      throw Error("tracklet '" + id + "': detection references missing frame " +
                  std::to_string(d.frame_index));
    }
  }
}

}  // namespace jnr
