#pragma once

// Shared domain types: frames, boxes, detections, tracklets and the two-digit
// label encoding used by the classifier heads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace jnr {

// Raised for invalid inputs and malformed files across the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// One RGB raster of a player crop. Pixels are row-major RGB triples.
class Frame {
 public:
  Frame() = default;
  // Throws Error unless width, height >= 1 and pixels.size() == width*height*3.
  Frame(int index, int width, int height, std::vector<std::uint8_t> pixels);
  // Uniformly filled frame.
  static Frame filled(int index, int width, int height, Rgb color);

  int index() const { return index_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  Rgb at(int x, int y) const {
    const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {pixels_[o], pixels_[o + 1], pixels_[o + 2]};
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int index_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Axis-aligned box in real-valued pixel coordinates, x1 < x2 and y1 < y2.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }
  bool valid() const { return x1 < x2 && y1 < y2; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

double area(const BBox& b);
// Overlap rectangle, or nullopt when the overlap has zero or negative extent.
std::optional<BBox> intersect(const BBox& a, const BBox& b);
// Smallest box containing both.
BBox unite(const BBox& a, const BBox& b);
// Clips to [0,W]x[0,H]; nullopt if nothing of positive area remains.
std::optional<BBox> clip_to_frame(const BBox& b, int width, int height);
// Intersection over union; used only for diagnostics and tests.
double iou(const BBox& a, const BBox& b);

struct Detection {
  int frame_index = 0;
  BBox box;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Jersey number in [0, 99], or -1 for "no visible number".
class JerseyLabel {
 public:
  static constexpr int kNone = -1;

  JerseyLabel() = default;
  explicit JerseyLabel(int number);

  int number() const { return number_; }
  bool is_none() const { return number_ == kNone; }

  friend bool operator==(const JerseyLabel&, const JerseyLabel&) = default;

 private:
  int number_ = kNone;
};

// Two 11-way digit targets; class 10 means "absent".
struct DigitPair {
  static constexpr int kAbsent = 10;
  static constexpr int kClasses = 11;

  int d1 = kAbsent;
  int d2 = kAbsent;

  bool valid() const { return d1 >= 0 && d1 < kClasses && d2 >= 0 && d2 < kClasses; }
  friend bool operator==(const DigitPair&, const DigitPair&) = default;
};

DigitPair encode_label(JerseyLabel label);
// (10, k) with k != 10 decodes as the single digit k.
JerseyLabel decode_pair(DigitPair pair);

struct Tracklet {
  std::string id;
  std::vector<Frame> frames;
  std::vector<Detection> detections;  // sidecar detections, if any
  std::optional<JerseyLabel> label;

  int length() const { return static_cast<int>(frames.size()); }
  // Checks dense frame numbering and detection frame references.
  void validate() const;
};

}  // namespace jnr
