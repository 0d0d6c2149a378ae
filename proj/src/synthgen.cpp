#include "jnr/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "jnr/pipeline/image_io.hpp"
#include "jnr/sampler.hpp"

namespace jnr {
namespace {

// 5x7 font, one row per entry, bit 4 = leftmost column. Every glyph is a
// single 4-connected stroke so the detector sees one component per digit.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kFont{{
    {0b11111, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b11111},
    {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110},
    {0b11111, 0b00001, 0b00001, 0b11111, 0b10000, 0b10000, 0b11111},
    {0b11111, 0b00001, 0b00001, 0b01111, 0b00001, 0b00001, 0b11111},
    {0b10001, 0b10001, 0b10001, 0b11111, 0b00001, 0b00001, 0b00001},
    {0b11111, 0b10000, 0b10000, 0b11111, 0b00001, 0b00001, 0b11111},
    {0b11111, 0b10000, 0b10000, 0b11111, 0b10001, 0b10001, 0b11111},
    {0b11111, 0b00001, 0b00001, 0b00011, 0b00010, 0b00010, 0b00010},
    {0b11111, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b11111},
    {0b11111, 0b10001, 0b10001, 0b11111, 0b00001, 0b00001, 0b11111},
}};

constexpr int kGlyphCols = 5;
constexpr int kGlyphRows = 7;
constexpr int kNoise = 6;

Rgb hsv(double h, double s, double v) {
  h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
  const double c = v * s;
  const double x = c * (1.0 - std::fabs(std::fmod(h / 60.0, 2.0) - 1.0));
  const double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(h / 60.0)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {q(r), q(g), q(b)};
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 0) {}

  int width() const { return w_; }
  int height() const { return h_; }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const std::size_t o = (static_cast<std::size_t>(y) * w_ + x) * 3;
    px_[o] = c.r;
    px_[o + 1] = c.g;
    px_[o + 2] = c.b;
  }

  template <typename Rng>
  void rect(int x1, int y1, int x2, int y2, Rgb c, Rng& rng, int noise = kNoise) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    for (int y = std::max(0, y1); y < std::min(h_, y2); ++y)
      for (int x = std::max(0, x1); x < std::min(w_, x2); ++x) set(x, y, noisy(c, noise ? jitter(rng) : 0));
  }

  template <typename Rng>
  void ellipse(double cx, double cy, double rx, double ry, Rgb c, Rng& rng) {
    std::uniform_int_distribution<int> jitter(-kNoise, kNoise);
    for (int y = 0; y < h_; ++y)
      for (int x = 0; x < w_; ++x) {
        const double dx = (x + 0.5 - cx) / rx;
        const double dy = (y + 0.5 - cy) / ry;
        if (dx * dx + dy * dy <= 1.0) set(x, y, noisy(c, jitter(rng)));
      }
  }

  // Draws a glyph with its cell's top-left corner at (x, y); returns the lit box.
  BBox glyph(int digit, int x, int y, int scale, Rgb c) {
    for (int row = 0; row < kGlyphRows; ++row)
      for (int col = 0; col < kGlyphCols; ++col) {
        if (!glyph_pixel(digit, col, row)) continue;
        for (int dy = 0; dy < scale; ++dy)
          for (int dx = 0; dx < scale; ++dx) set(x + col * scale + dx, y + row * scale + dy, c);
      }
    return glyph_box(digit, x, y, scale);
  }

  void box_blur(int radius) {
    if (radius <= 0) return;
    std::vector<std::uint8_t> tmp(px_.size());
    auto pass = [&](const std::vector<std::uint8_t>& src, std::vector<std::uint8_t>& dst, bool horizontal) {
      for (int y = 0; y < h_; ++y)
        for (int x = 0; x < w_; ++x)
          for (int ch = 0; ch < 3; ++ch) {
            int sum = 0;
            for (int k = -radius; k <= radius; ++k) {
              const int xx = horizontal ? std::clamp(x + k, 0, w_ - 1) : x;
              const int yy = horizontal ? y : std::clamp(y + k, 0, h_ - 1);
              sum += src[(static_cast<std::size_t>(yy) * w_ + xx) * 3 + ch];
            }
            const int n = 2 * radius + 1;
            dst[(static_cast<std::size_t>(y) * w_ + x) * 3 + ch] = static_cast<std::uint8_t>((sum + n / 2) / n);
          }
    };
    pass(px_, tmp, true);
    pass(tmp, px_, false);
  }

  Frame to_frame(int index) const { return Frame(index, w_, h_, px_); }

 private:
  static Rgb noisy(Rgb c, int d) {
    auto f = [d](std::uint8_t u) { return static_cast<std::uint8_t>(std::clamp(u + d, 0, 255)); };
    return {f(c.r), f(c.g), f(c.b)};
  }

  int w_, h_;
  std::vector<std::uint8_t> px_;
};

std::vector<int> number_digits(int number) {
  if (number < 10) return {number};
  return {number / 10, number % 10};
}

int text_width(int digits, int scale) { return (digits * (kGlyphCols + 1) - 1) * scale; }

int lround_int(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

bool glyph_pixel(int digit, int col, int row) {
  if (digit < 0 || digit > 9 || col < 0 || col >= kGlyphCols || row < 0 || row >= kGlyphRows) return false;
  return (kFont[digit][row] >> (kGlyphCols - 1 - col)) & 1u;
}

BBox glyph_box(int digit, int x, int y, int scale) {
  int c1 = kGlyphCols, c2 = -1, r1 = kGlyphRows, r2 = -1;
  for (int row = 0; row < kGlyphRows; ++row)
    for (int col = 0; col < kGlyphCols; ++col)
      if (glyph_pixel(digit, col, row)) {
        c1 = std::min(c1, col);
        c2 = std::max(c2, col);
        r1 = std::min(r1, row);
        r2 = std::max(r2, row);
      }
  if (c2 < 0) throw Error("glyph_box: digit outside 0..9");
  return {static_cast<double>(x + c1 * scale), static_cast<double>(y + r1 * scale),
          static_cast<double>(x + (c2 + 1) * scale), static_cast<double>(y + (r2 + 1) * scale)};
}

void SynthConfig::validate() const {
  auto prob = [](double p, const char* key) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(std::string(key) + " must lie in [0,1]");
  };
  auto hue = [](double h) {
    if (!(h >= 0.0 && h < 360.0)) throw Error("hue out of range");
  };
  if (tracklets < 1) throw Error("synth.tracklets must be >= 1");
  if (frames_min < 1 || frames_max < frames_min) throw Error("synth.frames_min/frames_max invalid");
  if (width < 40 || height < 50) throw Error("synth.width/height too small (minimum 40x50)");
  hue(target_hue);
  hue(opposition_hue);
  prob(visibility, "synth.visibility");
  prob(distractor_prob, "synth.distractor_prob");
  prob(occluder_prob, "synth.occluder_prob");
  prob(occluder_min, "synth.occluder_min");
  prob(occluder_max, "synth.occluder_max");
  if (occluder_max < occluder_min) throw Error("synth.occluder_max < synth.occluder_min");
  if (blur_min < 0 || blur_max < blur_min) throw Error("synth.blur_min/blur_max invalid");
  if (glyph_scale_min < 1 || glyph_scale_max < glyph_scale_min) throw Error("synth.glyph_scale range invalid");
  prob(split_train, "synth.split_train");
  prob(split_val, "synth.split_val");
  prob(split_test, "synth.split_test");
  if (std::fabs(split_train + split_val + split_test - 1.0) > 1e-9) throw Error("synth split fractions must sum to 1");
  prob(holdout_fraction, "synth.holdout_fraction");
  prob(test_unseen_fraction, "synth.test_unseen_fraction");
  prob(none_label_prob, "synth.none_label_prob");
  if (holdout_fraction >= 1.0) throw Error("synth.holdout_fraction must be < 1");
  // The widest two-digit number must fit across the frame.
  if (text_width(2, glyph_scale_max) + 8 > width || kGlyphRows * glyph_scale_max + 6 > height / 3)
    throw Error("synth.glyph_scale_max too large for the frame size");
}

std::vector<TrackletPlan> plan_tracklets(const SynthConfig& cfg, std::vector<int>* heldout_out) {
  cfg.validate();
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x5eedULL));

  std::vector<int> numbers(100);
  std::iota(numbers.begin(), numbers.end(), 0);
  for (std::size_t i = numbers.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(numbers[i - 1], numbers[pick(rng)]);
  }
  const auto n_held = static_cast<std::size_t>(std::lround(cfg.holdout_fraction * 100.0));
  std::vector<int> held(numbers.begin(), numbers.begin() + static_cast<std::ptrdiff_t>(n_held));
  std::vector<int> seen(numbers.begin() + static_cast<std::ptrdiff_t>(n_held), numbers.end());
  std::sort(held.begin(), held.end());
  std::sort(seen.begin(), seen.end());
  if (heldout_out) *heldout_out = held;

  const int n_train = lround_int(cfg.tracklets * cfg.split_train);
  const int n_val = std::min(cfg.tracklets - n_train, lround_int(cfg.tracklets * cfg.split_val));

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> frames(cfg.frames_min, cfg.frames_max);
  auto draw = [&](const std::vector<int>& from) {
    std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
    return from[pick(rng)];
  };

  std::vector<TrackletPlan> plans;
  for (int i = 0; i < cfg.tracklets; ++i) {
    TrackletPlan p;
    std::ostringstream id;
    id << 't' << std::setw(4) << std::setfill('0') << i;
    p.id = id.str();
    p.split = i < n_train ? "train" : (i < n_train + n_val ? "val" : "test");
    p.frame_count = frames(rng);
    p.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i) + 1);
    const bool none = u01(rng) < cfg.none_label_prob;
    const bool unseen = p.split == "test" && !held.empty() && u01(rng) < cfg.test_unseen_fraction;
    if (!none) p.label = JerseyLabel(unseen ? draw(held) : draw(seen));
    plans.push_back(std::move(p));
  }
  return plans;
}

SynthTracklet render_tracklet(const SynthConfig& cfg, const TrackletPlan& plan) {
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> jitter2(-2, 2);
  const int W = cfg.width;
  const int H = cfg.height;
  const double w = W;
  const double h = H;

  const Rgb grass = hsv(100, 0.5, 0.45);
  const Rgb kit = hsv(cfg.target_hue, 0.7, 0.55);
  const Rgb shorts = hsv(cfg.target_hue, 0.5, 0.2);
  const Rgb digit_color = hsv(cfg.target_hue + 180.0, 0.45, 1.0);
  const Rgb opp_kit = hsv(cfg.opposition_hue, 0.7, 0.55);
  const Rgb opp_digit = hsv(cfg.opposition_hue + 180.0, 0.45, 1.0);
  const Rgb sock = {235, 235, 235};
  const Rgb occluder = {48, 48, 54};
  const Rgb skin = hsv(25 + 10 * u01(rng), 0.45, 0.8 + 0.1 * u01(rng));

  const int scale = std::uniform_int_distribution<int>(cfg.glyph_scale_min, cfg.glyph_scale_max)(rng);
  const int player_dx = std::uniform_int_distribution<int>(-3, 3)(rng);
  const std::vector<int> digits = plan.label.is_none() ? std::vector<int>{} : number_digits(plan.label.number());

  // Frame roles: visible, occluded (number present but covered), or hidden.
  enum Role { kHidden, kVisible, kOccluded };
  std::vector<Role> roles(static_cast<std::size_t>(plan.frame_count), kHidden);
  int visible_count = 0;
  for (auto& r : roles) {
    if (u01(rng) < cfg.visibility) {
      r = kVisible;
      ++visible_count;
    } else if (u01(rng) < cfg.occluder_prob) {
      r = kOccluded;
    }
  }
  if (visible_count == 0 && cfg.visibility > 0.0) {
    roles[std::uniform_int_distribution<std::size_t>(0, roles.size() - 1)(rng)] = kVisible;
  }

  SynthTracklet out;
  out.split = plan.split;
  out.tracklet.id = plan.id;
  out.tracklet.label = plan.label;
  const int tw = digits.empty() ? 0 : text_width(static_cast<int>(digits.size()), scale);
  const int th = kGlyphRows * scale;

  for (int f = 0; f < plan.frame_count; ++f) {
    Canvas c(W, H);
    FrameMeta meta;
    meta.frame_index = f;
    const int dx = player_dx + jitter2(rng);
    const int dy = jitter2(rng);
    auto X = [&](double frac) { return lround_int(frac * w) + dx; };
    auto Y = [&](double frac) { return lround_int(frac * h) + dy; };

    c.rect(0, 0, W, H, grass, rng);
    c.ellipse(0.5 * w + dx, 0.11 * h + dy, 0.09 * w, 0.085 * h, skin, rng);
    c.rect(X(0.08), Y(0.21), X(0.18), Y(0.55), skin, rng);
    c.rect(X(0.82), Y(0.21), X(0.92), Y(0.55), skin, rng);
    c.rect(X(0.18), Y(0.19), X(0.82), Y(0.64), kit, rng);
    c.rect(X(0.23), Y(0.64), X(0.77), Y(0.77), shorts, rng);
    c.rect(X(0.30), Y(0.77), X(0.43), Y(0.88), skin, rng);
    c.rect(X(0.57), Y(0.77), X(0.70), Y(0.88), skin, rng);
    c.rect(X(0.31), Y(0.88), X(0.42), H, sock, rng);
    c.rect(X(0.58), Y(0.88), X(0.69), H, sock, rng);

    const Role role = roles[static_cast<std::size_t>(f)];
    if (role != kHidden && !digits.empty()) {
      // Center the number in the torso region of interest.
      const int cx = lround_int(0.5 * w) + dx + std::uniform_int_distribution<int>(-4, 4)(rng);
      const int cy = lround_int(0.35 * h) + dy + std::uniform_int_distribution<int>(-3, 3)(rng);
      const int x0 = std::clamp(cx - tw / 2, 1, W - tw - 1);
      const int y0 = std::clamp(cy - th / 2, 1, H - th - 1);
      std::optional<BBox> uni;
      for (std::size_t k = 0; k < digits.size(); ++k) {
        const BBox b = c.glyph(digits[k], x0 + static_cast<int>(k) * (kGlyphCols + 1) * scale, y0, scale, digit_color);
        meta.digit_boxes.push_back(b);
        uni = uni ? unite(*uni, b) : b;
      }
      meta.number_box = uni;
      meta.visible = role == kVisible;
      if (role == kOccluded) {
        const double frac = cfg.occluder_min + (cfg.occluder_max - cfg.occluder_min) * u01(rng);
        const int cover = std::max(1, lround_int(frac * uni->width()));
        const bool from_left = u01(rng) < 0.5;
        const int ox1 = from_left ? static_cast<int>(uni->x1) - 3 : static_cast<int>(uni->x2) - cover;
        const int ox2 = from_left ? static_cast<int>(uni->x1) + cover : static_cast<int>(uni->x2) + 3;
        c.rect(ox1, static_cast<int>(uni->y1) - 4, ox2, static_cast<int>(uni->y2) + 4, occluder, rng);
      }
    } else if (u01(rng) < cfg.distractor_prob) {
      // Opposition player overlapping one side of the crop.
      const bool left = u01(rng) < 0.5;
      const int dscale = cfg.glyph_scale_min;
      const int gw = kGlyphCols * dscale;
      const int digit = std::uniform_int_distribution<int>(0, 9)(rng);
      const int roi_edge = left ? lround_int(0.25 * w) : lround_int(0.75 * w);
      const int gx = left ? roi_edge - lround_int(0.4 * gw) : roi_edge - lround_int(0.6 * gw);
      const int gy = lround_int(0.35 * h) - kGlyphRows * dscale / 2 + jitter2(rng);
      const int px1 = left ? 0 : gx - 3;
      const int px2 = left ? gx + gw + 3 : W;
      c.rect(px1, lround_int(0.18 * h), px2, lround_int(0.6 * h), opp_kit, rng);
      meta.distractor_boxes.push_back(c.glyph(digit, gx, gy, dscale, opp_digit));
    }

    c.box_blur(std::uniform_int_distribution<int>(cfg.blur_min, cfg.blur_max)(rng));
    out.tracklet.frames.push_back(c.to_frame(f));
    out.meta.push_back(std::move(meta));
  }
  return out;
}

void write_meta_csv(const std::filesystem::path& path, const std::vector<FrameMeta>& meta) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "frame_index,visible,kind,x1,y1,x2,y2\n";
  for (const auto& m : meta) {
    if (m.number_box) {
      const BBox& b = *m.number_box;
      out << m.frame_index << ',' << (m.visible ? 1 : 0) << ",target," << b.x1 << ',' << b.y1 << ',' << b.x2 << ','
          << b.y2 << '\n';
    }
    for (const auto& b : m.distractor_boxes)
      out << m.frame_index << ",1,distractor," << b.x1 << ',' << b.y1 << ',' << b.x2 << ',' << b.y2 << '\n';
  }
  if (!out) throw Error("error writing " + path.string());
}

std::vector<FrameMeta> read_meta_csv(const std::filesystem::path& path, int frame_count) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<FrameMeta> meta(static_cast<std::size_t>(frame_count));
  for (int i = 0; i < frame_count; ++i) meta[static_cast<std::size_t>(i)].frame_index = i;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw Error(where + ": expected 7 fields");
    int idx = 0, vis = 0;
    BBox b;
    try {
      idx = std::stoi(f[0]);
      vis = std::stoi(f[1]);
      b = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])};
    } catch (const std::exception&) {
      throw Error(where + ": malformed number");
    }
    if (idx < 0 || idx >= frame_count) throw Error(where + ": frame index out of range");
    auto& m = meta[static_cast<std::size_t>(idx)];
    if (f[2] == "target") {
      m.number_box = b;
      m.visible = vis != 0;
    } else if (f[2] == "distractor") {
      m.distractor_boxes.push_back(b);
    } else {
      throw Error(where + ": unknown kind '" + f[2] + "'");
    }
  }
  return meta;
}

SynthMetadata generate(const SynthConfig& cfg, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  SynthMetadata md;
  md.tracklets = plan_tracklets(cfg, &md.heldout_numbers);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create " + out.string() + ": " + ec.message());

  std::map<std::string, std::ofstream> gt;
  for (const char* split : {"train", "val", "test"}) {
    fs::create_directories(out / split, ec);
    if (ec) throw Error("cannot create " + (out / split).string() + ": " + ec.message());
    auto& g = gt[split];
    g.open(out / split / "gt.csv", std::ios::trunc);
    if (!g) throw Error("cannot write " + (out / split / "gt.csv").string());
    g << "tracklet_id,number\n";
  }
  for (const auto& plan : md.tracklets) {
    SynthTracklet st = render_tracklet(cfg, plan);
    const fs::path dir = out / plan.split / plan.id;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    char name[32];
    for (const auto& frame : st.tracklet.frames) {
      std::snprintf(name, sizeof name, "frame_%06d.ppm", frame.index());
      write_ppm(dir / name, frame);
    }
    write_meta_csv(dir / "meta.csv", st.meta);
    gt[plan.split] << plan.id << ',' << plan.label.number() << '\n';
    md.frames.push_back(std::move(st.meta));
  }
  for (auto& [split, g] : gt) {
    g.flush();
    if (!g) throw Error("error writing gt.csv for split " + split);
  }
  return md;
}

}  // namespace jnr
