#include "jnr/jnl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace jnr {

void DetectorConfig::validate() const {
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw Error("jnl.min_confidence must lie in [0,1]");
  }
  if (threshold < 0 || threshold > 255) throw Error("jnl.threshold must be an 8-bit level");
  if (background_radius < 1) throw Error("jnl.window must be >= 1");
  if (min_area < 1 || min_area >= max_area) throw Error("jnl.min_area must be < jnl.max_area");
  if (!(min_aspect > 0.0 && min_aspect < max_aspect)) {
    throw Error("jnl aspect bounds must satisfy 0 < min < max");
  }
}

HeuristicDetector::HeuristicDetector(DetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<Detection> HeuristicDetector::localize(const Frame& frame) const {
  const int w = frame.width();
  const int h = frame.height();
  const auto& px = frame.pixels();

  std::vector<double> gray(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = 0.299 * px[3 * i] + 0.587 * px[3 * i + 1] + 0.114 * px[3 * i + 2];
  }

  // Summed-area table with a zero first row/column.
  const int sw = w + 1;
  std::vector<double> sat(static_cast<std::size_t>(sw) * (h + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += gray[static_cast<std::size_t>(y) * w + x];
      sat[static_cast<std::size_t>(y + 1) * sw + x + 1] = sat[static_cast<std::size_t>(y) * sw + x + 1] + row;
    }
  }

  const int r = cfg_.background_radius;
  std::vector<std::uint8_t> fg(gray.size(), 0);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r), y1 = std::min(h, y + r + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r), x1 = std::min(w, x + r + 1);
      const double sum = sat[static_cast<std::size_t>(y1) * sw + x1] - sat[static_cast<std::size_t>(y0) * sw + x1] -
                         sat[static_cast<std::size_t>(y1) * sw + x0] + sat[static_cast<std::size_t>(y0) * sw + x0];
      const double mean = sum / ((y1 - y0) * (x1 - x0));
      fg[static_cast<std::size_t>(y) * w + x] = gray[static_cast<std::size_t>(y) * w + x] - mean > cfg_.threshold;
    }
  }

  // 8-connected components, scanned in raster order so output order is stable.
  std::vector<std::uint8_t> seen(fg.size(), 0);
  std::vector<int> stack;
  std::vector<Detection> out;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t s = static_cast<std::size_t>(sy) * w + sx;
      if (!fg[s] || seen[s]) continue;
      int minx = sx, maxx = sx, miny = sy, maxy = sy, count = 0;
      seen[s] = 1;
      stack.assign(1, static_cast<int>(s));
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int x = p % w, y = p / w;
        ++count;
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (fg[q] && !seen[q]) {
              seen[q] = 1;
              stack.push_back(static_cast<int>(q));
            }
          }
        }
      }
      if (count < cfg_.min_area || count > cfg_.max_area) continue;
      const double bw = maxx - minx + 1, bh = maxy - miny + 1;
      const double aspect = bh / bw;
      if (aspect < cfg_.min_aspect || aspect > cfg_.max_aspect) continue;
      const double solidity = count / (bw * bh);
      if (solidity < cfg_.min_confidence) continue;
      out.push_back({frame.index(),
                     BBox{static_cast<double>(minx), static_cast<double>(miny),
                          static_cast<double>(maxx + 1), static_cast<double>(maxy + 1)},
                     solidity});
    }
  }
  return out;
}

FileBackedDetector::FileBackedDetector(std::vector<Detection> rows, DetectorConfig cfg)
    : rows_(std::move(rows)), cfg_(cfg) {
  if (!(cfg_.min_confidence >= 0.0 && cfg_.min_confidence <= 1.0)) {
    throw Error("jnl.min_confidence must lie in [0,1]");
  }
}

std::vector<Detection> FileBackedDetector::localize(const Frame& frame) const {
  std::vector<Detection> out;
  for (const auto& d : rows_) {
    if (d.frame_index != frame.index() || d.confidence < cfg_.min_confidence) continue;
    if (auto clipped = clip_to_frame(d.box, frame.width(), frame.height())) {
      out.push_back({d.frame_index, *clipped, d.confidence});
    }
  }
  return out;
}

std::unique_ptr<Detector> make_detector(const DetectorConfig& cfg, std::span<const Detection> sidecar) {
  if (cfg.kind == DetectorKind::kFileBacked) {
    return std::make_unique<FileBackedDetector>(std::vector<Detection>(sidecar.begin(), sidecar.end()), cfg);
  }
  return std::make_unique<HeuristicDetector>(cfg);
}

std::vector<Detection> localize(const Frame& frame, const DetectorConfig& cfg,
                                std::span<const Detection> sidecar) {
  return make_detector(cfg, sidecar)->localize(frame);
}

std::vector<Detection> localize_tracklet(const Tracklet& t, const DetectorConfig& cfg) {
  const auto detector = make_detector(cfg, t.detections);
  std::vector<Detection> out;
  for (const auto& f : t.frames) {
    auto dets = detector->localize(f);
    out.insert(out.end(), dets.begin(), dets.end());
  }
  return out;
}

namespace {

double parse_number(std::string_view field, const std::filesystem::path& path, int line) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v)) {
    throw Error(path.string() + ":" + std::to_string(line) + ": malformed number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

std::vector<Detection> read_detection_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open detection sidecar " + path.string());
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw Error(path.string() + ":1: missing header row");
  ++lineno;
  std::vector<Detection> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 6) throw Error(where + ": expected 6 fields, got " + std::to_string(fields.size()));
    const double fi = parse_number(fields[0], path, lineno);
    if (fi < 0 || fi != std::floor(fi)) throw Error(where + ": frame_index must be a non-negative integer");
    Detection d{static_cast<int>(fi),
                BBox{parse_number(fields[1], path, lineno), parse_number(fields[2], path, lineno),
                     parse_number(fields[3], path, lineno), parse_number(fields[4], path, lineno)},
                parse_number(fields[5], path, lineno)};
    if (!d.box.valid()) throw Error(where + ": box must satisfy x1 < x2 and y1 < y2");
    if (d.confidence < 0.0 || d.confidence > 1.0) throw Error(where + ": confidence outside [0,1]");
    out.push_back(d);
  }
  return out;
}

void write_detection_sidecar(const std::filesystem::path& path, std::span<const Detection> dets) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write detection sidecar " + path.string());
  out << "frame_index,x1,y1,x2,y2,confidence\n";
  out.precision(17);
  for (const auto& d : dets) {
    out << d.frame_index << ',' << d.box.x1 << ',' << d.box.y1 << ',' << d.box.x2 << ',' << d.box.y2 << ','
        << d.confidence << '\n';
  }
}

}  // namespace jnr
