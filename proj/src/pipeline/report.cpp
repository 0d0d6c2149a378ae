#include "jnr/pipeline/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "jnr/core_types.hpp"

namespace jnr {

void KeyframeStats::add(const KeyframeStats& o) {
  tracklets += o.tracklets;
  frames += o.frames;
  keyframes += o.keyframes;
  empty_tracklets += o.empty_tracklets;
  has_meta = has_meta || o.has_meta;
  visible_frames += o.visible_frames;
  visible_kept += o.visible_kept;
}

double KeyframeStats::reduction_percent() const {
  if (frames == 0) return 0.0;
  return (1.0 - static_cast<double>(keyframes) / static_cast<double>(frames)) * 100.0;
}

std::optional<double> KeyframeStats::visible_recall() const {
  if (!has_meta || visible_frames == 0) return std::nullopt;
  return static_cast<double>(visible_kept) / static_cast<double>(visible_frames);
}

std::string format_kfid_stats(const KeyframeStats& s) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2);
  o << "tracklets           " << s.tracklets << '\n'
    << "frames              " << s.frames << '\n'
    << "keyframes           " << s.keyframes << '\n'
    << "reduction_percent   " << s.reduction_percent() << '\n'
    << "empty_tracklets     " << s.empty_tracklets << '\n';
  if (auto r = s.visible_recall()) {
    o << std::setprecision(4);
    o << "visible_frames      " << s.visible_frames << '\n'
      << "visible_recall      " << *r << '\n';
  }
  return o.str();
}

long long RunReport::correct() const {
  long long n = 0;
  for (const auto& r : rows) n += r.correct ? 1 : 0;
  return n;
}

double RunReport::accuracy() const {
  return rows.empty() ? 0.0 : static_cast<double>(correct()) / static_cast<double>(rows.size());
}

std::optional<double> RunReport::unseen_accuracy() const {
  if (!train_labels_known) return std::nullopt;
  long long n = 0, c = 0;
  for (const auto& r : rows) {
    if (!r.unseen) continue;
    ++n;
    c += r.correct ? 1 : 0;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(c) / static_cast<double>(n);
}

long long RunReport::fallback_count() const {
  long long n = 0;
  for (const auto& r : rows) n += r.fallback ? 1 : 0;
  return n;
}

void write_predictions_csv(const std::filesystem::path& path, const RunReport& r) {
  std::ostringstream o;
  o << "tracklet_id,pred,gt,correct\n";
  for (const auto& row : r.rows) o << row.tracklet_id << ',' << row.pred << ',' << row.gt << ',' << (row.correct ? 1 : 0) << '\n';
  write_text(path, o.str());
}

std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<PredictionRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::stringstream ss(line);
    PredictionRow r;
    std::string pred, gt, correct;
    if (!std::getline(ss, r.tracklet_id, ',') || !std::getline(ss, pred, ',') || !std::getline(ss, gt, ',') ||
        !std::getline(ss, correct))
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
    try {
      r.pred = std::stoi(pred);
      r.gt = std::stoi(gt);
      r.correct = std::stoi(correct) != 0;
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_report(const RunReport& r) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4);
  o << "kfid                " << (r.kfid_enabled ? "enabled" : "disabled") << '\n'
    << "tracklets           " << r.rows.size() << '\n'
    << "correct             " << r.correct() << '\n'
    << "accuracy            " << r.accuracy() << '\n';
  if (auto u = r.unseen_accuracy()) {
    long long n = 0;
    for (const auto& row : r.rows) n += row.unseen ? 1 : 0;
    o << "unseen_tracklets    " << n << '\n' << "unseen_accuracy     " << *u << '\n';
  }
  o << "fallback_tracklets  " << r.fallback_count() << '\n';
  o << std::setprecision(2);
  o << "frames              " << r.keyframes.frames << '\n'
    << "keyframes           " << r.keyframes.keyframes << '\n'
    << "reduction_percent   " << r.keyframes.reduction_percent() << '\n';
  o << '\n' << std::left << std::setw(16) << "tracklet" << std::right << std::setw(6) << "pred" << std::setw(6) << "gt"
    << std::setw(9) << "correct" << "  flags\n";
  for (const auto& row : r.rows) {
    o << std::left << std::setw(16) << row.tracklet_id << std::right << std::setw(6) << row.pred << std::setw(6)
      << row.gt << std::setw(9) << (row.correct ? "yes" : "no") << "  ";
    if (row.fallback) o << "fallback ";
    if (row.unseen) o << "unseen";
    o << '\n';
  }
  return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("error writing " + path.string());
}

}  // namespace jnr
