#include "jnr/pipeline/commands.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "jnr/stnet/checkpoint.hpp"
#include "jnr/synthgen.hpp"

namespace jnr {

namespace fs = std::filesystem;

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The exception of the
// lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run, t, workers);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void ensure_dir(const fs::path& p) {
  if (p.empty()) return;
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error("cannot create " + p.string() + ": " + ec.message());
}

std::string seed_line(const RunConfig& cfg) {
  std::ostringstream o;
  o << "seeds: sampler=" << cfg.sampler.seed << " net=" << cfg.net.seed;
  return o.str();
}

void require_labels(const std::vector<PreparedTracklet>& data, const std::string& what) {
  for (const auto& t : data)
    if (!t.label) throw Error(what + ": tracklet " + t.id + " has no ground-truth label");
}

}  // namespace

std::vector<int> PreparedTracklet::pool(bool use_kfid) const {
  if (use_kfid && !keyframes.keyframe_indices.empty()) return keyframes.keyframe_indices;
  std::vector<int> all(static_cast<std::size_t>(frame_count));
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<PreparedTracklet> prepare_split(const RunConfig& cfg, const SplitIndex& split, const PrepareOptions& opts) {
  std::vector<PreparedTracklet> out(split.tracklets.size());
  parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
    const TrackletEntry& entry = split.tracklets[i];
    const Tracklet t = load_tracklet(entry);
    PreparedTracklet& p = out[i];
    p.id = entry.id;
    p.label = entry.label;
    p.frame_count = t.length();
    p.stats.tracklets = 1;
    p.stats.frames = t.length();
    if (opts.run_kfid) {
      p.kfid_run = true;
      p.keyframes = kfid(t, cfg.jnl, cfg.roi, cfg.sc);
      p.stats.keyframes = static_cast<long long>(p.keyframes.keyframe_indices.size());
      p.stats.empty_tracklets = p.keyframes.keyframe_indices.empty() ? 1 : 0;
      const fs::path meta = entry.dir / "meta.csv";
      if (fs::exists(meta)) {
        p.stats.has_meta = true;
        const std::set<int> kept(p.keyframes.keyframe_indices.begin(), p.keyframes.keyframe_indices.end());
        for (const auto& m : read_meta_csv(meta, t.length())) {
          if (!m.visible) continue;
          ++p.stats.visible_frames;
          if (kept.count(m.frame_index)) ++p.stats.visible_kept;
        }
      }
    } else {
      p.stats.keyframes = t.length();
    }
    if (opts.tensors) {
      const std::vector<int> frames = opts.tensors_for_all_frames ? p.pool(false) : p.pool(opts.run_kfid);
      for (int f : frames) p.tensors.emplace(f, stnet::preprocess(t.frames[static_cast<std::size_t>(f)], cfg.net));
    }
  });
  return out;
}

stnet::TrainResult train_prepared(const RunConfig& cfg, const std::vector<PreparedTracklet>& data, bool use_kfid,
                                  const std::function<void(int, double, double)>& on_iteration) {
  require_labels(data, "training");
  std::vector<stnet::TrainItem> items;
  for (const auto& t : data) {
    stnet::TrainItem item;
    item.id = t.id;
    item.pool = t.pool(use_kfid);
    item.target = encode_label(*t.label);
    for (int f : item.pool) {
      auto it = t.tensors.find(f);
      if (it == t.tensors.end()) throw Error("internal: frame " + std::to_string(f) + " of " + t.id + " not prepared");
      item.frames.push_back(&it->second);
    }
    items.push_back(std::move(item));
  }
  stnet::TrainOptions opts;
  opts.net = cfg.net;
  opts.sampler = cfg.sampler;
  opts.threads = cfg.threads;
  opts.on_iteration = on_iteration;
  return stnet::train(items, stnet::ModelParams::initialize(cfg.net, cfg.net.seed), opts);
}

RunReport evaluate_prepared(const RunConfig& cfg, const stnet::NetConfig& net, const stnet::ModelParams& params,
                            const std::vector<PreparedTracklet>& data, bool use_kfid,
                            const std::optional<std::vector<int>>& train_labels) {
  if (data.empty()) throw Error("no tracklets");
  require_labels(data, "evaluation");
  RunReport report;
  report.kfid_enabled = use_kfid;
  report.train_labels_known = train_labels.has_value();
  report.rows.resize(data.size());
  parallel_for(data.size(), cfg.threads, [&](std::size_t i) {
    const PreparedTracklet& t = data[i];
    const std::vector<int> keyframes = use_kfid ? t.keyframes.keyframe_indices : std::vector<int>{};
    stnet::FrameSource source = [&t](int idx) -> const stnet::Tensor& {
      auto it = t.tensors.find(idx);
      if (it == t.tensors.end()) throw Error("internal: frame " + std::to_string(idx) + " of " + t.id + " not prepared");
      return it->second;
    };
    const auto pred = stnet::predict_frames(keyframes, t.frame_count, source, params, net, cfg.sampler);
    PredictionRow& row = report.rows[i];
    row.tracklet_id = t.id;
    row.pred = pred.label.number();
    row.gt = t.label->number();
    row.correct = row.pred == row.gt;
    row.fallback = use_kfid && pred.fallback;
    if (train_labels)
      row.unseen = !std::binary_search(train_labels->begin(), train_labels->end(), row.gt);
  });
  for (const auto& t : data) {
    KeyframeStats s = t.stats;
    if (!use_kfid) s.keyframes = s.frames;
    report.keyframes.add(s);
  }
  return report;
}

std::optional<std::vector<int>> training_labels(const RunConfig& cfg, const fs::path& data) {
  const fs::path gt = data / cfg.train_split / "gt.csv";
  if (!fs::exists(gt)) return std::nullopt;
  std::vector<int> labels;
  for (const auto& [id, label] : read_gt_csv(gt)) labels.push_back(label.number());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

void cmd_synth(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  if (out.empty()) throw Error("synth: --out is required");
  const SynthMetadata md = generate(cfg.synth, out);
  std::map<std::string, int> per_split;
  long long frames = 0, visible = 0;
  for (std::size_t i = 0; i < md.tracklets.size(); ++i) {
    ++per_split[md.tracklets[i].split];
    for (const auto& f : md.frames[i]) {
      ++frames;
      visible += f.visible ? 1 : 0;
    }
  }
  log << "synth: " << md.tracklets.size() << " tracklets (train " << per_split["train"] << ", val "
      << per_split["val"] << ", test " << per_split["test"] << "), " << frames << " frames, " << visible
      << " with a readable number; seed " << cfg.synth.seed << '\n';
}

KeyframeStats cmd_kfid(const RunConfig& cfg, const fs::path& data, const fs::path& out, std::ostream& log) {
  if (out.empty()) throw Error("kfid: --out is required");
  // Every split directory present, or the data directory itself.
  std::vector<fs::path> roots;
  for (const char* split : {"train", "val", "test"})
    if (fs::is_directory(data / split)) roots.push_back(data / split);
  if (roots.empty()) roots.push_back(data);

  const fs::path kf_dir = out / "keyframes";
  ensure_dir(kf_dir);
  KeyframeStats total;
  PrepareOptions opts;
  opts.tensors = false;
  for (const auto& root : roots) {
    const SplitIndex idx = index_split(root);
    const auto prepared = prepare_split(cfg, idx, opts);
    for (const auto& t : prepared) {
      std::ostringstream o;
      o << std::setprecision(17) << "tracklet_id,frame_index,x1,y1,x2,y2\n";
      for (const auto& d : t.keyframes.kept_detections)
        o << t.id << ',' << d.frame_index << ',' << d.box.x1 << ',' << d.box.y1 << ',' << d.box.x2 << ',' << d.box.y2
          << '\n';
      write_text(kf_dir / (t.id + ".csv"), o.str());
      total.add(t.stats);
    }
  }
  const std::string stats = format_kfid_stats(total);
  write_text(out / "kfid_stats.txt", stats);
  log << stats;
  return total;
}

TrainSummary cmd_train(const RunConfig& cfg, const fs::path& data, const fs::path& checkpoint,
                       const fs::path& metrics, std::ostream& log) {
  if (checkpoint.empty()) throw Error("train: --checkpoint is required");
  const fs::path root = resolve_split(data, cfg.train_split);
  const SplitIndex idx = index_split(root);
  if (idx.tracklets.empty()) throw Error("train: no tracklets in " + root.string());

  std::ostringstream notes;
  notes << "train: " << idx.tracklets.size() << " tracklets from " << root.string() << '\n' << seed_line(cfg) << '\n';
  if (!cfg.kfid_enabled) notes << "kfid disabled: keyframe stage bypassed, sampling from all frames\n";

  PrepareOptions opts;
  opts.run_kfid = cfg.kfid_enabled;
  const auto prepared = prepare_split(cfg, idx, opts);
  TrainSummary summary;
  summary.tracklets = static_cast<int>(prepared.size());
  for (const auto& t : prepared) {
    if (!t.falls_back(cfg.kfid_enabled)) continue;
    ++summary.fallback_tracklets;
    notes << "fallback: " << t.id << " has no keyframes, sampling from all frames\n";
  }
  log << notes.str();

  const fs::path metrics_path = metrics.empty() ? fs::path(checkpoint.string() + ".metrics.csv") : metrics;
  ensure_dir(checkpoint.parent_path());
  ensure_dir(metrics_path.parent_path());
  std::ofstream mout(metrics_path, std::ios::trunc);
  if (!mout) throw Error("cannot write " + metrics_path.string());
  mout << "iteration,loss,lr\n" << std::setprecision(17);
  const int report_every = std::max(1, cfg.net.iterations / 20);
  auto result = train_prepared(cfg, prepared, cfg.kfid_enabled, [&](int it, double loss, double lr) {
    mout << it << ',' << loss << ',' << lr << '\n';
    if ((it + 1) % report_every == 0 || it + 1 == cfg.net.iterations)
      log << "iteration " << (it + 1) << "/" << cfg.net.iterations << " loss " << loss << " lr " << lr << '\n';
  });
  mout.flush();
  if (!mout) throw Error("error writing " + metrics_path.string());
  stnet::save_checkpoint(checkpoint, cfg.net, result.params);
  write_text(checkpoint.string() + ".log", notes.str());
  summary.losses = std::move(result.losses);
  return summary;
}

RunReport cmd_eval(const RunConfig& cfg, const fs::path& data, const fs::path& checkpoint, const fs::path& out,
                   std::ostream& log) {
  if (checkpoint.empty()) throw Error("eval: --checkpoint is required");
  const stnet::Checkpoint ck = stnet::load_checkpoint(checkpoint);
  for (const char* key : {"net.input_height", "net.input_width", "net.feature_dim", "net.hidden"}) {
    if (cfg.explicit_keys.count(key) && !cfg.net.same_architecture(ck.config))
      throw Error("checkpoint/config shape mismatch (" + std::string(key) + ")");
  }
  RunConfig run = cfg;
  run.net = ck.config;

  const fs::path root = resolve_split(data, cfg.eval_split);
  const SplitIndex idx = index_split(root);
  if (idx.tracklets.empty()) throw Error("no tracklets");
  PrepareOptions opts;
  opts.run_kfid = cfg.kfid_enabled;
  const auto prepared = prepare_split(run, idx, opts);
  RunReport report = evaluate_prepared(run, ck.config, ck.params, prepared, cfg.kfid_enabled, training_labels(cfg, data));

  const fs::path dir = out.empty() ? checkpoint.parent_path() : out;
  ensure_dir(dir);
  write_predictions_csv(dir / "predictions.csv", report);
  const std::string text = format_report(report);
  write_text(dir / "report.txt", text);
  log << "eval: accuracy " << std::fixed << std::setprecision(4) << report.accuracy() << " over " << report.rows.size()
      << " tracklets";
  if (auto u = report.unseen_accuracy()) log << ", unseen-label accuracy " << *u;
  log << ", fallback " << report.fallback_count() << '\n';
  log.unsetf(std::ios::floatfield);
  return report;
}

std::string format_ablation(const AblationResult& r) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(4);
  o << "                    kfid_on   kfid_off\n";
  o << "accuracy            " << std::setw(7) << r.on.accuracy() << "   " << std::setw(7) << r.off.accuracy() << '\n';
  const auto uon = r.on.unseen_accuracy();
  const auto uoff = r.off.unseen_accuracy();
  if (uon && uoff)
    o << "unseen_accuracy     " << std::setw(7) << *uon << "   " << std::setw(7) << *uoff << '\n';
  o << "fallback_tracklets  " << std::setw(7) << r.on.fallback_count() << "   " << std::setw(7)
    << r.off.fallback_count() << '\n';
  o << std::setprecision(2) << "delta_points        " << r.delta_points() << '\n';
  o << "sampler_seed        " << r.sampler_seed << '\n' << "net_seed            " << r.net_seed << '\n';
  return o.str();
}

AblationResult cmd_ablate(const RunConfig& cfg, const fs::path& data, const fs::path& out, std::ostream& log) {
  if (out.empty()) throw Error("ablate: --out is required");
  const SplitIndex train_idx = index_split(resolve_split(data, cfg.train_split));
  const SplitIndex eval_idx = index_split(resolve_split(data, cfg.eval_split));
  if (train_idx.tracklets.empty()) throw Error("ablate: empty training split");
  if (eval_idx.tracklets.empty()) throw Error("no tracklets");

  // One preparation serves both arms: KfID output plus every frame's tensor.
  PrepareOptions opts;
  opts.run_kfid = true;
  opts.tensors_for_all_frames = true;
  const auto train_data = prepare_split(cfg, train_idx, opts);
  const auto eval_data = prepare_split(cfg, eval_idx, opts);
  const auto labels = training_labels(cfg, data);

  AblationResult result;
  result.sampler_seed = cfg.sampler.seed;
  result.net_seed = cfg.net.seed;
  log << seed_line(cfg) << '\n';
  for (bool use_kfid : {true, false}) {
    const fs::path dir = out / (use_kfid ? "on" : "off");
    ensure_dir(dir);
    log << "ablate: training with kfid " << (use_kfid ? "on" : "off") << '\n';
    std::ofstream mout(dir / "metrics.csv", std::ios::trunc);
    mout << "iteration,loss,lr\n" << std::setprecision(17);
    const int report_every = std::max(1, cfg.net.iterations / 10);
    const auto trained = train_prepared(cfg, train_data, use_kfid, [&](int it, double loss, double lr) {
      mout << it << ',' << loss << ',' << lr << '\n';
      if ((it + 1) % report_every == 0) log << "  iteration " << (it + 1) << " loss " << loss << '\n';
    });
    if (!mout.flush()) throw Error("error writing " + (dir / "metrics.csv").string());
    stnet::save_checkpoint(dir / "checkpoint.bin", cfg.net, trained.params);
    RunReport report = evaluate_prepared(cfg, cfg.net, trained.params, eval_data, use_kfid, labels);
    write_predictions_csv(dir / "predictions.csv", report);
    write_text(dir / "report.txt", format_report(report));
    (use_kfid ? result.on : result.off) = std::move(report);
  }
  const std::string text = format_ablation(result);
  write_text(out / "ablation.txt", text);
  log << text;
  return result;
}

}  // namespace jnr
