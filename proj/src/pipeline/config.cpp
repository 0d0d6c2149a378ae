#include "jnr/pipeline/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace jnr {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument(v);
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw std::invalid_argument(v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

template <typename T, typename Field>
Setter num(Field field) {
  return [field](RunConfig& c, const std::string& v) { std::invoke(field, c) = parse_number<T>(v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"jnl.kind",
       [](RunConfig& c, const std::string& v) {
         if (v == "heuristic") c.jnl.kind = DetectorKind::kHeuristic;
         else if (v == "file") c.jnl.kind = DetectorKind::kFileBacked;
         else throw std::invalid_argument(v);
       }},
      {"jnl.min_confidence", num<double>([](RunConfig& c) -> auto& { return c.jnl.min_confidence; })},
      {"jnl.threshold", num<int>([](RunConfig& c) -> auto& { return c.jnl.threshold; })},
      {"jnl.background_radius", num<int>([](RunConfig& c) -> auto& { return c.jnl.background_radius; })},
      {"jnl.min_area", num<int>([](RunConfig& c) -> auto& { return c.jnl.min_area; })},
      {"jnl.max_area", num<int>([](RunConfig& c) -> auto& { return c.jnl.max_area; })},
      {"jnl.min_aspect", num<double>([](RunConfig& c) -> auto& { return c.jnl.min_aspect; })},
      {"jnl.max_aspect", num<double>([](RunConfig& c) -> auto& { return c.jnl.max_aspect; })},
      {"roi.left", num<double>([](RunConfig& c) -> auto& { return c.roi.left; })},
      {"roi.top", num<double>([](RunConfig& c) -> auto& { return c.roi.top; })},
      {"roi.right", num<double>([](RunConfig& c) -> auto& { return c.roi.right; })},
      {"roi.bottom", num<double>([](RunConfig& c) -> auto& { return c.roi.bottom; })},
      {"roi.threshold", num<double>([](RunConfig& c) -> auto& { return c.roi.threshold; })},
      {"roi.eps", num<double>([](RunConfig& c) -> auto& { return c.roi.eps; })},
      {"sc.bins", num<int>([](RunConfig& c) -> auto& { return c.sc.bins; })},
      {"sc.lhc_tau", num<double>([](RunConfig& c) -> auto& { return c.sc.lhc_tau; })},
      {"sc.lhc_gap", num<double>([](RunConfig& c) -> auto& { return c.sc.lhc_gap; })},
      {"sc.lhc_voff", num<double>([](RunConfig& c) -> auto& { return c.sc.lhc_voff; })},
      {"sc.ghc_tau", num<double>([](RunConfig& c) -> auto& { return c.sc.ghc_tau; })},
      {"sampler.length", num<int>([](RunConfig& c) -> auto& { return c.sampler.length; })},
      {"sampler.min_gap", num<int>([](RunConfig& c) -> auto& { return c.sampler.min_gap; })},
      {"sampler.seed", num<std::uint64_t>([](RunConfig& c) -> auto& { return c.sampler.seed; })},
      {"sampler.mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "random") c.sampler.mode = SampleMode::kRandom;
         else if (v == "even") c.sampler.mode = SampleMode::kEven;
         else throw std::invalid_argument(v);
       }},
      {"net.input_height", num<int>([](RunConfig& c) -> auto& { return c.net.input_height; })},
      {"net.input_width", num<int>([](RunConfig& c) -> auto& { return c.net.input_width; })},
      {"net.feature_dim", num<int>([](RunConfig& c) -> auto& { return c.net.feature_dim; })},
      {"net.hidden", num<int>([](RunConfig& c) -> auto& { return c.net.hidden; })},
      {"net.learning_rate", num<double>([](RunConfig& c) -> auto& { return c.net.learning_rate; })},
      {"net.batch_size", num<int>([](RunConfig& c) -> auto& { return c.net.batch_size; })},
      {"net.iterations", num<int>([](RunConfig& c) -> auto& { return c.net.iterations; })},
      {"net.lr_decay_every", num<int>([](RunConfig& c) -> auto& { return c.net.lr_decay_every; })},
      {"net.lr_decay_until", num<int>([](RunConfig& c) -> auto& { return c.net.lr_decay_until; })},
      {"net.lr_decay_factor", num<double>([](RunConfig& c) -> auto& { return c.net.lr_decay_factor; })},
      {"net.weight_decay", num<double>([](RunConfig& c) -> auto& { return c.net.weight_decay; })},
      {"net.seed", num<std::uint64_t>([](RunConfig& c) -> auto& { return c.net.seed; })},
      {"kfid.enabled", [](RunConfig& c, const std::string& v) { c.kfid_enabled = parse_bool(v); }},
      {"run.threads", num<int>([](RunConfig& c) -> auto& { return c.threads; })},
      {"train.split", [](RunConfig& c, const std::string& v) { c.train_split = v; }},
      {"eval.split", [](RunConfig& c, const std::string& v) { c.eval_split = v; }},
      {"synth.tracklets", num<int>([](RunConfig& c) -> auto& { return c.synth.tracklets; })},
      {"synth.frames_min", num<int>([](RunConfig& c) -> auto& { return c.synth.frames_min; })},
      {"synth.frames_max", num<int>([](RunConfig& c) -> auto& { return c.synth.frames_max; })},
      {"synth.width", num<int>([](RunConfig& c) -> auto& { return c.synth.width; })},
      {"synth.height", num<int>([](RunConfig& c) -> auto& { return c.synth.height; })},
      {"synth.target_hue", num<double>([](RunConfig& c) -> auto& { return c.synth.target_hue; })},
      {"synth.opposition_hue", num<double>([](RunConfig& c) -> auto& { return c.synth.opposition_hue; })},
      {"synth.visibility", num<double>([](RunConfig& c) -> auto& { return c.synth.visibility; })},
      {"synth.distractor_prob", num<double>([](RunConfig& c) -> auto& { return c.synth.distractor_prob; })},
      {"synth.blur_min", num<int>([](RunConfig& c) -> auto& { return c.synth.blur_min; })},
      {"synth.blur_max", num<int>([](RunConfig& c) -> auto& { return c.synth.blur_max; })},
      {"synth.occluder_prob", num<double>([](RunConfig& c) -> auto& { return c.synth.occluder_prob; })},
      {"synth.occluder_min", num<double>([](RunConfig& c) -> auto& { return c.synth.occluder_min; })},
      {"synth.occluder_max", num<double>([](RunConfig& c) -> auto& { return c.synth.occluder_max; })},
      {"synth.glyph_scale_min", num<int>([](RunConfig& c) -> auto& { return c.synth.glyph_scale_min; })},
      {"synth.glyph_scale_max", num<int>([](RunConfig& c) -> auto& { return c.synth.glyph_scale_max; })},
      {"synth.seed", num<std::uint64_t>([](RunConfig& c) -> auto& { return c.synth.seed; })},
      {"synth.split_train", num<double>([](RunConfig& c) -> auto& { return c.synth.split_train; })},
      {"synth.split_val", num<double>([](RunConfig& c) -> auto& { return c.synth.split_val; })},
      {"synth.split_test", num<double>([](RunConfig& c) -> auto& { return c.synth.split_test; })},
      {"synth.holdout_fraction", num<double>([](RunConfig& c) -> auto& { return c.synth.holdout_fraction; })},
      {"synth.test_unseen_fraction",
       num<double>([](RunConfig& c) -> auto& { return c.synth.test_unseen_fraction; })},
      {"synth.none_label_prob", num<double>([](RunConfig& c) -> auto& { return c.synth.none_label_prob; })},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  jnl.validate();
  roi.validate();
  sc.validate();
  sampler.validate();
  net.validate();
  synth.validate();
  if (threads < 1) throw Error("run.threads must be >= 1");
  if (train_split.empty() || eval_split.empty()) throw Error("split names must be non-empty");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(where + ": unknown key '" + key + "'");
    if (value.empty()) throw Error(where + ": missing value for '" + key + "'");
    if (!cfg.explicit_keys.insert(key).second) throw Error(where + ": duplicate key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument&) {
      throw Error(where + ": bad value '" + value + "' for '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw Error(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

RunConfig load_config_or_default(const std::filesystem::path& path) {
  return path.empty() ? parse_config("", "<defaults>") : load_config(path);
}

void override_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.sampler.seed = seed;
  cfg.net.seed = seed;
  cfg.synth.seed = seed;
}

}  // namespace jnr
