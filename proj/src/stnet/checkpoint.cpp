#include "jnr/stnet/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "jnr/core_types.hpp"

namespace jnr::stnet {
namespace {

constexpr char kMagic[8] = {'J', 'N', 'R', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error("checkpoint truncated reading " + what);
  return v;
}

std::string get_string(std::istream& in, std::uint32_t len, const std::string& what) {
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw Error("checkpoint truncated reading " + what);
  return s;
}

}  // namespace

std::string net_config_text(const NetConfig& cfg) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "net.input_height = " << cfg.input_height << '\n'
    << "net.input_width = " << cfg.input_width << '\n'
    << "net.feature_dim = " << cfg.feature_dim << '\n'
    << "net.hidden = " << cfg.hidden << '\n'
    << "net.learning_rate = " << cfg.learning_rate << '\n'
    << "net.batch_size = " << cfg.batch_size << '\n'
    << "net.iterations = " << cfg.iterations << '\n'
    << "net.lr_decay_every = " << cfg.lr_decay_every << '\n'
    << "net.lr_decay_until = " << cfg.lr_decay_until << '\n'
    << "net.lr_decay_factor = " << cfg.lr_decay_factor << '\n'
    << "net.weight_decay = " << cfg.weight_decay << '\n'
    << "net.seed = " << cfg.seed << '\n';
  return o.str();
}

NetConfig parse_net_config_text(const std::string& text) {
  NetConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) throw Error("checkpoint config: bad line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 3);
    std::istringstream v(val);
    bool ok = true;
    if (key == "net.input_height") ok = static_cast<bool>(v >> cfg.input_height);
    else if (key == "net.input_width") ok = static_cast<bool>(v >> cfg.input_width);
    else if (key == "net.feature_dim") ok = static_cast<bool>(v >> cfg.feature_dim);
    else if (key == "net.hidden") ok = static_cast<bool>(v >> cfg.hidden);
    else if (key == "net.learning_rate") ok = static_cast<bool>(v >> cfg.learning_rate);
    else if (key == "net.batch_size") ok = static_cast<bool>(v >> cfg.batch_size);
    else if (key == "net.iterations") ok = static_cast<bool>(v >> cfg.iterations);
    else if (key == "net.lr_decay_every") ok = static_cast<bool>(v >> cfg.lr_decay_every);
    else if (key == "net.lr_decay_until") ok = static_cast<bool>(v >> cfg.lr_decay_until);
    else if (key == "net.lr_decay_factor") ok = static_cast<bool>(v >> cfg.lr_decay_factor);
    else if (key == "net.weight_decay") ok = static_cast<bool>(v >> cfg.weight_decay);
    else if (key == "net.seed") ok = static_cast<bool>(v >> cfg.seed);
    else throw Error("checkpoint config: unknown key " + key);
    if (!ok) throw Error("checkpoint config: bad value for " + key);
  }
  cfg.validate();
  return cfg;
}

void save_checkpoint(const std::filesystem::path& path, const NetConfig& cfg, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  const std::string text = net_config_text(cfg);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto tensors = params.tensors();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t->shape.size()));
    for (auto d : t->shape) put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    out.write(reinterpret_cast<const char*>(t->data.data()), static_cast<std::streamsize>(t->data.size() * 8));
  }
  if (!out) throw Error("error writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw Error(path.string() + ": not a checkpoint");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) throw Error(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  const auto text_len = get<std::uint32_t>(in, "config length");
  Checkpoint ck{parse_net_config_text(get_string(in, text_len, "config")), {}};
  ck.params = ModelParams::zeros(ck.config);
  auto tensors = ck.params.tensors();
  const auto count = get<std::uint32_t>(in, "tensor count");
  if (count != tensors.size()) throw Error(path.string() + ": checkpoint/config shape mismatch (tensor count)");
  for (auto& [name, t] : tensors) {
    const auto name_len = get<std::uint32_t>(in, "tensor name length");
    const std::string stored = get_string(in, name_len, "tensor name");
    if (stored != name) throw Error(path.string() + ": expected tensor " + name + ", found " + stored);
    const auto ndim = get<std::uint32_t>(in, "ndim");
    std::vector<std::size_t> shape;
    for (std::uint32_t k = 0; k < ndim; ++k) shape.push_back(static_cast<std::size_t>(get<std::uint64_t>(in, "dim")));
    if (shape != t->shape) throw Error(path.string() + ": checkpoint/config shape mismatch for " + name);
    if (!in.read(reinterpret_cast<char*>(t->data.data()), static_cast<std::streamsize>(t->data.size() * 8)))
      throw Error("checkpoint truncated reading " + name);
  }
  return ck;
}

}  // namespace jnr::stnet
