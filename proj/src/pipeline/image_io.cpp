#include "jnr/pipeline/image_io.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace jnr {
namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in, const std::filesystem::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(path.string() + ": truncated PPM header");
  return tok;
}

int header_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = header_token(in, path);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(path.string() + ": bad PPM header value '" + tok + "'");
  }
}

}  // namespace

Frame read_ppm(const std::filesystem::path& path, int frame_index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (header_token(in, path) != "P6") throw Error(path.string() + ": not a binary PPM (P6)");
  const int width = header_int(in, path);
  const int height = header_int(in, path);
  const int maxval = header_int(in, path);
  if (maxval != 255) throw Error(path.string() + ": only 8-bit PPM is supported");
  // header_token consumed exactly one whitespace byte after maxval.
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height * 3);
  if (!in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size())))
    throw Error(path.string() + ": truncated pixel data");
  return Frame(frame_index, width, height, std::move(pixels));
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels().data()), static_cast<std::streamsize>(frame.pixels().size()));
  if (!out) throw Error("error writing " + path.string());
}

}  // namespace jnr
