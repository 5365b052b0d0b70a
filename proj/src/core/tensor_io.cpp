#include "core/tensor_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/error.hpp"

namespace dslr::io {

namespace {

constexpr const char* kMagic = "dslr-tensor";
constexpr std::int64_t kMaxElements = std::int64_t(1) << 32;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::Parse, "tensor file: " + what); }

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("truncated header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::istringstream keyed(std::istream& in, const std::string& key) {
  const std::string line = next_line(in);
  std::istringstream ss(line);
  std::string k;
  ss >> k;
  if (k != key) bad("expected '" + key + "', found '" + line + "'");
  return ss;
}

std::int64_t read_int(std::istringstream& ss, const std::string& key) {
  std::int64_t v = 0;
  if (!(ss >> v)) bad("malformed '" + key + "' line");
  return v;
}

void expect_end(std::istringstream& ss, const std::string& key) {
  std::string extra;
  if (ss >> extra) bad("trailing text on '" + key + "' line");
}

}  // namespace

int word_bits_for(int width) {
  if (width <= 16) return 16;
  if (width <= 32) return 32;
  return 64;
}

void write_tensor(std::ostream& out, const accel::Tensor& t) {
  t.check();
  const int bits = word_bits_for(t.width);
  out << kMagic << " 1\nshape";
  for (auto d : t.shape) out << ' ' << d;
  out << "\nwidth " << t.width << "\nfrac " << t.frac_bits << "\nword " << bits << "\ndata\n";
  const int bytes = bits / 8;
  std::string buf(t.data.size() * std::size_t(bytes), '\0');
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    const auto u = static_cast<std::uint64_t>(t.data[i]);
    for (int b = 0; b < bytes; ++b) buf[i * std::size_t(bytes) + std::size_t(b)] = char((u >> (8 * b)) & 0xff);
  }
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw Error(ErrorCode::Io, "tensor file: write failed");
}

accel::Tensor read_tensor(std::istream& in) {
  auto magic = keyed(in, kMagic);
  if (read_int(magic, kMagic) != 1) bad("unsupported version");

  accel::Tensor t;
  auto shape = keyed(in, "shape");
  std::int64_t d = 0, count = 1;
  while (shape >> d) {
    if (d < 1) bad("shape dimension < 1");
    count *= d;
    if (count > kMaxElements) bad("tensor too large");
    t.shape.push_back(d);
  }
  if (!shape.eof()) bad("malformed 'shape' line");
  if (t.shape.empty()) bad("empty shape");

  auto width = keyed(in, "width");
  t.width = int(read_int(width, "width"));
  expect_end(width, "width");
  if (t.width < 2 || t.width > 64) bad("width must lie in [2, 64]");

  // frac and word are optional; they default to a Q1.(width-1) fraction
  // and the narrowest word that holds width.
  t.frac_bits = t.width - 1;
  int word = word_bits_for(t.width);
  std::string line = next_line(in);
  while (line != "data") {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "frac") {
      t.frac_bits = int(read_int(ss, key));
      if (t.frac_bits < 0 || t.frac_bits > 126) bad("frac out of range");
    } else if (key == "word") {
      word = int(read_int(ss, key));
      if (word != 16 && word != 32 && word != 64) bad("word must be 16, 32 or 64");
      if (word < t.width) bad("word narrower than width");
    } else {
      bad("unexpected header line '" + line + "'");
    }
    expect_end(ss, key);
    line = next_line(in);
  }

  const int bytes = word / 8;
  std::string buf(std::size_t(count) * std::size_t(bytes), '\0');
  in.read(buf.data(), std::streamsize(buf.size()));
  if (in.gcount() != std::streamsize(buf.size())) bad("payload shorter than shape requires");
  if (in.peek() != std::char_traits<char>::eof()) bad("trailing bytes after payload");

  t.data.resize(std::size_t(count));
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < bytes; ++b) {
      u |= std::uint64_t(static_cast<unsigned char>(buf[i * std::size_t(bytes) + std::size_t(b)])) << (8 * b);
    }
    // Sign-extend from the word size.
    if (word < 64 && (u >> (word - 1)) & 1) u |= ~std::uint64_t(0) << word;
    t.data[i] = static_cast<std::int64_t>(u);
  }
  t.check();
  return t;
}

void save_tensor(const std::string& path, const accel::Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_tensor(out, t);
}

accel::Tensor load_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open tensor file '" + path + "'");
  return read_tensor(in);
}

}  // namespace dslr::io
