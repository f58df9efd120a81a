#include "mlcs/harness/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mlcs {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  return out;
}

// Next header token, skipping whitespace and # comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw Error(Errc::IoError, "truncated netpbm header");
  return tok;
}

Index header_number(std::istream& in) {
  const std::string t = header_token(in);
  try {
    return static_cast<Index>(std::stoull(t));
  } catch (...) {
    throw Error(Errc::IoError, "bad netpbm header field " + t);
  }
}

void put_u64(std::ostream& os, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw Error(Errc::IoError, "truncated matrix file");
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | buf[b];
  return v;
}

}  // namespace

std::vector<double> GrayImage::as_double() const { return {pixels.begin(), pixels.end()}; }

GrayImage read_pgm(const fs::path& path) {
  auto in = open_in(path);
  if (header_token(in) != "P5") throw Error(Errc::IoError, path.string() + " is not a binary PGM");
  GrayImage img;
  img.width = header_number(in);
  img.height = header_number(in);
  const Index mv = header_number(in);
  if (mv == 0 || mv > 65535 || img.width == 0 || img.height == 0) throw Error(Errc::IoError, "bad PGM header");
  img.maxval = static_cast<unsigned>(mv);
  const Index n = img.width * img.height;
  img.pixels.resize(n);
  if (mv < 256) {
    std::vector<unsigned char> buf(n);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n)))
      throw Error(Errc::IoError, "truncated PGM data");
    std::copy(buf.begin(), buf.end(), img.pixels.begin());
  } else {
    std::vector<unsigned char> buf(2 * n);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n)))
      throw Error(Errc::IoError, "truncated PGM data");
    for (Index i = 0; i < n; ++i) img.pixels[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height) throw Error(Errc::DimensionMismatch, "PGM size");
  if (img.maxval == 0 || img.maxval > 65535) throw Error(Errc::InvalidParams, "PGM maxval");
  auto out = open_out(path);
  out << "P5\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";
  if (img.maxval < 256) {
    std::vector<char> buf(img.pixels.size());
    for (Index i = 0; i < buf.size(); ++i)
      buf[i] = static_cast<char>(std::min<unsigned>(img.pixels[i], img.maxval));
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  } else {
    std::vector<char> buf(2 * img.pixels.size());
    for (Index i = 0; i < img.pixels.size(); ++i) {
      const unsigned v = std::min<unsigned>(img.pixels[i], img.maxval);
      buf[2 * i] = static_cast<char>(v >> 8);
      buf[2 * i + 1] = static_cast<char>(v & 0xff);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error(Errc::IoError, "write failed " + path.string());
}

void write_pbm(const fs::path& path, Index width, Index height, const std::vector<std::uint8_t>& bits) {
  if (bits.size() != width * height) throw Error(Errc::DimensionMismatch, "PBM size");
  auto out = open_out(path);
  out << "P4\n" << width << " " << height << "\n";
  const Index stride = (width + 7) / 8;
  std::vector<char> row(stride);
  for (Index r = 0; r < height; ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (Index c = 0; c < width; ++c)
      if (bits[r * width + c]) row[c / 8] = static_cast<char>(row[c / 8] | (0x80 >> (c % 8)));
    out.write(row.data(), static_cast<std::streamsize>(stride));
  }
  if (!out) throw Error(Errc::IoError, "write failed " + path.string());
}

std::vector<std::uint8_t> read_pbm(const fs::path& path, Index& width, Index& height) {
  auto in = open_in(path);
  if (header_token(in) != "P4") throw Error(Errc::IoError, path.string() + " is not a binary PBM");
  width = header_number(in);
  height = header_number(in);
  const Index stride = (width + 7) / 8;
  std::vector<unsigned char> row(stride);
  std::vector<std::uint8_t> bits(width * height);
  for (Index r = 0; r < height; ++r) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride)))
      throw Error(Errc::IoError, "truncated PBM data");
    for (Index c = 0; c < width; ++c) bits[r * width + c] = (row[c / 8] >> (7 - c % 8)) & 1;
  }
  return bits;
}

Rescale write_scaled_pgm(const fs::path& path, const std::vector<double>& values, Index width, Index height,
                         unsigned maxval) {
  if (values.size() != width * height) throw Error(Errc::DimensionMismatch, "image size");
  Rescale rs;
  rs.maxval = maxval;
  for (double v : values) rs.source_max = std::max(rs.source_max, v);
  GrayImage img;
  img.width = width;
  img.height = height;
  img.maxval = maxval;
  img.pixels.resize(values.size());
  const double scale = rs.source_max > 0 ? maxval / rs.source_max : 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values[i], 0.0, rs.source_max) * scale;
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(v));
  }
  write_pgm(path, img);
  nlohmann::json side = {{"schema_version", 1},
                         {"image", path.filename().string()},
                         {"source_max", rs.source_max},
                         {"maxval", maxval},
                         {"mapping", "pixel = round(clamp(v, 0, source_max) * maxval / source_max)"}};
  write_json_file(fs::path(path.string() + ".json"), side);
  return rs;
}

LogScale write_log_heatmap(const fs::path& path, const Eigen::MatrixXd& values, double decades, unsigned maxval) {
  if (!(decades > 0) || maxval == 0 || maxval > 65535) throw Error(Errc::InvalidParams, "heatmap scaling");
  LogScale ls;
  ls.decades = decades;
  ls.maxval = maxval;
  ls.max = values.size() ? std::max(values.maxCoeff(), 0.0) : 0.0;
  GrayImage img;
  img.width = values.cols();
  img.height = values.rows();
  img.maxval = maxval;
  img.pixels.assign(values.size(), 0);
  if (ls.max > 0) {
    for (Eigen::Index r = 0; r < values.rows(); ++r)
      for (Eigen::Index c = 0; c < values.cols(); ++c) {
        const double v = values(r, c);
        if (!(v > 0)) continue;
        const double t = std::clamp((std::log10(v / ls.max) + decades) / decades, 0.0, 1.0);
        img.pixels[r * values.cols() + c] = static_cast<std::uint16_t>(std::lround(t * maxval));
      }
  }
  write_pgm(path, img);
  nlohmann::json side = {{"schema_version", 1},
                         {"image", path.filename().string()},
                         {"source_max", ls.max},
                         {"decades", decades},
                         {"maxval", maxval},
                         {"mapping", "pixel = round(clamp((log10(v / source_max) + decades) / decades, 0, 1) * maxval), "
                                     "v <= 0 -> 0"}};
  write_json_file(fs::path(path.string() + ".json"), side);
  return ls;
}

LogScale write_magnitude_heatmap(const fs::path& path, const Eigen::MatrixXcd& m, double decades, unsigned maxval) {
  return write_log_heatmap(path, m.cwiseAbs(), decades, maxval);
}

GrayImage downsample2(const GrayImage& img) {
  if (img.width % 2 || img.height % 2) throw Error(Errc::InvalidParams, "odd image size");
  GrayImage out;
  out.width = img.width / 2;
  out.height = img.height / 2;
  out.maxval = img.maxval;
  out.pixels.resize(out.width * out.height);
  for (Index r = 0; r < out.height; ++r)
    for (Index c = 0; c < out.width; ++c) {
      const Index i = 2 * r * img.width + 2 * c;
      const unsigned s = img.pixels[i] + img.pixels[i + 1] + img.pixels[i + img.width] + img.pixels[i + img.width + 1];
      out.pixels[r * out.width + c] = static_cast<std::uint16_t>((s + 2) / 4);
    }
  return out;
}

GrayImage resize_to(const GrayImage& img, Index target) {
  if (img.width != img.height) throw Error(Errc::InvalidParams, "image must be square");
  GrayImage cur = img;
  while (cur.width > target) cur = downsample2(cur);
  if (cur.width != target) throw Error(Errc::InvalidParams, "image side is not a power-of-two multiple of the target");
  return cur;
}

void write_complex_matrix(const fs::path& path, const Eigen::MatrixXcd& m) {
  auto out = open_out(path);
  out.write("MLCSCM01", 8);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_u64(out, std::bit_cast<std::uint64_t>(m(r, c).real()));
      put_u64(out, std::bit_cast<std::uint64_t>(m(r, c).imag()));
    }
  if (!out) throw Error(Errc::IoError, "write failed " + path.string());
}

Eigen::MatrixXcd read_complex_matrix(const fs::path& path) {
  auto in = open_in(path);
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "MLCSCM01", 8) != 0)
    throw Error(Errc::IoError, path.string() + " is not a complex matrix file");
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = std::bit_cast<double>(get_u64(in));
      const double im = std::bit_cast<double>(get_u64(in));
      m(r, c) = cplx(re, im);
    }
  return m;
}

nlohmann::json read_json_file(const fs::path& path) {
  auto in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

RelativeError relative_error(std::span<const double> x, std::span<const double> x_hat) {
  if (x.size() != x_hat.size()) throw Error(Errc::DimensionMismatch, "relative_error lengths differ");
  double num = 0.0, den = 0.0, nh = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_hat[i];
    num += d * d;
    den += x[i] * x[i];
    nh += x_hat[i] * x_hat[i];
  }
  if (den == 0.0) return {std::sqrt(nh), true};
  return {std::sqrt(num / den), false};
}

}  // namespace mlcs
