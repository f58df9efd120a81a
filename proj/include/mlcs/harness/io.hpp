#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlcs/core/types.hpp"

namespace mlcs {

struct GrayImage {
  Index width = 0;
  Index height = 0;
  unsigned maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major

  std::vector<double> as_double() const;
};

// Binary PGM (P5), maxval up to 65535; 16-bit samples are big-endian.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

// Binary PBM (P4), 1 = black, rows padded to whole bytes.
void write_pbm(const std::filesystem::path& path, Index width, Index height, const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> read_pbm(const std::filesystem::path& path, Index& width, Index& height);

struct Rescale {
  double source_max = 0.0;
  unsigned maxval = 255;
};

// Values clamped to [0, max] and mapped linearly onto 0..maxval. Writes a
// sidecar <path>.json holding the mapping.
Rescale write_scaled_pgm(const std::filesystem::path& path, const std::vector<double>& values, Index width,
                         Index height, unsigned maxval = 255);

struct LogScale {
  double max = 0.0;
  double decades = 6.0;
  unsigned maxval = 255;
};

// pixel = round(maxval * (log10(v / max) + decades) / decades), clamped to
// 0..maxval; v <= 0 maps to 0. Matrix row i becomes image row i. Writes the
// same <path>.json sidecar as write_scaled_pgm.
LogScale write_log_heatmap(const std::filesystem::path& path, const Eigen::MatrixXd& values, double decades = 6.0,
                           unsigned maxval = 255);
LogScale write_magnitude_heatmap(const std::filesystem::path& path, const Eigen::MatrixXcd& m, double decades = 6.0,
                                 unsigned maxval = 255);

// Average over 2×2 blocks.
GrayImage downsample2(const GrayImage& img);
// Repeated downsample2 until the side equals target (a power of two divisor).
GrayImage resize_to(const GrayImage& img, Index target);

// Layout: 8 bytes "MLCSCM01", uint64 rows, uint64 cols (little-endian),
// then rows*cols (re, im) float64 pairs, row-major.
void write_complex_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_complex_matrix(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

struct RelativeError {
  double value = 0.0;
  bool reference_zero = false;  // value is ||x_hat|| instead of a ratio
};

RelativeError relative_error(std::span<const double> x, std::span<const double> x_hat);

}  // namespace mlcs
