#include "gapflyt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gapflyt/error.hpp"

namespace gapflyt {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path);
  return f;
}

}  // namespace

void write_pgm(const std::string& path, const Image& img) {
  std::ofstream f = open_out(path);
  f << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<std::size_t>(img.size()));
  for (Eigen::Index k = 0; k < img.size(); ++k) {
    const double v = std::isfinite(img(k)) ? std::clamp(img(k), 0.0, 1.0) : 0.0;
    bytes[static_cast<std::size_t>(k)] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::Io, "failed writing " + path);
}

Image read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string magic;
  int w = 0;
  int h = 0;
  int maxval = 0;
  f >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw Error(ErrorCode::Io, "not an 8-bit P5 file: " + path);
  f.get();
  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::Io, "truncated PGM " + path);
  Image img(h, w);
  for (Eigen::Index k = 0; k < img.size(); ++k) img(k) = bytes[static_cast<std::size_t>(k)] / 255.0;
  return img;
}

Image normalized(const Grid<double>& field) {
  const double peak = field.isFinite().select(field, 0.0).maxCoeff();
  if (!(peak > 0.0)) return Image::Zero(field.rows(), field.cols());
  return field.isFinite().select(field / peak, 0.0);
}

Image to_image(const Mask& mask) { return mask.select(Image::Ones(mask.rows(), mask.cols()), 0.0); }

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvRow& header, const std::vector<CsvRow>& rows) {
  std::ofstream f = open_out(path);
  const auto line = [&f](const CsvRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
    f << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!f) throw Error(ErrorCode::Io, "failed writing " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f = open_out(path);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "failed writing " + path);
}

}  // namespace gapflyt
