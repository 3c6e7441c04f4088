#pragma once

#include <string>
#include <vector>

#include "gapflyt/grid.hpp"

namespace gapflyt {

/// Binary P5, maxval 255; values in [0,1] are clamped and rounded.
void write_pgm(const std::string& path, const Image& img);
Image read_pgm(const std::string& path);

/// Scales a non-negative field so its maximum maps to 1.
Image normalized(const Grid<double>& field);
Image to_image(const Mask& mask);

/// printf "%.6g".
std::string format_number(double v);

using CsvRow = std::vector<std::string>;

/// Header plus rows, comma-separated, LF line endings.
void write_csv(const std::string& path, const CsvRow& header, const std::vector<CsvRow>& rows);

void write_text(const std::string& path, const std::string& text);

}  // namespace gapflyt
