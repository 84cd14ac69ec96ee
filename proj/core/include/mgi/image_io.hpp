#ifndef MGI_IMAGE_IO_HPP
#define MGI_IMAGE_IO_HPP

#include <string>

#include "mgi/types.hpp"

namespace mgi {

// Grayscale image with values normalized to [0, 1].
struct PgmImage {
    GridShape grid;
    Vector values;
};

// Binary PGM (P5), 8-bit. Values are scaled by 255 and rounded on write,
// divided by maxval on read.
PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GridShape& grid, const Vector& values);

}  // namespace mgi

#endif
