#include "mgi/image_io.hpp"

#include <cmath>
#include <fstream>

namespace mgi {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw IoError("read_pgm: malformed header in " + path);
    return value;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_pgm: cannot open " + path);
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P5") throw IoError("read_pgm: not a binary PGM: " + path);

    const int width = next_header_int(in, path);
    const int height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (width < 1 || height < 1 || maxval < 1 || maxval > 255)
        throw IoError("read_pgm: unsupported dimensions or maxval in " + path);
    in.get();  // single whitespace after maxval

    std::vector<unsigned char> raw(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("read_pgm: truncated pixel data in " + path);

    PgmImage img;
    img.grid = {width, height};
    img.values.resize(img.grid.size());
    for (Index i = 0; i < img.values.size(); ++i)
        img.values(i) = static_cast<double>(raw[i]) / maxval;
    return img;
}

void write_pgm(const std::string& path, const GridShape& grid, const Vector& values) {
    if (values.size() != grid.size())
        throw InvalidInputError("write_pgm: size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pgm: cannot open " + path);
    out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
    std::vector<unsigned char> raw(static_cast<size_t>(grid.size()));
    for (Index i = 0; i < values.size(); ++i) {
        const double v = std::clamp(values(i), 0.0, 1.0);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("write_pgm: write failed for " + path);
}

}  // namespace mgi
