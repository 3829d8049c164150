#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace se2fm::cli {

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, machine-readable errors to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Hex SHA-256 of a file's contents.
std::string sha256_file(const std::string& path);

/// Reads an 8-bit PGM (P5 binary or P2 ASCII); pixels row-major, top row
/// first.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;
};
GrayImage read_pgm(const std::string& path);

/// ((v + 1) / 256)^gamma clamped to [1e-3, 1].
double pixel_cost(unsigned char v, double gamma);

}  // namespace se2fm::cli
