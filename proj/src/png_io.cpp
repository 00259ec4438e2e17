#include <png.h>

#include <cstdio>
#include <memory>

#include <spdlog/spdlog.h>

#include "mapcore/error.hpp"
#include "mapcore/raster.hpp"

namespace mapcore {

namespace fs = std::filesystem;

namespace {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// Decodes any PNG into 8-bit grayscale. Low bit depths are expanded
// (1-bit set pixels become 255).
GrayImage read_gray_png(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kIo, "no such PNG: " + path.string());
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kFormat, path.string() + ": " + msg);
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kFormat, path.string() + ": " + msg);
  }
  return out;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

// Writes 8-bit or 1-bit grayscale rows. For 1-bit output `pixels` holds 0/1.
void write_gray_png(const fs::path& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels, int bit_depth) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "libpng initialisation failed");
  }
  std::vector<png_byte> row;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t row_bytes = bit_depth == 8 ? static_cast<std::size_t>(width)
                                               : (static_cast<std::size_t>(width) + 7) / 8;
  row.resize(row_bytes);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* src = pixels.data() + static_cast<std::size_t>(y) * width;
    if (bit_depth == 8) {
      std::copy_n(src, width, row.begin());
    } else {
      std::fill(row.begin(), row.end(), 0);
      for (int x = 0; x < width; ++x) {
        if (src[x]) row[x / 8] |= static_cast<png_byte>(0x80u >> (x % 8));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

bool known_train_id(std::uint8_t v) { return v <= 18 || v == kVoidLabel; }

}  // namespace

SemanticMap load_labels(const fs::path& path) {
  GrayImage img = read_gray_png(path);
  SemanticMap map{img.width, img.height, std::move(img.pixels)};
  std::size_t unknown = 0;
  for (auto& v : map.labels) {
    if (!known_train_id(v)) {
      v = kVoidLabel;
      ++unknown;
    }
  }
  if (unknown > 0) {
    spdlog::warn("{}: {} pixels carry unknown train IDs; treated as void", path.string(),
                 unknown);
  }
  return map;
}

void save_labels(const SemanticMap& map, const fs::path& path) {
  if (static_cast<std::size_t>(map.width) * map.height != map.labels.size()) {
    throw Error(ErrorCode::kDimension, "label map size does not match its dimensions");
  }
  write_gray_png(path, map.width, map.height, map.labels, 8);
}

BinaryMask load_mask(const fs::path& path) {
  GrayImage img = read_gray_png(path);
  BinaryMask mask(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] != 0 ? 1 : 0;
  return mask;
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  if (static_cast<std::size_t>(mask.width) * mask.height != mask.bits.size()) {
    throw Error(ErrorCode::kDimension, "mask size does not match its dimensions");
  }
  write_gray_png(path, mask.width, mask.height, mask.bits, 1);
}

}  // namespace mapcore
