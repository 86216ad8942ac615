#include "affordance/synthgen/png_writer.hpp"

#include <csetjmp>
#include <cstdio>
#include <memory>

#include <png.h>

#include "affordance/errors.hpp"

namespace affordance::synthgen {

void write_png(const std::filesystem::path& path, const cv::Mat& bgr, int compression_level) {
  if (bgr.empty() || bgr.type() != CV_8UC3) throw IoError("write_png expects an 8-bit 3-channel image");
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw IoError("cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed for " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(bgr.cols), static_cast<png_uint_32>(bgr.rows), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
  png_set_compression_level(png, compression_level);
  png_set_bgr(png);
  png_write_info(png, info);
  for (int r = 0; r < bgr.rows; ++r) png_write_row(png, const_cast<png_bytep>(bgr.ptr<png_byte>(r)));
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);

  if (std::fflush(file.get()) != 0) throw IoError("write failed for " + path.string());
}

}  // namespace affordance::synthgen
