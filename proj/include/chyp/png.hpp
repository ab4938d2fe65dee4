#pragma once

// PNG output of rasters through libpng.  Include only in targets linking PNG.

#include "chyp/limitset.hpp"

#include <png.h>

#include <cstdio>

namespace chyp {

/// 8-bit RGB, no ancillary chunks: identical rasters give identical bytes.
inline void write_png(const std::string& path, const Raster& r) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw detail::io_error("cannot open", path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("write_png: libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("write_png: libpng error writing '" + path + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, r.width, r.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int row = 0; row < r.height; ++row)
    png_write_row(png, const_cast<png_bytep>(&r.rgb[static_cast<size_t>(row) * r.width * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw detail::io_error("cannot write", path);
}

inline void write_cloud_png(const std::string& path, const OrbitCloud& cloud) { write_png(path, rasterize(cloud)); }

}  // namespace chyp
