// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/raster_io.hpp"

#include <tiffio.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

namespace wsf {

namespace {

// GeoTIFF and GDAL private tags. libtiff does not know them, so they are
// registered through a tag extender.
constexpr ttag_t kTagModelPixelScale = 33550;
constexpr ttag_t kTagModelTiepoint = 33922;
constexpr ttag_t kTagGeoKeyDirectory = 34735;
constexpr ttag_t kTagGdalNodata = 42113;

constexpr std::uint16_t kKeyModelType = 1024;
constexpr std::uint16_t kKeyRasterType = 1025;
constexpr std::uint16_t kKeyGeographicType = 2048;
constexpr std::uint16_t kRasterPixelIsPoint = 2;

const TIFFFieldInfo kGeoFieldInfo[] = {
    {kTagModelPixelScale, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelPixelScaleTag")},
    {kTagModelTiepoint, -1, -1, TIFF_DOUBLE, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("ModelTiepointTag")},
    {kTagGeoKeyDirectory, -1, -1, TIFF_SHORT, FIELD_CUSTOM, 1, 1,
     const_cast<char*>("GeoKeyDirectoryTag")},
    {kTagGdalNodata, -1, -1, TIFF_ASCII, FIELD_CUSTOM, 1, 0,
     const_cast<char*>("GDALNoDataValue")},
};

TIFFExtendProc g_parent_extender = nullptr;

void geo_tag_extender(TIFF* tif) {
  TIFFMergeFieldInfo(tif, kGeoFieldInfo, sizeof(kGeoFieldInfo) / sizeof(kGeoFieldInfo[0]));
  if (g_parent_extender != nullptr) {
    g_parent_extender(tif);
  }
}

void register_geo_tags() {
  static std::once_flag once;
  std::call_once(once, [] {
    g_parent_extender = TIFFSetTagExtender(geo_tag_extender);
    // Keep libtiff quiet; failures surface through return codes.
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
  });
}

struct TiffCloser {
  void operator()(TIFF* tif) const {
    if (tif != nullptr) {
      TIFFClose(tif);
    }
  }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

bool is_ascii_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".asc";
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Converts values for the requested encoding; validates the contract.
std::vector<double> encode_values(const Grid& grid, Encoding encoding,
                                  std::optional<double>& nodata_out) {
  std::vector<double> out(grid.size());
  nodata_out = std::nullopt;
  switch (encoding) {
    case Encoding::kBinaryMask:
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid[i];
        if (grid.is_nodata(i) || (v != 0.0 && v != 1.0)) {
          throw ContractError("binary-mask encoding requires a grid of {0, 1} values");
        }
        out[i] = v == 1.0 ? 255.0 : 0.0;
      }
      break;
    case Encoding::kPercent:
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.is_nodata(i)) {
          out[i] = 255.0;
          nodata_out = 255.0;
          continue;
        }
        const double v = grid[i];
        if (!(v >= 0.0 && v <= 100.0)) {
          throw ContractError("percent encoding requires values in [0, 100]");
        }
        out[i] = std::round(v);
      }
      break;
    case Encoding::kFloat:
      validate_grid(grid);
      out.assign(grid.values().begin(), grid.values().end());
      nodata_out = grid.nodata();
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

Grid read_ascii(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  int ncols = -1;
  int nrows = -1;
  double xll = 0.0;
  double yll = 0.0;
  bool center = false;
  double dx = -1.0;
  double dy = -1.0;
  std::optional<double> nodata;

  std::string key;
  std::streampos values_start = in.tellg();
  while (in >> key) {
    std::string lower = key;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!lower.empty() && (std::isdigit(static_cast<unsigned char>(lower[0])) || lower[0] == '-' ||
                           lower[0] == '+' || lower[0] == '.')) {
      break;
    }
    double value = 0.0;
    if (!(in >> value)) {
      throw FormatError(path.string() + ": malformed header entry '" + key + "'");
    }
    if (lower == "ncols") {
      ncols = static_cast<int>(value);
    } else if (lower == "nrows") {
      nrows = static_cast<int>(value);
    } else if (lower == "xllcorner") {
      xll = value;
    } else if (lower == "yllcorner") {
      yll = value;
    } else if (lower == "xllcenter") {
      xll = value;
      center = true;
    } else if (lower == "yllcenter") {
      yll = value;
      center = true;
    } else if (lower == "cellsize") {
      dx = dy = value;
    } else if (lower == "dx") {
      dx = value;
    } else if (lower == "dy") {
      dy = value;
    } else if (lower == "nodata_value") {
      nodata = value;
    } else {
      throw FormatError(path.string() + ": unknown header key '" + key + "'");
    }
    values_start = in.tellg();
  }
  if (ncols <= 0 || nrows <= 0 || dx <= 0.0 || dy <= 0.0) {
    throw FormatError(path.string() + ": incomplete ASCII grid header");
  }
  if (center) {
    xll -= dx / 2.0;
    yll -= dy / 2.0;
  }
  in.clear();
  in.seekg(values_start);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(ncols) * nrows);
  std::string token;
  while (in >> token) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw FormatError(path.string() + ": bad sample '" + token + "'");
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(ncols) * nrows) {
    throw FormatError(path.string() + ": expected " + std::to_string(ncols * nrows) +
                      " samples, found " + std::to_string(values.size()));
  }
  GeoTransform t{xll, yll + nrows * dy, dx, dy};
  Grid grid(ncols, nrows, t, std::move(values), nodata);
  validate_grid(grid);
  return grid;
}

void write_ascii(const std::vector<double>& values, const Grid& grid,
                 const std::optional<double>& nodata, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  const GeoTransform& t = grid.transform();
  out << "ncols " << grid.width() << "\n";
  out << "nrows " << grid.height() << "\n";
  out << "xllcorner " << format_double(t.origin_lon) << "\n";
  out << "yllcorner " << format_double(t.origin_lat - grid.height() * t.pixel_height) << "\n";
  if (t.pixel_width == t.pixel_height) {
    out << "cellsize " << format_double(t.pixel_width) << "\n";
  } else {
    out << "dx " << format_double(t.pixel_width) << "\n";
    out << "dy " << format_double(t.pixel_height) << "\n";
  }
  if (nodata) {
    out << "NODATA_value " << format_double(*nodata) << "\n";
  }
  for (int row = 0; row < grid.height(); ++row) {
    for (int col = 0; col < grid.width(); ++col) {
      if (col > 0) {
        out << ' ';
      }
      out << format_double(values[grid.index(col, row)]);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

// ---------------------------------------------------------------------------
// GeoTIFF

template <typename T>
void convert_scanline(const unsigned char* raw, int width, double* dst) {
  const T* src = reinterpret_cast<const T*>(raw);
  for (int i = 0; i < width; ++i) {
    dst[i] = static_cast<double>(src[i]);
  }
}

using Converter = void (*)(const unsigned char*, int, double*);

Converter pick_converter(std::uint16_t bits, std::uint16_t format) {
  switch (format) {
    case SAMPLEFORMAT_UINT:
      if (bits == 8) return convert_scanline<std::uint8_t>;
      if (bits == 16) return convert_scanline<std::uint16_t>;
      if (bits == 32) return convert_scanline<std::uint32_t>;
      break;
    case SAMPLEFORMAT_INT:
      if (bits == 8) return convert_scanline<std::int8_t>;
      if (bits == 16) return convert_scanline<std::int16_t>;
      if (bits == 32) return convert_scanline<std::int32_t>;
      break;
    case SAMPLEFORMAT_IEEEFP:
      if (bits == 32) return convert_scanline<float>;
      if (bits == 64) return convert_scanline<double>;
      break;
    default:
      break;
  }
  return nullptr;
}

GeoTransform read_geotransform(TIFF* tif) {
  GeoTransform t{0.0, 0.0, 1.0, 1.0};
  std::uint16_t count = 0;
  double* scale = nullptr;
  double* tie = nullptr;
  if (TIFFGetField(tif, kTagModelPixelScale, &count, &scale) == 1 && count >= 2) {
    t.pixel_width = scale[0];
    t.pixel_height = scale[1];
  }
  if (TIFFGetField(tif, kTagModelTiepoint, &count, &tie) == 1 && count >= 6) {
    t.origin_lon = tie[3] - tie[0] * t.pixel_width;
    t.origin_lat = tie[4] + tie[1] * t.pixel_height;
  }
  std::uint16_t* keys = nullptr;
  if (TIFFGetField(tif, kTagGeoKeyDirectory, &count, &keys) == 1 && count >= 4) {
    const int nkeys = keys[3];
    for (int k = 0; k < nkeys && 4 + 4 * k + 3 < count; ++k) {
      const std::uint16_t* entry = keys + 4 + 4 * k;
      if (entry[0] == kKeyRasterType && entry[1] == 0 && entry[3] == kRasterPixelIsPoint) {
        t.origin_lon -= t.pixel_width / 2.0;
        t.origin_lat += t.pixel_height / 2.0;
      }
    }
  }
  if (!(t.pixel_width > 0.0) || !(t.pixel_height > 0.0)) {
    throw FormatError("GeoTIFF carries a non-positive pixel scale");
  }
  return t;
}

Grid read_geotiff(const std::filesystem::path& path) {
  register_geo_tags();
  TiffHandle tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) {
    throw IoError("cannot open " + path.string());
  }
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t spp = 1;
  std::uint16_t bits = 8;
  std::uint16_t format = SAMPLEFORMAT_UINT;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &format);
  if (spp != 1) {
    throw FormatError(path.string() + ": only single-band rasters are supported");
  }
  Converter convert = pick_converter(bits, format);
  if (convert == nullptr) {
    throw FormatError(path.string() + ": unsupported sample type (" + std::to_string(bits) +
                      " bits, format " + std::to_string(format) + ")");
  }
  if (width == 0 || height == 0) {
    throw FormatError(path.string() + ": empty raster");
  }

  std::optional<double> nodata;
  char* nodata_text = nullptr;
  if (TIFFGetField(tif.get(), kTagGdalNodata, &nodata_text) == 1 && nodata_text != nullptr) {
    char* end = nullptr;
    const double v = std::strtod(nodata_text, &end);
    if (end != nodata_text) {
      nodata = v;
    }
  }
  const GeoTransform t = read_geotransform(tif.get());

  std::vector<double> values(static_cast<std::size_t>(width) * height);
  const int w = static_cast<int>(width);
  if (TIFFIsTiled(tif.get()) != 0) {
    std::uint32_t tw = 0;
    std::uint32_t th = 0;
    TIFFGetField(tif.get(), TIFFTAG_TILEWIDTH, &tw);
    TIFFGetField(tif.get(), TIFFTAG_TILELENGTH, &th);
    std::vector<unsigned char> tile(static_cast<std::size_t>(TIFFTileSize(tif.get())));
    std::vector<double> converted(tw);
    const std::size_t row_bytes = static_cast<std::size_t>(tw) * bits / 8;
    for (std::uint32_t ty = 0; ty < height; ty += th) {
      for (std::uint32_t tx = 0; tx < width; tx += tw) {
        if (TIFFReadTile(tif.get(), tile.data(), tx, ty, 0, 0) < 0) {
          throw IoError(path.string() + ": failed reading tile");
        }
        for (std::uint32_t r = 0; r < th && ty + r < height; ++r) {
          convert(tile.data() + r * row_bytes, static_cast<int>(tw), converted.data());
          const std::uint32_t n = std::min(tw, width - tx);
          std::copy_n(converted.begin(), n,
                      values.begin() + static_cast<std::ptrdiff_t>((ty + r) * width + tx));
        }
      }
    }
  } else {
    std::vector<unsigned char> line(static_cast<std::size_t>(TIFFScanlineSize(tif.get())));
    for (std::uint32_t row = 0; row < height; ++row) {
      if (TIFFReadScanline(tif.get(), line.data(), row, 0) < 0) {
        throw IoError(path.string() + ": failed reading row " + std::to_string(row));
      }
      convert(line.data(), w, values.data() + static_cast<std::size_t>(row) * width);
    }
  }
  Grid grid(w, static_cast<int>(height), t, std::move(values), nodata);
  validate_grid(grid);
  return grid;
}

template <typename T>
void write_rows(TIFF* tif, const std::vector<double>& values, int width, int height,
                const std::filesystem::path& path) {
  std::vector<T> line(static_cast<std::size_t>(width));
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      line[static_cast<std::size_t>(col)] =
          static_cast<T>(values[static_cast<std::size_t>(row) * width + col]);
    }
    if (TIFFWriteScanline(tif, line.data(), static_cast<std::uint32_t>(row), 0) < 0) {
      throw IoError("failed writing row " + std::to_string(row) + " of " + path.string());
    }
  }
}

void write_geotiff(const std::vector<double>& values, const Grid& grid, Encoding encoding,
                   const std::optional<double>& nodata, const std::filesystem::path& path) {
  register_geo_tags();
  TiffHandle tif(TIFFOpen(path.c_str(), "w"));
  if (!tif) {
    throw IoError("cannot create " + path.string());
  }
  const bool is_float = encoding == Encoding::kFloat;
  const std::uint16_t bits = is_float ? 64 : 8;
  TIFF* h = tif.get();
  TIFFSetField(h, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(grid.width()));
  TIFFSetField(h, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(grid.height()));
  TIFFSetField(h, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(1));
  TIFFSetField(h, TIFFTAG_BITSPERSAMPLE, bits);
  TIFFSetField(h, TIFFTAG_SAMPLEFORMAT,
               static_cast<std::uint16_t>(is_float ? SAMPLEFORMAT_IEEEFP : SAMPLEFORMAT_UINT));
  TIFFSetField(h, TIFFTAG_PHOTOMETRIC, static_cast<std::uint16_t>(PHOTOMETRIC_MINISBLACK));
  TIFFSetField(h, TIFFTAG_PLANARCONFIG, static_cast<std::uint16_t>(PLANARCONFIG_CONTIG));
  if (TIFFIsCODECConfigured(COMPRESSION_ADOBE_DEFLATE) != 0) {
    TIFFSetField(h, TIFFTAG_COMPRESSION, static_cast<std::uint16_t>(COMPRESSION_ADOBE_DEFLATE));
  }
  TIFFSetField(h, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(h, 0));

  const GeoTransform& t = grid.transform();
  double scale[3] = {t.pixel_width, t.pixel_height, 0.0};
  double tie[6] = {0.0, 0.0, 0.0, t.origin_lon, t.origin_lat, 0.0};
  std::uint16_t keys[16] = {1, 1, 0, 3,
                            kKeyModelType, 0, 1, 2,        // geographic
                            kKeyRasterType, 0, 1, 1,       // pixel is area
                            kKeyGeographicType, 0, 1, 4326};
  TIFFSetField(h, kTagModelPixelScale, static_cast<std::uint16_t>(3), scale);
  TIFFSetField(h, kTagModelTiepoint, static_cast<std::uint16_t>(6), tie);
  TIFFSetField(h, kTagGeoKeyDirectory, static_cast<std::uint16_t>(16), keys);
  if (nodata) {
    const std::string text = format_double(*nodata);
    TIFFSetField(h, kTagGdalNodata, text.c_str());
  }

  if (is_float) {
    write_rows<double>(h, values, grid.width(), grid.height(), path);
  } else {
    write_rows<std::uint8_t>(h, values, grid.width(), grid.height(), path);
  }
  if (TIFFWriteDirectory(h) == 0) {
    throw IoError("failed finalizing " + path.string());
  }
}

}  // namespace

Grid read_grid(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("no such file: " + path.string());
  }
  return is_ascii_path(path) ? read_ascii(path) : read_geotiff(path);
}

void write_grid(const Grid& grid, const std::filesystem::path& path, Encoding encoding) {
  std::optional<double> nodata;
  const std::vector<double> values = encode_values(grid, encoding, nodata);
  if (is_ascii_path(path)) {
    write_ascii(values, grid, nodata, path);
  } else {
    write_geotiff(values, grid, encoding, nodata, path);
  }
}

Grid mask_to_grid(const Mask& mask) {
  Grid grid(mask.geometry(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    grid[i] = mask[i] != 0 ? 1.0 : 0.0;
  }
  return grid;
}

Mask grid_to_mask(const Grid& grid) {
  Mask mask(grid.geometry(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    if (grid.is_nodata(i) || (v != 0.0 && v != 1.0)) {
      throw ContractError("grid is not a {0, 1} mask");
    }
    mask[i] = v == 1.0 ? 1 : 0;
  }
  return mask;
}

Mask read_mask(const std::filesystem::path& path) {
  const Grid grid = read_grid(path);
  Mask mask(grid.geometry(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mask[i] = (!grid.is_nodata(i) && grid[i] != 0.0) ? 1 : 0;
  }
  return mask;
}

void write_mask(const Mask& mask, const std::filesystem::path& path) {
  write_grid(mask_to_grid(mask), path, Encoding::kBinaryMask);
}

}  // namespace wsf
