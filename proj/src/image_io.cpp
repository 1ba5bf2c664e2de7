#include "tropedge/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace tropedge {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

ColorImage load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    fail(ErrorCode::Io, "cannot read PNG '" + path.string() + "': " + image.message);
  }
  const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> raw(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&image);
    fail(ErrorCode::Io, "cannot decode PNG '" + path.string() + "': " + image.message);
  }
  ColorImage img{static_cast<int>(image.width), static_cast<int>(image.height), colour ? 3 : 1, {}};
  img.data.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0;
  return img;
}

void skip_pgm_space(std::istream& in) {
  while (in) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
}

ColorImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::string magic;
  in >> magic;
  if (magic != "P5") fail(ErrorCode::Io, "'" + path.string() + "' is not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  skip_pgm_space(in);
  in >> w;
  skip_pgm_space(in);
  in >> h;
  skip_pgm_space(in);
  in >> maxval;
  in.get();
  if (!in || w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    fail(ErrorCode::Io, "unsupported PGM header in '" + path.string() + "'");
  }
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    fail(ErrorCode::Io, "truncated PGM '" + path.string() + "'");
  }
  ColorImage img{w, h, 1, {}};
  img.data.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / static_cast<double>(maxval);
  return img;
}

std::vector<unsigned char> to_bytes(const Image& img) {
  std::vector<unsigned char> bytes(img.size());
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i)
    bytes[i] = static_cast<unsigned char>(std::lround(std::clamp(px[i], 0.0, 1.0) * 255.0));
  return bytes;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  const auto bytes = to_bytes(img);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
    fail(ErrorCode::Io, "cannot write PNG '" + path.string() + "': " + image.message);
  }
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  auto bytes = to_bytes(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

bool is_supported_image(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  return ext == ".png" || ext == ".pgm";
}

ColorImage load_color(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    fail(ErrorCode::Io, "no such file '" + path.string() + "'");
  }
  return lower_ext(path) == ".pgm" ? load_pgm(path) : load_png(path);
}

Image load_grayscale(const std::filesystem::path& path) {
  ColorImage img = load_color(path);
  if (img.channels == 3) return to_grayscale(img);
  if (img.channels == 1) return Image(img.width, img.height, std::move(img.data));
  fail(ErrorCode::Io, "unsupported channel count in '" + path.string() + "'");
}

void save_grayscale(const Image& img, const std::filesystem::path& path) {
  if (lower_ext(path) == ".pgm") {
    save_pgm(img, path);
  } else {
    save_png(img, path);
  }
}

}  // namespace tropedge
