#pragma once

#include <filesystem>

#include "tropedge/image.hpp"

namespace tropedge {

// 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) and binary PGM (P5).
// Samples map to [0,1] as v/255; alpha is discarded.
ColorImage load_color(const std::filesystem::path& path);

/// Loads any supported file and reduces it to luminance.
Image load_grayscale(const std::filesystem::path& path);

/// Writes an 8-bit grayscale file; the format follows the extension
/// (.pgm -> P5, anything else -> PNG). Values are clamped to [0,1].
void save_grayscale(const Image& img, const std::filesystem::path& path);

bool is_supported_image(const std::filesystem::path& path);

}  // namespace tropedge
