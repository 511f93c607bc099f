#pragma once

#include <string>

#include "vpip/image.hpp"

namespace vpip {

// Decodes any libpng-readable PNG into a 3-channel image in [0,1]
// (grayscale expands, alpha is dropped, 16-bit narrows to 8-bit).
Image read_png(const std::string& path);

// 8-bit PNG (gray for C==1, RGB for C==3), values round(v*255).
// Writes to a temp file in the same directory, then renames.
void write_png(const std::string& path, const Image& img);

}  // namespace vpip
