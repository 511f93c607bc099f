#pragma once

#include <string>
#include <vector>

#include "vpip/image.hpp"

namespace vpip {

// Procedural test images: smooth gradients, shapes with crisp boundaries,
// stripes and blob fields, so edge/sketch/denoise tasks all have signal.
// Fully determined by (index, size).
Image make_fixture_image(int index, int size);

// Writes fixture_000.png .. fixture_{count-1}.png into dir (created if needed).
std::vector<std::string> write_fixture_set(const std::string& dir, int count, int size,
                                           int first_index = 0);

}  // namespace vpip
