#pragma once

#include <string>

#include "facepix/types.hpp"

namespace facepix {

// FPVL frame container: magic "FPVL", then little-endian u32 width, height,
// fps, frame_count, then frame_count raw RGB frames (width*height*3 bytes).
FrameStream read_frame_container(const std::string& path);
void write_frame_container(const std::string& path, const FrameStream& stream);

}  // namespace facepix
