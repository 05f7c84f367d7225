#include "facepix/container.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace facepix {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'P', 'V', 'L'};

std::uint32_t read_u32le(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw std::runtime_error("frame container truncated in header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> b = {
      static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

}  // namespace

FrameStream read_frame_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open frame container: " + path);

  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || magic != kMagic) throw std::runtime_error("bad frame container magic: " + path);

  FrameStream s;
  const std::uint32_t width = read_u32le(in);
  const std::uint32_t height = read_u32le(in);
  const std::uint32_t fps = read_u32le(in);
  const std::uint32_t frame_count = read_u32le(in);
  if (width == 0 || height == 0) throw std::runtime_error("frame container has zero dimensions");
  if (fps == 0) throw std::runtime_error("frame container has zero fps");

  s.width = static_cast<int>(width);
  s.height = static_cast<int>(height);
  s.fps = static_cast<int>(fps);
  const std::size_t frame_bytes = static_cast<std::size_t>(width) * height * 3;

  s.frames.resize(frame_count);
  for (std::uint32_t i = 0; i < frame_count; ++i) {
    Frame& f = s.frames[i];
    f.index = i;
    f.width = s.width;
    f.height = s.height;
    f.pixels.resize(frame_bytes);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(frame_bytes));
    if (static_cast<std::size_t>(in.gcount()) != frame_bytes)
      throw std::runtime_error("frame container truncated: declared " + std::to_string(frame_count) +
                               " frames, payload ends inside frame " + std::to_string(i));
  }
  return s;
}

void write_frame_container(const std::string& path, const FrameStream& stream) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write frame container: " + path);
  out.write(kMagic.data(), 4);
  write_u32le(out, static_cast<std::uint32_t>(stream.width));
  write_u32le(out, static_cast<std::uint32_t>(stream.height));
  write_u32le(out, static_cast<std::uint32_t>(stream.fps));
  write_u32le(out, static_cast<std::uint32_t>(stream.frames.size()));
  const std::size_t frame_bytes = static_cast<std::size_t>(stream.width) * stream.height * 3;
  for (const Frame& f : stream.frames) {
    if (f.pixels.size() != frame_bytes)
      throw std::runtime_error("frame " + std::to_string(f.index) + " pixel buffer size mismatch");
    out.write(reinterpret_cast<const char*>(f.pixels.data()), static_cast<std::streamsize>(frame_bytes));
  }
  if (!out) throw std::runtime_error("short write on frame container: " + path);
}

}  // namespace facepix
