#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "pointvec/image.hpp"

namespace pv {

// Binary PPM (P6), maxval 255 only. Comments in the header are accepted.
Frame read_ppm(const std::string& path);
void write_ppm(const Frame& f, const std::string& path);

// Stream variants support concatenated frames back to back (e.g. piped capture).
// read_ppm_stream returns nullopt at a clean end of stream.
std::optional<Frame> read_ppm_stream(std::istream& in);
void write_ppm_stream(const Frame& f, std::ostream& out);

}  // namespace pv
