#include "pointvec/ppm.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace pv {

namespace {

// Skips whitespace and '#' comments between header tokens.
void skip_header_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            in.get();
        } else {
            return;
        }
    }
}

long read_header_int(std::istream& in, const char* what) {
    skip_header_space(in);
    long v = 0;
    bool any = false;
    for (;;) {
        int c = in.peek();
        if (c < '0' || c > '9') break;
        in.get();
        v = v * 10 + (c - '0');
        any = true;
        if (v > 1'000'000'000L) throw IoError(std::string("ppm header value out of range: ") + what);
    }
    if (!any) throw IoError(std::string("ppm header missing ") + what);
    return v;
}

}  // namespace

std::optional<Frame> read_ppm_stream(std::istream& in) {
    skip_header_space(in);
    if (in.peek() == EOF) return std::nullopt;

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '6') throw IoError("not a binary ppm (expected P6)");

    const long w = read_header_int(in, "width");
    const long h = read_header_int(in, "height");
    const long maxval = read_header_int(in, "maxval");
    if (w < 1 || h < 1) throw IoError("ppm dimensions must be positive");
    if (maxval != 255) throw IoError("only maxval 255 ppm is supported");

    // Exactly one whitespace byte separates the header from pixel data.
    const int sep = in.get();
    if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n') {
        throw IoError("ppm header not terminated by whitespace");
    }

    Frame f(static_cast<int>(w), static_cast<int>(h));
    in.read(reinterpret_cast<char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != f.pixels.size()) {
        throw IoError("ppm pixel data truncated");
    }
    return f;
}

Frame read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    auto f = read_ppm_stream(in);
    if (!f) throw IoError("empty ppm file: " + path);
    return std::move(*f);
}

void write_ppm_stream(const Frame& f, std::ostream& out) {
    if (f.width < 1 || f.height < 1) throw InvalidArgument("cannot write empty frame");
    out << "P6\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.pixels.data()),
              static_cast<std::streamsize>(f.pixels.size()));
    if (!out) throw IoError("ppm write failed");
}

void write_ppm(const Frame& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_ppm_stream(f, out);
}

}  // namespace pv
