#include "depthres/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace depthres {

namespace {

// Skips whitespace and '#' comment lines, then parses one unsigned value.
long next_header_value(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF || !std::isdigit(c))
        throw PnmError(PnmError::Kind::BadHeader, path + ": malformed header");
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1000000000)
            throw PnmError(PnmError::Kind::BadHeader, path + ": header value too large");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return value;
}

struct PnmHeader {
    std::string magic;
    int width = 0;
    int height = 0;
    long maxval = 0;
};

PnmHeader read_header(std::istream& in, const std::string& path) {
    PnmHeader hdr;
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '5' && m1 != '6'))
        throw PnmError(PnmError::Kind::BadMagic, path + ": not a binary PGM/PPM file");
    hdr.magic = {m0, m1};
    hdr.width = static_cast<int>(next_header_value(in, path));
    hdr.height = static_cast<int>(next_header_value(in, path));
    hdr.maxval = next_header_value(in, path);
    if (hdr.width <= 0 || hdr.height <= 0 ||
        static_cast<long>(hdr.width) * hdr.height > 100000000L)
        throw PnmError(PnmError::Kind::BadHeader, path + ": bad dimensions");
    // Exactly one whitespace byte separates the header from the payload.
    const int c = in.get();
    if (c == EOF || !std::isspace(c))
        throw PnmError(PnmError::Kind::BadHeader, path + ": missing payload separator");
    return hdr;
}

std::vector<unsigned char> read_payload(std::istream& in, size_t bytes,
                                        const std::string& path) {
    std::vector<unsigned char> data(bytes);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in.gcount()) != bytes)
        throw PnmError(PnmError::Kind::Truncated, path + ": truncated payload");
    return data;
}

// Writes the whole file to a temporary sibling and renames it into place,
// so failures never leave a half-written output.
void atomic_write(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw PnmError(PnmError::Kind::WriteFailed, path + ": cannot open for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw PnmError(PnmError::Kind::WriteFailed, path + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw PnmError(PnmError::Kind::WriteFailed, path + ": rename failed");
    }
}

unsigned quantize(double value, unsigned maxval) {
    const double scaled = std::floor(value * maxval + 0.5);  // round half up
    if (scaled <= 0.0) return 0;
    if (scaled >= maxval) return maxval;
    return static_cast<unsigned>(scaled);
}

}  // namespace

DepthMap read_depth(const std::string& path, bool zero_is_hole) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PnmError(PnmError::Kind::OpenFailed, path + ": cannot open");
    const PnmHeader hdr = read_header(in, path);
    if (hdr.magic != "P5")
        throw PnmError(PnmError::Kind::BadMagic, path + ": expected P5 depth map");
    if (hdr.maxval != 255 && hdr.maxval != 65535)
        throw PnmError(PnmError::Kind::UnsupportedMaxval,
                       path + ": maxval must be 255 or 65535");

    const int bytes_per = hdr.maxval == 255 ? 1 : 2;
    const size_t count = static_cast<size_t>(hdr.width) * hdr.height;
    const auto data = read_payload(in, count * bytes_per, path);

    DepthMap map(hdr.width, hdr.height);
    for (size_t i = 0; i < count; ++i) {
        unsigned sample;
        if (bytes_per == 1)
            sample = data[i];
        else
            sample = (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
        if (zero_is_hole && sample == 0) {
            map.mask[i] = 0;
            map.values[i] = 0.0;
        } else {
            map.values[i] = static_cast<double>(sample) / static_cast<double>(hdr.maxval);
        }
    }
    return map;
}

void write_depth(const DepthMap& map, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw ConfigError("write_depth: bit depth must be 8 or 16");
    map.validate();
    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;

    std::ostringstream out;
    out << "P5\n" << map.width << " " << map.height << "\n" << maxval << "\n";
    for (size_t i = 0; i < map.values.size(); ++i) {
        const unsigned sample = map.mask[i] ? quantize(map.values[i], maxval) : 0u;
        if (bit_depth == 16) out.put(static_cast<char>((sample >> 8) & 0xff));
        out.put(static_cast<char>(sample & 0xff));
    }
    atomic_write(path, out.str());
}

GuidanceImage read_color(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PnmError(PnmError::Kind::OpenFailed, path + ": cannot open");
    const PnmHeader hdr = read_header(in, path);
    if (hdr.magic != "P6")
        throw PnmError(PnmError::Kind::BadMagic, path + ": expected P6 color image");
    if (hdr.maxval != 255)
        throw PnmError(PnmError::Kind::UnsupportedMaxval, path + ": maxval must be 255");

    const size_t count = static_cast<size_t>(hdr.width) * hdr.height;
    const auto data = read_payload(in, count * 3, path);

    GuidanceImage img(hdr.width, hdr.height);
    for (size_t i = 0; i < count; ++i)
        for (int k = 0; k < 3; ++k)
            img.planes[k][i] = data[3 * i + k] / 255.0;
    return img;
}

void write_color(const GuidanceImage& img, const std::string& path) {
    img.validate();
    std::ostringstream out;
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    const size_t count = static_cast<size_t>(img.width) * img.height;
    for (size_t i = 0; i < count; ++i)
        for (int k = 0; k < 3; ++k)
            out.put(static_cast<char>(quantize(img.planes[k][i], 255u)));
    atomic_write(path, out.str());
}

void write_bandwidth(const BandwidthMap& bw, const std::string& path) {
    bw.validate();
    double lo = bw.values[0], hi = bw.values[0];
    for (const double v : bw.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;

    std::ostringstream out;
    out << "P5\n" << bw.width << " " << bw.height << "\n65535\n";
    for (const double v : bw.values) {
        const unsigned sample =
            span > 0.0 ? quantize((v - lo) / span, 65535u) : 0u;
        out.put(static_cast<char>((sample >> 8) & 0xff));
        out.put(static_cast<char>(sample & 0xff));
    }
    atomic_write(path, out.str());

    char buf[128];
    std::snprintf(buf, sizeof(buf), "lambda_min=%.17g\nlambda_max=%.17g\n", lo, hi);
    atomic_write(path + ".scale.txt", buf);
}

}  // namespace depthres
