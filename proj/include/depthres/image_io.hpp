// Deterministic binary PGM/PPM reading and writing. Depth maps travel as
// P5 at maxval 255 or 65535 (16-bit samples big-endian); guidance images as
// P6 at maxval 255. Bandwidth maps are exported as 16-bit P5 after affine
// scaling, with the scale recorded in a sidecar text file.

#ifndef DEPTHRES_IMAGE_IO_HPP
#define DEPTHRES_IMAGE_IO_HPP

#include <stdexcept>
#include <string>

#include "depthres/core.hpp"

namespace depthres {

/// I/O failure with a machine-checkable kind.
class PnmError : public std::runtime_error {
public:
    enum class Kind {
        OpenFailed,
        BadMagic,        // not a P5/P6 file, or wrong format for the call
        BadHeader,       // unparseable dimensions or maxval
        UnsupportedMaxval,
        Truncated,       // payload shorter than the header promises
        WriteFailed,
    };

    PnmError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Reads a binary P5 depth map (maxval 255 or 65535) and normalizes samples
/// to [0,1]. With zero_is_hole, sample value 0 becomes a hole in the mask.
DepthMap read_depth(const std::string& path, bool zero_is_hole = false);

/// Writes a binary P5 depth map at the given bit depth (8 or 16). Samples
/// are value * maxval rounded half-up; holes are written as sample 0.
void write_depth(const DepthMap& map, const std::string& path, int bit_depth);

/// Reads a binary P6 color image (maxval 255), three planes in [0,1].
GuidanceImage read_color(const std::string& path);

/// Writes a binary P6 color image at maxval 255, rounding half-up.
void write_color(const GuidanceImage& img, const std::string& path);

/// Exports a bandwidth map as 16-bit P5 after the affine map
/// [min observed, max observed] -> [0, 65535], and writes the scale to
/// `path + ".scale.txt"` so the image can be decoded back to bandwidths.
void write_bandwidth(const BandwidthMap& bw, const std::string& path);

}  // namespace depthres

#endif  // DEPTHRES_IMAGE_IO_HPP
