// Core domain types shared by all depthres modules: depth grids, guidance
// images, per-pixel bandwidth maps and the restoration configuration.

#ifndef DEPTHRES_CORE_HPP
#define DEPTHRES_CORE_HPP

#include <array>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthres {

// Smallest admissible bandwidth, one quantization step on the 8-bit scale.
// Every bandwidth value is clamped to stay at or above this floor.
inline constexpr double kLambdaMin = 1.0 / 255.0;

/// Thrown when a configuration or argument violates a documented invariant.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a numeric routine cannot proceed (divergence, singular row).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Row-major linear index of grid coordinate (x, y), origin at top-left.
inline int pixel_index(int x, int y, int width) {
    assert(x >= 0 && x < width && y >= 0);
    return y * width + x;
}

/// Inverse of pixel_index: linear index back to (x, y).
inline std::pair<int, int> pixel_coords(int index, int width) {
    assert(index >= 0 && width > 0);
    return {index % width, index / width};
}

/// Dense 2-D grid of depth values in normalized [0,1] units with a validity
/// mask. Mask value 0 marks a hole: the stored value is a placeholder (0.0)
/// and must never enter mask-gated sums.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major, width*height
    std::vector<std::uint8_t> mask;  // 1 = measured, 0 = hole

    DepthMap() = default;
    DepthMap(int w, int h, double fill = 0.0)
        : width(w), height(h),
          values(static_cast<size_t>(w) * h, fill),
          mask(static_cast<size_t>(w) * h, 1) {}

    int size() const { return width * height; }

    double at(int x, int y) const { return values[pixel_index(x, y, width)]; }
    double& at(int x, int y) { return values[pixel_index(x, y, width)]; }

    bool valid(int x, int y) const { return mask[pixel_index(x, y, width)] != 0; }

    void set_hole(int x, int y) {
        const int i = pixel_index(x, y, width);
        mask[i] = 0;
        values[i] = 0.0;
    }

    /// Checks the structural invariants; throws ConfigError on violation.
    void validate() const;
};

/// Dense 3-channel color image, planes in normalized [0,1] intensity.
struct GuidanceImage {
    int width = 0;
    int height = 0;
    std::array<std::vector<double>, 3> planes;  // R, G, B

    GuidanceImage() = default;
    GuidanceImage(int w, int h, double fill = 0.0) : width(w), height(h) {
        for (auto& p : planes) p.assign(static_cast<size_t>(w) * h, fill);
    }

    int size() const { return width * height; }

    double at(int channel, int x, int y) const {
        return planes[channel][pixel_index(x, y, width)];
    }
    double& at(int channel, int x, int y) {
        return planes[channel][pixel_index(x, y, width)];
    }

    void validate() const;
};

/// Per-pixel positive bandwidth of the exponential penalty, same grid as the
/// high-resolution depth map. Values never drop below kLambdaMin.
struct BandwidthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    BandwidthMap() = default;
    BandwidthMap(int w, int h, double fill = kLambdaMin)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    int size() const { return width * height; }

    double at(int x, int y) const { return values[pixel_index(x, y, width)]; }
    double& at(int x, int y) { return values[pixel_index(x, y, width)]; }

    void validate() const;
};

/// Square patch of radius r centered at a pixel, clipped at image borders.
/// r = 0 degenerates to the single center pixel.
struct Neighborhood {
    int radius = 0;

    explicit Neighborhood(int r) : radius(r) { assert(r >= 0); }

    int x_begin(int x) const { return x - radius < 0 ? 0 : x - radius; }
    int x_end(int x, int width) const {
        return x + radius >= width ? width : x + radius + 1;
    }
    int y_begin(int y) const { return y - radius < 0 ? 0 : y - radius; }
    int y_end(int y, int height) const {
        return y + radius >= height ? height : y + radius + 1;
    }

    /// Number of pixels in the clipped patch around (x, y).
    int count(int x, int y, int width, int height) const {
        return (x_end(x, width) - x_begin(x)) * (y_end(y, height) - y_begin(y));
    }
};

/// All scalar hyperparameters of the restoration model and its solvers.
struct RestorationConfig {
    double alpha = 0.8;            // data/smoothness balance, in (0,1)
    double beta = 0.5;             // bandwidth regularizer weight, >= 0
    int radius = 4;                // patch radius (9x9 patch by default)
    int data_radius = -1;          // data-term patch radius; < 0 means radius
    double sigma_s = 4.0;          // spatial kernel width, pixels
    double sigma_c = 10.0 / 255.0; // color kernel width, normalized intensity
    double lambda_init = 7.0 / 255.0;  // initial bandwidth, normalized depth
    double tau = 0.3;              // bandwidth gradient-descent step size
    int irls_max_iters = 20;
    double irls_rel_tol = 1e-4;
    int pcg_max_iters = 2000;
    double pcg_rel_tol = 1e-6;
    int lambda_steps_per_iter = 1;
    bool adaptive_bandwidth = true;

    /// Patch radius used by the data term. The pixel-to-pixel ablation sets
    /// this to 0 while leaving the smoothness patch untouched.
    int effective_data_radius() const {
        return data_radius < 0 ? radius : data_radius;
    }

    void validate() const;
};

/// Published defaults per upsampling factor. Only 2x/4x/8x/16x have a
/// published alpha; any other factor is rejected.
RestorationConfig default_config(int upsampling_factor);

}  // namespace depthres

#endif  // DEPTHRES_CORE_HPP
