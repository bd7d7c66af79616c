#include "depthres/core.hpp"

#include <cmath>

namespace depthres {

namespace {

void check_dims(int width, int height, size_t n, const char* what) {
    if (width <= 0 || height <= 0)
        throw ConfigError(std::string(what) + ": non-positive dimensions");
    if (n != static_cast<size_t>(width) * height)
        throw ConfigError(std::string(what) + ": storage size does not match dimensions");
}

}  // namespace

void DepthMap::validate() const {
    check_dims(width, height, values.size(), "DepthMap");
    if (mask.size() != values.size())
        throw ConfigError("DepthMap: mask size does not match dimensions");
    for (size_t i = 0; i < values.size(); ++i) {
        if (!mask[i]) continue;
        const double v = values[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ConfigError("DepthMap: valid value out of [0,1] at index " +
                              std::to_string(i));
    }
}

void GuidanceImage::validate() const {
    for (const auto& plane : planes) {
        check_dims(width, height, plane.size(), "GuidanceImage");
        for (size_t i = 0; i < plane.size(); ++i) {
            const double v = plane[i];
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw ConfigError("GuidanceImage: intensity out of [0,1] at index " +
                                  std::to_string(i));
        }
    }
}

void BandwidthMap::validate() const {
    check_dims(width, height, values.size(), "BandwidthMap");
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < kLambdaMin)
            throw ConfigError("BandwidthMap: bandwidth below floor at index " +
                              std::to_string(i));
    }
}

void RestorationConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("alpha must be in (0,1)");
    if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
    if (radius < 0) throw ConfigError("radius must be >= 0");
    if (!(sigma_s > 0.0)) throw ConfigError("sigma-s must be > 0");
    if (!(sigma_c > 0.0)) throw ConfigError("sigma-c must be > 0");
    if (!(lambda_init >= kLambdaMin))
        throw ConfigError("lambda-init must be >= 1/255");
    if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    if (irls_max_iters < 1) throw ConfigError("irls-iters must be >= 1");
    if (!(irls_rel_tol > 0.0)) throw ConfigError("irls-rel-tol must be > 0");
    if (pcg_max_iters < 1) throw ConfigError("pcg-max-iters must be >= 1");
    if (!(pcg_rel_tol > 0.0)) throw ConfigError("pcg-tol must be > 0");
    if (lambda_steps_per_iter < 0)
        throw ConfigError("lambda-steps must be >= 0");
}

RestorationConfig default_config(int upsampling_factor) {
    RestorationConfig cfg;
    switch (upsampling_factor) {
        case 2: cfg.alpha = 0.7; break;
        case 4: cfg.alpha = 0.75; break;
        case 8: cfg.alpha = 0.8; break;
        case 16: cfg.alpha = 0.9; break;
        default:
            throw ConfigError("no published default for upsampling factor " +
                              std::to_string(upsampling_factor));
    }
    cfg.validate();
    return cfg;
}

}  // namespace depthres
