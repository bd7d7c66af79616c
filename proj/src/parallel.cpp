#include "depthres/parallel.hpp"

#include <cstdlib>

namespace depthres {

int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("DEPTHRES_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && *end == '\0' && v >= 1 && v <= 1024)
                return static_cast<int>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return cached;
}

}  // namespace depthres
