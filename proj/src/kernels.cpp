#include "aniso/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace aniso::kernels {

const Backend& active() {
    static const Backend& selected = []() -> const Backend& {
        const char* force = std::getenv("ANISO_KERNEL_BACKEND");
        if (force != nullptr) {
            if (std::strcmp(force, "scalar") == 0) return scalar_backend();
            if (std::strcmp(force, "avx2") == 0) {
                const Backend* b = avx2_backend();
                if (b == nullptr)
                    throw std::runtime_error("ANISO_KERNEL_BACKEND=avx2 but AVX2 is unavailable");
                return *b;
            }
            throw std::runtime_error("unknown ANISO_KERNEL_BACKEND value");
        }
        const Backend* b = avx2_backend();
        return b != nullptr ? *b : scalar_backend();
    }();
    return selected;
}

}  // namespace aniso::kernels
