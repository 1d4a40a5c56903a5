#include "mixlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "mixlab/errors.hpp"

namespace mixlab::kernels {

namespace detail {
extern const Ops kScalarOps;
extern const Ops kAvx2Ops;
}  // namespace detail

bool avx2_supported() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

Backend pick_default() {
    if (const char* env = std::getenv("MIXLAB_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_supported())
                throw ValidationError("MIXLAB_KERNELS=avx2 but the CPU lacks AVX2");
            return Backend::kAvx2;
        }
        throw ValidationError(std::string("unknown MIXLAB_KERNELS value: ") + env);
    }
    return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

Backend& current() {
    static Backend backend = pick_default();
    return backend;
}

}  // namespace

const Ops& table(Backend backend) {
    if (backend == Backend::kAvx2) {
        if (!avx2_supported())
            throw ValidationError("AVX2 kernel table requested on a CPU without AVX2");
        return detail::kAvx2Ops;
    }
    return detail::kScalarOps;
}

const Ops& active() { return table(current()); }

Backend active_backend() { return current(); }

void set_backend(Backend backend) {
    if (backend == Backend::kAvx2 && !avx2_supported())
        throw ValidationError("cannot select AVX2 kernels on this CPU");
    current() = backend;
}

std::string backend_name(Backend backend) {
    return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace mixlab::kernels
