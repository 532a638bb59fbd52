#include "wzsim/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "wzsim/errors.hpp"

namespace wzsim::kernels {
namespace {

std::atomic<const Backend*> g_active{nullptr};

const Backend* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &avx2_backend();
#endif
    return &scalar_backend();
}

const Backend* pick(const std::string& name) {
    if (name == "auto") return pick_auto();
    if (name == "scalar") return &scalar_backend();
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") {
        if (!avx2_available())
            throw ArgumentError("kernels: avx2 backend requested but CPU lacks AVX2/FMA");
        return &avx2_backend();
    }
#endif
    throw ArgumentError("kernels: unknown backend '" + name + "'");
}

} // namespace

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        const char* env = std::getenv("WZSIM_KERNELS");
        b = pick(env ? env : "auto");
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void select(const std::string& name) {
    g_active.store(pick(name), std::memory_order_release);
}

} // namespace wzsim::kernels
