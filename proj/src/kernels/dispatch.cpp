// Runtime selection between kernel variants. No intrinsics here.

#include "qdport/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace qdport::kernels {
namespace {

constexpr Table kScalar{&scalar::dot, &scalar::quad_form, &scalar::sq_distances,
                        &scalar::nearest, &scalar::nearest_two};

#if defined(QDPORT_HAS_AVX2_KERNELS)
constexpr Table kAvx2{&avx2::dot, &avx2::quad_form, &avx2::sq_distances, &avx2::nearest,
                      &avx2::nearest_two};
#endif

Level detect() noexcept {
    if (const char* env = std::getenv("QDPORT_SIMD"); env && std::string_view(env) == "scalar")
        return Level::scalar;
    if (cpu_supports(Level::avx2)) return Level::avx2;
    return Level::scalar;
}

Level& current() noexcept {
    static Level level = detect();
    return level;
}

}  // namespace

bool cpu_supports(Level level) noexcept {
    switch (level) {
        case Level::scalar:
            return true;
        case Level::avx2:
#if defined(QDPORT_HAS_AVX2_KERNELS)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Level active_level() noexcept { return current(); }

void set_level(Level level) noexcept { current() = cpu_supports(level) ? level : Level::scalar; }

std::string_view level_name(Level level) noexcept {
    return level == Level::avx2 ? "avx2" : "scalar";
}

const Table& table(Level level) noexcept {
#if defined(QDPORT_HAS_AVX2_KERNELS)
    if (level == Level::avx2 && cpu_supports(Level::avx2)) return kAvx2;
#endif
    (void)level;
    return kScalar;
}

}  // namespace qdport::kernels
