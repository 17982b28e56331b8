// NEON kernel variants for aarch64 builds.

#if defined(__ARM_NEON) || defined(__ARM_NEON__)

#include <arm_neon.h>

#include <cstddef>

namespace ragopt::kernels::detail {

float dot_neon(const float* a, const float* b, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = vmlaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
    }
    float sum = vaddvq_f32(acc);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

float norm_sq_neon(const float* v, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t x = vld1q_f32(v + i);
        acc = vmlaq_f32(acc, x, x);
    }
    float sum = vaddvq_f32(acc);
    for (; i < n; ++i) sum += v[i] * v[i];
    return sum;
}

void scale_neon(float* v, std::size_t n, float s) {
    const float32x4_t vs = vdupq_n_f32(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(v + i, vmulq_f32(vld1q_f32(v + i), vs));
    }
    for (; i < n; ++i) v[i] *= s;
}

void add_into_neon(float* dst, const float* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(dst + i, vaddq_f32(vld1q_f32(dst + i), vld1q_f32(src + i)));
    }
    for (; i < n; ++i) dst[i] += src[i];
}

} // namespace ragopt::kernels::detail

#endif // __ARM_NEON
