#include "ragopt/kernels.hpp"

#include "ragopt/errors.hpp"

namespace ragopt::kernels {

namespace detail {

float dot_scalar(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

float norm_sq_scalar(const float* v, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return acc;
}

void scale_scalar(float* v, std::size_t n, float s) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= s;
}

void add_into_scalar(float* dst, const float* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

} // namespace detail

namespace {

struct KernelTable {
    float (*dot)(const float*, const float*, std::size_t);
    float (*norm_sq)(const float*, std::size_t);
    void (*scale)(float*, std::size_t, float);
    void (*add_into)(float*, const float*, std::size_t);
};

constexpr KernelTable kScalarTable{
    detail::dot_scalar,
    detail::norm_sq_scalar,
    detail::scale_scalar,
    detail::add_into_scalar,
};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{
    detail::dot_avx2,
    detail::norm_sq_avx2,
    detail::scale_avx2,
    detail::add_into_avx2,
};
#endif

#if defined(__ARM_NEON) || defined(__ARM_NEON__)
constexpr KernelTable kNeonTable{
    detail::dot_neon,
    detail::norm_sq_neon,
    detail::scale_neon,
    detail::add_into_neon,
};
#endif

Backend detect_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#elif defined(__ARM_NEON) || defined(__ARM_NEON__)
    return Backend::Neon;
#endif
    return Backend::Scalar;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &kScalarTable;
        case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (__builtin_cpu_supports("avx2")) return &kAvx2Table;
#endif
            return nullptr;
        case Backend::Neon:
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
            return &kNeonTable;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

struct Dispatch {
    Backend backend;
    const KernelTable* table;
    Dispatch() : backend(detect_backend()), table(table_for(backend)) {}
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_available(Backend b) { return table_for(b) != nullptr; }

void set_backend(Backend b) {
    const KernelTable* t = table_for(b);
    if (t == nullptr) {
        throw ValidationError("kernel backend not available on this CPU: " + backend_name(b));
    }
    dispatch().backend = b;
    dispatch().table = t;
}

std::string backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

float dot(const float* a, const float* b, std::size_t n) {
    return dispatch().table->dot(a, b, n);
}

float norm_sq(const float* v, std::size_t n) {
    return dispatch().table->norm_sq(v, n);
}

void scale(float* v, std::size_t n, float s) {
    dispatch().table->scale(v, n, s);
}

void add_into(float* dst, const float* src, std::size_t n) {
    dispatch().table->add_into(dst, src, n);
}

} // namespace ragopt::kernels
