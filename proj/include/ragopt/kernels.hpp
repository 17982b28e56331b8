#pragma once

#include <cstddef>
#include <string>

// Dense float vector kernels behind a runtime-dispatched backend.
// Scalar is the reference implementation; AVX2/NEON variants are selected
// once at startup from CPU features and must agree with scalar within
// floating-point reassociation tolerance (equivalence-tested).

namespace ragopt::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
bool backend_available(Backend b);
// Force a backend (tests). Throws ValidationError if unavailable on this CPU.
void set_backend(Backend b);
std::string backend_name(Backend b);

float dot(const float* a, const float* b, std::size_t n);
float norm_sq(const float* v, std::size_t n);
void scale(float* v, std::size_t n, float s);
void add_into(float* dst, const float* src, std::size_t n); // dst += src

namespace detail {

float dot_scalar(const float* a, const float* b, std::size_t n);
float norm_sq_scalar(const float* v, std::size_t n);
void scale_scalar(float* v, std::size_t n, float s);
void add_into_scalar(float* dst, const float* src, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
float dot_avx2(const float* a, const float* b, std::size_t n);
float norm_sq_avx2(const float* v, std::size_t n);
void scale_avx2(float* v, std::size_t n, float s);
void add_into_avx2(float* dst, const float* src, std::size_t n);
#endif

#if defined(__ARM_NEON) || defined(__ARM_NEON__)
float dot_neon(const float* a, const float* b, std::size_t n);
float norm_sq_neon(const float* v, std::size_t n);
void scale_neon(float* v, std::size_t n, float s);
void add_into_neon(float* dst, const float* src, std::size_t n);
#endif

} // namespace detail

} // namespace ragopt::kernels
