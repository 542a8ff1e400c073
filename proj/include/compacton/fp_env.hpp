#pragma once

#if defined(__SSE__) || defined(_M_X64)
#include <pmmintrin.h>
#include <xmmintrin.h>
#define COMPACTON_HAS_MXCSR 1
#endif

namespace compacton {

/// Sets flush-to-zero and denormals-are-zero for the current thread while in
/// scope. Far-field radiation and the decaying corner columns of the cyclic
/// solver otherwise spend most of their time in subnormal arithmetic.
class ScopedFlushDenormals {
public:
    ScopedFlushDenormals() noexcept {
#ifdef COMPACTON_HAS_MXCSR
        saved_ = _mm_getcsr();
        _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
        _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
    }
    ~ScopedFlushDenormals() {
#ifdef COMPACTON_HAS_MXCSR
        _mm_setcsr(saved_);
#endif
    }
    ScopedFlushDenormals(const ScopedFlushDenormals&) = delete;
    ScopedFlushDenormals& operator=(const ScopedFlushDenormals&) = delete;

private:
    unsigned int saved_ = 0;
};

} // namespace compacton
