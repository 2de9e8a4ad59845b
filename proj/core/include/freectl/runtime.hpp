#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace freectl {

/// Keeps matrix-sized blocks on the heap instead of fresh mmap pages. The
/// simulation allocates many n x n temporaries; with glibc defaults each one
/// above 128 KiB costs page faults. Call once at the start of main.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

}  // namespace freectl
