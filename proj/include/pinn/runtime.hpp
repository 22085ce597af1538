#pragma once

namespace pinn {

/// Stops the C allocator from handing freed heap memory back to the OS after
/// every loss evaluation. Tape buffers are freed and reallocated per chunk;
/// with the default trim threshold glibc shrinks and regrows the heap each
/// time, which costs more than the arithmetic. Call once from main().
void keep_freed_heap();

}  // namespace pinn
