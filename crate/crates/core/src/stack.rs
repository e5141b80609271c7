//! Passes recurse along the tree, so very deep inputs need more stack than a
//! default thread provides.

use std::thread;

/// Stack reserved for [`with_large_stack`]. Only touched pages are committed.
pub const LARGE_STACK: usize = 1 << 30;

/// Run `f` on a fresh thread with a [`LARGE_STACK`]-sized stack.
pub fn with_large_stack<T, F>(f: F) -> T
where
    F: FnOnce() -> T + Send,
    T: Send,
{
    thread::scope(|s| {
        thread::Builder::new()
            .stack_size(LARGE_STACK)
            .spawn_scoped(s, f)
            .expect("spawn worker thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
