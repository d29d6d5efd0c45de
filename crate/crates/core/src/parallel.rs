//! Order-preserving parallel map, disabled by `MOP_NO_PARALLEL=1`.

use rayon::prelude::*;

pub fn serial_requested() -> bool {
    std::env::var("MOP_NO_PARALLEL").is_ok_and(|v| v == "1")
}

/// Maps `f` over `items`, keeping input order in the output.
pub fn map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if serial_requested() {
        items.into_iter().map(f).collect()
    } else {
        items.into_par_iter().map(f).collect()
    }
}
