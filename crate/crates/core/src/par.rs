//! Deterministic fork-join helper for embarrassingly parallel index ranges.
//!
//! Results are returned in index order no matter how many worker threads run,
//! so outputs are identical at any thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Apply `f` over 0..len and collect results in index order. `threads == 0`
/// means "use available parallelism".
pub fn map_indexed<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = if threads == 0 {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    } else {
        threads
    };
    if threads <= 1 || len <= 1 {
        return (0..len).map(f).collect();
    }

    let next = AtomicUsize::new(0);
    let mut buckets: Vec<Vec<(usize, T)>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..threads.min(len) {
            handles.push(scope.spawn(|| {
                let mut local = Vec::new();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= len {
                        break;
                    }
                    local.push((i, f(i)));
                }
                local
            }));
        }
        for h in handles {
            buckets.push(h.join().expect("worker panicked"));
        }
    });

    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    for bucket in buckets {
        for (i, value) in bucket {
            slots[i] = Some(value);
        }
    }
    slots.into_iter().map(|s| s.expect("index covered")).collect()
}
