//! Deduplication of large integer key streams produced in parallel chunks.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

/// Universes up to this many keys use a shared atomic bitmap (128 MiB).
const BITMAP_LIMIT: u64 = 1 << 30;

/// Sorted distinct keys from `chunks` producers. `produce(i, emit)` must emit
/// keys below `universe`. The result is independent of scheduling.
pub(crate) fn distinct_keys<F>(universe: u64, chunks: usize, produce: F) -> Vec<u64>
where
    F: Fn(usize, &mut dyn FnMut(u64)) + Sync,
{
    if universe <= BITMAP_LIMIT {
        let words: Vec<AtomicU64> = (0..universe.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        (0..chunks).into_par_iter().for_each(|i| {
            produce(i, &mut |k| {
                words[(k / 64) as usize].fetch_or(1 << (k % 64), Ordering::Relaxed);
            });
        });
        let mut out = Vec::new();
        for (w, word) in words.into_iter().enumerate() {
            let mut bits = word.into_inner();
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                out.push(w as u64 * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    } else {
        let mut all: Vec<u64> = (0..chunks)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut local = Vec::new();
                produce(i, &mut |k| local.push(k));
                local.sort_unstable();
                local.dedup();
                local
            })
            .collect();
        all.par_sort_unstable();
        all.dedup();
        all
    }
}

/// Run-length counts of a sorted slice.
pub(crate) fn run_lengths<T: PartialEq>(sorted: &[T]) -> impl Iterator<Item = u64> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= sorted.len() {
            return None;
        }
        let start = i;
        while i < sorted.len() && sorted[i] == sorted[start] {
            i += 1;
        }
        Some((i - start) as u64)
    })
}
