use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use crate::CensusError;

/// Samples per chunk. Chunk boundaries depend only on the sample count, so
/// the fold order is the same for every worker count.
pub const CHUNK: u64 = 4096;

/// Runs `body` over `0..n` in fixed chunks, one fresh accumulator per chunk,
/// then merges the chunk accumulators in index order.
///
/// With `workers > 1` and the `parallel` feature, chunks run on a dedicated
/// pool of that many threads; otherwise they run on the calling thread.
/// The first error (lowest chunk index among those that ran) is returned
/// and stops the scheduling of further chunks.
pub fn run_chunked<A, Init, Body, Merge>(
    n: u64,
    workers: usize,
    label: &str,
    init: Init,
    body: Body,
    merge: Merge,
) -> Result<A, CensusError>
where
    A: Send,
    Init: Fn() -> A + Sync,
    Body: Fn(&mut A, u64) -> Result<(), CensusError> + Sync,
    Merge: Fn(&mut A, A),
{
    let chunks = n.div_ceil(CHUNK);
    let stop = AtomicBool::new(false);
    let done = AtomicU64::new(0);
    let run_chunk = |c: u64| -> Option<Result<A, CensusError>> {
        if stop.load(Ordering::Relaxed) {
            return None;
        }
        let mut acc = init();
        let end = ((c + 1) * CHUNK).min(n);
        for i in c * CHUNK..end {
            if let Err(e) = body(&mut acc, i) {
                stop.store(true, Ordering::Relaxed);
                return Some(Err(e));
            }
        }
        let finished = done.fetch_add(1, Ordering::Relaxed) + 1;
        let step = (chunks / 10).max(1);
        if finished.is_multiple_of(step) || finished == chunks {
            log::info!("{label}: {finished}/{chunks} chunks, {} samples", (finished * CHUNK).min(n));
        }
        Some(Ok(acc))
    };
    let parts = dispatch(chunks, workers, &run_chunk)?;
    let mut total = init();
    let mut first_err = None;
    for part in parts.into_iter().flatten() {
        match part {
            Ok(acc) if first_err.is_none() => merge(&mut total, acc),
            Ok(_) => {}
            Err(e) => {
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(feature = "parallel")]
fn dispatch<T, F>(chunks: u64, workers: usize, f: &F) -> Result<Vec<T>, CensusError>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return Ok((0..chunks).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CensusError::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| (0..chunks).into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn dispatch<T, F>(chunks: u64, _workers: usize, f: &F) -> Result<Vec<T>, CensusError>
where
    F: Fn(u64) -> T,
{
    Ok((0..chunks).map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_of_squares(n: u64, workers: usize) -> Result<Vec<u64>, CensusError> {
        run_chunked(
            n,
            workers,
            "test",
            Vec::new,
            |acc: &mut Vec<u64>, i| {
                acc.push(i * i);
                Ok(())
            },
            |total, part| total.extend(part),
        )
    }

    #[test]
    fn order_is_independent_of_workers() {
        let n = 3 * CHUNK + 17;
        let seq = sum_of_squares(n, 1).unwrap();
        assert_eq!(seq.len() as u64, n);
        assert!(seq.iter().enumerate().all(|(i, &v)| v == (i * i) as u64));
        for w in [2, 4, 16] {
            assert_eq!(sum_of_squares(n, w).unwrap(), seq);
        }
        assert!(sum_of_squares(0, 4).unwrap().is_empty());
    }

    #[test]
    fn errors_stop_the_run() {
        let r: Result<u64, _> = run_chunked(
            10 * CHUNK,
            1,
            "test",
            || 0u64,
            |acc, i| {
                if i == CHUNK + 5 {
                    return Err(CensusError::EmptyCensus);
                }
                *acc += 1;
                Ok(())
            },
            |t, p| *t += p,
        );
        assert_eq!(r, Err(CensusError::EmptyCensus));
    }
}
