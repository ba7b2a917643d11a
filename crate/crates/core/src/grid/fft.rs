//! Unnormalized multi-dimensional FFT over row-major `nᵈ` arrays.

use crate::C64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// Below this many points the transform runs on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 14;

/// In-place unnormalized transform along every axis.
pub(crate) fn transform(data: &mut [C64], n: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, direction);
    let parallel = data.len() >= PARALLEL_THRESHOLD;
    let mut work = Vec::new();
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            run_lines(&*fft, data, n, parallel);
            continue;
        }
        // Gather lines of this axis into contiguous storage, transform, scatter back.
        work.resize(data.len(), C64::default());
        let block = n * stride;
        gather(data, &mut work, n, stride, block, parallel);
        run_lines(&*fft, &mut work, n, parallel);
        scatter(&work, data, n, stride, block, parallel);
    }
}

fn run_lines(fft: &dyn Fft<f64>, data: &mut [C64], n: usize, parallel: bool) {
    let scratch_len = fft.get_inplace_scratch_len();
    if parallel {
        let lines_per_task = (PARALLEL_THRESHOLD / n).max(1);
        data.par_chunks_mut(n * lines_per_task).for_each(|chunk| {
            let mut scratch = vec![C64::default(); scratch_len];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    } else {
        let mut scratch = vec![C64::default(); scratch_len];
        fft.process_with_scratch(data, &mut scratch);
    }
}

// Within each block of `n * stride` entries, element (j, s) sits at j*stride + s;
// the gathered line s holds it at s*n + j.
fn gather(src: &[C64], dst: &mut [C64], n: usize, stride: usize, block: usize, parallel: bool) {
    let body = |(s_blk, d_blk): (&[C64], &mut [C64])| {
        for s in 0..stride {
            let line = &mut d_blk[s * n..(s + 1) * n];
            for (j, v) in line.iter_mut().enumerate() {
                *v = s_blk[j * stride + s];
            }
        }
    };
    if parallel {
        src.par_chunks(block).zip(dst.par_chunks_mut(block)).for_each(body);
    } else {
        src.chunks(block).zip(dst.chunks_mut(block)).for_each(body);
    }
}

fn scatter(src: &[C64], dst: &mut [C64], n: usize, stride: usize, block: usize, parallel: bool) {
    let body = |(s_blk, d_blk): (&[C64], &mut [C64])| {
        for s in 0..stride {
            let line = &s_blk[s * n..(s + 1) * n];
            for (j, v) in line.iter().enumerate() {
                d_blk[j * stride + s] = *v;
            }
        }
    };
    if parallel {
        src.par_chunks(block).zip(dst.par_chunks_mut(block)).for_each(body);
    } else {
        src.chunks(block).zip(dst.chunks_mut(block)).for_each(body);
    }
}
