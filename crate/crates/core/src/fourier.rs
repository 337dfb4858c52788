//! Continuous-normalization Fourier transform on periodic grids.
//!
//! `fourier_transform` returns samples of `f^(w) = int f(x) e^{-2 pi i x.w} dx`
//! on the dual grid `{k / L}`, approximated by `h^d` times the DFT with the
//! phase of the grid origin folded in and the output fftshifted so that index
//! `N/2` holds `w = 0`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Unnormalized DFT over every axis of a row-major `n^dim` array.
///
/// With `ordered = false` the 2-d result is left transposed, which is enough
/// when only the multiset of output values matters.
pub(crate) fn dft_nd(buf: &mut [Complex64], n: usize, dim: usize, inverse: bool, ordered: bool) {
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    if dim == 2 {
        transpose_square(buf, n);
        fft.process_with_scratch(buf, &mut scratch);
        if ordered {
            transpose_square(buf, n);
        }
    }
}

/// `e^{sign 2 pi i k x0 / L}` for each FFT slot along one axis.
fn origin_phases(grid: &Grid, sign: f64) -> Vec<Complex64> {
    let n = grid.points_per_dim();
    let x0 = grid.origin();
    let l = grid.extent();
    (0..n)
        .map(|slot| {
            let k = grid.signed_index(slot) as f64;
            // k * x0 / L is a half-integer multiple for the standard grid; reduce first.
            let turns = (k * x0 / l).rem_euclid(1.0);
            Complex64::from_polar(1.0, sign * 2.0 * PI * turns)
        })
        .collect()
}

fn shifted_index(grid: &Grid, slots: [usize; 2]) -> usize {
    let n = grid.points_per_dim();
    let half = (n / 2) as i64;
    let s = |slot: usize| (grid.signed_index(slot) + half) as usize;
    if grid.dim() == 1 {
        s(slots[0])
    } else {
        s(slots[0]) * n + s(slots[1])
    }
}

/// Samples of the continuous Fourier transform on `f.grid().dual()`.
pub fn fourier_transform(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let n = grid.points_per_dim();
    let mut buf = f.values().to_vec();
    dft_nd(&mut buf, n, grid.dim(), false, true);
    let phase = origin_phases(&grid, -1.0);
    let scale = grid.cell_volume();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, v) in buf.iter().enumerate() {
        let slots = grid.unflatten(flat);
        let mut ph = phase[slots[0]];
        if grid.dim() == 2 {
            ph *= phase[slots[1]];
        }
        out[shifted_index(&grid, slots)] = v * ph * scale;
    }
    GridFunction::from_raw(grid.dual(), out)
}

/// Exact inverse of [`fourier_transform`] back onto `target`.
///
/// `target.dual()` must be the grid `fhat` lives on; `target` may be half-offset.
pub fn inverse_fourier_transform(fhat: &GridFunction, target: &Grid) -> Result<GridFunction> {
    let dual = target.dual();
    let fg = fhat.grid();
    if fg.dim() != dual.dim()
        || fg.points_per_dim() != dual.points_per_dim()
        || (fg.extent() - dual.extent()).abs() > 1e-12 * dual.extent()
    {
        return Err(Error::GridMismatch(format!("{fg:?} is not the dual of {target:?}")));
    }
    let grid = *target;
    let n = grid.points_per_dim();
    let phase = origin_phases(&grid, 1.0);
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, slot) in buf.iter_mut().enumerate() {
        let slots = grid.unflatten(flat);
        let mut ph = phase[slots[0]];
        if grid.dim() == 2 {
            ph *= phase[slots[1]];
        }
        *slot = fhat.values()[shifted_index(&grid, slots)] * ph;
    }
    dft_nd(&mut buf, n, grid.dim(), true, true);
    let scale = grid.freq_spacing().powi(grid.dim() as i32);
    for v in &mut buf {
        *v *= scale;
    }
    GridFunction::new(grid, buf)
}

/// Periodic convolution `(k * u)(x) = sum_y k(x - y) u(y) h^d`, where `k` is
/// sampled on the standard grid and read as a function of displacement.
pub fn periodic_convolve(kernel: &GridFunction, u: &GridFunction) -> Result<GridFunction> {
    let grid = *u.grid();
    if kernel.grid().is_half_offset() {
        return Err(Error::InvalidInput("convolution kernel must sit on a standard grid".into()));
    }
    if kernel.grid().dim() != grid.dim()
        || kernel.grid().points_per_dim() != grid.points_per_dim()
        || kernel.grid().extent() != grid.extent()
    {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", kernel.grid(), grid)));
    }
    let n = grid.points_per_dim();
    let half = n / 2;
    // Displacement m*h lives at node m + N/2 of the kernel grid.
    let mut kbuf = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, slot) in kbuf.iter_mut().enumerate() {
        let [a, b] = grid.unflatten(flat);
        let src = if grid.dim() == 1 {
            [(a + half) % n, 0]
        } else {
            [(a + half) % n, (b + half) % n]
        };
        *slot = kernel.values()[grid.flatten(src)];
    }
    let mut ubuf = u.values().to_vec();
    dft_nd(&mut kbuf, n, grid.dim(), false, true);
    dft_nd(&mut ubuf, n, grid.dim(), false, true);
    for (x, k) in ubuf.iter_mut().zip(&kbuf) {
        *x *= k;
    }
    dft_nd(&mut ubuf, n, grid.dim(), true, true);
    let scale = grid.cell_volume() / grid.len() as f64;
    for v in &mut ubuf {
        *v *= scale;
    }
    GridFunction::new(grid, ubuf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, make_grid};

    fn gaussian(grid: Grid, c: Complex64) -> GridFunction {
        GridFunction::from_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1]) * PI / c).exp()).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = make_grid(1, 8.0, 64).unwrap();
        let z = GridFunction::zeros(g);
        assert!(fourier_transform(&z).values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gaussian_is_self_dual_2d() {
        let g = make_grid(2, 16.0, 128).unwrap();
        let f = gaussian(g, Complex64::new(1.0, 0.0));
        let fh = fourier_transform(&f);
        let expect = gaussian(*fh.grid(), Complex64::new(1.0, 0.0));
        assert!(fh.rel_l2_error(&expect) < 1e-10);
    }

    #[test]
    fn inversion_on_offset_grid() {
        let g = make_grid(1, 8.0, 64).unwrap().with_half_offset();
        let f = GridFunction::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), x[0].sin() * 0.1)).unwrap();
        let back = inverse_fourier_transform(&fourier_transform(&f), &g).unwrap();
        assert!(back.rel_l2_error(&f) < 1e-13);
    }

    #[test]
    fn inverse_rejects_wrong_target() {
        let g = make_grid(1, 8.0, 64).unwrap();
        let fh = fourier_transform(&GridFunction::zeros(g));
        let wrong = make_grid(1, 4.0, 64).unwrap();
        assert!(inverse_fourier_transform(&fh, &wrong).is_err());
    }

    #[test]
    fn parseval_holds_for_grid_pairing() {
        let g = make_grid(1, 8.0, 128).unwrap();
        let f = gaussian(g, Complex64::new(0.5, 0.3));
        let h = GridFunction::from_fn(g, |x| Complex64::new((-(x[0] - 1.0).powi(2)).exp(), 0.0)).unwrap();
        let lhs = inner_product(&f, &h).unwrap();
        let rhs = inner_product(&fourier_transform(&f), &fourier_transform(&h)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
    }
}
