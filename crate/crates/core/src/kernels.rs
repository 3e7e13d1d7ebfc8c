//! Dense kernels shared by the unitary dynamics and the noise channels.
//!
//! Every per-step operation on a walk state is one of two shapes:
//! a map applied to each 2×2 coin block `B(i, j)` of the density operator,
//! or a weighted sum of coin-dependent displacements. Both only touch the
//! tracked support.

use num_complex::Complex64 as C64;

use crate::error::{Result, WalkError};
use crate::exec::{for_each_row, for_each_row_pair, Execution};
use crate::hilbert::{DensityOperator, PureState, Topology};
use crate::mat2::Mat2;

const ZERO: C64 = C64::new(0.0, 0.0);

/// One displacement term: `weight · D ρ D†`, where `D` moves coin-`c`
/// amplitudes by `offsets[c]` sites.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Displacement {
    pub weight: f64,
    pub offsets: [i64; 2],
}

/// `B(i, j) ← f(B(i, j))` for every position pair in the support.
pub(crate) fn map_coin_blocks<F>(rho: &mut DensityOperator, exec: Execution, f: F)
where
    F: Fn(&Mat2) -> Mat2 + Send + Sync,
{
    let dim = rho.space().dim();
    let n = 2 * dim;
    let (lo, hi) = rho.support();
    let data = rho.data_mut();
    let (top, bottom) = data.split_at_mut(n * dim);
    for_each_row_pair(exec, top, bottom, n, lo..hi + 1, |_, r0, r1| {
        for j in lo..=hi {
            let b = [[r0[j], r0[dim + j]], [r1[j], r1[dim + j]]];
            let m = f(&b);
            r0[j] = m[0][0];
            r0[dim + j] = m[0][1];
            r1[j] = m[1][0];
            r1[dim + j] = m[1][1];
        }
    });
}

pub(crate) fn map_coin_amplitudes(psi: &mut PureState, u: &Mat2) {
    let dim = psi.space().dim();
    let (top, bottom) = psi.amps_mut().split_at_mut(dim);
    for (a0, a1) in top.iter_mut().zip(bottom.iter_mut()) {
        let (x, y) = (*a0, *a1);
        *a0 = u[0][0] * x + u[0][1] * y;
        *a1 = u[1][0] * x + u[1][1] * y;
    }
}

fn moves(terms: &[Displacement], coin: usize, dir: i64) -> bool {
    terms.iter().any(|t| t.weight != 0.0 && t.offsets[coin] == dir)
}

/// Line-window overflow check for the density operator. Only the edge rows
/// and columns of coin sectors that move outward need to vanish.
fn check_density_edges(rho: &DensityOperator, terms: &[Displacement]) -> Result<()> {
    let dim = rho.space().dim();
    let n = 2 * dim;
    let (lo, hi) = rho.support();
    let data = rho.as_slice();
    for (edge, dir, side) in [(0usize, -1i64, "lower"), (dim - 1, 1, "upper")] {
        let touching = if dir < 0 { lo == 0 } else { hi == dim - 1 };
        if !touching {
            continue;
        }
        for c in 0..2 {
            if !moves(terms, c, dir) {
                continue;
            }
            let f = c * dim + edge;
            let row_nonzero = data[f * n..(f + 1) * n].iter().any(|x| *x != ZERO);
            let col_nonzero = (0..n).any(|r| data[r * n + f] != ZERO);
            if row_nonzero || col_nonzero {
                return Err(WalkError::WindowOverflow { side });
            }
        }
    }
    Ok(())
}

fn grown_support(support: (usize, usize), dim: usize, terms: &[Displacement]) -> (usize, usize) {
    let left = moves(terms, 0, -1) || moves(terms, 1, -1);
    let right = moves(terms, 0, 1) || moves(terms, 1, 1);
    let lo = if left { support.0.saturating_sub(1) } else { support.0 };
    let hi = if right { (support.1 + 1).min(dim - 1) } else { support.1 };
    (lo, hi)
}

/// `ρ ← Σ_t w_t D_t ρ D_t†`.
pub(crate) fn displace_density(
    rho: &mut DensityOperator,
    terms: &[Displacement],
    exec: Execution,
) -> Result<()> {
    let space = *rho.space();
    let dim = space.dim();
    let n = 2 * dim;
    let circle = space.topology() == Topology::Circle;
    if !circle {
        check_density_edges(rho, terms)?;
    }
    let support = if circle { (0, dim - 1) } else { grown_support(rho.support(), dim, terms) };
    let (lo, hi) = support;
    let terms: Vec<Displacement> = terms.iter().copied().filter(|t| t.weight != 0.0).collect();

    let (src, mut out) = rho.take_buffers();
    let src_ref = &src;
    let terms_ref = &terms;
    let row_kernel = move |r: usize, row: &mut [C64]| {
        let (c, i) = (r / dim, r % dim);
        for cc in 0..2 {
            let seg = &mut row[cc * dim + lo..=cc * dim + hi];
            seg.fill(ZERO);
            for t in terms_ref {
                let si = i as i64 - t.offsets[c];
                let si = if circle {
                    si.rem_euclid(dim as i64) as usize
                } else if (0..dim as i64).contains(&si) {
                    si as usize
                } else {
                    continue;
                };
                let src_row = &src_ref[(c * dim + si) * n + cc * dim..(c * dim + si) * n + (cc + 1) * dim];
                let dc = t.offsets[cc];
                let w = t.weight;
                if circle {
                    for (j, x) in (lo..=hi).zip(seg.iter_mut()) {
                        let sj = (j as i64 - dc).rem_euclid(dim as i64) as usize;
                        *x += src_row[sj] * w;
                    }
                } else {
                    // j - dc must land inside [0, dim)
                    let j_lo = (lo as i64).max(dc) as usize;
                    let j_hi = (hi as i64).min(dim as i64 - 1 + dc);
                    if j_hi < j_lo as i64 {
                        continue;
                    }
                    let j_hi = j_hi as usize;
                    let s_lo = (j_lo as i64 - dc) as usize;
                    let s = &src_row[s_lo..=s_lo + (j_hi - j_lo)];
                    let o = &mut seg[j_lo - lo..=j_hi - lo];
                    if w == 1.0 && terms_ref.len() == 1 {
                        o.copy_from_slice(s);
                    } else {
                        for (x, y) in o.iter_mut().zip(s) {
                            *x += y * w;
                        }
                    }
                }
            }
        }
    };
    for_each_row(exec, &mut out, n, lo..hi + 1, row_kernel);
    for_each_row(exec, &mut out, n, dim + lo..dim + hi + 1, row_kernel);

    rho.restore_buffers(out, src);
    // The old buffer becomes scratch; its support is inside the new one so
    // stale entries outside the new support are already zero.
    rho.set_support(support);
    Ok(())
}

/// Unitary displacement of a pure state (`offsets[c]` sites for coin `c`).
pub(crate) fn displace_pure(psi: &mut PureState, offsets: [i64; 2]) -> Result<()> {
    let space = *psi.space();
    let dim = space.dim();
    let circle = space.topology() == Topology::Circle;
    let amps = psi.amps_mut();
    if !circle {
        for (c, &d) in offsets.iter().enumerate() {
            let edge = match d {
                -1 => (0, "lower"),
                1 => (dim - 1, "upper"),
                _ => continue,
            };
            if amps[c * dim + edge.0] != ZERO {
                return Err(WalkError::WindowOverflow { side: edge.1 });
            }
        }
    }
    for (c, &d) in offsets.iter().enumerate() {
        let block = &mut amps[c * dim..(c + 1) * dim];
        let r = d.rem_euclid(dim as i64) as usize;
        if r != 0 {
            // on a line the wrapped element is the zero edge checked above
            block.rotate_right(r);
        }
    }
    Ok(())
}
