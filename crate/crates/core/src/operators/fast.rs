//! FFT-accelerated kernel applies.
//!
//! On a uniform midpoint grid every sector kernel is a short sum of
//! Toeplitz pieces (functions of `r - p = (j - i) Δx`) and Hankel pieces
//! (functions of `r + p = (i + j + 1) Δx`) acting on moment-weighted samples
//! `r^k f(r)`, plus a pointwise diagonal `W_i f_i` precomputed per grid.
//! Both piece types are linear convolutions, so one apply costs a handful of
//! FFTs instead of `O(N²)` kernel evaluations.
//!
//! Two identities keep the transform count at its minimum:
//! the Hankel pieces need the reversed signal, whose spectrum is
//! `twiddle[k] · conj(ĝ[k])` with `twiddle[k] = e^{-2πik(N-1)/L}`, so no
//! extra forward transforms are taken; and each output tier packs its
//! Toeplitz accumulation into the real part and its Hankel accumulation into
//! the imaginary part of a single inverse transform (both convolutions are
//! real).
//!
//! Near `p = 0` the `1/p^3`, `1/p^5` prefactors amplify transform roundoff
//! (the analytic cancellation between the quadratic and log pieces happens
//! per term in the direct sum, but across separately transformed pieces
//! here), so the first rows are recomputed by direct summation.
//!
//! Forward transforms of independent signals fan out across workers; the
//! combine and inverse stages are sequential and deterministic.

use crate::grid::RadialGrid;
use crate::operators::{direct, Sector};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

type C = Complex<f64>;

/// Direct-row band near `p = 0`, as a coordinate range per sector.
const L0_DIRECT_BAND: f64 = 0.02;
const L1_DIRECT_BAND: f64 = 0.08;
const L2_DIRECT_BAND: f64 = 0.15;
const MAX_DIRECT_ROWS: usize = 2048;

pub(crate) struct FastKernel {
    sector: Sector,
    n: usize,
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    fft_scratch_len: usize,
    // 1D pieces
    k1d_hat: Vec<C>,
    c_diag: f64,
    window: usize,
    // radial pieces
    t2_hat: Vec<C>,
    h2_hat: Vec<C>,
    tl_hat: Vec<C>,
    hl_hat: Vec<C>,
    /// spectrum of a reversed real signal: `twiddle[k] * conj(ĝ[k])`
    twiddle: Vec<C>,
    w: Vec<f64>,
    d2: Vec<f64>,
    dl: Vec<f64>,
    nodes: Vec<f64>,
    dx: f64,
    n_direct: usize,
    /// ln(k) and 1/k² tables for the direct-row band, indexed to 2N
    lntab: Vec<f64>,
    invsq: Vec<f64>,
}

pub(crate) struct FastScratch {
    pairs: Vec<(Vec<C>, Vec<C>)>,
}

struct Tier<'a> {
    /// (kernel spectrum, signal spectrum, coefficient) — Toeplitz side
    t_terms: &'a [(&'a [C], &'a [C], f64)],
    /// same for the Hankel side, taken against the reversed signals
    h_terms: &'a [(&'a [C], &'a [C], f64)],
}

impl FastKernel {
    pub(crate) fn new(grid: &RadialGrid, sector: Sector) -> Self {
        let n = grid.len();
        let dx = grid.dx();
        let one_d = sector.is_one_dimensional();
        let len = if one_d {
            (2 * n + 2).next_power_of_two()
        } else {
            (3 * n).next_power_of_two()
        };
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(len);
        let ifft = planner.plan_fft_inverse(len);
        let fft_scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        let mut scratch = vec![C::new(0.0, 0.0); fft_scratch_len];

        let inv_len = 1.0 / (len as f64);
        let mut hat = |fill: &dyn Fn(&mut [C])| -> Vec<C> {
            let mut buf = vec![C::new(0.0, 0.0); len];
            fill(&mut buf);
            fft.process_with_scratch(&mut buf, &mut scratch);
            for v in &mut buf {
                *v *= inv_len;
            }
            buf
        };

        let empty = Vec::new();
        let (k1d_hat, c_diag) = if one_d {
            let m = grid.half_cells();
            let k = hat(&|buf: &mut [C]| {
                for (t, slot) in buf.iter_mut().enumerate().take(2 * m + 1) {
                    let off = t as i64 - m as i64;
                    if off != 0 {
                        let mm = off as f64;
                        slot.re = 1.0 / (mm * mm * PI * dx);
                    }
                }
            });
            let mut c = 0.0;
            for mm in 1..=m {
                let v = mm as f64;
                c += 1.0 / (v * v);
            }
            (k, 2.0 * c / (PI * dx))
        } else {
            (empty.clone(), 0.0)
        };

        let needs_log = matches!(sector, Sector::L1 | Sector::L2);
        let (t2_hat, h2_hat, tl_hat, hl_hat) = if one_d {
            (empty.clone(), empty.clone(), empty.clone(), empty.clone())
        } else {
            let t2 = hat(&|buf: &mut [C]| {
                for (t, slot) in buf.iter_mut().enumerate().take(2 * n - 1) {
                    let off = t as i64 - (n as i64 - 1);
                    if off != 0 {
                        let mm = off as f64;
                        slot.re = 1.0 / (mm * mm * dx);
                    }
                }
            });
            let h2 = hat(&|buf: &mut [C]| {
                for (s, slot) in buf.iter_mut().enumerate().take(2 * n).skip(1) {
                    let ss = s as f64;
                    slot.re = 1.0 / (ss * ss * dx);
                }
            });
            let (tl, hl) = if needs_log {
                let tl = hat(&|buf: &mut [C]| {
                    for (t, slot) in buf.iter_mut().enumerate().take(2 * n - 1) {
                        let off = t as i64 - (n as i64 - 1);
                        if off != 0 {
                            slot.re = 2.0 * ((off.abs() as f64) * dx).ln() * dx;
                        }
                    }
                });
                let hl = hat(&|buf: &mut [C]| {
                    for (s, slot) in buf.iter_mut().enumerate().take(2 * n).skip(1) {
                        slot.re = 2.0 * ((s as f64) * dx).ln() * dx;
                    }
                });
                (tl, hl)
            } else {
                (empty.clone(), empty.clone())
            };
            (t2, h2, tl, hl)
        };

        let twiddle: Vec<C> = if one_d {
            Vec::new()
        } else {
            (0..len)
                .map(|k| {
                    let phase = -2.0 * PI * (k as f64) * ((n - 1) as f64) / (len as f64);
                    C::new(phase.cos(), phase.sin())
                })
                .collect()
        };

        let (w, d2, dl) = if one_d {
            (Vec::new(), Vec::new(), Vec::new())
        } else {
            let w = direct::w_sums(grid);
            let d2 = (0..n)
                .map(|i| {
                    let s = (2 * i + 1) as f64;
                    1.0 / (s * s * dx)
                })
                .collect();
            let dl = (0..n)
                .map(|i| 2.0 * (((2 * i + 1) as f64) * dx).ln() * dx)
                .collect();
            (w, d2, dl)
        };

        let band = match sector {
            Sector::OneDEven | Sector::OneDOdd => 0.0,
            Sector::L0Direct => L0_DIRECT_BAND,
            Sector::L1 => L1_DIRECT_BAND,
            Sector::L2 => L2_DIRECT_BAND,
        };
        let n_direct = if one_d {
            0
        } else {
            ((band / dx).ceil() as usize).clamp(2, MAX_DIRECT_ROWS).min(n)
        };
        let (lntab, invsq) = if one_d || n_direct == 0 {
            (Vec::new(), Vec::new())
        } else {
            let mut lntab = vec![0.0f64; 2 * n + 1];
            let mut invsq = vec![0.0f64; 2 * n + 1];
            for k in 1..=2 * n {
                let kk = k as f64;
                lntab[k] = kk.ln();
                invsq[k] = 1.0 / (kk * kk);
            }
            (lntab, invsq)
        };

        Self {
            sector,
            n,
            len,
            fft,
            ifft,
            fft_scratch_len,
            k1d_hat,
            c_diag,
            window: if one_d { grid.half_cells() } else { 0 },
            t2_hat,
            h2_hat,
            tl_hat,
            hl_hat,
            twiddle,
            w,
            d2,
            dl,
            nodes: grid.nodes().to_vec(),
            dx,
            n_direct,
            lntab,
            invsq,
        }
    }

    pub(crate) fn scratch(&self) -> FastScratch {
        let count = match self.sector {
            Sector::OneDEven | Sector::OneDOdd => 1,
            Sector::L0Direct => 2,
            Sector::L1 => 3,
            Sector::L2 => 4,
        };
        FastScratch {
            pairs: (0..count)
                .map(|_| {
                    (
                        vec![C::new(0.0, 0.0); self.len],
                        vec![C::new(0.0, 0.0); self.fft_scratch_len],
                    )
                })
                .collect(),
        }
    }

    pub(crate) fn apply(&self, f: &[f64], scratch: &mut FastScratch, serial: bool) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.n);
        let mut out = match self.sector {
            Sector::OneDEven | Sector::OneDOdd => self.apply_1d(f, scratch),
            Sector::L0Direct => self.apply_l0(f, scratch, serial),
            Sector::L1 => self.apply_l1(f, scratch, serial),
            Sector::L2 => self.apply_l2(f, scratch, serial),
        };
        if self.n_direct > 0 {
            let rows = crate::exec::map_nodes(self.n_direct, |i| self.direct_row(f, i));
            out[..self.n_direct].copy_from_slice(&rows);
        }
        out
    }

    /// Direct summation of one output row, identical math to the reference
    /// path but with tabulated `ln k` and `1/k²`; used for the small-p band.
    fn direct_row(&self, f: &[f64], i: usize) -> f64 {
        let n = self.n;
        let dx = self.dx;
        let inv_dx2 = 1.0 / (dx * dx);
        let p = self.nodes[i];
        let fi = f[i];
        let mut acc = 0.0;
        match self.sector {
            Sector::L0Direct => {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let m = i.abs_diff(j);
                    let s = i + j + 1;
                    let q = (self.invsq[m] - self.invsq[s]) * inv_dx2;
                    acc += (fi - f[j]) * self.nodes[j] * q;
                }
                acc * dx / (PI * p)
            }
            Sector::L1 => {
                let p2 = p * p;
                let p3 = p2 * p;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let r = self.nodes[j];
                    let m = i.abs_diff(j);
                    let s = i + j + 1;
                    let q = (self.invsq[m] - self.invsq[s]) * inv_dx2;
                    let lam = 2.0 * (self.lntab[m] - self.lntab[s]);
                    acc += (r / p) * (2.0 * fi - (r * r + p2) / p2 * f[j]) * q
                        - r * f[j] / p3 * lam;
                }
                acc * dx / (2.0 * PI)
            }
            Sector::L2 => {
                let p2 = p * p;
                let p4 = p2 * p2;
                let p5 = p4 * p;
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let r = self.nodes[j];
                    let r2 = r * r;
                    let r4 = r2 * r2;
                    let m = i.abs_diff(j);
                    let s = i + j + 1;
                    let q = (self.invsq[m] - self.invsq[s]) * inv_dx2;
                    let lam = 2.0 * (self.lntab[m] - self.lntab[s]);
                    acc += (r / p) * (4.0 * fi - f[j] * (3.0 * (r4 + p4) - 2.0 * r2 * p2) / p4)
                        * q
                        - 3.0 * f[j] * r * (r2 + p2) / p5 * lam;
                }
                acc * dx / (4.0 * PI)
            }
            _ => unreachable!(),
        }
    }

    fn fwd_into(&self, signal: &[f64], pair: &mut (Vec<C>, Vec<C>)) {
        let (buf, scr) = pair;
        for (slot, &v) in buf.iter_mut().zip(signal) {
            *slot = C::new(v, 0.0);
        }
        for slot in buf.iter_mut().skip(signal.len()) {
            *slot = C::new(0.0, 0.0);
        }
        self.fft.process_with_scratch(buf, scr);
    }

    fn batch_forward(&self, sigs: &[&[f64]], pairs: &mut [(Vec<C>, Vec<C>)], serial: bool) {
        debug_assert!(pairs.len() >= sigs.len());
        #[cfg(feature = "parallel")]
        if !serial {
            pairs[..sigs.len()]
                .par_iter_mut()
                .zip(sigs.par_iter())
                .for_each(|(pair, s)| self.fwd_into(s, pair));
            return;
        }
        let _ = serial;
        for (pair, s) in pairs[..sigs.len()].iter_mut().zip(sigs) {
            self.fwd_into(s, pair);
        }
    }

    /// Accumulate the tier's Toeplitz terms into the real channel and its
    /// Hankel terms (against reversed signals, via the twiddle identity)
    /// into the imaginary channel, then inverse transform in place.
    /// Output: `toeplitz_i = buf[i + n - 1].re`, `hankel_i = buf[i + n].im`.
    fn tier_ifft(&self, tier: &Tier<'_>, acc: &mut (Vec<C>, Vec<C>)) {
        let (buf, scr) = acc;
        buf.fill(C::new(0.0, 0.0));
        for &(khat, ghat, coef) in tier.t_terms {
            for ((slot, k), g) in buf.iter_mut().zip(khat).zip(ghat) {
                *slot += k * g * coef;
            }
        }
        for &(khat, ghat, coef) in tier.h_terms {
            for (((slot, k), g), tw) in buf
                .iter_mut()
                .zip(khat)
                .zip(ghat)
                .zip(&self.twiddle)
            {
                let rev_spec = tw * g.conj();
                let term = k * rev_spec * coef;
                // accumulate i * term
                slot.re -= term.im;
                slot.im += term.re;
            }
        }
        self.ifft.process_with_scratch(buf, scr);
    }

    fn apply_1d(&self, f: &[f64], scratch: &mut FastScratch) -> Vec<f64> {
        let pair = &mut scratch.pairs[0];
        self.fwd_into(f, pair);
        let (buf, scr) = pair;
        for (slot, k) in buf.iter_mut().zip(&self.k1d_hat) {
            *slot *= k;
        }
        self.ifft.process_with_scratch(buf, scr);
        // kernel spans [0, 2M] with its zero at M; output i reads index i + M
        let window = self.window;
        (0..self.n)
            .map(|i| self.c_diag * f[i] - buf[i + window].re)
            .collect()
    }

    fn apply_l0(&self, f: &[f64], scratch: &mut FastScratch, serial: bool) -> Vec<f64> {
        let n = self.n;
        let g1 = mul_nodes(&self.nodes, f, 1);
        let (fwd, rest) = scratch.pairs.split_at_mut(1);
        self.batch_forward(&[&g1], fwd, serial);
        let acc = &mut rest[0];
        self.tier_ifft(
            &Tier {
                t_terms: &[(&self.t2_hat, &fwd[0].0, 1.0)],
                h_terms: &[(&self.h2_hat, &fwd[0].0, 1.0)],
            },
            acc,
        );
        (0..n)
            .map(|i| {
                let q1 = acc.0[i + n - 1].re - acc.0[i + n].im + g1[i] * self.d2[i];
                (f[i] * self.w[i] - q1) / (PI * self.nodes[i])
            })
            .collect()
    }

    fn apply_l1(&self, f: &[f64], scratch: &mut FastScratch, serial: bool) -> Vec<f64> {
        let n = self.n;
        let g1 = mul_nodes(&self.nodes, f, 1);
        let g3 = mul_nodes(&self.nodes, f, 3);
        let (fwd, rest) = scratch.pairs.split_at_mut(2);
        self.batch_forward(&[&g1, &g3], fwd, serial);
        let acc = &mut rest[0];

        // tier a -> coefficient 1/p^3 : Q3 + L1
        self.tier_ifft(
            &Tier {
                t_terms: &[(&self.t2_hat, &fwd[1].0, 1.0), (&self.tl_hat, &fwd[0].0, 1.0)],
                h_terms: &[(&self.h2_hat, &fwd[1].0, 1.0), (&self.hl_hat, &fwd[0].0, 1.0)],
            },
            acc,
        );
        let qa: Vec<f64> = (0..n)
            .map(|i| acc.0[i + n - 1].re - acc.0[i + n].im + g3[i] * self.d2[i] + g1[i] * self.dl[i])
            .collect();
        // tier b -> coefficient 1/p : Q1
        self.tier_ifft(
            &Tier {
                t_terms: &[(&self.t2_hat, &fwd[0].0, 1.0)],
                h_terms: &[(&self.h2_hat, &fwd[0].0, 1.0)],
            },
            acc,
        );
        (0..n)
            .map(|i| {
                let p = self.nodes[i];
                let p3 = p * p * p;
                let qb = acc.0[i + n - 1].re - acc.0[i + n].im + g1[i] * self.d2[i];
                (2.0 * f[i] * self.w[i] / p - qa[i] / p3 - qb / p) / (2.0 * PI)
            })
            .collect()
    }

    fn apply_l2(&self, f: &[f64], scratch: &mut FastScratch, serial: bool) -> Vec<f64> {
        let n = self.n;
        let g1 = mul_nodes(&self.nodes, f, 1);
        let g3 = mul_nodes(&self.nodes, f, 3);
        let g5 = mul_nodes(&self.nodes, f, 5);
        let (fwd, rest) = scratch.pairs.split_at_mut(3);
        self.batch_forward(&[&g1, &g3, &g5], fwd, serial);
        let acc = &mut rest[0];

        // tier a -> 1/p^5 : 3 Q5 + 3 L3
        self.tier_ifft(
            &Tier {
                t_terms: &[(&self.t2_hat, &fwd[2].0, 3.0), (&self.tl_hat, &fwd[1].0, 3.0)],
                h_terms: &[(&self.h2_hat, &fwd[2].0, 3.0), (&self.hl_hat, &fwd[1].0, 3.0)],
            },
            acc,
        );
        let qa: Vec<f64> = (0..n)
            .map(|i| {
                acc.0[i + n - 1].re - acc.0[i + n].im
                    + 3.0 * g5[i] * self.d2[i]
                    + 3.0 * g3[i] * self.dl[i]
            })
            .collect();
        // tier b -> 1/p^3 : -2 Q3 + 3 L1
        self.tier_ifft(
            &Tier {
                t_terms: &[
                    (&self.t2_hat, &fwd[1].0, -2.0),
                    (&self.tl_hat, &fwd[0].0, 3.0),
                ],
                h_terms: &[
                    (&self.h2_hat, &fwd[1].0, -2.0),
                    (&self.hl_hat, &fwd[0].0, 3.0),
                ],
            },
            acc,
        );
        let qb: Vec<f64> = (0..n)
            .map(|i| {
                acc.0[i + n - 1].re - acc.0[i + n].im - 2.0 * g3[i] * self.d2[i]
                    + 3.0 * g1[i] * self.dl[i]
            })
            .collect();
        // tier c -> 1/p : 3 Q1
        self.tier_ifft(
            &Tier {
                t_terms: &[(&self.t2_hat, &fwd[0].0, 3.0)],
                h_terms: &[(&self.h2_hat, &fwd[0].0, 3.0)],
            },
            acc,
        );
        (0..n)
            .map(|i| {
                let p = self.nodes[i];
                let p2 = p * p;
                let p3 = p2 * p;
                let p5 = p3 * p2;
                let qc = acc.0[i + n - 1].re - acc.0[i + n].im + 3.0 * g1[i] * self.d2[i];
                (4.0 * f[i] * self.w[i] / p - qa[i] / p5 - qb[i] / p3 - qc / p) / (4.0 * PI)
            })
            .collect()
    }
}

fn mul_nodes(nodes: &[f64], f: &[f64], power: i32) -> Vec<f64> {
    nodes
        .iter()
        .zip(f)
        .map(|(&r, &v)| r.powi(power) * v)
        .collect()
}
