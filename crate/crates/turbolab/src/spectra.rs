//! Exact weight distributions for inner (convolutional) and outer
//! (blockwise) encoders, in arbitrary-precision integers.
//!
//! The inner count `a_N(w, d)` is the number of (memory, information)
//! sequences of weight `w` that are part of at least one undetected input
//! whose convolutional output has weight exactly `d`; `a_N(w, <= d)` asks
//! for weight at most `d`. When the undetected stabilizer choice is unique
//! (classical alphabets, or `s = 0`), the "part of" quantifier degenerates
//! and the cumulative table is the running sum of the exact one; with real
//! stabilizer freedom the same pair can realize several output weights, so
//! the running sum only upper-bounds the cumulative count.

use crate::convolutional::achievable_weights;
use crate::encoders::{weight_of_coords, BlockEncoder, SeedMorphism};
use crate::gf2::mask;
use crate::{Budgets, Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Exact counts over the (input weight, output weight) grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumTable {
    pub n: usize,
    pub w_max: usize,
    pub d_max: u64,
    /// True when `w_max` covers every input of the sweep.
    pub complete_w: bool,
    pub cumulative: bool,
    pub counts: BTreeMap<(usize, u64), BigUint>,
}

impl SpectrumTable {
    pub fn get(&self, w: usize, d: u64) -> BigUint {
        self.counts.get(&(w, d)).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,d,count\n");
        for (&(w, d), c) in &self.counts {
            out.push_str(&format!("{w},{d},{c}\n"));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct InnerSpectra {
    pub exact: SpectrumTable,
    pub cumulative: SpectrumTable,
}

impl InnerSpectra {
    pub fn a(&self, w: usize, d: u64) -> BigUint {
        self.exact.get(w, d)
    }

    pub fn a_le(&self, w: usize, d: u64) -> BigUint {
        self.cumulative.get(w, d)
    }
}

/// Number of (memory, information) tuples of weight at most `w_max`.
fn sweep_size(slots: usize, w_max: usize, nonzero_values: u64) -> BigUint {
    let mut total = BigUint::zero();
    for w in 0..=w_max.min(slots) {
        total += crate::bounds::binomial(slots as u64, w as u64)
            * BigUint::from(nonzero_values).pow(w as u32);
    }
    total
}

/// Exact inner spectrum by enumerating weight-bounded supports.
pub fn inner_spectrum(
    seed: &SeedMorphism,
    n_steps: usize,
    w_max: usize,
    d_max: u64,
    budgets: &Budgets,
) -> Result<InnerSpectra> {
    let slots = seed.m() + seed.k() * n_steps;
    let w_max = w_max.min(slots);
    // Shortcut for degenerate stabilizer choice: a step dynamic program
    // covers all weights at once in polynomial time.
    if seed.z_step_choices(budgets)?.len() == 1 && slots <= 10_000 {
        let all = inner_spectrum_unique_choice(seed, n_steps, d_max, budgets)?;
        return Ok(restrict_w(&all, w_max));
    }
    let nonzero = seed.space().size() - 1;
    let size = sweep_size(slots, w_max, nonzero);
    if size > BigUint::from(budgets.max_spectrum_inputs) {
        return Err(Error::BudgetExceeded {
            what: "inner spectrum enumeration".into(),
            needed: u64::try_from(&size).unwrap_or(u64::MAX),
            limit: budgets.max_spectrum_inputs,
        });
    }

    let supports = enumerate_supports(slots, w_max);
    let b = seed.space().bits() as usize;
    let maps = supports
        .par_iter()
        .map(|support| {
            let mut exact: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
            let mut by_min: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
            let w = support.len();
            // odometer over nonzero letter values on the support
            let mut values = vec![1u64; w];
            loop {
                let mut mem = 0u64;
                let mut info = vec![0u64; n_steps];
                for (slot, &v) in support.iter().zip(&values) {
                    if *slot < seed.m() {
                        mem |= v << (slot * b);
                    } else {
                        let pos = slot - seed.m();
                        let block = pos / seed.k();
                        let within = pos % seed.k();
                        info[block] |= v << (within * b);
                    }
                }
                let ach = achievable_weights(seed, mem, &info, d_max, true, budgets)?;
                for &d in &ach {
                    *exact.entry((w, d)).or_default() += 1u32;
                }
                if let Some(&dmin) = ach.first() {
                    *by_min.entry((w, dmin)).or_default() += 1u32;
                }
                // advance
                let mut i = 0;
                loop {
                    if i == w {
                        return Ok((exact, by_min));
                    }
                    values[i] += 1;
                    if values[i] <= nonzero {
                        break;
                    }
                    values[i] = 1;
                    i += 1;
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut exact: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
    let mut by_min: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
    for (e, m) in maps {
        for (k, v) in e {
            *exact.entry(k).or_default() += v;
        }
        for (k, v) in m {
            *by_min.entry(k).or_default() += v;
        }
    }
    Ok(build_tables(
        n_steps,
        w_max,
        d_max,
        w_max == slots,
        exact,
        by_min,
    ))
}

fn build_tables(
    n: usize,
    w_max: usize,
    d_max: u64,
    complete_w: bool,
    exact: BTreeMap<(usize, u64), BigUint>,
    by_min: BTreeMap<(usize, u64), BigUint>,
) -> InnerSpectra {
    // cumulative over d from the by-minimum histogram
    let mut cumulative: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
    for w in 0..=w_max {
        let mut acc = BigUint::zero();
        for d in 0..=d_max {
            if let Some(v) = by_min.get(&(w, d)) {
                acc += v;
            }
            if !acc.is_zero() {
                cumulative.insert((w, d), acc.clone());
            }
        }
    }
    InnerSpectra {
        exact: SpectrumTable {
            n,
            w_max,
            d_max,
            complete_w,
            cumulative: false,
            counts: exact,
        },
        cumulative: SpectrumTable {
            n,
            w_max,
            d_max,
            complete_w,
            cumulative: true,
            counts: cumulative,
        },
    }
}

fn restrict_w(all: &InnerSpectra, w_max: usize) -> InnerSpectra {
    let filter = |t: &SpectrumTable| SpectrumTable {
        n: t.n,
        w_max: w_max.min(t.w_max),
        d_max: t.d_max,
        complete_w: w_max >= t.w_max && t.complete_w,
        cumulative: t.cumulative,
        counts: t
            .counts
            .iter()
            .filter(|((w, _), _)| *w <= w_max)
            .map(|(k, v)| (*k, v.clone()))
            .collect(),
    };
    InnerSpectra {
        exact: filter(&all.exact),
        cumulative: filter(&all.cumulative),
    }
}

/// Step dynamic program with exact counts, valid when the undetected
/// stabilizer choice per step is unique. Covers every input weight.
pub fn inner_spectrum_unique_choice(
    seed: &SeedMorphism,
    n_steps: usize,
    d_max: u64,
    budgets: &Budgets,
) -> Result<InnerSpectra> {
    let choices = seed.z_step_choices(budgets)?;
    if choices.len() != 1 {
        return Err(Error::Spec(
            "step-count dynamic program requires a unique stabilizer choice".into(),
        ));
    }
    let stab = choices[0];
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "spectrum state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    let w_cap = seed.m() + seed.k() * n_steps;
    let d_cap = (d_max + 1) as usize; // d == d_max + 1 is the overflow bucket
    let idx = |state: usize, w: usize, d: usize| (state * (w_cap + 1) + w) * (d_cap + 1) + d;
    let mut dp: Vec<BigUint> = vec![BigUint::zero(); num_states * (w_cap + 1) * (d_cap + 1)];
    for state in 0..num_states {
        let w0 = weight_of_coords(state as u64, b, seed.m());
        dp[idx(state, w0, 0)] = BigUint::one();
    }
    // precompute step images per (state, info letter block)
    let info_values: Vec<u64> = (0..(1u64 << (b * seed.k()))).collect();
    let step_table: Vec<(usize, usize, usize)> = (0..num_states)
        .flat_map(|state| {
            let seed = &seed;
            info_values.iter().map(move |&l| {
                let (p, m2) = seed.step_coords(state as u64, l, stab);
                (
                    m2 as usize,
                    weight_of_coords(l, b, seed.k()),
                    weight_of_coords(p, b, seed.n()),
                )
            })
        })
        .collect();
    for _ in 0..n_steps {
        let mut next: Vec<BigUint> = vec![BigUint::zero(); dp.len()];
        for state in 0..num_states {
            for w in 0..=w_cap {
                for d in 0..=d_cap {
                    let cur = &dp[idx(state, w, d)];
                    if cur.is_zero() {
                        continue;
                    }
                    for (li, _) in info_values.iter().enumerate() {
                        let (m2, lw, pw) = step_table[state * info_values.len() + li];
                        let nw = w + lw;
                        if nw > w_cap {
                            continue;
                        }
                        let nd = (d + pw).min(d_cap);
                        next[idx(m2, nw, nd)] += cur;
                    }
                }
            }
        }
        dp = next;
    }
    let mut exact: BTreeMap<(usize, u64), BigUint> = BTreeMap::new();
    for state in 0..num_states {
        let extra = weight_of_coords(state as u64, b, seed.m());
        for w in 0..=w_cap {
            for d in 0..=d_cap {
                let cur = &dp[idx(state, w, d)];
                if cur.is_zero() {
                    continue;
                }
                let total_d = d + extra;
                if d == d_cap || total_d > d_max as usize {
                    continue; // beyond the tracked output range
                }
                *exact.entry((w, total_d as u64)).or_default() += cur;
            }
        }
    }
    // unique stabilizer choice: each pair has exactly one output weight
    let by_min = exact.clone();
    Ok(build_tables(n_steps, w_cap, d_max, true, exact, by_min))
}

/// The outer blockwise distribution `a^{(x)N}(d)`: input sequences with
/// undetected stabilizer blocks, nontrivial information part, and output
/// weight exactly `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterSpectrum {
    pub n_blocks: usize,
    pub block_len: usize,
    pub counts: Vec<BigUint>,
}

impl OuterSpectrum {
    pub fn a(&self, d: u64) -> BigUint {
        self.counts
            .get(d as usize)
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    pub fn d_range(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,count\n");
        for (d, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }
}

/// Weight enumerators of one block over undetected inputs, split by whether
/// the information part is trivial. Index = output weight.
pub fn per_block_enumerators(
    encoder: &BlockEncoder,
    budgets: &Budgets,
) -> Result<(Vec<BigUint>, Vec<BigUint>)> {
    let b = encoder.space().bits() as usize;
    let info_mask = mask(b * encoder.k());
    let mut all = vec![BigUint::zero(); encoder.n() + 1];
    let mut trivial = vec![BigUint::zero(); encoder.n() + 1];
    for coords in encoder.undetected_inputs(budgets)? {
        let w = weight_of_coords(encoder.apply_coords(coords), b, encoder.n());
        all[w] += 1u32;
        if coords & info_mask == 0 {
            trivial[w] += 1u32;
        }
    }
    Ok((all, trivial))
}

fn poly_mul(a: &[BigUint], b: &[BigUint], cap: usize) -> Vec<BigUint> {
    let len = (a.len() + b.len() - 1).min(cap + 1);
    let mut out = vec![BigUint::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn poly_pow(base: &[BigUint], e: usize, cap: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); 1];
    out[0] = BigUint::one();
    for _ in 0..e {
        out = poly_mul(&out, base, cap);
    }
    out
}

/// Exact `a^{(x)N}(d)` for all `d` up to `d_max` (defaults to the full
/// output length) by N-fold convolution of per-block enumerators, minus the
/// all-trivial-information contribution.
pub fn outer_spectrum(
    encoder: &BlockEncoder,
    n_blocks: usize,
    d_max: Option<u64>,
    budgets: &Budgets,
) -> Result<OuterSpectrum> {
    let full = encoder.n() * n_blocks;
    let cap = d_max.map(|d| d as usize).unwrap_or(full).min(full);
    let (all, trivial) = per_block_enumerators(encoder, budgets)?;
    let all_n = poly_pow(&all, n_blocks, cap);
    let trivial_n = poly_pow(&trivial, n_blocks, cap);
    let mut counts = vec![BigUint::zero(); cap + 1];
    for d in 0..=cap {
        let a = all_n.get(d).cloned().unwrap_or_else(BigUint::zero);
        let t = trivial_n.get(d).cloned().unwrap_or_else(BigUint::zero);
        counts[d] = a - t;
    }
    Ok(OuterSpectrum {
        n_blocks,
        block_len: encoder.n(),
        counts,
    })
}

fn enumerate_supports(slots: usize, w_max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut current = Vec::new();
    fn rec(start: usize, slots: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            return;
        }
        for i in start..slots {
            current.push(i);
            out.push(current.clone());
            rec(i + 1, slots, left - 1, current, out);
            current.pop();
        }
    }
    rec(0, slots, w_max, &mut current, &mut out);
    out
}
