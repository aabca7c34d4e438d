//! Turbo composition: blockwise outer encoder, interleaver, inner
//! convolutional encoder; exact instance distances and Monte Carlo
//! experiments over uniformly random interleavers.
//!
//! An interleaver permutes letter positions and then applies one letter
//! automorphism per position. Sampling is a Fisher–Yates shuffle plus
//! independent uniform picks from the automorphism group; the letter maps
//! are not constrained to preserve the undetected subspace (an optional
//! flag restricts them for comparison runs).

use crate::alphabet::{automorphism_group, LetterAutomorphism, LetterSpace, Role, Word};
use crate::convolutional::{conv_apply, ConvInput};
use crate::encoders::{weight_of_coords, BlockEncoder, Distance, SeedMorphism};
use crate::gf2::mask;
use crate::{Budgets, Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Public per-trial seed derivation, so parallel and serial runs agree:
/// the splitmix64 finalizer applied to `master + (index+1) * golden`.
pub fn mix64(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Interleaver {
    space: LetterSpace,
    /// Output position j takes input position perm[j].
    perm: Vec<usize>,
    autos: Vec<LetterAutomorphism>,
}

impl Interleaver {
    pub fn new(space: LetterSpace, perm: Vec<usize>, autos: Vec<LetterAutomorphism>) -> Result<Self> {
        let n = perm.len();
        if autos.len() != n {
            return Err(Error::Dimension(format!(
                "{} automorphisms for {n} positions",
                autos.len()
            )));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Spec("perm is not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(Self { space, perm, autos })
    }

    pub fn identity(space: LetterSpace, size: usize) -> Self {
        Self {
            space,
            perm: (0..size).collect(),
            autos: vec![LetterAutomorphism::identity(space); size],
        }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn sample<R: Rng>(rng: &mut R, size: usize, space: LetterSpace) -> Result<Self> {
        Self::sample_with(rng, size, space, false)
    }

    /// `z_preserving` restricts the per-letter maps to those fixing the
    /// undetected subspace setwise; the plain definition imposes no such
    /// constraint.
    pub fn sample_with<R: Rng>(
        rng: &mut R,
        size: usize,
        space: LetterSpace,
        z_preserving: bool,
    ) -> Result<Self> {
        let mut group = automorphism_group(space)?;
        if z_preserving {
            group.retain(|a| a.preserves_z(space));
        }
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(rng);
        let autos = (0..size)
            .map(|_| group[rng.gen_range(0..group.len())].clone())
            .collect();
        Self::new(space, perm, autos)
    }

    pub fn apply(&self, input: &Word) -> Result<Word> {
        if input.len() != self.perm.len() {
            return Err(Error::Dimension(format!(
                "interleaver size {} vs word length {}",
                self.perm.len(),
                input.len()
            )));
        }
        let mut out = Word::zero(self.space, input.len());
        for (j, (&src, auto)) in self.perm.iter().zip(&self.autos).enumerate() {
            out.set_letter(j, auto.apply(input.letter(src)));
        }
        Ok(out)
    }

    pub fn apply_inverse(&self, output: &Word) -> Result<Word> {
        if output.len() != self.perm.len() {
            return Err(Error::Dimension("size mismatch".into()));
        }
        let mut out = Word::zero(self.space, output.len());
        for (j, (&dst, auto)) in self.perm.iter().zip(&self.autos).enumerate() {
            out.set_letter(dst, auto.inverse().apply(output.letter(j)));
        }
        Ok(out)
    }
}

/// Eligible lengths: `N n_out = N_in k_in + m_in` with `N_in >= 1`.
pub fn eligible_lengths(
    n_out: usize,
    k_in: usize,
    m_in: usize,
    range: std::ops::RangeInclusive<usize>,
) -> Vec<(usize, usize)> {
    if k_in == 0 {
        return Vec::new();
    }
    range
        .filter_map(|n| {
            let total = n * n_out;
            if total <= m_in {
                return None;
            }
            let rest = total - m_in;
            (rest.is_multiple_of(k_in) && rest / k_in >= 1).then_some((n, rest / k_in))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct TurboInstance {
    pub outer: BlockEncoder,
    pub inner: SeedMorphism,
    pub interleaver: Interleaver,
    /// Outer block count N.
    pub n_blocks: usize,
    /// Inner step count.
    pub n_inner: usize,
}

impl TurboInstance {
    pub fn new(
        outer: BlockEncoder,
        inner: SeedMorphism,
        interleaver: Interleaver,
        n_blocks: usize,
    ) -> Result<Self> {
        if outer.space() != inner.space() {
            return Err(Error::SpaceMismatch);
        }
        let total = n_blocks * outer.n();
        if interleaver.size() != total {
            return Err(Error::Dimension(format!(
                "interleaver size {} vs {total} interleaved positions",
                interleaver.size()
            )));
        }
        if inner.k() == 0 || total <= inner.m() || !(total - inner.m()).is_multiple_of(inner.k()) {
            return Err(Error::Ineligible {
                n: n_blocks,
                n_out: outer.n(),
                k_in: inner.k(),
                m_in: inner.m(),
            });
        }
        let n_inner = (total - inner.m()) / inner.k();
        Ok(Self {
            outer,
            inner,
            interleaver,
            n_blocks,
            n_inner,
        })
    }

    /// Information length of the composed encoder.
    pub fn info_len(&self) -> usize {
        self.n_blocks * self.outer.k()
    }

    /// Physical output length, terminal memory included.
    pub fn output_len(&self) -> usize {
        self.n_inner * self.inner.n() + self.inner.m()
    }

    /// Split an interleaved word into inner memory and information blocks.
    fn split_inner_input(&self, permuted: &Word) -> (Word, Vec<Word>) {
        let m = self.inner.m();
        let k = self.inner.k();
        let mem = permuted.slice(0, m);
        let info = (0..self.n_inner)
            .map(|i| permuted.slice(m + i * k, k))
            .collect();
        (mem, info)
    }

    /// The three-stage pipeline: blockwise outer encode, interleave,
    /// specialize the first letters into inner memory, insert the inner
    /// stabilizer blocks, run the inner convolutional encoder. The whole
    /// output, terminal memory included, is physical.
    pub fn apply(
        &self,
        info: &[Word],
        stab: &[Word],
        inner_stab: &[Word],
    ) -> Result<Word> {
        if info.len() != self.n_blocks || stab.len() != self.n_blocks {
            return Err(Error::Dimension(format!(
                "expected {} outer blocks, got {} info / {} stab",
                self.n_blocks,
                info.len(),
                stab.len()
            )));
        }
        if inner_stab.len() != self.n_inner {
            return Err(Error::Dimension(format!(
                "expected {} inner stabilizer blocks, got {}",
                self.n_inner,
                inner_stab.len()
            )));
        }
        let encoded = self.outer.blockwise_apply(info, stab)?;
        let permuted = self.interleaver.apply(&encoded)?;
        let (mem, inner_info) = self.split_inner_input(&permuted);
        let conv_in = ConvInput::new(mem, inner_info, inner_stab.to_vec())?;
        let out = conv_apply(&self.inner, &conv_in)?;
        let word = out.output_word()?;
        let len = word.len();
        word.with_roles(vec![(Role::Physical, len)])
    }

    /// Invert the pipeline, recovering outer information, outer stabilizer
    /// and inner stabilizer blocks.
    pub fn decode(&self, output: &Word) -> Result<(Vec<Word>, Vec<Word>, Vec<Word>)> {
        if output.len() != self.output_len() {
            return Err(Error::Dimension(format!(
                "output has {} letters, instance produces {}",
                output.len(),
                self.output_len()
            )));
        }
        let n_in = self.inner.n();
        let mut mem = output
            .slice(self.n_inner * n_in, self.inner.m())
            .to_coords()?;
        let mut inner_info = vec![0u64; self.n_inner];
        let mut inner_stab = vec![0u64; self.n_inner];
        for i in (0..self.n_inner).rev() {
            let p = output.slice(i * n_in, n_in).to_coords()?;
            let (m_prev, l, s) = self
                .inner
                .invert_step_coords(p, mem)
                .ok_or(Error::NotInvertible)?;
            inner_info[i] = l;
            inner_stab[i] = s;
            mem = m_prev;
        }
        // rebuild the permuted word (memory letters then information blocks)
        let sp = self.inner.space();
        let mut permuted = Word::zero(sp, self.interleaver.size());
        let mword = Word::from_coords(sp, self.inner.m(), mem);
        for i in 0..self.inner.m() {
            permuted.set_letter(i, mword.letter(i));
        }
        for (i, &l) in inner_info.iter().enumerate() {
            let w = Word::from_coords(sp, self.inner.k(), l);
            for j in 0..self.inner.k() {
                permuted.set_letter(self.inner.m() + i * self.inner.k() + j, w.letter(j));
            }
        }
        let encoded = self.interleaver.apply_inverse(&permuted)?;
        let (info, stab) = self.outer.blockwise_apply_inverse(&encoded)?;
        let inner_stab_words = inner_stab
            .iter()
            .map(|&s| Word::from_coords(sp, self.inner.s(), s))
            .collect();
        Ok((info, stab, inner_stab_words))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TurboWitness {
    pub info: Vec<String>,
    pub stab: Vec<String>,
    pub inner_stab: Vec<String>,
    pub weight: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TurboDistanceReport {
    pub d_c: Distance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_c_witness: Option<TurboWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_q: Option<Distance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_q_witness: Option<TurboWitness>,
}

/// Minimum-weight dynamic program with choice reconstruction. Returns the
/// minimum total weight and one realizing stabilizer sequence; `None` when
/// `require_nonzero_stab` cannot be met.
fn min_weight_with_choices(
    seed: &SeedMorphism,
    memory: u64,
    info_blocks: &[u64],
    include_final_memory: bool,
    require_nonzero_stab: bool,
    budgets: &Budgets,
) -> Result<Option<(u64, Vec<u64>)>> {
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "turbo distance state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let z_choices = seed.z_step_choices(budgets)?;
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    let idx = |state: usize, flag: usize| state * 2 + flag;
    let mut dist = vec![u64::MAX; num_states * 2];
    dist[idx(memory as usize, 0)] = 0;
    let mut parents: Vec<Vec<(u32, u16)>> = Vec::with_capacity(info_blocks.len());
    for &info in info_blocks {
        let mut next = vec![u64::MAX; num_states * 2];
        let mut parent = vec![(u32::MAX, 0u16); num_states * 2];
        for state in 0..num_states {
            for flag in 0..2 {
                let d = dist[idx(state, flag)];
                if d == u64::MAX {
                    continue;
                }
                for (ci, &s) in z_choices.iter().enumerate() {
                    let (p, m2) = seed.step_coords(state as u64, info, s);
                    let nd = d + weight_of_coords(p, b, seed.n()) as u64;
                    let nflag = flag | usize::from(s != 0);
                    let slot = idx(m2 as usize, nflag);
                    if nd < next[slot] {
                        next[slot] = nd;
                        parent[slot] = (idx(state, flag) as u32, ci as u16);
                    }
                }
            }
        }
        parents.push(parent);
        dist = next;
    }
    let mut best: Option<(u64, usize)> = None;
    for state in 0..num_states {
        let extra = if include_final_memory {
            weight_of_coords(state as u64, b, seed.m()) as u64
        } else {
            0
        };
        for flag in 0..2 {
            if require_nonzero_stab && flag == 0 {
                continue;
            }
            let d = dist[idx(state, flag)];
            if d == u64::MAX {
                continue;
            }
            let total = d + extra;
            if best.is_none_or(|(bd, _)| total < bd) {
                best = Some((total, idx(state, flag)));
            }
        }
    }
    let Some((total, mut slot)) = best else {
        return Ok(None);
    };
    let mut choices = vec![0u64; info_blocks.len()];
    for i in (0..info_blocks.len()).rev() {
        let (prev, ci) = parents[i][slot];
        choices[i] = z_choices[ci as usize];
        slot = prev as usize;
    }
    Ok(Some((total, choices)))
}

/// Exact distances of one turbo instance by exhausting undetected outer
/// inputs and minimizing over inner stabilizer sequences.
pub fn turbo_distance_exact(
    t: &TurboInstance,
    include_dq: bool,
    budgets: &Budgets,
) -> Result<TurboDistanceReport> {
    let b = t.outer.space().bits() as usize;
    let blocks = t.outer.undetected_inputs(budgets)?;
    let combos = (blocks.len() as u128).pow(t.n_blocks as u32);
    if combos > budgets.max_enumeration as u128 {
        return Err(Error::BudgetExceeded {
            what: "turbo outer enumeration".into(),
            needed: combos.min(u64::MAX as u128) as u64,
            limit: budgets.max_enumeration,
        });
    }
    // per-block image words and harmfulness
    let info_mask = mask(b * t.outer.k());
    let sp = t.outer.space();
    let images: Vec<(Word, bool)> = blocks
        .iter()
        .map(|&coords| {
            (
                Word::from_coords(sp, t.outer.n(), t.outer.apply_coords(coords)),
                coords & info_mask != 0,
            )
        })
        .collect();
    // structural systematic lower bound enables early pruning
    let systematic = crate::classify::structural_systematic_positions(&t.inner).is_some();

    let mut best_c: Option<(u64, TurboWitness)> = None;
    let mut best_q: Option<(u64, TurboWitness)> = None;
    let mut idx = vec![0usize; t.n_blocks];
    loop {
        let harmful = idx.iter().any(|&i| images[i].1);
        let nonzero = idx.iter().any(|&i| blocks[i] != 0);
        if nonzero {
            // assemble E', permute, split
            let mut encoded = Word::zero(sp, t.n_blocks * t.outer.n());
            let mut e_weight = 0usize;
            for (bi, &i) in idx.iter().enumerate() {
                let img = &images[i].0;
                e_weight += img.weight();
                for j in 0..t.outer.n() {
                    encoded.set_letter(bi * t.outer.n() + j, img.letter(j));
                }
            }
            let relevant_c = harmful
                && best_c
                    .as_ref()
                    .is_none_or(|(bw, _)| !systematic || (e_weight as u64) < bw + t.inner.m() as u64);
            let relevant_q = include_dq
                && best_q
                    .as_ref()
                    .is_none_or(|(bw, _)| !systematic || (e_weight as u64) < bw + t.inner.m() as u64);
            if relevant_c || relevant_q {
                let permuted = t.interleaver.apply(&encoded)?;
                let (mem, inner_info) = t.split_inner_input(&permuted);
                let l_codes: Vec<u64> = inner_info
                    .iter()
                    .map(Word::to_coords)
                    .collect::<Result<_>>()?;
                if let Some((w, choices)) = min_weight_with_choices(
                    &t.inner,
                    mem.to_coords()?,
                    &l_codes,
                    true,
                    false,
                    budgets,
                )? {
                    let witness = || TurboWitness {
                        info: idx
                            .iter()
                            .map(|&i| {
                                Word::from_coords(sp, t.outer.k(), blocks[i] & info_mask).to_string()
                            })
                            .collect(),
                        stab: idx
                            .iter()
                            .map(|&i| {
                                Word::from_coords(
                                    sp,
                                    t.outer.s(),
                                    blocks[i] >> (b * t.outer.k()),
                                )
                                .to_string()
                            })
                            .collect(),
                        inner_stab: choices
                            .iter()
                            .map(|&s| Word::from_coords(sp, t.inner.s(), s).to_string())
                            .collect(),
                        weight: w,
                    };
                    if harmful && best_c.as_ref().is_none_or(|(bw, _)| w < *bw) {
                        best_c = Some((w, witness()));
                    }
                    if include_dq && best_q.as_ref().is_none_or(|(bw, _)| w < *bw) {
                        best_q = Some((w, witness()));
                    }
                }
            }
        }
        // odometer
        let mut j = 0;
        loop {
            if j == t.n_blocks {
                break;
            }
            idx[j] += 1;
            if idx[j] < blocks.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == t.n_blocks {
            break;
        }
    }
    // degenerate case: trivial outer input, nonzero inner stabilizers
    if include_dq {
        if let Some((w, choices)) = min_weight_with_choices(
            &t.inner,
            0,
            &vec![0u64; t.n_inner],
            true,
            true,
            budgets,
        )? {
            if best_q.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best_q = Some((
                    w,
                    TurboWitness {
                        info: vec![Word::zero(sp, t.outer.k()).to_string(); t.n_blocks],
                        stab: vec![Word::zero(sp, t.outer.s()).to_string(); t.n_blocks],
                        inner_stab: choices
                            .iter()
                            .map(|&s| Word::from_coords(sp, t.inner.s(), s).to_string())
                            .collect(),
                        weight: w,
                    },
                ));
            }
        }
    }
    let (d_c, d_c_witness) = match best_c {
        Some((w, wit)) => (Distance::Finite(w), Some(wit)),
        None => (Distance::Infinite, None),
    };
    let (d_q, d_q_witness) = if include_dq {
        match best_q {
            Some((w, wit)) => (Some(Distance::Finite(w)), Some(wit)),
            None => (Some(Distance::Infinite), None),
        }
    } else {
        (None, None)
    };
    Ok(TurboDistanceReport {
        d_c,
        d_c_witness,
        d_q,
        d_q_witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceSample {
    pub trial: usize,
    pub seed: u64,
    pub d_c: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_q: Option<u64>,
    pub witness: TurboWitness,
}

#[derive(Clone, Debug, Serialize)]
pub struct McSummary {
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<u64>,
    /// Empirical `P(d_c <= D)` per requested threshold.
    pub p_le: Vec<(u64, f64)>,
}

#[derive(Clone, Debug)]
pub struct McReport {
    pub samples: Vec<DistanceSample>,
    pub summary: McSummary,
}

/// Independent interleaver trials with derived per-trial seeds. Trials may
/// run concurrently; samples are merged by trial index so the result is
/// identical at any parallelism.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_distance(
    outer: &BlockEncoder,
    inner: &SeedMorphism,
    n_blocks: usize,
    trials: usize,
    master_seed: u64,
    include_dq: bool,
    d_thresholds: &[u64],
    budgets: &Budgets,
) -> Result<McReport> {
    let samples: Vec<DistanceSample> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<DistanceSample> {
            let seed = mix64(master_seed, trial as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let interleaver =
                Interleaver::sample(&mut rng, n_blocks * outer.n(), outer.space())?;
            let t = TurboInstance::new(outer.clone(), inner.clone(), interleaver, n_blocks)?;
            let report = turbo_distance_exact(&t, include_dq, budgets)?;
            let d_c = report
                .d_c
                .finite()
                .ok_or_else(|| Error::CheckFailed("turbo distance is infinite".into()))?;
            Ok(DistanceSample {
                trial,
                seed,
                d_c,
                d_q: report.d_q.and_then(Distance::finite),
                witness: report.d_c_witness.expect("finite distance has a witness"),
            })
        })
        .collect::<Result<_>>()?;
    let mut sorted: Vec<u64> = samples.iter().map(|s| s.d_c).collect();
    sorted.sort_unstable();
    let summary = McSummary {
        trials,
        min: sorted.first().copied(),
        // lower median
        median: (!sorted.is_empty()).then(|| sorted[(sorted.len() - 1) / 2]),
        max: sorted.last().copied(),
        p_le: d_thresholds
            .iter()
            .map(|&d| {
                let hits = sorted.iter().filter(|&&v| v <= d).count();
                (d, if trials == 0 { 0.0 } else { hits as f64 / trials as f64 })
            })
            .collect(),
    };
    Ok(McReport { samples, summary })
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalP {
    pub w: u64,
    pub d: u64,
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
}

/// Fraction of sampled interleavers admitting a harmful outer input with
/// intermediate weight `w` and achievable turbo output weight exactly `d`.
#[allow(clippy::too_many_arguments)] // mirrors the experiment parameters
pub fn empirical_p(
    outer: &BlockEncoder,
    inner: &SeedMorphism,
    n_blocks: usize,
    w: u64,
    d: u64,
    trials: usize,
    master_seed: u64,
    budgets: &Budgets,
) -> Result<EmpiricalP> {
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<usize> {
            let seed = mix64(master_seed, trial as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let interleaver =
                Interleaver::sample(&mut rng, n_blocks * outer.n(), outer.space())?;
            let t = TurboInstance::new(outer.clone(), inner.clone(), interleaver, n_blocks)?;
            Ok(usize::from(instance_admits(&t, w, d, budgets)?))
        })
        .sum::<Result<usize>>()?;
    Ok(EmpiricalP {
        w,
        d,
        trials,
        hits,
        frequency: if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        },
    })
}

/// Whether some harmful outer input of this instance has intermediate
/// weight `w` and an inner stabilizer completion of output weight exactly
/// `d`.
pub fn instance_admits(t: &TurboInstance, w: u64, d: u64, budgets: &Budgets) -> Result<bool> {
    if w > (t.n_blocks * t.outer.n()) as u64 {
        return Ok(false);
    }
    let b = t.outer.space().bits() as usize;
    let sp = t.outer.space();
    let blocks = t.outer.undetected_inputs(budgets)?;
    let combos = (blocks.len() as u128).pow(t.n_blocks as u32);
    if combos > budgets.max_enumeration as u128 {
        return Err(Error::BudgetExceeded {
            what: "event enumeration".into(),
            needed: combos.min(u64::MAX as u128) as u64,
            limit: budgets.max_enumeration,
        });
    }
    let info_mask = mask(b * t.outer.k());
    let images: Vec<(Word, bool)> = blocks
        .iter()
        .map(|&coords| {
            (
                Word::from_coords(sp, t.outer.n(), t.outer.apply_coords(coords)),
                coords & info_mask != 0,
            )
        })
        .collect();
    let mut idx = vec![0usize; t.n_blocks];
    loop {
        let harmful = idx.iter().any(|&i| images[i].1);
        if harmful {
            let mut encoded = Word::zero(sp, t.n_blocks * t.outer.n());
            let mut e_weight = 0usize;
            for (bi, &i) in idx.iter().enumerate() {
                let img = &images[i].0;
                e_weight += img.weight();
                for j in 0..t.outer.n() {
                    encoded.set_letter(bi * t.outer.n() + j, img.letter(j));
                }
            }
            if e_weight as u64 == w {
                let permuted = t.interleaver.apply(&encoded)?;
                let (mem, inner_info) = t.split_inner_input(&permuted);
                let l_codes: Vec<u64> = inner_info
                    .iter()
                    .map(Word::to_coords)
                    .collect::<Result<_>>()?;
                let ach = crate::convolutional::achievable_weights(
                    &t.inner,
                    mem.to_coords()?,
                    &l_codes,
                    d,
                    true,
                    budgets,
                )?;
                if ach.contains(&d) {
                    return Ok(true);
                }
            }
        }
        let mut j = 0;
        loop {
            if j == t.n_blocks {
                return Ok(false);
            }
            idx[j] += 1;
            if idx[j] < blocks.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}
