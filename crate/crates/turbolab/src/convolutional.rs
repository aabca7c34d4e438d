//! Convolutional composition of a seed morphism.
//!
//! Running a seed `N` times threads the memory through the steps:
//! `(P_i, M_i) = C(M_{i-1}, L_i, S_i)`. The physical part of the result is
//! the concatenation of the `P_i` and the memory part is `M_N`; the output
//! weight convention includes the terminal memory block (it is delivered
//! with the physical output), except for infinite-stream analyses where no
//! terminal memory exists.
//!
//! The exact searches over undetected stabilizer sequences are dynamic
//! programs over memory states: dense arrays of size `2^(b*m)`, refused
//! beyond the state-bit budget.

use crate::alphabet::{Role, Word};
use crate::classify::MemoryClassification;
use crate::encoders::{weight_of_coords, MorphismKind, SeedMorphism};
use crate::{Budgets, Error, Result};

#[derive(Clone, Debug)]
pub struct ConvInput {
    pub memory: Word,
    pub info: Vec<Word>,
    pub stab: Vec<Word>,
}

impl ConvInput {
    pub fn new(memory: Word, info: Vec<Word>, stab: Vec<Word>) -> Result<Self> {
        if info.len() != stab.len() {
            return Err(Error::Dimension(format!(
                "{} information blocks vs {} stabilizer blocks",
                info.len(),
                stab.len()
            )));
        }
        Ok(Self { memory, info, stab })
    }

    pub fn steps(&self) -> usize {
        self.info.len()
    }

    /// Weight of the (memory, information) part, the `w` axis of spectra.
    pub fn info_memory_weight(&self) -> usize {
        self.memory.weight() + self.info.iter().map(Word::weight).sum::<usize>()
    }

    /// Every stabilizer letter inside the undetected subspace.
    pub fn is_undetected(&self) -> bool {
        self.stab.iter().all(Word::all_in_z)
    }

    pub fn validate_for(&self, seed: &SeedMorphism) -> Result<()> {
        if self.memory.len() != seed.m() {
            return Err(Error::Dimension(format!(
                "memory has {} letters, seed expects {}",
                self.memory.len(),
                seed.m()
            )));
        }
        for (i, (l, s)) in self.info.iter().zip(&self.stab).enumerate() {
            if l.len() != seed.k() || s.len() != seed.s() {
                return Err(Error::Dimension(format!(
                    "step {i}: expected ({}, {}) letters, got ({}, {})",
                    seed.k(),
                    seed.s(),
                    l.len(),
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ConvOutput {
    pub physical: Vec<Word>,
    pub final_memory: Word,
    /// Memory after each step, `M_1 ... M_N`.
    pub intermediates: Vec<Word>,
}

impl ConvOutput {
    pub fn weight(&self, include_final_memory: bool) -> usize {
        let phys: usize = self.physical.iter().map(Word::weight).sum();
        if include_final_memory {
            phys + self.final_memory.weight()
        } else {
            phys
        }
    }

    /// The physical part as one word.
    pub fn physical_word(&self) -> Word {
        let mut out = Word::zero(self.final_memory.space(), 0);
        for p in &self.physical {
            out = out.concat(p).expect("same space");
        }
        out
    }

    /// The full output word `(P_1 ... P_N | M_N)` with roles.
    pub fn output_word(&self) -> Result<Word> {
        let phys = self.physical_word();
        let plen = phys.len();
        phys.concat(&self.final_memory)?.with_roles(vec![
            (Role::Physical, plen),
            (Role::Memory, self.final_memory.len()),
        ])
    }
}

pub fn conv_apply(seed: &SeedMorphism, input: &ConvInput) -> Result<ConvOutput> {
    input.validate_for(seed)?;
    let mut mem = input.memory.clone();
    let mut physical = Vec::with_capacity(input.steps());
    let mut intermediates = Vec::with_capacity(input.steps());
    for (l, s) in input.info.iter().zip(&input.stab) {
        let (p, m2) = seed.step(&mem, l, s)?;
        physical.push(p);
        intermediates.push(m2.clone());
        mem = m2;
    }
    Ok(ConvOutput {
        physical,
        final_memory: mem,
        intermediates,
    })
}

/// The physical and memory parts of the convolutional output.
pub fn pi_mu(seed: &SeedMorphism, input: &ConvInput) -> Result<(Word, Word)> {
    let out = conv_apply(seed, input)?;
    Ok((out.physical_word(), out.final_memory))
}

/// Reverse-order truncated decoding: feed the final memory and the physical
/// blocks, recover the information blocks and the initial memory. The
/// intermediate memories seen on the way down are exactly the encoder's.
pub fn conv_truncated_decode(
    seed: &SeedMorphism,
    final_memory: &Word,
    physical: &[Word],
) -> Result<(Vec<Word>, Word, Vec<Word>)> {
    if seed.kind() != MorphismKind::Encoder {
        return Err(Error::Spec(
            "truncated decoding requires an encoder seed".into(),
        ));
    }
    let dec = seed.truncated_decoder()?;
    let mut mem = final_memory.clone();
    let mut info = vec![Word::zero(seed.space(), 0); physical.len()];
    let mut memories = vec![Word::zero(seed.space(), 0); physical.len()];
    let empty = Word::zero(seed.space(), 0);
    for i in (0..physical.len()).rev() {
        // decoder step: (L_i, M_{i-1}) = C̄(M_i, P_i)
        let (l, m_prev) = dec.step(&mem, &physical[i], &empty)?;
        info[i] = l;
        memories[i] = mem.clone();
        mem = m_prev;
    }
    Ok((info, mem, memories))
}

/// Minimum output weight over all undetected stabilizer sequences, by a
/// dense dynamic program over memory states.
pub fn min_weight_over_stabilizers(
    seed: &SeedMorphism,
    memory: u64,
    info_blocks: &[u64],
    include_final_memory: bool,
    budgets: &Budgets,
) -> Result<u64> {
    let dp = stabilizer_dp(seed, memory, info_blocks, budgets, None)?;
    let b = seed.space().bits() as usize;
    dp.iter()
        .enumerate()
        .filter(|&(_, d)| *d != u64::MAX)
        .map(|(state, &d)| {
            d + if include_final_memory {
                weight_of_coords(state as u64, b, seed.m()) as u64
            } else {
                0
            }
        })
        .min()
        .ok_or_else(|| Error::CheckFailed("empty reachable state set".into()))
}

/// Same search constrained to stabilizer sequences that are not all zero.
pub fn min_weight_over_nonzero_stabilizers(
    seed: &SeedMorphism,
    memory: u64,
    info_blocks: &[u64],
    include_final_memory: bool,
    budgets: &Budgets,
) -> Result<Option<u64>> {
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "stabilizer minimization state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let z_choices = seed.z_step_choices(budgets)?;
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    // dist[flag][state]: flag = 1 once a nonzero stabilizer block was used
    let mut dist = vec![[u64::MAX; 2]; num_states];
    dist[memory as usize][0] = 0;
    for &info in info_blocks {
        let mut next = vec![[u64::MAX; 2]; num_states];
        for state in 0..num_states {
            for flag in 0..2 {
                let d = dist[state][flag];
                if d == u64::MAX {
                    continue;
                }
                for &s in &z_choices {
                    let (p, m2) = seed.step_coords(state as u64, info, s);
                    let nd = d + weight_of_coords(p, b, seed.n()) as u64;
                    let nflag = flag | usize::from(s != 0);
                    if nd < next[m2 as usize][nflag] {
                        next[m2 as usize][nflag] = nd;
                    }
                }
            }
        }
        dist = next;
    }
    Ok(dist
        .iter()
        .enumerate()
        .filter(|&(_, d)| d[1] != u64::MAX)
        .map(|(state, d)| {
            d[1] + if include_final_memory {
                weight_of_coords(state as u64, b, seed.m()) as u64
            } else {
                0
            }
        })
        .min())
}

/// Per-state minimum accumulated physical weight after all steps; states not
/// reachable hold `u64::MAX`.
fn stabilizer_dp(
    seed: &SeedMorphism,
    memory: u64,
    info_blocks: &[u64],
    budgets: &Budgets,
    cap: Option<u64>,
) -> Result<Vec<u64>> {
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "stabilizer minimization state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let z_choices = seed.z_step_choices(budgets)?;
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    let mut dist = vec![u64::MAX; num_states];
    dist[memory as usize] = 0;
    for &info in info_blocks {
        let mut next = vec![u64::MAX; num_states];
        for state in 0..num_states {
            let d = dist[state];
            if d == u64::MAX {
                continue;
            }
            if let Some(c) = cap {
                if d > c {
                    continue;
                }
            }
            for &s in &z_choices {
                let (p, m2) = seed.step_coords(state as u64, info, s);
                let nd = d + weight_of_coords(p, b, seed.n()) as u64;
                if nd < next[m2 as usize] {
                    next[m2 as usize] = nd;
                }
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// The set of output weights achievable over undetected stabilizer
/// sequences, clipped to `0..=d_max`. Tracks reachable (state, weight)
/// pairs exactly.
pub fn achievable_weights(
    seed: &SeedMorphism,
    memory: u64,
    info_blocks: &[u64],
    d_max: u64,
    include_final_memory: bool,
    budgets: &Budgets,
) -> Result<Vec<u64>> {
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "achievable weight state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let z_choices = seed.z_step_choices(budgets)?;
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    let width = (d_max + 1) as usize;
    let words = width.div_ceil(64);
    // per-state bitset over accumulated physical weights 0..=d_max
    let mut reach = vec![vec![0u64; words]; num_states];
    reach[memory as usize][0] = 1;
    for &info in info_blocks {
        let mut next = vec![vec![0u64; words]; num_states];
        for state in 0..num_states {
            if reach[state].iter().all(|&w| w == 0) {
                continue;
            }
            for &s in &z_choices {
                let (p, m2) = seed.step_coords(state as u64, info, s);
                let shift = weight_of_coords(p, b, seed.n());
                or_shifted(&mut next[m2 as usize], &reach[state], shift, width);
            }
        }
        reach = next;
    }
    let mut out = Vec::new();
    for d in 0..=d_max {
        let hit = (0..num_states).any(|state| {
            let extra = if include_final_memory {
                weight_of_coords(state as u64, b, seed.m()) as u64
            } else {
                0
            };
            d >= extra && {
                let acc = d - extra;
                (reach[state][(acc / 64) as usize] >> (acc % 64)) & 1 == 1
            }
        });
        if hit {
            out.push(d);
        }
    }
    Ok(out)
}

/// `dst |= src << shift` over bit positions, truncated at `width` bits.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize, width: usize) {
    if shift >= width {
        return;
    }
    let word_shift = shift / 64;
    let bit_shift = shift % 64;
    for i in (0..src.len()).rev() {
        let v = src[i];
        if v == 0 {
            continue;
        }
        if i + word_shift < dst.len() {
            dst[i + word_shift] |= v << bit_shift;
        }
        if bit_shift > 0 && i + word_shift + 1 < dst.len() {
            dst[i + word_shift + 1] |= v >> (64 - bit_shift);
        }
    }
    // clear bits at or above `width`
    let last = (width - 1) / 64;
    if last < dst.len() {
        let keep = width - last * 64;
        if keep < 64 {
            dst[last] &= (1u64 << keep) - 1;
        }
        for w in dst.iter_mut().skip(last + 1) {
            *w = 0;
        }
    }
}

/// The membership-bit sequence of an input along its information impulses,
/// with its decomposition into detours.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TraceDecomposition {
    /// b_0 ... b_{w_L}; bit i is 1 when the memory after the i-th nonzero
    /// information letter has no finite-weight continuation.
    pub bits: Vec<u8>,
    /// 1-based positions of nonzero information letters in the flattened
    /// k*N-letter information stream.
    pub positions: Vec<usize>,
    /// Block index of each nonzero information letter (1-based).
    pub block_indices: Vec<usize>,
    /// Memory state after each truncature, `M_0 ... M_{w_L}`.
    pub memories: Vec<u64>,
    /// Trace indices starting each detour, `v_1 < ... < v_c`.
    pub detour_starts: Vec<usize>,
    /// Position span of each detour, `p_{v_{i+1}-1} - p_{v_i}`.
    pub delta_p: Vec<usize>,
    /// Whether the trace decomposed into detours; always true for
    /// recursive seeds, may be false otherwise.
    pub decomposition_valid: bool,
}

impl TraceDecomposition {
    pub fn detour_count(&self) -> usize {
        self.detour_starts.len()
    }

    pub fn info_weight(&self) -> usize {
        self.positions.len()
    }

    pub fn delta_p_sum(&self) -> usize {
        self.delta_p.iter().sum()
    }
}

/// Compute the trace of an undetected input and cut it into detours.
///
/// The i-th truncature keeps the input up to the i-th nonzero information
/// letter (zeroing later letters of its block) and all stabilizer blocks up
/// to that block; its final memory decides trace bit i by `M1` membership.
pub fn trace_and_detours(
    seed: &SeedMorphism,
    classification: &MemoryClassification,
    input: &ConvInput,
) -> Result<TraceDecomposition> {
    input.validate_for(seed)?;
    if !input.is_undetected() {
        return Err(Error::Spec(
            "trace requires stabilizer letters inside the undetected subspace".into(),
        ));
    }
    let k = seed.k();
    let b = seed.space().bits() as usize;
    // flatten nonzero information positions (1-based over k*N letters)
    let mut positions = Vec::new();
    let mut block_indices = Vec::new();
    for (bi, l) in input.info.iter().enumerate() {
        for j in 0..k {
            if l.letter(j) != 0 {
                positions.push(bi * k + j + 1);
                block_indices.push(bi + 1);
            }
        }
    }
    // memory before each block under the full input
    let mut mem_before = Vec::with_capacity(input.steps() + 1);
    let mut mem = input.memory.to_coords()?;
    mem_before.push(mem);
    for (l, s) in input.info.iter().zip(&input.stab) {
        let (_, m2) = seed.step_coords(mem, l.to_coords()?, s.to_coords()?);
        mem_before.push(m2);
        mem = m2;
    }
    // M_i: run the truncated block (letters after p_i zeroed)
    let mut memories = vec![input.memory.to_coords()?];
    for (idx, &p) in positions.iter().enumerate() {
        let bi = block_indices[idx] - 1;
        let within = (p - 1) % k; // 0-based position inside the block
        let full = input.info[bi].to_coords()?;
        let keep_letters = within + 1;
        let truncated = full & crate::gf2::mask(b * keep_letters);
        let stab = input.stab[bi].to_coords()?;
        let (_, m2) = seed.step_coords(mem_before[bi], truncated, stab);
        memories.push(m2);
    }
    let bits: Vec<u8> = memories
        .iter()
        .map(|&m| u8::from(classification.in_m1(m)))
        .collect();
    // Detours: the first starts at the first 1 (index 0 or 1); each later
    // detour starts right after a terminating 0. The decomposition is
    // guaranteed only for recursive seeds, where a 0 is always followed by
    // a 1.
    let w_l = positions.len();
    let mut detour_starts = Vec::new();
    let mut decomposition_valid = true;
    if w_l >= 1 {
        let v1 = usize::from(bits[0] != 1);
        detour_starts.push(v1);
        for i in (v1 + 1)..w_l {
            if bits[i] == 0 {
                detour_starts.push(i + 1);
            }
        }
        decomposition_valid = detour_starts.iter().all(|&v| bits[v] == 1);
        if !decomposition_valid {
            detour_starts.clear();
        }
    }
    // delta_p with the conventions p_0 = 0 and v_{c+1} = w_L + 1
    let c = detour_starts.len();
    let pos_at = |idx: usize| -> usize {
        if idx == 0 {
            0
        } else {
            positions[idx - 1]
        }
    };
    let mut delta_p = Vec::with_capacity(c);
    for i in 0..c {
        let v_next = if i + 1 < c {
            detour_starts[i + 1]
        } else {
            w_l + 1
        };
        delta_p.push(pos_at(v_next - 1) - pos_at(detour_starts[i]));
    }
    Ok(TraceDecomposition {
        bits,
        positions,
        block_indices,
        memories,
        detour_starts,
        delta_p,
        decomposition_valid,
    })
}
