//! Memory-state classification of seed morphisms.
//!
//! The defining conditions quantify over infinite input streams; on a finite
//! state space they reduce to graph conditions, which is what this module
//! computes. Fix a morphism and drive it with identity information letters
//! and undetected stabilizer letters. That induces a finite labeled graph on
//! the `2^(b*m)` memory states, one edge per stabilizer choice, labeled with
//! the physical output weight of the step.
//!
//! A memory state admits a finite-weight continuation exactly when it can
//! reach a state with an infinite zero-weight path; the set of such "free
//! tail" states is the greatest set in which every member keeps a zero-weight
//! edge into the set (iterative pruning computes it). States that can reach
//! it form `M0`; the rest form `M1`, and `M1` is stable under the undetected
//! drive. The speed is one more than the longest all-zero-weight path that
//! starts inside `M1`: such paths cannot cycle (a cycle would put its states
//! in `M0`), so the zero-weight subgraph on `M1` is acyclic and the longest
//! path is finite.

use crate::alphabet::Word;
use crate::encoders::{weight_of_coords, MorphismKind, SeedMorphism};
use crate::gf2::StateSet;
use crate::{Budgets, Error, Result};
use serde::Serialize;

/// The undetected-drive transition graph over memory states.
#[derive(Clone, Debug)]
pub struct TransitionGraph {
    pub num_states: usize,
    /// Packed stabilizer coordinate for each choice.
    pub z_choices: Vec<u64>,
    /// `edges[state][choice] = (target, physical weight)`.
    pub edges: Vec<Vec<(u32, u32)>>,
}

impl TransitionGraph {
    pub fn out_degree(&self) -> usize {
        self.z_choices.len()
    }
}

pub fn build_graph(seed: &SeedMorphism, budgets: &Budgets) -> Result<TransitionGraph> {
    let state_bits = seed.memory_bits();
    if state_bits as u32 > budgets.max_state_bits {
        return Err(Error::BudgetExceeded {
            what: "memory state space".into(),
            needed: state_bits as u64,
            limit: budgets.max_state_bits as u64,
        });
    }
    let z_choices = seed.z_step_choices(budgets)?;
    let num_states = 1usize << state_bits;
    let b = seed.space().bits() as usize;
    let mut edges = Vec::with_capacity(num_states);
    for state in 0..num_states {
        let mut row = Vec::with_capacity(z_choices.len());
        for &s in &z_choices {
            let (p, m2) = seed.step_coords(state as u64, 0, s);
            row.push((m2 as u32, weight_of_coords(p, b, seed.n()) as u32));
        }
        edges.push(row);
    }
    Ok(TransitionGraph {
        num_states,
        z_choices,
        edges,
    })
}

/// Forward closure of the zero state under the undetected drive.
pub fn reachable_i(graph: &TransitionGraph) -> StateSet {
    let mut set = StateSet::new(graph.num_states);
    let mut stack = vec![0usize];
    set.insert(0);
    while let Some(u) = stack.pop() {
        for &(v, _) in &graph.edges[u] {
            if !set.contains(v as usize) {
                set.insert(v as usize);
                stack.push(v as usize);
            }
        }
    }
    set
}

/// States with an infinite all-zero-weight continuation: the greatest subset
/// in which every state keeps an outgoing zero-weight edge into the subset.
fn free_tail_states(graph: &TransitionGraph) -> StateSet {
    let mut good = StateSet::full(graph.num_states);
    loop {
        let mut changed = false;
        for u in 0..graph.num_states {
            if !good.contains(u) {
                continue;
            }
            let keeps = graph.edges[u]
                .iter()
                .any(|&(v, w)| w == 0 && good.contains(v as usize));
            if !keeps {
                good.remove(u);
                changed = true;
            }
        }
        if !changed {
            return good;
        }
    }
}

/// Split the states into `(M0, M1)`: `M0` holds the states admitting a
/// finite-weight continuation, `M1` the rest.
pub fn classify_memories(graph: &TransitionGraph) -> (StateSet, StateSet) {
    let good = free_tail_states(graph);
    // backward closure of `good` under arbitrary-weight edges
    let mut m0 = good.clone();
    loop {
        let mut changed = false;
        for u in 0..graph.num_states {
            if m0.contains(u) {
                continue;
            }
            if graph.edges[u].iter().any(|&(v, _)| m0.contains(v as usize)) {
                m0.insert(u);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let m1 = m0.complement();
    (m0, m1)
}

/// The speed and a zero-output witness of length `eta - 1` (empty for
/// `eta = 1`). Errors when `M1` is empty.
pub fn speed(graph: &TransitionGraph, m1: &StateSet) -> Result<(u64, SpeedWitness)> {
    if m1.is_empty() {
        return Err(Error::EtaUndefined);
    }
    // Longest path in the zero-weight subgraph restricted to M1. A cycle
    // there would carry an infinite zero-weight continuation, contradicting
    // membership in M1, so the subgraph is acyclic: Kahn order, then a
    // longest-path sweep in reverse order.
    let zero_edge = |u: usize, v: u32, w: u32| w == 0 && m1.contains(v as usize) && m1.contains(u);
    let mut indeg = vec![0usize; graph.num_states];
    for u in m1.iter() {
        for &(v, w) in &graph.edges[u] {
            if zero_edge(u, v, w) {
                indeg[v as usize] += 1;
            }
        }
    }
    let mut queue: std::collections::VecDeque<usize> =
        m1.iter().filter(|&u| indeg[u] == 0).collect();
    let mut order = Vec::with_capacity(m1.count());
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(v, w) in &graph.edges[u] {
            if zero_edge(u, v, w) {
                indeg[v as usize] -= 1;
                if indeg[v as usize] == 0 {
                    queue.push_back(v as usize);
                }
            }
        }
    }
    if order.len() != m1.count() {
        return Err(Error::CheckFailed(
            "zero-weight cycle inside M1: classification is inconsistent".into(),
        ));
    }
    type Best = Vec<(u64, Option<(usize, usize)>)>;
    let mut best: Best = vec![(0, None); graph.num_states];
    for &u in order.iter().rev() {
        for (ci, &(v, w)) in graph.edges[u].iter().enumerate() {
            if zero_edge(u, v, w) {
                let cand = 1 + best[v as usize].0;
                if cand > best[u].0 {
                    best[u] = (cand, Some((ci, v as usize)));
                }
            }
        }
    }
    let start = m1
        .iter()
        .max_by_key(|&u| best[u].0)
        .expect("m1 nonempty");
    let eta_minus_1 = best[start].0;
    let mut choices = Vec::new();
    let mut u = start;
    while let (_, Some((ci, v))) = best[u] {
        choices.push(graph.z_choices[ci]);
        u = v;
    }
    Ok((
        eta_minus_1 + 1,
        SpeedWitness {
            start_state: start as u64,
            stab_choices: choices,
        },
    ))
}

/// A zero-output drive of length `eta - 1` starting in `M1`.
#[derive(Clone, Debug, Serialize)]
pub struct SpeedWitness {
    pub start_state: u64,
    pub stab_choices: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct MemoryClassification {
    pub num_states: usize,
    pub i_set: StateSet,
    pub m0: StateSet,
    pub m1: StateSet,
    pub eta: Option<u64>,
    pub eta_witness: Option<SpeedWitness>,
}

impl MemoryClassification {
    pub fn in_m1(&self, state: u64) -> bool {
        self.m1.contains(state as usize)
    }
}

pub fn classify(seed: &SeedMorphism, budgets: &Budgets) -> Result<MemoryClassification> {
    let graph = build_graph(seed, budgets)?;
    Ok(classify_with_graph(&graph))
}

pub fn classify_with_graph(graph: &TransitionGraph) -> MemoryClassification {
    let i_set = reachable_i(graph);
    let (m0, m1) = classify_memories(graph);
    let (eta, eta_witness) = match speed(graph, &m1) {
        Ok((eta, w)) => (Some(eta), Some(w)),
        Err(_) => (None, None),
    };
    MemoryClassification {
        num_states: graph.num_states,
        i_set,
        m0,
        m1,
        eta,
        eta_witness,
    }
}

/// A weight-one information impulse that drives some reachable memory state
/// into `M0`, together with a finite-weight continuation for it.
#[derive(Clone, Debug, Serialize)]
pub struct ImpulseWitness {
    pub memory: u64,
    pub info: u64,
    pub stab: u64,
    /// Stabilizer drive that keeps the total output weight finite forever.
    pub continuation: Vec<u64>,
    /// Total output weight of the impulse step plus the continuation.
    pub finite_weight: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursiveVerdict {
    pub recursive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ImpulseWitness>,
}

/// Weight-one information coordinates: one nonzero letter at each position.
fn impulse_codes(seed: &SeedMorphism) -> Vec<u64> {
    let b = seed.space().bits() as usize;
    let mut out = Vec::new();
    for pos in 0..seed.k() {
        for v in 1..seed.space().size() {
            out.push(v << (pos * b));
        }
    }
    out
}

/// Minimum total weight of an infinite continuation from `state`, together
/// with a stabilizer drive realizing it; `None` when every continuation has
/// infinite weight (`state` in `M1`).
fn finite_continuation(
    graph: &TransitionGraph,
    state: usize,
) -> Option<(u64, Vec<u64>)> {
    let good = free_tail_states(graph);
    // Dijkstra to the free-tail set over nonnegative edge weights.
    let mut dist = vec![u64::MAX; graph.num_states];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; graph.num_states];
    let mut heap = std::collections::BinaryHeap::new();
    dist[state] = 0;
    heap.push(std::cmp::Reverse((0u64, state)));
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for (ci, &(v, w)) in graph.edges[u].iter().enumerate() {
            let nd = d + w as u64;
            if nd < dist[v as usize] {
                dist[v as usize] = nd;
                prev[v as usize] = Some((u, ci));
                heap.push(std::cmp::Reverse((nd, v as usize)));
            }
        }
    }
    let target = good.iter().min_by_key(|&g| dist[g])?;
    if dist[target] == u64::MAX {
        return None;
    }
    let mut path = Vec::new();
    let mut u = target;
    while u != state {
        let (p, ci) = prev[u].expect("dijkstra path exists");
        path.push(graph.z_choices[ci]);
        u = p;
    }
    path.reverse();
    Some((dist[target], path))
}

/// Recursiveness: every weight-one impulse applied at a reachable memory
/// state, under any undetected stabilizer letters, must land in `M1`.
pub fn is_recursive(
    seed: &SeedMorphism,
    graph: &TransitionGraph,
    classification: &MemoryClassification,
) -> RecursiveVerdict {
    let b = seed.space().bits() as usize;
    for mem in classification.i_set.iter() {
        for info in impulse_codes(seed) {
            for &stab in &graph.z_choices {
                let (p, m2) = seed.step_coords(mem as u64, info, stab);
                if !classification.in_m1(m2) {
                    let (cont_weight, continuation) =
                        finite_continuation(graph, m2 as usize).expect("state in M0");
                    let step_weight = weight_of_coords(p, b, seed.n()) as u64;
                    return RecursiveVerdict {
                        recursive: false,
                        witness: Some(ImpulseWitness {
                            memory: mem as u64,
                            info,
                            stab,
                            continuation,
                            finite_weight: step_weight + cont_weight,
                        }),
                    };
                }
            }
        }
    }
    RecursiveVerdict {
        recursive: true,
        witness: None,
    }
}

/// Total recursiveness of an encoder seed: its truncated decoder, viewed as
/// a forward morphism, is recursive.
pub fn is_totally_recursive(seed: &SeedMorphism, budgets: &Budgets) -> Result<RecursiveVerdict> {
    let dec = seed.truncated_decoder()?;
    let graph = build_graph(&dec, budgets)?;
    let classification = classify_with_graph(&graph);
    Ok(is_recursive(&dec, &graph, &classification))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum SystematicVerdict {
    /// Some injective choice of physical output letters reproduces the
    /// information letters (up to fixed per-letter automorphisms),
    /// independently of memory and stabilizer inputs.
    StructuralPass { output_positions: Vec<usize> },
    /// An explicit input whose output weight falls below its information
    /// weight.
    Falsified {
        n: usize,
        memory: u64,
        info: Vec<u64>,
        stab: Vec<u64>,
        output_weight: u64,
        info_weight: u64,
    },
    Undecided,
}

/// The systematicity of a seed over all input lengths has no obvious finite
/// decision procedure, so the verdict is three-valued: a structural pass is
/// a sufficient condition, a falsification is a counterexample found by
/// search up to `n_falsify` steps, and otherwise the question stays open.
pub fn is_systematic(seed: &SeedMorphism, n_falsify: usize) -> Result<SystematicVerdict> {
    if seed.kind() != MorphismKind::Encoder {
        return Err(Error::Spec("systematicity applies to encoder seeds".into()));
    }
    if let Some(positions) = structural_systematic_positions(seed) {
        return Ok(SystematicVerdict::StructuralPass {
            output_positions: positions,
        });
    }
    if let Some(v) = falsify_systematic(seed, n_falsify) {
        return Ok(v);
    }
    Ok(SystematicVerdict::Undecided)
}

/// Candidate matching: physical output letter `j` is a faithful copy of
/// information letter `t` when its rows vanish on all memory, stabilizer and
/// other information columns, and the remaining b-by-b block is invertible.
pub fn structural_systematic_positions(seed: &SeedMorphism) -> Option<Vec<usize>> {
    let b = seed.space().bits() as usize;
    let (m, k, n) = (seed.m(), seed.k(), seed.n());
    let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); k];
    for j in 0..n {
        for t in 0..k {
            let mut ok = true;
            let mut block = crate::gf2::BitMatrix::zeros(b, b).ok()?;
            for bit in 0..b {
                let row = seed.matrix().row(j * b + bit);
                let lmask = crate::gf2::mask(b) << ((m + t) * b);
                if row & !lmask != 0 {
                    ok = false;
                    break;
                }
                for c in 0..b {
                    if (row >> ((m + t) * b + c)) & 1 == 1 {
                        block.set(bit, c, true);
                    }
                }
            }
            if ok && block.is_invertible() {
                candidates[t].push(j);
            }
        }
    }
    // injective assignment via augmenting paths
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn try_assign(
        t: usize,
        candidates: &[Vec<usize>],
        owner: &mut Vec<Option<usize>>,
        seen: &mut Vec<bool>,
    ) -> bool {
        for &j in &candidates[t] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none()
                || try_assign(owner[j].unwrap(), candidates, owner, seen)
            {
                owner[j] = Some(t);
                return true;
            }
        }
        false
    }
    for t in 0..k {
        let mut seen = vec![false; n];
        if !try_assign(t, &candidates, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut positions = vec![0usize; k];
    for (j, o) in owner.iter().enumerate() {
        if let Some(t) = *o {
            positions[t] = j;
        }
    }
    Some(positions)
}

fn falsify_systematic(seed: &SeedMorphism, n_falsify: usize) -> Option<SystematicVerdict> {
    let b = seed.space().bits() as usize;
    let (m, k, s) = (seed.m(), seed.k(), seed.s());
    for n_steps in 1..=n_falsify {
        let input_bits = b * (m + n_steps * (k + s));
        if input_bits <= 20 {
            // exhaustive
            for v in 0..(1u64 << input_bits) {
                if let Some(found) = check_systematic_candidate(seed, n_steps, v) {
                    return Some(found);
                }
            }
        } else {
            // random probing at larger sizes
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5751_u64 + n_steps as u64);
            for _ in 0..20_000 {
                let v = rng.gen::<u64>() & crate::gf2::mask(input_bits.min(64));
                if input_bits > 64 {
                    break;
                }
                if let Some(found) = check_systematic_candidate(seed, n_steps, v) {
                    return Some(found);
                }
            }
        }
    }
    None
}

fn check_systematic_candidate(
    seed: &SeedMorphism,
    n_steps: usize,
    packed: u64,
) -> Option<SystematicVerdict> {
    let b = seed.space().bits() as usize;
    let (m, k, s) = (seed.m(), seed.k(), seed.s());
    let mem = packed & crate::gf2::mask(b * m);
    let mut off = b * m;
    let mut info = Vec::with_capacity(n_steps);
    let mut stab = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        info.push((packed >> off) & crate::gf2::mask(b * k));
        off += b * k;
        stab.push((packed >> off) & crate::gf2::mask(b * s));
        off += b * s;
    }
    let info_weight: u64 = info
        .iter()
        .map(|&l| weight_of_coords(l, b, k) as u64)
        .sum();
    if info_weight == 0 {
        return None;
    }
    let mut state = mem;
    let mut out_weight = 0u64;
    for i in 0..n_steps {
        let (p, m2) = seed.step_coords(state, info[i], stab[i]);
        out_weight += weight_of_coords(p, b, seed.n()) as u64;
        state = m2;
    }
    out_weight += weight_of_coords(state, b, m) as u64;
    if out_weight < info_weight {
        Some(SystematicVerdict::Falsified {
            n: n_steps,
            memory: mem,
            info,
            stab,
            output_weight: out_weight,
            info_weight,
        })
    } else {
        None
    }
}

/// Aggregated report used by the command-line front end.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub m: usize,
    pub letter_dim: u8,
    pub recursive: bool,
    pub totally_recursive: bool,
    pub systematic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<u64>,
    pub m0_size: usize,
    pub m1_size: usize,
    pub i_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recursive_witness: Option<ImpulseWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totally_recursive_witness: Option<ImpulseWitness>,
    pub systematic_detail: SystematicVerdict,
}

pub fn classify_report(
    name: &str,
    seed: &SeedMorphism,
    n_falsify: usize,
    budgets: &Budgets,
) -> Result<ClassifyReport> {
    let graph = build_graph(seed, budgets)?;
    let classification = classify_with_graph(&graph);
    let rec = is_recursive(seed, &graph, &classification);
    let tot = is_totally_recursive(seed, budgets)?;
    let sys = is_systematic(seed, n_falsify)?;
    Ok(ClassifyReport {
        name: name.to_string(),
        n: seed.n(),
        k: seed.k(),
        s: seed.s(),
        m: seed.m(),
        letter_dim: seed.space().bits(),
        recursive: rec.recursive,
        totally_recursive: tot.recursive,
        systematic: match &sys {
            SystematicVerdict::StructuralPass { .. } => "structural_pass".into(),
            SystematicVerdict::Falsified { .. } => "falsified".into(),
            SystematicVerdict::Undecided => "undecided".into(),
        },
        eta: classification.eta,
        m0_size: classification.m0.count(),
        m1_size: classification.m1.count(),
        i_size: classification.i_set.count(),
        recursive_witness: rec.witness,
        totally_recursive_witness: tot.witness,
        systematic_detail: sys,
    })
}

/// Graphviz rendering of the transition graph; `M1` states are doubled.
pub fn graph_to_dot(seed: &SeedMorphism, graph: &TransitionGraph) -> String {
    let classification = classify_with_graph(graph);
    let sp = seed.space();
    let mut out = String::from("digraph memory {\n  rankdir=LR;\n");
    for u in 0..graph.num_states {
        let word = Word::from_coords(sp, seed.m(), u as u64);
        let shape = if classification.m1.contains(u) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!("  s{u} [label=\"{word}\", shape={shape}];\n"));
    }
    for u in 0..graph.num_states {
        for (ci, &(v, w)) in graph.edges[u].iter().enumerate() {
            let stab = Word::from_coords(sp, seed.s(), graph.z_choices[ci]);
            let label = if seed.s() == 0 {
                format!("{w}")
            } else {
                format!("{stab}/{w}")
            };
            out.push_str(&format!("  s{u} -> s{} [label=\"{label}\"];\n", v));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoders::{seed_f, seed_r, seed_r_quantum, seed_sys};
    use crate::gf2::BitMatrix;
    use crate::LetterSpace;

    fn budgets() -> Budgets {
        Budgets::default()
    }

    #[test]
    fn graph_of_r() {
        let g = build_graph(&seed_r(), &budgets()).unwrap();
        assert_eq!(g.num_states, 2);
        assert_eq!(g.out_degree(), 1);
        assert_eq!(g.edges[0][0], (0, 0));
        assert_eq!(g.edges[1][0], (1, 1));
    }

    #[test]
    fn graph_of_f() {
        let g = build_graph(&seed_f(), &budgets()).unwrap();
        assert_eq!(g.edges[0][0], (0, 0));
        assert_eq!(g.edges[1][0], (0, 1));
    }

    #[test]
    fn out_degree_matches_z_choices() {
        let g = build_graph(&seed_sys(), &budgets()).unwrap();
        for row in &g.edges {
            assert_eq!(row.len(), g.out_degree());
        }
        // classical Z is trivial: single choice
        assert_eq!(g.out_degree(), 1);
        let gq = build_graph(&seed_r_quantum(), &budgets()).unwrap();
        assert_eq!(gq.out_degree(), 1); // s = 0 for the quantum accumulator
    }

    #[test]
    fn classification_of_r_f_sys() {
        let r = classify(&seed_r(), &budgets()).unwrap();
        assert_eq!(r.i_set.count(), 1);
        assert!(r.i_set.contains(0));
        assert!(r.m0.contains(0) && r.m1.contains(1));
        assert_eq!(r.eta, Some(1));

        let f = classify(&seed_f(), &budgets()).unwrap();
        assert!(f.m0.contains(0) && f.m0.contains(1));
        assert!(f.m1.is_empty());
        assert_eq!(f.eta, None);

        let s = classify(&seed_sys(), &budgets()).unwrap();
        assert!(s.m1.contains(1));
        assert_eq!(s.eta, Some(1));
    }

    #[test]
    fn m0_m1_partition_and_closure() {
        for seed in [seed_r(), seed_f(), seed_sys(), seed_r_quantum()] {
            let g = build_graph(&seed, &budgets()).unwrap();
            let c = classify_with_graph(&g);
            assert_eq!(c.m0.count() + c.m1.count(), g.num_states);
            for u in c.m1.iter() {
                for &(v, _) in &g.edges[u] {
                    assert!(c.m1.contains(v as usize), "M1 not closed at {u}->{v}");
                }
            }
        }
    }

    #[test]
    fn recursive_verdicts() {
        let r = seed_r();
        let g = build_graph(&r, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        assert!(is_recursive(&r, &g, &c).recursive);

        let f = seed_f();
        let g = build_graph(&f, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        let v = is_recursive(&f, &g, &c);
        assert!(!v.recursive);
        let w = v.witness.unwrap();
        assert_eq!((w.memory, w.info), (0, 1));
        assert_eq!(w.finite_weight, 2);

        let s = seed_sys();
        let g = build_graph(&s, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        assert!(is_recursive(&s, &g, &c).recursive);

        let q = seed_r_quantum();
        let g = build_graph(&q, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        assert!(is_recursive(&q, &g, &c).recursive);
    }

    #[test]
    fn totally_recursive_verdicts() {
        assert!(!is_totally_recursive(&seed_r(), &budgets()).unwrap().recursive);
        // the feed-forward seed's decoder is an accumulator
        assert!(is_totally_recursive(&seed_f(), &budgets()).unwrap().recursive);
        assert!(!is_totally_recursive(&seed_sys(), &budgets()).unwrap().recursive);
    }

    #[test]
    fn f_decoder_recursiveness_agrees_with_simulation_oracle() {
        // the feed-forward seed's truncated decoder is an accumulator;
        // cross-check the classifier against the bounded-simulation oracle
        let dec = seed_f().truncated_decoder().unwrap();
        let g = build_graph(&dec, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        let verdict = is_recursive(&dec, &g, &c);
        assert!(verdict.recursive);
        let oracle = crate::experiments::memory_split_oracle(&dec, &budgets()).unwrap();
        for (state, &finite) in oracle.iter().enumerate() {
            assert_eq!(c.m0.contains(state), finite);
        }
        // every impulse from a reachable state lands outside the
        // finite-continuation set
        for mem in c.i_set.iter() {
            for info in 1..dec.space().size() {
                let (_, m2) = dec.step_coords(mem as u64, info, 0);
                assert!(!oracle[m2 as usize]);
            }
        }
    }

    #[test]
    fn memoryless_seed_is_not_recursive() {
        let sp = LetterSpace::classical();
        let m = BitMatrix::identity(1).unwrap();
        let seed = SeedMorphism::new_encoder(sp, 1, 1, 0, m).unwrap();
        let g = build_graph(&seed, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        assert_eq!(g.num_states, 1);
        assert!(!is_recursive(&seed, &g, &c).recursive);
        assert!(!is_totally_recursive(&seed, &budgets()).unwrap().recursive);
    }

    #[test]
    fn systematic_verdicts() {
        match is_systematic(&seed_sys(), 4).unwrap() {
            SystematicVerdict::StructuralPass { output_positions } => {
                assert_eq!(output_positions, vec![0]); // P1 = L
            }
            v => panic!("expected structural pass, got {v:?}"),
        }
        match is_systematic(&seed_r(), 4).unwrap() {
            SystematicVerdict::Falsified {
                n,
                memory,
                info,
                output_weight,
                info_weight,
                ..
            } => {
                assert_eq!(n, 2);
                assert_eq!(memory, 0);
                assert_eq!(info, vec![1, 1]);
                assert_eq!(output_weight, 1);
                assert_eq!(info_weight, 2);
            }
            v => panic!("expected falsified, got {v:?}"),
        }
        let sp = LetterSpace::classical();
        let ident = SeedMorphism::new_encoder(sp, 1, 1, 0, BitMatrix::identity(1).unwrap()).unwrap();
        assert!(matches!(
            is_systematic(&ident, 3).unwrap(),
            SystematicVerdict::StructuralPass { .. }
        ));
    }

    #[test]
    fn speed_witness_is_zero_output() {
        // (M1, M2, L) -> (P, M1', M2') with P = M2, M1' = M2 + L, M2' = M1.
        // Memory swaps each step and only the M2 slot is visible, so the
        // nonzero cycle {10, 01} emits every other step: eta = 2.
        let sp = LetterSpace::classical();
        let m = BitMatrix::parse_rows(&["010".into(), "011".into(), "100".into()], 3).unwrap();
        let seed = SeedMorphism::new_encoder(sp, 1, 1, 2, m).unwrap();
        let g = build_graph(&seed, &budgets()).unwrap();
        let c = classify_with_graph(&g);
        assert_eq!(c.m1.count(), 3); // all but the zero state
        let (eta, witness) = speed(&g, &c.m1).unwrap();
        assert_eq!(eta, 2);
        assert_eq!(witness.stab_choices.len() as u64, eta - 1);
        // replay the witness: all outputs must be zero and stay in M1
        let mut state = witness.start_state;
        assert!(c.m1.contains(state as usize));
        for &s in &witness.stab_choices {
            let (p, m2) = seed.step_coords(state, 0, s);
            assert_eq!(p, 0);
            state = m2;
        }
        // eta is minimal: every eta-long drive from M1 emits something
        for start in c.m1.iter() {
            for s_seq in 0..1 {
                let _ = s_seq;
                let mut st = start as u64;
                let mut w = 0;
                for _ in 0..eta {
                    let (p, m2) = seed.step_coords(st, 0, 0);
                    w += p.count_ones();
                    st = m2;
                }
                assert!(w >= 1, "state {start} emitted nothing over eta steps");
            }
        }
    }

    #[test]
    fn dot_output_smoke() {
        let r = seed_r();
        let g = build_graph(&r, &budgets()).unwrap();
        let dot = graph_to_dot(&r, &g);
        assert!(dot.contains("digraph"));
        assert!(dot.contains("doublecircle"));
    }

    #[test]
    fn classify_report_fields() {
        let rep = classify_report("r", &seed_r(), 4, &budgets()).unwrap();
        assert!(rep.recursive);
        assert!(!rep.totally_recursive);
        assert_eq!(rep.systematic, "falsified");
        assert_eq!(rep.eta, Some(1));
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"recursive\":true"));
    }
}
