//! Block encoders, seed morphisms, truncated decoders, and distances.
//!
//! A block encoder maps `k` information letters plus `n-k` stabilizer
//! letters to `n` physical letters through an invertible linear map. A seed
//! morphism additionally carries `m` memory letters on both sides:
//! `(M, L, S) -> (P, M')`. Encoders are the invertible case with
//! `s = n - k`; the truncated decoder of an encoder maps `(M', P) -> (L, M)`
//! by inverting and dropping the stabilizer part, and is itself a morphism
//! with `s = 0` and the roles of `k` and `n` switched.

use crate::alphabet::{LetterSpace, Role, Word};
use crate::gf2::{mask, BitMatrix};
use crate::{Budgets, Error, Result};

/// A minimum weight, or infinity when no qualifying error exists.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Distance::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// The two distances of an encoder: `d_q` over all nonzero undetected
/// errors, `d_c` over the harmful ones (nontrivial information part).
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub struct DistancePair {
    pub d_c: Distance,
    pub d_q: Distance,
}

/// An invertible map from (information | stabilizer) to physical letters.
#[derive(Clone, Debug)]
pub struct BlockEncoder {
    space: LetterSpace,
    n: usize,
    k: usize,
    matrix: BitMatrix,
    inverse: BitMatrix,
}

impl BlockEncoder {
    pub fn new(space: LetterSpace, n: usize, k: usize, matrix: BitMatrix) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::Dimension(format!(
                "need n >= k >= 0 and n > 0, got n={n}, k={k}"
            )));
        }
        let side = n * space.bits() as usize;
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::Dimension(format!(
                "encoder matrix must be {side}x{side}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let inverse = matrix.inverted().ok_or(Error::NotInvertible)?;
        Ok(Self {
            space,
            n,
            k,
            matrix,
            inverse,
        })
    }

    pub fn space(&self) -> LetterSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.n - self.k
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn input_roles(&self) -> Vec<(Role, usize)> {
        vec![(Role::Information, self.k), (Role::Stabilizer, self.n - self.k)]
    }

    /// Apply to a full-length input word (information then stabilizer part).
    pub fn apply(&self, input: &Word) -> Result<Word> {
        if input.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        if input.len() != self.n {
            return Err(Error::Dimension(format!(
                "input has {} letters, encoder expects {}",
                input.len(),
                self.n
            )));
        }
        let out = self.matrix.apply(input.to_coords()?);
        Word::from_coords(self.space, self.n, out).with_roles(vec![(Role::Physical, self.n)])
    }

    pub fn apply_inverse(&self, output: &Word) -> Result<Word> {
        if output.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        if output.len() != self.n {
            return Err(Error::Dimension(format!(
                "output has {} letters, encoder expects {}",
                output.len(),
                self.n
            )));
        }
        let coords = self.inverse.apply(output.to_coords()?);
        Word::from_coords(self.space, self.n, coords).with_roles(self.input_roles())
    }

    pub fn encode_parts(&self, info: &Word, stab: &Word) -> Result<Word> {
        if info.len() != self.k || stab.len() != self.n - self.k {
            return Err(Error::Dimension(format!(
                "expected {} information and {} stabilizer letters, got {} and {}",
                self.k,
                self.n - self.k,
                info.len(),
                stab.len()
            )));
        }
        self.apply(&info.concat(stab)?)
    }

    /// Raw coordinate form used by enumeration loops: input coordinates are
    /// (L | S) packed letter-major.
    pub fn apply_coords(&self, coords: u64) -> u64 {
        self.matrix.apply(coords)
    }

    /// All undetected input coordinate vectors: any information letters,
    /// stabilizer letters confined to the undetected subspace.
    pub fn undetected_inputs(&self, budgets: &Budgets) -> Result<Vec<u64>> {
        let b = self.space.bits() as usize;
        let s = self.n - self.k;
        let count = (self.space.size() as u128).pow(self.k as u32)
            * (self.space.z_size() as u128).pow(s as u32);
        if count > budgets.max_enumeration as u128 {
            return Err(Error::BudgetExceeded {
                what: "undetected input enumeration".into(),
                needed: count.min(u64::MAX as u128) as u64,
                limit: budgets.max_enumeration,
            });
        }
        let z = self.space.z_letters();
        let mut out = Vec::with_capacity(count as usize);
        let info_bits = b * self.k;
        let mut stab_codes = vec![0usize; s];
        loop {
            let mut stab_coords = 0u64;
            for (i, &zi) in stab_codes.iter().enumerate() {
                stab_coords |= z[zi] << (info_bits + i * b);
            }
            for info in 0..(1u64 << info_bits) {
                out.push(info | stab_coords);
            }
            // odometer over stabilizer choices
            let mut i = 0;
            loop {
                if i == s {
                    return Ok(out);
                }
                stab_codes[i] += 1;
                if stab_codes[i] < z.len() {
                    break;
                }
                stab_codes[i] = 0;
                i += 1;
            }
        }
    }

    /// Exact distances by exhausting undetected inputs.
    pub fn distances(&self, budgets: &Budgets) -> Result<DistancePair> {
        let b = self.space.bits() as usize;
        let info_mask = mask(b * self.k);
        let mut d_q = Distance::Infinite;
        let mut d_c = Distance::Infinite;
        for coords in self.undetected_inputs(budgets)? {
            if coords == 0 {
                continue;
            }
            let w = weight_of_coords(self.apply_coords(coords), b, self.n) as u64;
            let dw = Distance::Finite(w);
            if dw < d_q {
                d_q = dw;
            }
            if coords & info_mask != 0 && dw < d_c {
                d_c = dw;
            }
        }
        Ok(DistancePair { d_c, d_q })
    }

    /// Blockwise repetition: concatenates per-block outputs.
    pub fn blockwise_apply(&self, info: &[Word], stab: &[Word]) -> Result<Word> {
        if info.len() != stab.len() {
            return Err(Error::Dimension(format!(
                "{} information blocks vs {} stabilizer blocks",
                info.len(),
                stab.len()
            )));
        }
        let mut out = Word::zero(self.space, 0);
        for (l, s) in info.iter().zip(stab) {
            out = out.concat(&self.encode_parts(l, s)?)?;
        }
        let len = out.len();
        out.with_roles(vec![(Role::Physical, len)])
    }

    pub fn blockwise_apply_inverse(&self, output: &Word) -> Result<(Vec<Word>, Vec<Word>)> {
        if !output.len().is_multiple_of(self.n) {
            return Err(Error::Dimension(format!(
                "output length {} is not a multiple of block size {}",
                output.len(),
                self.n
            )));
        }
        let nblocks = output.len() / self.n;
        let mut info = Vec::with_capacity(nblocks);
        let mut stab = Vec::with_capacity(nblocks);
        for i in 0..nblocks {
            let w = self.apply_inverse(&output.slice(i * self.n, self.n))?;
            info.push(w.slice(0, self.k));
            stab.push(w.slice(self.k, self.n - self.k));
        }
        Ok((info, stab))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphismKind {
    Encoder,
    TruncatedDecoder,
    Generic,
}

/// A linear map `(M, L, S) -> (P, M')` with `m` memory, `k` information,
/// `s` stabilizer input letters and `n` physical output letters.
#[derive(Clone, Debug)]
pub struct SeedMorphism {
    space: LetterSpace,
    n: usize,
    k: usize,
    s: usize,
    m: usize,
    kind: MorphismKind,
    matrix: BitMatrix,
    inverse: Option<BitMatrix>,
}

impl SeedMorphism {
    /// An encoder seed: square invertible with `s = n - k`.
    pub fn new_encoder(
        space: LetterSpace,
        n: usize,
        k: usize,
        m: usize,
        matrix: BitMatrix,
    ) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::Dimension(format!(
                "need n >= k and n > 0, got n={n}, k={k}"
            )));
        }
        let b = space.bits() as usize;
        let side = b * (n + m);
        if matrix.nrows() != side || matrix.ncols() != side {
            return Err(Error::Dimension(format!(
                "seed encoder matrix must be {side}x{side}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let inverse = matrix.inverted().ok_or(Error::NotInvertible)?;
        Ok(Self {
            space,
            n,
            k,
            s: n - k,
            m,
            kind: MorphismKind::Encoder,
            matrix,
            inverse: Some(inverse),
        })
    }

    /// A generic (not necessarily invertible) morphism.
    pub fn new_generic(
        space: LetterSpace,
        n: usize,
        k: usize,
        s: usize,
        m: usize,
        matrix: BitMatrix,
    ) -> Result<Self> {
        let b = space.bits() as usize;
        let (rows, cols) = (b * (n + m), b * (m + k + s));
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::Dimension(format!(
                "morphism matrix must be {rows}x{cols}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let inverse = if rows == cols { matrix.inverted() } else { None };
        Ok(Self {
            space,
            n,
            k,
            s,
            m,
            kind: MorphismKind::Generic,
            matrix,
            inverse,
        })
    }

    pub fn space(&self) -> LetterSpace {
        self.space
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn s(&self) -> usize {
        self.s
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn kind(&self) -> MorphismKind {
        self.kind
    }
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }
    pub fn inverse_matrix(&self) -> Option<&BitMatrix> {
        self.inverse.as_ref()
    }

    pub fn memory_bits(&self) -> usize {
        self.space.bits() as usize * self.m
    }

    /// Undetected stabilizer choices for one step, as packed S coordinates.
    pub fn z_step_choices(&self, budgets: &Budgets) -> Result<Vec<u64>> {
        let b = self.space.bits() as usize;
        let z = self.space.z_letters();
        let count = (z.len() as u128).pow(self.s as u32);
        if count > budgets.max_z_choices as u128 {
            return Err(Error::BudgetExceeded {
                what: "stabilizer choice enumeration".into(),
                needed: count.min(u64::MAX as u128) as u64,
                limit: budgets.max_z_choices,
            });
        }
        let mut out = vec![0u64];
        for i in 0..self.s {
            let mut next = Vec::with_capacity(out.len() * z.len());
            for &prefix in &out {
                for &zl in &z {
                    next.push(prefix | (zl << (i * b)));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// One step on packed coordinates. Input layout is (M | L | S)
    /// letter-major; returns packed (P, M').
    pub fn step_coords(&self, mem: u64, info: u64, stab: u64) -> (u64, u64) {
        let b = self.space.bits() as usize;
        let v = mem | (info << (b * self.m)) | (stab << (b * (self.m + self.k)));
        let out = self.matrix.apply(v);
        let phys = out & mask(b * self.n);
        let mem_out = (out >> (b * self.n)) & mask(b * self.m);
        (phys, mem_out)
    }

    /// One step on words: `(M, L, S) -> (P, M')`.
    pub fn step(&self, mem: &Word, info: &Word, stab: &Word) -> Result<(Word, Word)> {
        if mem.len() != self.m || info.len() != self.k || stab.len() != self.s {
            return Err(Error::Dimension(format!(
                "step expects ({}, {}, {}) letters, got ({}, {}, {})",
                self.m,
                self.k,
                self.s,
                mem.len(),
                info.len(),
                stab.len()
            )));
        }
        if mem.space() != self.space || info.space() != self.space || stab.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        let (p, m2) = self.step_coords(mem.to_coords()?, info.to_coords()?, stab.to_coords()?);
        Ok((
            Word::from_coords(self.space, self.n, p),
            Word::from_coords(self.space, self.m, m2),
        ))
    }

    /// Apply to a full input word laid out (M | L | S); output (P | M').
    pub fn apply(&self, input: &Word) -> Result<Word> {
        let expect = self.m + self.k + self.s;
        if input.len() != expect {
            return Err(Error::Dimension(format!(
                "input has {} letters, morphism expects {expect}",
                input.len()
            )));
        }
        let mem = input.slice(0, self.m);
        let info = input.slice(self.m, self.k);
        let stab = input.slice(self.m + self.k, self.s);
        let (p, m2) = self.step(&mem, &info, &stab)?;
        p.concat(&m2)?
            .with_roles(vec![(Role::Physical, self.n), (Role::Memory, self.m)])
    }

    /// The truncated decoder: `(M', P) -> (L, M)` where
    /// `C^{-1}(P, M') = (M, L, S)`. Viewed forward it is a morphism with
    /// memory `m`, information size `n`, no stabilizer input, and `k`
    /// physical outputs.
    pub fn truncated_decoder(&self) -> Result<SeedMorphism> {
        if self.kind != MorphismKind::Encoder {
            return Err(Error::Spec(
                "truncated decoder is defined for encoder seeds only".into(),
            ));
        }
        let inv = self.inverse.as_ref().expect("encoders store their inverse");
        let b = self.space.bits() as usize;
        // inv maps (P | M') -> (M | L | S). The decoder maps (M' | P) -> (L | M):
        // permute input columns and select + reorder output rows.
        let in_cols = b * (self.m + self.n);
        let mut matrix = BitMatrix::zeros(b * (self.k + self.m), in_cols)?;
        let remap_col = |c: usize| -> usize {
            // inv column c is P for c < b*n, else M'.
            if c < b * self.n {
                b * self.m + c
            } else {
                c - b * self.n
            }
        };
        for out_row in 0..b * self.k {
            let src = inv.row(b * self.m + out_row); // L rows of inv
            for c in 0..in_cols {
                if (src >> c) & 1 == 1 {
                    matrix.set(out_row, remap_col(c), true);
                }
            }
        }
        for out_row in 0..b * self.m {
            let src = inv.row(out_row); // M rows of inv
            for c in 0..in_cols {
                if (src >> c) & 1 == 1 {
                    matrix.set(b * self.k + out_row, remap_col(c), true);
                }
            }
        }
        let mut dec = SeedMorphism::new_generic(self.space, self.k, self.n, 0, self.m, matrix)?;
        dec.kind = MorphismKind::TruncatedDecoder;
        Ok(dec)
    }

    /// Full inverse step for encoder seeds: `(P, M') -> (M, L, S)`.
    pub fn invert_step_coords(&self, phys: u64, mem_out: u64) -> Option<(u64, u64, u64)> {
        let inv = self.inverse.as_ref()?;
        let b = self.space.bits() as usize;
        let v = phys | (mem_out << (b * self.n));
        let out = inv.apply(v);
        let mem = out & mask(b * self.m);
        let info = (out >> (b * self.m)) & mask(b * self.k);
        let stab = (out >> (b * (self.m + self.k))) & mask(b * self.s);
        Some((mem, info, stab))
    }

    /// A memoryless view of an `m = 0` encoder seed as a block encoder.
    pub fn as_block_encoder(&self) -> Result<BlockEncoder> {
        if self.m != 0 || self.kind != MorphismKind::Encoder {
            return Err(Error::Spec(
                "only memoryless encoder seeds can be viewed as block encoders".into(),
            ));
        }
        BlockEncoder::new(self.space, self.n, self.k, self.matrix.clone())
    }
}

/// Whether a letter-aligned linear map preserves the commutation form of
/// the quotient Pauli alphabet (x/z pairing per letter). The framework only
/// needs group automorphisms, but conjugation by a physical Clifford
/// circuit always yields a form-preserving map, so this is the physical
/// realizability check. Two-bit letters only.
pub fn preserves_commutation_form(matrix: &BitMatrix, space: LetterSpace) -> Result<bool> {
    if space.bits() != 2 {
        return Err(Error::Unsupported(
            "the commutation form is defined for two-bit letters".into(),
        ));
    }
    if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_multiple_of(2) {
        return Err(Error::Dimension(
            "commutation check needs a square letter-aligned matrix".into(),
        ));
    }
    let side = matrix.nrows();
    let mut j = BitMatrix::zeros(side, side)?;
    for letter in 0..side / 2 {
        j.set(2 * letter, 2 * letter + 1, true);
        j.set(2 * letter + 1, 2 * letter, true);
    }
    let mtjm = matrix.transposed().mul(&j.mul(matrix)?)?;
    Ok(mtjm == j)
}

/// Randomized search for a block encoder whose degenerate distance reaches
/// `min_dq`, validated by the exhaustive distance computation. Codimension
/// one is hopeless (any index-two undetected image contains a weight-one
/// word), so `n - k >= 2` is required for `min_dq >= 2`.
pub fn search_block_encoder_with_dq<R: rand::Rng>(
    rng: &mut R,
    space: LetterSpace,
    n: usize,
    k: usize,
    min_dq: u64,
    attempts: usize,
    budgets: &Budgets,
) -> Result<BlockEncoder> {
    let b = space.bits() as usize;
    for _ in 0..attempts {
        let m = BitMatrix::random_invertible(rng, b * n)?;
        let e = BlockEncoder::new(space, n, k, m)?;
        let d = e.distances(budgets)?;
        if let Distance::Finite(dq) = d.d_q {
            if dq >= min_dq {
                return Ok(e);
            }
        }
    }
    Err(Error::CheckFailed(format!(
        "no [[{n},{k}]] encoder with degenerate distance >= {min_dq} found in {attempts} attempts"
    )))
}

pub fn weight_of_coords(coords: u64, bits_per_letter: usize, letters: usize) -> usize {
    let m = mask(bits_per_letter);
    (0..letters)
        .filter(|&i| (coords >> (i * bits_per_letter)) & m != 0)
        .count()
}

/// The classical repetition block encoder (L, S1, S2) -> (L, L+S1, L+S2).
pub fn repetition3() -> BlockEncoder {
    let sp = LetterSpace::classical();
    let m = BitMatrix::parse_rows(&["100".into(), "110".into(), "101".into()], 3).unwrap();
    BlockEncoder::new(sp, 3, 1, m).unwrap()
}

/// The classical accumulator seed (M, L) -> (M, M + L).
pub fn seed_r() -> SeedMorphism {
    let sp = LetterSpace::classical();
    let m = BitMatrix::parse_rows(&["10".into(), "11".into()], 2).unwrap();
    SeedMorphism::new_encoder(sp, 1, 1, 1, m).unwrap()
}

/// The classical feed-forward seed (M, L) -> (M + L, L).
pub fn seed_f() -> SeedMorphism {
    let sp = LetterSpace::classical();
    let m = BitMatrix::parse_rows(&["11".into(), "01".into()], 2).unwrap();
    SeedMorphism::new_encoder(sp, 1, 1, 1, m).unwrap()
}

/// The classical systematic recursive seed (M, L, S) -> ((L, M+S), M+L).
pub fn seed_sys() -> SeedMorphism {
    let sp = LetterSpace::classical();
    // input coords: (M, L, S); output coords: (P1, P2, M')
    let m = BitMatrix::parse_rows(&["010".into(), "101".into(), "110".into()], 3).unwrap();
    SeedMorphism::new_encoder(sp, 2, 1, 1, m).unwrap()
}

/// The quantum accumulator seed (M, L) -> (M, M + L) over the Pauli alphabet.
pub fn seed_r_quantum() -> SeedMorphism {
    let sp = LetterSpace::quantum();
    let m = BitMatrix::parse_rows(
        &["1000".into(), "0100".into(), "1010".into(), "0101".into()],
        4,
    )
    .unwrap();
    SeedMorphism::new_encoder(sp, 1, 1, 1, m).unwrap()
}

/// The two-qubit encoder induced by CNOT conjugation, ancilla on qubit 2:
/// X1 -> X1 X2, Z1 -> Z1, X2 -> X2, Z2 -> Z1 Z2.
pub fn quantum_cnot_encoder() -> BlockEncoder {
    let sp = LetterSpace::quantum();
    // coords (x1, z1, x2, z2): x1' = x1; z1' = z1 + z2; x2' = x1 + x2; z2' = z2.
    let m = BitMatrix::parse_rows(
        &["1000".into(), "0101".into(), "1010".into(), "0001".into()],
        4,
    )
    .unwrap();
    BlockEncoder::new(sp, 2, 1, m).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::automorphism_group;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_block_encoder_valid() {
        let sp = LetterSpace::classical();
        let e = BlockEncoder::new(sp, 2, 2, BitMatrix::identity(2).unwrap()).unwrap();
        let w = Word::parse(sp, "10").unwrap();
        assert_eq!(e.apply(&w).unwrap().to_string(), "10");
    }

    #[test]
    fn singular_matrix_rejected() {
        let sp = LetterSpace::classical();
        let m = BitMatrix::from_rows(vec![0b11, 0b11], 2).unwrap();
        let err = BlockEncoder::new(sp, 2, 1, m).unwrap_err();
        assert!(matches!(err, Error::NotInvertible));
    }

    #[test]
    fn repetition_encoder_works() {
        let e = repetition3();
        let sp = e.space();
        let out = e.apply(&Word::parse(sp, "100").unwrap()).unwrap();
        assert_eq!(out.to_string(), "111");
        // explicit inverse: L = P1, S1 = P1 + P2, S2 = P1 + P3
        let back = e.apply_inverse(&out).unwrap();
        assert_eq!(back.to_string(), "100");
        let d = e.distances(&Budgets::default()).unwrap();
        assert_eq!(d.d_c, Distance::Finite(3));
        assert_eq!(d.d_q, Distance::Finite(3));
    }

    #[test]
    fn seed_r_and_f_are_valid_encoders() {
        let r = seed_r();
        // (M, L) = (1, 0) -> (P, M') = (1, 1)
        let (p, m2) = r.step_coords(1, 0, 0);
        assert_eq!((p, m2), (1, 1));
        // inverse: M = P, L = P + M'
        let (mem, info, _) = r.invert_step_coords(1, 1).unwrap();
        assert_eq!((mem, info), (1, 0));

        let f = seed_f();
        let (p, m2) = f.step_coords(1, 1, 0);
        assert_eq!((p, m2), (0, 1));
        let (mem, info, _) = f.invert_step_coords(0, 1).unwrap();
        assert_eq!((mem, info), (1, 1));
    }

    #[test]
    fn seed_sys_matches_its_definition() {
        let sys = seed_sys();
        // (M, L, S) -> ((L, M+S), M+L) on all 8 inputs
        for mem in 0..2u64 {
            for info in 0..2u64 {
                for stab in 0..2u64 {
                    let (p, m2) = sys.step_coords(mem, info, stab);
                    assert_eq!(p & 1, info);
                    assert_eq!((p >> 1) & 1, mem ^ stab);
                    assert_eq!(m2, mem ^ info);
                }
            }
        }
    }

    #[test]
    fn truncated_decoder_of_r() {
        let r = seed_r();
        let dec = r.truncated_decoder().unwrap();
        assert_eq!(dec.kind(), MorphismKind::TruncatedDecoder);
        assert_eq!((dec.n(), dec.k(), dec.s(), dec.m()), (1, 1, 0, 1));
        // decoder input layout (M' | P), output (L | M): L = P + M', M = P
        for mem_out in 0..2u64 {
            for phys in 0..2u64 {
                let (l, m) = dec.step_coords(mem_out, phys, 0);
                assert_eq!(l, phys ^ mem_out);
                assert_eq!(m, phys);
            }
        }
    }

    #[test]
    fn truncated_decoder_undoes_all_seed_steps() {
        // exhaustive step consistency for every shipped seed
        for seed in [seed_r(), seed_f(), seed_sys(), seed_r_quantum()] {
            let dec = seed.truncated_decoder().unwrap();
            let b = seed.space().bits() as usize;
            for mem in 0..(1u64 << (b * seed.m())) {
                for info in 0..(1u64 << (b * seed.k())) {
                    for stab in 0..(1u64 << (b * seed.s())) {
                        let (p, m2) = seed.step_coords(mem, info, stab);
                        let (l, m) = dec.step_coords(m2, p, 0);
                        assert_eq!((l, m), (info, mem));
                    }
                }
            }
        }
    }

    #[test]
    fn truncated_decoder_of_identity_seed() {
        let sp = LetterSpace::classical();
        // [[1,1,1]] identity-style seed: (M, L) -> (M, L), so P = M, M' = L
        let m = BitMatrix::parse_rows(&["10".into(), "01".into()], 2).unwrap();
        let seed = SeedMorphism::new_encoder(sp, 1, 1, 1, m).unwrap();
        let dec = seed.truncated_decoder().unwrap();
        // inverse gives M = P, L = M', so the decoder (M', P) -> (L, M) is
        // the identity on its input pair
        for mem_out in 0..2u64 {
            for phys in 0..2u64 {
                assert_eq!(dec.step_coords(mem_out, phys, 0), (mem_out, phys));
            }
        }
    }

    #[test]
    fn apply_is_linear_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = quantum_cnot_encoder();
        let sp = e.space();
        for _ in 0..100 {
            let u = Word::from_letters(sp, &[rng.gen_range(0..4), rng.gen_range(0..4)]).unwrap();
            let v = Word::from_letters(sp, &[rng.gen_range(0..4), rng.gen_range(0..4)]).unwrap();
            let lhs = e.apply(&u.compose(&v).unwrap()).unwrap();
            let rhs = e.apply(&u).unwrap().compose(&e.apply(&v).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        let zero = Word::zero(sp, 2);
        assert!(e.apply(&zero).unwrap().is_zero());
    }

    #[test]
    fn quantum_cnot_map_and_distances() {
        let e = quantum_cnot_encoder();
        let sp = e.space();
        let img = |s: &str| e.apply(&Word::parse(sp, s).unwrap()).unwrap().to_string();
        assert_eq!(img("XI"), "XX");
        assert_eq!(img("ZI"), "ZI");
        assert_eq!(img("IX"), "IX");
        assert_eq!(img("IZ"), "ZZ");
        let d = e.distances(&Budgets::default()).unwrap();
        assert_eq!(d.d_c, Distance::Finite(1));
        assert_eq!(d.d_q, Distance::Finite(1));
        // 8 undetected inputs for [[2,1]] quantum
        assert_eq!(e.undetected_inputs(&Budgets::default()).unwrap().len(), 8);
    }

    #[test]
    fn distances_brute_oracle_agreement() {
        // independent oracle: walk every undetected input by hand
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for sp in [LetterSpace::classical(), LetterSpace::quantum()] {
            let b = sp.bits() as usize;
            for _ in 0..20 {
                let n = rng.gen_range(1..=3usize);
                let k = rng.gen_range(0..=n);
                let m = BitMatrix::random_invertible(&mut rng, b * n).unwrap();
                let e = BlockEncoder::new(sp, n, k, m).unwrap();
                let d = e.distances(&Budgets::default()).unwrap();

                let mut oracle_q = Distance::Infinite;
                let mut oracle_c = Distance::Infinite;
                for v in 0..(1u64 << (b * n)) {
                    let w = Word::from_coords(sp, n, v).with_roles(e.input_roles()).unwrap();
                    if v == 0 || !w.slice(k, n - k).all_in_z() {
                        continue;
                    }
                    let out_w = Distance::Finite(weight_of_coords(e.apply_coords(v), b, n) as u64);
                    if out_w < oracle_q {
                        oracle_q = out_w;
                    }
                    if w.slice(0, k).weight() > 0 && out_w < oracle_c {
                        oracle_c = out_w;
                    }
                }
                assert_eq!(d.d_q, oracle_q);
                assert_eq!(d.d_c, oracle_c);
                assert!(d.d_q <= d.d_c);
            }
        }
    }

    #[test]
    fn classical_distances_coincide() {
        let sp = LetterSpace::classical();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut seen = 0;
        while seen < 50 {
            let n = rng.gen_range(1..=4usize);
            let k = rng.gen_range(1..=n);
            let m = BitMatrix::random_invertible(&mut rng, n).unwrap();
            let e = BlockEncoder::new(sp, n, k, m).unwrap();
            let d = e.distances(&Budgets::default()).unwrap();
            assert_eq!(d.d_c, d.d_q, "classical encoder n={n} k={k}");
            seen += 1;
        }
    }

    #[test]
    fn k_zero_reports_infinite_harmful_distance() {
        let sp = LetterSpace::classical();
        let e = BlockEncoder::new(sp, 2, 0, BitMatrix::identity(2).unwrap()).unwrap();
        let d = e.distances(&Budgets::default()).unwrap();
        assert_eq!(d.d_c, Distance::Infinite);
        // classical Z is trivial, so no nonzero undetected input exists either
        assert_eq!(d.d_q, Distance::Infinite);
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let sp = LetterSpace::quantum();
        let e = BlockEncoder::new(sp, 16, 16, BitMatrix::identity(32).unwrap()).unwrap();
        let tight = Budgets {
            max_enumeration: 1 << 10,
            ..Budgets::default()
        };
        assert!(matches!(
            e.distances(&tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn blockwise_apply_concatenates() {
        let e = repetition3();
        let sp = e.space();
        let one = Word::parse(sp, "1").unwrap();
        let zero = Word::parse(sp, "0").unwrap();
        let s0 = Word::zero(sp, 2);
        let out = e
            .blockwise_apply(&[one.clone(), zero.clone()], &[s0.clone(), s0.clone()])
            .unwrap();
        assert_eq!(out.to_string(), "111000");
        assert_eq!(out.weight(), 3);
        // weight of output = sum of per-block weights
        let w1 = e.encode_parts(&one, &s0).unwrap().weight();
        let w2 = e.encode_parts(&zero, &s0).unwrap().weight();
        assert_eq!(out.weight(), w1 + w2);
        // N = 1 equals plain apply
        let single = e.blockwise_apply(std::slice::from_ref(&one), std::slice::from_ref(&s0)).unwrap();
        assert_eq!(single, e.encode_parts(&one, &s0).unwrap());
    }

    #[test]
    fn round_trip_exhaustive_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sp in [LetterSpace::classical(), LetterSpace::quantum()] {
            let b = sp.bits() as usize;
            for _ in 0..10 {
                let n = rng.gen_range(1..=3usize);
                let k = rng.gen_range(0..=n);
                let e =
                    BlockEncoder::new(sp, n, k, BitMatrix::random_invertible(&mut rng, b * n).unwrap())
                        .unwrap();
                for v in 0..(1u64 << (b * n)) {
                    let w = Word::from_coords(sp, n, v);
                    let back = e.apply_inverse(&e.apply(&w).unwrap()).unwrap();
                    assert_eq!(back.to_coords().unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn commutation_form_check() {
        // conjugation by a physical circuit preserves the form
        let cnot = quantum_cnot_encoder();
        assert!(preserves_commutation_form(cnot.matrix(), cnot.space()).unwrap());
        // the quantum accumulator is a group automorphism but not a
        // physical conjugation map: copying M into M+L breaks the pairing
        let acc = seed_r_quantum();
        assert!(!preserves_commutation_form(acc.matrix(), acc.space()).unwrap());
        // a phase-mixing map that is invertible but not form-preserving:
        // x' = x, z' = x + z on one letter sends X to Y and fixes Z, which
        // flips the X/Z pairing with Y
        let sp = LetterSpace::quantum();
        let m = BitMatrix::parse_rows(&["10".into(), "11".into()], 2).unwrap();
        assert!(m.is_invertible());
        assert!(preserves_commutation_form(&m, sp).unwrap());
        // swapping the two bits of one letter exchanges X and Z; the form
        // is symmetric so this still preserves it. A genuine violation
        // needs two letters: map x1 -> x1, z1 -> z2, x2 -> x2+x1? build one
        // and let the checker decide against a brute-force pairing oracle.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut seen_violation = false;
        for _ in 0..40 {
            let m = BitMatrix::random_invertible(&mut rng, 4).unwrap();
            let fast = preserves_commutation_form(&m, sp).unwrap();
            // oracle: check the pairing on all vector pairs
            let pair = |u: u64, v: u64| -> u64 {
                let mut acc = 0;
                for l in 0..2 {
                    let (ux, uz) = ((u >> (2 * l)) & 1, (u >> (2 * l + 1)) & 1);
                    let (vx, vz) = ((v >> (2 * l)) & 1, (v >> (2 * l + 1)) & 1);
                    acc ^= (ux & vz) ^ (uz & vx);
                }
                acc
            };
            let slow = (0..16u64).all(|u| {
                (0..16u64).all(|v| pair(u, v) == pair(m.apply(u), m.apply(v)))
            });
            assert_eq!(fast, slow);
            if !fast {
                seen_violation = true;
            }
        }
        assert!(seen_violation, "random maps should include non-physical ones");
        // classical letters have no commutation structure
        assert!(preserves_commutation_form(
            &BitMatrix::identity(2).unwrap(),
            LetterSpace::classical()
        )
        .is_err());
    }

    #[test]
    fn interleaver_free_automorphism_sanity() {
        // automorphism_group is reused by the turbo module; spot-check here
        // that every element round-trips letters.
        let sp = LetterSpace::quantum();
        for a in automorphism_group(sp).unwrap() {
            for l in sp.letters() {
                assert_eq!(a.inverse().apply(a.apply(l)), l);
            }
        }
    }
}
