//! Error letters, words, and per-letter automorphisms.
//!
//! A letter is an element of the elementary abelian error group with `b` bits
//! per letter; composition is bitwise XOR and every letter is its own
//! inverse. A designated strict subspace holds the syndromes that escape
//! detection. Two instantiations matter in practice: the classical bit-flip
//! alphabet (`b = 1`, trivial subspace) and the quotient Pauli alphabet
//! (`b = 2`, subspace spanned by the phase-flip letter).

use crate::gf2::{mask, BitMatrix};
use crate::{Error, Result};

/// Bits per letter are capped well above what any experiment here needs;
/// automorphism enumeration is additionally capped at 3 bits.
pub const MAX_LETTER_DIM: u8 = 6;

/// Wire convention for the quantum alphabet: bit 0 is the X component and
/// bit 1 is the Z component, so I=00, X=10, Z=01, Y=11 as bit strings and
/// I=0, X=1, Z=2, Y=3 as integer codes. The undetected subspace is {I, Z}.
pub const QUANTUM_SYMBOLS: [char; 4] = ['I', 'X', 'Z', 'Y'];

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LetterSpace {
    bits: u8,
    /// Bitset over letter codes, marking members of the undetected subspace.
    z_members: u64,
    z_basis: [u8; MAX_LETTER_DIM as usize],
    z_rank: u8,
}

impl LetterSpace {
    pub fn new(bits: u8, z_basis: &[u64]) -> Result<Self> {
        if bits == 0 || bits > MAX_LETTER_DIM {
            return Err(Error::Spec(format!(
                "letter dimension must be in 1..={MAX_LETTER_DIM}, got {bits}"
            )));
        }
        let m = mask(bits as usize);
        let mut basis = [0u8; MAX_LETTER_DIM as usize];
        for (i, &v) in z_basis.iter().enumerate() {
            if v & !m != 0 {
                return Err(Error::Spec(format!(
                    "z_basis vector {i} does not fit in {bits} bits"
                )));
            }
            if i >= bits as usize {
                return Err(Error::Spec("too many z_basis vectors".into()));
            }
            basis[i] = v as u8;
        }
        let rank = {
            let rows: Vec<u64> = z_basis.to_vec();
            BitMatrix::from_rows(rows, bits as usize)?.rank()
        };
        if rank != z_basis.len() {
            return Err(Error::Spec(
                "z_basis vectors are not linearly independent".into(),
            ));
        }
        if rank >= bits as usize {
            return Err(Error::Spec(
                "undetected subspace must be strict (rank < letter dimension)".into(),
            ));
        }
        // Span the basis to get the membership bitset.
        let mut z_members = 1u64; // the identity letter
        for &v in z_basis {
            let mut extra = 0u64;
            for code in 0..(1u64 << bits) {
                if (z_members >> code) & 1 == 1 {
                    extra |= 1 << (code ^ v);
                }
            }
            z_members |= extra;
        }
        Ok(Self {
            bits,
            z_members,
            z_basis: basis,
            z_rank: rank as u8,
        })
    }

    /// The classical bit-flip alphabet: one bit per letter, trivial subspace.
    pub fn classical() -> Self {
        Self::new(1, &[]).expect("classical space is valid")
    }

    /// The quotient Pauli alphabet with the {I, Z} undetected subspace.
    pub fn quantum() -> Self {
        Self::new(2, &[0b10]).expect("quantum space is valid")
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    /// Number of letters, |P| = 2^b.
    pub fn size(&self) -> u64 {
        1 << self.bits
    }

    /// Number of undetected syndromes, |Z| = 2^rank.
    pub fn z_size(&self) -> u64 {
        1 << self.z_rank
    }

    pub fn z_rank(&self) -> u8 {
        self.z_rank
    }

    pub fn in_z(&self, letter: u64) -> bool {
        letter < 64 && (self.z_members >> letter) & 1 == 1
    }

    pub fn z_basis(&self) -> Vec<u64> {
        self.z_basis[..self.z_rank as usize]
            .iter()
            .map(|&v| v as u64)
            .collect()
    }

    pub fn letters(&self) -> impl Iterator<Item = u64> {
        0..self.size()
    }

    pub fn z_letters(&self) -> Vec<u64> {
        self.letters().filter(|&l| self.in_z(l)).collect()
    }

    pub fn compose(&self, a: u64, b: u64) -> u64 {
        a ^ b
    }

    pub fn letter_to_char(&self, code: u64) -> char {
        match self.bits {
            1 => {
                if code == 0 {
                    '0'
                } else {
                    '1'
                }
            }
            2 => QUANTUM_SYMBOLS[code as usize],
            _ => char::from_digit(code as u32, 36).unwrap_or('?'),
        }
    }

    pub fn char_to_letter(&self, c: char) -> Result<u64> {
        let code = match self.bits {
            1 => match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::Spec(format!("invalid classical symbol {c:?}"))),
            },
            2 => match c {
                'I' => 0,
                'X' => 1,
                'Z' => 2,
                'Y' => 3,
                _ => return Err(Error::Spec(format!("invalid quantum symbol {c:?}"))),
            },
            _ => c
                .to_digit(36)
                .map(u64::from)
                .filter(|&v| v < self.size())
                .ok_or_else(|| Error::Spec(format!("invalid symbol {c:?}")))?,
        };
        Ok(code)
    }

    /// Parse a letter written as a bit string, first character = bit 0.
    pub fn parse_bitstring(&self, s: &str) -> Result<u64> {
        if s.len() != self.bits as usize {
            return Err(Error::Spec(format!(
                "bit string {s:?} has length {}, expected {}",
                s.len(),
                self.bits
            )));
        }
        let mut v = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v |= 1 << i,
                _ => return Err(Error::Spec(format!("invalid bit {c:?} in {s:?}"))),
            }
        }
        Ok(v)
    }

    pub fn bitstring(&self, code: u64) -> String {
        (0..self.bits)
            .map(|i| if (code >> i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl std::fmt::Debug for LetterSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LetterSpace(b={}, |Z|={})",
            self.bits,
            self.z_size()
        )
    }
}

/// Role a contiguous run of letters plays relative to an encoder.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Information,
    Stabilizer,
    Physical,
    Memory,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RoleSpan {
    pub role: Role,
    pub len: usize,
}

#[derive(Default, Clone, Copy, PartialEq, Eq, Debug)]
pub struct SegmentWeights {
    pub information: usize,
    pub stabilizer: usize,
    pub physical: usize,
    pub memory: usize,
    /// Stabilizer-role letters lying outside the undetected subspace.
    pub detected: usize,
}

impl SegmentWeights {
    pub fn total(&self) -> usize {
        self.information + self.stabilizer + self.physical + self.memory
    }
}

/// A finite sequence of letters with an optional role layout. Letters are
/// packed `b` bits apiece into 64-bit words; composition is a word-wise XOR.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    space: LetterSpace,
    len: usize,
    bits: Vec<u64>,
    roles: Option<Vec<(Role, usize)>>,
}

impl Word {
    pub fn zero(space: LetterSpace, len: usize) -> Self {
        let total_bits = len * space.bits() as usize;
        Self {
            space,
            len,
            bits: vec![0; total_bits.div_ceil(64)],
            roles: None,
        }
    }

    pub fn from_letters(space: LetterSpace, letters: &[u64]) -> Result<Self> {
        let mut w = Self::zero(space, letters.len());
        for (i, &l) in letters.iter().enumerate() {
            if l >= space.size() {
                return Err(Error::Spec(format!("letter code {l} out of range")));
            }
            w.set_letter(i, l);
        }
        Ok(w)
    }

    pub fn parse(space: LetterSpace, s: &str) -> Result<Self> {
        let letters: Vec<u64> = s
            .chars()
            .map(|c| space.char_to_letter(c))
            .collect::<Result<_>>()?;
        Self::from_letters(space, &letters)
    }

    pub fn space(&self) -> LetterSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let b = self.space.bits() as usize;
        let bit = i * b;
        let word = bit / 64;
        let off = bit % 64;
        // b <= 6 and letters are packed contiguously, so one letter can
        // straddle a word boundary.
        let mut v = self.bits[word] >> off;
        if off + b > 64 && word + 1 < self.bits.len() {
            v |= self.bits[word + 1] << (64 - off);
        }
        v & mask(b)
    }

    pub fn set_letter(&mut self, i: usize, code: u64) {
        debug_assert!(i < self.len);
        let b = self.space.bits() as usize;
        let bit = i * b;
        let word = bit / 64;
        let off = bit % 64;
        let m = mask(b);
        self.bits[word] &= !(m << off);
        self.bits[word] |= (code & m) << off;
        if off + b > 64 && word + 1 < self.bits.len() {
            let spill = off + b - 64;
            let hi = (code & m) >> (b - spill);
            self.bits[word + 1] &= !mask(spill);
            self.bits[word + 1] |= hi;
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.letter(i))
    }

    pub fn weight(&self) -> usize {
        self.letters().filter(|&l| l != 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// All letters inside the undetected subspace.
    pub fn all_in_z(&self) -> bool {
        self.letters().all(|l| self.space.in_z(l))
    }

    pub fn compose(&self, other: &Word) -> Result<Word> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        if self.len != other.len {
            return Err(Error::Dimension(format!(
                "cannot compose words of lengths {} and {}",
                self.len, other.len
            )));
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Word {
            space: self.space,
            len: self.len,
            bits,
            roles: if self.roles == other.roles {
                self.roles.clone()
            } else {
                None
            },
        })
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = Word::zero(self.space, self.len + other.len);
        for (i, l) in self.letters().enumerate() {
            out.set_letter(i, l);
        }
        for (i, l) in other.letters().enumerate() {
            out.set_letter(self.len + i, l);
        }
        Ok(out)
    }

    pub fn slice(&self, start: usize, len: usize) -> Word {
        let mut out = Word::zero(self.space, len);
        for i in 0..len {
            out.set_letter(i, self.letter(start + i));
        }
        out
    }

    pub fn with_roles(mut self, roles: Vec<(Role, usize)>) -> Result<Word> {
        let total: usize = roles.iter().map(|(_, n)| n).sum();
        if total != self.len {
            return Err(Error::Dimension(format!(
                "role spans cover {total} letters, word has {}",
                self.len
            )));
        }
        self.roles = Some(roles);
        Ok(self)
    }

    pub fn roles(&self) -> Option<&[(Role, usize)]> {
        self.roles.as_deref()
    }

    pub fn segment_weights(&self) -> Result<SegmentWeights> {
        let roles = self
            .roles
            .as_ref()
            .ok_or_else(|| Error::MissingRoles("word has no role layout".into()))?;
        let mut out = SegmentWeights::default();
        let mut pos = 0;
        for &(role, n) in roles {
            for i in pos..pos + n {
                let l = self.letter(i);
                if l == 0 {
                    continue;
                }
                match role {
                    Role::Information => out.information += 1,
                    Role::Stabilizer => {
                        out.stabilizer += 1;
                        if !self.space.in_z(l) {
                            out.detected += 1;
                        }
                    }
                    Role::Physical => out.physical += 1,
                    Role::Memory => out.memory += 1,
                }
            }
            pos += n;
        }
        Ok(out)
    }

    /// Pack the word into a flat coordinate vector (letter-major, bit-minor).
    /// Only valid for words whose total bit count fits a single u64.
    pub fn to_coords(&self) -> Result<u64> {
        let total = self.len * self.space.bits() as usize;
        if total > 64 {
            return Err(Error::Dimension(format!(
                "word of {total} bits does not fit a 64-bit coordinate vector"
            )));
        }
        Ok(*self.bits.first().unwrap_or(&0))
    }

    pub fn from_coords(space: LetterSpace, len: usize, coords: u64) -> Self {
        let mut w = Word::zero(space, len);
        if !w.bits.is_empty() {
            w.bits[0] = coords & mask(len * space.bits() as usize);
        }
        w
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in self.letters() {
            write!(f, "{}", self.space.letter_to_char(l))?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Word({self})")
    }
}

/// An invertible linear map on single letters. Fixes the identity letter and
/// permutes the rest.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LetterAutomorphism {
    bits: u8,
    matrix: BitMatrix,
}

impl LetterAutomorphism {
    pub fn new(space: LetterSpace, matrix: BitMatrix) -> Result<Self> {
        let b = space.bits() as usize;
        if matrix.nrows() != b || matrix.ncols() != b {
            return Err(Error::Dimension(format!(
                "automorphism matrix must be {b}x{b}"
            )));
        }
        if !matrix.is_invertible() {
            return Err(Error::NotInvertible);
        }
        Ok(Self {
            bits: space.bits(),
            matrix,
        })
    }

    pub fn identity(space: LetterSpace) -> Self {
        Self {
            bits: space.bits(),
            matrix: BitMatrix::identity(space.bits() as usize).unwrap(),
        }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn apply(&self, code: u64) -> u64 {
        self.matrix.apply(code)
    }

    pub fn inverse(&self) -> Self {
        Self {
            bits: self.bits,
            matrix: self.matrix.inverted().expect("automorphisms are invertible"),
        }
    }

    /// Whether the automorphism maps the undetected subspace onto itself.
    pub fn preserves_z(&self, space: LetterSpace) -> bool {
        space.z_letters().iter().all(|&z| space.in_z(self.apply(z)))
    }
}

/// All invertible letter maps, by brute force over matrices. Feasible for
/// at most 3 bits per letter (GL sizes 1, 6, 168).
pub fn automorphism_group(space: LetterSpace) -> Result<Vec<LetterAutomorphism>> {
    let b = space.bits() as usize;
    if b > 3 {
        return Err(Error::BudgetExceeded {
            what: "automorphism enumeration".into(),
            needed: 1u64 << (b * b),
            limit: 1 << 9,
        });
    }
    let mut out = Vec::new();
    let m = mask(b);
    for enc in 0..(1u64 << (b * b)) {
        let rows: Vec<u64> = (0..b).map(|r| (enc >> (r * b)) & m).collect();
        let cand = BitMatrix::from_rows(rows, b)?;
        if cand.is_invertible() {
            out.push(LetterAutomorphism {
                bits: b as u8,
                matrix: cand,
            });
        }
    }
    Ok(out)
}
