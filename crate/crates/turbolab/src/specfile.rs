//! JSON encoder specification files.
//!
//! ```json
//! {
//!   "letter_dim": 1,
//!   "z_basis": [],
//!   "n": 1, "k": 1, "m": 1,
//!   "matrix": ["10", "11"]
//! }
//! ```
//!
//! Rows are in output-coordinate order `(P | M')`; columns follow the input
//! order `(M | L | S)`, letter-major then bit. `z_basis` entries are bit
//! strings of length `letter_dim` with the first character as bit 0.
//! `m = 0` (or absent) describes a block encoder; `s` defaults to `n - k`.

use crate::alphabet::LetterSpace;
use crate::encoders::{BlockEncoder, SeedMorphism};
use crate::gf2::BitMatrix;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EncoderSpecFile {
    pub letter_dim: u8,
    #[serde(default)]
    pub z_basis: Vec<String>,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    pub matrix: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Additionally require the map to preserve the commutation form
    /// (physical realizability of two-bit-letter encoders).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub require_symplectic: bool,
}

/// A parsed and validated encoder. Every loaded encoder is a seed morphism;
/// memoryless ones additionally expose their block-encoder view.
#[derive(Clone, Debug)]
pub struct LoadedEncoder {
    pub name: String,
    pub seed: SeedMorphism,
    pub block: Option<BlockEncoder>,
}

impl EncoderSpecFile {
    pub fn space(&self) -> Result<LetterSpace> {
        let probe = LetterSpace::new(self.letter_dim, &[])?;
        let basis: Vec<u64> = self
            .z_basis
            .iter()
            .map(|s| probe.parse_bitstring(s))
            .collect::<Result<_>>()?;
        LetterSpace::new(self.letter_dim, &basis)
    }

    pub fn build(&self, fallback_name: &str) -> Result<LoadedEncoder> {
        let space = self.space()?;
        let b = space.bits() as usize;
        if self.k > self.n || self.n == 0 {
            return Err(Error::Spec(format!(
                "need n >= k and n > 0, got n={}, k={}",
                self.n, self.k
            )));
        }
        let s = self.s.unwrap_or(self.n - self.k);
        if s != self.n - self.k {
            return Err(Error::Spec(format!(
                "encoder specs require s = n - k, got s={s}, n-k={}",
                self.n - self.k
            )));
        }
        let cols = b * (self.m + self.k + s);
        let rows_expected = b * (self.n + self.m);
        if self.matrix.len() != rows_expected {
            return Err(Error::Spec(format!(
                "matrix has {} rows, expected {rows_expected}",
                self.matrix.len()
            )));
        }
        let matrix = BitMatrix::parse_rows(&self.matrix, cols)?;
        if self.require_symplectic
            && !crate::encoders::preserves_commutation_form(&matrix, space)?
        {
            return Err(Error::Spec(
                "matrix does not preserve the commutation form".into(),
            ));
        }
        let seed = SeedMorphism::new_encoder(space, self.n, self.k, self.m, matrix)?;
        let block = if self.m == 0 {
            Some(seed.as_block_encoder()?)
        } else {
            None
        };
        Ok(LoadedEncoder {
            name: self.name.clone().unwrap_or_else(|| fallback_name.to_string()),
            seed,
            block,
        })
    }

    pub fn from_seed(seed: &SeedMorphism, name: Option<String>) -> Self {
        let space = seed.space();
        Self {
            letter_dim: space.bits(),
            z_basis: space.z_basis().iter().map(|&v| space.bitstring(v)).collect(),
            n: seed.n(),
            k: seed.k(),
            m: seed.m(),
            s: Some(seed.s()),
            matrix: seed.matrix().row_strings(),
            name,
            require_symplectic: false,
        }
    }

    pub fn from_block(block: &BlockEncoder, name: Option<String>) -> Self {
        let space = block.space();
        Self {
            letter_dim: space.bits(),
            z_basis: space.z_basis().iter().map(|&v| space.bitstring(v)).collect(),
            n: block.n(),
            k: block.k(),
            m: 0,
            s: Some(block.s()),
            matrix: block.matrix().row_strings(),
            name,
            require_symplectic: false,
        }
    }
}

pub fn load_encoder(path: &Path) -> Result<LoadedEncoder> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
    let spec: EncoderSpecFile = serde_json::from_str(&text).map_err(|e| {
        Error::Spec(format!(
            "{} at line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "encoder".into());
    spec.build(&stem)
        .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))
}

pub fn save_encoder(path: &Path, spec: &EncoderSpecFile) -> Result<()> {
    let text = serde_json::to_string_pretty(spec)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
