//! Counting bounds on weight distributions and interleaver probabilities,
//! all in exact integer or rational arithmetic.
//!
//! Asymptotic statements are handled by replacing every opaque constant with
//! the explicit value recoverable from the corresponding derivation: the
//! closed forms substitute `binom(u, v) <= (u e / v)^v` with a rational
//! upper bound on `e`, so dominance checks stay exact. Reports carry the
//! explicit value; asymptotic claims are only ever checked as trends.

use crate::encoders::BlockEncoder;
use crate::precise::{llog, parse_decimal, LlogVerdict};
use crate::spectra::{InnerSpectra, OuterSpectrum};
use crate::{Budgets, Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rational upper bound on Euler's number, 2.718281828459045236 > e.
pub fn euler_upper_bound() -> BigRational {
    BigRational::new(
        BigInt::parse_bytes(b"2718281828459045236", 10).unwrap(),
        BigInt::parse_bytes(b"1000000000000000000", 10).unwrap(),
    )
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut out = BigUint::one();
    for i in 0..k {
        out = out * BigUint::from(n - k + i + 1) / BigUint::from(i + 1);
    }
    out
}

/// Parameters of the morphism a counting bound is applied to.
#[derive(Clone, Copy, Debug)]
pub struct InnerParams {
    pub m: usize,
    pub k: usize,
    pub eta: u64,
    pub p_size: u64,
}

/// The exact combinatorial bound on `a_N(w, <= d)`:
/// `2^m 2^w (|P|-1)^w binom(kN+1, floor(w/2)+1) binom(eta k (w+d)+1, ceil(w/2))`.
pub fn theorem_inner_bound(params: &InnerParams, w: u64, d: u64, n_steps: u64) -> BigUint {
    let p1 = BigUint::from(2u8).pow(params.m as u32);
    let p2 = BigUint::from(2u8).pow(w as u32);
    let p3 = BigUint::from(params.p_size - 1).pow(w as u32);
    let k = params.k as u64;
    let b1 = binomial(k * n_steps + 1, w / 2 + 1);
    let b2 = binomial(params.eta * k * (w + d) + 1, w.div_ceil(2));
    p1 * p2 * p3 * b1 * b2
}

fn big_ratio(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// `(u e / v)^v` with the rational upper bound on `e`; 1 when `v = 0`.
fn binom_upper(u: u64, v: u64) -> BigRational {
    if v == 0 {
        return BigRational::one();
    }
    let base = BigRational::from_integer(BigInt::from(u)) * euler_upper_bound()
        / BigRational::from_integer(BigInt::from(v));
    rational_pow(&base, v)
}

fn rational_pow(x: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    out
}

/// Explicit closed form obtained by substituting the binomial bound into
/// the combinatorial inner bound; input weight `w_in`, output weight `d_out`.
fn explicit_inner_bound(params: &InnerParams, w_in: u64, d_out: u64, n_steps: u64) -> BigRational {
    let k = params.k as u64;
    let factor = BigRational::from_integer(
        BigInt::from(2u8).pow(params.m as u32)
            * BigInt::from(2u8).pow(w_in as u32)
            * BigInt::from(params.p_size - 1).pow(w_in as u32),
    );
    factor
        * binom_upper(k * n_steps + 1, w_in / 2 + 1)
        * binom_upper(params.eta * k * (w_in + d_out) + 1, w_in.div_ceil(2))
}

/// Closed-form bound on `a_N(w, <= d)` for a recursive seed. At `w = 0` the
/// closed form degenerates and the exact combinatorial value is returned.
pub fn bound_1i(params: &InnerParams, w: u64, d: u64, n_steps: u64) -> BigRational {
    if w == 0 {
        return big_ratio(&theorem_inner_bound(params, w, d, n_steps));
    }
    explicit_inner_bound(params, w, d, n_steps)
}

/// Closed-form bound on `a_N(w, d)` for a seed whose truncated decoder is
/// recursive; `decoder_params` describe the decoder morphism (its
/// information size is the parent's physical size). Input and output
/// weights switch sides relative to the encoder.
pub fn bound_2i(decoder_params: &InnerParams, w: u64, d: u64, n_steps: u64) -> BigRational {
    if d == 0 {
        return big_ratio(&theorem_inner_bound(decoder_params, d, w, n_steps));
    }
    explicit_inner_bound(decoder_params, d, w, n_steps)
}

#[derive(Clone, Debug)]
pub struct Bound1E {
    /// The exact pre-asymptotic sum over support sizes.
    pub sum_form: BigUint,
    /// The single-term majorization; valid when `j_max <= N/2`.
    pub single_term: BigUint,
    pub single_term_valid: bool,
    pub j_max: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct OuterParams {
    pub n: usize,
    pub d_c: u64,
    pub d_q: u64,
    pub p_size: u64,
}

/// Support-counting bound on the blockwise distribution:
/// `a^{(x)N}(d) <= sum_{j=1}^{floor((d-d_c)/d_q)+1} |P|^{nj} binom(N, j)`,
/// zero below the block distance.
pub fn bound_1e(params: &OuterParams, d: u64, n_blocks: u64) -> Bound1E {
    if d < params.d_c {
        return Bound1E {
            sum_form: BigUint::zero(),
            single_term: BigUint::zero(),
            single_term_valid: true,
            j_max: 0,
        };
    }
    let j_max = (d - params.d_c) / params.d_q + 1;
    let p_n = BigUint::from(params.p_size).pow(params.n as u32);
    let mut sum = BigUint::zero();
    for j in 1..=j_max {
        sum += p_n.pow(j as u32) * binomial(n_blocks, j);
    }
    let single_term = BigUint::from(j_max) * p_n.pow(j_max as u32) * binomial(n_blocks, j_max);
    Bound1E {
        sum_form: sum,
        single_term,
        single_term_valid: 2 * j_max <= n_blocks,
        j_max,
    }
}

/// The weight-class density constants of a block encoder: `c_i` is the
/// fraction of weight-`i` words realized by undetected-image codewords.
#[derive(Clone, Debug)]
pub struct ConstantC {
    pub c: Vec<BigRational>,
    /// Index `i >= 1` maximizing `c_i^(1/i)`, when any class is nonempty.
    pub best_index: Option<usize>,
    pub class_sizes: Vec<BigUint>,
}

impl ConstantC {
    /// Approximate value of `c = max c_i^(1/i)` for reporting.
    pub fn c_approx(&self) -> f64 {
        match self.best_index {
            Some(i) => crate::precise::rational_to_f64(&self.c[i]).powf(1.0 / i as f64),
            None => 0.0,
        }
    }
}

/// Enumerate the undetected image and compute the density constants.
/// Requires more than two letters and degenerate distance at least 2.
pub fn constant_c(encoder: &BlockEncoder, budgets: &Budgets) -> Result<ConstantC> {
    let p_size = encoder.space().size();
    if p_size <= 2 {
        return Err(Error::Hypotheses(format!(
            "density constant needs |P| > 2, got {p_size}"
        )));
    }
    let d = encoder.distances(budgets)?;
    let d_q = d.d_q.finite().unwrap_or(u64::MAX);
    if d_q < 2 {
        return Err(Error::Hypotheses(format!(
            "density constant needs degenerate distance >= 2, got {d_q}"
        )));
    }
    let b = encoder.space().bits() as usize;
    let n = encoder.n();
    let mut class_sizes = vec![BigUint::zero(); n + 1];
    for coords in encoder.undetected_inputs(budgets)? {
        let w = crate::encoders::weight_of_coords(encoder.apply_coords(coords), b, n);
        class_sizes[w] += 1u32;
    }
    let mut c = Vec::with_capacity(n + 1);
    for (i, size) in class_sizes.iter().enumerate() {
        let denom = BigUint::from(p_size - 1).pow(i as u32) * binomial(n as u64, i as u64);
        c.push(BigRational::new(
            BigInt::from(size.clone()),
            BigInt::from(denom),
        ));
    }
    // maximize c_i^(1/i) over i >= 1: compare c_i^j against c_j^i
    let mut best: Option<usize> = None;
    for i in 1..=n {
        if c[i].is_zero() {
            continue;
        }
        match best {
            None => best = Some(i),
            Some(j) => {
                let lhs = rational_pow(&c[i], j as u64);
                let rhs = rational_pow(&c[j], i as u64);
                if lhs > rhs {
                    best = Some(i);
                }
            }
        }
    }
    Ok(ConstantC {
        c,
        best_index: best,
        class_sizes,
    })
}

/// Density bound on the blockwise distribution:
/// `a^{(x)N}(d) <= c^d (|P|-1)^d binom(N n, d)`, evaluated with the exact
/// rational relaxation `c^d <= c_i^(floor(d/i))` for the maximizing class.
pub fn bound_2e(cc: &ConstantC, p_size: u64, n: usize, n_blocks: u64, d: u64) -> BigRational {
    if d == 0 {
        return BigRational::one();
    }
    let c_factor = match cc.best_index {
        Some(i) => rational_pow(&cc.c[i], d / i as u64),
        None => return BigRational::zero(),
    };
    let rest = BigUint::from(p_size - 1).pow(d as u32) * binomial(n_blocks * n as u64, d);
    c_factor * big_ratio(&rest)
}

#[derive(Clone, Debug)]
pub struct PBound {
    pub raw: BigRational,
    pub clamped: BigRational,
}

/// Interleaver probability bound: given `a_out` outer sequences of
/// intermediate weight `w` and `a_in` inner-acceptable sequences, a uniform
/// interleaver hits one with probability at most
/// `a_out * a_in / ((|P|-1)^w binom(N n_out, w))`.
pub fn p_bound(
    a_out: &BigUint,
    a_in: &BigUint,
    w: u64,
    n_blocks: u64,
    n_out: usize,
    p_size: u64,
) -> Result<PBound> {
    let total_positions = n_blocks * n_out as u64;
    if w > total_positions {
        return Err(Error::Dimension(format!(
            "weight {w} exceeds the {total_positions} interleaved positions"
        )));
    }
    if a_out.is_zero() || a_in.is_zero() {
        return Ok(PBound {
            raw: BigRational::zero(),
            clamped: BigRational::zero(),
        });
    }
    let denom = BigUint::from(p_size - 1).pow(w as u32) * binomial(total_positions, w);
    let raw = BigRational::new(BigInt::from(a_out * a_in), BigInt::from(denom));
    let clamped = if raw > BigRational::one() {
        BigRational::one()
    } else {
        raw.clone()
    };
    Ok(PBound { raw, clamped })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    Poly,
    Sublog,
}

#[derive(Clone, Debug)]
pub struct PartialSums {
    /// The distance threshold `floor(D)` with `D = N^alpha` or
    /// `D = alpha llog N` depending on the mode.
    pub d_threshold: u64,
    /// `floor(x N)`, the linear split between the second and third sums.
    pub x_n: u64,
    pub sum1: BigRational,
    pub sum2: BigRational,
    pub sum3: BigRational,
}

impl PartialSums {
    pub fn total(&self) -> BigRational {
        &self.sum1 + &self.sum2 + &self.sum3
    }
}

/// Exact `floor(N^alpha)` for rational `alpha = p/q`: the largest `D` with
/// `D^q <= N^p`.
pub fn floor_n_pow_alpha(n: u64, alpha: &BigRational) -> Result<u64> {
    if alpha.is_negative() {
        return Err(Error::Spec("alpha must be nonnegative".into()));
    }
    let p = alpha
        .numer()
        .to_biguint()
        .ok_or_else(|| Error::Spec("alpha must be nonnegative".into()))?;
    let q = alpha
        .denom()
        .to_biguint()
        .ok_or_else(|| Error::Spec("alpha denominator invalid".into()))?;
    let p32 = p.to_u32().ok_or_else(|| Error::Spec("alpha too large".into()))?;
    let q32 = q.to_u32().ok_or_else(|| Error::Spec("alpha too fine".into()))?;
    let rhs = BigUint::from(n).pow(p32);
    let (mut lo, mut hi) = (0u64, n.max(1));
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if BigUint::from(mid).pow(q32) <= rhs {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Exact `floor(alpha llog N)` by interval refinement.
pub fn floor_alpha_llog(n: u64, alpha: &BigRational) -> Result<u64> {
    let mut bits = 96;
    loop {
        let iv = llog(n, bits).scale(alpha);
        let lo = iv.lo.floor().to_integer();
        let hi = iv.hi.floor().to_integer();
        if lo == hi {
            return lo
                .to_u64()
                .ok_or_else(|| Error::Spec("llog threshold out of range".into()));
        }
        if bits >= 4096 {
            return Err(Error::CheckFailed(format!(
                "floor(alpha llog N) undecided for N={n}"
            )));
        }
        bits *= 2;
    }
}

/// The three partial sums of the union-bound decomposition of
/// `p_N(<= D)`: intermediate weight up to `D`, between `D` and `xN`, and at
/// least `xN`. Terms are the clamped interleaver bounds, so the total still
/// dominates the true probability.
#[allow(clippy::too_many_arguments)]
pub fn partial_sums(
    mode: SumMode,
    alpha: &BigRational,
    x: &BigRational,
    n_blocks: u64,
    outer: &OuterSpectrum,
    inner: &InnerSpectra,
    p_size: u64,
    n_out: usize,
) -> Result<PartialSums> {
    let d_threshold = match mode {
        SumMode::Poly => floor_n_pow_alpha(n_blocks, alpha)?,
        SumMode::Sublog => floor_alpha_llog(n_blocks, alpha)?,
    };
    partial_sums_at_threshold(d_threshold, x, n_blocks, outer, inner, p_size, n_out)
}

/// The same decomposition at an explicit integer threshold; the union
/// bound holds for any `D`.
#[allow(clippy::too_many_arguments)]
pub fn partial_sums_at_threshold(
    d_threshold: u64,
    x: &BigRational,
    n_blocks: u64,
    outer: &OuterSpectrum,
    inner: &InnerSpectra,
    p_size: u64,
    n_out: usize,
) -> Result<PartialSums> {
    let total_positions = n_blocks * n_out as u64;
    // complete tables are required so that absent entries are true zeros
    if !inner.exact.complete_w {
        return Err(Error::Spec(
            "partial sums need a complete inner spectrum (all input weights)".into(),
        ));
    }
    if (inner.exact.w_max as u64) < total_positions {
        return Err(Error::Spec(format!(
            "inner spectrum covers w <= {}, need {total_positions}",
            inner.exact.w_max
        )));
    }
    if inner.exact.d_max < d_threshold {
        return Err(Error::Spec(format!(
            "inner spectrum covers d <= {}, need {d_threshold}",
            inner.exact.d_max
        )));
    }
    if (outer.d_range() as usize) < outer.n_blocks * outer.block_len {
        return Err(Error::Spec(
            "partial sums need the full outer spectrum".into(),
        ));
    }
    let x_n = {
        let scaled = x * BigRational::from_integer(BigInt::from(n_blocks));
        scaled
            .floor()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Spec("x N out of range".into()))?
    };
    let term = |w: u64, d: u64, cumulative: bool| -> Result<BigRational> {
        let a_out = outer.a(w);
        if a_out.is_zero() || w > total_positions {
            return Ok(BigRational::zero());
        }
        let a_in = if cumulative {
            inner.a_le(w as usize, d)
        } else {
            inner.a(w as usize, d)
        };
        Ok(p_bound(&a_out, &a_in, w, n_blocks, n_out, p_size)?.clamped)
    };
    let mut sum1 = BigRational::zero();
    for w in 0..=d_threshold.min(total_positions) {
        sum1 += term(w, d_threshold, true)?;
    }
    let mut sum2 = BigRational::zero();
    let w2_hi = x_n.saturating_sub(1).min(total_positions);
    for w in (d_threshold + 1)..=w2_hi {
        for d in 0..=d_threshold {
            sum2 += term(w, d, false)?;
        }
    }
    let mut sum3 = BigRational::zero();
    for w in x_n.max(d_threshold + 1)..=total_positions {
        for d in 0..=d_threshold {
            sum3 += term(w, d, false)?;
        }
    }
    Ok(PartialSums {
        d_threshold,
        x_n,
        sum1,
        sum2,
        sum3,
    })
}

/// The sublogarithmic growth inequality `(t llog N)^(t llog N) <= N^t`.
pub fn llog_check(t: &BigRational, n: u64) -> Result<LlogVerdict> {
    crate::precise::llog_check(t, n, 4096)
}

/// A named bound evaluation with its inputs echoed, for file output and
/// downstream tooling. Values are decimal integers or "num/den" rationals;
/// the closed forms additionally record their asymptotic shape so the
/// explicit value and the trend exponent travel together.
#[derive(Clone, Debug, serde::Serialize)]
pub struct BoundReport {
    pub name: String,
    /// Decimal integer, or "num/den" for rationals.
    pub value: String,
    pub inputs: std::collections::BTreeMap<String, String>,
}

impl BoundReport {
    pub fn new(name: &str, value: String, inputs: &[(&str, String)]) -> Self {
        Self {
            name: name.to_string(),
            value,
            inputs: inputs
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    pub fn inner_theorem(params: &InnerParams, w: u64, d: u64, n_steps: u64) -> Self {
        Self::new(
            "InnerTheorem",
            theorem_inner_bound(params, w, d, n_steps).to_string(),
            &[
                ("w", w.to_string()),
                ("d", d.to_string()),
                ("N", n_steps.to_string()),
                ("m", params.m.to_string()),
                ("k", params.k.to_string()),
                ("eta", params.eta.to_string()),
                ("p_size", params.p_size.to_string()),
            ],
        )
    }

    pub fn bound_1i(params: &InnerParams, w: u64, d: u64, n_steps: u64) -> Self {
        Self::new(
            "1I",
            ratio_string(&bound_1i(params, w, d, n_steps)),
            &[
                ("w", w.to_string()),
                ("d", d.to_string()),
                ("N", n_steps.to_string()),
                ("eta", params.eta.to_string()),
                ("asymptotic", "O(1)^w N^(w/2) (w+d)^(w/2) / w^w".to_string()),
            ],
        )
    }

    pub fn bound_2i(decoder_params: &InnerParams, w: u64, d: u64, n_steps: u64) -> Self {
        Self::new(
            "2I",
            ratio_string(&bound_2i(decoder_params, w, d, n_steps)),
            &[
                ("w", w.to_string()),
                ("d", d.to_string()),
                ("N", n_steps.to_string()),
                ("eta_decoder", decoder_params.eta.to_string()),
                ("asymptotic", "O(1)^d N^(d/2) (w+d)^(d/2) / d^d".to_string()),
            ],
        )
    }

    pub fn bound_1e(params: &OuterParams, d: u64, n_blocks: u64) -> Self {
        let b = bound_1e(params, d, n_blocks);
        Self::new(
            "1E",
            b.sum_form.to_string(),
            &[
                ("d", d.to_string()),
                ("N", n_blocks.to_string()),
                ("d_c", params.d_c.to_string()),
                ("d_q", params.d_q.to_string()),
                ("single_term", b.single_term.to_string()),
                ("single_term_valid", b.single_term_valid.to_string()),
                ("j_max", b.j_max.to_string()),
            ],
        )
    }

    pub fn bound_2e(cc: &ConstantC, p_size: u64, n: usize, n_blocks: u64, d: u64) -> Self {
        Self::new(
            "2E",
            ratio_string(&bound_2e(cc, p_size, n, n_blocks, d)),
            &[
                ("d", d.to_string()),
                ("N", n_blocks.to_string()),
                (
                    "best_class",
                    cc.best_index.map_or(String::new(), |i| i.to_string()),
                ),
                ("c_approx", format!("{:.6}", cc.c_approx())),
            ],
        )
    }

    pub fn p_bound(pb: &PBound, w: u64, d: u64) -> Self {
        Self::new(
            "p_bound",
            ratio_string(&pb.clamped),
            &[
                ("w", w.to_string()),
                ("d", d.to_string()),
                ("raw", ratio_string(&pb.raw)),
            ],
        )
    }

    pub fn partial_sums(sums: &PartialSums, n_blocks: u64) -> Vec<Self> {
        let mk = |name: &str, v: &BigRational| {
            Self::new(
                name,
                ratio_string(v),
                &[
                    ("N", n_blocks.to_string()),
                    ("d_threshold", sums.d_threshold.to_string()),
                    ("x_n", sums.x_n.to_string()),
                ],
            )
        };
        vec![
            mk("partial_sum_1", &sums.sum1),
            mk("partial_sum_2", &sums.sum2),
            mk("partial_sum_3", &sums.sum3),
        ]
    }

    pub fn llog(t: &BigRational, n: u64, verdict: crate::precise::LlogVerdict) -> Self {
        Self::new(
            "llog",
            format!("{verdict:?}"),
            &[("t", ratio_string(t)), ("N", n.to_string())],
        )
    }
}

pub fn ratio_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_alpha(s: &str) -> Result<BigRational> {
    parse_decimal(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{build_graph, classify_with_graph};
    use crate::encoders::{repetition3, seed_r, seed_sys};
    use crate::spectra::{inner_spectrum, outer_spectrum};

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), big(6));
        assert_eq!(binomial(10, 0), big(1));
        assert_eq!(binomial(5, 7), big(0));
        assert_eq!(binomial(52, 5), big(2598960));
    }

    #[test]
    fn binomial_upper_bound_examples() {
        // binom(4,2) = 6 <= (4e/2)^2 ~ 29.56
        let ub = binom_upper(4, 2);
        assert!(big_ratio(&binomial(4, 2)) <= ub);
        assert!(ub < BigRational::from_integer(BigInt::from(30)));
        // spot-check a sweep
        for u in 1..=12u64 {
            for v in 0..=u {
                assert!(big_ratio(&binomial(u, v)) <= binom_upper(u, v), "({u},{v})");
            }
        }
    }

    fn r_params() -> InnerParams {
        let seed = seed_r();
        let g = build_graph(&seed, &Budgets::default()).unwrap();
        let c = classify_with_graph(&g);
        InnerParams {
            m: seed.m(),
            k: seed.k(),
            eta: c.eta.unwrap(),
            p_size: seed.space().size(),
        }
    }

    #[test]
    fn theorem_inner_example_value() {
        // m=1, k=1, eta=1, |P|=2, w=1, d=1, N=2:
        // 2 * 2 * 1 * binom(3,1) * binom(3,1) = 36
        let v = theorem_inner_bound(&r_params(), 1, 1, 2);
        assert_eq!(v, big(36));
        // w=0: 2^m (kN+1)
        assert_eq!(theorem_inner_bound(&r_params(), 0, 5, 3), big(2 * 4));
    }

    #[test]
    fn theorem_dominates_spectrum_sweep() {
        let budgets = Budgets::default();
        for seed in [seed_r(), seed_sys()] {
            let g = build_graph(&seed, &budgets).unwrap();
            let c = classify_with_graph(&g);
            let params = InnerParams {
                m: seed.m(),
                k: seed.k(),
                eta: c.eta.unwrap(),
                p_size: seed.space().size(),
            };
            for n in 1..=6usize {
                let t = inner_spectrum(&seed, n, 4, 4, &budgets).unwrap();
                for w in 0..=4usize {
                    for d in 0..=4u64 {
                        let bound = theorem_inner_bound(&params, w as u64, d, n as u64);
                        assert!(t.a(w, d) <= bound, "a <= bound at ({w},{d},{n})");
                        assert!(t.a_le(w, d) <= bound, "a_le <= bound at ({w},{d},{n})");
                        // the closed form dominates the combinatorial bound
                        let closed = bound_1i(&params, w as u64, d, n as u64);
                        assert!(big_ratio(&bound) <= closed, "closed at ({w},{d},{n})");
                    }
                }
            }
        }
    }

    #[test]
    fn bound_2i_uses_decoder_roles() {
        // the decoder of F is recursive; bound a(w, d) for the encoder F
        let seed = crate::encoders::seed_f();
        let dec = seed.truncated_decoder().unwrap();
        let g = build_graph(&dec, &Budgets::default()).unwrap();
        let c = classify_with_graph(&g);
        let dec_params = InnerParams {
            m: dec.m(),
            k: dec.k(),
            eta: c.eta.unwrap(),
            p_size: dec.space().size(),
        };
        let budgets = Budgets::default();
        for n in 1..=5usize {
            let t = inner_spectrum(&seed, n, 4, 4, &budgets).unwrap();
            for w in 0..=4usize {
                for d in 0..=4u64 {
                    let bound = bound_2i(&dec_params, w as u64, d, n as u64);
                    assert!(
                        big_ratio(&t.a(w, d)) <= bound,
                        "2I dominance at ({w},{d},{n})"
                    );
                }
            }
        }
    }

    #[test]
    fn bound_1e_examples() {
        let params = OuterParams {
            n: 3,
            d_c: 3,
            d_q: 3,
            p_size: 2,
        };
        // rep-3, d=3, N=2: j_max=1, sum = 8 * binom(2,1) = 16 >= a(3) = 2
        let b = bound_1e(&params, 3, 2);
        assert_eq!(b.sum_form, big(16));
        assert_eq!(b.single_term, big(16));
        assert!(b.single_term_valid);
        // below the distance: zero
        let b = bound_1e(&params, 2, 4);
        assert_eq!(b.sum_form, big(0));
    }

    #[test]
    fn bound_1e_dominates_outer_sweep() {
        let e = repetition3();
        let budgets = Budgets::default();
        let d = e.distances(&budgets).unwrap();
        let params = OuterParams {
            n: e.n(),
            d_c: d.d_c.finite().unwrap(),
            d_q: d.d_q.finite().unwrap(),
            p_size: e.space().size(),
        };
        for n in 1..=6u64 {
            let t = outer_spectrum(&e, n as usize, None, &budgets).unwrap();
            for dd in 0..=t.d_range() {
                let b = bound_1e(&params, dd, n);
                if dd > 0 {
                    assert!(t.a(dd) <= b.sum_form, "sum form at d={dd}, N={n}");
                    if b.single_term_valid {
                        assert!(t.a(dd) <= b.single_term, "single term at d={dd}, N={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn bound_2e_monotone_in_n() {
        use rand::SeedableRng;
        let e = crate::encoders::quantum_cnot_encoder();
        // build a density table by hand with a nontrivial best class
        let budgets = Budgets::default();
        let found = crate::encoders::search_block_encoder_with_dq(
            &mut rand_chacha::ChaCha8Rng::seed_from_u64(9),
            e.space(),
            3,
            1,
            2,
            20000,
            &budgets,
        )
        .unwrap();
        let cc = constant_c(&found, &budgets).unwrap();
        for d in 0..=4u64 {
            let mut prev = BigRational::zero();
            for n in 1..=5u64 {
                let v = bound_2e(&cc, 4, found.n(), n, d);
                assert!(v >= prev, "d={d}, N={n}");
                prev = v;
            }
        }
        // d = 0 evaluates to 1
        assert_eq!(bound_2e(&cc, 4, found.n(), 3, 0), BigRational::one());
    }

    #[test]
    fn p_bound_cases() {
        let pb = p_bound(&big(0), &big(7), 3, 2, 3, 2).unwrap();
        assert!(pb.raw.is_zero());
        let pb = p_bound(&big(2), &big(4), 3, 2, 3, 2).unwrap();
        // 8 / binom(6,3) = 8/20
        assert_eq!(pb.raw, BigRational::new(BigInt::from(8), BigInt::from(20)));
        assert_eq!(pb.clamped, pb.raw);
        let pb = p_bound(&big(100), &big(100), 1, 2, 3, 2).unwrap();
        assert!(pb.raw > BigRational::one());
        assert_eq!(pb.clamped, BigRational::one());
        assert!(p_bound(&big(1), &big(1), 7, 2, 3, 2).is_err());
    }

    #[test]
    fn floor_thresholds() {
        let third = BigRational::new(BigInt::from(33), BigInt::from(100));
        assert_eq!(floor_n_pow_alpha(9, &third).unwrap(), 2);
        assert_eq!(floor_n_pow_alpha(8, &third).unwrap(), 1);
        assert_eq!(floor_n_pow_alpha(81, &third).unwrap(), 4);
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(floor_n_pow_alpha(16, &half).unwrap(), 4);
        assert_eq!(floor_n_pow_alpha(17, &half).unwrap(), 4);
        // alpha llog: t=1, N=16: llog 16 ~ 2.7193
        assert_eq!(floor_alpha_llog(16, &BigRational::one()).unwrap(), 2);
    }

    #[test]
    fn llog_sweep() {
        for t_str in ["0.5", "1", "2"] {
            let t = parse_decimal(t_str).unwrap();
            let start = crate::precise::llog_domain_start(&t, 4096).unwrap();
            let mut n = start as f64;
            let mut grid = vec![start, start + 1, start + 2];
            while n < 1_000_000.0 {
                n *= 1.7;
                grid.push((n as u64).min(1_000_000));
            }
            grid.push(1_000_000);
            for &n in &grid {
                assert_eq!(
                    llog_check(&t, n).unwrap(),
                    LlogVerdict::Holds,
                    "t={t_str}, N={n}"
                );
            }
            // just below the domain: not applicable
            assert_eq!(
                llog_check(&t, start - 1).unwrap(),
                LlogVerdict::NotApplicable
            );
        }
    }

    #[test]
    fn partial_sums_zero_spectra() {
        let e = repetition3();
        let budgets = Budgets::default();
        let outer = OuterSpectrum {
            n_blocks: 2,
            block_len: 3,
            counts: vec![BigUint::zero(); 7],
        };
        let inner = inner_spectrum(&seed_r(), 5, 6, 6, &budgets).unwrap();
        let _ = e;
        let sums = partial_sums(
            SumMode::Poly,
            &BigRational::new(BigInt::from(1), BigInt::from(2)),
            &parse_decimal("0.9").unwrap(),
            2,
            &outer,
            &inner,
            2,
            3,
        )
        .unwrap();
        assert!(sums.sum1.is_zero() && sums.sum2.is_zero() && sums.sum3.is_zero());
    }

    #[test]
    fn bound_reports_carry_names_and_inputs() {
        let params = r_params();
        let rep = BoundReport::inner_theorem(&params, 1, 1, 2);
        assert_eq!(rep.name, "InnerTheorem");
        assert_eq!(rep.value, "36");
        assert_eq!(rep.inputs["eta"], "1");
        let rep = BoundReport::bound_1i(&params, 2, 2, 3);
        assert_eq!(rep.name, "1I");
        assert!(rep.inputs["asymptotic"].contains("N^(w/2)"));
        let outer = OuterParams { n: 3, d_c: 3, d_q: 3, p_size: 2 };
        let rep = BoundReport::bound_1e(&outer, 3, 2);
        assert_eq!((rep.name.as_str(), rep.value.as_str()), ("1E", "16"));
        assert_eq!(rep.inputs["j_max"], "1");
        let sums = PartialSums {
            d_threshold: 2,
            x_n: 1,
            sum1: BigRational::zero(),
            sum2: BigRational::new(BigInt::from(2), BigInt::from(5)),
            sum3: BigRational::zero(),
        };
        let reps = BoundReport::partial_sums(&sums, 2);
        assert_eq!(reps.len(), 3);
        assert_eq!(reps[1].name, "partial_sum_2");
        assert_eq!(reps[1].value, "2/5");
        // serializes to json for downstream tooling
        let json = serde_json::to_string(&reps[1]).unwrap();
        assert!(json.contains("\"d_threshold\":\"2\""));
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(ratio_string(&BigRational::one()), "1");
        assert_eq!(
            ratio_string(&BigRational::new(BigInt::from(8), BigInt::from(20))),
            "2/5"
        );
    }
}
