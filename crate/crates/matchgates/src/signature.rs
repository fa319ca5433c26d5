//! Boolean signatures and their validation: parity classification, the
//! matchgate identities, blockwise symmetry, matrix forms, exact rank and
//! the 2x2 determinant diagnostics.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("vector length {len} does not match arity {arity}")]
    LengthMismatch { len: usize, arity: usize },
    #[error("arity {arity} is not divisible by block size {block_size}")]
    BlockMismatch { arity: usize, block_size: usize },
    #[error("malformed position set: positions must be strictly increasing, nonempty and within 1..={arity}")]
    MalformedPositions { arity: usize },
    #[error("arity {arity} exceeds the exhaustive identity-sweep cap {cap}; use sampling")]
    ArityOverCap { arity: usize, cap: usize },
    #[error("the determinant diagnostics need at least 3 blocks, got {blocks}")]
    TooFewBlocks { blocks: usize },
}

/// Default arity bound for the exhaustive matchgate-identity sweep; the
/// sweep touches `4^n` pattern/position pairs.
pub const MGI_EXHAUSTIVE_CAP: usize = 12;

/// A dense arity-`n` signature over the Boolean domain. Entry `α` lives at
/// the integer index whose most significant bit (of the low `n`) is the
/// first position of `α`.
#[derive(Clone, PartialEq, Eq)]
pub struct BooleanSignature {
    arity: usize,
    values: Vec<Scalar>,
}

impl BooleanSignature {
    pub fn new(arity: usize, values: Vec<Scalar>) -> Result<Self, SignatureError> {
        if values.len() != 1usize << arity {
            return Err(SignatureError::LengthMismatch {
                len: values.len(),
                arity,
            });
        }
        Ok(BooleanSignature { arity, values })
    }

    pub fn zero(arity: usize) -> Self {
        BooleanSignature {
            arity,
            values: vec![Scalar::zero(); 1 << arity],
        }
    }

    /// Builds a signature from `(bitstring, value)` pairs; unlisted entries
    /// are zero.
    pub fn from_entries(arity: usize, entries: &[(&str, Scalar)]) -> Result<Self, SignatureError> {
        let mut sig = BooleanSignature::zero(arity);
        for (bitstring, value) in entries {
            let (index, len) =
                bits::from_bitstring(bitstring).ok_or(SignatureError::LengthMismatch {
                    len: bitstring.len(),
                    arity,
                })?;
            if len != arity {
                return Err(SignatureError::LengthMismatch { len, arity });
            }
            sig.values[index] = value.clone();
        }
        Ok(sig)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, index: usize) -> &Scalar {
        &self.values[index]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn set(&mut self, index: usize, value: Scalar) {
        self.values[index] = value;
    }

    pub fn scale(&self, factor: &Scalar) -> BooleanSignature {
        BooleanSignature {
            arity: self.arity,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &BooleanSignature) -> Result<BooleanSignature, SignatureError> {
        if self.arity != other.arity {
            return Err(SignatureError::LengthMismatch {
                len: other.values.len(),
                arity: self.arity,
            });
        }
        Ok(BooleanSignature {
            arity: self.arity,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Tensor product; `self` supplies the leading positions.
    pub fn tensor(&self, other: &BooleanSignature) -> BooleanSignature {
        let arity = self.arity + other.arity;
        let mut values = Vec::with_capacity(1 << arity);
        for a in &self.values {
            for b in &other.values {
                values.push(a * b);
            }
        }
        BooleanSignature { arity, values }
    }

    pub fn block_view(&self, block_size: usize) -> Result<BlockView<'_>, SignatureError> {
        if block_size == 0 || self.arity % block_size != 0 {
            return Err(SignatureError::BlockMismatch {
                arity: self.arity,
                block_size,
            });
        }
        Ok(BlockView {
            signature: self,
            block_size,
            blocks: self.arity / block_size,
        })
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(|&i| !self.values[i].is_zero())
    }

    /// Classifies the parity structure of the support.
    pub fn check_parity(&self) -> ParityVerdict {
        let mut even = None;
        let mut odd = None;
        for index in self.support() {
            if index.count_ones() % 2 == 0 {
                even.get_or_insert(index);
            } else {
                odd.get_or_insert(index);
            }
            if let (Some(e), Some(o)) = (even, odd) {
                return ParityVerdict::Violated {
                    even_witness: e,
                    odd_witness: o,
                };
            }
        }
        match (even, odd) {
            (None, None) => ParityVerdict::Zero,
            (Some(_), None) => ParityVerdict::Even,
            (None, Some(_)) => ParityVerdict::Odd,
            (Some(_), Some(_)) => unreachable!(),
        }
    }

    /// One matchgate identity residual: the alternating sum
    /// `Σ_i (−1)^i Γ^{α+e_{p_i}} Γ^{α+P+e_{p_i}}` over the positions of `P`
    /// in increasing order (`+` is XOR).
    pub fn mgi_residual(&self, alpha: usize, positions: &[usize]) -> Result<Scalar, SignatureError> {
        if positions.is_empty()
            || positions.windows(2).any(|w| w[0] >= w[1])
            || *positions.last().unwrap() > self.arity
            || positions[0] < 1
        {
            return Err(SignatureError::MalformedPositions { arity: self.arity });
        }
        let mask = positions
            .iter()
            .fold(0usize, |m, &p| m | bits::pos_mask(p, self.arity));
        Ok(self.mgi_residual_mask(alpha, mask))
    }

    fn mgi_residual_mask(&self, alpha: usize, position_mask: usize) -> Scalar {
        let shifted = alpha ^ position_mask;
        let mut total = Scalar::zero();
        let mut negative = true; // the i = 1 term carries (−1)^1
        for p in 1..=self.arity {
            let bit = bits::pos_mask(p, self.arity);
            if position_mask & bit == 0 {
                continue;
            }
            let lhs = &self.values[alpha ^ bit];
            if !lhs.is_zero() {
                let rhs = &self.values[shifted ^ bit];
                if !rhs.is_zero() {
                    let term = lhs * rhs;
                    if negative {
                        total -= term;
                    } else {
                        total += term;
                    }
                }
            }
            negative = !negative;
        }
        total
    }

    /// Exhaustive matchgate-identity sweep. Patterns and position sets are
    /// enumerated first-position-fastest (bit-reversed integer order), and
    /// the first nonzero residual in that order is the reported witness.
    pub fn check_mgi(&self) -> Result<MgiVerdict, SignatureError> {
        self.check_mgi_capped(MGI_EXHAUSTIVE_CAP)
    }

    pub fn check_mgi_capped(&self, cap: usize) -> Result<MgiVerdict, SignatureError> {
        if self.arity > cap {
            return Err(SignatureError::ArityOverCap {
                arity: self.arity,
                cap,
            });
        }
        let n = self.arity;
        let size = 1usize << n;
        for raw_alpha in 0..size {
            let alpha = bits::reverse(raw_alpha, n);
            for raw_mask in 1..size {
                let mask = bits::reverse(raw_mask, n);
                let residual = self.mgi_residual_mask(alpha, mask);
                if !residual.is_zero() {
                    return Ok(MgiVerdict::Fail(MgiWitness {
                        alpha,
                        position_mask: mask,
                        residual,
                        arity: n,
                    }));
                }
            }
        }
        Ok(MgiVerdict::Pass)
    }

    /// Randomized identity smoke test for arities beyond the exhaustive
    /// cap: `samples` uniformly drawn pattern/position pairs.
    pub fn check_mgi_sampled(&self, samples: usize, seed: u64) -> MgiVerdict {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = 1usize << self.arity;
        for _ in 0..samples {
            let alpha = rng.gen_range(0..size);
            let mask = rng.gen_range(1..size);
            let residual = self.mgi_residual_mask(alpha, mask);
            if !residual.is_zero() {
                return MgiVerdict::Fail(MgiWitness {
                    alpha,
                    position_mask: mask,
                    residual,
                    arity: self.arity,
                });
            }
        }
        MgiVerdict::Pass
    }

    pub fn parse_text(text: &str) -> Result<Self, String> {
        let mut arity = None;
        let mut entries: Vec<(usize, Scalar)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            if head == "arity" {
                let n: usize = tokens
                    .next()
                    .ok_or_else(|| format!("line {}: missing arity", lineno + 1))?
                    .parse()
                    .map_err(|e| format!("line {}: {e}", lineno + 1))?;
                if n > 24 {
                    return Err(format!("line {}: arity {n} exceeds the dense-table bound", lineno + 1));
                }
                arity = Some(n);
                continue;
            }
            // `-` stands for the empty bitstring of an arity-0 signature.
            let (index, len) = if head == "-" {
                (0, 0)
            } else {
                bits::from_bitstring(head)
                    .ok_or_else(|| format!("line {}: bad bitstring `{head}`", lineno + 1))?
            };
            let scalar_text: String = tokens.collect::<Vec<_>>().join(" ");
            let value = Scalar::from_str(&scalar_text)
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
            let n = arity.ok_or_else(|| format!("line {}: arity must come first", lineno + 1))?;
            if len != n {
                return Err(format!(
                    "line {}: bitstring length {len} does not match arity {n}",
                    lineno + 1
                ));
            }
            entries.push((index, value));
        }
        let n = arity.ok_or("missing `arity` line")?;
        let mut sig = BooleanSignature::zero(n);
        for (index, value) in entries {
            sig.values[index] = value;
        }
        Ok(sig)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("arity {}\n", self.arity);
        for index in self.support() {
            let label = if self.arity == 0 {
                "-".to_string()
            } else {
                bits::to_bitstring(index, self.arity)
            };
            out.push_str(&format!("{} {}\n", label, self.values[index]));
        }
        out
    }
}

impl fmt::Debug for BooleanSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParityVerdict {
    Even,
    Odd,
    Zero,
    Violated { even_witness: usize, odd_witness: usize },
}

impl ParityVerdict {
    pub fn is_clean(&self) -> bool {
        !matches!(self, ParityVerdict::Violated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MgiWitness {
    pub alpha: usize,
    pub position_mask: usize,
    pub residual: Scalar,
    arity: usize,
}

impl MgiWitness {
    pub fn positions(&self) -> Vec<usize> {
        (1..=self.arity)
            .filter(|&p| self.position_mask & bits::pos_mask(p, self.arity) != 0)
            .collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "alpha={} positions={:?} residual={}",
            bits::to_bitstring(self.alpha, self.arity),
            self.positions(),
            self.residual
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MgiVerdict {
    Pass,
    Fail(MgiWitness),
}

impl MgiVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, MgiVerdict::Pass)
    }
}

/// A signature read as `n` blocks of `ℓ` positions each.
#[derive(Clone, Copy)]
pub struct BlockView<'a> {
    signature: &'a BooleanSignature,
    block_size: usize,
    blocks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryVerdict {
    Symmetric,
    Violated {
        /// Blocks `swap` and `swap + 1` were transposed.
        swap: usize,
        index: usize,
    },
}

impl SymmetryVerdict {
    pub fn is_symmetric(&self) -> bool {
        matches!(self, SymmetryVerdict::Symmetric)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetVerdict {
    Pass,
    Violated(DetWitness),
}

impl DetVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, DetVerdict::Pass)
    }
}

/// A failed 2x2 determinant: rows differ by `e_i + e_j` in block 1, columns
/// by `e_s`/`e_t` placed in blocks 2 and 3 (`SplitShift`) or by
/// `e_s + e_t` inside block 2 (`JointShift`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetWitness {
    pub base: usize,
    pub i: usize,
    pub j: usize,
    pub s: usize,
    pub t: usize,
    pub kind: DetKind,
    pub value: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetKind {
    SplitShift,
    JointShift,
}

/// The matrix form of a blockwise signature: rows indexed by the first
/// block, columns by the remaining blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixForm {
    pub block_size: usize,
    pub blocks: usize,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinWeightPair {
    pub sigma: usize,
    pub tau: usize,
    pub weight: u32,
}

impl<'a> BlockView<'a> {
    pub fn signature(&self) -> &'a BooleanSignature {
        self.signature
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Checks invariance under every adjacent block transposition; these
    /// generate all block permutations.
    pub fn is_blockwise_symmetric(&self) -> SymmetryVerdict {
        let ell = self.block_size;
        let n = self.blocks;
        for swap in 1..n {
            for index in 0..self.signature.values.len() {
                let left = bits::block(index, swap, ell, n);
                let right = bits::block(index, swap + 1, ell, n);
                if left == right {
                    continue;
                }
                let mut swapped = bits::with_block(index, swap, right, ell, n);
                swapped = bits::with_block(swapped, swap + 1, left, ell, n);
                if self.signature.values[index] != self.signature.values[swapped] {
                    return SymmetryVerdict::Violated { swap, index };
                }
            }
        }
        SymmetryVerdict::Symmetric
    }

    /// The `2^ℓ × 2^{(n−1)ℓ}` matrix with entry `(α₁, α₂⋯αₙ)` equal to the
    /// signature value at `α₁α₂⋯αₙ`.
    pub fn matrix_form(&self) -> MatrixForm {
        let row_bits = self.block_size;
        let col_bits = (self.blocks - 1) * self.block_size;
        let matrix = Matrix::from_fn(1 << row_bits, 1 << col_bits, |r, c| {
            self.signature.values[(r << col_bits) | c].clone()
        });
        MatrixForm {
            block_size: self.block_size,
            blocks: self.blocks,
            matrix,
        }
    }

    /// Sweeps the two families of 2x2 determinants that vanish on every
    /// blockwise symmetric matchgate signature with at least three blocks.
    pub fn check_det_identities(&self) -> Result<DetVerdict, SignatureError> {
        if self.blocks < 3 {
            return Err(SignatureError::TooFewBlocks { blocks: self.blocks });
        }
        let ell = self.block_size;
        let arity = self.signature.arity;
        let values = &self.signature.values;
        let det = |base: usize, row_shift: usize, col_shift: usize| -> Scalar {
            let a = &values[base];
            let d = &values[base ^ row_shift ^ col_shift];
            let b = &values[base ^ col_shift];
            let c = &values[base ^ row_shift];
            let ad = if a.is_zero() || d.is_zero() {
                Scalar::zero()
            } else {
                a * d
            };
            let bc = if b.is_zero() || c.is_zero() {
                Scalar::zero()
            } else {
                b * c
            };
            ad - bc
        };
        for base in 0..values.len() {
            for i in 1..=ell {
                for j in i + 1..=ell {
                    let row_shift =
                        bits::pos_mask(i, arity) | bits::pos_mask(j, arity);
                    // e_s in block 2, e_t in block 3.
                    for s in 1..=ell {
                        for t in 1..=ell {
                            let col_shift = bits::pos_mask(ell + s, arity)
                                | bits::pos_mask(2 * ell + t, arity);
                            let value = det(base, row_shift, col_shift);
                            if !value.is_zero() {
                                return Ok(DetVerdict::Violated(DetWitness {
                                    base,
                                    i,
                                    j,
                                    s,
                                    t,
                                    kind: DetKind::SplitShift,
                                    value,
                                }));
                            }
                        }
                    }
                    // e_s + e_t both in block 2, s < t.
                    for s in 1..=ell {
                        for t in s + 1..=ell {
                            let col_shift = bits::pos_mask(ell + s, arity)
                                | bits::pos_mask(ell + t, arity);
                            let value = det(base, row_shift, col_shift);
                            if !value.is_zero() {
                                return Ok(DetVerdict::Violated(DetWitness {
                                    base,
                                    i,
                                    j,
                                    s,
                                    t,
                                    kind: DetKind::JointShift,
                                    value,
                                }));
                            }
                        }
                    }
                }
            }
        }
        Ok(DetVerdict::Pass)
    }

    /// Among linearly independent row pairs of the matrix form, the pair of
    /// row labels minimizing the Hamming weight of their XOR; ties go to
    /// the lexicographically least `(σ, τ)`. With `same_parity` only rows
    /// whose labels have equal weight parity are paired.
    pub fn find_min_weight_pair(&self, same_parity: bool) -> Option<MinWeightPair> {
        let form = self.matrix_form();
        let rows = form.matrix.rows();
        let mut best: Option<MinWeightPair> = None;
        for sigma in 0..rows {
            for tau in sigma + 1..rows {
                if same_parity && (sigma.count_ones() + tau.count_ones()) % 2 == 1 {
                    continue;
                }
                if !rows_independent(&form.matrix, sigma, tau) {
                    continue;
                }
                let weight = (sigma ^ tau).count_ones();
                let candidate = MinWeightPair { sigma, tau, weight };
                let better = match &best {
                    None => true,
                    Some(b) => {
                        weight < b.weight
                            || (weight == b.weight && (sigma, tau) < (b.sigma, b.tau))
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        best
    }
}

/// Exact linear independence of two rows via 2x2 minors against the first
/// column where either row is nonzero.
fn rows_independent(m: &Matrix, a: usize, b: usize) -> bool {
    let Some(anchor) =
        (0..m.cols()).find(|&c| !m[(a, c)].is_zero() || !m[(b, c)].is_zero())
    else {
        return false; // both zero rows
    };
    for c in 0..m.cols() {
        if c == anchor {
            continue;
        }
        let minor = &(&m[(a, anchor)] * &m[(b, c)]) - &(&m[(a, c)] * &m[(b, anchor)]);
        if !minor.is_zero() {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq4() -> BooleanSignature {
        BooleanSignature::from_entries(
            4,
            &[("0000", Scalar::one()), ("1111", Scalar::one())],
        )
        .unwrap()
    }

    /// The counterexample gate signature in its planar counterclockwise
    /// corner order: nonzero at 0000, 1010, 0101 and 1111.
    fn gamma1_ccw() -> BooleanSignature {
        BooleanSignature::from_entries(
            4,
            &[
                ("0000", Scalar::one()),
                ("1010", Scalar::one()),
                ("0101", Scalar::one()),
                ("1111", Scalar::from_int(-1)),
            ],
        )
        .unwrap()
    }

    /// The same gate labelled in the published corner order (a zigzag, not
    /// the cyclic boundary order): nonzero at 0000, 1001, 0110 and 1111.
    fn gamma1_published() -> BooleanSignature {
        BooleanSignature::from_entries(
            4,
            &[
                ("0000", Scalar::one()),
                ("1001", Scalar::one()),
                ("0110", Scalar::one()),
                ("1111", Scalar::from_int(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parity_classification() {
        assert_eq!(gamma1_published().check_parity(), ParityVerdict::Even);
        let pendant =
            BooleanSignature::from_entries(1, &[("0", Scalar::from_int(5))]).unwrap();
        assert_eq!(pendant.check_parity(), ParityVerdict::Even);
        let bad = BooleanSignature::from_entries(
            1,
            &[("0", Scalar::one()), ("1", Scalar::one())],
        )
        .unwrap();
        assert!(matches!(bad.check_parity(), ParityVerdict::Violated { .. }));
        assert_eq!(BooleanSignature::zero(3).check_parity(), ParityVerdict::Zero);
    }

    #[test]
    fn mgi_residual_equality4() {
        // Only the first term of the alternating sum survives on (=_4).
        let sig = eq4();
        let residual = sig.mgi_residual(0b1000, &[1, 2, 3, 4]).unwrap();
        assert_eq!(residual, Scalar::from_int(-1));
        assert!(sig.mgi_residual(0, &[]).is_err());
        assert!(sig.mgi_residual(0, &[2, 1]).is_err());
        assert!(sig.mgi_residual(0, &[1, 5]).is_err());
    }

    #[test]
    fn mgi_zero_signature_passes() {
        assert!(BooleanSignature::zero(4).check_mgi().unwrap().passed());
    }

    #[test]
    fn mgi_equality4_first_witness() {
        let verdict = eq4().check_mgi().unwrap();
        let MgiVerdict::Fail(w) = verdict else {
            panic!("(=_4) must fail the identity sweep")
        };
        assert_eq!(w.alpha, 0b1000);
        assert_eq!(w.positions(), vec![1, 2, 3, 4]);
        assert_eq!(w.residual, Scalar::from_int(-1));
    }

    #[test]
    fn mgi_gamma1_orders() {
        // The cyclic boundary labelling is a matchgate signature; the
        // published zigzag labelling of the same gate is not.
        assert!(gamma1_ccw().check_mgi().unwrap().passed());
        let verdict = gamma1_published().check_mgi().unwrap();
        let MgiVerdict::Fail(w) = verdict else {
            panic!("zigzag labelling must fail")
        };
        assert_eq!(w.alpha, 0b1000);
        assert_eq!(w.positions(), vec![1, 2, 3, 4]);
        assert_eq!(w.residual, Scalar::from_int(2));
    }

    #[test]
    fn blockwise_symmetry() {
        let sig = gamma1_published();
        let view = sig.block_view(2).unwrap();
        assert!(view.is_blockwise_symmetric().is_symmetric());

        let mut asym = BooleanSignature::zero(4);
        asym.set(0b1001, Scalar::one());
        let asym_view = asym.block_view(2).unwrap();
        assert_eq!(
            asym_view.is_blockwise_symmetric(),
            SymmetryVerdict::Violated { swap: 1, index: 0b0110 }
        );
    }

    #[test]
    fn matrix_form_layout_and_rank() {
        let sig = gamma1_published();
        let view = sig.block_view(2).unwrap();
        let form = view.matrix_form();
        assert_eq!((form.matrix.rows(), form.matrix.cols()), (4, 4));
        assert_eq!(form.matrix[(0b10, 0b01)], Scalar::one());
        assert_eq!(form.matrix[(0b11, 0b11)], Scalar::from_int(-1));
        assert_eq!(form.matrix.rank(), 4);

        let zero = BooleanSignature::zero(4);
        assert_eq!(zero.block_view(2).unwrap().matrix_form().matrix.rank(), 0);
    }

    #[test]
    fn tensor_square_has_rank_one_matrix_form() {
        let g = BooleanSignature::from_entries(
            2,
            &[("00", Scalar::from_int(3)), ("11", Scalar::from_int(2))],
        )
        .unwrap();
        let gg = g.tensor(&g);
        // Outer-product oracle: M(g⊗g) is the outer product of g with itself.
        let view = gg.block_view(2).unwrap();
        let form = view.matrix_form();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(form.matrix[(r, c)], g.value(r) * g.value(c));
            }
        }
        assert_eq!(form.matrix.rank(), 1);
    }

    #[test]
    fn min_weight_pair_on_gamma1() {
        let sig = gamma1_published();
        let view = sig.block_view(2).unwrap();
        let free = view.find_min_weight_pair(false).unwrap();
        assert_eq!(free.weight, 1);
        let same = view.find_min_weight_pair(true).unwrap();
        assert_eq!(same.weight, 2);

        let rank1 = BooleanSignature::from_entries(4, &[("0000", Scalar::one())])
            .unwrap();
        assert!(rank1.block_view(2).unwrap().find_min_weight_pair(false).is_none());
    }

    #[test]
    fn det_identities_need_three_blocks() {
        let sig = gamma1_published();
        let view = sig.block_view(2).unwrap();
        assert_eq!(
            view.check_det_identities().unwrap_err(),
            SignatureError::TooFewBlocks { blocks: 2 }
        );
        let zero = BooleanSignature::zero(6);
        assert!(zero
            .block_view(2)
            .unwrap()
            .check_det_identities()
            .unwrap()
            .passed());
    }

    #[test]
    fn matrix_form_is_linear() {
        let a = gamma1_published();
        let b = gamma1_ccw();
        let sum = a.add(&b).unwrap();
        let fa = a.block_view(2).unwrap().matrix_form();
        let fb = b.block_view(2).unwrap().matrix_form();
        let fs = sum.block_view(2).unwrap().matrix_form();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(fs.matrix[(r, c)], &fa.matrix[(r, c)] + &fb.matrix[(r, c)]);
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let sig = gamma1_published();
        let text = sig.to_text();
        let back = BooleanSignature::parse_text(&text).unwrap();
        assert_eq!(back, sig);

        let mut scalar0 = BooleanSignature::zero(0);
        scalar0.set(0, Scalar::from_int(7));
        let back = BooleanSignature::parse_text(&scalar0.to_text()).unwrap();
        assert_eq!(back, scalar0);
    }
}
