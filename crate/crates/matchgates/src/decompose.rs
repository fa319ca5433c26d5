//! Product-form decomposition of blockwise symmetric gate signatures.
//!
//! A blockwise symmetric signature realized by a gate has matrix-form rank
//! at most 2 once it has three or more blocks. Rank 2 splits into a
//! condensed vector `g` over single blocks and a bitwise symmetric core
//! indexed by block parities; rank 1 degenerates to a pure product against
//! one anchored entry. Both come with constructive witness gadgets carved
//! out of the original gate by pendant and path surgeries.

use thiserror::Error;

use crate::bits;
use crate::matchgate::{
    compose, contract_signatures, sig_demoted, sig_path2, sig_pendant_revoked,
    sig_pendant_transferred, Edge, GateError, Matchgate, PathEnd, PendantMode,
};
use crate::planar::Rotation;
use crate::scalar::Scalar;
use crate::signature::{
    BlockView, BooleanSignature, MgiVerdict, ParityVerdict, SignatureError,
    SymmetryVerdict,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("parity violated: nonzero entries of both parities (even {even}, odd {odd})")]
    ParityViolated { even: usize, odd: usize },
    #[error("matchgate identities violated: {0}")]
    IdentitiesViolated(String),
    #[error("not blockwise symmetric: transposing blocks {swap} and {next} changes entry {index}", next = swap + 1)]
    NotBlockwiseSymmetric { swap: usize, index: usize },
    #[error("matrix form has rank {rank} > 2; not admissible for a gate signature with 3+ blocks")]
    RankExceedsBound { rank: usize },
    #[error("decomposition needs at least 3 blocks, got {blocks}")]
    TooFewBlocks { blocks: usize },
    #[error("no weight-1 pivot pair with matched nonzero columns exists; input is not a gate signature")]
    PivotNotFound,
    #[error("operation applies to rank class {expected}, decomposition has {found}")]
    WrongRankClass { expected: u8, found: u8 },
    #[error("block shape mismatch")]
    ShapeMismatch,
    #[error("gate/signature mismatch: {0}")]
    GateMismatch(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

/// How the decomposition validates its input before trusting it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Exhaustive identity sweep (arity-capped).
    Exhaustive,
    /// Exhaustive up to arity 10, seeded sampling above it.
    Auto,
    /// Seeded random identity sampling with the given sample count.
    Sampled { samples: usize, seed: u64 },
}

const AUTO_EXHAUSTIVE_LIMIT: usize = 10;
const AUTO_SAMPLES: usize = 50_000;
const AUTO_SEED: u64 = 0x6d67_6921;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankClass {
    Zero,
    One,
    Two,
}

impl RankClass {
    fn as_u8(self) -> u8 {
        match self {
            RankClass::Zero => 0,
            RankClass::One => 1,
            RankClass::Two => 2,
        }
    }
}

/// The rank-2 pivot data: two row labels one bit apart and a matched pair
/// of columns one bit apart on which the 2x2 minor has full rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub theta: usize,
    pub eta: usize,
    /// Column label (remaining blocks) with a nonzero entry on the θ row.
    pub gamma: usize,
    /// Overall 1-based position (in ℓ+1..=nℓ) where the η column differs.
    pub shift_pos: usize,
    /// Normalized value of the η-row pivot entry.
    pub r: Scalar,
}

/// The rank-1 anchor: the first nonzero entry in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneBase {
    /// First block of the anchor entry.
    pub beta: usize,
    /// Remaining blocks of the anchor entry.
    pub rest: usize,
    /// Normalized value at the all-β entry.
    pub base_value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub block_size: usize,
    pub blocks: usize,
    pub rank: RankClass,
    /// Global factor: the original signature equals `scale` times the
    /// reconstruction of the normalized data below.
    pub scale: Scalar,
    /// Condensed vector over single blocks, `2^ℓ` entries.
    pub g: Vec<Scalar>,
    /// Bitwise symmetric core indexed by block parities (rank 2 only).
    pub core: Option<BooleanSignature>,
    pub pivot: Option<Pivot>,
    pub base: Option<RankOneBase>,
}

fn run_validation(view: &BlockView<'_>, validation: Validation) -> Result<(), DecomposeError> {
    let sig = view.signature();
    if let ParityVerdict::Violated {
        even_witness,
        odd_witness,
    } = sig.check_parity()
    {
        return Err(DecomposeError::ParityViolated {
            even: even_witness,
            odd: odd_witness,
        });
    }
    let verdict = match validation {
        Validation::Exhaustive => sig.check_mgi()?,
        Validation::Sampled { samples, seed } => sig.check_mgi_sampled(samples, seed),
        Validation::Auto => {
            if sig.arity() <= AUTO_EXHAUSTIVE_LIMIT {
                sig.check_mgi_capped(AUTO_EXHAUSTIVE_LIMIT)?
            } else {
                sig.check_mgi_sampled(AUTO_SAMPLES, AUTO_SEED)
            }
        }
    };
    if let MgiVerdict::Fail(witness) = verdict {
        return Err(DecomposeError::IdentitiesViolated(witness.describe()));
    }
    if let SymmetryVerdict::Violated { swap, index } = view.is_blockwise_symmetric() {
        return Err(DecomposeError::NotBlockwiseSymmetric { swap, index });
    }
    Ok(())
}

/// Decomposes a validated blockwise symmetric gate signature with n ≥ 3
/// blocks into its product form.
pub fn decompose(
    view: &BlockView<'_>,
    validation: Validation,
) -> Result<Decomposition, DecomposeError> {
    run_validation(view, validation)?;
    let sig = view.signature();
    let ell = view.block_size();
    let n = view.blocks();
    let rank = view.matrix_form().matrix.rank();
    if rank > 2 {
        return Err(DecomposeError::RankExceedsBound { rank });
    }
    if n < 3 {
        return Err(DecomposeError::TooFewBlocks { blocks: n });
    }
    match rank {
        0 => Ok(Decomposition {
            block_size: ell,
            blocks: n,
            rank: RankClass::Zero,
            scale: Scalar::one(),
            g: vec![Scalar::zero(); 1 << ell],
            core: None,
            pivot: None,
            base: None,
        }),
        1 => decompose_rank1(sig, ell, n),
        2 => decompose_rank2(sig, ell, n),
        _ => unreachable!(),
    }
}

fn decompose_rank1(
    sig: &BooleanSignature,
    ell: usize,
    n: usize,
) -> Result<Decomposition, DecomposeError> {
    let col_bits = (n - 1) * ell;
    let anchor = sig.support().next().expect("rank 1 has nonzero entries");
    let beta = anchor >> col_bits;
    let rest = anchor & ((1 << col_bits) - 1);
    let scale = sig.value(anchor).clone();
    let inv_scale = scale.inverse().expect("anchor entry is nonzero");
    let g: Vec<Scalar> = (0..1usize << ell)
        .map(|alpha| sig.value((alpha << col_bits) | rest) * &inv_scale)
        .collect();
    let all_beta = (0..n).fold(0usize, |acc, _| (acc << ell) | beta);
    let base_value = sig.value(all_beta) * &inv_scale;
    Ok(Decomposition {
        block_size: ell,
        blocks: n,
        rank: RankClass::One,
        scale,
        g,
        core: None,
        pivot: None,
        base: Some(RankOneBase {
            beta,
            rest,
            base_value,
        }),
    })
}

fn decompose_rank2(
    sig: &BooleanSignature,
    ell: usize,
    n: usize,
) -> Result<Decomposition, DecomposeError> {
    let col_bits = (n - 1) * ell;
    let cols = 1usize << col_bits;
    let entry = |row: usize, col: usize| sig.value((row << col_bits) | col);
    // Pivot rows one bit apart, then a column pair one bit apart with the
    // diagonal entries nonzero; ties break lexicographically.
    let mut found: Option<Pivot> = None;
    'outer: for theta in 0..1usize << ell {
        // Flipping low positions first visits candidate partners in
        // increasing label order.
        for s in (1..=ell).rev() {
            let eta = bits::flip_bit(theta, s, ell);
            if eta < theta {
                continue;
            }
            for gamma in 0..cols {
                if entry(theta, gamma).is_zero() {
                    continue;
                }
                for t in (1..=col_bits).rev() {
                    let shifted = bits::flip_bit(gamma, t, col_bits);
                    let r = entry(eta, shifted);
                    if !r.is_zero() {
                        found = Some(Pivot {
                            theta,
                            eta,
                            gamma,
                            shift_pos: ell + t,
                            r: r.clone(),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut pivot = found.ok_or(DecomposeError::PivotNotFound)?;
    let scale = entry(pivot.theta, pivot.gamma).clone();
    let inv_scale = scale.inverse().expect("pivot entry is nonzero");
    pivot.r = &pivot.r * &inv_scale;
    let r_inv = pivot.r.inverse().expect("pivot entry is nonzero");
    let shifted_gamma = bits::flip_bit(pivot.gamma, pivot.shift_pos - ell, col_bits);
    let p_theta = bits::parity(pivot.theta);
    let g: Vec<Scalar> = (0..1usize << ell)
        .map(|alpha| {
            if bits::parity(alpha) == p_theta {
                entry(alpha, pivot.gamma) * &inv_scale
            } else {
                &(entry(alpha, shifted_gamma) * &inv_scale) * &r_inv
            }
        })
        .collect();
    debug_assert!(g[pivot.theta].is_one() && g[pivot.eta].is_one());
    // Core: entries over blocks drawn from {θ, η}, indexed by parity bits.
    let mut core = BooleanSignature::zero(n);
    for j in 0..1usize << n {
        let mut index = 0usize;
        for pos in 1..=n {
            let bit = bits::get_bit(j, pos, n) as usize;
            let block = if bit == p_theta { pivot.theta } else { pivot.eta };
            index = (index << ell) | block;
        }
        core.set(j, sig.value(index) * &inv_scale);
    }
    Ok(Decomposition {
        block_size: ell,
        blocks: n,
        rank: RankClass::Two,
        scale,
        g,
        core: Some(core),
        pivot: Some(pivot),
        base: None,
    })
}

impl Decomposition {
    /// Evaluates the product form at the given block labels.
    pub fn reconstruct(&self, blocks: &[usize]) -> Result<Scalar, DecomposeError> {
        if blocks.len() != self.blocks || blocks.iter().any(|&b| b >= 1 << self.block_size) {
            return Err(DecomposeError::ShapeMismatch);
        }
        let value = match self.rank {
            RankClass::Zero => Scalar::zero(),
            RankClass::One => {
                let base = self.base.as_ref().expect("rank 1 carries a base");
                let mut acc = base.base_value.clone();
                for &b in blocks {
                    if self.g[b].is_zero() {
                        return Ok(Scalar::zero());
                    }
                    acc *= &self.g[b];
                }
                acc
            }
            RankClass::Two => {
                let core = self.core.as_ref().expect("rank 2 carries a core");
                let mut parity_index = 0usize;
                let mut acc = Scalar::one();
                for &b in blocks {
                    parity_index = (parity_index << 1) | bits::parity(b);
                    if self.g[b].is_zero() {
                        return Ok(Scalar::zero());
                    }
                    acc *= &self.g[b];
                }
                &acc * core.value(parity_index)
            }
        };
        Ok(&value * &self.scale)
    }

    /// Re-evaluates the product form over the whole index space.
    pub fn reconstruct_full(&self) -> Result<BooleanSignature, DecomposeError> {
        let arity = self.block_size * self.blocks;
        let mut out = BooleanSignature::zero(arity);
        let mut blocks = vec![0usize; self.blocks];
        for index in 0..1usize << arity {
            for (j, slot) in blocks.iter_mut().enumerate() {
                *slot = bits::block(index, j + 1, self.block_size, self.blocks);
            }
            out.set(index, self.reconstruct(&blocks)?);
        }
        Ok(out)
    }
}

/// A surgery product: the carved gate together with its signature, which
/// is propagated through each surgery step algebraically (exactly), so
/// witnesses stay checkable beyond brute-force graph sizes.
#[derive(Clone, Debug)]
pub struct GateWitness {
    pub gate: Matchgate,
    pub signature: BooleanSignature,
}

/// The condensed vector of an (m+1)-ary gate signature: entry `α` reads
/// the signature at `α·b` where `b` makes the total weight parity match
/// the gate's vertex parity.
pub fn condensed_vector(sig: &BooleanSignature, even_gate: bool) -> Vec<Scalar> {
    let m = sig.arity() - 1;
    (0..1usize << m)
        .map(|alpha| {
            let parity_bit = bits::parity(alpha);
            let b = if even_gate { parity_bit } else { 1 - parity_bit };
            sig.value((alpha << 1) | b).clone()
        })
        .collect()
}

/// Appends a detached weight-`w` edge; every matching must take it, so the
/// whole signature scales by `w`.
fn with_scaling_edge(gate: &Matchgate, w: Scalar) -> Result<Matchgate, GateError> {
    let k = gate.vertex_count();
    let mut edges = gate.edges().to_vec();
    edges.push(Edge {
        u: k,
        v: k + 1,
        weight: w,
    });
    let rotation = gate.rotation().map(|rot| {
        let mut order = rot.order.clone();
        order.push(vec![k + 1]);
        order.push(vec![k]);
        Rotation::new(order)
    });
    Matchgate::new(k + 2, edges, gate.externals().to_vec(), rotation)
}

fn check_pair(
    source: &Matchgate,
    sig: &BooleanSignature,
    d: &Decomposition,
) -> Result<(), DecomposeError> {
    if source.arity() != d.block_size * d.blocks || sig.arity() != source.arity() {
        return Err(DecomposeError::GateMismatch(format!(
            "gate arity {} vs signature arity {} vs decomposition arity {}",
            source.arity(),
            sig.arity(),
            d.block_size * d.blocks
        )));
    }
    let expected = if source.is_even() {
        ParityVerdict::Even
    } else {
        ParityVerdict::Odd
    };
    let got = sig.check_parity();
    if got != expected && got != ParityVerdict::Zero {
        return Err(DecomposeError::GateMismatch(format!(
            "signature parity {got:?} does not match the gate's vertex parity"
        )));
    }
    Ok(())
}

/// Carves the arity-(ℓ+1) condensed-signature witness out of the source
/// gate. For rank 2 this attaches a weighted length-2 path at the pivot
/// shift position, pendants at the other 1-bits of the pivot entry, and
/// keeps block 1 plus the path tip external. With `rank1_mode` the rank-1
/// construction is used instead: transferred pendants at the 1-bits of the
/// anchor's remaining blocks, keeping block 1 and the first slot of block
/// 2 external.
pub fn condensed_witness(
    source: &Matchgate,
    sig: &BooleanSignature,
    d: &Decomposition,
    rank1_mode: bool,
) -> Result<GateWitness, DecomposeError> {
    check_pair(source, sig, d)?;
    if rank1_mode {
        if d.rank != RankClass::One {
            return Err(DecomposeError::WrongRankClass {
                expected: 1,
                found: d.rank.as_u8(),
            });
        }
        return condensed_witness_rank1(source, sig, d);
    }
    if d.rank != RankClass::Two {
        return Err(DecomposeError::WrongRankClass {
            expected: 2,
            found: d.rank.as_u8(),
        });
    }
    let pivot = d.pivot.as_ref().expect("rank 2 carries a pivot");
    let ell = d.block_size;
    let n = d.blocks;
    let arity = ell * n;
    let inv_scale = d.scale.inverse().expect("scale is nonzero");
    let mut gate = with_scaling_edge(source, inv_scale.clone())?;
    let mut current = sig.scale(&inv_scale);
    // Full index of the θ-row pivot entry.
    let full = (pivot.theta << ((n - 1) * ell)) | pivot.gamma;
    let r_inv = pivot.r.inverse().expect("r is nonzero");
    // Weighted path at the shift position; the far end stays external.
    {
        let pos = pivot.shift_pos;
        let v = gate.externals()[pos - 1];
        let (w1, w2) = if bits::get_bit(full, pos, arity) {
            (Scalar::one(), r_inv.clone())
        } else {
            (r_inv.clone(), Scalar::one())
        };
        gate = gate.attach_path2(v, w1.clone(), w2.clone(), PathEnd::Far)?;
        current = sig_path2(&current, pos, &w1, &w2);
    }
    // Remaining positions outside block 1 go internal, with a weight-1
    // pendant where the pivot entry has a 1. Descending order keeps the
    // lower positions stable while indices shrink.
    for pos in (ell + 1..=arity).rev() {
        if pos == pivot.shift_pos {
            continue;
        }
        let v = gate.externals()[pos - 1];
        if bits::get_bit(full, pos, arity) {
            gate = gate.attach_pendant(v, Scalar::one(), PendantMode::Revoke)?;
            current = sig_pendant_revoked(&current, pos, &Scalar::one());
        } else {
            let mut externals = gate.externals().to_vec();
            externals.remove(pos - 1);
            gate = gate.with_externals(externals)?;
            current = sig_demoted(&current, pos);
        }
    }
    Ok(GateWitness {
        gate,
        signature: current,
    })
}

fn condensed_witness_rank1(
    source: &Matchgate,
    sig: &BooleanSignature,
    d: &Decomposition,
) -> Result<GateWitness, DecomposeError> {
    let base = d.base.as_ref().expect("rank 1 carries a base");
    let ell = d.block_size;
    let n = d.blocks;
    let arity = ell * n;
    let inv_scale = d.scale.inverse().expect("scale is nonzero");
    let mut gate = with_scaling_edge(source, inv_scale.clone())?;
    let mut current = sig.scale(&inv_scale);
    // Transferred weight-1 pendants at the 1-bits of the anchor's
    // remaining blocks; slots keep their positions.
    for pos in ell + 1..=arity {
        if bits::get_bit(base.rest, pos - ell, arity - ell) {
            let v = gate.externals()[pos - 1];
            gate = gate.attach_pendant(v, Scalar::one(), PendantMode::Transfer)?;
            current = sig_pendant_transferred(&current, pos, &Scalar::one());
        }
    }
    // Keep block 1 and the first slot of block 2; everything later goes
    // internal.
    for pos in (ell + 2..=arity).rev() {
        let mut externals = gate.externals().to_vec();
        externals.remove(pos - 1);
        gate = gate.with_externals(externals)?;
        current = sig_demoted(&current, pos);
    }
    Ok(GateWitness {
        gate,
        signature: current,
    })
}

/// Carves the arity-n core witness out of the source gate (rank 2 only):
/// transferred pendants at the 1-bits of θ in every block (plus one more
/// per block at the differing bit when θ has odd weight, aligning the
/// index convention with block parities), then one external per block.
pub fn core_witness(
    source: &Matchgate,
    sig: &BooleanSignature,
    d: &Decomposition,
) -> Result<GateWitness, DecomposeError> {
    check_pair(source, sig, d)?;
    if d.rank != RankClass::Two {
        return Err(DecomposeError::WrongRankClass {
            expected: 2,
            found: d.rank.as_u8(),
        });
    }
    let pivot = d.pivot.as_ref().expect("rank 2 carries a pivot");
    let ell = d.block_size;
    let n = d.blocks;
    let diff = pivot.theta ^ pivot.eta;
    debug_assert_eq!(diff.count_ones(), 1);
    let s = (1..=ell)
        .find(|&p| bits::get_bit(diff, p, ell))
        .expect("pivot labels differ in one bit");
    let inv_scale = d.scale.inverse().expect("scale is nonzero");
    let mut gate = with_scaling_edge(source, inv_scale.clone())?;
    let mut current = sig.scale(&inv_scale);
    let theta_odd = bits::parity(pivot.theta) == 1;
    for block in 0..n {
        for b in 1..=ell {
            let pos = block * ell + b;
            let mut transfers = 0;
            if bits::get_bit(pivot.theta, b, ell) {
                transfers += 1;
            }
            if b == s && theta_odd {
                transfers += 1;
            }
            for _ in 0..transfers {
                let v = gate.externals()[pos - 1];
                gate = gate.attach_pendant(v, Scalar::one(), PendantMode::Transfer)?;
                current = sig_pendant_transferred(&current, pos, &Scalar::one());
            }
        }
    }
    // Keep only the s-th slot of each block.
    let keep: Vec<usize> = (0..n).map(|block| block * ell + s).collect();
    for pos in (1..=ell * n).rev() {
        if keep.contains(&pos) {
            continue;
        }
        let mut externals = gate.externals().to_vec();
        externals.remove(pos - 1);
        gate = gate.with_externals(externals)?;
        current = sig_demoted(&current, pos);
    }
    Ok(GateWitness {
        gate,
        signature: current,
    })
}

/// Attaches one copy of an (ℓ+1)-ary gadget to every external node of a
/// core gate, connecting through the gadget's last external. The result
/// has arity n·ℓ, the gadget blocks in core-external order; with a bitwise
/// symmetric core and identical gadgets it is blockwise symmetric.
pub fn block_expand(core: &Matchgate, gadget: &Matchgate) -> Result<Matchgate, DecomposeError> {
    if gadget.arity() < 1 {
        return Err(DecomposeError::ShapeMismatch);
    }
    let port = *gadget.externals().last().unwrap();
    let mut acc = core.clone();
    for _ in 0..core.arity() {
        let head = acc.externals()[0];
        acc = compose(&acc, gadget, &[(head, port)])?;
    }
    Ok(acc)
}

/// The signature of [`block_expand`]'s output, computed by contraction.
pub fn block_expand_signature(
    core_sig: &BooleanSignature,
    gadget_sig: &BooleanSignature,
    core_arity: usize,
) -> BooleanSignature {
    let port = gadget_sig.arity();
    let mut acc = core_sig.clone();
    for _ in 0..core_arity {
        acc = contract_signatures(&acc, gadget_sig, &[(1, port)]);
    }
    acc
}

/// True when every block of every nonzero entry has one common parity
/// (the support structure forced on rank-1 signatures).
pub fn rank1_support_parity_ok(view: &BlockView<'_>) -> bool {
    let ell = view.block_size();
    let n = view.blocks();
    let mut common: Option<usize> = None;
    for index in view.signature().support() {
        for j in 1..=n {
            let p = bits::parity(bits::block(index, j, ell, n));
            match common {
                None => common = Some(p),
                Some(c) if c != p => return false,
                _ => {}
            }
        }
    }
    true
}

/// Decomposition file format, consumed by the reconstruction CLI.
pub fn decomposition_to_text(d: &Decomposition) -> String {
    let ell = d.block_size;
    let mut out = String::new();
    out.push_str(&format!("blocksize {ell}\n"));
    out.push_str(&format!("blocks {}\n", d.blocks));
    out.push_str(&format!("rank {}\n", d.rank.as_u8()));
    out.push_str(&format!("scale {}\n", d.scale));
    for (alpha, value) in d.g.iter().enumerate() {
        out.push_str(&format!("g {} {}\n", bits::to_bitstring(alpha, ell), value));
    }
    if let Some(p) = &d.pivot {
        out.push_str(&format!(
            "pivot {} {}\n",
            bits::to_bitstring(p.theta, ell),
            bits::to_bitstring(p.eta, ell)
        ));
        out.push_str(&format!(
            "gamma {}\n",
            bits::to_bitstring(p.gamma, (d.blocks - 1) * ell)
        ));
        out.push_str(&format!("shift {}\n", p.shift_pos));
        out.push_str(&format!("r {}\n", p.r));
    }
    if let Some(core) = &d.core {
        for index in 0..core.len() {
            out.push_str(&format!(
                "core {} {}\n",
                bits::to_bitstring(index, d.blocks),
                core.value(index)
            ));
        }
    }
    if let Some(b) = &d.base {
        out.push_str(&format!("base {}\n", bits::to_bitstring(b.beta, ell)));
        out.push_str(&format!(
            "rest {}\n",
            bits::to_bitstring(b.rest, (d.blocks - 1) * ell)
        ));
        out.push_str(&format!("basevalue {}\n", b.base_value));
    }
    out
}

pub fn decomposition_from_text(text: &str) -> Result<Decomposition, String> {
    let mut block_size = None;
    let mut blocks = None;
    let mut rank = None;
    let mut scale = None;
    let mut g_entries: Vec<(usize, Scalar)> = Vec::new();
    let mut core_entries: Vec<(usize, Scalar)> = Vec::new();
    let mut pivot_labels: Option<(usize, usize)> = None;
    let mut gamma = None;
    let mut shift = None;
    let mut r = None;
    let mut base = None;
    let mut rest = None;
    let mut base_value = None;
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        let mut next_str = || {
            tokens
                .next()
                .map(str::to_string)
                .ok_or(format!("line {lineno}: missing field"))
        };
        let parse_bits = |t: &str| {
            bits::from_bitstring(t)
                .map(|(v, _)| v)
                .ok_or(format!("line {lineno}: bad bitstring"))
        };
        match head {
            "blocksize" => block_size = Some(next_str()?.parse().map_err(|e| format!("{e}"))?),
            "blocks" => blocks = Some(next_str()?.parse().map_err(|e| format!("{e}"))?),
            "rank" => rank = Some(next_str()?.parse::<u8>().map_err(|e| format!("{e}"))?),
            "scale" => {
                let restline: Vec<String> =
                    std::iter::once(next_str()?).chain(tokens.map(str::to_string)).collect();
                scale = Some(
                    restline
                        .join(" ")
                        .parse::<Scalar>()
                        .map_err(|e| format!("line {lineno}: {e}"))?,
                );
            }
            "g" | "core" => {
                let label = parse_bits(&next_str()?)?;
                let value: String = tokens.collect::<Vec<_>>().join(" ");
                let value = value
                    .parse::<Scalar>()
                    .map_err(|e| format!("line {lineno}: {e}"))?;
                if head == "g" {
                    g_entries.push((label, value));
                } else {
                    core_entries.push((label, value));
                }
            }
            "pivot" => {
                let theta = parse_bits(&next_str()?)?;
                let eta = parse_bits(&next_str()?)?;
                pivot_labels = Some((theta, eta));
            }
            "gamma" => gamma = Some(parse_bits(&next_str()?)?),
            "shift" => shift = Some(next_str()?.parse().map_err(|e| format!("{e}"))?),
            "r" => {
                let value: String =
                    std::iter::once(next_str()?).chain(tokens.map(str::to_string)).collect::<Vec<_>>().join(" ");
                r = Some(value.parse::<Scalar>().map_err(|e| format!("line {lineno}: {e}"))?);
            }
            "base" => base = Some(parse_bits(&next_str()?)?),
            "rest" => rest = Some(parse_bits(&next_str()?)?),
            "basevalue" => {
                let value: String = tokens.collect::<Vec<_>>().join(" ");
                base_value =
                    Some(value.parse::<Scalar>().map_err(|e| format!("line {lineno}: {e}"))?);
            }
            other => return Err(format!("line {lineno}: unknown directive `{other}`")),
        }
    }
    let block_size = block_size.ok_or("missing blocksize")?;
    let blocks = blocks.ok_or("missing blocks")?;
    let rank = match rank.ok_or("missing rank")? {
        0 => RankClass::Zero,
        1 => RankClass::One,
        2 => RankClass::Two,
        other => return Err(format!("bad rank {other}")),
    };
    let mut g = vec![Scalar::zero(); 1usize << block_size];
    for (label, value) in g_entries {
        g[label] = value;
    }
    let core = if core_entries.is_empty() {
        None
    } else {
        let mut sig = BooleanSignature::zero(blocks);
        for (label, value) in core_entries {
            sig.set(label, value);
        }
        Some(sig)
    };
    let pivot = match (pivot_labels, gamma, shift, r) {
        (Some((theta, eta)), Some(gamma), Some(shift_pos), Some(r)) => Some(Pivot {
            theta,
            eta,
            gamma,
            shift_pos,
            r,
        }),
        _ => None,
    };
    let base = match (base, rest, base_value) {
        (Some(beta), Some(rest), Some(base_value)) => Some(RankOneBase {
            beta,
            rest,
            base_value,
        }),
        _ => None,
    };
    Ok(Decomposition {
        block_size,
        blocks,
        rank,
        scale: scale.ok_or("missing scale")?,
        g,
        core,
        pivot,
        base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchgate::tests::ladder;
    use crate::signature::MgiVerdict;

    fn w(x: i64) -> Scalar {
        Scalar::from_int(x)
    }

    /// Star core: internal hub joined to n external leaves, weight `wt`.
    fn star_core(n: usize, wt: i64) -> Matchgate {
        let mut edges = Vec::new();
        for leaf in 1..=n {
            edges.push(Edge {
                u: 0,
                v: leaf,
                weight: w(wt),
            });
        }
        let rotation = {
            let mut order = vec![(1..=n).collect::<Vec<_>>()];
            for _ in 1..=n {
                order.push(vec![0]);
            }
            Rotation::new(order)
        };
        Matchgate::new(n + 1, edges, (1..=n).collect(), Some(rotation)).unwrap()
    }

    /// Tensor core: n detached pendant edges of weight `wt`.
    fn pendant_core(n: usize, wt: i64) -> Matchgate {
        let mut edges = Vec::new();
        let mut order = Vec::new();
        for k in 0..n {
            edges.push(Edge {
                u: 2 * k,
                v: 2 * k + 1,
                weight: w(wt),
            });
            order.push(vec![2 * k + 1]);
            order.push(vec![2 * k]);
        }
        Matchgate::new(
            2 * n,
            edges,
            (0..n).map(|k| 2 * k).collect(),
            Some(Rotation::new(order)),
        )
        .unwrap()
    }

    /// A small arity-(ℓ+1) gadget: a path with all vertices external.
    fn wire_gadget(ell: usize) -> Matchgate {
        let k = ell + 1;
        let mut edges = Vec::new();
        for v in 0..k.saturating_sub(1) {
            edges.push(Edge {
                u: v,
                v: v + 1,
                weight: w(1),
            });
        }
        let mut order = Vec::new();
        for v in 0..k {
            let mut ring = Vec::new();
            if v > 0 {
                ring.push(v - 1);
            }
            if v + 1 < k {
                ring.push(v + 1);
            }
            order.push(ring);
        }
        Matchgate::new(k, edges, (0..k).collect(), Some(Rotation::new(order))).unwrap()
    }

    /// A richer gadget: a path of ℓ+2 vertices with one internal vertex
    /// just before the port, mixed weights.
    fn weighted_gadget(ell: usize) -> Matchgate {
        let k = ell + 2;
        let mut edges = Vec::new();
        for v in 0..k - 1 {
            edges.push(Edge {
                u: v,
                v: v + 1,
                weight: w(v as i64 + 2),
            });
        }
        let mut order = Vec::new();
        for v in 0..k {
            let mut ring = Vec::new();
            if v > 0 {
                ring.push(v - 1);
            }
            if v + 1 < k {
                ring.push(v + 1);
            }
            order.push(ring);
        }
        let mut externals: Vec<usize> = (0..ell).collect();
        externals.push(ell + 1);
        Matchgate::new(k, edges, externals, Some(Rotation::new(order))).unwrap()
    }

    fn expanded(core: &Matchgate, gadget: &Matchgate) -> (Matchgate, BooleanSignature) {
        let gate = block_expand(core, gadget).unwrap();
        let sig = block_expand_signature(&core.signature(), &gadget.signature(), core.arity());
        (gate, sig)
    }

    #[test]
    fn block_expand_matches_brute_force() {
        let core = star_core(3, 1);
        let gadget = wire_gadget(1);
        let (gate, sig) = expanded(&core, &gadget);
        assert_eq!(gate.arity(), 3);
        assert_eq!(gate.signature(), sig);
        assert!(sig
            .block_view(1)
            .unwrap()
            .is_blockwise_symmetric()
            .is_symmetric());
        assert!(sig.check_mgi().unwrap().passed());
    }

    #[test]
    fn block_expand_rank_bound_small() {
        for (core, gadget, ell) in [
            (star_core(3, 2), weighted_gadget(2), 2usize),
            (star_core(4, 1), wire_gadget(1), 1),
            (pendant_core(3, 2), weighted_gadget(1), 1),
        ] {
            let sig = block_expand_signature(&core.signature(), &gadget.signature(), core.arity());
            let view = sig.block_view(ell).unwrap();
            assert!(view.is_blockwise_symmetric().is_symmetric());
            assert!(view.matrix_form().matrix.rank() <= 2);
            assert!(view.check_det_identities().unwrap().passed());
            assert!(matches!(sig.check_mgi().unwrap(), MgiVerdict::Pass));
        }
    }

    #[test]
    fn decompose_zero_signature() {
        let zero = BooleanSignature::zero(6);
        let view = zero.block_view(2).unwrap();
        let d = decompose(&view, Validation::Exhaustive).unwrap();
        assert_eq!(d.rank, RankClass::Zero);
        assert_eq!(d.reconstruct_full().unwrap(), zero);
    }

    #[test]
    fn decompose_rejects_gamma1() {
        // Arity 4, blockwise symmetric, rank 4: the boundary case showing
        // two blocks are not enough.
        let sig = ladder(-1).with_externals(vec![0, 1, 5, 4]).unwrap().signature();
        let view = sig.block_view(2).unwrap();
        let err = decompose(&view, Validation::Exhaustive).unwrap_err();
        assert_eq!(err, DecomposeError::RankExceedsBound { rank: 4 });
    }

    #[test]
    fn decompose_rank2_roundtrip_and_witnesses() {
        let core = star_core(3, 1);
        let gadget = weighted_gadget(1);
        let (gate, sig) = expanded(&core, &gadget);
        // Anchor the contraction-computed signature against brute force
        // while the graph is small.
        assert_eq!(gate.signature(), sig);
        let view = sig.block_view(1).unwrap();
        let d = decompose(&view, Validation::Exhaustive).unwrap();
        assert_eq!(d.rank, RankClass::Two);
        let pivot = d.pivot.as_ref().unwrap();
        assert_eq!((pivot.theta ^ pivot.eta).count_ones(), 1);
        assert_ne!(
            bits::parity(pivot.theta),
            bits::parity(pivot.eta),
            "pivot labels must differ in parity"
        );
        assert_eq!(d.reconstruct_full().unwrap(), sig);

        // Condensed witness: carve the gate, then read its condensed
        // vector both from the propagated signature and from brute force.
        let witness = condensed_witness(&gate, &sig, &d, false).unwrap();
        assert_eq!(witness.signature, witness.gate.signature());
        let condensed = condensed_vector(&witness.signature, witness.gate.is_even());
        assert_eq!(condensed, d.g);

        // Core witness.
        let core_w = core_witness(&gate, &sig, &d).unwrap();
        assert_eq!(core_w.signature, core_w.gate.signature());
        assert_eq!(&core_w.signature, d.core.as_ref().unwrap());
        assert!(core_w
            .signature
            .block_view(1)
            .unwrap()
            .is_blockwise_symmetric()
            .is_symmetric());
    }

    #[test]
    fn decompose_rank1_roundtrip_and_witness() {
        let core = pendant_core(3, 2);
        let gadget = weighted_gadget(1);
        let (gate, sig) = expanded(&core, &gadget);
        assert_eq!(gate.signature(), sig);
        let view = sig.block_view(1).unwrap();
        assert!(rank1_support_parity_ok(&view));
        let d = decompose(&view, Validation::Exhaustive).unwrap();
        assert_eq!(d.rank, RankClass::One);
        assert_eq!(d.reconstruct_full().unwrap(), sig);

        let witness = condensed_witness(&gate, &sig, &d, true).unwrap();
        assert_eq!(witness.signature, witness.gate.signature());
        let condensed = condensed_vector(&witness.signature, witness.gate.is_even());
        assert_eq!(condensed, d.g);

        // Wrong-mode calls error out.
        assert!(matches!(
            condensed_witness(&gate, &sig, &d, false).unwrap_err(),
            DecomposeError::WrongRankClass { expected: 2, found: 1 }
        ));
        assert!(matches!(
            core_witness(&gate, &sig, &d).unwrap_err(),
            DecomposeError::WrongRankClass { expected: 2, found: 1 }
        ));
    }

    #[test]
    fn mismatched_gate_signature_pair_errors() {
        let core = star_core(3, 1);
        let gadget = wire_gadget(1);
        let (gate, sig) = expanded(&core, &gadget);
        let d = decompose(&sig.block_view(1).unwrap(), Validation::Exhaustive).unwrap();
        let other = BooleanSignature::zero(5);
        assert!(matches!(
            condensed_witness(&gate, &other, &d, false).unwrap_err(),
            DecomposeError::GateMismatch(_)
        ));
    }

    #[test]
    fn reconstruct_shape_checks() {
        let core = star_core(3, 1);
        let gadget = wire_gadget(2);
        let (_, sig) = expanded(&core, &gadget);
        let d = decompose(&sig.block_view(2).unwrap(), Validation::Exhaustive).unwrap();
        assert!(d.reconstruct(&[0, 1]).is_err());
        assert!(d.reconstruct(&[4, 0, 0]).is_err());
        // All-θ blocks reproduce the (normalized) pivot-row entry scaled back.
        let pivot = d.pivot.as_ref().unwrap();
        let blocks = vec![pivot.theta; 3];
        let expected_index = blocks
            .iter()
            .fold(0usize, |acc, &b| (acc << 2) | b);
        assert_eq!(
            d.reconstruct(&blocks).unwrap(),
            sig.value(expected_index).clone()
        );
    }

    #[test]
    fn decomposition_text_roundtrip() {
        let core = star_core(3, 1);
        let gadget = weighted_gadget(2);
        let (_, sig) = expanded(&core, &gadget);
        let d = decompose(&sig.block_view(2).unwrap(), Validation::Exhaustive).unwrap();
        let text = decomposition_to_text(&d);
        let back = decomposition_from_text(&text).unwrap();
        assert_eq!(back, d);
    }
}
