//! Signatures over a domain of size q, Equality generators, holographic
//! transformations `f ↦ f·M^{⊗n}`, right inverses, and the two-route
//! matrix-form factorization check.

use std::str::FromStr;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::signature::BooleanSignature;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HoloError {
    #[error("value vector has length {len}, expected {expected}")]
    LengthMismatch { len: usize, expected: usize },
    #[error("domain sizes differ: signature is over [{sig}], matrix has {rows} rows")]
    DomainMismatch { sig: usize, rows: usize },
    #[error("matrix has {cols} columns; transformations need a power of two")]
    ColumnsNotPowerOfTwo { cols: usize },
    #[error("matrix rank {rank} is deficient for {q} rows")]
    RankDeficient { rank: usize, q: usize },
    #[error("signature is not symmetric")]
    NotSymmetric,
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error("dense table for domain {domain} arity {arity} is too large")]
    TableTooLarge { domain: usize, arity: usize },
    #[error("format error: {0}")]
    Format(String),
}

/// A dense function `[q]^n → Q(i, √2)`, first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSignature {
    domain: usize,
    arity: usize,
    values: Vec<Scalar>,
}

/// Dense storage bound: q^n may not exceed this many entries.
pub const MAX_TABLE: usize = 1 << 24;

fn table_len(domain: usize, arity: usize) -> Result<usize, HoloError> {
    domain
        .checked_pow(arity.try_into().unwrap_or(u32::MAX))
        .filter(|&len| len <= MAX_TABLE)
        .ok_or(HoloError::TableTooLarge { domain, arity })
}

impl DomainSignature {
    pub fn new(domain: usize, arity: usize, values: Vec<Scalar>) -> Result<Self, HoloError> {
        if domain == 0 {
            return Err(HoloError::EmptyDomain);
        }
        let expected = table_len(domain, arity)?;
        if values.len() != expected {
            return Err(HoloError::LengthMismatch {
                len: values.len(),
                expected,
            });
        }
        Ok(DomainSignature {
            domain,
            arity,
            values,
        })
    }

    pub fn zero(domain: usize, arity: usize) -> Self {
        DomainSignature {
            domain,
            arity,
            values: vec![Scalar::zero(); domain.pow(arity as u32)],
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &Scalar {
        &self.values[index]
    }

    pub fn set(&mut self, index: usize, value: Scalar) {
        self.values[index] = value;
    }

    /// Flat index of the tuple `(i₁, …, iₙ)`.
    pub fn index_of(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.arity);
        tuple.iter().fold(0, |acc, &d| acc * self.domain + d)
    }

    pub fn tuple_of(&self, mut index: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.arity];
        for slot in (0..self.arity).rev() {
            tuple[slot] = index % self.domain;
            index /= self.domain;
        }
        tuple
    }

    /// Invariance under adjacent transpositions of the variables.
    pub fn is_symmetric(&self) -> bool {
        let q = self.domain;
        let n = self.arity;
        for swap in 0..n.saturating_sub(1) {
            let place = q.pow((n - swap - 2) as u32);
            for index in 0..self.values.len() {
                let a = (index / (place * q)) % q;
                let b = (index / place) % q;
                if a == b {
                    continue;
                }
                let other = index - a * place * q - b * place + b * place * q + a * place;
                if self.values[index] != self.values[other] {
                    return false;
                }
            }
        }
        true
    }

    /// The q × q^{n−1} matrix with rows indexed by the first variable.
    pub fn matrix_form(&self) -> Matrix {
        let cols = self.domain.pow(self.arity.saturating_sub(1) as u32);
        Matrix::from_fn(self.domain, cols, |r, c| {
            self.values[r * cols + c].clone()
        })
    }

    /// Reads an arity-n domain-2 signature as a Boolean one (identical
    /// dense layout).
    pub fn to_boolean(&self) -> Result<BooleanSignature, HoloError> {
        if self.domain != 2 {
            return Err(HoloError::DomainMismatch {
                sig: self.domain,
                rows: 2,
            });
        }
        BooleanSignature::new(self.arity, self.values.clone()).map_err(|_| {
            HoloError::LengthMismatch {
                len: self.values.len(),
                expected: 1 << self.arity,
            }
        })
    }

    pub fn from_boolean(sig: &BooleanSignature) -> DomainSignature {
        DomainSignature {
            domain: 2,
            arity: sig.arity(),
            values: sig.values().to_vec(),
        }
    }

    /// File format: `q <q>`, `arity <n>`, then `<tuple> <scalar>` lines
    /// where the tuple is a digit string (q ≤ 10) or comma-separated.
    pub fn parse_text(text: &str) -> Result<Self, HoloError> {
        let mut q = None;
        let mut arity = None;
        let mut entries: Vec<(Vec<usize>, Scalar)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            match tokens.next().unwrap() {
                "q" => {
                    q = Some(parse_num(tokens.next(), lineno)?);
                }
                "arity" => {
                    arity = Some(parse_num(tokens.next(), lineno)?);
                }
                tuple_text => {
                    let tuple: Vec<usize> = if tuple_text.contains(',') {
                        tuple_text
                            .split(',')
                            .map(|t| {
                                t.parse().map_err(|e| {
                                    HoloError::Format(format!("line {lineno}: {e}"))
                                })
                            })
                            .collect::<Result<_, _>>()?
                    } else {
                        tuple_text
                            .chars()
                            .map(|ch| {
                                ch.to_digit(10).map(|d| d as usize).ok_or_else(|| {
                                    HoloError::Format(format!(
                                        "line {lineno}: bad tuple digit `{ch}`"
                                    ))
                                })
                            })
                            .collect::<Result<_, _>>()?
                    };
                    let rest: String = tokens.collect::<Vec<_>>().join(" ");
                    let value = Scalar::from_str(&rest)
                        .map_err(|e| HoloError::Format(format!("line {lineno}: {e}")))?;
                    entries.push((tuple, value));
                }
            }
        }
        let q = q.ok_or_else(|| HoloError::Format("missing `q` line".into()))?;
        let arity = arity.ok_or_else(|| HoloError::Format("missing `arity` line".into()))?;
        if q == 0 {
            return Err(HoloError::EmptyDomain);
        }
        table_len(q, arity)?;
        let mut sig = DomainSignature::zero(q, arity);
        for (tuple, value) in entries {
            if tuple.len() != arity || tuple.iter().any(|&d| d >= q) {
                return Err(HoloError::Format(format!(
                    "tuple {tuple:?} does not fit q={q} arity={arity}"
                )));
            }
            let index = sig.index_of(&tuple);
            sig.values[index] = value;
        }
        Ok(sig)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("q {}\narity {}\n", self.domain, self.arity);
        for (index, value) in self.values.iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            let tuple = self.tuple_of(index);
            let text: Vec<String> = tuple.iter().map(|d| d.to_string()).collect();
            if self.domain <= 10 {
                out.push_str(&format!("{} {}\n", text.join(""), value));
            } else {
                out.push_str(&format!("{} {}\n", text.join(","), value));
            }
        }
        out
    }
}

fn parse_num(tok: Option<&str>, lineno: usize) -> Result<usize, HoloError> {
    tok.ok_or_else(|| HoloError::Format(format!("line {lineno}: missing number")))?
        .parse()
        .map_err(|e| HoloError::Format(format!("line {lineno}: {e}")))
}

/// The Equality signature: 1 exactly when all n variables agree.
pub fn equality(domain: usize, arity: usize) -> Result<DomainSignature, HoloError> {
    if domain == 0 || arity == 0 {
        return Err(HoloError::EmptyDomain);
    }
    table_len(domain, arity)?;
    let mut sig = DomainSignature::zero(domain, arity);
    for i in 0..domain {
        let tuple = vec![i; arity];
        let index = sig.index_of(&tuple);
        sig.values[index] = Scalar::one();
    }
    Ok(sig)
}

/// A q × 2^ℓ transformation matrix with its rank computed exactly on
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformMatrix {
    matrix: Matrix,
    rank: usize,
    block_size: usize,
}

impl TransformMatrix {
    pub fn new(matrix: Matrix) -> Result<Self, HoloError> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(HoloError::EmptyDomain);
        }
        if !matrix.cols().is_power_of_two() {
            return Err(HoloError::ColumnsNotPowerOfTwo {
                cols: matrix.cols(),
            });
        }
        let rank = matrix.rank();
        let block_size = matrix.cols().trailing_zeros() as usize;
        Ok(TransformMatrix {
            matrix,
            rank,
            block_size,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// ℓ with 2^ℓ columns.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn has_full_row_rank(&self) -> bool {
        self.rank == self.matrix.rows()
    }

    /// The unnormalized Hadamard [[1, 1], [1, −1]].
    pub fn hadamard_unnormalized() -> TransformMatrix {
        let mut m = Matrix::zero(2, 2);
        m[(0, 0)] = Scalar::one();
        m[(0, 1)] = Scalar::one();
        m[(1, 0)] = Scalar::one();
        m[(1, 1)] = Scalar::from_int(-1);
        TransformMatrix::new(m).expect("hadamard is well formed")
    }

    /// The normalized Hadamard (1/√2)·[[1, 1], [1, −1]]; exact here since
    /// √2 lives in the scalar field.
    pub fn hadamard_normalized() -> TransformMatrix {
        let half_rt2 = &Scalar::from_ratio(1, 2) * &Scalar::sqrt2();
        let m = Matrix::from_fn(2, 2, |r, c| {
            if (r, c) == (1, 1) {
                -&half_rt2
            } else {
                half_rt2.clone()
            }
        });
        TransformMatrix::new(m).expect("hadamard is well formed")
    }
}

/// Applies `X` to every variable slot: `out^{β⃗} = Σ_{i⃗} Π X[β_k][i_k] ·
/// in^{i⃗}`, mapping a domain of size `q_in = X.cols()` to `q_out =
/// X.rows()`. One slot is contracted at a time.
pub fn apply_per_variable(sig: &DomainSignature, x: &Matrix) -> Result<DomainSignature, HoloError> {
    if x.cols() != sig.domain() {
        return Err(HoloError::DomainMismatch {
            sig: sig.domain(),
            rows: x.cols(),
        });
    }
    let q_in = sig.domain();
    let q_out = x.rows();
    let n = sig.arity();
    let mut values = sig.values.clone();
    // After processing slot k the layout is [q_out^k, q_in^{n-k}].
    for slot in 0..n {
        let tail = q_in.pow((n - slot - 1) as u32);
        let head = q_out.pow(slot as u32) * tail;
        let mut next = vec![Scalar::zero(); head * q_out];
        for h in 0..q_out.pow(slot as u32) {
            for b in 0..q_out {
                for t in 0..tail {
                    let mut acc = Scalar::zero();
                    for i in 0..q_in {
                        let coeff = &x[(b, i)];
                        if coeff.is_zero() {
                            continue;
                        }
                        let v = &values[h * (q_in * tail) + i * tail + t];
                        if !v.is_zero() {
                            acc += coeff * v;
                        }
                    }
                    next[h * (q_out * tail) + b * tail + t] = acc;
                }
            }
        }
        values = next;
    }
    DomainSignature::new(q_out, n, values)
}

/// The transformed signature `f·M^{⊗n}` over the Boolean domain, read
/// blockwise with ℓ = log2(columns): entry `α₁⋯αₙ` is
/// `Σ f^{i⃗} M[i₁][α₁] ⋯ M[iₙ][αₙ]`.
pub fn transform(f: &DomainSignature, m: &TransformMatrix) -> Result<BooleanSignature, HoloError> {
    let out = transform_to_domain(f, m)?;
    BooleanSignature::new(f.arity() * m.block_size(), out.values)
        .map_err(|_| HoloError::EmptyDomain)
}

/// Same contraction, kept as a domain-[2^ℓ] signature of arity n (used by
/// the Holant transformation check).
pub fn transform_to_domain(
    f: &DomainSignature,
    m: &TransformMatrix,
) -> Result<DomainSignature, HoloError> {
    if m.rows() != f.domain() {
        return Err(HoloError::DomainMismatch {
            sig: f.domain(),
            rows: m.rows(),
        });
    }
    apply_per_variable(f, &m.matrix().transpose())
}

/// `M̌^{⊗n}·g` for a 2^ℓ × q right inverse `M̌`, ending on domain [2^ℓ].
pub fn cotransform_to_domain(
    g: &DomainSignature,
    m_check: &Matrix,
) -> Result<DomainSignature, HoloError> {
    apply_per_variable(g, m_check)
}

/// The matrix form of the transform computed the factored way:
/// `Mᵀ · M(f) · M^{⊗(n−1)}`. Must match the direct route entry for entry.
pub fn matrix_form_factored(
    f: &DomainSignature,
    m: &TransformMatrix,
) -> Result<Matrix, HoloError> {
    if !f.is_symmetric() {
        return Err(HoloError::NotSymmetric);
    }
    if m.rows() != f.domain() {
        return Err(HoloError::DomainMismatch {
            sig: f.domain(),
            rows: m.rows(),
        });
    }
    let mt = m.matrix().transpose();
    let mf = f.matrix_form();
    let kron = m.matrix().kronecker_pow(f.arity().saturating_sub(1));
    let left = mt.mul(&mf).expect("shapes agree");
    Ok(left.mul(&kron).expect("shapes agree"))
}

/// A 2^ℓ × q matrix `M̌` with `M·M̌ = I_q`, built from the pivot columns of
/// the elimination: the pivot square block is inverted exactly and all
/// other rows stay zero.
pub fn right_inverse(m: &TransformMatrix) -> Result<Matrix, HoloError> {
    let q = m.rows();
    if !m.has_full_row_rank() {
        return Err(HoloError::RankDeficient { rank: m.rank(), q });
    }
    let pivots = m.matrix().pivot_columns();
    debug_assert_eq!(pivots.len(), q);
    let block = Matrix::from_fn(q, q, |r, c| m.matrix()[(r, pivots[c])].clone());
    let inv = block.inverse().expect("pivot block is invertible");
    let mut out = Matrix::zero(m.matrix().cols(), q);
    for (j, &col) in pivots.iter().enumerate() {
        for c in 0..q {
            out[(col, c)] = inv[(j, c)].clone();
        }
    }
    debug_assert_eq!(m.matrix().mul(&out).unwrap(), Matrix::identity(q));
    Ok(out)
}

/// Matrix file format: `rows <r>`, `cols <c>`, then one line per row with
/// comma-separated scalar entries.
pub fn parse_matrix_text(text: &str) -> Result<Matrix, HoloError> {
    let mut rows: Option<usize> = None;
    let mut cols: Option<usize> = None;
    let mut data: Vec<Vec<Scalar>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("rows ") {
            rows = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| HoloError::Format(format!("line {lineno}: {e}")))?,
            );
        } else if let Some(rest) = line.strip_prefix("cols ") {
            cols = Some(
                rest.trim()
                    .parse()
                    .map_err(|e| HoloError::Format(format!("line {lineno}: {e}")))?,
            );
        } else {
            let row: Vec<Scalar> = line
                .split(',')
                .map(|cell| {
                    Scalar::from_str(cell.trim())
                        .map_err(|e| HoloError::Format(format!("line {lineno}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            data.push(row);
        }
    }
    let rows = rows.ok_or_else(|| HoloError::Format("missing `rows` line".into()))?;
    let cols = cols.ok_or_else(|| HoloError::Format("missing `cols` line".into()))?;
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(HoloError::Format(format!(
            "expected {rows} rows of {cols} entries"
        )));
    }
    Ok(Matrix::from_rows(data))
}

pub fn matrix_to_text(m: &Matrix) -> String {
    let mut out = format!("rows {}\ncols {}\n", m.rows(), m.cols());
    for r in 0..m.rows() {
        let cells: Vec<String> = m.row(r).iter().map(|s| s.to_string()).collect();
        out.push_str(&cells.join(", "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_shapes() {
        let eq22 = equality(2, 2).unwrap();
        let ones: Vec<i64> = eq22
            .values()
            .iter()
            .map(|v| if v.is_zero() { 0 } else { 1 })
            .collect();
        assert_eq!(ones, vec![1, 0, 0, 1]);

        let eq33 = equality(3, 3).unwrap();
        for (index, value) in eq33.values().iter().enumerate() {
            let tuple = eq33.tuple_of(index);
            let all_equal = tuple.iter().all(|&d| d == tuple[0]);
            assert_eq!(!value.is_zero(), all_equal);
        }
        assert!(equality(3, 0).is_err());
    }

    #[test]
    fn equality_matrix_form_has_rank_q() {
        for q in 2..=4 {
            for n in 2..=3 {
                let eq = equality(q, n).unwrap();
                assert_eq!(eq.matrix_form().rank(), q);
            }
        }
    }

    #[test]
    fn symmetric_detection() {
        assert!(equality(3, 3).unwrap().is_symmetric());
        let mut f = DomainSignature::zero(2, 2);
        f.set(1, Scalar::one()); // f(0,1) = 1, f(1,0) = 0
        assert!(!f.is_symmetric());
    }

    #[test]
    fn transform_by_identity_is_identity() {
        let f = equality(2, 3).unwrap();
        let id = TransformMatrix::new(Matrix::identity(2)).unwrap();
        let out = transform(&f, &id).unwrap();
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn hadamard_turns_equality_even() {
        let f = equality(2, 2).unwrap();
        let h = TransformMatrix::hadamard_unnormalized();
        let out = transform(&f, &h).unwrap();
        let expected: Vec<Scalar> = [2i64, 0, 0, 2].iter().map(|&x| Scalar::from_int(x)).collect();
        assert_eq!(out.values(), &expected[..]);
    }

    #[test]
    fn transform_is_linear_in_f() {
        let h = TransformMatrix::hadamard_unnormalized();
        let f = equality(2, 2).unwrap();
        let g = {
            let mut g = DomainSignature::zero(2, 2);
            g.set(1, Scalar::from_int(3));
            g.set(2, Scalar::from_int(-2));
            g
        };
        let sum = DomainSignature::new(
            2,
            2,
            f.values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let lhs = transform(&sum, &h).unwrap();
        let fa = transform(&f, &h).unwrap();
        let fb = transform(&g, &h).unwrap();
        assert_eq!(lhs, fa.add(&fb).unwrap());
    }

    #[test]
    fn factored_matrix_form_agrees() {
        let f = equality(2, 2).unwrap();
        let h = TransformMatrix::hadamard_unnormalized();
        let direct = transform(&f, &h)
            .unwrap()
            .block_view(1)
            .unwrap()
            .matrix_form();
        let factored = matrix_form_factored(&f, &h).unwrap();
        assert_eq!(direct.matrix, factored);

        let zero = DomainSignature::zero(3, 3);
        let m = TransformMatrix::new(Matrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(1)],
            vec![Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(0)],
            vec![Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(3)],
        ]))
        .unwrap();
        let factored = matrix_form_factored(&zero, &m).unwrap();
        assert_eq!(factored, Matrix::zero(4, 16));

        let mut asym = DomainSignature::zero(2, 2);
        asym.set(1, Scalar::one());
        assert_eq!(
            matrix_form_factored(&asym, &h).unwrap_err(),
            HoloError::NotSymmetric
        );
    }

    #[test]
    fn right_inverse_examples() {
        let id = TransformMatrix::new(Matrix::identity(2)).unwrap();
        assert_eq!(right_inverse(&id).unwrap(), Matrix::identity(2));

        let h = TransformMatrix::hadamard_unnormalized();
        let inv = right_inverse(&h).unwrap();
        let half = Scalar::from_ratio(1, 2);
        assert_eq!(inv[(0, 0)], half);
        assert_eq!(inv[(0, 1)], half);
        assert_eq!(inv[(1, 0)], half);
        assert_eq!(inv[(1, 1)], -&half);

        let deficient = TransformMatrix::new(Matrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(2)],
            vec![Scalar::from_int(2), Scalar::from_int(4)],
        ]))
        .unwrap();
        assert!(right_inverse(&deficient).is_err());
    }

    #[test]
    fn right_inverse_random_rectangular() {
        let m = TransformMatrix::new(Matrix::from_rows(vec![
            vec![Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(1)],
            vec![Scalar::from_int(0), Scalar::from_int(1), Scalar::from_int(2), Scalar::from_int(0)],
            vec![Scalar::from_int(1), Scalar::from_int(1), Scalar::from_int(0), Scalar::from_int(3)],
        ]))
        .unwrap();
        assert_eq!(m.rank(), 3);
        let inv = right_inverse(&m).unwrap();
        assert_eq!(m.matrix().mul(&inv).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn normalized_hadamard_squares_to_identity() {
        let h = TransformMatrix::hadamard_normalized();
        let sq = h.matrix().mul(h.matrix()).unwrap();
        assert_eq!(sq, Matrix::identity(2));
    }

    #[test]
    fn matrix_text_roundtrip() {
        let h = TransformMatrix::hadamard_normalized();
        let text = matrix_to_text(h.matrix());
        let back = parse_matrix_text(&text).unwrap();
        assert_eq!(&back, h.matrix());
    }

    #[test]
    fn domain_signature_text_roundtrip() {
        let eq = equality(3, 2).unwrap();
        let text = eq.to_text();
        let back = DomainSignature::parse_text(&text).unwrap();
        assert_eq!(back, eq);
    }
}
