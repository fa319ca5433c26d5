//! Cross-module invariants exercised through the public API, each against
//! an oracle independent of the code path it checks.

use matchgates::decompose::{
    core_witness, decompose, rank1_support_parity_ok, RankClass, Validation,
};
use matchgates::harness::{claw_gadget, pendant_core, star_core, GateGen};
use matchgates::holant::DEFAULT_STATE_CAP;
use matchgates::holo::{equality, transform, TransformMatrix};
use matchgates::matchgate::contract_signatures;
use matchgates::signature::SymmetryVerdict;
use matchgates::{bits, compose, BooleanSignature, Matrix, Scalar};

/// Test-side contraction oracle, written index-first rather than
/// pair-first: enumerate full assignments of both gates and keep those
/// agreeing on the glued positions.
fn oracle_contract(
    a: &BooleanSignature,
    b: &BooleanSignature,
    pairs: &[(usize, usize)],
) -> BooleanSignature {
    let na = a.arity();
    let nb = b.arity();
    let free_a: Vec<usize> = (1..=na)
        .filter(|p| pairs.iter().all(|&(x, _)| x != *p))
        .collect();
    let free_b: Vec<usize> = (1..=nb)
        .filter(|p| pairs.iter().all(|&(_, y)| y != *p))
        .collect();
    let out_arity = free_a.len() + free_b.len();
    let mut out = BooleanSignature::zero(out_arity);
    for ia in 0..1usize << na {
        for ib in 0..1usize << nb {
            if pairs
                .iter()
                .any(|&(x, y)| bits::get_bit(ia, x, na) != bits::get_bit(ib, y, nb))
            {
                continue;
            }
            let term = a.value(ia) * b.value(ib);
            if term.is_zero() {
                continue;
            }
            let mut index = 0usize;
            for &p in &free_a {
                index = (index << 1) | bits::get_bit(ia, p, na) as usize;
            }
            for &p in &free_b {
                index = (index << 1) | bits::get_bit(ib, p, nb) as usize;
            }
            out.set(index, out.value(index) + term);
        }
    }
    out
}

/// The same gate with its embedding dropped; composition then never has
/// to route connectors in the plane, and the deletion semantics are
/// untouched.
fn forget_embedding(gate: &matchgates::Matchgate) -> matchgates::Matchgate {
    matchgates::Matchgate::new(
        gate.vertex_count(),
        gate.edges().to_vec(),
        gate.externals().to_vec(),
        None,
    )
    .unwrap()
}

#[test]
fn composition_matches_contraction_on_200_gates() {
    let mut gen = GateGen::new(0xC0117AC7);
    let mut checked = 0usize;
    let mut seeds = 0u64;
    while checked < 200 {
        seeds += 1;
        let mut local = GateGen::new(seeds * 31 + 7);
        let arity_a = 1 + (checked % 3);
        let arity_b = 1 + (checked / 3 % 3);
        let a = forget_embedding(&gen.random_gate(arity_a, arity_a + 2));
        let b = forget_embedding(&local.random_gate(arity_b, arity_b + 2));
        if a.vertex_count() + b.vertex_count() > 16 {
            continue;
        }
        let k = 1 + checked % arity_a.min(arity_b);
        let pairs_pos: Vec<(usize, usize)> = (0..k).map(|i| (i + 1, i + 1)).collect();
        let pairs_vertices: Vec<(usize, usize)> = pairs_pos
            .iter()
            .map(|&(x, y)| (a.externals()[x - 1], b.externals()[y - 1]))
            .collect();
        let glued = compose(&a, &b, &pairs_vertices).expect("compose");
        let sa = a.signature();
        let sb = b.signature();
        let direct = glued.signature();
        let contracted = contract_signatures(&sa, &sb, &pairs_pos);
        let oracle = oracle_contract(&sa, &sb, &pairs_pos);
        assert_eq!(direct, oracle, "gate pair #{checked}");
        assert_eq!(contracted, oracle, "gate pair #{checked}");
        checked += 1;
    }
}

#[test]
fn embedded_composition_stays_planar_for_consecutive_pairs() {
    // Gluing two gates along one or two cyclically consecutive externals
    // keeps the merged embedding planar; the Euler validator certifies it.
    let mut gen = GateGen::new(0x90_90);
    let mut done = 0usize;
    while done < 40 {
        let a = gen.random_gate(2, 4);
        let b = gen.random_gate(2, 4);
        let k = 1 + done % 2;
        let pairs: Vec<(usize, usize)> = (0..k)
            .map(|i| (a.externals()[i], b.externals()[i]))
            .collect();
        let glued = compose(&a, &b, &pairs).expect("planar gluing");
        assert!(glued.rotation().is_some());
        glued.validate_planarity().expect("certified by the checker");
        done += 1;
    }
}

#[test]
fn symmetric_transforms_are_blockwise_symmetric() {
    let mut gen = GateGen::new(0x5e11);
    for trial in 0..60 {
        let q = 2 + trial % 2;
        let n = 2 + trial % 3;
        let block_size = 1 + trial % 2;
        let f = equality(q, n).unwrap();
        let m = gen.random_full_rank_matrix(q, block_size.max((q as f64).log2().ceil() as usize));
        let image = transform(&f, &m).unwrap();
        let view = image.block_view(m.block_size()).unwrap();
        assert!(
            view.is_blockwise_symmetric().is_symmetric(),
            "trial {trial}"
        );
    }
}

#[test]
fn equality_transform_rank_is_q() {
    let mut gen = GateGen::new(0xAB1E);
    for q in [2usize, 3, 4] {
        let block_size = (usize::BITS - (q - 1).leading_zeros()) as usize;
        for n in [2usize, 3] {
            let m = gen.random_full_rank_matrix(q, block_size);
            let image = transform(&equality(q, n).unwrap(), &m).unwrap();
            let view = image.block_view(block_size).unwrap();
            assert_eq!(view.matrix_form().matrix.rank(), q, "q={q} n={n}");
        }
    }
}

#[test]
fn independent_rows_have_full_rank() {
    // Rows built as shifted unit patterns plus noise stay independent by
    // construction; elimination must report the full count.
    let mut gen = GateGen::new(0xF00D);
    for q in 2..=4usize {
        let cols = 8;
        let m = Matrix::from_fn(q, cols, |r, c| {
            if c == r {
                Scalar::one()
            } else if c > q {
                gen.random_small_scalar()
            } else {
                Scalar::zero()
            }
        });
        assert_eq!(m.rank(), q);
    }
}

#[test]
fn planted_rank3_signature_fails_det_diagnostics() {
    // A blockwise symmetric non-gate signature of matrix-form rank 3: the
    // Equality transform under a fixed full-rank 3x4 matrix. Some 2x2
    // determinant must survive; the diagnostics have to find one.
    let rows = vec![
        vec![1, 0, 1, 1],
        vec![0, 1, 2, 0],
        vec![1, 1, 0, 3],
    ];
    let m = TransformMatrix::new(Matrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(Scalar::from_int).collect())
            .collect(),
    ))
    .unwrap();
    assert!(m.has_full_row_rank());
    let image = transform(&equality(3, 3).unwrap(), &m).unwrap();
    let view = image.block_view(2).unwrap();
    assert!(view.is_blockwise_symmetric().is_symmetric());
    assert_eq!(view.matrix_form().matrix.rank(), 3);
    let verdict = view.check_det_identities().unwrap();
    assert!(
        !verdict.passed(),
        "a rank-3 blockwise symmetric signature must trip a determinant"
    );
}

#[test]
fn csp_encoding_matches_direct_summation_on_100_instances() {
    let mut gen = GateGen::new(0xC59);
    for trial in 0..100 {
        let q = 2 + trial % 2;
        let csp = gen.random_csp(q);
        let grid = csp.to_grid().unwrap();
        assert_eq!(
            grid.holant_bruteforce(DEFAULT_STATE_CAP).unwrap(),
            csp.direct_value(DEFAULT_STATE_CAP).unwrap(),
            "trial {trial}"
        );
    }
}

#[test]
fn claw_expansion_exercises_odd_pivot() {
    // Star core with a claw gadget: the all-zero row of the matrix form
    // vanishes, so the pivot's first label has odd weight. The core
    // witness must still reproduce the parity-indexed core exactly.
    let core = star_core(3, Scalar::from_int(2));
    let gadget = claw_gadget(2, |k| Scalar::from_int(k as i64));
    let gate = matchgates::decompose::block_expand(&core, &gadget).unwrap();
    let sig = matchgates::decompose::block_expand_signature(
        &core.signature(),
        &gadget.signature(),
        core.arity(),
    );
    assert_eq!(gate.signature(), sig);
    let view = sig.block_view(2).unwrap();
    let d = decompose(&view, Validation::Exhaustive).unwrap();
    assert_eq!(d.rank, RankClass::Two);
    let pivot = d.pivot.as_ref().unwrap();
    assert_eq!(
        pivot.theta.count_ones() % 2,
        1,
        "claw expansion should pivot on an odd label, got {:02b}",
        pivot.theta
    );
    assert_eq!(d.reconstruct_full().unwrap(), sig);
    let w = core_witness(&gate, &sig, &d).unwrap();
    assert_eq!(w.signature, w.gate.signature());
    assert_eq!(&w.signature, d.core.as_ref().unwrap());
}

#[test]
fn rank1_reconstruction_kills_zero_blocks() {
    let core = pendant_core(3, Scalar::from_int(2));
    let gadget = claw_gadget(1, |_| Scalar::one());
    let sig = matchgates::decompose::block_expand_signature(
        &core.signature(),
        &gadget.signature(),
        core.arity(),
    );
    let view = sig.block_view(1).unwrap();
    if let Ok(d) = decompose(&view, Validation::Exhaustive) {
        if d.rank == RankClass::One {
            assert!(rank1_support_parity_ok(&view));
            let zero_block = (0..2usize).find(|&b| d.g[b].is_zero());
            if let Some(b) = zero_block {
                let probe = vec![b, 1 - b, 1 - b];
                assert!(d.reconstruct(&probe).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn exported_types_are_send_and_sync() {
    fn check<T: Send + Sync>() {}
    check::<Scalar>();
    check::<BooleanSignature>();
    check::<matchgates::Matchgate>();
    check::<Matrix>();
    check::<matchgates::DomainSignature>();
    check::<matchgates::SignatureGrid>();
}

#[test]
fn blockwise_symmetry_counterexample_is_reported() {
    let mut planted = BooleanSignature::zero(4);
    planted.set(0b1001, Scalar::one());
    planted.set(0b0110, Scalar::from_int(2));
    let view = planted.block_view(2).unwrap();
    match view.is_blockwise_symmetric() {
        SymmetryVerdict::Violated { swap, index } => {
            assert_eq!(swap, 1);
            assert_eq!(index, 0b0110);
        }
        SymmetryVerdict::Symmetric => panic!("planted asymmetry missed"),
    }
}
