use std::collections::BTreeSet;

use lcc_core::codec::{build_matrix, encode};
use lcc_core::field::{Dd, DdField, Field, PrimeField, RealField};
use lcc_core::functions::{Block, ComputationSpec};
use lcc_core::privacy::{audit_mds, solve_collusion_mask};
use lcc_core::rsdecode::{decode, decode_clean, DecodeError, Evaluation};
use lcc_core::scheme::{make_eval_points, regression_points, SchemeParams};
use lcc_core::simulator::{run_round, Corruption, DelayModel, FaultPlan};
use lcc_core::RandomPad;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_blocks<F: Field>(f: &F, k: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Block<F::Elem>> {
    (0..k).map(|_| (0..m).map(|_| f.random(rng)).collect()).collect()
}

/// Encode, evaluate, corrupt and decode by hand through the public API.
fn by_hand(f: &PrimeField, params: &SchemeParams, spec: &ComputationSpec<PrimeField>, m: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = random_blocks(f, params.k, m, &mut rng);
    let points = make_eval_points(f, params).unwrap();
    let u = build_matrix(f, &points);
    let pad = RandomPad::generate(f, params.t, m, rng.gen());
    let shares = encode(f, &data, &pad, &u).unwrap();
    let mut order: Vec<usize> = (0..params.n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let stragglers: BTreeSet<usize> = order[..params.s].iter().copied().collect();
    let adversaries: BTreeSet<usize> = order[params.s..params.s + params.a].iter().copied().collect();
    let returns: Vec<Evaluation<_>> = order
        .iter()
        .filter(|j| !stragglers.contains(j))
        .map(|&j| {
            let mut payload = spec.eval(f, &shares[j]).unwrap();
            if adversaries.contains(&j) {
                let c = payload.as_mut_slice();
                c[0] = f.add(c[0], f.one());
            }
            Evaluation { worker: j, payload }
        })
        .collect();
    let decoded = decode(f, &returns, &points, params).unwrap();
    let truth: Vec<_> = data.iter().map(|x| spec.eval(f, x).unwrap()).collect();
    decoded.blocks == truth
}

#[test]
fn bilinear_products_survive_faults() {
    let f = PrimeField::new(127).unwrap();
    // 2x2 times 2x2: degree 2
    let spec = ComputationSpec::bilinear(2, 2, 2).unwrap();
    let params = SchemeParams::plan(12, 2, 2, 2, 1, 2).unwrap();
    for seed in 0..40 {
        assert!(by_hand(&f, &params, &spec, 8, seed), "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_planned_tuple_decodes(n in 3usize..12, k in 1usize..4, s in 0usize..3, a in 0usize..3, t in 0usize..3, seed in any::<u64>()) {
        let f = PrimeField::new(127).unwrap();
        prop_assume!(s + a + t <= n);
        if let Ok(params) = SchemeParams::plan(n, k, s, a, t, 2) {
            prop_assume!(params.variant == lcc_core::Variant::Lagrange);
            prop_assert!(by_hand(&f, &params, &ComputationSpec::square(), 3, seed));
        }
    }

    #[test]
    fn simulated_rounds_match_direct_evaluation(seed in any::<u64>(), which in 0usize..3) {
        let f = PrimeField::new(127).unwrap();
        let params = SchemeParams::plan(11, 2, 1, 2, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_blocks(&f, 2, 4, &mut rng);
        let plan = FaultPlan::random(&mut rng, 11, 1, 2, Corruption::ALL[which], DelayModel::injected());
        let report = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, seed).unwrap();
        prop_assert!(report.matches, "{:?}", report);
    }
}

#[test]
fn too_few_returns_is_an_error_not_a_wrong_answer() {
    let f = PrimeField::new(127).unwrap();
    let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
    let points = make_eval_points(&f, &params).unwrap();
    let returns: Vec<Evaluation<_>> =
        (0..4).map(|j| Evaluation { worker: j, payload: Block::new(vec![f.one()]) }).collect();
    assert!(matches!(decode(&f, &returns, &points, &params), Err(DecodeError::NotEnoughReturns { .. })));
}

#[test]
fn real_shares_decode_to_rounding_level() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (k, n) = (4, 12);
    let spec_r = ComputationSpec::<RealField>::square();
    let spec_d = ComputationSpec::<DdField>::square();
    let data = random_blocks(&RealField, k, 9, &mut rng);
    let data_dd: Vec<Block<Dd>> = data.iter().map(|b| b.iter().map(|&x| Dd::from_f64(x)).collect()).collect();

    let pr = regression_points(&RealField, k, n).unwrap();
    let pd = regression_points(&DdField, k, n).unwrap();
    let sr = encode(&RealField, &data, &RandomPad::none(), &build_matrix(&RealField, &pr)).unwrap();
    let sd = encode(&DdField, &data_dd, &RandomPad::none(), &build_matrix(&DdField, &pd)).unwrap();
    // the last 7 points are the worst-conditioned choice
    let used: Vec<usize> = (n - 7..n).collect();
    let rr: Vec<_> = used.iter().map(|&j| Evaluation { worker: j, payload: spec_r.eval(&RealField, &sr[j]).unwrap() }).collect();
    let rd: Vec<_> = used.iter().map(|&j| Evaluation { worker: j, payload: spec_d.eval(&DdField, &sd[j]).unwrap() }).collect();
    let dr = decode_clean(&RealField, &rr, &pr, 6).unwrap();
    let dd = decode_clean(&DdField, &rd, &pd, 6).unwrap();

    let (mut err_r, mut err_d) = (0.0f64, 0.0f64);
    for (i, x) in data_dd.iter().enumerate() {
        // exact products in double-double
        let truth = spec_d.eval(&DdField, x).unwrap();
        for c in 0..truth.len() {
            err_r = err_r.max((dr.blocks[i][c] - truth[c].to_f64()).abs());
            err_d = err_d.max(dd.blocks[i][c].sub(truth[c]).to_f64().abs());
        }
    }
    assert!(err_r < 1e-6, "{err_r:e}");
    assert!(err_d < 1e-20, "{err_d:e}");
    assert!(err_d < err_r);
}

#[test]
fn padding_is_mds_and_masks_invert() {
    let f = PrimeField::new(127).unwrap();
    for (n, k, t) in [(8, 2, 1), (10, 3, 2), (12, 2, 3)] {
        let params = SchemeParams::plan(n, k, 0, 0, t, 1).unwrap();
        let u = build_matrix(&f, &make_eval_points(&f, &params).unwrap());
        assert!(audit_mds(&f, &u).passed());
        let coalition: Vec<usize> = (n - t..n).collect();
        assert!(solve_collusion_mask(&f, &u, &coalition).is_ok());
    }
}
