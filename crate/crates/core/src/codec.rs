//! Share generation: `X̃_j = (X_1, …, X_K, Z_1, …, Z_T) · U_j`.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::field::{Field, Matrix};
use crate::functions::Block;
use crate::scheme::{EvalPoints, Variant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("expected {expected} {what}, got {got}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("operation requires the {0:?} layout")]
    VariantMismatch(Variant),
}

/// The `(K+T) x N` matrix whose column `j` holds the Lagrange basis
/// polynomials on the betas evaluated at `alpha_j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EncodingMatrix<E> {
    k: usize,
    u: Matrix<E>,
}

impl<E: Copy + PartialEq> EncodingMatrix<E> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.u.rows() - self.k
    }

    pub fn n(&self) -> usize {
        self.u.cols()
    }

    pub fn matrix(&self) -> &Matrix<E> {
        &self.u
    }

    pub fn get(&self, row: usize, col: usize) -> E {
        self.u.get(row, col)
    }

    /// Rows `K..K+T`: the coefficients applied to the padding.
    pub fn bottom(&self) -> Matrix<E> {
        let rows: Vec<usize> = (self.k..self.u.rows()).collect();
        let cols: Vec<usize> = (0..self.n()).collect();
        self.u.select(&rows, &cols)
    }

    /// Wraps an arbitrary matrix, e.g. a deliberately broken one for audits.
    pub fn from_matrix(k: usize, u: Matrix<E>) -> Self {
        assert!(k <= u.rows());
        Self { k, u }
    }
}

/// `U_{i,j} = prod_{l != i} (alpha_j - beta_l) / (beta_i - beta_l)`.
pub fn build_matrix<F: Field>(field: &F, points: &EvalPoints<F::Elem>) -> EncodingMatrix<F::Elem> {
    let betas = points.betas();
    let rows = betas.len();
    // denominators depend on the row only
    let den_inv: Vec<F::Elem> = (0..rows)
        .map(|i| {
            let den = (0..rows)
                .filter(|&l| l != i)
                .fold(field.one(), |acc, l| field.mul(acc, field.sub(betas[i], betas[l])));
            field.inv(den).expect("betas are distinct")
        })
        .collect();
    let u = Matrix::from_fn(rows, points.n(), |i, j| {
        let a = points.alphas()[j];
        let num = (0..rows)
            .filter(|&l| l != i)
            .fold(field.one(), |acc, l| field.mul(acc, field.sub(a, betas[l])));
        field.mul(num, den_inv[i])
    });
    EncodingMatrix { k: points.k(), u }
}

/// The `T` uniformly random padding blocks `Z_1..Z_T`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomPad<E> {
    blocks: Vec<Block<E>>,
    seed: u64,
    drawn: usize,
}

impl<E: Copy> RandomPad<E> {
    /// Draws `t * m` field elements from a ChaCha20 stream keyed by `seed`.
    pub fn generate<F: Field<Elem = E>>(field: &F, t: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut drawn = 0;
        let blocks = (0..t)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        drawn += 1;
                        field.random(&mut rng)
                    })
                    .collect()
            })
            .collect();
        Self { blocks, seed, drawn }
    }

    /// Explicit padding, for exhaustive enumeration.
    pub fn from_blocks(blocks: Vec<Block<E>>) -> Self {
        Self { blocks, seed: 0, drawn: 0 }
    }

    pub fn none() -> Self {
        Self { blocks: Vec::new(), seed: 0, drawn: 0 }
    }

    pub fn blocks(&self) -> &[Block<E>] {
        &self.blocks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Field elements sampled so far; always `T * M` after [`generate`](Self::generate).
    pub fn elements_drawn(&self) -> usize {
        self.drawn
    }
}

/// Encodes `K` data blocks and the padding into `N` shares.
pub fn encode<F: Field>(
    field: &F,
    data: &[Block<F::Elem>],
    pad: &RandomPad<F::Elem>,
    u: &EncodingMatrix<F::Elem>,
) -> Result<Vec<Block<F::Elem>>, CodecError> {
    if data.len() != u.k() {
        return Err(CodecError::DimensionMismatch {
            what: "data blocks",
            expected: u.k(),
            got: data.len(),
        });
    }
    if pad.blocks().len() != u.t() {
        return Err(CodecError::DimensionMismatch {
            what: "padding blocks",
            expected: u.t(),
            got: pad.blocks().len(),
        });
    }
    let m = data.first().map_or(0, |b| b.len());
    let inputs: Vec<&Block<F::Elem>> = data.iter().chain(pad.blocks()).collect();
    if let Some(bad) = inputs.iter().find(|b| b.len() != m) {
        return Err(CodecError::DimensionMismatch { what: "entries per block", expected: m, got: bad.len() });
    }
    let shares = (0..u.n())
        .map(|j| {
            let mut out = alloc::vec![field.zero(); m];
            for (i, block) in inputs.iter().enumerate() {
                let c = u.get(i, j);
                if field.is_zero(c) {
                    continue;
                }
                for (o, &x) in out.iter_mut().zip(block.iter()) {
                    *o = field.add(*o, field.mul(c, x));
                }
            }
            Block::new(out)
        })
        .collect();
    Ok(shares)
}

/// The uncoded layout: worker `j` stores a copy of the block its alpha sits on.
pub fn encode_repetition<E: Copy + PartialEq>(
    data: &[Block<E>],
    points: &EvalPoints<E>,
) -> Result<Vec<Block<E>>, CodecError> {
    let replica_of = points
        .replica_of()
        .ok_or(CodecError::VariantMismatch(Variant::UncodedRepetition))?;
    if data.len() != points.k() {
        return Err(CodecError::DimensionMismatch {
            what: "data blocks",
            expected: points.k(),
            got: data.len(),
        });
    }
    Ok(replica_of.iter().map(|&i| data[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{interpolate, Fp, PrimeField};
    use crate::scheme::{make_eval_points, SchemeParams};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    fn pts(f: &PrimeField, k: usize, betas: &[u64], alphas: &[u64]) -> EvalPoints<Fp> {
        EvalPoints::new(
            k,
            betas.iter().map(|&v| f.elem(v)).collect(),
            alphas.iter().map(|&v| f.elem(v)).collect(),
        )
        .unwrap()
    }

    fn blk(f: &PrimeField, v: &[u64]) -> Block<Fp> {
        v.iter().map(|&x| f.from_u64(x)).collect()
    }

    #[test]
    fn matrix_example() {
        let f = PrimeField::new(11).unwrap();
        let u = build_matrix(&f, &pts(&f, 2, &[1, 2], &[3, 4]));
        let expected = Matrix::from_rows(2, 2, [10, 9, 2, 3].map(|v| f.elem(v)).to_vec()).unwrap();
        assert_eq!(u.matrix(), &expected);
    }

    #[test]
    fn alpha_on_beta_gives_unit_column() {
        let f = PrimeField::new(11).unwrap();
        let u = build_matrix(&f, &pts(&f, 3, &[1, 2, 3], &[2, 7]));
        assert_eq!(u.matrix().column(0), vec![f.zero(), f.one(), f.zero()]);
    }

    #[test]
    fn single_block_gives_all_ones() {
        let f = PrimeField::new(11).unwrap();
        let u = build_matrix(&f, &pts(&f, 1, &[1], &[2, 3, 4, 5]));
        assert_eq!(u.matrix().row(0), &[f.one(); 4]);
    }

    #[test]
    fn encode_examples() {
        let f = PrimeField::new(11).unwrap();
        let u = build_matrix(&f, &pts(&f, 2, &[1, 2], &[3, 4]));
        let shares = encode(&f, &[blk(&f, &[1]), blk(&f, &[4])], &RandomPad::none(), &u).unwrap();
        assert_eq!(shares, vec![blk(&f, &[7]), blk(&f, &[10])]);

        // oracle: interpolate u through (1,1), (2,4) and evaluate at 3, 4
        let q = interpolate(&f, &[(f.elem(1), f.elem(1)), (f.elem(2), f.elem(4))]).unwrap();
        assert_eq!(q.eval(&f, f.elem(3)), shares[0][0]);
        assert_eq!(q.eval(&f, f.elem(4)), shares[1][0]);

        // constant dataset
        let c = blk(&f, &[6, 2]);
        let u = build_matrix(&f, &pts(&f, 2, &[1, 2], &[3, 4, 5, 6, 7]));
        let shares = encode(&f, &[c.clone(), c.clone()], &RandomPad::none(), &u).unwrap();
        assert!(shares.iter().all(|s| *s == c));
    }

    #[test]
    fn worked_example_masks_every_share() {
        let f = PrimeField::new(11).unwrap();
        let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
        let u = build_matrix(&f, &make_eval_points(&f, &params).unwrap());
        for j in 0..8 {
            assert!(!f.is_zero(u.get(2, j)), "column {j} leaves Z unmasked");
        }
    }

    #[test]
    fn encode_rejects_bad_shapes() {
        let f = PrimeField::new(11).unwrap();
        let u = build_matrix(&f, &pts(&f, 2, &[1, 2, 3], &[4, 5]));
        let data = [blk(&f, &[1]), blk(&f, &[2])];
        assert!(matches!(
            encode(&f, &data, &RandomPad::none(), &u),
            Err(CodecError::DimensionMismatch { what: "padding blocks", .. })
        ));
        let pad = RandomPad::from_blocks(vec![blk(&f, &[1, 2])]);
        assert!(encode(&f, &data, &pad, &u).is_err());
        assert!(encode(&f, &data[..1], &RandomPad::generate(&f, 1, 1, 0), &u).is_err());
    }

    #[test]
    fn repetition_examples() {
        let f = PrimeField::new(11).unwrap();
        let (a, b, c) = (blk(&f, &[1]), blk(&f, &[2]), blk(&f, &[3]));
        let rep = |n, k| {
            let params = SchemeParams { n, k, s: 0, a: 0, t: 0, deg: 1, variant: Variant::UncodedRepetition };
            make_eval_points(&f, &params).unwrap()
        };
        assert_eq!(
            encode_repetition(&[a.clone(), b.clone()], &rep(5, 2)).unwrap(),
            vec![a.clone(), b.clone(), a.clone(), b.clone(), a.clone()]
        );
        assert_eq!(encode_repetition(&[a.clone()], &rep(3, 1)).unwrap(), vec![a.clone(); 3]);
        assert_eq!(
            encode_repetition(&[a.clone(), b.clone(), c.clone()], &rep(3, 3)).unwrap(),
            vec![a.clone(), b.clone(), c]
        );
        let lagrange = pts(&f, 2, &[1, 2], &[3, 4]);
        assert_eq!(
            encode_repetition(&[a, b], &lagrange),
            Err(CodecError::VariantMismatch(Variant::UncodedRepetition))
        );
    }

    #[test]
    fn pad_is_reproducible_and_counted() {
        let f = PrimeField::new(11).unwrap();
        let p1 = RandomPad::generate(&f, 3, 5, 42);
        let p2 = RandomPad::generate(&f, 3, 5, 42);
        assert_eq!(p1, p2);
        assert_eq!(p1.elements_drawn(), 15);
        assert_eq!(p1.blocks().len(), 3);
        assert_ne!(p1, RandomPad::generate(&f, 3, 5, 43));
    }

    #[test]
    fn pad_entries_look_uniform() {
        let f = PrimeField::new(11).unwrap();
        let pad = RandomPad::generate(&f, 1, 110_000, 7);
        let mut counts = [0usize; 11];
        for v in pad.blocks()[0].iter() {
            counts[v.value() as usize] += 1;
        }
        // chi-square with 10 dof; 29.6 is the 0.999 quantile
        let chi: f64 = counts.iter().map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0).sum();
        assert!(chi < 29.6, "chi^2 = {chi}");
    }

    fn random_scheme(rng: &mut ChaCha8Rng) -> (PrimeField, EvalPoints<Fp>) {
        let p = [127u64, 131, 257, 8191][rng.gen_range(0..4)];
        let f = PrimeField::new(p).unwrap();
        let k = rng.gen_range(1..5);
        let t = rng.gen_range(0..5);
        let n = rng.gen_range(1..17);
        // random distinct points with alphas off the data betas
        let mut used = Vec::new();
        let mut fresh = |rng: &mut ChaCha8Rng| loop {
            let x = f.random(rng);
            if !used.contains(&x) {
                used.push(x);
                return x;
            }
        };
        let betas = (0..k + t).map(|_| fresh(rng)).collect();
        let alphas = (0..n).map(|_| fresh(rng)).collect();
        (f, EvalPoints::new(k, betas, alphas).unwrap())
    }

    #[test]
    fn columns_sum_to_one_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (f, points) = random_scheme(&mut rng);
            let u = build_matrix(&f, &points);
            for j in 0..u.n() {
                let s = u.matrix().column(j).into_iter().fold(f.zero(), |a, b| f.add(a, b));
                assert_eq!(s, f.one());
            }
        }
    }

    proptest! {
        #[test]
        fn any_k_plus_t_shares_recover_data_and_pad(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f, points) = random_scheme(&mut rng);
            let (k, t, n) = (points.k(), points.t(), points.n());
            prop_assume!(n >= k + t);
            let m = 3;
            let data: Vec<Block<Fp>> = (0..k).map(|_| (0..m).map(|_| f.random(&mut rng)).collect()).collect();
            let pad = RandomPad::generate(&f, t, m, seed);
            let u = build_matrix(&f, &points);
            let shares = encode(&f, &data, &pad, &u).unwrap();
            // random subset of size K+T
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..idx.len()).rev() { idx.swap(i, rng.gen_range(0..=i)); }
            idx.truncate(k + t);
            for c in 0..m {
                let pts: Vec<_> = idx.iter().map(|&j| (points.alphas()[j], shares[j][c])).collect();
                let q = interpolate(&f, &pts).unwrap();
                for i in 0..k {
                    prop_assert_eq!(q.eval(&f, points.betas()[i]), data[i][c]);
                }
                for i in 0..t {
                    prop_assert_eq!(q.eval(&f, points.betas()[k + i]), pad.blocks()[i][c]);
                }
            }
        }

        #[test]
        fn encoding_is_linear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f, points) = random_scheme(&mut rng);
            let (k, t) = (points.k(), points.t());
            let m = 2;
            let rand_blocks = |c: usize, rng: &mut ChaCha8Rng| -> Vec<Block<Fp>> {
                (0..c).map(|_| (0..m).map(|_| f.random(rng)).collect()).collect()
            };
            let (x1, x2) = (rand_blocks(k, &mut rng), rand_blocks(k, &mut rng));
            let (z1, z2) = (rand_blocks(t, &mut rng), rand_blocks(t, &mut rng));
            let (a, b) = (f.random(&mut rng), f.random(&mut rng));
            let mix = |p: &[Block<Fp>], q: &[Block<Fp>]| -> Vec<Block<Fp>> {
                p.iter().zip(q).map(|(u, v)| u.iter().zip(v.iter()).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect()).collect()
            };
            let u = build_matrix(&f, &points);
            let lhs = encode(&f, &mix(&x1, &x2), &RandomPad::from_blocks(mix(&z1, &z2)), &u).unwrap();
            let s1 = encode(&f, &x1, &RandomPad::from_blocks(z1), &u).unwrap();
            let s2 = encode(&f, &x2, &RandomPad::from_blocks(z2), &u).unwrap();
            prop_assert_eq!(lhs, mix(&s1, &s2));
        }
    }
}
