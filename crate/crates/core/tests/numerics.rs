//! Sampling, tensor assembly, spectra and entropies against independent
//! oracles.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use unigraph::entropy::{self, element_entropy, eigenvector_entropy, entanglement, partial_trace, purity};
use unigraph::graph::{presets, Clique, InteractionGraph, Layer, ParticleSystem};
use unigraph::sampling::{haar_unitary, RandomStream, UnitaryMatrix};
use unigraph::spectral::{self, eigendecompose, reference_cdf, spacings, Histogram, Reference};
use unigraph::tensor::{evolution_unitary, global_index, kron, lift, multi_index, MultiIndex};
use unigraph::{c64, Mat};

fn max_diff(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    let n = a.dim();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            d = d.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    d
}

fn dims_strategy() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..4, 1..5)
}

/// Entry-by-entry definition of a lifted block, written without the
/// library's index maps.
fn lift_oracle(block: &UnitaryMatrix, members: &[usize], dims: &[usize]) -> Mat<c64> {
    let n: usize = dims.iter().product();
    Mat::from_fn(n, n, |g, h| {
        let mg = multi_index(g, dims).unwrap().0;
        let mh = multi_index(h, dims).unwrap().0;
        let outside_equal = (0..dims.len()).filter(|p| !members.contains(p)).all(|p| mg[p] == mh[p]);
        if !outside_equal {
            return c64::new(0.0, 0.0);
        }
        let local = |m: &[usize]| members.iter().fold(0, |acc, &p| acc * dims[p] + m[p]);
        block.get(local(&mg), local(&mh))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_maps_are_inverse(dims in dims_strategy(), pick in any::<usize>()) {
        let n: usize = dims.iter().product();
        let g = pick % n;
        let m = multi_index(g, &dims).unwrap();
        prop_assert_eq!(global_index(&m, &dims).unwrap(), g);
        prop_assert!(global_index(&MultiIndex(vec![0; dims.len() + 1]), &dims).is_err());
    }

    #[test]
    fn haar_output_is_unitary(dim in 1usize..40, seed in any::<u64>(), index in any::<u64>()) {
        let u = haar_unitary(dim, RandomStream::new(seed, index)).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-12);
        prop_assert!((u.determinant().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lift_matches_definition(
        dims in proptest::collection::vec(1usize..4, 2..5),
        seed in any::<u64>(),
        mask in any::<u8>(),
    ) {
        let k = dims.len();
        let mut members: Vec<usize> = (0..k).filter(|p| mask >> p & 1 == 1).collect();
        if members.is_empty() {
            members.push(0);
        }
        let clique = Clique::new(members.iter().map(|p| p + 1)).unwrap();
        let block = haar_unitary(clique.block_dim(&dims), RandomStream::new(seed, 0)).unwrap();
        let lifted = lift(&block, &clique, &dims).unwrap();
        let oracle = lift_oracle(&block, &members, &dims);
        let mut d = 0.0f64;
        for i in 0..lifted.dim() {
            for j in 0..lifted.dim() {
                d = d.max((lifted.get(i, j) - oracle[(i, j)]).norm());
            }
        }
        prop_assert!(d == 0.0);
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>(), na in 1usize..5, nb in 1usize..5) {
        let s = RandomStream::new(seed, 0);
        let a = haar_unitary(na, s.child(0)).unwrap();
        let b = haar_unitary(nb, s.child(1)).unwrap();
        let c = haar_unitary(na, s.child(2)).unwrap();
        let d = haar_unitary(nb, s.child(3)).unwrap();
        let lhs = kron(&a, &b).unwrap().mul(&kron(&c, &d).unwrap());
        let rhs = kron(&a.mul(&c), &b.mul(&d)).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn evolution_is_unitary_and_reproducible(seed in any::<u64>(), n in 2usize..4) {
        let g = presets::crossed_square(n).unwrap();
        let s = RandomStream::new(seed, 3);
        let u = evolution_unitary(&g, s).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-12);
        prop_assert_eq!(max_diff(&u, &evolution_unitary(&g, s).unwrap()), 0.0);
    }

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..48, seed in any::<u64>()) {
        let u = haar_unitary(dim, RandomStream::new(seed, 1)).unwrap();
        let spec = eigendecompose(&u).unwrap();
        prop_assert!(spec.max_residual(&u) <= 1e-9);
        prop_assert!(spec.phases().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(spec.phases().iter().all(|&t| (0.0..TAU).contains(&t)));
    }

    #[test]
    fn spacings_have_unit_mean_and_ignore_global_phase(
        phases in proptest::collection::vec(0.0..TAU, 2..60),
        shift in 0.0..TAU,
    ) {
        let s = spacings(&phases).unwrap();
        prop_assert!((s.mean() - 1.0).abs() < 1e-9);
        let shifted: Vec<f64> = phases.iter().map(|t| (t + shift).rem_euclid(TAU)).collect();
        let mut a = s.into_vec();
        let mut b = spacings(&shifted).unwrap().into_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn entropies_ignore_order_and_phases(dim in 2usize..20, seed in any::<u64>(), shift in 1usize..19) {
        let u = haar_unitary(dim, RandomStream::new(seed, 0)).unwrap();
        let base = element_entropy(&u);
        let rotated = Mat::from_fn(dim, dim, |i, j| u.get((i + shift) % dim, (j + 1) % dim) * c64::cis(j as f64 * 0.37));
        let rotated = UnitaryMatrix::checked(rotated).unwrap();
        prop_assert!((element_entropy(&rotated) - base).abs() < 1e-12);

        let spec = eigendecompose(&u).unwrap();
        let h = eigenvector_entropy(&spec);
        let vectors = UnitaryMatrix::new(spec.vectors().to_owned(), 1e-9).unwrap();
        prop_assert!((h - element_entropy(&vectors)).abs() < 1e-12);
        prop_assert!(h >= 0.0 && h <= (dim as f64).ln() + 1e-12);
    }

    #[test]
    fn schmidt_symmetry_and_bounds(dims in proptest::collection::vec(1usize..4, 2..5), seed in any::<u64>(), mask in 1u8..15) {
        let k = dims.len();
        let n: usize = dims.iter().product();
        let keep: Vec<usize> = (1..=k).filter(|p| mask >> (p - 1) & 1 == 1).collect();
        prop_assume!(!keep.is_empty() && keep.len() < k);
        let rest: Vec<usize> = (1..=k).filter(|p| !keep.contains(p)).collect();
        let psi: Vec<c64> = {
            let u = haar_unitary(n, RandomStream::new(seed, 5)).unwrap();
            (0..n).map(|i| u.get(i, 0)).collect()
        };
        let (ha, ra) = entanglement(&psi, &dims, &keep).unwrap();
        let (hb, rb) = entanglement(&psi, &dims, &rest).unwrap();
        prop_assert!((ha - hb).abs() < 1e-9);
        prop_assert!((ra - rb).abs() < 1e-9);
        let da: usize = keep.iter().map(|p| dims[p - 1]).product();
        let db = n / da;
        let dmin = da.min(db) as f64;
        prop_assert!(ra >= 1.0 / dmin - 1e-12 && ra <= 1.0 + 1e-12);
        prop_assert!(ha >= -1e-12 && ha <= dmin.ln() + 1e-12);
        let sigma = partial_trace(&psi, &dims, &keep).unwrap();
        prop_assert!((purity(&sigma) - ra).abs() < 1e-12);
    }

    #[test]
    fn histogram_merge_is_associative(
        a in proptest::collection::vec(-1.0..5.0f64, 0..50),
        b in proptest::collection::vec(-1.0..5.0f64, 0..50),
        c in proptest::collection::vec(-1.0..5.0f64, 0..50),
    ) {
        let h = |xs: &[f64]| {
            let mut h = Histogram::for_spacings();
            h.extend(xs.iter().copied());
            h
        };
        let mut left = h(&a);
        left.merge(&h(&b));
        left.merge(&h(&c));
        let mut bc = h(&b);
        bc.merge(&h(&c));
        let mut right = h(&a);
        right.merge(&bc);
        prop_assert_eq!(&left, &right);
        let all: Vec<f64> = a.iter().chain(&b).chain(&c).copied().collect();
        prop_assert_eq!(&left, &h(&all));
    }
}

#[test]
fn haar_second_moments() {
    // E|U_ij|² = 1/N and E|Tr U|² = 1 for Haar matrices.
    let n = 6;
    let draws = 4000;
    let mut entry = vec![0.0; n * n];
    let mut trace_sq = 0.0;
    for t in 0..draws {
        let u = haar_unitary(n, RandomStream::new(0xA11, t)).unwrap();
        let mut tr = c64::new(0.0, 0.0);
        for i in 0..n {
            tr += u.get(i, i);
            for j in 0..n {
                entry[i * n + j] += u.get(i, j).norm_sqr();
            }
        }
        trace_sq += tr.norm_sqr();
    }
    for e in entry {
        // each |U_ij|² has variance (N−1)/(N²(N+1)); 5 standard errors
        let sd = (((n - 1) as f64) / ((n * n * (n + 1)) as f64) / draws as f64).sqrt();
        assert!((e / draws as f64 - 1.0 / n as f64).abs() < 5.0 * sd);
    }
    assert!((trace_sq / draws as f64 - 1.0).abs() < 0.08);
}

#[test]
fn wigner_cdf_matches_closed_form() {
    // ∫₀^S (32/π²) x² e^{−4x²/π} dx = erf(2S/√π) − (4S/π) e^{−4S²/π}
    let closed = |s: f64| statrs::function::erf::erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp();
    for i in 0..=80 {
        let s = i as f64 * 0.05;
        let got = reference_cdf(Reference::Wigner, s).unwrap();
        assert!((got - closed(s)).abs() < 1e-9, "S={s}: {got} vs {}", closed(s));
    }
    // composite Simpson as a second rule
    let simpson = |b: f64| {
        let m = 2000;
        let h = b / m as f64;
        let f = |x: f64| spectral::wigner_pdf(x).unwrap();
        (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                w * f(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0
    };
    assert!((reference_cdf(Reference::Wigner, 1.3).unwrap() - simpson(1.3)).abs() < 1e-10);
    assert!((reference_cdf(Reference::Poisson, 2.0).unwrap() - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
}

#[test]
fn ks_matches_brute_force() {
    let sample = [0.1, 0.5, 0.55, 1.2, 2.5, 0.9];
    let cdf = |x: f64| 1.0 - (-x).exp();
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    // sup over a fine grid plus both sides of every jump
    let mut d = 0.0f64;
    let ecdf = |x: f64, strict: bool| {
        sorted.iter().filter(|&&s| if strict { s < x } else { s <= x }).count() as f64 / sorted.len() as f64
    };
    for &x in &sorted {
        d = d.max((ecdf(x, false) - cdf(x)).abs()).max((ecdf(x, true) - cdf(x)).abs());
    }
    let got = spectral::ks_statistic(&sample, cdf).unwrap();
    assert!((got - d).abs() < 1e-15);
}

#[test]
fn random_state_purity_matches_exact_mean() {
    // E Tr σ² = (N_A + N_B)/(N_A N_B + 1) for Haar states; here 3 ⊗ 5.
    let dims = [3, 5];
    let draws = 3000;
    let mut sum = 0.0;
    for t in 0..draws {
        let u = haar_unitary(15, RandomStream::new(0xBEE, t)).unwrap();
        let psi: Vec<c64> = (0..15).map(|i| u.get(i, 0)).collect();
        sum += entanglement(&psi, &dims, &[1]).unwrap().1;
    }
    let mean = sum / draws as f64;
    assert!((mean - 8.0 / 16.0).abs() < 0.01, "{mean}");
    assert!((entropy::mean_purity(3, 5) - 0.5).abs() < 1e-15);
}

#[test]
fn identity_singletons_leave_particles_untouched() {
    let layer = Layer::from_indices("x", &[vec![1, 2], vec![3]])
        .unwrap()
        .with_singletons(unigraph::graph::SingletonMode::Identity);
    let g = InteractionGraph::new(ParticleSystem::new(vec![2, 2, 3]).unwrap(), vec![layer]).unwrap();
    let u = evolution_unitary(&g, RandomStream::new(4, 4)).unwrap();
    // entries that change particle 3's index vanish
    for i in 0..12 {
        for j in 0..12 {
            if i % 3 != j % 3 {
                assert_eq!(u.get(i, j), c64::new(0.0, 0.0));
            }
        }
    }
}
