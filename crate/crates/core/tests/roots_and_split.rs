use clifft_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig(p: usize, q: usize) -> AlgebraSignature {
    AlgebraSignature::new(p, q).unwrap()
}

/// Blades squaring to -1; all of them satisfy `~B = -B`.
fn negative_square_blades(s: AlgebraSignature) -> Vec<RootOfMinusOne> {
    (1..s.blade_count())
        .filter_map(|mask| {
            let b = Multivector::blade(s, BladeIndex(mask), 1.0).unwrap();
            verify_root(&b, 1e-14).ok()
        })
        .collect()
}

#[test]
fn blade_roots_are_reverse_antisymmetric() {
    for (p, q) in [(2, 0), (1, 1), (0, 2), (3, 0), (1, 3), (2, 2)] {
        let roots = negative_square_blades(sig(p, q));
        assert!(!roots.is_empty());
        assert!(roots.iter().all(|r| r.is_reverse_antisymmetric(0.0)));
    }
}

#[test]
fn manifold_slices_lie_on_their_quadrics() {
    for (p, q) in [(2, 0), (1, 1), (0, 2)] {
        let s = sig(p, q);
        let (e1, e2) = (s.square(1), s.square(2));
        for i in 0..21 {
            for j in 0..21 {
                let (b1, b2) = (-3.0 + 0.3 * i as f64, -3.0 + 0.3 * j as f64);
                let beta_sq = b1 * b1 * e2 + b2 * b2 * e1 + e1 * e2;
                match root_family_n2(s, b1, b2, Branch::Negative) {
                    Ok(root) => {
                        assert!(beta_sq >= 0.0);
                        let c = root.value().coeffs();
                        assert_eq!((c[1], c[2]), (b1, b2));
                        assert!((c[3] * c[3] - beta_sq).abs() <= 1e-12 * beta_sq.max(1.0));
                        assert!(c[3] <= 0.0);
                    }
                    Err(Error::OffManifold { .. }) => assert!(beta_sq < 0.0),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_parts_are_orthogonal_for_blade_roots(
        (p, q) in prop::sample::select(vec![(0usize, 2usize), (2, 0), (3, 0), (0, 3), (1, 2), (2, 2), (1, 3)]),
        pick in any::<(usize, usize)>(),
        seed in any::<u64>(),
    ) {
        let s = sig(p, q);
        let roots = negative_square_blades(s);
        let f = &roots[pick.0 % roots.len()];
        let g = &roots[pick.1 % roots.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Multivector::random(s, &mut rng);
        let y = Multivector::random(s, &mut rng);
        let (xs, ys) = (split_pm(&x, f, g).unwrap(), split_pm(&y, f, g).unwrap());
        let a = (&xs.plus * &ys.minus.principal_reverse()).scalar_part();
        let b = (&xs.minus * &ys.plus.principal_reverse()).scalar_part();
        prop_assert!(a.abs() <= 1e-10 && b.abs() <= 1e-10);
    }

    #[test]
    fn conjugation_keeps_roots(
        (p, q) in prop::sample::select(vec![(0usize, 1usize), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3), (4, 0), (2, 2), (0, 4)]),
        seed in any::<u64>(),
    ) {
        let s = sig(p, q);
        let root = sample_root(s, seed, None).unwrap();
        prop_assert!(root.residual() <= 1e-10);
        prop_assert!(root.value().scalar_part().abs() <= 1e-10);
        let again = conjugate_root(&root, &Multivector::random(s, &mut ChaCha8Rng::seed_from_u64(seed)));
        if let Ok(again) = again {
            prop_assert!(root_residual(again.value()) <= 1e-8 * again.value().norm().powi(2).max(1.0));
        }
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let s = sig(1, 2);
    assert_eq!(
        sample_root(s, 42, None).unwrap(),
        sample_root(s, 42, None).unwrap()
    );
    assert_ne!(
        sample_root(s, 42, None).unwrap(),
        sample_root(s, 43, None).unwrap()
    );
    assert!(matches!(
        sample_root(sig(1, 0), 1, None),
        Err(Error::NoCanonicalRoot { .. })
    ));
}
