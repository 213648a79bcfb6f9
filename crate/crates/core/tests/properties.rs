use std::sync::Arc;

use proptest::prelude::*;

use pblocks_core::blocks::{determinant, positive_definite, tau_from_cartan, Fraction};
use pblocks_core::field::Field;
use pblocks_core::group::Group;
use pblocks_core::mat::Mat;
use pblocks_core::perm::Perm;

fn fields() -> impl Strategy<Value = Arc<Field>> {
    prop::sample::select(vec![(2u32, 1u32), (3, 1), (7, 1), (2, 4), (3, 2), (5, 2), (2, 8)])
        .prop_map(|(p, m)| Arc::new(Field::new(p, m).unwrap()))
}

fn field_and_codes(n: usize) -> impl Strategy<Value = (Arc<Field>, Vec<u32>)> {
    fields().prop_flat_map(move |f| {
        let q = f.order();
        (Just(f), prop::collection::vec(0..q, n))
    })
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Perm::from_images(&v).unwrap())
}

proptest! {
    #[test]
    fn field_axioms((f, c) in field_and_codes(3)) {
        let [a, b, x] = [0, 1, 2].map(|i| f.from_encoding(c[i]));
        prop_assert_eq!(f.mul(a, f.add(b, x)), f.add(f.mul(a, b), f.mul(a, x)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if let Some(i) = f.inv(a) {
            prop_assert_eq!(f.mul(a, i), f.one());
        } else {
            prop_assert!(a.is_zero());
        }
        prop_assert_eq!(f.encoding(a), c[0]);
    }

    #[test]
    fn frobenius_is_additive((f, c) in field_and_codes(2)) {
        let p = f.characteristic() as u64;
        let [a, b] = [0, 1].map(|i| f.from_encoding(c[i]));
        prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
        prop_assert_eq!(f.pow(a, f.order() as u64), a);
    }

    #[test]
    fn rank_nullity((f, c) in field_and_codes(20)) {
        let m = Mat::from_fn(&f, 4, 5, |i, j| f.from_encoding(c[i * 5 + j]));
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank() + m.nullity(), 5);
        for v in m.kernel() {
            prop_assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn product_matches_naive((f, c) in field_and_codes(18)) {
        let a = Mat::from_fn(&f, 3, 3, |i, j| f.from_encoding(c[i * 3 + j]));
        let b = Mat::from_fn(&f, 3, 3, |i, j| f.from_encoding(c[9 + i * 3 + j]));
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(&ab, &a.mul_naive(&b).unwrap());
        prop_assert_eq!(ab.transpose(), b.transpose().mul(&a.transpose()).unwrap());
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(a.mul(&inv).unwrap(), Mat::identity(&f, 3));
        } else {
            prop_assert!(a.rank() < 3);
        }
    }

    #[test]
    fn perm_composition(a in perm(7), b in perm(7), x in 0usize..7) {
        prop_assert_eq!(a.mul(&b).apply(x), b.apply(a.apply(x)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert!(a.pow(a.order() as i64).is_identity());
        prop_assert_eq!(a.conjugate_by(&b).order(), a.order());
    }

    #[test]
    fn generated_group_is_closed(a in perm(6), b in perm(6)) {
        let g = Group::new(6, vec![a.clone(), b.clone()]);
        prop_assert_eq!(720 % g.order(), 0);
        prop_assert!(g.contains(&a.mul(&b).mul(&a.inverse())));
        let en = g.enumeration().unwrap();
        prop_assert_eq!(en.len() as u128, g.order());
    }

    #[test]
    fn tau_is_a_rayleigh_quotient(
        b in prop::collection::vec(0u64..4, 9),
        d in prop::collection::vec(1u64..50, 3),
        k in 1u64..6,
    ) {
        // C = B^T B + I is symmetric positive definite
        let c: Vec<Vec<u64>> = (0..3)
            .map(|i| (0..3).map(|j| (0..3).map(|r| b[r * 3 + i] * b[r * 3 + j]).sum::<u64>() + u64::from(i == j)).collect())
            .collect();
        prop_assert!(positive_definite(&c));
        prop_assert!(determinant(&c) >= 1.into());
        let t = tau_from_cartan(&c, &d).unwrap();
        let scaled: Vec<u64> = d.iter().map(|x| x * k).collect();
        prop_assert_eq!(t, tau_from_cartan(&c, &scaled).unwrap());
        let trace: u64 = (0..3).map(|i| c[i][i]).sum();
        prop_assert!(t >= Fraction::from_integer(1) && t <= Fraction::from_integer(trace));
    }
}
