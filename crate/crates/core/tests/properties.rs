use proptest::prelude::*;
use rspin_core::bracket::{dr1_selection, genus0_selection, spin_divisibility};
use rspin_core::dr1::{b_value, closed_form};
use rspin_core::genus0::four_point;
use rspin_core::rational::zero;
use rspin_core::{Dr1Bracket, Genus0Bracket};

fn spin_and_len(max_n: usize) -> impl Strategy<Value = (i64, usize)> {
    (2i64..=12, 3usize..=max_n)
}

fn dr1_input() -> impl Strategy<Value = (i64, Vec<i64>, Vec<i64>)> {
    (2i64..=12, 1usize..=5).prop_flat_map(|(r, n)| {
        (Just(r), prop::collection::vec(-6i64..=6, n), prop::collection::vec(0..r, n + 1)).prop_map(
            |(r, mut k, a)| {
                if k.iter().all(|&x| x == 0) {
                    k[0] = 1;
                }
                k.push(-k.iter().sum::<i64>());
                (r, k, a)
            },
        )
    })
}

proptest! {
    #[test]
    fn genus0_key_ignores_order(
        (r, a) in spin_and_len(7).prop_flat_map(|(r, n)| (Just(r), prop::collection::vec(0..r, n))),
        seed in any::<u64>(),
    ) {
        let mut shuffled = a.clone();
        let len = shuffled.len();
        shuffled.rotate_left(seed as usize % len);
        shuffled.swap(0, (seed >> 8) as usize % len);
        let key = Genus0Bracket::new(r, &a).unwrap().key();
        prop_assert_eq!(&Genus0Bracket::new(r, &shuffled).unwrap().key(), &key);
    }

    #[test]
    fn dr1_key_ignores_order_and_sign((r, k, a) in dr1_input(), seed in any::<u64>()) {
        let b = Dr1Bracket::new(r, &k, &a).unwrap();
        let mut pairs: Vec<(i64, i64)> = k.iter().copied().zip(a.iter().copied()).collect();
        let len = pairs.len();
        pairs.rotate_left(seed as usize % len);
        let (pk, pa): (Vec<i64>, Vec<i64>) = pairs.into_iter().unzip();
        prop_assert_eq!(Dr1Bracket::new(r, &pk, &pa).unwrap().key(), b.key());
        let neg: Vec<i64> = k.iter().map(|x| -x).collect();
        let flipped = Dr1Bracket::new(r, &neg, &a).unwrap();
        prop_assert_eq!(flipped.key(), b.key());
        prop_assert_eq!(closed_form(&flipped).value, closed_form(&b).value);
    }

    #[test]
    fn canonical_key_is_idempotent((r, k, a) in dr1_input()) {
        let b = Dr1Bracket::new(r, &k, &a).unwrap();
        let again = Dr1Bracket::new(r, &b.k(), &b.a().iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(again.key(), b.key());
    }

    #[test]
    fn genus0_selection_implies_divisibility(
        (r, a) in spin_and_len(8).prop_flat_map(|(r, n)| (Just(r), prop::collection::vec(0..r, n))),
    ) {
        if genus0_selection(r as u32, &a).unwrap() {
            let a: Vec<u32> = a.iter().map(|&x| x as u32).collect();
            prop_assert!(spin_divisibility(r as u32, 0, &a));
        }
    }

    #[test]
    fn dr1_selection_implies_divisibility(
        (r, a) in (2i64..=12, 1usize..=8).prop_flat_map(|(r, n)| (Just(r), prop::collection::vec(0..r, n))),
    ) {
        if dr1_selection(r as u32, &a).unwrap() {
            let a: Vec<u32> = a.iter().map(|&x| x as u32).collect();
            prop_assert!(spin_divisibility(r as u32, 1, &a));
        }
    }

    #[test]
    fn four_point_is_symmetric(r in 3i64..=12, a in prop::collection::vec(0i64..12, 4), seed in any::<u64>()) {
        let a: Vec<i64> = a.iter().map(|x| x % r).collect();
        let mut b = a.clone();
        b.rotate_left(seed as usize % 4);
        b.swap(0, (seed >> 8) as usize % 4);
        let x = four_point(r, [a[0], a[1], a[2], a[3]]).unwrap();
        let y = four_point(r, [b[0], b[1], b[2], b[3]]).unwrap();
        prop_assert_eq!(x.value, y.value);
        prop_assert_eq!(x.status, y.status);
    }

    #[test]
    fn closed_form_vanishes_with_unit_k_profile((r, k, a) in dr1_input()) {
        // sum k_i^2 = 2 means k = (1, -1, 0, ...), whose coefficient is 0
        let b = Dr1Bracket::new(r, &k, &a).unwrap();
        if b.k_square_sum() == 2 {
            prop_assert_eq!(closed_form(&b).value, zero());
        }
    }

    #[test]
    fn closed_form_is_b_multiple((r, k, a) in dr1_input()) {
        let b = Dr1Bracket::new(r, &k, &a).unwrap();
        let bv = b_value(r, &a).unwrap().value;
        let coeff = rspin_core::Rational::new(
            (b.k_square_sum() - 2).into(),
            2.into(),
        );
        prop_assert_eq!(closed_form(&b).value, coeff * bv);
    }
}
