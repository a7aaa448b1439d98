//! Randomised invariants of the arithmetic layers.

mod common;

use gonality::arith::{make_level, primes_up_to};
use gonality::classnum::class_number_of;
use gonality::hecke::count_points;
use gonality::modgenus::{al_fixed_points, genus_pair_quotient, genus_single_quotient, genus_x0};
use gonality::rules::{gonality_lb_from_count, ogg_lp};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn class_number_matches_analytic(k in 1i64..2500) {
        let disc = if k % 2 == 0 { -4 * (k / 2) } else { -(4 * ((k + 1) / 2) - 1) };
        prop_assume!(disc < -2);
        prop_assert_eq!(class_number_of(disc).unwrap(), common::analytic_class_number(disc));
    }

    #[test]
    fn quotient_genus_follows_from_fixed_points(n in 6u64..600) {
        let level = make_level(n).unwrap();
        let g = genus_x0(&level).genus;
        for d in level.hall_divisors().into_iter().filter(|&d| d > 1) {
            let nu = al_fixed_points(&level, d).unwrap();
            prop_assert_eq!((2 * g + 2 - nu) % 4, 0);
            prop_assert_eq!(genus_single_quotient(&level, d).unwrap().genus, (2 * g + 2 - nu) / 4);
        }
    }

    #[test]
    fn pair_genus_satisfies_accola(n in 6u64..600, i in 0usize..64, j in 0usize..64) {
        let level = make_level(n).unwrap();
        let hall: Vec<u64> = level.hall_divisors().into_iter().filter(|&d| d > 1).collect();
        prop_assume!(hall.len() >= 3);
        let (a, b) = (hall[i % hall.len()], hall[j % hall.len()]);
        prop_assume!(a != b);
        let c = a * b / gonality::arith::gcd(a, b).pow(2);
        let single = |d| genus_single_quotient(&level, d).unwrap().genus;
        let gp = genus_pair_quotient(&level, a, b).unwrap().genus;
        prop_assert_eq!(genus_x0(&level).genus + 2 * gp, single(a) + single(b) + single(c));
    }

    #[test]
    fn counts_respect_weil_and_ogg(n in 2u64..400, pi in 0usize..6) {
        let level = make_level(n).unwrap();
        let p = primes_up_to(13)[pi];
        prop_assume!(n % p != 0);
        let g = genus_x0(&level).genus;
        let c1 = count_points(&level, p, 1).unwrap();
        let c2 = count_points(&level, p, 2).unwrap();
        prop_assert!(c1.satisfies_weil(g) && c2.satisfies_weil(g));
        // points over F_p stay points over F_{p^2}
        prop_assert!(c2.count >= c1.count);
        prop_assert!(num_rational::Ratio::from_integer(c2.count) >= ogg_lp(&level, p).unwrap());
    }

    #[test]
    fn count_bound_is_tight(count in 0u64..10_000, q in 2u64..500) {
        let lb = gonality_lb_from_count(count, q) as u64;
        // no map of degree lb - 1, and lb itself is not excluded
        prop_assert!(lb == 1 || count > (lb - 1) * (q + 1));
        prop_assert!(count <= lb * (q + 1));
    }
}
