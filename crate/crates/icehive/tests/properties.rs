use proptest::prelude::*;

use icehive::laurent::LaurentPoly;
use icehive::quiver::IceQuiver;
use icehive::seed::Seed;
use icehive::surface::{all_triangulations, flip, glue};
use icehive::weight::{check_config, mutate_config};

fn quiver_strategy(max_n: usize) -> impl Strategy<Value = IceQuiver> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (proptest::collection::vec(-2i64..=2, pairs), proptest::collection::vec(any::<bool>(), n)).prop_map(move |(mults, frozen)| {
            let mut arrows = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if mults[k] != 0 {
                        arrows.push((u, v, mults[k]));
                    }
                    k += 1;
                }
            }
            let fr: Vec<usize> = (0..n).filter(|&v| frozen[v]).collect();
            IceQuiver::from_arrows(n, &fr, &arrows)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mutation_is_an_involution(q in quiver_strategy(7)) {
        for u in q.mutable_vertices() {
            prop_assert_eq!(q.mutate(u).unwrap().mutate(u).unwrap(), q.clone());
        }
    }

    #[test]
    fn mutation_preserves_rank_and_skewness(q in quiver_strategy(7), seq in proptest::collection::vec(0usize..7, 0..12)) {
        let muts = q.mutable_vertices();
        prop_assume!(!muts.is_empty());
        let r = q.b_rank();
        let mut cur = q.clone();
        for s in seq {
            cur = cur.mutate(muts[s % muts.len()]).unwrap();
            prop_assert!(cur.is_skew());
            prop_assert_eq!(cur.b_rank(), r);
        }
    }

    #[test]
    fn frozen_pairs_never_change(q in quiver_strategy(7), seq in proptest::collection::vec(0usize..7, 0..8)) {
        let muts = q.mutable_vertices();
        prop_assume!(!muts.is_empty());
        let fr = q.frozen_vertices();
        let mut cur = q.clone();
        for s in seq {
            cur = cur.mutate(muts[s % muts.len()]).unwrap();
        }
        for &a in &fr {
            for &b in &fr {
                prop_assert_eq!(cur.entry(a, b), q.entry(a, b));
            }
        }
    }

    #[test]
    fn json_round_trip(q in quiver_strategy(6)) {
        let s = q.to_json_string();
        let back = IceQuiver::from_json_str(&s).unwrap();
        prop_assert_eq!(back.to_json_string(), s);
        prop_assert_eq!(back, q);
    }

    #[test]
    fn seeds_stay_laurent_and_in_sync(q in quiver_strategy(4), seq in proptest::collection::vec(0usize..4, 0..5)) {
        let muts = q.mutable_vertices();
        prop_assume!(!muts.is_empty());
        let mut s = Seed::initial(q.clone());
        let mut plain = q.clone();
        for k in seq {
            let u = muts[k % muts.len()];
            s = s.mutate(u).unwrap();
            plain = plain.mutate(u).unwrap();
            prop_assert_eq!(s.quiver(), &plain);
        }
    }

    #[test]
    fn laurent_ring_laws(a in proptest::collection::vec((-2i64..=2, -2i64..=2, -3i64..=3), 0..4),
                         b in proptest::collection::vec((-2i64..=2, -2i64..=2, -3i64..=3), 1..4)) {
        let mk = |ts: &[(i64, i64, i64)]| ts.iter().fold(LaurentPoly::zero(2), |acc, &(x, y, c)| {
            let t = LaurentPoly::x_pow(&[x, y]).scale(&num_rational::BigRational::from_integer(c.into()));
            &acc + &t
        });
        let (p, q) = (mk(&a), mk(&b));
        prop_assume!(!q.is_zero());
        let prod = &p * &q;
        prop_assert_eq!(prod.div_exact(&q).unwrap(), p.clone());
        prop_assert_eq!(&(&p + &q) - &q, p);
    }

    #[test]
    fn weight_mutation_is_involutive(k in 0usize..5, seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let t = all_triangulations(5)[k].clone();
        let g = glue(&t, 3).unwrap().quiver;
        let sigma = icehive::semiinv::glued_weights(&g, 3, 5);
        prop_assert!(check_config(&g, &sigma).unwrap());
        let muts = g.mutable_vertices();
        let u = muts[rng.gen_range(0..muts.len())];
        let (g1, s1) = mutate_config(&g, &sigma, u).unwrap();
        prop_assert!(check_config(&g1, &s1).unwrap());
        let (g2, s2) = mutate_config(&g1, &s1, u).unwrap();
        prop_assert_eq!(g2, g);
        prop_assert_eq!(s2, sigma);
    }
}

#[test]
fn glued_quivers_have_no_two_cycles_and_full_rank() {
    for m in 3..=6 {
        for t in all_triangulations(m) {
            for l in 2..=5 {
                let q = glue(&t, l).unwrap().quiver;
                assert!(q.is_skew());
                assert!(q.has_full_rank(), "m={m} l={l} {:?}", t.triangles());
            }
        }
    }
}

#[test]
fn flips_are_involutions() {
    for m in 4..=7 {
        for t in all_triangulations(m) {
            for (d, _, _) in t.diagonals() {
                let f = flip(&t, d).unwrap();
                let new_d = f.diagonals().into_iter().map(|(e, _, _)| e).find(|e| !t.diagonals().iter().any(|x| x.0 == *e)).unwrap();
                let back = flip(&f, new_d).unwrap();
                assert!(back.equivalent(&t));
            }
        }
    }
}
