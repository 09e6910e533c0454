//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use icehive::hive::{build_hive, certificate_holds, hive_strip, strip_sequence};
use icehive::label::Label;
use icehive::laurent::LaurentPoly;
use icehive::optimizer::{disk_pipeline, DEFAULT_MAX_DEPTH};
use icehive::quiver::IceQuiver;
use icehive::seed::Seed;
use icehive::semiinv::{
    cardinality_check, exchange_identity_check, flip_compatibility_check, semiinvariance_check, weights_form_configuration,
    FlagRep, GroupElement,
};
use icehive::surface::{
    all_triangulations, alternating_triangulation, flip_verify, twist, twist_composition, twist_verify, DiskTriangulation,
};
use icehive::weight::solve_balanced_extension;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Outcome {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))
}

fn random_quiver(rng: &mut StdRng, n: usize, max_mult: i64) -> IceQuiver {
    let frozen: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    let mut arrows = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let m = rng.gen_range(-max_mult..=max_mult);
            if m != 0 {
                arrows.push((u, v, m));
            }
        }
    }
    IceQuiver::from_arrows(n, &frozen, &arrows)
}

fn random_tree_quiver(rng: &mut StdRng, n: usize) -> IceQuiver {
    let arrows: Vec<(usize, usize, i64)> = (1..n)
        .map(|v| {
            let p = rng.gen_range(0..v);
            if rng.gen_bool(0.5) { (p, v, 1) } else { (v, p, 1) }
        })
        .collect();
    let frozen: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.2)).collect();
    IceQuiver::from_arrows(n, &frozen, &arrows)
}

/// Rank modulo a prime, independent of the library's elimination.
fn rank_mod_p(m: &[Vec<BigInt>]) -> usize {
    const P: i64 = 1_000_000_007;
    let mut a: Vec<Vec<i64>> = m
        .iter()
        .map(|r| r.iter().map(|x| ((x % BigInt::from(P)) + BigInt::from(P)) % BigInt::from(P)).map(|x| i64::try_from(x).unwrap()).collect())
        .collect();
    let pow = |mut b: i64, mut e: i64| {
        let mut r = 1i64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    let (rows, cols) = (a.len(), a.first().map_or(0, Vec::len));
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        let inv = pow(a[rank][c], P - 2);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * inv % P;
                for k in 0..cols {
                    a[r][k] = ((a[r][k] - f * a[rank][k]) % P + P) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    for trial in 0..200 {
        let n = rng.gen_range(2..=8);
        let q = random_quiver(&mut rng, n, 1);
        for u in q.mutable_vertices() {
            let back = q.mutate(u).and_then(|p| p.mutate(u)).map_err(|e| e.to_string())?;
            ensure(back == q, || format!("trial {trial}: mutating twice at {u} is not the identity"))?;
        }
        let muts = q.mutable_vertices();
        if muts.is_empty() {
            continue;
        }
        let r0 = q.b_rank();
        let mut cur = q.clone();
        for _ in 0..50 {
            let u = muts[rng.gen_range(0..muts.len())];
            cur = cur.mutate(u).map_err(|e| e.to_string())?;
            ensure(cur.b_rank() == r0, || format!("trial {trial}: rank changed"))?;
        }
        ensure(rank_mod_p(&cur.b_matrix()) <= r0, || format!("trial {trial}: modular rank exceeds rank"))?;
    }
    within(start, Duration::from_secs(10))
}

/// Every sequence of length <= `depth`: children skip an immediate repeat,
/// and the repeat itself is checked to return the parent seed exactly.
fn all_sequences(s: &Seed, depth: usize, last: Option<usize>) -> Outcome {
    if depth == 0 {
        return Ok(());
    }
    for u in s.quiver().mutable_vertices() {
        if Some(u) == last {
            continue;
        }
        let child = s.mutate(u).map_err(|e| format!("division failed: {e}"))?;
        let back = child.mutate(u).map_err(|e| format!("division failed: {e}"))?;
        ensure(&back == s, || "seed mutation is not involutive".into())?;
        all_sequences(&child, depth - 1, Some(u))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let seeds = [
        IceQuiver::from_arrows(2, &[], &[(0, 1, 1)]),
        IceQuiver::from_arrows(2, &[], &[(0, 1, 2)]),
        IceQuiver::from_arrows(3, &[2], &[(0, 1, 1), (1, 2, 1)]),
        IceQuiver::from_arrows(3, &[], &[(0, 1, 1), (1, 2, 1)]),
        IceQuiver::from_arrows(3, &[], &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]),
        IceQuiver::from_arrows(4, &[3], &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 0, 1)]),
    ];
    for q in &seeds {
        all_sequences(&Seed::initial(q.clone()), 8, None)?;
    }
    // Random oriented trees keep the mutation class tame, so every sequence
    // of length <= 8 stays within reach of exact arithmetic.
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..20 {
        let q = random_tree_quiver(&mut rng, 5);
        all_sequences(&Seed::initial(q), 8, None)?;
    }

    // pentagon: 1 -> 2, sequence 1,2,1,2,1
    let n = 2;
    let x = |e: &[i64]| LaurentPoly::x_pow(e);
    let expect = [
        &x(&[-1, 0]) + &x(&[-1, 1]),
        &(&x(&[-1, -1]) + &x(&[0, -1])) + &x(&[-1, 0]),
        &x(&[0, -1]) + &x(&[1, -1]),
    ];
    let mut s = Seed::initial(IceQuiver::from_arrows(2, &[], &[(0, 1, 1)]));
    let mut seen: BTreeSet<String> = s.vars().iter().map(|p| p.to_string()).collect();
    let mut produced = Vec::new();
    for (step, u) in [0usize, 1, 0, 1, 0].into_iter().enumerate() {
        s = s.mutate(u).map_err(|e| e.to_string())?;
        seen.insert(s.var(u).to_string());
        if step < 3 {
            produced.push(s.var(u).clone());
        }
    }
    ensure(produced == expect, || format!("pentagon variables differ: {produced:?}"))?;
    ensure(s.vars() == [LaurentPoly::var(n, 1), LaurentPoly::var(n, 0)], || "period 5 does not swap the initial cluster".into())?;
    ensure(s.quiver() == &IceQuiver::from_arrows(2, &[], &[(1, 0, 1)]), || "quiver after period 5 is not the swap".into())?;
    ensure(seen.len() == 5, || format!("{} distinct cluster variables", seen.len()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for l in 2..=8u64 {
        let h = build_hive(l as u32).map_err(|e| e.to_string())?;
        let q = &h.quiver;
        let mutable = q.mutable_vertices().len() as u64;
        ensure(q.len() as u64 == (l - 1) * (l + 4) / 2, || format!("l={l}: vertex count"))?;
        ensure(mutable == (l - 1) * (l - 2) / 2, || format!("l={l}: mutable count"))?;
        ensure(q.frozen_vertices().len() as u64 == 3 * (l - 1), || format!("l={l}: frozen count"))?;
        ensure(q.arrow_count() == BigInt::from(3 * l * (l - 1) / 2), || format!("l={l}: arrow count"))?;
        ensure(certificate_holds(&h), || format!("l={l}: triangular certificate"))?;
        ensure(q.has_full_rank() && rank_mod_p(&q.b_matrix()) == mutable as usize, || format!("l={l}: rank"))?;
    }
    within(start, Duration::from_secs(5))
}

/// The strip after `(n, ..., 1)` built from its arrow list.
fn strip_oracle(n: usize, zero_frozen: bool) -> IceQuiver {
    let base = hive_strip(n, zero_frozen);
    let bot = |s: usize| n + s;
    let mut arrows = vec![(0, 1, 1)];
    arrows.extend((1..=n).map(|r| (r, bot(r), 1)));
    arrows.extend((1..n).map(|s| (bot(s), s + 1, 1)));
    arrows.extend((2..=n).map(|r| (r, r - 1, 1)));
    if zero_frozen {
        arrows.push((0, bot(1), 1));
    }
    let frozen: Vec<usize> = (0..base.len()).filter(|&v| base.is_frozen(v)).collect();
    let shape = IceQuiver::from_arrows(base.len(), &frozen, &arrows);
    let mut out = IceQuiver::new(base.labels().to_vec(), base.frozen_flags().to_vec()).unwrap();
    for (u, v, m) in shape.arrows() {
        out.add_arrows(u, v, &m);
    }
    out
}

fn criterion_4() -> Outcome {
    for n in 1..=8 {
        for zero_frozen in [false, true] {
            let q = hive_strip(n, zero_frozen);
            let after = q.mutate_seq(&strip_sequence(n)).map_err(|e| e.to_string())?;
            ensure(after.is_sink_or_source(0), || format!("n={n}: vertex 0 not optimized"))?;
            ensure(after == strip_oracle(n, zero_frozen), || format!("n={n}: quiver differs from the displayed one"))?;
            let back: Vec<usize> = (0..n).collect();
            let restored = after.delete_vertices(&[0]).and_then(|d| d.mutate_seq(&back)).map_err(|e| e.to_string())?;
            ensure(restored == q.delete_vertices(&[0]).unwrap(), || format!("n={n}: restoration"))?;
        }
    }
    Ok(())
}

fn square() -> DiskTriangulation {
    DiskTriangulation::new(4, vec![[1, 2, 4], [2, 3, 4]]).unwrap()
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    for l in 2..=4 {
        let r = flip_verify(&square(), (2, 4), l, l == 3, 10_000).map_err(|e| e.to_string())?;
        ensure(r.matches, || format!("l={l}: flipped quiver differs"))?;
        ensure(r.reversible, || format!("l={l}: reversed sequence does not return"))?;
        if l == 3 {
            ensure(r.all_orders_match && r.orders_tried > 1, || "l=3: intra-layer order matters".into())?;
        }
    }
    within(start, Duration::from_secs(30))
}

fn criterion_6() -> Outcome {
    let listing: Vec<Vec<[u32; 3]>> = vec![
        vec![[3, 1, 1]],
        vec![[2, 1, 2], [2, 2, 1], [3, 1, 1]],
        vec![[1, 1, 3], [1, 2, 2], [1, 3, 1], [2, 1, 2], [2, 2, 1], [3, 1, 1]],
    ];
    ensure(twist_composition(5) == listing, || "the l=5 listing differs".into())?;
    let mut cases = all_triangulations(5);
    cases.extend(all_triangulations(6));
    cases.extend((3..=7).map(|m| alternating_triangulation(m).unwrap()));
    for t in &cases {
        for x in 0..t.triangles().len() {
            let tri = t.triangles()[x];
            for s in 0..3 {
                let e = (tri[s], tri[(s + 1) % 3]);
                let once = twist(t, x, e).map_err(|e| e.to_string())?;
                let twice = twist(&once.triangulation, x, once.edge_after()).map_err(|e| e.to_string())?;
                ensure(twice.triangulation.equivalent(t), || format!("twist twice differs for {:?}", t.triangles()))?;
                for l in 2..=4 {
                    let r = twist_verify(t, x, e, l).map_err(|e| e.to_string())?;
                    ensure(r.matches, || format!("twist verification l={l} {:?} at {x} {e:?}", t.triangles()))?;
                }
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    for (m, l) in [(4, 3), (5, 3), (4, 4)] {
        let r = disk_pipeline(m, l, DEFAULT_MAX_DEPTH).map_err(|e| e.to_string())?;
        ensure(r.initial_full_rank, || format!("(m,l)=({m},{l}): initial rank"))?;
        ensure(r.steps.iter().all(|s| s.full_rank), || format!("(m,l)=({m},{l}): rank lost"))?;
        ensure(r.terminal_matches, || format!("(m,l)=({m},{l}): terminal quiver"))?;
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    for l in 2..=5u32 {
        let mut rep = FlagRep::random(l, 3, &mut rng);
        rep.set_standard(2, false);
        rep.set_standard(3, true);
        for j in 1..l {
            let v = rep.value([1, 2, 3], [0, j, l - j]).map_err(|e| e.to_string())?;
            ensure(v.is_one(), || format!("s_(0,{j},{}) = {v}", l - j))?;
        }
        ensure(exchange_identity_check(l, 50, &mut rng).map_err(|e| e.to_string())?, || format!("exchange identity l={l}"))?;
    }
    for _ in 0..20 {
        let rep = FlagRep::random(3, 4, &mut rng);
        let g = GroupElement::random_unimodular(3, 4, &mut rng);
        let t = [rng.gen_range(1..=2), 3, 4];
        let i = rng.gen_range(0..=2);
        let coords = [i, 3 - i - (i < 2) as u32, (i < 2) as u32];
        let ok = semiinvariance_check(&rep, &g, t, coords).map_err(|e| e.to_string())?;
        let same = rep.act(&g).and_then(|r| r.value(t, coords)).map_err(|e| e.to_string())? == rep.value(t, coords).unwrap();
        ensure(ok && same, || "SL invariance".into())?;
    }
    for l in 2..=3 {
        let r = flip_compatibility_check(&square(), (2, 4), l, 20, &mut rng).map_err(|e| e.to_string())?;
        ensure(r.all_unit && r.constant, || format!("flip compatibility l={l}"))?;
        ensure(r.weights_ok, || format!("flip weights l={l}"))?;
    }
    for m in 3..=6 {
        for t in all_triangulations(m) {
            for l in 2..=5 {
                ensure(weights_form_configuration(&t, l).map_err(|e| e.to_string())?, || format!("B sigma != 0 at m={m} l={l}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    for m in 3..=7u32 {
        for t in all_triangulations(m) {
            let n = t.triangles().len();
            for mask in [0u32, 0b10101, (1 << n) - 1] {
                let tris = t.triangles().iter().enumerate().map(|(x, &tri)| {
                    let mut tri = tri;
                    if mask >> x & 1 == 1 {
                        tri.reverse();
                    }
                    tri
                });
                let oriented = DiskTriangulation::new(m, tris.collect()).unwrap();
                for l in 2..=5u32 {
                    ensure(cardinality_check(&oriented, l).map_err(|e| e.to_string())?, || format!("m={m} l={l}"))?;
                    let (mm, ll) = (m as u64, l as u64);
                    let count = icehive::surface::glue(&oriented, l).unwrap().quiver.len() as u64;
                    ensure(2 * count == (ll - 1) * (ll + 1) * (mm - 2) + (ll - 1) * mm, || format!("formula m={m} l={l}"))?;
                }
            }
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(10);
    let hive = build_hive(3).unwrap().quiver;
    let edge: Vec<usize> = (0..hive.len()).filter(|&v| hive.label(v).as_hive().unwrap()[1] == 0).collect();
    let glued = icehive::surface::glue(&square(), 3).unwrap().quiver;
    let on_34 = |l: &Label| l.as_points().is_some_and(|p| p.len() == 2 && p.contains_key(&3) && p.contains_key(&4));
    let boundary: Vec<usize> = (0..glued.len()).filter(|&v| on_34(glued.label(v))).collect();
    for (bar, e) in [(hive, edge), (glued, boundary)] {
        let delta: Vec<usize> = (0..bar.len()).filter(|v| !e.contains(v)).collect();
        let ext = solve_balanced_extension(&bar, &delta, &e).map_err(|e| e.to_string())?;
        ensure(ext.satisfies_equation(&bar), || "B Theta != -B_e".into())?;
        ensure(ext.verify_balanced_product(&bar).map_err(|e| e.to_string())?, || "balanced product identity".into())?;
        ensure(ext.y_vars_agree(&bar), || "y-variables differ".into())?;
        for _ in 0..5 {
            let g: Vec<i64> = delta.iter().map(|_| rng.gen_range(-3..=3)).collect();
            ensure(ext.monomial_identity(bar.len(), &g), || "x^g identity".into())?;
        }
        let muts: Vec<usize> = bar.mutable_vertices();
        for _ in 0..10 {
            let len = rng.gen_range(0..=3);
            let seq: Vec<usize> = (0..len).map(|_| muts[rng.gen_range(0..muts.len())]).collect();
            ensure(ext.verify_commutation(&bar, &seq).map_err(|e| e.to_string())?, || format!("commutation along {seq:?}"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("mutation involution and rank invariance", criterion_1),
        ("Laurentness and pentagon periodicity", criterion_2),
        ("hive counts and full-rank certificate", criterion_3),
        ("strip optimization and restoration", criterion_4),
        ("flip correspondence", criterion_5),
        ("twist listing, involution and verification", criterion_6),
        ("disk deletion pipeline", criterion_7),
        ("semi-invariant identities", criterion_8),
        ("cluster cardinality", criterion_9),
        ("balanced extensions", criterion_10),
    ];
    // Optional criterion numbers on the command line select a subset.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let t = start.elapsed();
        match outcome {
            Ok(()) => println!("criterion {:>2} PASS  {name} ({t:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
