//! Verification suites for `icehive verify`.

use anyhow::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use icehive::hive::{certificate_holds, strip_verify};
use icehive::semiinv::{cardinality_check, exchange_identity_check, flip_compatibility_check, weights_form_configuration};
use icehive::surface::{all_triangulations, alternating_triangulation, flip_verify, glued_vertex_count, twist_verify, DiskTriangulation};
use icehive::{build_hive, IceQuiver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Strip,
    Flip,
    Twist,
    Exchange,
    FlipCompat,
    Weights,
    Cardinality,
    Rank,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Strip => "strip",
            Suite::Flip => "flip",
            Suite::Twist => "twist",
            Suite::Exchange => "exchange",
            Suite::FlipCompat => "flip-compat",
            Suite::Weights => "weights",
            Suite::Cardinality => "cardinality",
            Suite::Rank => "rank",
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    cases: Vec<(String, bool)>,
}

impl Report {
    fn case(&mut self, name: impl Into<String>, ok: bool) {
        self.cases.push((name.into(), ok));
    }

    pub fn ok(&self) -> bool {
        self.cases.iter().all(|c| c.1)
    }

    pub fn to_json(&self, suite: Suite, seed: u64) -> Value {
        let failed: Vec<&str> = self.cases.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        json!({
            "suite": suite.name(),
            "seed": seed,
            "cases": self.cases.len(),
            "failed": failed,
            "ok": self.ok(),
        })
    }
}

fn square() -> DiskTriangulation {
    DiskTriangulation::new(4, vec![[1, 2, 4], [2, 3, 4]]).expect("valid square")
}

fn tri_name(t: &DiskTriangulation) -> String {
    format!("{:?}", t.triangles())
}

pub fn run(suite: Suite, seed: u64) -> Result<Report> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = Report::default();
    match suite {
        Suite::Strip => {
            for n in 1..=8 {
                for zero_frozen in [false, true] {
                    r.case(format!("n={n} zero_frozen={zero_frozen}"), strip_verify(n, zero_frozen)?.ok());
                }
            }
        }
        Suite::Flip => {
            for l in 2..=4 {
                let rep = flip_verify(&square(), (2, 4), l, l == 3, 10_000)?;
                r.case(format!("square l={l}"), rep.matches && rep.reversible && rep.all_orders_match);
            }
            for t in all_triangulations(5) {
                for (d, _, _) in t.diagonals() {
                    for l in 2..=3 {
                        let rep = flip_verify(&t, d, l, false, 1)?;
                        r.case(format!("{} d={d:?} l={l}", tri_name(&t)), rep.matches && rep.reversible);
                    }
                }
            }
        }
        Suite::Twist => {
            let mut cases = all_triangulations(5);
            cases.push(alternating_triangulation(6)?);
            for t in &cases {
                for x in 0..t.triangles().len() {
                    let tri = t.triangles()[x];
                    for l in 2..=4 {
                        let rep = twist_verify(t, x, (tri[1], tri[2]), l)?;
                        r.case(format!("{} triangle={x} l={l}", tri_name(t)), rep.matches);
                    }
                }
            }
        }
        Suite::Exchange => {
            for l in 2..=5 {
                r.case(format!("l={l}"), exchange_identity_check(l, 50, &mut rng)?);
            }
        }
        Suite::FlipCompat => {
            for l in 2..=3 {
                let rep = flip_compatibility_check(&square(), (2, 4), l, 20, &mut rng)?;
                r.case(format!("square l={l}"), rep.ok());
            }
        }
        Suite::Weights => {
            for m in 3..=6 {
                for t in all_triangulations(m) {
                    for l in 2..=5 {
                        r.case(format!("{} l={l}", tri_name(&t)), weights_form_configuration(&t, l)?);
                    }
                }
            }
        }
        Suite::Cardinality => {
            for m in 3..=7 {
                for t in all_triangulations(m) {
                    for l in 2..=5 {
                        let formula = ((l - 1) * (l + 1) * (m - 2) + (l - 1) * m) as u64 / 2;
                        r.case(format!("{} l={l}", tri_name(&t)), cardinality_check(&t, l)? && glued_vertex_count(m, l) == formula);
                    }
                }
            }
        }
        Suite::Rank => {
            for l in 2..=8 {
                let h = build_hive(l)?;
                r.case(format!("hive l={l}"), certificate_holds(&h) && h.quiver.has_full_rank());
            }
            for m in 3..=6 {
                for t in all_triangulations(m) {
                    for l in 2..=4 {
                        let g = icehive::glue(&t, l)?;
                        r.case(format!("glued {} l={l}", tri_name(&t)), g.quiver.has_full_rank());
                    }
                }
            }
            for trial in 0..50 {
                let q = random_quiver(&mut rng);
                let muts = q.mutable_vertices();
                if muts.is_empty() {
                    continue;
                }
                let r0 = q.b_rank();
                let mut cur = q.clone();
                let mut same = true;
                for _ in 0..30 {
                    cur = cur.mutate(muts[rng.gen_range(0..muts.len())])?;
                    same &= cur.b_rank() == r0;
                }
                r.case(format!("random quiver {trial}"), same);
            }
        }
    }
    Ok(r)
}

fn random_quiver(rng: &mut StdRng) -> IceQuiver {
    let n = rng.gen_range(2..=8);
    let frozen: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    let mut arrows = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let m = rng.gen_range(-1i64..=1);
            if m != 0 {
                arrows.push((u, v, m));
            }
        }
    }
    IceQuiver::from_arrows(n, &frozen, &arrows)
}
