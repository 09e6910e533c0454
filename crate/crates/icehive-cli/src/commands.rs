use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use icehive::hive::drop_edges;
use icehive::laurent::LaurentPoly;
use icehive::optimizer::{disk_pipeline, optimize_vertex};
use icehive::seed::g_vector;
use icehive::surface::{alternating_triangulation, flip, flip_layers, flip_verify, glue, twist, twist_verify, DiskTriangulation};
use icehive::{build_hive, IceQuiver, Label, Seed};

/// What a command prints, and whether it counts as success.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl Output {
    pub fn json(v: &Value) -> Output {
        Output { text: canonical(v), ok: true }
    }

    pub fn failing(mut self, ok: bool) -> Output {
        self.ok = ok;
        self
    }
}

/// Compact JSON. Object keys come out sorted because `serde_json` maps are
/// ordered.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("json values serialize")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A quiver file holds either a quiver or a seed object with a `quiver` key.
pub fn read_quiver(path: &Path) -> Result<IceQuiver> {
    let v = read_json(path)?;
    let q = v.get("quiver").unwrap_or(&v);
    Ok(IceQuiver::from_json(q)?)
}

pub fn read_triangulation(path: &Path) -> Result<DiskTriangulation> {
    Ok(DiskTriangulation::from_json(&read_json(path)?)?)
}

/// `--triangulation FILE` or `--zigzag M`.
pub fn triangulation_arg(file: Option<&Path>, zigzag: Option<u32>) -> Result<DiskTriangulation> {
    match (file, zigzag) {
        (Some(f), None) => read_triangulation(f),
        (None, Some(m)) => Ok(alternating_triangulation(m)?),
        _ => bail!("give exactly one of --triangulation and --zigzag"),
    }
}

/// Split on commas that are not inside `(...)` or `{...}`.
pub fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            _ => {}
        }
        if ch == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Vertex ids, or labels with `by_label`.
pub fn parse_vertices(q: &IceQuiver, s: &str, by_label: bool) -> Result<Vec<usize>> {
    split_top_level(s)
        .into_iter()
        .map(|tok| {
            if by_label {
                let lab: Label = tok.parse()?;
                Ok(q.require(&lab)?)
            } else {
                let v: usize = tok.parse().map_err(|_| anyhow!("{tok:?} is not a vertex id (use --by-label for labels)"))?;
                if v >= q.len() {
                    bail!("unknown vertex {v}");
                }
                Ok(v)
            }
        })
        .collect()
}

pub fn parse_pair(s: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = s.split(|c| c == ',' || c == '-').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse()?, b.parse()?)),
        _ => bail!("expected two points like 2,4 but got {s:?}"),
    }
}

fn quiver_output(q: &IceQuiver, format: Format) -> Output {
    match format {
        Format::Json => Output::json(&q.to_json()),
        Format::Dot => Output { text: q.to_dot(), ok: true },
    }
}

pub fn hive(l: u32, drop: &[u8], format: Format) -> Result<Output> {
    let h = build_hive(l)?;
    if drop.is_empty() {
        return Ok(match format {
            Format::Json => Output::json(&h.to_json()),
            Format::Dot => quiver_output(&h.quiver, format),
        });
    }
    Ok(quiver_output(&drop_edges(&h, drop)?, format))
}

pub fn glue_cmd(t: &DiskTriangulation, l: u32, format: Format) -> Result<Output> {
    let g = glue(t, l)?;
    Ok(match format {
        Format::Json => {
            let mut v = g.to_json();
            v["mutable_count"] = json!(g.quiver.mutable_vertices().len());
            Output::json(&v)
        }
        Format::Dot => quiver_output(&g.quiver, format),
    })
}

pub fn mutate(q: &IceQuiver, seq: &str, by_label: bool, format: Format) -> Result<Output> {
    let vs = parse_vertices(q, seq, by_label)?;
    Ok(quiver_output(&q.mutate_seq(&vs)?, format))
}

pub fn seed_mutate(seed: &Seed, seq: &str, by_label: bool, track: bool) -> Result<Output> {
    let vs = parse_vertices(seed.quiver(), seq, by_label)?;
    let mut s = seed.clone();
    let mut steps = Vec::new();
    for &u in &vs {
        s = s.mutate(u)?;
        if track {
            let var = s.var(u);
            steps.push(json!({
                "vertex": u,
                "label": s.quiver().label(u).to_string(),
                "variable": var.to_json(),
                "text": var.to_string(),
                "terms": var.len(),
            }));
        }
    }
    let mut v = s.to_json();
    if track {
        v["steps"] = Value::Array(steps);
    }
    Ok(Output::json(&v))
}

pub fn read_seed(path: &Path) -> Result<Seed> {
    let v = read_json(path)?;
    if v.get("quiver").is_some() {
        Ok(Seed::from_json(&v)?)
    } else {
        Ok(Seed::initial(IceQuiver::from_json(&v)?))
    }
}

pub fn flip_cmd(t: &DiskTriangulation, d: (u32, u32), l: u32, verify: bool) -> Result<Output> {
    let g = glue(t, l)?;
    let layers = flip_layers(&g, d)?;
    let flipped = flip(t, d)?;
    let names = |ls: &[Label]| ls.iter().map(Label::to_string).collect::<Vec<_>>();
    let mut v = json!({
        "diagonal": [d.0, d.1],
        "l": l,
        "layers": layers.iter().map(|ly| names(ly)).collect::<Vec<_>>(),
        "sequence": names(&layers.concat()),
        "triangulation": t.to_json(),
        "flipped": flipped.to_json(),
    });
    let mut ok = true;
    if verify {
        let r = flip_verify(t, d, l, false, 1)?;
        ok = r.matches && r.reversible;
        v["verify"] = json!({"matches": r.matches, "reversible": r.reversible});
    }
    Ok(Output::json(&v).failing(ok))
}

pub fn twist_cmd(t: &DiskTriangulation, triangle: usize, e: (u32, u32), l: u32, verify: bool) -> Result<Output> {
    let tw = twist(t, triangle, e)?;
    let mut v = json!({
        "triangle": triangle,
        "edge": [e.0, e.1],
        "corners": tw.corners,
        "l": l,
        "triangulation": t.to_json(),
        "twisted": tw.triangulation.to_json(),
        "edge_after": [tw.edge_after().0, tw.edge_after().1],
    });
    let mut ok = true;
    let r = twist_verify(t, triangle, e, l)?;
    v["sequence"] = json!(r.sequence.iter().map(Label::to_string).collect::<Vec<_>>());
    if verify {
        ok = r.matches;
        v["verify"] = json!({"matches": r.matches});
    }
    Ok(Output::json(&v).failing(ok))
}

pub fn optimize(q: &IceQuiver, vertex: &str, by_label: bool, max_depth: usize) -> Result<Output> {
    let e = *parse_vertices(q, vertex, by_label)?.first().ok_or_else(|| anyhow!("no vertex given"))?;
    let found = optimize_vertex(q, e, max_depth)?;
    let v = match &found {
        Some(seq) => {
            let after = q.mutate_seq(seq)?;
            json!({
                "vertex": e,
                "label": q.label(e).to_string(),
                "max_depth": max_depth,
                "sequence": seq,
                "labels": seq.iter().map(|&u| q.label(u).to_string()).collect::<Vec<_>>(),
                "sink": after.is_sink(e),
                "source": after.is_source(e),
                "quiver": after.to_json(),
            })
        }
        None => json!({"vertex": e, "label": q.label(e).to_string(), "max_depth": max_depth, "sequence": null}),
    };
    Ok(Output::json(&v))
}

pub fn pipeline(m: u32, l: u32, max_depth: usize) -> Result<Output> {
    let r = disk_pipeline(m, l, max_depth)?;
    let mut v = r.to_json();
    v["ok"] = json!(r.ok());
    Ok(Output::json(&v).failing(r.ok()))
}

pub fn gvector(seed: &Seed, poly: &Value) -> Result<Output> {
    let q = seed.quiver();
    let z = LaurentPoly::from_json(q.len(), poly)?;
    let g = g_vector(&z, q)?;
    Ok(Output::json(&json!({"g": g})))
}
