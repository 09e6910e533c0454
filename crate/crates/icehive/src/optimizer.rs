//! Vertex optimization by breadth-first search and the deletion pipeline
//! that shrinks a glued disk quiver down to a single hive.

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hive::{build_hive, drop_edges};
use crate::label::Label;
use crate::linalg::IntMatrix;
use crate::quiver::IceQuiver;
use crate::surface::{alternating_triangulation, glue, point_label};

pub const DEFAULT_MAX_DEPTH: usize = 6;

/// Shortest sequence of mutations away from `e` making `e` a sink or source.
/// Among the shortest, the lexicographically smallest in vertex order is
/// returned. States already reached are not expanded again, and a vertex is
/// never mutated twice in a row.
pub fn optimize_vertex(q: &IceQuiver, e: usize, max_depth: usize) -> Result<Option<Vec<usize>>> {
    if e >= q.len() {
        return Err(Error::UnknownVertex(e.to_string()));
    }
    if q.is_sink_or_source(e) {
        return Ok(Some(Vec::new()));
    }
    let moves: Vec<usize> = q.mutable_vertices().into_iter().filter(|&u| u != e).collect();
    let mut seen: HashSet<IntMatrix> = HashSet::from([q.adjacency().clone()]);
    let mut frontier = vec![(Vec::<usize>::new(), q.clone())];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for (seq, cur) in &frontier {
            for &u in &moves {
                if seq.last() == Some(&u) {
                    continue;
                }
                let m = cur.mutate(u)?;
                if !seen.insert(m.adjacency().clone()) {
                    continue;
                }
                let mut s = seq.clone();
                s.push(u);
                if m.is_sink_or_source(e) {
                    return Ok(Some(s));
                }
                next.push((s, m));
            }
        }
        frontier = next;
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Strip,
    Search,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Strip => "strip",
            Method::Search => "bfs",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineStep {
    pub vertex: Label,
    pub sequence: Vec<Label>,
    pub method: Method,
    pub full_rank: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineReport {
    pub m: u32,
    pub l: u32,
    pub initial_full_rank: bool,
    pub steps: Vec<PipelineStep>,
    pub terminal: IceQuiver,
    pub terminal_matches: bool,
}

impl PipelineReport {
    pub fn ok(&self) -> bool {
        self.initial_full_rank && self.terminal_matches && self.steps.iter().all(|s| s.full_rank)
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "vertex": s.vertex.to_string(),
                    "sequence": s.sequence.iter().map(Label::to_string).collect::<Vec<_>>(),
                    "method": s.method.as_str(),
                    "full_rank": s.full_rank,
                })
            })
            .collect();
        json!({
            "m": self.m,
            "l": self.l,
            "initial_full_rank": self.initial_full_rank,
            "steps": steps,
            "terminal": self.terminal.to_json(),
            "terminal_matches": self.terminal_matches,
        })
    }
}

/// Labels in the order they are deleted. For each triangle of the zigzag
/// from the last back to the second, with `d = pq` the edge shared with the
/// previous triangle and `o` the opposite corner, rows are taken at height
/// `h = l-2, ..., 0` and within a row `{o:h, p:jp, q:l-h-jp}` for increasing `jp`.
pub fn deletion_order(m: u32, l: u32) -> Result<Vec<Vec<Label>>> {
    let z = alternating_triangulation(m)?;
    let tris = z.triangles();
    let mut rows = Vec::new();
    for ti in (1..tris.len()).rev() {
        let (t, prev) = (tris[ti], tris[ti - 1]);
        let mut d: Vec<u32> = t.iter().copied().filter(|p| prev.contains(p)).collect();
        d.sort_unstable();
        let o = *t.iter().find(|p| !prev.contains(p)).expect("adjacent triangles share an edge");
        let (p, q) = (d[0], d[1]);
        for h in (0..=l - 2).rev() {
            rows.push((1..l - h).map(|jp| Label::points([(o, h), (p, jp), (q, l - h - jp)])).collect());
        }
    }
    Ok(rows)
}

/// Starting from `◇_l` of the zigzag with only the frozen vertices of edge
/// `12` kept, delete the remaining vertices row by row. Each vertex is first
/// optimized (by the strip sequence of its row when that works, otherwise by
/// search), then deleted, and the sequence is undone.
pub fn disk_pipeline(m: u32, l: u32, max_depth: usize) -> Result<PipelineReport> {
    let z = alternating_triangulation(m)?;
    let g = glue(&z, l)?;
    let on_kept_edge = |lab: &Label| lab.as_points().is_some_and(|p| p.len() == 2 && p.contains_key(&1) && p.contains_key(&2));
    let drop: Vec<usize> = (0..g.quiver.len()).filter(|&v| g.quiver.is_frozen(v) && !on_kept_edge(g.quiver.label(v))).collect();
    let mut q = g.quiver.delete_vertices(&drop)?;
    let initial_full_rank = q.has_full_rank();

    let mut steps = Vec::new();
    for row in deletion_order(m, l)? {
        for (pos, lab) in row.iter().enumerate() {
            let fail = |reason: String| Error::StepFailed { step: steps.len(), vertex: lab.to_string(), reason };
            let e = q.index_of(lab).ok_or_else(|| fail("vertex is missing".into()))?;
            let strip: Vec<usize> = row[pos + 1..].iter().rev().filter_map(|x| q.index_of(x)).collect();
            let (seq, method) = if q.mutate_seq(&strip)?.is_sink_or_source(e) {
                (strip, Method::Strip)
            } else {
                match optimize_vertex(&q, e, max_depth)? {
                    Some(s) => (s, Method::Search),
                    None => return Err(fail(format!("no optimizing sequence within depth {max_depth}"))),
                }
            };
            let sequence: Vec<Label> = seq.iter().map(|&u| q.label(u).clone()).collect();
            let optimized = q.mutate_seq(&seq)?;
            let removed = optimized.delete_vertices(&[e])?;
            let back: Vec<Label> = sequence.iter().rev().cloned().collect();
            let restored = removed.mutate_labels(&back)?;
            let expected = q.delete_vertices(&[e])?;
            if restored != expected {
                return Err(fail("undoing the sequence does not restore the quiver".into()));
            }
            q = restored;
            steps.push(PipelineStep { vertex: lab.clone(), sequence, method, full_rank: q.has_full_rank() });
        }
    }

    let hive = build_hive(l)?;
    let first = z.triangles()[0];
    let want = drop_edges(&hive, &[1, 2])?.relabel(|lab| point_label(first, lab.as_hive().expect("hive label")))?;
    let terminal_matches = q.same_as(&want, false);
    Ok(PipelineReport { m, l, initial_full_rank, steps, terminal: q, terminal_matches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hive::hive_strip;

    #[test]
    fn already_optimized() {
        let q = IceQuiver::from_arrows(2, &[], &[(0, 1, 1)]);
        assert_eq!(optimize_vertex(&q, 0, 3).unwrap(), Some(vec![]));
    }

    #[test]
    fn strip_vertex_is_reachable() {
        for n in 1..=4 {
            let q = hive_strip(n, true);
            let s = optimize_vertex(&q, 0, n).unwrap().expect("strip sequence is a witness");
            assert!(s.len() <= n && !s.contains(&0));
            assert!(q.mutate_seq(&s).unwrap().is_sink_or_source(0));
        }
    }

    #[test]
    fn hive_example() {
        let h = build_hive(5).unwrap().quiver;
        let e = h.index_of(&Label::hive(2, 0, 3)).unwrap();
        let s = optimize_vertex(&h, e, 2).unwrap().unwrap();
        assert!(h.mutate_seq(&s).unwrap().is_sink_or_source(e));
    }

    #[test]
    fn triangle_pipeline_is_trivial() {
        let r = disk_pipeline(3, 3, 4).unwrap();
        assert!(r.steps.is_empty() && r.ok());
    }

    #[test]
    fn square_pipeline() {
        let r = disk_pipeline(4, 3, DEFAULT_MAX_DEPTH).unwrap();
        assert!(r.ok());
        assert_eq!(r.steps.len(), 3);
    }
}
