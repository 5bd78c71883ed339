//! JSON result records, schema `v1`.
//!
//! Every record embeds its input graph under `"graph"`, so `verify` needs
//! nothing but the record itself. Certificates name vertices by their
//! original labels.

use std::collections::{BTreeMap, HashMap};

use bcd_core::oracle::{oracle_maxmin, oracle_minmax, oracle_wpack, oracle_wsep, verify_result, Claim, Objective, OracleBudget};
use bcd_core::WeightedGraph;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::graphfile::GraphFile;

pub const SCHEMA: &str = "v1";

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("unknown claim kind {0:?}")]
    UnknownClaimKind(String),
}

fn bad(msg: impl Into<String>) -> RecordError {
    RecordError::Malformed(msg.into())
}

pub fn graph_json(f: &GraphFile) -> Value {
    let vertices: Vec<Value> = (0..f.g.n()).map(|v| json!([f.labels[v], f.g.weight(v)])).collect();
    let edges: Vec<Value> = f
        .edge_weights
        .iter()
        .map(|(&(u, v), &w)| json!([f.labels[u], f.labels[v], w]))
        .collect();
    json!({ "vertices": vertices, "edges": edges })
}

pub fn graph_from_json(v: &Value) -> Result<GraphFile, RecordError> {
    let verts = v["vertices"].as_array().ok_or_else(|| bad("graph.vertices missing"))?;
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for x in verts {
        let label = x[0].as_str().ok_or_else(|| bad("vertex label"))?;
        let w = x[1].as_i64().ok_or_else(|| bad("vertex weight"))?;
        labels.push(label.to_string());
        weights.push(w);
    }
    let ids: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if ids.len() != labels.len() {
        return Err(bad("duplicate vertex label"));
    }
    let mut edge_weights = BTreeMap::new();
    for e in v["edges"].as_array().ok_or_else(|| bad("graph.edges missing"))? {
        let end = |i: usize| e[i].as_str().and_then(|l| ids.get(l).copied()).ok_or_else(|| bad("edge endpoint"));
        let (a, b) = (end(0)?, end(1)?);
        let w = e[2].as_i64().unwrap_or(1);
        if a == b || edge_weights.insert((a.min(b), a.max(b)), w).is_some() {
            return Err(bad("bad edge"));
        }
    }
    let list: Vec<_> = edge_weights.keys().copied().collect();
    let g = WeightedGraph::new(weights, &list).map_err(|e| bad(e.to_string()))?;
    Ok(GraphFile { g, labels, edge_weights })
}

/// Assembles a record. `certificate` must carry a `"kind"` field.
pub fn record(command: &str, f: &GraphFile, parameters: Value, result: Value, certificate: Value, trace: Value, elapsed_ms: f64) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "parameters": parameters,
        "result": result,
        "certificate": certificate,
        "trace": trace,
        "timing": { "elapsed_ms": elapsed_ms },
        "graph": graph_json(f),
    })
}

pub fn sets_json(f: &GraphFile, sets: &[Vec<usize>]) -> Value {
    json!(sets.iter().map(|s| f.labels_of(s)).collect::<Vec<_>>())
}

pub fn map_json(f: &GraphFile, m: &BTreeMap<usize, usize>) -> Value {
    let mut out = Map::new();
    for (&k, &v) in m {
        out.insert(f.label(k).to_string(), json!(f.label(v)));
    }
    Value::Object(out)
}

struct Labels<'a> {
    ids: HashMap<&'a str, usize>,
}

impl Labels<'_> {
    fn id(&self, v: &Value) -> Result<usize, RecordError> {
        let l = v.as_str().ok_or_else(|| bad("label is not a string"))?;
        self.ids.get(l).copied().ok_or_else(|| bad(format!("unknown label {l:?}")))
    }

    fn set(&self, v: &Value) -> Result<Vec<usize>, RecordError> {
        v.as_array().ok_or_else(|| bad("expected a list of labels"))?.iter().map(|x| self.id(x)).collect()
    }

    fn sets(&self, v: &Value) -> Result<Vec<Vec<usize>>, RecordError> {
        v.as_array().ok_or_else(|| bad("expected a list of sets"))?.iter().map(|x| self.set(x)).collect()
    }

    fn map(&self, v: &Value) -> Result<BTreeMap<usize, usize>, RecordError> {
        let obj = v.as_object().ok_or_else(|| bad("expected a label map"))?;
        obj.iter()
            .map(|(k, x)| Ok((self.id(&json!(k))?, self.id(x)?)))
            .collect()
    }
}

fn int(v: &Value, key: &str) -> Result<i64, RecordError> {
    v[key].as_i64().ok_or_else(|| bad(format!("missing integer {key:?}")))
}

/// Violations of the record's certificate; empty iff it holds.
pub fn verify_record(rec: &Value) -> Result<Vec<String>, RecordError> {
    if rec["schema"] != SCHEMA {
        return Err(bad(format!("schema must be {SCHEMA:?}")));
    }
    let f = graph_from_json(&rec["graph"])?;
    let g = &f.g;
    let lab = Labels { ids: f.id_map() };
    let cert = &rec["certificate"];
    let kind = cert["kind"].as_str().ok_or_else(|| bad("certificate.kind missing"))?;
    let mut out = Vec::new();
    match kind {
        "bcd" => {
            let claim = Claim::Bcd {
                lambda: int(cert, "lambda")?,
                c: lab.set(&cert["c"])?,
                h: lab.set(&cert["h"])?,
                r_parts: lab.sets(&cert["r_parts"])?,
                f: lab.map(&cert["f"])?,
            };
            out = verify_result(g, &claim);
        }
        "packing" => {
            let sets = lab.sets(&cert["sets"])?;
            out = verify_result(g, &Claim::Packing { w_bound: int(cert, "W")?, sets });
        }
        "partition" => {
            let k = int(cert, "k")? as usize;
            let parts = lab.sets(&cert["parts"])?;
            let objective = match cert["objective_kind"].as_str() {
                Some("maxmin") => Objective::MaxMin,
                Some("minmax") => Objective::MinMax,
                _ => return Err(bad("objective_kind must be maxmin or minmax")),
            };
            let value = int(cert, "objective")?;
            if let Some(ws) = cert["part_weights"].as_array() {
                for (i, p) in parts.iter().enumerate() {
                    let w: i64 = p.iter().map(|&v| g.weight(v)).sum();
                    if ws.get(i).and_then(Value::as_i64) != Some(w) {
                        out.push(format!("part {i} weighs {w}, record says {}", ws.get(i).unwrap_or(&Value::Null)));
                    }
                }
            }
            out.extend(verify_result(g, &Claim::Partition { k, parts, objective: Some((objective, value)) }));
        }
        "edge_partition" => {
            let k = int(cert, "k")? as usize;
            let mut parts = Vec::new();
            for p in cert["parts"].as_array().ok_or_else(|| bad("parts"))? {
                let mut es = Vec::new();
                for e in p.as_array().ok_or_else(|| bad("edge list"))? {
                    es.push((lab.id(&e[0])?, lab.id(&e[1])?));
                }
                parts.push(es);
            }
            let claim = Claim::EdgePartition {
                k,
                parts,
                edge_weights: f.edge_weights.clone(),
                objective: Some(int(cert, "objective")?),
            };
            out = verify_result(g, &claim);
        }
        "expansion" => {
            let claim = Claim::Expansion {
                q: int(cert, "q")?,
                a_side: lab.set(&cert["a_side"])?,
                a1: lab.set(&cert["a1"])?,
                f: lab.map(&cert["f"])?,
            };
            out = verify_result(g, &claim);
        }
        "kernel" => out = verify_kernel(g, &lab, cert)?,
        "oracle" => {
            // No certificate beyond the number itself: recompute it.
            let budget = OracleBudget { max_vertices: int(cert, "max_vertices")? as usize, ..Default::default() };
            let got = match cert["oracle"].as_str() {
                Some("maxmin") => oracle_maxmin(g, int(cert, "k")? as usize, &budget),
                Some("minmax") => oracle_minmax(g, int(cert, "k")? as usize, &budget),
                Some("wsep") => oracle_wsep(g, int(cert, "W")?, &budget).map(|x| x as i64),
                Some("wpack") => oracle_wpack(g, int(cert, "W")?, &budget).map(|x| x as i64),
                _ => return Err(bad("unknown oracle")),
            };
            match got {
                Ok(x) if x == int(cert, "value")? => {}
                Ok(x) => out.push(format!("oracle value is {x}, record says {}", cert["value"])),
                Err(e) => out.push(format!("cannot recompute: {e}")),
            }
        }
        other => return Err(RecordError::UnknownClaimKind(other.to_string())),
    }
    Ok(out)
}

fn verify_kernel(g: &WeightedGraph, lab: &Labels, cert: &Value) -> Result<Vec<String>, RecordError> {
    let w_bound = int(cert, "W")?;
    let k = int(cert, "k")?;
    let separator = match cert["problem"].as_str() {
        Some("separator") => true,
        Some("packing") => false,
        _ => return Err(bad("problem must be separator or packing")),
    };
    let mut out = Vec::new();
    match cert["verdict"].as_str() {
        Some("reduced") => {
            let forced = lab.set(&cert["forced"])?;
            let dropped = lab.set(&cert["dropped"])?;
            let crown = &cert["crown"];
            let (c, h, fm) = (lab.set(&crown["c"])?, lab.set(&crown["h"])?, lab.map(&crown["f"])?);
            // The crown lives in the graph left after preprocessing.
            let mut gone = vec![false; g.n()];
            forced.iter().chain(&dropped).for_each(|&v| gone[v] = true);
            let keep: Vec<usize> = (0..g.n()).filter(|&v| !gone[v]).collect();
            let (sub, map) = g.induced_subgraph(&keep);
            let mut new_id = vec![usize::MAX; g.n()];
            map.iter().enumerate().for_each(|(i, &v)| new_id[v] = i);
            let inside = |s: &[usize]| s.iter().all(|&v| !gone[v]);
            if !inside(&c) || !inside(&h) {
                out.push("crown touches a forced or dropped vertex".into());
                return Ok(out);
            }
            let re = |s: &[usize]| s.iter().map(|&v| new_id[v]).collect::<Vec<_>>();
            let claim = Claim::Crown {
                w_bound,
                c: re(&c),
                h: re(&h),
                f: fm.iter().map(|(&a, &b)| (new_id[a], new_id.get(b).copied().unwrap_or(usize::MAX))).collect(),
            };
            out.extend(verify_result(&sub, &claim).into_iter().map(|m| format!("crown: {m}")));
            let reduced = lab.set(&cert["reduced"]["vertices"])?;
            let mut expect: Vec<usize> = keep.iter().copied().filter(|v| !c.contains(v) && !h.contains(v)).collect();
            let mut got = reduced.clone();
            expect.sort_unstable();
            got.sort_unstable();
            if expect != got {
                out.push("reduced vertex set is not the remainder after removing the crown".into());
            }
            let k2 = int(&cert["reduced"], "k")?;
            let shift = if separator { forced.len() as i64 } else { 0 };
            if k2 != k - shift - h.len() as i64 {
                out.push(format!("reduced k is {k2}, expected {}", k - shift - h.len() as i64));
            }
        }
        Some(v @ ("trivially_yes" | "trivially_no")) => {
            let sets = lab.sets(&cert["witness"])?;
            let n = sets.len() as i64;
            out.extend(verify_result(g, &Claim::Packing { w_bound, sets }).into_iter().map(|m| format!("witness: {m}")));
            match (separator, v) {
                (true, "trivially_no") if n <= k => out.push(format!("witness packs {n} sets, needs more than {k}")),
                (false, "trivially_yes") if n < k => out.push(format!("witness packs {n} sets, needs {k}")),
                (true, "trivially_yes") | (false, "trivially_no") => out.push(format!("verdict {v} carries no certificate")),
                _ => {}
            }
        }
        _ => return Err(bad("unknown verdict")),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphfile::parse;

    fn path3() -> GraphFile {
        parse("p vwg 3 2\nv a 1\nv b 1\nv c 1\ne a b\ne b c 3\n").unwrap()
    }

    #[test]
    fn graph_round_trip() {
        let f = path3();
        assert_eq!(graph_from_json(&graph_json(&f)).unwrap(), f);
    }

    #[test]
    fn packing_record() {
        let f = path3();
        let cert = json!({ "kind": "packing", "W": 2, "sets": [["a", "b"]] });
        let rec = record("pack-approx", &f, json!({}), json!({}), cert, json!({}), 0.0);
        assert!(verify_record(&rec).unwrap().is_empty());
        let mut bad_rec = rec.clone();
        bad_rec["certificate"]["sets"] = json!([["a", "c"]]);
        assert!(!verify_record(&bad_rec).unwrap().is_empty());
        bad_rec["certificate"]["sets"] = json!([["zz"]]);
        assert!(matches!(verify_record(&bad_rec), Err(RecordError::Malformed(_))));
        bad_rec["certificate"]["kind"] = json!("sudoku");
        assert!(matches!(verify_record(&bad_rec), Err(RecordError::UnknownClaimKind(_))));
    }

    #[test]
    fn kernel_witness_counts() {
        let f = path3();
        let cert = json!({ "kind": "kernel", "problem": "separator", "W": 1, "k": 2, "verdict": "trivially_no", "witness": [["a"], ["b"], ["c"]] });
        let rec = record("sep-kernel", &f, json!({}), json!({}), cert, json!({}), 0.0);
        assert!(verify_record(&rec).unwrap().is_empty());
        let mut r2 = rec.clone();
        r2["certificate"]["k"] = json!(3);
        assert_eq!(verify_record(&r2).unwrap().len(), 1);
    }
}
