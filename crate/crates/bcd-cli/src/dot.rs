use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::graphfile::GraphFile;

const COLORS: [&str; 8] = ["#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999"];

/// Graphviz rendering: each group becomes a cluster, `shape` overrides the
/// node shape of single vertices (heads are drawn as boxes, say).
pub fn render(f: &GraphFile, groups: &[(String, Vec<usize>)], shape: &BTreeMap<usize, &str>) -> String {
    let mut s = String::from("graph G {\n  node [style=filled, fillcolor=white];\n");
    let mut placed = vec![false; f.g.n()];
    let node = |s: &mut String, v: usize, color: &str| {
        let sh = shape.get(&v).copied().unwrap_or("ellipse");
        writeln!(s, "    \"{}\" [label=\"{} ({})\", shape={sh}, color=\"{color}\"];", f.label(v), f.label(v), f.g.weight(v)).unwrap();
    };
    for (i, (name, set)) in groups.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        writeln!(s, "  subgraph cluster_{i} {{\n    label=\"{name}\";\n    color=\"{color}\";").unwrap();
        for &v in set {
            placed[v] = true;
            node(&mut s, v, color);
        }
        s.push_str("  }\n");
    }
    for v in (0..f.g.n()).filter(|&v| !placed[v]) {
        node(&mut s, v, "black");
    }
    for (&(u, v), &w) in &f.edge_weights {
        if w == 1 {
            writeln!(s, "  \"{}\" -- \"{}\";", f.label(u), f.label(v)).unwrap();
        } else {
            writeln!(s, "  \"{}\" -- \"{}\" [label=\"{w}\"];", f.label(u), f.label(v)).unwrap();
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphfile::parse;

    #[test]
    fn clusters() {
        let f = parse("p vwg 2 1\nv a 1\nv b 2\ne a b\n").unwrap();
        let out = render(&f, &[("part 0".into(), vec![0])], &BTreeMap::from([(1, "box")]));
        assert!(out.contains("cluster_0"));
        assert!(out.contains("\"b\" [label=\"b (2)\", shape=box"));
        assert!(out.contains("\"a\" -- \"b\";"));
    }
}
