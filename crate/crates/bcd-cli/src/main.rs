//! `bcd`: balanced crown decompositions and their applications from the
//! command line. Reads `p vwg` graph files (`-` for stdin) and writes JSON
//! result records to stdout.
//!
//! Exit codes: 0 success, 1 violation (or internal error), 2 usage or
//! unreadable input, 3 infeasible instance or failed precondition.

mod dot;
mod graphfile;
mod record;

use std::collections::BTreeMap;
use std::io::Read as _;
use std::process::ExitCode;
use std::time::Instant;

use bcd_core::apps::{self, AppError, BcpSolution, KernelResult, Verdict};
use bcd_core::bcd::{BcdError, BcdStats, TraceRecord};
use bcd_core::expansion::{balanced_expansion, BipartiteWeighted};
use bcd_core::oracle::{self, OracleBudget, OracleError};
use bcd_core::{find_bcd, gen, BcdOptions};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use graphfile::GraphFile;

#[derive(Parser)]
#[command(name = "bcd", version, about = "Balanced crown decomposition toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(clap::Args)]
struct Common {
    /// Graph file in `p vwg` format, `-` for stdin.
    file: String,
    /// Include the per-step trace in the record.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Maxmin,
    Minmax,
    Wsep,
    Wpack,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Connected,
    Tree,
    Grid,
    Gnp,
}

#[derive(Subcommand)]
enum Cmd {
    /// Balanced crown decomposition.
    Bcd {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        lambda: i64,
    },
    /// Balanced expansion of a bipartite graph. The A side is given by
    /// `--a`, or else consists of the labels starting with `a`.
    Expansion {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        q: i64,
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<String>>,
    },
    /// Kernel for W-weight separator.
    SepKernel {
        #[command(flatten)]
        io: Common,
        #[arg(long = "W")]
        w: i64,
        #[arg(long)]
        k: i64,
    },
    /// Kernel for W-weight packing.
    PackKernel {
        #[command(flatten)]
        io: Common,
        #[arg(long = "W")]
        w: i64,
        #[arg(long)]
        k: i64,
    },
    /// W-weight packing of at least a third of the optimum size.
    PackApprox {
        #[command(flatten)]
        io: Common,
        #[arg(long = "W")]
        w: i64,
    },
    /// Max-Min balanced connected partition into k parts.
    Maxmin {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        k: usize,
    },
    /// Min-Max balanced connected partition into k parts.
    Minmax {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        k: usize,
    },
    /// Max-Min balanced connected edge partition, using the edge weights.
    BcepMaxmin {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        k: usize,
    },
    /// Check the certificate of a result record.
    Verify { record: String },
    /// Exact optimum by brute force on tiny graphs.
    Oracle {
        kind: OracleKind,
        file: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "W")]
        w: Option<i64>,
        #[arg(long, default_value_t = OracleBudget::default().max_vertices)]
        max_vertices: usize,
    },
    /// Write a random graph file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, clap::Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 15)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    wmax: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Fail {
    /// A failed verification; the report goes to stdout.
    Report(String),
    Violation(String),
    Usage(String),
    Infeasible(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Report(_) | Fail::Violation(_) => 1,
            Fail::Usage(_) => 2,
            Fail::Infeasible(_) => 3,
        }
    }
}

impl From<AppError> for Fail {
    fn from(e: AppError) -> Self {
        match e {
            AppError::InvalidParams(_) | AppError::Bcd(BcdError::LambdaNonPositive(_)) => Fail::Usage(e.to_string()),
            AppError::Infeasible(_) | AppError::Bcd(BcdError::SmallComponent { .. }) => Fail::Infeasible(e.to_string()),
            _ => Fail::Violation(e.to_string()),
        }
    }
}

impl From<BcdError> for Fail {
    fn from(e: BcdError) -> Self {
        AppError::from(e).into()
    }
}

impl From<OracleError> for Fail {
    fn from(e: OracleError) -> Self {
        Fail::Infeasible(e.to_string())
    }
}

fn read_input(path: &str) -> Result<String, Fail> {
    let mut s = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
    Ok(s)
}

fn load(path: &str) -> Result<GraphFile, Fail> {
    graphfile::parse(&read_input(path)?).map_err(|e| Fail::Usage(format!("{path}: {e}")))
}

fn stats_json(s: &BcdStats) -> Value {
    json!({
        "rounds": s.rounds,
        "divides": s.divides,
        "cuts": s.cuts,
        "cleanups": s.cleanups,
        "subtree_moves": s.subtree_moves,
        "merges": s.merges,
        "outer_monotone": s.outer_monotone,
        "inner_monotone": s.inner_monotone,
    })
}

fn steps_json(t: &[TraceRecord]) -> Value {
    json!(t
        .iter()
        .map(|r| json!({
            "step": format!("{:?}", r.step),
            "outer": r.outer,
            "inner": r.inner,
            "heads": r.heads,
            "parts": r.parts,
            "subs": r.subs,
        }))
        .collect::<Vec<_>>())
}

/// What a command produced: the record pieces plus the dot grouping.
struct Output {
    params: Value,
    result: Value,
    cert: Value,
    trace: Value,
    groups: Vec<(String, Vec<usize>)>,
    shape: BTreeMap<usize, &'static str>,
}

fn parts_groups(parts: &[Vec<usize>]) -> Vec<(String, Vec<usize>)> {
    parts.iter().enumerate().map(|(i, p)| (format!("part {i}"), p.clone())).collect()
}

fn cmd_bcd(f: &GraphFile, lambda: i64, trace: bool) -> Result<Output, Fail> {
    let opts = BcdOptions { trace, ..Default::default() };
    let out = find_bcd(&f.g, lambda, &opts)?;
    let bcd = out.bcd().ok_or_else(|| Fail::Violation("uncapped run stopped early".into()))?;
    let mut t = json!({ "stats": stats_json(out.stats()) });
    if trace {
        t["steps"] = steps_json(out.trace());
    }
    let mut groups = Vec::new();
    for &h in &bcd.h {
        let mut g = vec![h];
        g.extend(bcd.f.iter().filter(|&(_, &x)| x == h).map(|(&v, _)| v));
        groups.push((format!("head {}", f.label(h)), g));
    }
    for (i, p) in bcd.r_parts.iter().enumerate() {
        groups.push((format!("body {i}"), p.clone()));
    }
    Ok(Output {
        params: json!({ "lambda": lambda }),
        result: json!({ "size": bcd.size(), "crown": bcd.c.len(), "heads": bcd.h.len(), "body_parts": bcd.r_parts.len() }),
        cert: json!({
            "kind": "bcd",
            "lambda": lambda,
            "c": f.labels_of(&bcd.c),
            "h": f.labels_of(&bcd.h),
            "r_parts": record::sets_json(f, &bcd.r_parts),
            "f": record::map_json(f, &bcd.f),
        }),
        trace: t,
        groups,
        shape: bcd.h.iter().map(|&h| (h, "box")).collect(),
    })
}

fn cmd_expansion(f: &GraphFile, q: i64, a: Option<Vec<String>>) -> Result<Output, Fail> {
    let ids = f.id_map();
    let mut is_a = vec![false; f.g.n()];
    match a {
        Some(list) => {
            for l in list {
                let v = *ids.get(l.as_str()).ok_or_else(|| Fail::Usage(format!("--a names unknown label {l:?}")))?;
                is_a[v] = true;
            }
        }
        None => (0..f.g.n()).for_each(|v| is_a[v] = f.label(v).starts_with('a')),
    }
    let a_side: Vec<usize> = (0..f.g.n()).filter(|&v| is_a[v]).collect();
    let b_side: Vec<usize> = (0..f.g.n()).filter(|&v| !is_a[v]).collect();
    let mut idx = vec![0; f.g.n()];
    a_side.iter().enumerate().for_each(|(i, &v)| idx[v] = i);
    b_side.iter().enumerate().for_each(|(i, &v)| idx[v] = i);
    let mut edges = Vec::new();
    for (u, v) in f.g.edges() {
        if is_a[u] == is_a[v] {
            return Err(Fail::Infeasible(format!("edge {} {} lies inside one side", f.label(u), f.label(v))));
        }
        let (x, y) = if is_a[u] { (u, v) } else { (v, u) };
        edges.push((idx[x], idx[y]));
    }
    let bw = BipartiteWeighted::new(
        a_side.iter().map(|&v| f.g.weight(v)).collect(),
        b_side.iter().map(|&v| f.g.weight(v)).collect(),
        &edges,
    )
    .map_err(|e| Fail::Infeasible(e.to_string()))?;
    let be = balanced_expansion(&bw, q).map_err(|e| Fail::Infeasible(e.to_string()))?;
    let a1: Vec<usize> = be.a1.iter().map(|&i| a_side[i]).collect();
    let fmap: BTreeMap<usize, usize> = be.f.iter().enumerate().map(|(b, &x)| (b_side[b], a_side[x])).collect();
    let loads = be.loads(&bw);
    let groups = a_side
        .iter()
        .map(|&x| {
            let mut g = vec![x];
            g.extend(fmap.iter().filter(|&(_, &y)| y == x).map(|(&b, _)| b));
            (format!("{} load {}", f.label(x), loads[idx[x]]), g)
        })
        .collect();
    Ok(Output {
        params: json!({ "q": q }),
        result: json!({ "a1": a1.len(), "a2": a_side.len() - a1.len() }),
        cert: json!({
            "kind": "expansion",
            "q": q,
            "a_side": f.labels_of(&a_side),
            "a1": f.labels_of(&a1),
            "f": record::map_json(f, &fmap),
        }),
        trace: json!({}),
        groups,
        shape: a1.iter().map(|&x| (x, "box")).collect(),
    })
}

fn cmd_kernel(f: &GraphFile, separator: bool, w: i64, k: i64) -> Result<Output, Fail> {
    let r: KernelResult = if separator { apps::wsep_kernel(&f.g, w, k)? } else { apps::wpack_kernel(&f.g, w, k)? };
    let verdict = match r.verdict {
        Verdict::Reduced => "reduced",
        Verdict::TriviallyYes => "trivially_yes",
        Verdict::TriviallyNo => "trivially_no",
    };
    let mut cert = json!({
        "kind": "kernel",
        "problem": if separator { "separator" } else { "packing" },
        "W": w,
        "k": k,
        "verdict": verdict,
    });
    let mut groups = Vec::new();
    let mut shape = BTreeMap::new();
    let mut result = json!({ "verdict": verdict });
    match &r.witness {
        Some(p) if r.verdict != Verdict::Reduced => {
            cert["witness"] = record::sets_json(f, &p.parts);
            result["witness_sets"] = json!(p.parts.len());
            groups = parts_groups(&p.parts);
        }
        _ => {
            let reduced: Vec<usize> = r.reduced_map.clone();
            cert["forced"] = json!(f.labels_of(&r.forced));
            cert["dropped"] = json!(f.labels_of(&r.dropped));
            cert["crown"] = json!({
                "c": f.labels_of(&r.certificate.c),
                "h": f.labels_of(&r.certificate.h),
                "f": record::map_json(f, &r.certificate.f),
            });
            cert["reduced"] = json!({ "vertices": f.labels_of(&reduced), "k": r.reduced_k });
            result["reduced_n"] = json!(reduced.len());
            result["reduced_weight"] = json!(reduced.iter().map(|&v| f.g.weight(v)).sum::<i64>());
            result["reduced_k"] = json!(r.reduced_k);
            groups.push(("crown".into(), r.certificate.c.clone()));
            groups.push(("reduced".into(), reduced));
            shape = r.certificate.h.iter().map(|&h| (h, "box")).collect();
            r.forced.iter().for_each(|&v| {
                shape.insert(v, "doublecircle");
            });
        }
    }
    let trace = r.stats.as_ref().map(|s| json!({ "stats": stats_json(s) })).unwrap_or(json!({}));
    Ok(Output { params: json!({ "W": w, "k": k }), result, cert, trace, groups, shape })
}

fn cmd_pack_approx(f: &GraphFile, w: i64) -> Result<Output, Fail> {
    let p = apps::wpack_approx(&f.g, w)?;
    Ok(Output {
        params: json!({ "W": w }),
        result: json!({ "sets": p.parts.len() }),
        cert: json!({ "kind": "packing", "W": w, "sets": record::sets_json(f, &p.parts) }),
        trace: json!({}),
        groups: parts_groups(&p.parts),
        shape: BTreeMap::new(),
    })
}

fn probes_json(sol: &BcpSolution, trace: bool) -> Value {
    json!(sol
        .probes
        .iter()
        .map(|p| {
            let mut o = json!({ "x": p.x, "lambda": p.lambda, "accepted": p.accepted, "outer_index": p.outer_index });
            if let Some(s) = p.saturated {
                o["saturated"] = json!(s);
            }
            if let Some(c) = &p.cost {
                o["cost"] = json!(c.to_string());
            }
            if let Some(b) = p.budget {
                o["budget"] = json!(b);
            }
            if let Some(m) = p.max_part {
                o["max_part"] = json!(m);
            }
            if let (true, Some(s)) = (trace, &p.stats) {
                o["stats"] = stats_json(s);
            }
            o
        })
        .collect::<Vec<_>>())
}

fn cmd_bcp(f: &GraphFile, k: usize, maxmin: bool, trace: bool) -> Result<Output, Fail> {
    let sol = if maxmin { apps::maxmin_bcp(&f.g, k)? } else { apps::minmax_bcp(&f.g, k)? };
    let parts = &sol.parts.parts;
    let weights: Vec<i64> = parts.iter().map(|p| p.iter().map(|&v| f.g.weight(v)).sum()).collect();
    Ok(Output {
        params: json!({ "k": k }),
        result: json!({ "objective": sol.objective, "x": sol.x }),
        cert: json!({
            "kind": "partition",
            "k": k,
            "objective_kind": if maxmin { "maxmin" } else { "minmax" },
            "objective": sol.objective,
            "parts": record::sets_json(f, parts),
            "part_weights": weights,
        }),
        trace: json!({ "monotone": sol.monotone, "probes": probes_json(&sol, trace) }),
        groups: parts_groups(parts),
        shape: BTreeMap::new(),
    })
}

fn cmd_bcep(f: &GraphFile, k: usize, trace: bool) -> Result<Output, Fail> {
    let edges: Vec<((usize, usize), i64)> = f.edge_weights.iter().map(|(&e, &w)| (e, w)).collect();
    let sol = apps::maxmin_bcep(f.g.n(), &edges, k)?;
    let named: Vec<Vec<[&str; 2]>> = sol
        .parts
        .iter()
        .map(|p| p.iter().map(|&i| [f.label(edges[i].0 .0), f.label(edges[i].0 .1)]).collect())
        .collect();
    let groups = sol
        .parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut vs: Vec<usize> = p.iter().flat_map(|&e| [edges[e].0 .0, edges[e].0 .1]).collect();
            vs.sort_unstable();
            vs.dedup();
            (format!("part {i}"), vs)
        })
        .collect::<Vec<_>>();
    // Parts of an edge partition may share vertices; draw only the first
    // occurrence of each.
    let mut seen = vec![false; f.g.n()];
    let groups = groups
        .into_iter()
        .map(|(name, vs)| (name, vs.into_iter().filter(|&v| !std::mem::replace(&mut seen[v], true)).collect()))
        .collect();
    Ok(Output {
        params: json!({ "k": k }),
        result: json!({ "objective": sol.objective }),
        cert: json!({ "kind": "edge_partition", "k": k, "objective": sol.objective, "parts": named }),
        trace: json!({ "monotone": sol.inner.monotone, "probes": probes_json(&sol.inner, trace) }),
        groups,
        shape: BTreeMap::new(),
    })
}

fn cmd_oracle(f: &GraphFile, kind: OracleKind, k: Option<usize>, w: Option<i64>, max_vertices: usize) -> Result<Output, Fail> {
    let budget = OracleBudget { max_vertices, ..Default::default() };
    let need_k = || k.ok_or_else(|| Fail::Usage("--k is required".into()));
    let need_w = || w.ok_or_else(|| Fail::Usage("--W is required".into()));
    let (name, value, params) = match kind {
        OracleKind::Maxmin => ("maxmin", oracle::oracle_maxmin(&f.g, need_k()?, &budget)?, json!({ "k": need_k()? })),
        OracleKind::Minmax => ("minmax", oracle::oracle_minmax(&f.g, need_k()?, &budget)?, json!({ "k": need_k()? })),
        OracleKind::Wsep => ("wsep", oracle::oracle_wsep(&f.g, need_w()?, &budget)? as i64, json!({ "W": need_w()? })),
        OracleKind::Wpack => ("wpack", oracle::oracle_wpack(&f.g, need_w()?, &budget)? as i64, json!({ "W": need_w()? })),
    };
    let mut cert = json!({ "kind": "oracle", "oracle": name, "value": value, "max_vertices": max_vertices });
    if let Value::Object(p) = &params {
        p.iter().for_each(|(key, v)| cert[key] = v.clone());
    }
    Ok(Output { params, result: json!({ "value": value }), cert, trace: json!({}), groups: Vec::new(), shape: BTreeMap::new() })
}

fn cmd_gen(a: &GenArgs) -> Result<String, Fail> {
    let GenArgs { kind, n, m, rows, cols, p, wmax, seed } = *a;
    if wmax < 1 {
        return Err(Fail::Usage("--wmax must be at least 1".into()));
    }
    let g = match kind {
        GenKind::Connected => {
            if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
                return Err(Fail::Usage(format!("no connected simple graph has n = {n}, m = {m}")));
            }
            gen::random_connected(n, m, wmax, seed)
        }
        GenKind::Tree => gen::random_tree(n, wmax, seed),
        GenKind::Grid => gen::grid(rows, cols, wmax, seed),
        GenKind::Gnp => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Fail::Usage("--p must lie in [0, 1]".into()));
            }
            gen::gnp(n, p, wmax, seed)
        }
    };
    Ok(graphfile::emit(&GraphFile::from_graph(g)))
}

fn verify(path: &str) -> Result<String, Fail> {
    let text = read_input(path)?;
    let rec: Value = serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{path}: {e}")))?;
    let violations = match record::verify_record(&rec) {
        Ok(v) => v,
        Err(record::RecordError::Malformed(m)) => vec![format!("malformed record: {m}")],
        Err(e) => return Err(Fail::Usage(e.to_string())),
    };
    if violations.is_empty() {
        Ok(serde_json::to_string_pretty(&json!({ "valid": true, "violations": [] })).unwrap())
    } else {
        let report = json!({ "valid": false, "violations": violations });
        Err(Fail::Report(serde_json::to_string_pretty(&report).unwrap()))
    }
}

fn run(cli: Cli) -> Result<String, Fail> {
    let start = Instant::now();
    let (command, out, f, io) = match cli.cmd {
        Cmd::Verify { record } => return verify(&record),
        Cmd::Gen(a) => return cmd_gen(&a),
        Cmd::Oracle { kind, file, k, w, max_vertices } => {
            let f = load(&file)?;
            let out = cmd_oracle(&f, kind, k, w, max_vertices)?;
            ("oracle", out, f, Common { file, trace: false, format: Format::Json })
        }
        Cmd::Bcd { io, lambda } => {
            let f = load(&io.file)?;
            ("bcd", cmd_bcd(&f, lambda, io.trace)?, f, io)
        }
        Cmd::Expansion { io, q, a } => {
            let f = load(&io.file)?;
            ("expansion", cmd_expansion(&f, q, a)?, f, io)
        }
        Cmd::SepKernel { io, w, k } => {
            let f = load(&io.file)?;
            ("sep-kernel", cmd_kernel(&f, true, w, k)?, f, io)
        }
        Cmd::PackKernel { io, w, k } => {
            let f = load(&io.file)?;
            ("pack-kernel", cmd_kernel(&f, false, w, k)?, f, io)
        }
        Cmd::PackApprox { io, w } => {
            let f = load(&io.file)?;
            ("pack-approx", cmd_pack_approx(&f, w)?, f, io)
        }
        Cmd::Maxmin { io, k } => {
            let f = load(&io.file)?;
            ("maxmin", cmd_bcp(&f, k, true, io.trace)?, f, io)
        }
        Cmd::Minmax { io, k } => {
            let f = load(&io.file)?;
            ("minmax", cmd_bcp(&f, k, false, io.trace)?, f, io)
        }
        Cmd::BcepMaxmin { io, k } => {
            let f = load(&io.file)?;
            ("bcep-maxmin", cmd_bcep(&f, k, io.trace)?, f, io)
        }
    };
    if io.format == Format::Dot {
        return Ok(dot::render(&f, &out.groups, &out.shape));
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut params = out.params;
    params["input"] = json!(io.file);
    let rec = record::record(command, &f, params, out.result, out.cert, out.trace, elapsed);
    Ok(serde_json::to_string_pretty(&rec).unwrap())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(s) => {
            print!("{s}");
            if !s.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.code();
            match e {
                Fail::Report(m) => println!("{m}"),
                Fail::Violation(m) | Fail::Usage(m) | Fail::Infeasible(m) => eprintln!("bcd: {m}"),
            }
            ExitCode::from(code)
        }
    }
}
