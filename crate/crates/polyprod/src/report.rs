//! Command-line reports over the expression language.
//!
//! Every subcommand evaluates one expression and prints a report;
//! `--json` switches any report to JSON. Output for identical inputs
//! is byte-stable: group algorithms are deterministic, factor lists
//! are canonically ordered, and JSON objects serialize with sorted
//! keys. Exit codes: 0 on success, 1 for usage errors (bad flags or
//! malformed expressions), 2 when the expression does not name a
//! valid polytope or an analysis rejects it.

use std::fmt::Write as _;

use clap::error::ErrorKind;
use clap::{ColorChoice, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::catalog;
use crate::expr::{self, ExprError};
use crate::factor::{factor, FactorizationResult};
use crate::iso::{canonical_hash, is_isomorphic};
use crate::monodromy::{self, ExtensionReport};
use crate::perm::ComplementOutcome;
use crate::poset::{validate_polytope, Polytope};
use crate::products::ProductKind;
use crate::symmetry::{automorphism_flag_action, flag_orbit_count, flags, orbit_report};

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

/// Entry point for the binary: reports to stdout, errors to stderr.
pub fn run() -> i32 {
    let mut out = String::new();
    let code = match execute(std::env::args_os(), &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprint!("{}", ensure_newline(e.message));
            e.code
        }
    };
    print!("{out}");
    code
}

fn ensure_newline(mut s: String) -> String {
    if !s.is_empty() && !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

#[derive(Parser)]
#[command(
    name = "polyprod",
    version,
    about = "Abstract polytope calculator: products, factorization, symmetry, monodromy",
    color = ColorChoice::Never
)]
struct Cli {
    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rank, f-vector, flag count and validation status
    Info {
        /// Polytope expression, e.g. "prism(gon(5))"
        expr: String,
    },
    /// Prime factorization with respect to one product
    Factor {
        #[arg(long, value_enum)]
        op: Op,
        expr: String,
    },
    /// Automorphism group order and its flag orbits
    Aut { expr: String },
    /// Observed flag-orbit count next to the product prediction
    Orbits {
        #[arg(long, value_enum)]
        op: Op,
        expr: String,
    },
    /// Monodromy group order, optionally with extension structure
    Mono {
        /// Project onto the factor shuffle and analyze the kernel
        #[arg(long)]
        structure: bool,
        /// Product to factor by; default: first one with two factors
        #[arg(long, value_enum)]
        op: Option<Op>,
        expr: String,
    },
    /// Write the face poset in a machine format
    Export {
        #[arg(long, value_enum)]
        format: Format,
        expr: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Join,
    Cart,
    Dsum,
    Topo,
}

impl Op {
    fn kind(self) -> ProductKind {
        match self {
            Op::Join => ProductKind::Join,
            Op::Cart => ProductKind::Cartesian,
            Op::Dsum => ProductKind::DirectSum,
            Op::Topo => ProductKind::Topological,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// Runs one invocation against the given argument list, appending the
/// report to `out`. Kept separate from process concerns so tests can
/// pin exact output bytes.
pub fn execute<I, T>(args: I, out: &mut String) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    out.push_str(&rendered);
                    Ok(())
                }
                _ => Err(CliError { code: 1, message: rendered }),
            };
        }
    };
    let json = cli.json;
    match cli.command {
        Cmd::Info { expr } => info(&evaluate(&expr)?, json, out),
        Cmd::Factor { op, expr } => {
            let p = evaluate(&expr)?;
            let f = factor(&p, op.kind()).map_err(validation)?;
            factor_report(&f, json, out);
        }
        Cmd::Aut { expr } => aut(&evaluate(&expr)?, json, out),
        Cmd::Orbits { op, expr } => {
            let p = evaluate(&expr)?;
            orbits(&p, op.kind(), json, out)?;
        }
        Cmd::Mono { structure, op, expr } => {
            let p = evaluate(&expr)?;
            mono(&p, structure, op.map(Op::kind), json, out)?;
        }
        Cmd::Export { format, expr } => {
            let p = evaluate(&expr)?;
            match format {
                Format::Json => {
                    out.push_str(&p.poset().to_json_string());
                    out.push('\n');
                }
                Format::Dot => out.push_str(&p.poset().to_dot()),
            }
        }
    }
    Ok(())
}

fn evaluate(text: &str) -> Result<Polytope, CliError> {
    expr::parse_eval(text).map_err(|e| {
        let code = match e {
            ExprError::Syntax { .. } => 1,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    })
}

fn validation<E: std::fmt::Display>(e: E) -> CliError {
    CliError { code: 2, message: e.to_string() }
}

fn info(p: &Polytope, json: bool, out: &mut String) {
    let report = validate_polytope(p.poset());
    let fv = p.f_vector();
    let count = flags(p).len();
    if json {
        let doc = json!({
            "rank": p.rank(),
            "f_vector": fv,
            "flags": count,
            "valid": report.is_polytope,
        });
        writeln!(out, "{doc}").unwrap();
        return;
    }
    writeln!(out, "rank: {}", p.rank()).unwrap();
    out.push_str("f-vector:");
    for c in &fv {
        write!(out, " {c}").unwrap();
    }
    out.push('\n');
    writeln!(out, "flags: {count}").unwrap();
    writeln!(out, "validation: {report}").unwrap();
}

fn factor_report(f: &FactorizationResult, json: bool, out: &mut String) {
    if json {
        let factors: Vec<_> = f
            .factors
            .iter()
            .map(|(q, m)| json!({"name": describe(q), "multiplicity": m}))
            .collect();
        let doc = json!({
            "op": f.kind.name(),
            "factors": factors,
            "coordinatization": f.coordinatization,
        });
        writeln!(out, "{doc}").unwrap();
        return;
    }
    out.push_str(&factor_lines(f));
}

/// Text form of a factorization, one `name ^ multiplicity` line per prime.
pub fn factor_lines(f: &FactorizationResult) -> String {
    let mut out = String::new();
    for (q, m) in &f.factors {
        writeln!(out, "{} ^ {}", describe(q), m).unwrap();
    }
    out
}

fn aut(p: &Polytope, json: bool, out: &mut String) {
    let group = automorphism_flag_action(p);
    let count = flags(p).len();
    let orbits = flag_orbit_count(p);
    if json {
        let doc = json!({"order": group.order(), "flags": count, "orbits": orbits});
        writeln!(out, "{doc}").unwrap();
        return;
    }
    writeln!(out, "order: {}", group.order()).unwrap();
    writeln!(out, "flags: {count}").unwrap();
    writeln!(out, "orbits: {orbits}").unwrap();
}

fn orbits(p: &Polytope, kind: ProductKind, json: bool, out: &mut String) -> Result<(), CliError> {
    let f = factor(p, kind).map_err(validation)?;
    let operands: Vec<Polytope> = f
        .factors
        .iter()
        .flat_map(|(q, m)| std::iter::repeat_n(q.clone(), *m))
        .collect();
    let report = orbit_report(kind, &operands).map_err(validation)?;
    let names: Vec<String> = operands.iter().map(describe).collect();
    if json {
        let rows: Vec<_> = names
            .iter()
            .zip(&report.operand_orbit_counts)
            .map(|(name, k)| json!({"name": name, "orbits": k}))
            .collect();
        let doc = json!({
            "op": kind.name(),
            "operands": rows,
            "actual": report.actual,
            "predicted": report.predicted,
        });
        writeln!(out, "{doc}").unwrap();
        return Ok(());
    }
    let width = names.iter().map(String::len).max().unwrap_or(0).max("operand".len());
    writeln!(out, "{:<width$}  orbits", "operand").unwrap();
    for (name, k) in names.iter().zip(&report.operand_orbit_counts) {
        writeln!(out, "{name:<width$}  {k}").unwrap();
    }
    writeln!(out, "actual {}, predicted {}", report.actual, report.predicted).unwrap();
    Ok(())
}

fn mono(
    p: &Polytope,
    structure: bool,
    op: Option<ProductKind>,
    json: bool,
    out: &mut String,
) -> Result<(), CliError> {
    if !structure {
        let order = monodromy::monodromy_group(p).order();
        if json {
            writeln!(out, "{}", json!({"monodromy_order": order})).unwrap();
        } else {
            writeln!(out, "|M| = {order}").unwrap();
        }
        return Ok(());
    }
    let chosen = match op {
        Some(kind) => Some((kind, factor(p, kind).map_err(validation)?)),
        None => ProductKind::ALL.iter().find_map(|&kind| {
            let f = factor(p, kind).ok()?;
            let pieces: usize = f.factors.iter().map(|(_, m)| m).sum();
            (pieces >= 2).then_some((kind, f))
        }),
    };
    let Some((kind, f)) = chosen else {
        let order = monodromy::monodromy_group(p).order();
        if json {
            let doc = json!({"monodromy_order": order, "structure": null});
            writeln!(out, "{doc}").unwrap();
        } else {
            writeln!(out, "|M| = {order}").unwrap();
            writeln!(out, "structure: prime under every product").unwrap();
        }
        return Ok(());
    };
    let rep = structure_for(p, kind, &f)?;
    if json {
        let named: Vec<_> = rep
            .named_orders
            .iter()
            .map(|(name, order)| json!({"name": name, "order": order}))
            .collect();
        let doc = json!({
            "monodromy_order": rep.monodromy_order,
            "op": kind.name(),
            "n": rep.n,
            "image_order": rep.image_order,
            "kernel_order": rep.kernel_order,
            "named_orders": named,
            "split": verdict(&rep.split),
            "inner_split": rep.inner_split.as_ref().map(verdict),
        });
        writeln!(out, "{doc}").unwrap();
        return Ok(());
    }
    writeln!(out, "|M| = {}", rep.monodromy_order).unwrap();
    writeln!(out, "op: {}", kind.name()).unwrap();
    writeln!(out, "n: {}", rep.n).unwrap();
    writeln!(out, "image: {}", rep.image_order).unwrap();
    writeln!(out, "kernel: {}", rep.kernel_order).unwrap();
    for (name, order) in &rep.named_orders {
        writeln!(out, "{name} = {order}").unwrap();
    }
    writeln!(out, "split: {}", verdict(&rep.split)).unwrap();
    if let Some(inner) = &rep.inner_split {
        writeln!(out, "inner split: {}", verdict(inner)).unwrap();
    }
    Ok(())
}

/// Dispatches to the dedicated family analyses when the factorization
/// matches one (polygon prisms under cart, all-polygon topological
/// products), otherwise to the generic projection report.
fn structure_for(
    p: &Polytope,
    kind: ProductKind,
    f: &FactorizationResult,
) -> Result<ExtensionReport, CliError> {
    let expanded: Vec<&Polytope> = f
        .factors
        .iter()
        .flat_map(|(q, m)| std::iter::repeat_n(q, *m))
        .collect();
    if kind == ProductKind::Cartesian && expanded.len() == 2 {
        for (gon_c, edge_c) in [(expanded[0], expanded[1]), (expanded[1], expanded[0])] {
            if gon_c.rank() == 2 && edge_c.rank() == 1 {
                let sides = gon_c.f_vector()[0];
                if sides >= 3 {
                    return Ok(monodromy::prism_structure(sides));
                }
            }
        }
    }
    if kind == ProductKind::Topological
        && expanded.iter().all(|q| q.rank() == 2)
        && flags(p).len() <= 10_000
    {
        let ps: Vec<usize> = expanded.iter().map(|q| q.f_vector()[0]).collect();
        return Ok(monodromy::topo_polygons_structure(&ps));
    }
    monodromy::projection_report(p, f).map_err(validation)
}

fn verdict(outcome: &ComplementOutcome) -> String {
    match outcome {
        ComplementOutcome::Split { .. } => "Split".into(),
        ComplementOutcome::NonSplit => "NonSplit".into(),
        ComplementOutcome::Unknown { reason } => format!("Unknown: {reason}"),
    }
}

/// Catalog name of a polytope when it is one, else a canonical hash.
/// Every rank-2 polytope is a polygon, so those always get a name.
pub fn describe(p: &Polytope) -> String {
    let n = p.rank();
    match n {
        -1 => "empty".into(),
        0 => "point".into(),
        1 => "edge".into(),
        2 => format!("gon({})", p.f_vector()[0]),
        _ => {
            let total = p.face_count() as u64;
            let nu = n as u32;
            if 2u64.checked_pow(nu + 1) == Some(total) {
                if let Some(name) = matched(p, catalog::simplex(n), format!("simplex({n})")) {
                    return name;
                }
            }
            if 3u64.checked_pow(nu).map(|x| x + 1) == Some(total) {
                if let Some(name) = matched(p, catalog::cube(n), format!("cube({n})")) {
                    return name;
                }
                if let Some(name) = matched(p, catalog::cross(n), format!("cross({n})")) {
                    return name;
                }
            }
            // torus(s, d) has rank d + 1 and (2s)^d + 2 faces.
            let d = n - 1;
            if let Some(doubled) = exact_root(total - 2, d as u32).filter(|&x| x % 2 == 0 && x >= 4)
            {
                let side = (doubled / 2) as usize;
                if let Some(name) =
                    matched(p, catalog::torus(side, d), format!("torus({side},{d})"))
                {
                    return name;
                }
            }
            format!("poset:{:016x}", canonical_hash(p.poset()))
        }
    }
}

fn matched(
    p: &Polytope,
    candidate: Result<Polytope, catalog::BadParameter>,
    name: String,
) -> Option<String> {
    let q = candidate.ok()?;
    (q.face_count() == p.face_count()
        && q.f_vector() == p.f_vector()
        && is_isomorphic(q.poset(), p.poset()).is_some())
    .then_some(name)
}

fn exact_root(v: u64, d: u32) -> Option<u64> {
    if v == 0 || d == 0 {
        return None;
    }
    let mut s = 1u64;
    loop {
        match s.checked_pow(d) {
            Some(x) if x < v => s += 1,
            Some(x) if x == v => return Some(s),
            _ => return None,
        }
    }
}
