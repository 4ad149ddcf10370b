//! Command-line front end: space and tower registries, subcommand
//! orchestration, table rendering, and canonical JSON reports.
//!
//! Every report is a JSON object {"checks", "input", "result"} built from
//! sorted-key maps with no floats; big integers are decimal strings, so
//! parsing and re-serializing the output is byte-identical.

use std::fs;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::atiyah::{
    atiyah_kernel_dim, minors_formula_check, AtiyahInstance, AtiyahReport, GrowthVerdict, KField,
};
use crate::complexes::{
    circle, cw_sphere, from_presentation, product, surface, torus, wedge, wedge_of_circles,
    ChainComplexSpec, GaeMatrix, GroupAlgebraElement,
};
use crate::cyclic::{knot_b1, parse_int_poly};
use crate::engine::{approximate, ApproximateOptions, FieldSpec, InvariantKind, InvariantSequence};
use crate::fab::{check_a1, fab_presentation, log_limit_check, torsion_approx, torsion_closed_form};
use crate::groups::{
    cyclic_table, dihedral8, direct_product, frattini_series, heisenberg, quaternion8,
    tower_abelian, tower_frattini, tower_line_from_integer, tower_semidirect, AbelianImage,
    FiniteQuotient, Projection, QuotientTower,
};
use crate::linalg::dense::IntMatrix;
use crate::oracles::run_self_check;
use crate::padic::{require_prime, ApproxStatus, PAdicApprox};
use crate::words::Word;
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "padic-betti", version, about = "Exact p-adic Betti numbers and torsion along towers of finite quotients")]
pub struct Cli {
    /// Run the built-in oracle cross-checks and exit.
    #[arg(long)]
    pub self_check: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Approximate a Betti number, torsion order, or Euler characteristic along a tower.
    Compute(ComputeArgs),
    /// Closed-form first Betti number of cyclic-cover towers from Alexander polynomials.
    Knot(KnotArgs),
    /// Torsion of a free-abelian-by-cyclic group: closed form against level data.
    FabTorsion(FabArgs),
    /// Kernel dimensions of a group-ring matrix along an abelian p-tower.
    Atiyah(AtiyahArgs),
    /// Frattini series of a finite p-group.
    Frattini(FrattiniArgs),
    /// Run the built-in oracle cross-checks.
    SelfCheck(SelfCheckArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("invariant").required(true).args(["betti", "torsion", "euler"])))]
pub struct ComputeArgs {
    /// Space: circle | sphere:n | torus:d | surface:g | free:r | knot[:trefoil]
    /// | fab:MATRIX | wedge(a,b) | product(a,b) | presentation:FILE | complex:FILE
    #[arg(long)]
    pub space: String,
    /// Tower: trivial[:p=P,depth=N] | abelian:p=P,d=D[,m=M,depth=N,images=..]
    /// | line:p=P,omega=W[,depth=N] | semidirect:p=P[,depth=N] | frattini:group=G[,p=P]
    #[arg(long)]
    pub tower: String,
    /// Betti number in this degree.
    #[arg(long)]
    pub betti: Option<usize>,
    /// Torsion order in this degree.
    #[arg(long)]
    pub torsion: Option<usize>,
    /// p-adic Euler characteristic.
    #[arg(long)]
    pub euler: bool,
    /// Coefficient field for Betti numbers: Q or F<ell>.
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Requested p-adic precision of the limit.
    #[arg(long, default_value_t = 6)]
    pub precision: u32,
    /// Trailing levels that must agree for convergence.
    #[arg(long, default_value_t = 3)]
    pub window: usize,
    /// Skip levels whose cochain dimension exceeds this.
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    /// Worker threads (also PADIC_BETTI_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Exit with code 2 when growth is detected.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct KnotArgs {
    /// Alexander polynomial(s), innermost first, e.g. "t^2-t+1"; repeatable.
    #[arg(long = "delta", required = true)]
    pub deltas: Vec<String>,
    /// Prime-to-p part of the covering order.
    #[arg(long)]
    pub m: u64,
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct FabArgs {
    /// Square integer matrix, rows ';'-separated, entries ','-separated; an
    /// entry is a signed sum of terms like "1+5^2".
    #[arg(long)]
    pub matrix: String,
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    /// p-adic precision of the torsion limit.
    #[arg(long, default_value_t = 4)]
    pub precision: u32,
    /// Largest level n of the subgroup tower Z^N x| p^n Z.
    #[arg(long, default_value_t = 3)]
    pub levels: u32,
    /// Trailing levels that must agree for convergence.
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AtiyahArgs {
    /// Group-ring matrix: a JSON file path, or inline JSON starting with '{'.
    #[arg(long)]
    pub matrix: String,
    /// Number of free coordinates t_1..t_d.
    #[arg(long)]
    pub d: usize,
    /// Twist rows for the remaining variables: rows ';'-separated, entries
    /// ','-separated nonnegative integers; empty for none.
    #[arg(long, default_value = "")]
    pub lambda: String,
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    /// Coefficient field: Q or F<ell>.
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Twist depth: lambda entries live mod p^depth.
    #[arg(long)]
    pub depth: u32,
    /// Number of tower levels to compute (default: depth).
    #[arg(long)]
    pub levels: Option<u32>,
    /// Target p-adic precision for the kernel-dimension limit.
    #[arg(long, default_value_t = 4)]
    pub precision: u32,
    /// Trailing levels that must agree for stabilization.
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    /// Also check the minors formula at this level (small instances only).
    #[arg(long)]
    pub minors: Option<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct FrattiniArgs {
    /// Group name: C<k>, D4, Q8, H<p> (or H<p^3>), joined with 'x' for products.
    #[arg(long)]
    pub group: String,
    /// The prime p (inferred from the group order when omitted).
    #[arg(long)]
    pub p: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SelfCheckArgs {
    /// RNG seed for the generated instances.
    #[arg(long, default_value_t = 0xC0FFEE)]
    pub seed: u64,
    /// Instances per oracle pair.
    #[arg(long, default_value_t = 25)]
    pub instances: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

/// A parsed space: the complex plus, for `fab:` spaces, the twisting matrix
/// (the `semidirect` tower reuses it).
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    pub complex: ChainComplexSpec,
    pub fab_matrix: Option<IntMatrix>,
}

/// One finished report: the canonical JSON value, the table rendering, and
/// the exit code.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: String,
    pub exit_code: i32,
}

/// Entry point for the binary: parse std::env args, print, return exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Parses an argv (for tests) and returns the report without printing.
pub fn run_args<I, T>(argv: I) -> Result<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    build_report(cli)
}

fn execute(cli: Cli) -> Result<i32> {
    let out = output_args(&cli);
    let report = build_report(cli)?;
    match out.format {
        Format::Table => print!("{}", report.table),
        Format::Json => println!("{}", report.json),
    }
    if let Some(path) = &out.output {
        fs::write(path, format!("{}\n", report.json))?;
    }
    Ok(report.exit_code)
}

fn output_args(cli: &Cli) -> OutputArgs {
    let inner = match &cli.command {
        Some(Command::Compute(a)) => &a.out,
        Some(Command::Knot(a)) => &a.out,
        Some(Command::FabTorsion(a)) => &a.out,
        Some(Command::Atiyah(a)) => &a.out,
        Some(Command::Frattini(a)) => &a.out,
        Some(Command::SelfCheck(a)) => &a.out,
        None => {
            return OutputArgs { format: Format::Table, output: None };
        }
    };
    OutputArgs { format: inner.format, output: inner.output.clone() }
}

fn build_report(cli: Cli) -> Result<Report> {
    if cli.self_check {
        return cmd_self_check(&SelfCheckArgs {
            seed: 0xC0FFEE,
            instances: 25,
            out: OutputArgs { format: Format::Table, output: None },
        });
    }
    match cli.command {
        Some(Command::Compute(a)) => cmd_compute(&a),
        Some(Command::Knot(a)) => cmd_knot(&a),
        Some(Command::FabTorsion(a)) => cmd_fab_torsion(&a),
        Some(Command::Atiyah(a)) => cmd_atiyah(&a),
        Some(Command::Frattini(a)) => cmd_frattini(&a),
        Some(Command::SelfCheck(a)) => cmd_self_check(&a),
        None => Err(Error::Parse("a subcommand or --self-check is required".into())),
    }
}

// ---------- JSON building blocks ----------

fn jbig(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn jubig(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

fn jrat(x: &BigRational) -> Value {
    if x.denom().is_one() {
        Value::String(x.numer().to_string())
    } else {
        Value::String(format!("{}/{}", x.numer(), x.denom()))
    }
}

fn status_str(s: ApproxStatus) -> &'static str {
    match s {
        ApproxStatus::Converged => "converged",
        ApproxStatus::GrowthDetected => "growth-detected",
        ApproxStatus::InsufficientData => "insufficient-data",
    }
}

fn japprox(a: &PAdicApprox) -> Value {
    json!({
        "p": a.p,
        "precision": a.precision,
        "residue": a.residue.as_ref().map(|r| r.to_string()),
        "status": status_str(a.status),
    })
}

fn jkind(kind: &InvariantKind) -> Value {
    match kind {
        InvariantKind::Betti { degree, field } => {
            json!({"degree": degree, "field": field.to_string(), "invariant": "betti"})
        }
        InvariantKind::Torsion { degree } => {
            json!({"degree": degree, "invariant": "torsion"})
        }
        InvariantKind::Euler => json!({"invariant": "euler"}),
    }
}

fn jsequence(seq: &InvariantSequence) -> Value {
    let levels: Vec<Value> = seq
        .levels
        .iter()
        .map(|l| json!({"n": l.n, "order": l.order, "value": jbig(&l.value)}))
        .collect();
    json!({
        "kind": jkind(&seq.kind),
        "levels": levels,
        "limit": japprox(&seq.limit),
    })
}

fn envelope(input: Value, result: Value, checks: Value) -> Value {
    json!({"checks": checks, "input": input, "result": result})
}

fn approx_table(a: &PAdicApprox) -> String {
    match (&a.residue, a.status) {
        (Some(r), _) => format!("{} (mod {}^{})  [{}]", r, a.p, a.precision, status_str(a.status)),
        (None, s) => format!("[{}]", status_str(s)),
    }
}

// ---------- parsers ----------

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Q);
    }
    if let Some(rest) = t.strip_prefix('F').or_else(|| t.strip_prefix('f')) {
        let ell: u64 = rest.parse().map_err(|_| Error::Parse(format!("bad field {s:?}")))?;
        require_prime(ell)?;
        return Ok(FieldSpec::Fp(ell));
    }
    Err(Error::Parse(format!("bad field {s:?}; expected Q or F<ell>")))
}

/// "1+5^2" -> 26: a signed sum of integer terms, each an integer with an
/// optional integer exponent.
fn parse_entry(s: &str) -> Result<BigInt> {
    let bad = || Error::Parse(format!("bad matrix entry {s:?}"));
    let mut total = BigInt::zero();
    let mut term = String::new();
    let mut terms: Vec<String> = Vec::new();
    for (i, ch) in s.trim().chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push(term.clone());
            term.clear();
        }
        term.push(ch);
    }
    terms.push(term);
    for t in terms {
        let t = t.trim();
        if t.is_empty() {
            return Err(bad());
        }
        let (base, exp) = match t.split_once('^') {
            Some((b, e)) => {
                let exp: u32 = e.trim().parse().map_err(|_| bad())?;
                (b.trim(), exp)
            }
            None => (t, 1),
        };
        let base: BigInt = base.parse().map_err(|_| bad())?;
        total += base.pow(exp);
    }
    Ok(total)
}

/// "1+25,5;5,1" -> [[26,5],[5,1]]: rows ';'-separated, entries ','-separated.
pub fn parse_int_matrix(s: &str) -> Result<IntMatrix> {
    let rows: Vec<&str> = s.trim().split(';').collect();
    let cols = rows
        .first()
        .map(|r| r.split(',').count())
        .ok_or_else(|| Error::Parse("empty matrix".into()))?;
    let mut m = IntMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != cols {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                entries.len(),
                cols
            )));
        }
        for (j, e) in entries.iter().enumerate() {
            m.set(i, j, parse_entry(e)?);
        }
    }
    Ok(m)
}

fn matrix_to_i64_rows(a: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    (0..a.rows)
        .map(|r| {
            (0..a.cols)
                .map(|c| {
                    a.get(r, c)
                        .to_i64()
                        .ok_or_else(|| Error::Parse("matrix entry exceeds i64".into()))
                })
                .collect()
        })
        .collect()
}

/// Splits on `sep` at paren depth zero only.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn trefoil_complex() -> Result<ChainComplexSpec> {
    // <x, y | xyx = yxy>
    let x = Word::generator(0);
    let y = Word::generator(1);
    let lhs = x.mul(&y).mul(&x);
    let rhs = y.mul(&x).mul(&y);
    from_presentation(2, &[lhs.mul(&rhs.inverse())])
}

pub fn parse_space(spec: &str) -> Result<SpaceSpec> {
    let spec = spec.trim();
    let plain = |complex: ChainComplexSpec| Ok(SpaceSpec { complex, fab_matrix: None });
    for name in ["wedge", "product"] {
        if let Some(inner) =
            spec.strip_prefix(name).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'))
        {
            let parts = split_top(inner, ',');
            if parts.len() != 2 {
                return Err(Error::Parse(format!("{name}(..) takes exactly two spaces")));
            }
            let a = parse_space(parts[0])?;
            let b = parse_space(parts[1])?;
            let joined = if name == "wedge" {
                wedge(&a.complex, &b.complex)?
            } else {
                product(&a.complex, &b.complex)?
            };
            return plain(joined);
        }
    }
    let (head, arg) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let need = |what: &str| Error::Parse(format!("space {head:?} needs {what}, e.g. {head}:{what}"));
    match head {
        "circle" => plain(circle()),
        "sphere" => {
            let n: usize = arg.ok_or_else(|| need("n"))?.parse().map_err(|_| need("n"))?;
            if n == 0 {
                return Err(Error::Parse("sphere dimension must be at least 1".into()));
            }
            plain(cw_sphere(n))
        }
        "torus" => {
            let d: usize = arg.ok_or_else(|| need("d"))?.parse().map_err(|_| need("d"))?;
            plain(torus(d))
        }
        "surface" => {
            let g: usize = arg.ok_or_else(|| need("g"))?.parse().map_err(|_| need("g"))?;
            plain(surface(g))
        }
        "free" => {
            let r: usize = arg.ok_or_else(|| need("r"))?.parse().map_err(|_| need("r"))?;
            plain(wedge_of_circles(r))
        }
        "knot" => match arg {
            None | Some("trefoil") => plain(trefoil_complex()?),
            Some(other) => Err(Error::Parse(format!(
                "unknown knot {other:?}; only \"trefoil\" is built in"
            ))),
        },
        "fab" => {
            let m = parse_int_matrix(arg.ok_or_else(|| need("MATRIX"))?)?;
            let complex = fab_presentation(&m)?;
            Ok(SpaceSpec { complex, fab_matrix: Some(m) })
        }
        "presentation" => plain(load_presentation_file(arg.ok_or_else(|| need("FILE"))?)?),
        "complex" => plain(load_complex_file(arg.ok_or_else(|| need("FILE"))?)?),
        _ => Err(Error::Parse(format!("unknown space {spec:?}"))),
    }
}

/// A word as a string of whitespace-separated letters; a letter is a
/// generator name, or the name with its first character case-flipped for
/// the inverse ("a b A" = a b a^{-1}).
fn parse_word(s: &str, gens: &[String]) -> Result<Word> {
    let mut w = Word::identity();
    for tok in s.split_whitespace() {
        if let Some(i) = gens.iter().position(|g| g == tok) {
            w = w.mul(&Word::generator(i));
            continue;
        }
        let mut chars = tok.chars();
        let flipped = match chars.next() {
            Some(c) if c.is_uppercase() => c.to_lowercase().collect::<String>() + chars.as_str(),
            Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
            None => continue,
        };
        if let Some(i) = gens.iter().position(|g| *g == flipped) {
            w = w.mul(&Word::generator(i).inverse());
            continue;
        }
        return Err(Error::Parse(format!("unknown letter {tok:?}")));
    }
    Ok(w)
}

fn string_list(v: &Value, key: &str) -> Result<Vec<String>> {
    v.get(key)
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_str).map(String::from).collect())
        .ok_or_else(|| Error::Parse(format!("missing string array {key:?}")))
}

/// {"generators": ["a","b"], "relators": ["a b A B"]} -> presentation complex.
fn load_presentation_file(path: &str) -> Result<ChainComplexSpec> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let gens = string_list(&v, "generators")?;
    let relators = string_list(&v, "relators")?
        .iter()
        .map(|r| parse_word(r, &gens))
        .collect::<Result<Vec<Word>>>()?;
    from_presentation(gens.len(), &relators)
}

fn parse_gae_entry(entry: &Value, gens: &[String]) -> Result<GroupAlgebraElement> {
    let terms = entry
        .as_array()
        .ok_or_else(|| Error::Parse("matrix entry must be a list of [word, coeff]".into()))?;
    let mut e = GroupAlgebraElement::zero();
    for t in terms {
        let pair = t.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
            Error::Parse("matrix term must be a [word, coeff] pair".into())
        })?;
        let w = pair[0]
            .as_str()
            .ok_or_else(|| Error::Parse("term word must be a string".into()))?;
        let c = pair[1]
            .as_i64()
            .ok_or_else(|| Error::Parse("term coefficient must be an integer".into()))?;
        e.add_term(parse_word(w, gens)?, c);
    }
    Ok(e)
}

fn parse_gae_matrix_json(v: &Value) -> Result<(GaeMatrix, Vec<String>)> {
    let gens = string_list(v, "generators")?;
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"entries\" array of rows".into()))?;
    let rows = entries.len();
    let cols = entries
        .first()
        .and_then(Value::as_array)
        .map(|r| r.len())
        .ok_or_else(|| Error::Parse("\"entries\" must be a nonempty array of rows".into()))?;
    let mut m = GaeMatrix::zeros(rows, cols);
    for (i, row) in entries.iter().enumerate() {
        let row = row
            .as_array()
            .filter(|r| r.len() == cols)
            .ok_or_else(|| Error::Parse(format!("row {} is ragged", i + 1)))?;
        for (j, entry) in row.iter().enumerate() {
            m.set(i, j, parse_gae_entry(entry, &gens)?);
        }
    }
    Ok((m, gens))
}

/// Complex file: {"ranks": [e0..ed], "generators": [..], "boundaries":
/// [B1..Bd]} where Bj is an e_j x e_{j-1} matrix of [word, coeff] lists.
fn load_complex_file(path: &str) -> Result<ChainComplexSpec> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let gens = string_list(&v, "generators")?;
    let ranks: Vec<usize> = v
        .get("ranks")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_u64).map(|x| x as usize).collect())
        .ok_or_else(|| Error::Parse("missing \"ranks\" array".into()))?;
    let bnds = v
        .get("boundaries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"boundaries\" array".into()))?;
    if bnds.len() + 1 != ranks.len() {
        return Err(Error::Parse(format!(
            "{} ranks need {} boundary matrices, found {}",
            ranks.len(),
            ranks.len() - 1,
            bnds.len()
        )));
    }
    let mut boundaries = Vec::with_capacity(bnds.len());
    for (j, b) in bnds.iter().enumerate() {
        let rows = b
            .as_array()
            .ok_or_else(|| Error::Parse(format!("boundary {} must be an array of rows", j + 1)))?;
        let mut m = GaeMatrix::zeros(ranks[j + 1], ranks[j]);
        if rows.len() != ranks[j + 1] {
            return Err(Error::Parse(format!(
                "boundary {} has {} rows, expected {}",
                j + 1,
                rows.len(),
                ranks[j + 1]
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|x| x.len() == ranks[j])
                .ok_or_else(|| Error::Parse(format!("boundary {} row {} is ragged", j + 1, r + 1)))?;
            for (c, entry) in row.iter().enumerate() {
                m.set(r, c, parse_gae_entry(entry, &gens)?);
            }
        }
        boundaries.push(m);
    }
    let complete = v.get("complete").and_then(Value::as_bool).unwrap_or(false);
    let spec = ChainComplexSpec { num_gens: gens.len(), ranks, boundaries, complete };
    spec.validate()?;
    Ok(spec)
}

fn parse_opts(s: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for kv in s.split(',').filter(|t| !t.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, found {kv:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn opt_u64(opts: &std::collections::BTreeMap<String, String>, key: &str) -> Result<Option<u64>> {
    opts.get(key)
        .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad integer for {key}: {v:?}"))))
        .transpose()
}

fn req_u64(opts: &std::collections::BTreeMap<String, String>, key: &str, what: &str) -> Result<u64> {
    opt_u64(opts, key)?.ok_or_else(|| Error::Parse(format!("tower {what} requires {key}=<int>")))
}

fn tower_trivial(p: u64, depth: u32, num_gens: usize) -> Result<QuotientTower> {
    require_prime(p)?;
    if depth == 0 {
        return Err(Error::EmptyTower);
    }
    let mut q = cyclic_table(1);
    q.generator_images = vec![0; num_gens];
    Ok(QuotientTower {
        p,
        levels: vec![q; depth as usize],
        projections: vec![Projection::Map(vec![0]); depth as usize - 1],
    })
}

/// "1:1.0|0:0.1" -> images [(m_part 1, coords [1,0]), (m_part 0, coords [0,1])].
fn parse_images(s: &str, d: usize) -> Result<Vec<AbelianImage>> {
    let mut images = Vec::new();
    for row in s.split('|') {
        let (m_part, coords) = match row.split_once(':') {
            Some((m, c)) => (m.trim().parse().map_err(|_| Error::Parse(format!("bad image {row:?}")))?, c),
            None => (1, row),
        };
        let coords: Vec<i64> = coords
            .split('.')
            .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad image {row:?}"))))
            .collect::<Result<_>>()?;
        if coords.len() != d {
            return Err(Error::Parse(format!("image {row:?} has {} coords, expected {d}", coords.len())));
        }
        images.push(AbelianImage::new(m_part, coords));
    }
    Ok(images)
}

pub fn parse_tower(spec: &str, num_gens: usize, fab: Option<&IntMatrix>) -> Result<QuotientTower> {
    let spec = spec.trim();
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, r),
        None => (spec, ""),
    };
    let opts = parse_opts(rest)?;
    match head {
        "trivial" => {
            let p = opt_u64(&opts, "p")?.unwrap_or(2);
            let depth = opt_u64(&opts, "depth")?.unwrap_or(4) as u32;
            tower_trivial(p, depth, num_gens)
        }
        "abelian" => {
            let p = req_u64(&opts, "p", "abelian")?;
            let d = req_u64(&opts, "d", "abelian")? as usize;
            let m = opt_u64(&opts, "m")?.unwrap_or(1);
            let depth = opt_u64(&opts, "depth")?.unwrap_or(4) as u32;
            let images = match opts.get("images") {
                Some(s) => parse_images(s, d)?,
                None => (0..num_gens)
                    .map(|i| {
                        let mut coords = vec![0i64; d];
                        coords[i % d] = 1;
                        AbelianImage::new(1, coords)
                    })
                    .collect(),
            };
            if images.len() != num_gens {
                return Err(Error::GeneratorMismatch { complex: num_gens, tower: images.len() });
            }
            tower_abelian(m, p, d, depth, &images)
        }
        "line" => {
            let p = req_u64(&opts, "p", "line")?;
            let depth = opt_u64(&opts, "depth")?.unwrap_or(5) as u32;
            let omega: BigInt = opts
                .get("omega")
                .ok_or_else(|| Error::Parse("tower line requires omega=<int>".into()))?
                .parse()
                .map_err(|_| Error::Parse("bad integer for omega".into()))?;
            tower_line_from_integer(p, depth, &omega)
        }
        "semidirect" => {
            let p = req_u64(&opts, "p", "semidirect")?;
            let depth = opt_u64(&opts, "depth")?.unwrap_or(2) as u32;
            let a = fab.ok_or_else(|| {
                Error::Parse("tower semidirect reuses the matrix of a fab: space".into())
            })?;
            tower_semidirect(&matrix_to_i64_rows(a)?, p, depth)
        }
        "frattini" => {
            let name = opts
                .get("group")
                .ok_or_else(|| Error::Parse("tower frattini requires group=<name>".into()))?;
            let q = parse_group(name)?;
            let p = match opt_u64(&opts, "p")? {
                Some(p) => p,
                None => infer_group_prime(q.order)?,
            };
            tower_frattini(&q, p)
        }
        _ => Err(Error::Parse(format!("unknown tower {spec:?}"))),
    }
}

fn infer_group_prime(order: usize) -> Result<u64> {
    let mut n = order as u64;
    if n < 2 {
        return Err(Error::Parse("trivial group has no defining prime".into()));
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > n {
        p = n;
    }
    while n % p == 0 {
        n /= p;
    }
    if n != 1 {
        return Err(Error::Parse(format!("order {order} is not a prime power; pass --p")));
    }
    Ok(p)
}

fn parse_group_atom(s: &str) -> Result<FiniteQuotient> {
    let s = s.trim();
    if let Some(k) = s.strip_prefix('C') {
        let k: u64 = k.parse().map_err(|_| Error::Parse(format!("bad cyclic order in {s:?}")))?;
        if k == 0 {
            return Err(Error::Parse("cyclic group order must be positive".into()));
        }
        return Ok(cyclic_table(k));
    }
    if s == "D4" || s == "D8" {
        return Ok(dihedral8());
    }
    if s == "Q8" {
        return Ok(quaternion8());
    }
    if let Some(n) = s.strip_prefix('H') {
        let n: u64 = n.parse().map_err(|_| Error::Parse(format!("bad Heisenberg size in {s:?}")))?;
        let p = match n {
            _ if crate::padic::is_prime(n) => n,
            _ => {
                let r = (n as f64).cbrt().round() as u64;
                if r.pow(3) == n && crate::padic::is_prime(r) {
                    r
                } else {
                    return Err(Error::Parse(format!(
                        "H takes a prime p or its cube, found {n}"
                    )));
                }
            }
        };
        return Ok(heisenberg(p));
    }
    Err(Error::Parse(format!(
        "unknown group {s:?}; known atoms: C<k>, D4, Q8, H<p>"
    )))
}

/// "C2xC4" -> direct product of the named atoms.
pub fn parse_group(name: &str) -> Result<FiniteQuotient> {
    let mut parts = name.trim().split('x');
    let first = parts.next().ok_or_else(|| Error::Parse("empty group name".into()))?;
    let mut q = parse_group_atom(first)?;
    for part in parts {
        q = direct_product(&q, &parse_group_atom(part)?);
    }
    Ok(q)
}

// ---------- subcommands ----------

fn cmd_compute(args: &ComputeArgs) -> Result<Report> {
    let space = parse_space(&args.space)?;
    let tower = parse_tower(&args.tower, space.complex.num_gens, space.fab_matrix.as_ref())?;
    let kind = if let Some(degree) = args.betti {
        InvariantKind::Betti { degree, field: parse_field(&args.field)? }
    } else if let Some(degree) = args.torsion {
        InvariantKind::Torsion { degree }
    } else {
        InvariantKind::Euler
    };
    let opts = ApproximateOptions {
        precision: args.precision,
        window: args.window,
        budget: args.budget,
        threads: args.threads,
    };
    let seq = approximate(&space.complex, &tower, kind.clone(), &opts)?;

    let input = json!({
        "budget": args.budget,
        "precision": args.precision,
        "space": args.space,
        "tower": args.tower,
        "window": args.window,
    });
    let checks = json!({"euler": seq.checks.euler, "monotone": seq.checks.monotone});
    let result = jsequence(&seq);

    let mut t = String::new();
    let kind_line = match &kind {
        InvariantKind::Betti { degree, field } => format!("betti degree {degree} over {field}"),
        InvariantKind::Torsion { degree } => format!("torsion degree {degree}"),
        InvariantKind::Euler => "euler characteristic".into(),
    };
    t.push_str(&format!("invariant  {kind_line}\n"));
    t.push_str(&format!("space      {}\n", args.space));
    t.push_str(&format!("tower      {}  (p = {}, {} levels)\n", args.tower, tower.p, tower.levels.len()));
    t.push_str(&format!("{:>4}  {:>10}  value\n", "n", "order"));
    for l in &seq.levels {
        t.push_str(&format!("{:>4}  {:>10}  {}\n", l.n, l.order, l.value));
    }
    t.push_str(&format!("limit      {}\n", approx_table(&seq.limit)));
    if let Some(m) = seq.checks.monotone {
        t.push_str(&format!("monotone   {m}\n"));
    }
    if let Some(e) = seq.checks.euler {
        t.push_str(&format!("euler-sum  {e}\n"));
    }

    let growth = seq.limit.status == ApproxStatus::GrowthDetected;
    let exit_code = if growth && args.strict { 2 } else { 0 };
    Ok(Report { json: envelope(input, result, checks), table: t, exit_code })
}

fn cmd_knot(args: &KnotArgs) -> Result<Report> {
    let deltas: Vec<Vec<BigInt>> =
        args.deltas.iter().map(|d| parse_int_poly(d)).collect::<Result<_>>()?;
    let (b1, counts) = knot_b1(&deltas, args.m, args.p)?;

    let input = json!({
        "deltas": args.deltas,
        "m": args.m,
        "p": args.p,
    });
    let jcounts: Vec<Value> = counts
        .iter()
        .map(|c| {
            json!({
                "count": c.count,
                "stabilized-at": c.stabilized_at,
                "witness-order": jubig(&c.witness_order),
            })
        })
        .collect();
    let result = json!({"b1": b1, "roots": jcounts});
    let checks = json!({"delta-at-one-is-unit": true});

    let mut t = String::new();
    t.push_str(&format!("b1 along Z/m x Z_p (m = {}, p = {}) = {}\n", args.m, args.p, b1));
    t.push_str(&format!("{:>3}  {:>6}  {:>13}  witness-order\n", "i", "count", "stabilized-at"));
    for (i, c) in counts.iter().enumerate() {
        t.push_str(&format!(
            "{:>3}  {:>6}  {:>13}  {}\n",
            i + 1,
            c.count,
            c.stabilized_at,
            c.witness_order
        ));
    }
    Ok(Report { json: envelope(input, result, checks), table: t, exit_code: 0 })
}

fn cmd_fab_torsion(args: &FabArgs) -> Result<Report> {
    let a = parse_int_matrix(&args.matrix)?;
    let cert = check_a1(&a)?;
    let closed = torsion_closed_form(&a, args.p, args.precision)?;
    let seq = torsion_approx(&a, args.p, args.levels, args.precision, args.window)?;
    let valuations = log_limit_check(&a, args.p, args.levels, args.precision)?;
    let routes_agree = closed.agrees_with(&seq.limit);

    let input = json!({
        "levels": args.levels,
        "matrix": args.matrix,
        "p": args.p,
        "precision": args.precision,
        "window": args.window,
    });
    let levels: Vec<Value> = seq
        .values
        .iter()
        .zip(&seq.signs)
        .enumerate()
        .map(|(n, (v, s))| json!({"n": n, "sign": *s as i64, "torsion": jbig(v)}))
        .collect();
    let result = json!({
        "charpoly": cert.charpoly.iter().map(jbig).collect::<Vec<Value>>(),
        "closed-form": japprox(&closed),
        "levels": levels,
        "limit": japprox(&seq.limit),
    });
    let checks = json!({
        "log-limit-valuations": valuations,
        "no-root-of-unity-eigenvalue": cert.holds,
        "routes-agree": routes_agree,
    });

    let mut t = String::new();
    t.push_str(&format!("matrix       {}\n", args.matrix));
    t.push_str(&format!("prime        {}\n", args.p));
    t.push_str(&format!("{:>4}  sign  torsion\n", "n"));
    for (n, (v, s)) in seq.values.iter().zip(&seq.signs).enumerate() {
        t.push_str(&format!("{:>4}  {:>4}  {}\n", n, s, v));
    }
    t.push_str(&format!("sequence     {}\n", approx_table(&seq.limit)));
    t.push_str(&format!("closed form  {}\n", approx_table(&closed)));
    t.push_str(&format!("routes agree {routes_agree}\n"));
    t.push_str(&format!("log-limit valuations {:?}\n", valuations));

    Ok(Report {
        json: envelope(input, result, checks),
        table: t,
        exit_code: if routes_agree { 0 } else { 1 },
    })
}

fn parse_kfield(s: &str) -> Result<KField> {
    match parse_field(s)? {
        FieldSpec::Q => Ok(KField::Q),
        FieldSpec::Fp(ell) => Ok(KField::fp(ell)),
    }
}

fn parse_lambda(s: &str) -> Result<Vec<Vec<BigUint>>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<BigUint>()
                        .map_err(|_| Error::Parse(format!("bad lambda entry {e:?}")))
                })
                .collect()
        })
        .collect()
}

fn verdict_str(v: &GrowthVerdict) -> &'static str {
    match v {
        GrowthVerdict::Stabilized => "stabilized",
        GrowthVerdict::FastGrowth => "fast-growth",
        GrowthVerdict::Inconclusive => "inconclusive",
    }
}

fn jatiyah(report: &AtiyahReport) -> Value {
    let levels: Vec<Value> = report
        .levels
        .iter()
        .map(|l| {
            json!({
                "n": l.n,
                "normalized": jrat(&l.normalized),
                "nullity": l.nullity,
                "order": l.order,
            })
        })
        .collect();
    let bounds: Vec<Value> = report
        .dichotomy
        .levels
        .iter()
        .map(|b| {
            json!({
                "bound": jrat(&b.bound),
                "meets-bound": b.meets_bound,
                "n": b.n,
                "value": jubig(&b.value),
            })
        })
        .collect();
    json!({
        "bounds": bounds,
        "levels": levels,
        "limit": japprox(&report.limit),
        "stabilized": report.stabilized.as_ref().map(jubig),
        "verdict": verdict_str(&report.dichotomy.verdict),
    })
}

fn cmd_atiyah(args: &AtiyahArgs) -> Result<Report> {
    let text = if args.matrix.trim_start().starts_with('{') {
        args.matrix.clone()
    } else {
        fs::read_to_string(&args.matrix)?
    };
    let v: Value = serde_json::from_str(&text)?;
    let (matrix, _gens) = parse_gae_matrix_json(&v)?;
    let lambda = parse_lambda(&args.lambda)?;
    let field = parse_kfield(&args.field)?;
    let inst = AtiyahInstance {
        matrix,
        d: args.d,
        lambda,
        p: args.p,
        depth: args.depth,
        field,
    };
    let levels = args.levels.unwrap_or(args.depth);
    let report = atiyah_kernel_dim(&inst, levels, args.precision, args.window)?;
    let minors = args.minors.map(|n| minors_formula_check(&inst, n)).transpose()?;

    let input = json!({
        "d": args.d,
        "depth": args.depth,
        "field": args.field,
        "lambda": args.lambda,
        "levels": levels,
        "p": args.p,
        "precision": args.precision,
        "window": args.window,
    });
    let result = jatiyah(&report);
    let mut checks = serde_json::Map::new();
    checks.insert(
        "dichotomy-bounds-hold".into(),
        Value::Bool(report.dichotomy.levels.iter().all(|b| b.meets_bound)
            || report.dichotomy.verdict != GrowthVerdict::FastGrowth),
    );
    if let Some(m) = &minors {
        checks.insert("minors-direct".into(), Value::from(m.direct as u64));
        checks.insert("minors-by-characters".into(), Value::from(m.by_characters as u64));
        checks.insert("minors-agree".into(), Value::Bool(m.direct == m.by_characters));
    }

    let mut t = String::new();
    t.push_str(&format!("field      {}   p = {}\n", args.field, args.p));
    t.push_str(&format!("{:>4}  {:>10}  {:>8}  normalized\n", "n", "order", "nullity"));
    for l in &report.levels {
        t.push_str(&format!(
            "{:>4}  {:>10}  {:>8}  {}\n",
            l.n,
            l.order,
            l.nullity,
            l.normalized
        ));
    }
    t.push_str(&format!("verdict    {}\n", verdict_str(&report.dichotomy.verdict)));
    t.push_str(&format!("limit      {}\n", approx_table(&report.limit)));
    if let Some(v) = &report.stabilized {
        t.push_str(&format!("stabilized {v}\n"));
    }
    if let Some(m) = &minors {
        t.push_str(&format!(
            "minors     direct {} vs characters {} over {} characters\n",
            m.direct, m.by_characters, m.characters
        ));
    }

    Ok(Report { json: envelope(input, result, Value::Object(checks)), table: t, exit_code: 0 })
}

fn cmd_frattini(args: &FrattiniArgs) -> Result<Report> {
    let q = parse_group(&args.group)?;
    let p = match args.p {
        Some(p) => p,
        None => infer_group_prime(q.order)?,
    };
    let series = frattini_series(&q, p)?;
    let mut orders: Vec<usize> = vec![q.order];
    orders.extend(series.iter().map(|s| s.len()));
    let length = series.len();

    let input = json!({"group": args.group, "p": p});
    let result = json!({
        "length": length,
        "order": q.order,
        "series-orders": orders,
    });
    let checks = json!({
        "is-p-group": true,
        "reaches-identity": orders.last() == Some(&1),
    });

    let mut t = String::new();
    t.push_str(&format!("group      {}   |G| = {}   p = {}\n", args.group, q.order, p));
    t.push_str(&format!(
        "series     {}\n",
        orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" > ")
    ));
    t.push_str(&format!("length     {length}\n"));
    Ok(Report { json: envelope(input, result, checks), table: t, exit_code: 0 })
}

fn cmd_self_check(args: &SelfCheckArgs) -> Result<Report> {
    let report = run_self_check(args.seed, args.instances)?;
    let all = report.all_agree();

    let input = json!({"instances": args.instances, "seed": args.seed});
    let pairs: Vec<Value> = report
        .pairs
        .iter()
        .map(|p| json!({"agreements": p.agreements, "instances": p.instances, "name": p.name}))
        .collect();
    let result = json!({"pairs": pairs});
    let checks = json!({"all-agree": all});

    let mut t = String::new();
    t.push_str(&format!("oracle self-check  seed = {}\n", args.seed));
    for p in &report.pairs {
        t.push_str(&format!("{:>3}/{:<3}  {}\n", p.agreements, p.instances, p.name));
    }
    t.push_str(&format!("all agree  {all}\n"));
    Ok(Report { json: envelope(input, result, checks), table: t, exit_code: if all { 0 } else { 1 } })
}
