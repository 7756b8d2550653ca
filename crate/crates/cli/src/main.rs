use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use triaut::charp;
use triaut::charzero::{self, Derivation, PreimageOperator};
use triaut::finite_order::classify_finite_order_b2;
use triaut::{canonical_form, limits, parse_map, parse_polynomial, ClassReport, ConjugationWitness, Error, Field, Group, Order, Polynomial, TriangularMap};

/// Exact algebra of triangular polynomial automorphisms over Q and F_p.
///
/// Maps are written as `F2 [x1 -> x1 + x2, x2 -> x2 + 1]` (or `Q [...]`).
/// Exit status: 0 success, 2 parse error, 3 precondition violated,
/// 4 no solution, 5 resource cap hit.
#[derive(Parser, Debug)]
#[command(name = "triaut", version)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Re-verify witnesses and solutions before printing.
    #[arg(long, global = true)]
    check: bool,

    /// Cap on the number of terms of any intermediate polynomial.
    #[arg(long, global = true, env = "TRIAUT_MAX_TERMS", default_value_t = limits::DEFAULT_MAX_TERMS)]
    max_terms: usize,

    /// Cap on the number of truncation-degree increases in linear solves.
    #[arg(long, global = true, default_value_t = limits::DEFAULT_MAX_DEGREE_GROWTH)]
    max_degree_growth: usize,

    /// Run the command once per line of FILE (maps on one line separated by
    /// `;`), processing lines in parallel.
    #[arg(long, global = true, value_name = "FILE")]
    batch: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Inputs {
    /// Maps as text; `-` reads standard input.
    #[arg(value_name = "MAP")]
    maps: Vec<String>,

    /// Read a map from a file (repeatable; files come before positional maps).
    #[arg(short = 'f', long = "file", value_name = "FILE")]
    files: Vec<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Order of the map (`infinite` if it has none).
    Order(Inputs),
    /// Order of the permutation the map induces on F_p^n.
    PermOrder(Inputs),
    /// The m-th power (m may be negative).
    Pow {
        #[arg(short = 'm', allow_negative_numbers = true)]
        m: i64,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// F ∘ G, i.e. the components F_i(G).
    Compose(Inputs),
    Inverse(Inputs),
    /// g(F) for a polynomial g.
    Apply {
        #[arg(short = 'g', value_name = "POLY")]
        g: String,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Invariants x_i^p - a_i^(p-1) x_i + b_i of a maximal-order map.
    Invariants(Inputs),
    /// Canonical form with a conjugating witness.
    Canon {
        #[arg(long, default_value = "ba", value_parser = parse_group)]
        group: Group,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Write g = r + N(h) with r in the Frobenius representative system.
    Split {
        #[arg(short = 'g', value_name = "POLY")]
        g: String,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Solve N(h) = g, D(h) = g or M(h) = g.
    Preimage {
        #[arg(short = 'g', value_name = "POLY")]
        g: String,
        #[arg(long, default_value = "n", value_parser = ["n", "d", "m"])]
        op: String,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// The locally nilpotent derivation D with exp(D) = F (characteristic 0).
    Log(Inputs),
    /// exp(D) for a triangular derivation written like a map.
    Exp(Inputs),
    /// Conjugacy class: GA_1, plane maps, or finite-order plane maps.
    Classify {
        #[arg(long, value_parser = parse_group)]
        group: Option<Group>,
        /// Use the finite-order standard forms (A, U, M, S).
        #[arg(long)]
        finite: bool,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Decide conjugacy of two maps by comparing canonical forms.
    Eq {
        #[arg(long, default_value = "ba", value_parser = parse_group)]
        group: Group,
        #[command(flatten)]
        inputs: Inputs,
    },
}

fn parse_group(s: &str) -> Result<Group, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Command {
    fn inputs(&self) -> &Inputs {
        match self {
            Command::Order(i)
            | Command::PermOrder(i)
            | Command::Compose(i)
            | Command::Inverse(i)
            | Command::Invariants(i)
            | Command::Log(i)
            | Command::Exp(i) => i,
            Command::Pow { inputs, .. }
            | Command::Apply { inputs, .. }
            | Command::Canon { inputs, .. }
            | Command::Split { inputs, .. }
            | Command::Preimage { inputs, .. }
            | Command::Classify { inputs, .. }
            | Command::Eq { inputs, .. } => inputs,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Order(_) => "order",
            Command::PermOrder(_) => "perm-order",
            Command::Pow { .. } => "pow",
            Command::Compose(_) => "compose",
            Command::Inverse(_) => "inverse",
            Command::Apply { .. } => "apply",
            Command::Invariants(_) => "invariants",
            Command::Canon { .. } => "canon",
            Command::Split { .. } => "split",
            Command::Preimage { .. } => "preimage",
            Command::Log(_) => "log",
            Command::Exp(_) => "exp",
            Command::Classify { .. } => "classify",
            Command::Eq { .. } => "eq",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Command::Compose(_) | Command::Eq { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
    Check(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) => exit_code(e),
            Failure::Io(_) | Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) | Failure::Usage(m) => f.write_str(m),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::NotTriangular { .. } | Error::InvalidPrime { .. } | Error::ArityMismatch { .. } => 2,
        Error::NoSolution { .. } | Error::InternalNoSolution { .. } => 4,
        Error::ResourceCap(_) | Error::DegreeGrowthExceeded { .. } | Error::TooManyPoints { .. } => 5,
        _ => 3,
    }
}

/// What a command produced: text for humans and a JSON payload.
struct Output {
    text: String,
    payload: Vec<(&'static str, Value)>,
}

impl Output {
    fn new(text: impl Into<String>) -> Self {
        Output { text: text.into(), payload: Vec::new() }
    }

    fn with(mut self, key: &'static str, value: Value) -> Self {
        self.payload.push((key, value));
        self
    }
}

fn map_json(f: &TriangularMap) -> Value {
    json!({
        "field": f.field().to_string(),
        "n": f.nvars(),
        "rows": f.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn order_json(o: Order) -> Value {
    match o {
        Order::Finite(k) => json!(k as u64),
        Order::Infinite => json!("infinite"),
    }
}

fn witness_json(w: &ConjugationWitness) -> Value {
    json!({
        "composed": map_json(w.composed()),
        "steps": w.steps().iter().map(map_json).collect::<Vec<_>>(),
    })
}

fn report_output(r: &ClassReport) -> Output {
    let text = format!(
        "label: {}\ncanonical: {}\nwitness: {}\norder: {}",
        r.label,
        r.canonical,
        r.witness.composed(),
        r.order
    );
    Output::new(text)
        .with("label", json!(r.label.name()))
        .with("canonical", map_json(&r.canonical))
        .with("witness", witness_json(&r.witness))
        .with("order", order_json(r.order))
}

fn read_source(s: &str) -> Result<String, Failure> {
    if s == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        Ok(s.to_string())
    }
}

fn collect_texts(inputs: &Inputs) -> Result<Vec<String>, Failure> {
    let mut out = Vec::new();
    for path in &inputs.files {
        out.push(fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?);
    }
    for m in &inputs.maps {
        out.push(read_source(m)?);
    }
    Ok(out)
}

fn check(ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(what.to_string()))
    }
}

fn run(cmd: &Command, texts: &[String], verify: bool) -> Result<Output, Failure> {
    if texts.len() != cmd.arity() {
        return Err(Failure::Usage(format!("{} expects {} map(s), got {}", cmd.name(), cmd.arity(), texts.len())));
    }
    if let Command::Exp(_) = cmd {
        let d: Derivation = texts[0].parse()?;
        let f = charzero::exp_derivation(&d)?;
        if verify {
            check(charzero::log_map(&f)? == d, "log(exp D) != D")?;
        }
        return Ok(Output::new(f.to_string()).with("result", map_json(&f)));
    }
    let maps = texts.iter().map(|t| parse_map(t)).collect::<Result<Vec<_>, _>>()?;
    let f = &maps[0];
    let poly = |g: &str| parse_polynomial(g, f.field(), f.nvars());
    let out = match cmd {
        Command::Order(_) => {
            let o = f.order()?;
            Output::new(o.to_string()).with("order", order_json(o))
        }
        Command::PermOrder(_) => {
            let o = f.perm_order()?;
            Output::new(o.to_string()).with("perm_order", json!(o as u64))
        }
        Command::Pow { m, .. } => {
            let g = f.power(*m)?;
            if verify {
                check(g.compose(&f.power(-*m)?)?.is_identity(), "F^m ∘ F^-m is not the identity")?;
            }
            Output::new(g.to_string()).with("result", map_json(&g))
        }
        Command::Compose(_) => {
            let g = f.compose(&maps[1])?;
            Output::new(g.to_string()).with("result", map_json(&g))
        }
        Command::Inverse(_) => {
            let g = f.inverse()?;
            if verify {
                check(f.compose(&g)?.is_identity() && g.compose(f)?.is_identity(), "inverse does not compose to the identity")?;
            }
            Output::new(g.to_string()).with("result", map_json(&g))
        }
        Command::Apply { g, .. } => {
            let r = f.apply(&poly(g)?)?;
            Output::new(r.to_string()).with("result", json!(r.to_string()))
        }
        Command::Invariants(_) => {
            let set = charp::invariant_generators(f)?;
            if verify {
                for g in &set.generators {
                    check(&f.apply(g)? == g, "a generator is not invariant")?;
                }
            }
            let text = set.generators.iter().enumerate().map(|(i, g)| format!("x{}~ = {g}", i + 1)).collect::<Vec<_>>().join("\n");
            let shape: Vec<Value> = set.shape.iter().map(|(a, b)| json!({"a": a.to_string(), "b": b.to_string()})).collect();
            Output::new(text)
                .with("generators", json!(set.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>()))
                .with("shape", json!(shape))
        }
        Command::Canon { group, .. } => {
            let r = canonical_form(f, *group)?;
            if verify {
                check(r.verify(f)?, "witness does not recompose")?;
            }
            report_output(&r)
        }
        Command::Split { g, .. } => {
            let g = poly(g)?;
            let s = charp::split(f, &g)?;
            if verify {
                check(s.r.add(&f.op_n(&s.h)?) == g, "r + N(h) != g")?;
            }
            Output::new(format!("r = {}\nh = {}\nunique: {}", s.r, s.h, s.unique))
                .with("r", json!(s.r.to_string()))
                .with("h", json!(s.h.to_string()))
                .with("unique", json!(s.unique))
        }
        Command::Preimage { g, op, .. } => {
            let g = poly(g)?;
            let (h, image): (Polynomial, Box<dyn Fn(&Polynomial) -> Result<Polynomial, Error>>) = match (op.as_str(), f.field()) {
                ("m", _) => (charp::solve_m_preimage(f, &g)?, Box::new(|h| f.op_m(1, h))),
                ("n", Field::Prime(_)) => (charp::solve_n_preimage(f, &g)?, Box::new(|h| f.op_n(h))),
                ("n", Field::Rationals) => {
                    (charzero::solve_preimage_char0(f, &g, PreimageOperator::N)?, Box::new(|h| f.op_n(h)))
                }
                _ => {
                    let d = charzero::log_map(f)?;
                    let h = charzero::solve_preimage_char0(f, &g, PreimageOperator::D)?;
                    (h, Box::new(move |h| d.apply(h)))
                }
            };
            if verify {
                check(image(&h)? == g, "preimage does not map to the target")?;
            }
            Output::new(h.to_string()).with("op", json!(op)).with("preimage", json!(h.to_string()))
        }
        Command::Log(_) => {
            let d = charzero::log_map(f)?;
            if verify {
                check(&charzero::exp_derivation(&d)? == f, "exp(log F) != F")?;
            }
            let images: Vec<String> = d.images().iter().map(|g| g.to_string()).collect();
            Output::new(d.to_string()).with("derivation", json!(images))
        }
        Command::Classify { group, finite, .. } => {
            if *finite {
                let r = classify_finite_order_b2(f, true)?;
                if verify {
                    check(r.verify(f)?, "witness does not recompose")?;
                }
                let p = &r.parameters;
                let text = format!(
                    "label: {}\ncanonical: {}\nwitness: {}\norder: {}",
                    r.label,
                    r.canonical,
                    r.witness.composed(),
                    r.order
                );
                Output::new(text)
                    .with("label", json!(r.label.name()))
                    .with("canonical", map_json(&r.canonical))
                    .with("witness", witness_json(&r.witness))
                    .with("order", order_json(r.order))
                    .with(
                        "parameters",
                        json!({"m": p.m.map(|x| x as u64), "l": p.l.map(|x| x as u64), "a": p.a.to_string()}),
                    )
            } else {
                let group = group.unwrap_or(Group::Baa);
                let r = canonical_form(f, group)?;
                if verify {
                    check(r.verify(f)?, "witness does not recompose")?;
                }
                report_output(&r)
            }
        }
        Command::Eq { group, .. } => {
            let g = &maps[1];
            if f.field() != g.field() || f.nvars() != g.nvars() {
                return Err(Error::FieldMismatch.into());
            }
            let (rf, rg) = (canonical_form(f, *group)?, canonical_form(g, *group)?);
            if rf.canonical == rg.canonical {
                // f.conjugate(wf) = C = g.conjugate(wg), so g = f.conjugate(wf ∘ wg^-1).
                let tau = rf.witness.composed().compose(&rg.witness.composed().inverse()?)?;
                if verify {
                    check(&f.conjugate(&tau)? == g, "conjugator does not take F to G")?;
                }
                Output::new(format!("equivalent\nwitness: {tau}\ncanonical: {}", rf.canonical))
                    .with("equivalent", json!(true))
                    .with("witness", map_json(&tau))
                    .with("canonical", json!([map_json(&rf.canonical), map_json(&rg.canonical)]))
            } else {
                Output::new(format!("not equivalent\ncanonical F: {}\ncanonical G: {}", rf.canonical, rg.canonical))
                    .with("equivalent", json!(false))
                    .with("witness", Value::Null)
                    .with("canonical", json!([map_json(&rf.canonical), map_json(&rg.canonical)]))
            }
        }
        Command::Exp(_) => unreachable!("handled above"),
    };
    let out = if verify { out.with("check", json!(true)) } else { out };
    Ok(out.with_input(f))
}

impl Output {
    fn with_input(mut self, f: &TriangularMap) -> Self {
        let mut head = vec![
            ("field", json!(f.field().to_string())),
            ("n", json!(f.nvars())),
            ("rows", json!(f.components().iter().map(|c| c.to_string()).collect::<Vec<_>>())),
        ];
        head.append(&mut self.payload);
        self.payload = head;
        self
    }

    fn json(&self, command: &str) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("command".into(), json!(command));
        for (k, v) in &self.payload {
            obj.insert((*k).into(), v.clone());
        }
        Value::Object(obj)
    }
}

fn error_json(command: &str, e: &Failure) -> Value {
    json!({"command": command, "error": e.to_string(), "exit_code": e.exit_code()})
}

/// Renders one result; returns the text and the exit code.
fn render(cmd: &Command, result: Result<Output, Failure>, as_json: bool, compact: bool) -> (String, u8, bool) {
    match result {
        Ok(out) if as_json => {
            let v = out.json(cmd.name());
            let s = if compact { v.to_string() } else { serde_json::to_string_pretty(&v).expect("serializable") };
            (s, 0, false)
        }
        Ok(out) => (out.text, 0, false),
        Err(e) if as_json => (error_json(cmd.name(), &e).to_string(), e.exit_code(), false),
        Err(e) => (format!("error: {e}"), e.exit_code(), true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    limits::set_max_terms(cli.max_terms);
    limits::set_max_degree_growth(cli.max_degree_growth);
    let cmd = &cli.command;

    if let Some(path) = &cli.batch {
        let content = match fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        let lines: Vec<&str> = content.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        let results: Vec<(String, u8, bool)> = lines
            .par_iter()
            .map(|line| {
                let texts: Vec<String> = line.split(';').map(|s| s.trim().to_string()).collect();
                render(cmd, run(cmd, &texts, cli.check), cli.json, true)
            })
            .collect();
        let mut code = 0;
        for (text, c, _) in results {
            emit(&text);
            code = code.max(c);
        }
        return ExitCode::from(code);
    }

    let result = collect_texts(cmd.inputs()).and_then(|texts| run(cmd, &texts, cli.check));
    let (text, code, to_stderr) = render(cmd, result, cli.json, false);
    if to_stderr {
        eprintln!("{text}");
    } else {
        emit(&text);
    }
    ExitCode::from(code)
}

/// Prints a line to stdout; a closed pipe (`triaut ... | head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}
