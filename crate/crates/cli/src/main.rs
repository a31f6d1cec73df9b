//! `ringcodes`: additive cyclic codes over towers `Z_{p^e} ⊆ R ⊆ S` from
//! the command line — factorization of `x^n - 1`, canonical code
//! construction, trace duals, complementarity decisions, grid audits, and
//! brute-force distances.
//!
//! JSON (`--json`) is the machine interface; the human-readable text is a
//! pure rendering of the same data, and `audit` always emits JSON Lines.
//! Repeated invocations are byte-identical. Exit codes: 0 success, 2
//! validation error, 3 budget exceeded, 4 disagreement between the fast
//! path and the brute-force oracle (only with `--oracle`).

use std::fmt::Write as _;
use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ringcodes::acp::{acp_verdict, audit_theorems, construct_acp_pairs, AcpVerdict};
use ringcodes::additive_codes::{code_from_descriptor, AdditiveCyclicCode, CodeDescriptor};
use ringcodes::oracle::{brute_acp, brute_dual, WordSet};
use ringcodes::poly_cyclic::{factor_xn1, CyclicWord, FactorBasis, RPoly};
use ringcodes::ring_tower::{ExtensionContext, Level, RingElem};
use ringcodes::trace_duality::{trace_dual, trace_dual_raw};

#[derive(Parser)]
#[command(
    name = "ringcodes",
    version,
    about = "Additive cyclic codes over degree-2 Galois extensions of finite chain rings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Base characteristic (odd prime)
    #[arg(short, global = true, default_value_t = 3)]
    p: u64,

    /// Chain length: the base ring is Z_{p^e}
    #[arg(short, global = true, default_value_t = 2)]
    e: u32,

    /// Residue degree of R = GR(p^e, m) over Z_{p^e}
    #[arg(short, global = true, default_value_t = 1)]
    m: u32,

    /// Code length (must be coprime to p)
    #[arg(short, global = true, default_value_t = 2)]
    n: usize,

    /// Emit machine-readable JSON instead of the table rendering
    #[arg(long, global = true)]
    json: bool,

    /// Ceiling on enumeration sizes (words, pairs, ambient sweeps)
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,

    /// Sweep mixing polynomials instead of fixing r = 0
    #[arg(long, global = true)]
    include_r: bool,

    /// Recompute through the brute-force oracle and fail on disagreement
    #[arg(long, global = true)]
    oracle: bool,

    /// Seed for reproducible sampling (audit draws at most `budget` pairs)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Factor x^n - 1 into basic irreducibles, with cosets and residues
    Factor,
    /// Describe a code: canonical triple, rank, cardinality, free basis
    Code(DescriptorArg),
    /// Compute the trace dual of a code
    Dual(DescriptorArg),
    /// Decide complementarity of two codes by all four criteria
    Acp {
        /// first code (inline JSON, @file, or f=..;r=..;g=..)
        c: String,
        /// second code, same forms
        d: String,
    },
    /// Enumerate complementary pairs from complementary divisor frames
    EnumAcp,
    /// Audit the pair grid: one JSON line per complementary pair
    Audit,
    /// Brute-force minimum Hamming distance of a code
    Mindist(DescriptorArg),
}

#[derive(Args)]
struct DescriptorArg {
    /// code descriptor: inline JSON, @file, or f=..;r=..;g=.. polynomials
    descriptor: String,
}

enum CliError {
    Validation(String),
    Budget(String),
    Oracle(String),
}

impl From<ringcodes::Error> for CliError {
    fn from(e: ringcodes::Error) -> Self {
        match e {
            ringcodes::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(CliError::Oracle(msg)) => {
            eprintln!("error: oracle disagreement: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Factor => cmd_factor(&cli.opts),
        Cmd::Code(arg) => cmd_code(&cli.opts, &arg.descriptor),
        Cmd::Dual(arg) => cmd_dual(&cli.opts, &arg.descriptor),
        Cmd::Acp { c, d } => cmd_acp(&cli.opts, c, d),
        Cmd::EnumAcp => cmd_enum_acp(&cli.opts),
        Cmd::Audit => cmd_audit(&cli.opts),
        Cmd::Mindist(arg) => cmd_mindist(&cli.opts, &arg.descriptor),
    }
}

// ---------------------------------------------------------------- parsing

fn tower(opts: &GlobalOpts) -> Result<(Arc<ExtensionContext>, Arc<FactorBasis>), CliError> {
    let ctx = ExtensionContext::new(opts.p, opts.e, opts.m)?;
    let basis = factor_xn1(&ctx, opts.n)?;
    Ok((ctx, basis))
}

/// Parse a polynomial over `R` from a string like `x^2+4x+8` or, for
/// towers with `m > 1`, `[1,2]x^3+[0,1]`. A leading minus and `-` between
/// terms are accepted; coefficients reduce mod `p^e`.
fn parse_poly(ctx: &Arc<ExtensionContext>, input: &str) -> Result<RPoly, CliError> {
    let bad = |msg: &str| CliError::Validation(format!("cannot parse polynomial `{input}`: {msg}"));
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    // split into signed terms, ignoring separators inside [..] brackets
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0u32;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| bad("unbalanced brackets"))?;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && i > 0 => {
                if cur.is_empty() {
                    return Err(bad("consecutive signs"));
                }
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            }
            '-' if i == 0 => neg = true,
            '+' if i == 0 => {}
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(bad("unbalanced brackets"));
    }
    if cur.is_empty() {
        return Err(bad("trailing sign"));
    }
    terms.push((neg, cur));

    let mut coeffs: Vec<RingElem> = Vec::new();
    for (negative, term) in terms {
        let (coeff_str, exp) = match term.find('x') {
            None => (term.as_str(), 0usize),
            Some(pos) => {
                let after = &term[pos + 1..];
                let exp = if after.is_empty() {
                    1
                } else if let Some(digits) = after.strip_prefix('^') {
                    digits.parse::<usize>().map_err(|_| bad("bad exponent"))?
                } else {
                    return Err(bad("expected `^` after x"));
                };
                (&term[..pos], exp)
            }
        };
        if exp > 4096 {
            return Err(bad("exponent too large"));
        }
        let mut elem = if coeff_str.is_empty() {
            ctx.r_from_base(1)
        } else if let Some(inner) = coeff_str.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| bad("unbalanced brackets"))?;
            let digits = inner
                .split(',')
                .map(|d| d.parse::<u64>().map_err(|_| bad("bad coefficient digit")))
                .collect::<Result<Vec<u64>, CliError>>()?;
            ctx.r_elem(&digits)?
        } else {
            ctx.r_from_base(
                coeff_str
                    .parse::<u64>()
                    .map_err(|_| bad("bad coefficient"))?,
            )
        };
        if negative {
            elem = ctx.neg(&elem);
        }
        while coeffs.len() <= exp {
            coeffs.push(ctx.zero(Level::R));
        }
        coeffs[exp] = ctx.add(&coeffs[exp], &elem)?;
    }
    Ok(RPoly::from_coeffs(Level::R, coeffs)?)
}

/// Accept a code as inline JSON, `@path` to a JSON file, or inline
/// polynomial strings `f=..;r=..;g=..` interpreted in the tower named by
/// the global flags.
fn parse_code(
    opts: &GlobalOpts,
    raw: &str,
) -> Result<(Arc<FactorBasis>, AdditiveCyclicCode), CliError> {
    let raw = raw.trim();
    if let Some(path) = raw.strip_prefix('@') {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {path}: {e}")))?;
        return parse_code(opts, &text);
    }
    if raw.starts_with('{') {
        let d: CodeDescriptor = serde_json::from_str(raw)
            .map_err(|e| CliError::Validation(format!("bad code descriptor: {e}")))?;
        return Ok(code_from_descriptor(&d)?);
    }
    let (mut f, mut r, mut g) = (None, None, None);
    for part in raw.split(';').filter(|s| !s.trim().is_empty()) {
        let (key, val) = part
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("expected key=value, got `{part}`")))?;
        match key.trim() {
            "f" => f = Some(val.to_string()),
            "r" => r = Some(val.to_string()),
            "g" => g = Some(val.to_string()),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown descriptor key `{other}` (expected f, r, g)"
                )))
            }
        }
    }
    let (f, r, g) = match (f, r, g) {
        (Some(f), Some(r), Some(g)) => (f, r, g),
        _ => {
            return Err(CliError::Validation(
                "inline descriptor needs all of f=..;r=..;g=..".into(),
            ))
        }
    };
    let (ctx, basis) = tower(opts)?;
    let f = basis.divisor_from_poly(&parse_poly(&ctx, &f)?)?;
    let g = basis.divisor_from_poly(&parse_poly(&ctx, &g)?)?;
    let r = parse_poly(&ctx, &r)?;
    let code = AdditiveCyclicCode::make_code(&basis, f.mask, &r, g.mask)?;
    Ok((basis, code))
}

// --------------------------------------------------------------- printing

fn elem_repr(ctx: &ExtensionContext, v: &RingElem) -> String {
    let digits = |c: &RingElem| -> String {
        if c.coeffs().len() == 1 {
            c.coeffs()[0].to_string()
        } else {
            let inner: Vec<String> = c.coeffs().iter().map(u64::to_string).collect();
            format!("[{}]", inner.join(","))
        }
    };
    if v.level() == Level::R {
        return digits(v);
    }
    let (a, b) = ctx.decompose(v).expect("level checked");
    match (a.is_zero(), b.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => digits(&a),
        (true, false) => format!("{}u", digits(&b)),
        (false, false) => format!("{}+{}u", digits(&a), digits(&b)),
    }
}

fn word_repr(ctx: &ExtensionContext, w: &CyclicWord) -> String {
    let parts: Vec<String> = w.coeffs().iter().map(|c| elem_repr(ctx, c)).collect();
    format!("({})", parts.join(", "))
}

fn triple_line(code: &AdditiveCyclicCode) -> String {
    format!(
        "f = {}, r = {}, g = {}",
        code.f().poly.pretty(),
        code.r().pretty(),
        code.g().poly.pretty()
    )
}

/// Write to stdout, dying quietly when the reading end has gone away
/// (`cmd | head` must not backtrace).
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(CliError::Validation(e.to_string())),
        Ok(()) => Ok(()),
    }
}

fn stream_err(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    CliError::Validation(e.to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(&text)
}

// ----------------------------------------------------------------- factor

#[derive(Serialize)]
struct FactorEntry {
    poly: String,
    degree: usize,
    coset: Vec<usize>,
    residue: String,
}

#[derive(Serialize)]
struct FactorOut {
    p: u64,
    e: u32,
    m: u32,
    n: usize,
    modulus: String,
    residue_modulus: String,
    factors: Vec<FactorEntry>,
}

fn cmd_factor(opts: &GlobalOpts) -> Result<(), CliError> {
    let (ctx, basis) = tower(opts)?;
    let mut entries: Vec<(Vec<Vec<u64>>, FactorEntry)> = basis
        .factors()
        .iter()
        .zip(basis.cosets())
        .map(|(fac, coset)| {
            let key: Vec<Vec<u64>> = fac.coeffs().iter().map(|c| c.coeffs().to_vec()).collect();
            let entry = FactorEntry {
                poly: fac.pretty(),
                degree: fac.degree().expect("factors are monic"),
                coset: coset.clone(),
                residue: fac.to_residue(&ctx).pretty(),
            };
            (key, entry)
        })
        .collect();
    // ascending: by degree, then by coefficient list from the constant term
    entries.sort_by(|a, b| (a.1.degree, &a.0).cmp(&(b.1.degree, &b.0)));
    let out = FactorOut {
        p: opts.p,
        e: opts.e,
        m: opts.m,
        n: opts.n,
        modulus: basis.xn1().pretty(),
        residue_modulus: basis.xn1().to_residue(&ctx).pretty(),
        factors: entries.into_iter().map(|(_, e)| e).collect(),
    };
    if opts.json {
        return print_json(&out);
    }
    let mut buf = String::new();
    let _ = writeln!(
        buf,
        "{} over GR({}, {}) factors into {} basic irreducibles:",
        out.modulus,
        opts.p.pow(opts.e),
        opts.m,
        out.factors.len()
    );
    for f in &out.factors {
        let coset: Vec<String> = f.coset.iter().map(usize::to_string).collect();
        let _ = writeln!(
            buf,
            "  {:<24} deg {}  coset {{{}}}  residue {}",
            f.poly,
            f.degree,
            coset.join(", "),
            f.residue
        );
    }
    let residues: Vec<String> = out
        .factors
        .iter()
        .map(|f| format!("({})", f.residue))
        .collect();
    let _ = writeln!(
        buf,
        "residue factorization over F_{}: {} = {}",
        opts.p.pow(opts.m),
        out.residue_modulus,
        residues.join("")
    );
    emit(&buf)
}

// ------------------------------------------------------------------- code

#[derive(Serialize)]
struct CodeOut {
    descriptor: CodeDescriptor,
    f: String,
    r: String,
    g: String,
    rank: usize,
    free: bool,
    cardinality: String,
    generators: Vec<String>,
    basis: Vec<String>,
}

fn code_out(code: &AdditiveCyclicCode) -> Result<CodeOut, CliError> {
    let ctx = code.basis().context();
    Ok(CodeOut {
        descriptor: code.descriptor(),
        f: code.f().poly.pretty(),
        r: code.r().pretty(),
        g: code.g().poly.pretty(),
        rank: code.rank(),
        free: code.raw().is_free(),
        cardinality: code.cardinality().to_string(),
        generators: code
            .generator_words()?
            .iter()
            .map(|w| word_repr(ctx, w))
            .collect(),
        basis: code
            .basis_words()?
            .iter()
            .map(|w| word_repr(ctx, w))
            .collect(),
    })
}

fn render_code(buf: &mut String, out: &CodeOut, label: &str) {
    let d = &out.descriptor;
    let _ = writeln!(
        buf,
        "{label} over S | R with R = GR({}, {}), S = GR({}, {}), n = {}",
        d.p.pow(d.e),
        d.m,
        d.p.pow(d.e),
        2 * d.m,
        d.n
    );
    let _ = writeln!(buf, "  f = {}", out.f);
    let _ = writeln!(buf, "  r = {}", out.r);
    let _ = writeln!(buf, "  g = {}", out.g);
    let _ = writeln!(
        buf,
        "  rank {}   cardinality {}   {}",
        out.rank,
        out.cardinality,
        if out.free { "free" } else { "not free" }
    );
    let _ = writeln!(buf, "  generators:");
    for w in &out.generators {
        let _ = writeln!(buf, "    {w}");
    }
    let _ = writeln!(buf, "  free basis ({} words):", out.basis.len());
    for w in &out.basis {
        let _ = writeln!(buf, "    {w}");
    }
}

fn cmd_code(opts: &GlobalOpts, raw: &str) -> Result<(), CliError> {
    let (_, code) = parse_code(opts, raw)?;
    let out = code_out(&code)?;
    if opts.json {
        return print_json(&out);
    }
    let mut buf = String::new();
    render_code(&mut buf, &out, "code");
    emit(&buf)
}

// ------------------------------------------------------------------- dual

#[derive(Serialize)]
struct DualOut {
    descriptor: CodeDescriptor,
    dual: Option<CodeOut>,
    canonical_note: Option<String>,
    dual_rank: usize,
    dual_cardinality: String,
    dual_basis: Vec<String>,
    oracle_agreed: Option<bool>,
}

fn cmd_dual(opts: &GlobalOpts, raw: &str) -> Result<(), CliError> {
    let (basis, code) = parse_code(opts, raw)?;
    let ctx = basis.context();
    let dual_raw = trace_dual_raw(code.raw())?;
    let (dual, canonical_note) = match trace_dual(&code) {
        Ok(d) => (Some(code_out(&d)?), None),
        Err(ringcodes::Error::NoCanonicalForm(msg)) => (None, Some(msg)),
        Err(e) => return Err(e.into()),
    };
    let oracle_agreed = if opts.oracle {
        let members = code.raw().enumerate_words(opts.budget)?;
        let set = WordSet::from_words(Level::S, code.n(), members)?;
        let brute = brute_dual(ctx, &set, opts.budget)?;
        let fast = dual_raw.enumerate_words(opts.budget)?;
        let agreed = fast.len() == brute.len() && fast.iter().all(|w| brute.contains(w));
        if !agreed {
            return Err(CliError::Oracle(format!(
                "trace dual has {} words, ambient sweep found {}",
                fast.len(),
                brute.len()
            )));
        }
        Some(true)
    } else {
        None
    };
    let out = DualOut {
        descriptor: code.descriptor(),
        dual,
        canonical_note,
        dual_rank: dual_raw.rank_profile().free_rank,
        dual_cardinality: dual_raw.cardinality().to_string(),
        dual_basis: dual_raw
            .free_basis_words()
            .unwrap_or_default()
            .iter()
            .map(|w| word_repr(ctx, w))
            .collect(),
        oracle_agreed,
    };
    if opts.json {
        return print_json(&out);
    }
    let mut buf = String::new();
    let _ = writeln!(buf, "code: {}", triple_line(&code));
    match (&out.dual, &out.canonical_note) {
        (Some(d), _) => render_code(&mut buf, d, "trace dual"),
        (None, Some(note)) => {
            let _ = writeln!(buf, "trace dual carries no canonical triple: {note}");
            let _ = writeln!(
                buf,
                "  rank {}   cardinality {}",
                out.dual_rank, out.dual_cardinality
            );
            let _ = writeln!(buf, "  free basis ({} words):", out.dual_basis.len());
            for w in &out.dual_basis {
                let _ = writeln!(buf, "    {w}");
            }
        }
        (None, None) => unreachable!("dual is canonical or noted"),
    }
    if let Some(true) = out.oracle_agreed {
        let _ = writeln!(buf, "oracle: ambient sweep agrees");
    }
    emit(&buf)
}

// -------------------------------------------------------------------- acp

#[derive(Serialize)]
struct AcpOut {
    c: CodeDescriptor,
    d: CodeDescriptor,
    verdict: AcpVerdict,
    oracle_agreed: Option<bool>,
}

fn render_verdict(v: &AcpVerdict) -> String {
    format!(
        "definitional {}   polynomial {}   matrix {}   projection {}   agree {}",
        v.definitional, v.polynomial, v.matrix, v.projection, v.agree
    )
}

fn cmd_acp(opts: &GlobalOpts, c_raw: &str, d_raw: &str) -> Result<(), CliError> {
    let (_, c) = parse_code(opts, c_raw)?;
    let (_, d) = parse_code(opts, d_raw)?;
    let verdict = acp_verdict(&c, &d)?;
    let oracle_agreed = if opts.oracle {
        let ctx = c.basis().context();
        let cw = WordSet::from_words(Level::S, c.n(), c.raw().enumerate_words(opts.budget)?)?;
        let dw = WordSet::from_words(Level::S, d.n(), d.raw().enumerate_words(opts.budget)?)?;
        let brute = brute_acp(ctx, &cw, &dw, opts.budget)?;
        if brute != verdict.definitional {
            return Err(CliError::Oracle(format!(
                "definitional criterion says {}, word sweep says {brute}",
                verdict.definitional
            )));
        }
        Some(true)
    } else {
        None
    };
    let out = AcpOut {
        c: c.descriptor(),
        d: d.descriptor(),
        verdict,
        oracle_agreed,
    };
    if opts.json {
        return print_json(&out);
    }
    let mut buf = String::new();
    let _ = writeln!(buf, "C: {}", triple_line(&c));
    let _ = writeln!(buf, "D: {}", triple_line(&d));
    let _ = writeln!(buf, "{}", render_verdict(&out.verdict));
    if let Some(true) = out.oracle_agreed {
        let _ = writeln!(buf, "oracle: word sweep agrees");
    }
    emit(&buf)
}

// --------------------------------------------------------------- enum-acp

#[derive(Serialize)]
struct PairOut {
    c: CodeDescriptor,
    d: CodeDescriptor,
    verdict: AcpVerdict,
}

fn cmd_enum_acp(opts: &GlobalOpts) -> Result<(), CliError> {
    let (ctx, basis) = tower(opts)?;
    let pairs = construct_acp_pairs(&basis, opts.include_r, opts.budget)?;
    if opts.oracle {
        for pair in &pairs {
            let cw = WordSet::from_words(
                Level::S,
                pair.c.n(),
                pair.c.raw().enumerate_words(opts.budget)?,
            )?;
            let dw = WordSet::from_words(
                Level::S,
                pair.d.n(),
                pair.d.raw().enumerate_words(opts.budget)?,
            )?;
            let brute = brute_acp(&ctx, &cw, &dw, opts.budget)?;
            if brute != pair.verdict.definitional {
                return Err(CliError::Oracle(format!(
                    "pair ({} | {}) fast path {} vs sweep {brute}",
                    triple_line(&pair.c),
                    triple_line(&pair.d),
                    pair.verdict.definitional
                )));
            }
        }
    }
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    if opts.json {
        for pair in &pairs {
            let line = serde_json::to_string(&PairOut {
                c: pair.c.descriptor(),
                d: pair.d.descriptor(),
                verdict: pair.verdict,
            })
            .map_err(|e| CliError::Validation(format!("serialization failed: {e}")))?;
            writeln!(w, "{line}").map_err(stream_err)?;
        }
        return w.flush().map_err(stream_err);
    }
    for pair in &pairs {
        writeln!(
            w,
            "C[{}]  D[{}]  {}",
            triple_line(&pair.c),
            triple_line(&pair.d),
            render_verdict(&pair.verdict)
        )
        .map_err(stream_err)?;
    }
    writeln!(w, "{} pairs", pairs.len()).map_err(stream_err)?;
    w.flush().map_err(stream_err)
}

// ------------------------------------------------------------------ audit

fn cmd_audit(opts: &GlobalOpts) -> Result<(), CliError> {
    let (_, basis) = tower(opts)?;
    let sample = opts.seed.map(|s| (s, opts.budget));
    let records = audit_theorems(&basis, opts.include_r, opts.budget, sample)?;
    let stdout = std::io::stdout();
    let mut w = std::io::BufWriter::new(stdout.lock());
    for rec in &records {
        let line = serde_json::to_string(rec)
            .map_err(|e| CliError::Validation(format!("serialization failed: {e}")))?;
        writeln!(w, "{line}").map_err(stream_err)?;
    }
    w.flush().map_err(stream_err)?;
    drop(w);
    if !opts.json {
        let counterexamples = records.iter().filter(|r| r.counterexample).count();
        eprintln!(
            "{} complementary pairs audited, {} counterexample records",
            records.len(),
            counterexamples
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- mindist

#[derive(Serialize)]
struct MindistOut {
    descriptor: CodeDescriptor,
    min_distance: usize,
}

fn cmd_mindist(opts: &GlobalOpts, raw: &str) -> Result<(), CliError> {
    let (_, code) = parse_code(opts, raw)?;
    let out = MindistOut {
        descriptor: code.descriptor(),
        min_distance: code.min_distance(opts.budget)?,
    };
    if opts.json {
        return print_json(&out);
    }
    emit(&format!("{}\n", out.min_distance))
}
