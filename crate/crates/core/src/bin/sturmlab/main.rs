//! `sturmlab`: command-line driver.
//!
//! Exit codes: 0 success, 1 a check failed or the library reported an error,
//! 2 usage error, 3 I/O error.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Value};

use sturmlab::approx::{contents_report, gray_fan, verify_identities, Approx};
use sturmlab::exponents::{
    closed_form, empirical, empirical_abscissas, joint_curve, omega2_sweep, recipe_triples, Exponent, ExponentInputs,
};
use sturmlab::matseq::{check_mult_growth, delta_estimate, Anchor, MatrixSeed, MatrixSequence};
use sturmlab::paramgeo::{
    compare, minima_bruteforce, minima_on_grid, predicted_system, sequence_candidates_below, to_csv, to_svg,
    working_precision, DeltaChoice, MinimaSample,
};
use sturmlab::sturm::words::spectrum_endpoints;
use sturmlab::sturm::{ProgramSpec, SturmianProgram};
use sturmlab::xi::{bl_oracle, properness_check, xi_value};
use sturmlab::{BigReal, Error, IntMat2};

use config::{uints, window, RunConfig, Usage};

const SCHEMA: &str = "sturmlab/1";

#[derive(Parser)]
#[command(name = "sturmlab", version, about = "Exact experiments with psi-Sturmian matrix sequences")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Plain-text key=value configuration; flags override its values.
    #[arg(long, global = true)]
    seed_file: Option<PathBuf>,
    /// Directory for relative output paths.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long, global = true)]
    json: Option<String>,
    /// Write the CSV table here.
    #[arg(long, global = true)]
    csv: Option<String>,
    /// Write the SVG figure here.
    #[arg(long, global = true)]
    svg: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct SeedArgs {
    /// roy, bl or custom.
    #[arg(long)]
    family: Option<String>,
    /// Roy triple `a,b,c`.
    #[arg(long)]
    abc: Option<String>,
    /// Bugeaud–Laurent letters `a,b`.
    #[arg(long)]
    ab: Option<String>,
    /// Bugeaud–Laurent first exponent.
    #[arg(long)]
    s1: Option<String>,
    /// Custom seed matrices `a,b;c,d`.
    #[arg(long)]
    w0: Option<String>,
    #[arg(long)]
    w1: Option<String>,
    /// Optional admissibility matrix for a custom seed.
    #[arg(long)]
    n: Option<String>,
    /// Program `prefix=[-1,1];period=[..]`, or JSON.
    #[arg(long)]
    program: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the exact identities and content divisibilities.
    Verify {
        #[command(flatten)]
        seed: SeedArgs,
        /// Check all indices up to t_K.
        #[arg(long)]
        up_to: Option<String>,
    },
    /// Build the predicted 3-system, validate it and compare with the minima.
    ThreeSystem {
        #[command(flatten)]
        seed: SeedArgs,
        /// Window `lo:hi` of k.
        #[arg(long)]
        k: Option<String>,
        /// Force this δ instead of the estimate.
        #[arg(long)]
        delta: Option<String>,
        /// Uniform grid points added to the breakpoints.
        #[arg(long)]
        refine: Option<String>,
        /// Validation tolerance.
        #[arg(long)]
        tol: Option<String>,
        /// Brute-force oracle at this many points of [0, 12].
        #[arg(long)]
        oracle: Option<String>,
        /// Brute-force search radius cap.
        #[arg(long)]
        r_max: Option<String>,
    },
    /// Closed-form exponents, optionally with empirical estimates.
    Exponents {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        empirical: bool,
        /// Empirical window `lo:hi`.
        #[arg(long)]
        k: Option<String>,
    },
    /// Certified digits of ξ.
    Xi {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        digits: Option<String>,
    },
    /// The gray-area fan at index i.
    Gray {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        i: Option<String>,
    },
    /// Spectrum endpoints, the Roy sweep and the joint-spectrum curve.
    Spectrum {
        #[arg(long)]
        endpoints: bool,
        #[arg(long)]
        sweep: bool,
        /// Largest k of the recipe triples.
        #[arg(long)]
        k_max: Option<String>,
        #[arg(long)]
        curve: bool,
        #[arg(long)]
        c_lo: Option<String>,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        program: Option<String>,
    },
}

enum Fail {
    Check(String),
    Lib(Error),
    Usage(Usage),
    Io(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => Fail::Usage(Usage(m)),
            e => Fail::Lib(e),
        }
    }
}

impl From<Usage> for Fail {
    fn from(u: Usage) -> Self {
        Fail::Usage(u)
    }
}

type Out<T> = Result<T, Fail>;

/// Output destinations shared by all subcommands.
struct Sink {
    out_dir: PathBuf,
    json: Option<String>,
    csv: Option<String>,
    svg: Option<String>,
}

impl Sink {
    fn path(&self, name: &str) -> PathBuf {
        let p = Path::new(name);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out_dir.join(p)
        }
    }

    fn write(&self, name: &str, body: &str) -> Out<()> {
        if name == "-" {
            print!("{body}");
            return Ok(());
        }
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Fail::Io(format!("{}: {e}", dir.display())))?;
        }
        std::fs::write(&path, body).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))
    }

    fn json(&self, cfg: &RunConfig, ok: bool, result: Value) -> Out<()> {
        if let Some(name) = &self.json {
            let doc = json!({ "schema": SCHEMA, "command": cfg.command, "config": cfg.settings, "ok": ok, "result": result });
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Fail::Io(e.to_string()))?;
            self.write(name, &(text + "\n"))?;
        }
        Ok(())
    }

    fn csv(&self, cfg: &RunConfig, table: &str) -> Out<()> {
        if let Some(name) = &self.csv {
            let mut s = format!("# schema={SCHEMA}\n");
            for l in cfg.lines().lines() {
                let _ = writeln!(s, "# {l}");
            }
            s.push_str(table);
            self.write(name, &s)?;
        }
        Ok(())
    }

    fn svg(&self, cfg: &RunConfig, svg: &str) -> Out<()> {
        if let Some(name) = &self.svg {
            self.write(name, &embed_config(svg, cfg))?;
        }
        Ok(())
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Puts the run configuration into a `<desc>` element right after the opening `<svg>` tag.
fn embed_config(svg: &str, cfg: &RunConfig) -> String {
    let desc = format!("<desc>schema={SCHEMA}\n{}</desc>", xml_escape(&cfg.lines()));
    match svg.find("<svg").and_then(|i| svg[i..].find('>').map(|j| i + j + 1)) {
        Some(at) => format!("{}\n{}{}", &svg[..at], desc, &svg[at..]),
        None => svg.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(u)) => {
            eprintln!("usage error: {u}");
            ExitCode::from(2)
        }
        Err(Fail::Io(m)) => {
            eprintln!("i/o error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Out<bool> {
    let file = match &cli.seed_file {
        Some(p) => config::parse_file(&config::load_file(p).map_err(|e| Fail::Io(format!("{}: {e}", p.display())))?)?,
        None => Default::default(),
    };
    let name = match &cli.cmd {
        Cmd::Verify { .. } => "verify",
        Cmd::ThreeSystem { .. } => "three-system",
        Cmd::Exponents { .. } => "exponents",
        Cmd::Xi { .. } => "xi",
        Cmd::Gray { .. } => "gray",
        Cmd::Spectrum { .. } => "spectrum",
    };
    let mut cfg = RunConfig::new(name, file);
    let precision: usize = cfg.need("precision", cli.precision.as_deref(), Some("256"))?;
    if precision < 64 {
        return Err(Usage("--precision must be at least 64".into()).into());
    }
    let out_dir = cfg.raw("out-dir", cli.out_dir.as_ref().and_then(|p| p.to_str()), Some("."));
    let sink = Sink {
        out_dir: PathBuf::from(out_dir.unwrap_or_else(|| ".".into())),
        json: cfg.raw("json", cli.json.as_deref(), None),
        csv: cfg.raw("csv", cli.csv.as_deref(), None),
        svg: cfg.raw("svg", cli.svg.as_deref(), None),
    };
    match cli.cmd {
        Cmd::Verify { seed, up_to } => cmd_verify(&mut cfg, &sink, precision, &seed, up_to.as_deref()),
        Cmd::ThreeSystem { seed, k, delta, refine, tol, oracle, r_max } => {
            let opts = ThreeOpts {
                k: k.as_deref(),
                delta: delta.as_deref(),
                refine: refine.as_deref(),
                tol: tol.as_deref(),
                oracle: oracle.as_deref(),
                r_max: r_max.as_deref(),
            };
            cmd_three_system(&mut cfg, &sink, precision, &seed, opts)
        }
        Cmd::Exponents { seed, delta, empirical, k } => {
            cmd_exponents(&mut cfg, &sink, precision, &seed, delta.as_deref(), empirical, k.as_deref())
        }
        Cmd::Xi { seed, digits } => cmd_xi(&mut cfg, &sink, &seed, digits.as_deref()),
        Cmd::Gray { seed, i } => cmd_gray(&mut cfg, &sink, precision, &seed, i.as_deref()),
        Cmd::Spectrum { endpoints, sweep, k_max, curve, c_lo, grid, program } => {
            let opts = SpectrumOpts {
                endpoints,
                sweep,
                k_max: k_max.as_deref(),
                curve,
                c_lo: c_lo.as_deref(),
                grid: grid.as_deref(),
                program: program.as_deref(),
            };
            cmd_spectrum(&mut cfg, &sink, precision, opts)
        }
    }
}

// ---------------------------------------------------------------------------
// seeds

fn parse_matrix(s: &str, what: &str) -> Result<IntMat2, Usage> {
    let bad = || Usage(format!("--{what}: expected a,b;c,d, got {s:?}"));
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 2 {
        return Err(bad());
    }
    let mut e = Vec::new();
    for r in rows {
        for t in r.split(',') {
            e.push(t.trim().parse::<BigInt>().map_err(|_| bad())?);
        }
    }
    if e.len() != 4 {
        return Err(bad());
    }
    let mut it = e.into_iter();
    let mut next = || it.next().expect("four entries");
    Ok(IntMat2::new(next(), next(), next(), next()))
}

fn program(cfg: &mut RunConfig, flag: Option<&str>) -> Out<SturmianProgram> {
    let text = cfg.raw("program", flag, Some("prefix=[-1,1];period=[1]")).expect("default");
    let spec: ProgramSpec = text.parse()?;
    Ok(SturmianProgram::build(&spec)?)
}

fn seed(cfg: &mut RunConfig, a: &SeedArgs) -> Out<MatrixSeed> {
    let family = cfg.raw("family", a.family.as_deref(), None).ok_or_else(|| Usage("--family is required (roy, bl or custom)".into()))?;
    Ok(match family.as_str() {
        "roy" => {
            let v = uints(&cfg.raw("abc", a.abc.as_deref(), None).ok_or_else(|| Usage("--abc is required for roy".into()))?, 3, "abc")?;
            MatrixSeed::roy(v[0], v[1], v[2])?
        }
        "bl" => {
            let v = uints(&cfg.raw("ab", a.ab.as_deref(), None).ok_or_else(|| Usage("--ab is required for bl".into()))?, 2, "ab")?;
            let s1: u64 = cfg.need("s1", a.s1.as_deref(), Some("1"))?;
            MatrixSeed::bl(v[0], v[1], s1)?
        }
        "custom" => {
            let w0 = parse_matrix(&cfg.raw("w0", a.w0.as_deref(), None).ok_or_else(|| Usage("--w0 is required for custom".into()))?, "w0")?;
            let w1 = parse_matrix(&cfg.raw("w1", a.w1.as_deref(), None).ok_or_else(|| Usage("--w1 is required for custom".into()))?, "w1")?;
            let n = match cfg.raw("n", a.n.as_deref(), None) {
                Some(s) => Some(parse_matrix(&s, "n")?),
                None => None,
            };
            MatrixSeed::custom(w0, w1, n)?
        }
        other => return Err(Usage(format!("--family: unknown family {other:?}")).into()),
    })
}

fn approx(cfg: &mut RunConfig, a: &SeedArgs, precision: usize) -> Out<Approx> {
    let s = seed(cfg, a)?;
    let prog = program(cfg, a.program.as_deref())?;
    Ok(Approx::from_sequence(MatrixSequence::with_precision(s, prog, precision)))
}

fn program_label(ap: &Approx) -> String {
    ap.prog().spec().map(|s| s.to_string()).unwrap_or_else(|| "generator".into())
}

fn big(x: &BigInt) -> String {
    x.to_string()
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(cfg: &mut RunConfig, sink: &Sink, precision: usize, a: &SeedArgs, up_to: Option<&str>) -> Out<bool> {
    let mut ap = approx(cfg, a, precision)?;
    let k: usize = cfg.need("up-to", up_to, Some("14"))?;
    let i_max = ap.prog().t(k);
    let seed = ap.seed().clone();
    println!("seed {}  program {}  indices up to t_{k} = {i_max}", seed.label(), program_label(&ap));
    if !seed.proper_capable() {
        eprintln!("warning: not proper-capable (Tr(JN)=0); identities still checked");
    }
    if let Some(pn) = &seed.printed_n {
        if !pn.admissible {
            eprintln!("warning: the closed-form N fails the admissibility check; the kernel solution is used");
        }
    }
    let ids = verify_identities(&mut ap, i_max)?;
    for c in &ids.checks {
        let verdict = if c.passed() { "ok" } else { "FAIL" };
        println!("  {:<28} {:>6} checked  {verdict}", c.name, c.checked);
        if let Some(w) = c.failures.first() {
            println!("      first failing index {w}");
        }
    }
    let contents = contents_report(&mut ap, i_max)?;
    println!(
        "  contents: max content(y) {}  det N {}  bound {}  {}",
        big(&contents.max_content_y),
        big(&contents.det_n),
        big(&contents.bound),
        if contents.all_pass() { "ok" } else { "FAIL" }
    );
    let growth = check_mult_growth(&mut ap.seq, k)?;
    let delta = delta_estimate(&mut ap.seq, k)?;
    println!("  growth ratios in [{:.4}, {:.4}]", growth.min_ratio, growth.max_ratio);
    println!("  delta_{k} = {}{}", delta.estimate.to_decimal(12), if delta.exact_zero { " (exactly 0)" } else { "" });
    if let Some((lo, hi)) = &delta.bracket_certified {
        println!("  certified bracket [{}, {}]  all inside: {}", lo.to_decimal(8), hi.to_decimal(8), delta.all_inside(&(lo.clone(), hi.clone())));
    }
    let ok = ids.all_pass() && contents.all_pass();
    let failures: Vec<Value> = ids
        .checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| json!({ "identity": c.name, "index": c.failures.first() }))
        .collect();
    sink.json(
        cfg,
        ok,
        json!({ "seed": seed, "program": program_label(&ap), "identities": ids, "contents": contents, "growth": growth, "delta": delta, "witnesses": failures }),
    )?;
    let mut table = String::from("identity,checked,failures\n");
    for c in &ids.checks {
        let _ = writeln!(table, "{},{},{}", c.name, c.checked, c.failures.len());
    }
    sink.csv(cfg, &table)?;
    if !ok {
        return Err(Fail::Check("an exact identity or content divisibility failed (see the FAIL lines)".into()));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// three-system

struct ThreeOpts<'a> {
    k: Option<&'a str>,
    delta: Option<&'a str>,
    refine: Option<&'a str>,
    tol: Option<&'a str>,
    oracle: Option<&'a str>,
    r_max: Option<&'a str>,
}

fn cmd_three_system(cfg: &mut RunConfig, sink: &Sink, precision: usize, a: &SeedArgs, o: ThreeOpts) -> Out<bool> {
    let (k_lo, k_hi) = window(&cfg.raw("k", o.k, Some("4:12")).expect("default"), "k")?;
    if k_hi < k_lo + 1 {
        return Err(Usage("--k: the window needs at least two values of k".into()).into());
    }
    let refine: usize = cfg.need("refine", o.refine, Some("40"))?;
    let tol: f64 = cfg.need("tol", o.tol, Some("1e-9"))?;
    let oracle: usize = cfg.need("oracle", o.oracle, Some("0"))?;
    let r_max: u64 = cfg.need("r-max", o.r_max, Some("10000"))?;
    let choice = match cfg.get::<f64>("delta", o.delta, None)? {
        Some(d) => DeltaChoice::Forced(BigReal::from_f64(d, precision)),
        None => DeltaChoice::Auto,
    };
    let mut ap = approx(cfg, a, precision)?;
    let sys = predicted_system(&mut ap, k_lo, k_hi, choice, Anchor::Auto)?;
    let v = sys.validate(&BigReal::from_f64(tol, precision));
    let title = format!("{}  {}  k {k_lo}:{k_hi}", ap.seed().label(), program_label(&ap));
    println!("{title}");
    println!("  delta = {} ({:?}), threshold sigma/(1+sigma) = {}", sys.delta.to_decimal(10), sys.delta_source, sys.threshold.to_decimal(10));
    println!(
        "  conditions: ordering+sum {}  one slope {}  switch {}  continuous {}  ({} intervals)",
        v.conditions.ordering_and_sum, v.conditions.one_slope, v.conditions.switch_equalities, v.conditions.continuous, v.conditions.intervals_checked
    );
    println!("  ordering {}  shape {}  delta hypothesis {}", v.ordering, v.shape, v.hypothesis);
    if !v.valid {
        for d in &v.diagnostic {
            println!("  {d}");
        }
        sink.json(cfg, false, json!({ "validity": v, "delta": sys.delta, "threshold": sys.threshold }))?;
        let why: Vec<&str> = v.diagnostic.iter().map(|d| d.strip_prefix("not a 3-system: ").unwrap_or(d)).collect();
        return Err(Fail::Check(format!("not a 3-system: {}", why.join("; "))));
    }
    println!("  valid 3-system");
    let grid = sys.sample_grid(refine);
    let (_, minima) = minima_on_grid(&mut ap, &grid)?;
    let exhaustive = minima.iter().filter(|c| c.exhaustive).count();
    let samples: Vec<MinimaSample> = minima.into_iter().map(|c| c.sample).collect();
    let mid = (k_lo + k_hi) / 2;
    let rep = compare(&sys, &samples, (k_lo, mid), (mid + 1, k_hi))?;
    println!("  {} samples ({} with exhaustive enumeration)", samples.len(), exhaustive);
    println!("  max|L1-P1|: k {k_lo}:{mid} {:.4}, k {}:{k_hi} {:.4}  non-growing {}", rep.item1_early, mid + 1, rep.item1_late, rep.item1_ok);
    println!("  max|L2,3-P2,3| on bright intervals: {:.4} then {:.4}  non-growing {}", rep.item2_early, rep.item2_late, rep.item2_ok);
    println!("  gray intervals: C = {:.4}, L2 <= L3 {}", rep.item3_c, rep.item3_ordered);
    let mut oracle_rows = Vec::new();
    if oracle > 0 {
        let (bits, p) = working_precision(12.0);
        let xi = xi_value(&mut ap, bits)?;
        let hints = sequence_candidates_below(&mut ap, 20.0)?;
        for j in 0..oracle {
            let q = BigReal::from_f64(12.0 * (j as f64 + 0.5) / oracle as f64, p);
            let b = minima_bruteforce(&xi, &q, &hints, r_max, p)?;
            oracle_rows.push(json!({ "q": q.to_f64(), "L": b.l_f64() }));
        }
        println!("  brute-force oracle at {oracle} points of [0, 12] (radius cap {r_max})");
    }
    sink.json(cfg, true, json!({ "validity": v, "delta": sys.delta, "threshold": sys.threshold, "comparison": rep, "oracle": oracle_rows }))?;
    sink.csv(cfg, &to_csv(&rep, ""))?;
    sink.svg(cfg, &to_svg(&sys, &rep, &title))?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// exponents

fn fmt_exp(e: &Exponent) -> String {
    match e {
        Exponent::Exact { value } => value.to_decimal(10),
        Exponent::Interval { lo, hi } => format!("[{}, {}]", lo.to_decimal(6), hi.to_decimal(6)),
        Exponent::Empirical { estimate, .. } => format!("{estimate:.6}"),
    }
}

/// Distance from a point to an exponent's value or interval.
fn distance(e: &Exponent, x: f64) -> f64 {
    if x < e.lo() {
        e.lo() - x
    } else if x > e.hi() {
        x - e.hi()
    } else {
        0.0
    }
}

fn cmd_exponents(cfg: &mut RunConfig, sink: &Sink, precision: usize, a: &SeedArgs, delta: Option<&str>, emp: bool, k: Option<&str>) -> Out<bool> {
    let mut ap = approx(cfg, a, precision)?;
    let q = ap.prog().quantities(64, precision)?;
    let forced = cfg.get::<f64>("delta", delta, None)?;
    let d = match forced {
        Some(d) => BigReal::from_f64(d, precision),
        None => {
            let r = delta_estimate(&mut ap.seq, 18)?;
            if r.exact_zero {
                BigReal::zero(precision)
            } else {
                r.estimate
            }
        }
    };
    let inputs = ExponentInputs::from_quantities(&q, d.clone());
    let cf = closed_form(&inputs)?;
    println!("{}  {}", ap.seed().label(), program_label(&ap));
    println!("  sigma = {}  tau = {}  delta = {}", q.sigma.to_decimal(10), q.tau.to_decimal(10), d.to_decimal(10));
    let emp_rep = if cfg.flag("empirical", emp)? {
        let w = window(&cfg.raw("k", k, Some("4:14")).expect("default"), "k")?;
        let choice = match forced {
            Some(_) => DeltaChoice::Forced(d.clone()),
            None => DeltaChoice::Auto,
        };
        let sys = predicted_system(&mut ap, w.0, w.1 + 1, choice, Anchor::Auto)?;
        let qs = empirical_abscissas(&sys, w)?;
        let (_, minima) = minima_on_grid(&mut ap, &qs)?;
        let samples: Vec<MinimaSample> = minima.into_iter().map(|c| c.sample).collect();
        Some(empirical(&sys, &samples, w)?)
    } else {
        None
    };
    println!("  {:<12} {:<32} {:<12} |difference|", "exponent", "closed form", "empirical");
    let mut table = String::from("exponent,kind,lo,hi,empirical,difference\n");
    let mut rows = Vec::new();
    for (name, e) in cf.entries() {
        let em = emp_rep.as_ref().and_then(|r| r.set.get(name)).map(|x| x.lo());
        let diff = em.map(|x| distance(e, x));
        let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        println!("  {:<12} {:<32} {:<12} {}", name, fmt_exp(e), f(em), f(diff));
        let kind = match e {
            Exponent::Exact { .. } => "exact",
            Exponent::Interval { .. } => "interval",
            Exponent::Empirical { .. } => "empirical",
        };
        let _ = writeln!(table, "{name},{kind},{},{},{},{}", e.lo(), e.hi(), f(em), f(diff));
        rows.push(json!({ "name": name, "closed_form": e, "empirical": em, "difference": diff }));
    }
    if let Some(c) = &cf.psi2_crossover {
        println!("  psi2_inf crossover at delta = {}", c.to_decimal(8));
    }
    sink.json(cfg, true, json!({ "inputs": inputs, "closed_form": cf, "table": rows, "empirical": emp_rep }))?;
    sink.csv(cfg, &table)?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// xi

fn cmd_xi(cfg: &mut RunConfig, sink: &Sink, a: &SeedArgs, digits: Option<&str>) -> Out<bool> {
    let digits: usize = cfg.need("digits", digits, Some("50"))?;
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    let mut ap = approx(cfg, a, bits + 64)?;
    let xi = xi_value(&mut ap, bits)?;
    let value = xi.value.to_decimal(digits);
    println!("xi = {value}");
    println!("  certified to 2^-{bits}, from y_{} ({} nested enclosures)", xi.index, xi.enclosures.len());
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10).pow(digits as u32));
    let check = bl_oracle(&ap, bits + 32).map(|(lo, hi)| {
        let c = xi.center();
        let mid = (&lo + &hi) / BigInt::from(2);
        let gap = (&c - &mid).abs();
        gap < tol
    });
    match check {
        Some(true) => println!("  continued-fraction cross-check: agree to 1e-{digits}"),
        Some(false) => println!("  continued-fraction cross-check: DISAGREE"),
        None => println!("  continued-fraction cross-check: not available for this family"),
    }
    let prop = properness_check(&mut ap, 14)?;
    println!("  proper: {} (delta {} vs threshold {})", prop.proper, prop.delta_hat.to_decimal(6), prop.threshold.to_decimal(6));
    let ok = check != Some(false) && xi.nested;
    sink.json(cfg, ok, json!({ "digits": digits, "value": value, "xi": xi, "cross_check": check, "properness": prop }))?;
    if !ok {
        return Err(Fail::Check("xi does not match the continued-fraction oracle".into()));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// gray

fn cmd_gray(cfg: &mut RunConfig, sink: &Sink, precision: usize, a: &SeedArgs, i: Option<&str>) -> Out<bool> {
    let i: i64 = cfg.need("i", i, Some("5"))?;
    let mut ap = approx(cfg, a, precision)?;
    let fan = gray_fan(&mut ap, i)?;
    println!("gray fan at i = {i}: Tr w = {}, det w = {}, d_i = {}", big(&fan.t_next), big(&fan.d_next), big(&fan.d_i));
    let mut table = String::from("m,a,p,q,x0,x1,x2,content,log_norm\n");
    for pt in &fan.points {
        println!("  m {:>3}  x = {}  content {}  log|x| {}", pt.m, pt.x, big(&pt.content), pt.log_norm.to_decimal(6));
        let _ = writeln!(
            table,
            "{},{},{},{},{},{},{},{},{}",
            pt.m,
            pt.a.clone().unwrap_or_default(),
            big(&pt.p),
            big(&pt.q),
            pt.x.x0,
            pt.x.x1,
            pt.x.x2,
            big(&pt.content),
            pt.log_norm.to_decimal(12)
        );
    }
    let c = &fan.checks;
    println!(
        "  endpoints {} {}  recurrence {}  decomposition {}  wedge {}  contents {} (d z: {}) {}  lambda {}",
        c.starts_at_y_i, c.ends_at_y_next, c.recurrence, c.decomposition, c.wedge_is_dz, c.content_product_divides_d, c.content_product_divides_dz, c.content_gcd_divides_y, c.lambda_integral
    );
    let ok = c.all();
    sink.json(cfg, ok, json!({ "fan": fan }))?;
    sink.csv(cfg, &table)?;
    if !ok {
        return Err(Fail::Check("a gray-fan identity failed".into()));
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumOpts<'a> {
    endpoints: bool,
    sweep: bool,
    k_max: Option<&'a str>,
    curve: bool,
    c_lo: Option<&'a str>,
    grid: Option<&'a str>,
    program: Option<&'a str>,
}

fn cmd_spectrum(cfg: &mut RunConfig, sink: &Sink, precision: usize, o: SpectrumOpts) -> Out<bool> {
    let sweep = cfg.flag("sweep", o.sweep)?;
    let curve = cfg.flag("curve", o.curve)?;
    let endpoints = cfg.flag("endpoints", o.endpoints)? || (!sweep && !curve);
    let mut result = serde_json::Map::new();
    let mut table = String::new();
    if endpoints {
        let t = spectrum_endpoints(precision);
        println!("spectrum endpoints");
        for e in &t.endpoints {
            println!("  {:<10} = {:<16} = {}", e.label, e.form, e.value.to_decimal(15));
        }
        let parts: Vec<String> = t
            .intervals
            .iter()
            .map(|(lo, hi)| match hi {
                Some(hi) => format!("[{}, {}]", lo.form, hi.form),
                None => format!("[{}, inf)", lo.form),
            })
            .collect();
        println!("  closure of the omega2 spectrum: {}", parts.join(" U "));
        table.push_str("label,form,value\n");
        for e in &t.endpoints {
            let _ = writeln!(table, "{},{},{}", e.label, e.form, e.value.to_decimal(20));
        }
        result.insert("endpoints".into(), json!(t));
    }
    let mut ok = true;
    if sweep {
        let k_max: u32 = cfg.need("k-max", o.k_max, Some("10"))?;
        let prog = program(cfg, o.program)?;
        let rep = omega2_sweep(&prog, &recipe_triples(k_max), 18, precision)?;
        println!("recipe sweep, k <= {k_max}: {} triples", rep.rows.len());
        println!("  max gap of [0, sigma/(1+sigma)] = {:.4}", rep.delta_gap);
        println!("  max gap of [2/sigma, 1+2/sigma] = {:.4}", rep.omega2_gap);
        ok &= rep.rows.iter().all(|r| r.inside);
        if !table.is_empty() {
            table.push('\n');
        }
        table.push_str("a,b,c,alpha,beta,delta_k,inside,proper\n");
        for r in &rep.rows {
            let _ = writeln!(
                table,
                "{},{},{},{},{},{},{},{}",
                r.abc.0,
                r.abc.1,
                r.abc.2,
                r.bracket.0.to_decimal(12),
                r.bracket.1.to_decimal(12),
                r.delta_k.to_decimal(12),
                r.inside,
                r.proper
            );
        }
        result.insert("sweep".into(), json!(rep));
    }
    if curve {
        let prog = program(cfg, o.program)?;
        let q = prog.quantities(64, precision)?;
        let c_lo: f64 = cfg.need("c-lo", o.c_lo, Some("0"))?;
        let n: usize = cfg.need("grid", o.grid, Some("11"))?;
        let pts = joint_curve(&q.sigma, &BigReal::from_f64(c_lo, precision), n)?;
        println!("joint spectrum curve (x, lambda2_hat, omega2, omega2_hat)");
        for p in &pts {
            println!("  {} {} {} {}", p[0].to_decimal(6), p[1].to_decimal(6), p[2].to_decimal(6), p[3].to_decimal(6));
        }
        result.insert("curve".into(), json!(pts));
    }
    sink.json(cfg, ok, Value::Object(result))?;
    sink.csv(cfg, &table)?;
    if !ok {
        return Err(Fail::Check("a sweep bracket does not contain its delta_k".into()));
    }
    Ok(true)
}
