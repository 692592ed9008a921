//! Argument handling and subcommand dispatch.

use std::fmt::Write as _;
use std::io::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qmoyal_core::format::to_json;
use qmoyal_core::moyal::poisson;
use qmoyal_core::moyal::{bracket_kappa_with, star_kappa_with, StarSeriesLimit};
use qmoyal_core::phase::Derivation;
use qmoyal_core::qdiff::{
    dq2, dq2_symbolic, jackson, nabla_check, nabla_check_inverse, nabla_check_symbolic, nabla_hat, nabla_hat_inverse,
    nabla_hat_symbolic, shift_inverse, GridFn, LineFamily, LineFn, PlaneFn, QParams, QuotientPoly, SeriesValue,
};
use qmoyal_core::qmoyal::{
    qmoyal_bracket, qmoyal_bracket_quantum_poly, qstar_classical, qstar_commutation_check, qstar_discrete,
    qstar_discrete_operator_form, qstar_quantum, xfd_action, OrderingKind,
};
use qmoyal_core::ring::{qint, ExactScalar, QConvention};
use qmoyal_core::verify::{self, SweepReport};
use qmoyal_core::wigner::{
    harmonic_rotation, moyal_evolve, wigner_transform, PhaseGrid, PhaseGridSpec, WaveFn, WignerOptions,
};
use qmoyal_core::{Poly, Rational};

use crate::expr::parse;

/// Exit status for a failed verification.
pub const EXIT_VERIFY: i32 = 1;
/// Exit status for bad usage, unparsable input or an operation that cannot be carried out.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qmoyal", version, about = "Exact q-deformed Moyal calculus")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Substitute this rational for q (exact); numeric commands use it as the lattice ratio.
    #[arg(long, global = true)]
    pub q: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = QIntArg::Symmetric)]
    pub qint: QIntArg,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QIntArg {
    Symmetric,
    Basic,
}

impl From<QIntArg> for QConvention {
    fn from(a: QIntArg) -> Self {
        match a {
            QIntArg::Symmetric => QConvention::Symmetric,
            QIntArg::Basic => QConvention::Basic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderingArg {
    Standard,
    Anti,
    Weyl,
    Discrete,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// kappa-star product f * g.
    Star(PairArgs),
    /// Moyal bracket (f*g - g*f)/(2 kappa).
    Bracket(PairArgs),
    /// q-star product.
    Qstar {
        f: String,
        g: String,
        #[arg(long, value_enum, default_value_t = OrderingArg::Standard)]
        ordering: OrderingArg,
        /// Quantum (kappa-dependent) product; standard and anti orderings only.
        #[arg(long)]
        quantum: bool,
        /// Evaluate the discrete product through its dilation-operator form.
        #[arg(long)]
        operator: bool,
    },
    /// q-Moyal bracket.
    Qbracket {
        f: String,
        g: String,
        /// Quantum bracket built from the quantum q-star product.
        #[arg(long)]
        quantum: bool,
        #[arg(long, value_enum, default_value_t = OrderingArg::Standard)]
        ordering: OrderingArg,
        /// Compute the bracket as the action of the difference vector field of f on g.
        #[arg(long, conflicts_with = "quantum")]
        xfd: bool,
    },
    /// Single algebra operations on expressions.
    #[command(subcommand)]
    Calc(Calc),
    /// Identity sweeps; exit status 1 on any violation.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Degree bound: exponent range for eq291/qjacobi, total degree for assoc (kappa-star) and jacobi.
        #[arg(long)]
        max_degree: Option<i64>,
        /// Number of random cases (jacobi).
        #[arg(long, default_value_t = 200)]
        cases: usize,
        /// Exponent range [-r, r] for the q-product part of assoc.
        #[arg(long, default_value_t = 3)]
        range: i64,
    },
    /// Jackson integral of f from 0 to y, or with --lam the constant-step inverse.
    Jackson {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        lam: Option<f64>,
    },
    /// q-difference operators.
    Qdiff {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long, value_enum, default_value_t = DiffOp::Dq2)]
        op: DiffOp,
        #[arg(long, allow_negative_numbers = true)]
        x: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        m: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        n: i64,
        /// Exact result on a polynomial instead of a numeric value.
        #[arg(long)]
        symbolic: bool,
    },
    /// Checks that a difference operator undoes its series inverse at random points.
    InvertCheck {
        #[command(flatten)]
        func: FuncArgs,
        #[arg(long, value_enum, default_value_t = InverseOp::Hat)]
        op: InverseOp,
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 1)]
        n: i64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Wigner function of a wave function, optionally evolved.
    Wigner(WignerArgs),
}

#[derive(Subcommand, Debug)]
pub enum Calc {
    /// Canonical form (with --q substituted if given).
    Simplify {
        f: String,
        /// Substitute this rational for kappa.
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Numeric value at a phase-space point; q from --q, default 1/2.
    Eval {
        f: String,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        kappa: f64,
    },
    /// q-integer [n] in the --qint convention.
    Qint {
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Apply a derivation.
    Derive {
        #[arg(value_enum)]
        op: DerivationArg,
        f: String,
    },
    /// Multiply x^a p^b by q^(r a + s b).
    Dilate {
        f: String,
        #[arg(allow_negative_numbers = true)]
        r: i64,
        #[arg(allow_negative_numbers = true)]
        s: i64,
    },
    /// Poisson bracket d_p f d_x g - d_x f d_p g.
    Poisson { f: String, g: String },
    /// Ordering commutation check for p^m x^n and p^k x^l; zero when the identity holds.
    Qcommute {
        #[arg(allow_negative_numbers = true)]
        m: i64,
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(allow_negative_numbers = true)]
        k: i64,
        #[arg(allow_negative_numbers = true)]
        l: i64,
        #[arg(long, value_enum, default_value_t = OrderingArg::Standard)]
        ordering: OrderingArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DerivationArg {
    Dx,
    Dp,
    Xdx,
    Pdp,
    Qdx,
    Qdp,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    pub f: String,
    pub g: String,
    /// Keep series terms up to this order (needed for Laurent inputs).
    #[arg(long)]
    pub order: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Ordering commutation identity, all three orderings.
    Eq291,
    Qjacobi,
    Assoc,
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DiffOp {
    Dq2,
    Hat,
    Check,
    HatInv,
    CheckInv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InverseOp {
    Jackson,
    Hat,
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Expr,
    Gaussian,
    ExpDecay,
}

#[derive(Args, Debug)]
pub struct FuncArgs {
    /// Function as an expression in x (and p); ignored for named families.
    #[arg(default_value = "x")]
    pub expr: String,
    #[arg(long, value_enum, default_value_t = Family::Expr)]
    pub family: Family,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center_p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum State {
    Gaussian,
    Hermite,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[arg(long, value_enum, default_value_t = State::Gaussian)]
    pub state: State,
    /// Hermite-Gaussian index.
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub momentum: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    #[arg(long, default_value_t = 5.0)]
    pub lx: f64,
    #[arg(long, default_value_t = 5.0)]
    pub lp: f64,
    /// Evolve to this time under the Hamiltonian.
    #[arg(long)]
    pub evolve: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value = "(x^2 + p^2)/2")]
    pub hamiltonian: String,
    /// Write x,p,value rows here ("-" for stdout; the summary then goes to stderr).
    #[arg(long)]
    pub csv: Option<String>,
}

/// Collected result of one invocation.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: 0, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Self { code, stdout: String::new(), stderr }
    }
}

type CmdResult = Result<Outcome, String>;

/// Runs the command line `args` (including the program name).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Outcome::ok(text) } else { Outcome::fail(code, text) };
        }
    };
    match dispatch(&cli) {
        Ok(o) => o,
        Err(msg) => Outcome::fail(EXIT_USAGE, format!("qmoyal: {msg}\n")),
    }
}

fn parse_arg(label: &str, text: &str) -> Result<Poly, String> {
    parse(text).map_err(|e| format!("{label}: {e}"))
}

fn rational_arg(flag: &str, s: &str) -> Result<Rational, String> {
    let f = parse(s).map_err(|_| format!("{flag} expects a rational number, got {s:?}"))?;
    if f.is_zero() {
        return Ok(Rational::from_i64(0));
    }
    match f.as_monomial() {
        Some(((0, 0), c)) => c.as_constant().ok_or_else(|| format!("{flag} expects a rational number, got {s:?}")),
        _ => Err(format!("{flag} expects a rational number, got {s:?}")),
    }
}

fn exact_q(cli: &Cli) -> Result<Option<Rational>, String> {
    cli.q.as_deref().map(|s| rational_arg("--q", s)).transpose()
}

fn numeric_q(cli: &Cli) -> Result<f64, String> {
    Ok(exact_q(cli)?.map_or(0.5, |v| v.to_f64()))
}

fn emit_poly(cli: &Cli, f: Poly) -> CmdResult {
    let f = match exact_q(cli)? {
        Some(q) => f.at_q(&q).map_err(|e| e.to_string())?,
        None => f,
    };
    Ok(Outcome::ok(match cli.format {
        Format::Text => format!("{f}\n"),
        Format::Json => json_line(&to_json(&f)),
    }))
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn ordering(o: OrderingArg) -> Option<OrderingKind> {
    match o {
        OrderingArg::Standard => Some(OrderingKind::Standard),
        OrderingArg::Anti => Some(OrderingKind::Antistandard),
        OrderingArg::Weyl => Some(OrderingKind::Weyl),
        OrderingArg::Discrete => None,
    }
}

fn limit(order: Option<u32>) -> StarSeriesLimit {
    order.map_or(StarSeriesLimit::Auto, StarSeriesLimit::Order)
}

fn dispatch(cli: &Cli) -> CmdResult {
    let conv = QConvention::from(cli.qint);
    match &cli.command {
        Command::Star(a) => {
            let (f, g) = (parse_arg("f", &a.f)?, parse_arg("g", &a.g)?);
            emit_poly(cli, star_kappa_with(&f, &g, limit(a.order)).map_err(|e| e.to_string())?)
        }
        Command::Bracket(a) => {
            let (f, g) = (parse_arg("f", &a.f)?, parse_arg("g", &a.g)?);
            emit_poly(cli, bracket_kappa_with(&f, &g, limit(a.order)).map_err(|e| e.to_string())?)
        }
        Command::Qstar { f, g, ordering: o, quantum, operator } => {
            let (f, g) = (parse_arg("f", f)?, parse_arg("g", g)?);
            if *operator && (*o != OrderingArg::Discrete || *quantum) {
                return Err("--operator applies to --ordering discrete only".into());
            }
            let out = match (ordering(*o), quantum) {
                (None, false) if *operator => qstar_discrete_operator_form(&f, &g),
                (None, false) => qstar_discrete(&f, &g),
                (Some(k), false) => qstar_classical(&f, &g, k),
                (Some(k @ (OrderingKind::Standard | OrderingKind::Antistandard)), true) => {
                    qstar_quantum(&f, &g, k, conv).map_err(|e| e.to_string())?
                }
                _ => return Err("--quantum needs --ordering standard or anti".into()),
            };
            emit_poly(cli, out)
        }
        Command::Qbracket { f, g, quantum, ordering: o, xfd } => {
            let (f, g) = (parse_arg("f", f)?, parse_arg("g", g)?);
            let out = if *quantum {
                match ordering(*o) {
                    Some(k @ (OrderingKind::Standard | OrderingKind::Antistandard)) => {
                        qmoyal_bracket_quantum_poly(&f, &g, k, conv).map_err(|e| e.to_string())?
                    }
                    _ => return Err("--quantum needs --ordering standard or anti".into()),
                }
            } else if *xfd {
                xfd_action(&f, &g)
            } else {
                qmoyal_bracket(&f, &g)
            };
            emit_poly(cli, out)
        }
        Command::Calc(c) => calc_cmd(cli, c, conv),
        Command::Verify { suite, max_degree, cases, range } => {
            let report = match suite {
                Suite::Eq291 => verify::ordering_identity(max_degree.unwrap_or(6)),
                Suite::Qjacobi => verify::qjacobi(max_degree.unwrap_or(3)),
                Suite::Assoc => verify::assoc(*range, max_degree.unwrap_or(5)),
                Suite::Jacobi => verify::jacobi(*cases, max_degree.unwrap_or(4), cli.seed),
            };
            Ok(report_outcome(cli, &report))
        }
        Command::Jackson { func, y, lam } => {
            let params = QParams::new(numeric_q(cli)?);
            let f = line_fn(func, &params)?;
            let v = match lam {
                Some(l) => shift_inverse(&f, *y, *l, &params),
                None => jackson(&f, *y, &params),
            }
            .map_err(|e| e.to_string())?;
            Ok(series_outcome(cli, &v))
        }
        Command::Qdiff { func, op, x, p, m, n, symbolic } => qdiff_cmd(cli, func, *op, *x, *p, *m, *n, *symbolic),
        Command::InvertCheck { func, op, m, n, points, tol } => invert_check(cli, func, *op, *m, *n, *points, *tol),
        Command::Wigner(w) => wigner_cmd(cli, w),
    }
}

fn calc_cmd(cli: &Cli, c: &Calc, conv: QConvention) -> CmdResult {
    let e = |e: qmoyal_core::Error| e.to_string();
    match c {
        Calc::Simplify { f, kappa } => {
            let mut f = parse_arg("f", f)?;
            if let Some(k) = kappa {
                f = f.at_kappa(&rational_arg("--kappa", k)?);
            }
            emit_poly(cli, f)
        }
        Calc::Eval { f, x, p, kappa } => {
            let f = parse_arg("f", f)?;
            Ok(value_outcome(cli, f.eval(*x, *p, numeric_q(cli)?, *kappa).map_err(e)?))
        }
        Calc::Qint { n } => emit_poly(cli, Poly::constant(qint(*n, conv).map_err(e)?)),
        Calc::Derive { op, f } => {
            let d = match op {
                DerivationArg::Dx => Derivation::Dx,
                DerivationArg::Dp => Derivation::Dp,
                DerivationArg::Xdx => Derivation::XDx,
                DerivationArg::Pdp => Derivation::PDp,
                DerivationArg::Qdx => Derivation::QDx(conv),
                DerivationArg::Qdp => Derivation::QDp(conv),
            };
            emit_poly(cli, parse_arg("f", f)?.apply(d).map_err(e)?)
        }
        Calc::Dilate { f, r, s } => emit_poly(cli, parse_arg("f", f)?.dilate(*r, *s)),
        Calc::Poisson { f, g } => emit_poly(cli, poisson(&parse_arg("f", f)?, &parse_arg("g", g)?)),
        Calc::Qcommute { m, n, k, l, ordering: o } => match ordering(*o) {
            Some(kind) => emit_poly(cli, qstar_commutation_check::<Rational>(*m, *n, *k, *l, kind)),
            None => Err("qcommute needs --ordering standard, anti or weyl".into()),
        },
    }
}

fn report_outcome(cli: &Cli, report: &SweepReport) -> Outcome {
    let stdout = match cli.format {
        Format::Text => format!("{report}\n"),
        Format::Json => json_line(report),
    };
    Outcome { code: if report.passed() { 0 } else { EXIT_VERIFY }, stdout, stderr: String::new() }
}

/// Folds `-0.0` into `0.0` for display.
fn unsigned_zero(v: f64) -> f64 {
    v + 0.0
}

fn series_outcome(cli: &Cli, v: &SeriesValue<f64>) -> Outcome {
    let value = unsigned_zero(v.value);
    #[derive(Serialize)]
    struct J {
        value: f64,
        terms: usize,
        tail_bound: f64,
    }
    Outcome::ok(match cli.format {
        Format::Text => format!("value = {value}\nterms = {}\ntail_bound = {:e}\n", v.terms, v.tail_bound),
        Format::Json => json_line(&J { value, terms: v.terms, tail_bound: v.tail_bound }),
    })
}

fn value_outcome(cli: &Cli, value: f64) -> Outcome {
    let value = unsigned_zero(value);
    Outcome::ok(match cli.format {
        Format::Text => format!("{value}\n"),
        Format::Json => json_line(&serde_json::json!({ "value": value })),
    })
}

/// A numeric function of one or two variables chosen on the command line.
enum NumFn {
    Line(LineFamily<f64>),
    Plane(GridFn<f64>),
}

fn expr_numeric(func: &FuncArgs, params: &QParams<f64>) -> Result<Poly, String> {
    let f = parse_arg("function", &func.expr)?;
    if f.terms().any(|(_, c)| c.has_kappa()) {
        return Err("numeric functions cannot contain kappa".into());
    }
    let _ = params;
    Ok(f)
}

fn line_fn(func: &FuncArgs, params: &QParams<f64>) -> Result<LineFamily<f64>, String> {
    match func.family {
        Family::Gaussian => Ok(LineFamily::Gaussian { center: func.center, width: func.width }),
        Family::ExpDecay => Ok(LineFamily::ExpDecay { rate: func.rate }),
        Family::Expr => {
            let f = expr_numeric(func, params)?;
            if f.terms().any(|(&(_, b), _)| b != 0) {
                return Err("this operation takes a function of x only".into());
            }
            let terms = f.to_numeric(params.q, 0.0).map_err(|e| e.to_string())?;
            Ok(LineFamily::Polynomial(terms.into_iter().map(|(a, _, c)| (a, c)).collect()))
        }
    }
}

fn plane_fn(func: &FuncArgs, params: &QParams<f64>) -> Result<GridFn<f64>, String> {
    match func.family {
        Family::Gaussian => Ok(GridFn::Gaussian { x0: func.center, p0: func.center_p, width: func.width }),
        Family::ExpDecay => Ok(GridFn::ExpDecay { rate: func.rate }),
        Family::Expr => GridFn::from_poly(&expr_numeric(func, params)?, params).map_err(|e| e.to_string()),
    }
}

fn num_fn(func: &FuncArgs, params: &QParams<f64>, plane: bool) -> Result<NumFn, String> {
    Ok(if plane { NumFn::Plane(plane_fn(func, params)?) } else { NumFn::Line(line_fn(func, params)?) })
}

fn quotient_text(cli: &Cli, q: &QuotientPoly<Rational>) -> CmdResult {
    match q.reduce() {
        Ok(f) => emit_poly(cli, f),
        Err(_) => {
            let (num, den) = match exact_q(cli)? {
                Some(v) => (
                    q.numerator.at_q(&v).map_err(|e| e.to_string())?,
                    q.denominator.at_q(&v).map_err(|e| e.to_string())?,
                ),
                None => (q.numerator.clone(), q.denominator.clone()),
            };
            Ok(Outcome::ok(match cli.format {
                Format::Text => format!("({num}) / ({den})\n"),
                Format::Json => json_line(&serde_json::json!({
                    "numerator": to_json(&num),
                    "denominator": qmoyal_core::format::coefficient_to_json(&den),
                })),
            }))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn qdiff_cmd(
    cli: &Cli,
    func: &FuncArgs,
    op: DiffOp,
    x: Option<f64>,
    p: Option<f64>,
    m: i64,
    n: i64,
    symbolic: bool,
) -> CmdResult {
    if symbolic {
        if func.family != Family::Expr {
            return Err("--symbolic needs an expression".into());
        }
        let f = parse_arg("function", &func.expr)?;
        let q = match op {
            DiffOp::Dq2 => dq2_symbolic(&f),
            DiffOp::Hat => nabla_hat_symbolic(&f, m, n).map_err(|e| e.to_string())?,
            DiffOp::Check => nabla_check_symbolic(&f, m, n).map_err(|e| e.to_string())?,
            DiffOp::HatInv | DiffOp::CheckInv => return Err("inverse operators have no --symbolic form".into()),
        };
        return quotient_text(cli, &q);
    }
    let params = QParams::new(numeric_q(cli)?);
    let x = x.ok_or("--x is required")?;
    if matches!(op, DiffOp::HatInv | DiffOp::CheckInv) {
        let g = plane_fn(func, &params)?;
        let p = p.ok_or("--p is required")?;
        let v = if op == DiffOp::HatInv {
            nabla_hat_inverse(&g, x, p, m, n, &params)
        } else {
            nabla_check_inverse(&g, x, p, m, n, &params)
        }
        .map_err(|e| e.to_string())?;
        return Ok(series_outcome(cli, &v));
    }
    let value = match (num_fn(func, &params, op != DiffOp::Dq2)?, op) {
        (NumFn::Line(f), DiffOp::Dq2) => dq2(&f, x, &params),
        (NumFn::Plane(f), DiffOp::Hat) => nabla_hat(&f, x, p.ok_or("--p is required")?, m, n, &params),
        (NumFn::Plane(f), DiffOp::Check) => nabla_check(&f, x, p.ok_or("--p is required")?, m, n, &params),
        _ => unreachable!("family matches operator arity"),
    }
    .map_err(|e| e.to_string())?;
    Ok(value_outcome(cli, value))
}

#[derive(Serialize)]
struct InvertReport {
    op: String,
    q: f64,
    points: usize,
    max_error: f64,
    tol: f64,
    passed: bool,
}

#[allow(clippy::too_many_arguments)]
fn invert_check(cli: &Cli, func: &FuncArgs, op: InverseOp, m: i64, n: i64, points: usize, tol: f64) -> CmdResult {
    let params = QParams::new(numeric_q(cli)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut sample = || {
        let s: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        s * rng.gen_range(0.5..2.0)
    };
    let mut worst: f64 = 0.0;
    let err = |e: qmoyal_core::Error| e.to_string();
    match num_fn(func, &params, op != InverseOp::Jackson)? {
        NumFn::Line(f) => {
            let big = |y: f64| jackson(&f, y, &params).map(|v| v.value).unwrap_or(f64::NAN);
            for _ in 0..points {
                let y = sample().abs();
                worst = worst.max((dq2(&big, y, &params).map_err(err)? - f.eval(y)).abs());
            }
        }
        NumFn::Plane(g) => {
            for _ in 0..points {
                let (x, p) = (sample(), sample());
                let v = if op == InverseOp::Hat {
                    let inv = |a: f64, b: f64| {
                        nabla_hat_inverse(&g, a, b, m, n, &params).map(|v| v.value).unwrap_or(f64::NAN)
                    };
                    nabla_hat(&inv, x, p, m, n, &params)
                } else {
                    let inv = |a: f64, b: f64| {
                        nabla_check_inverse(&g, a, b, m, n, &params).map(|v| v.value).unwrap_or(f64::NAN)
                    };
                    nabla_check(&inv, x, p, m, n, &params)
                }
                .map_err(err)?;
                worst = worst.max((v - g.eval(x, p)).abs());
            }
        }
    }
    if worst.is_nan() {
        // a series failed to converge at some point; reproduce it for the message
        return Err("inverse series did not converge (need 0 < q < 1 and m, n > 0)".into());
    }
    let name = match op {
        InverseOp::Jackson => "jackson",
        InverseOp::Hat => "hat",
        InverseOp::Check => "check",
    };
    let report = InvertReport { op: name.into(), q: params.q, points, max_error: worst, tol, passed: worst <= tol };
    let stdout = match cli.format {
        Format::Text => format!(
            "invert-check {}: max error {:e} over {} points (tol {:e}) {}\n",
            report.op,
            worst,
            points,
            tol,
            if report.passed { "ok" } else { "FAILED" }
        ),
        Format::Json => json_line(&report),
    };
    Ok(Outcome { code: if report.passed { 0 } else { EXIT_VERIFY }, stdout, stderr: String::new() })
}

#[derive(Serialize)]
struct WignerSummary {
    n: usize,
    lx: f64,
    lp: f64,
    t: f64,
    mass: f64,
    min: f64,
    max: f64,
    imag_residue: f64,
    window: f64,
    nodes: usize,
    /// max |f(x,p) - f(-x,-p)| over the grid.
    parity_defect: f64,
    /// L-infinity distance to the closed form, when one is known.
    linf_error: Option<f64>,
}

fn parity_defect(g: &PhaseGrid<f64>) -> f64 {
    let n = g.spec.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((g.get(i, j) - g.get(n - 1 - i, n - 1 - j)).abs());
        }
    }
    worst
}

fn oscillator() -> Poly {
    parse("(x^2 + p^2)/2").expect("valid literal")
}

fn wigner_cmd(cli: &Cli, w: &WignerArgs) -> CmdResult {
    let e = |e: qmoyal_core::Error| e.to_string();
    let psi = match w.state {
        State::Gaussian => WaveFn::gaussian(w.center, w.width, w.momentum, w.hbar),
        State::Hermite => WaveFn::hermite(w.n, w.hbar),
    }
    .map_err(e)?;
    let spec = PhaseGridSpec::new(w.lx, w.lp, w.grid).map_err(e)?;
    let res = wigner_transform(&psi, spec, &WignerOptions::default()).map_err(e)?;
    let closed = move |x: f64, p: f64| psi.wigner_closed_form(x, p);
    let (grid, t, linf_error): (PhaseGrid<f64>, f64, Option<f64>) = match w.evolve {
        None => {
            let err = res.grid.linf_distance(closed);
            (res.grid.clone(), 0.0, Some(err))
        }
        Some(t) => {
            let h = parse_arg("hamiltonian", &w.hamiltonian)?;
            let g = moyal_evolve(&res.grid, &h, t, w.dt).map_err(e)?;
            let err = if h == oscillator() {
                Some(g.linf_distance(harmonic_rotation(closed, t)))
            } else if h.terms().all(|(&e, _)| e == (0, 0)) {
                Some(g.linf_distance(closed))
            } else {
                None
            };
            (g, t, err)
        }
    };
    let summary = WignerSummary {
        n: w.grid,
        lx: w.lx,
        lp: w.lp,
        t,
        mass: grid.mass(),
        min: grid.min(),
        max: grid.max(),
        imag_residue: res.imag_residue,
        window: res.window,
        nodes: res.nodes,
        parity_defect: parity_defect(&grid),
        linf_error,
    };
    let text = match cli.format {
        Format::Json => json_line(&summary),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "grid = {0}x{0} on [-{1}, {1}] x [-{2}, {2}], t = {3}", summary.n, w.lx, w.lp, t);
            let _ = writeln!(s, "mass = {}", summary.mass);
            let _ = writeln!(s, "min = {:e}, max = {:e}", summary.min, summary.max);
            let _ = writeln!(s, "imag_residue = {:e}", summary.imag_residue);
            let _ = writeln!(s, "parity_defect = {:e}", summary.parity_defect);
            if let Some(err) = summary.linf_error {
                let _ = writeln!(s, "linf_error = {err:e}");
            }
            s
        }
    };
    let csv = w.csv.as_ref().map(|_| {
        let mut out = String::from("x,p,value\n");
        for i in 0..spec.n {
            for j in 0..spec.n {
                let _ = writeln!(out, "{},{},{}", spec.x(i), spec.p(j), grid.get(i, j));
            }
        }
        out
    });
    match (w.csv.as_deref(), csv) {
        (Some("-"), Some(c)) => Ok(Outcome { code: 0, stdout: c, stderr: text }),
        (Some(path), Some(c)) => {
            std::fs::File::create(path)
                .and_then(|mut f| f.write_all(c.as_bytes()))
                .map_err(|err| format!("cannot write {path}: {err}"))?;
            Ok(Outcome::ok(text))
        }
        _ => Ok(Outcome::ok(text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(args: &[&str]) -> Outcome {
        run(std::iter::once("qmoyal").chain(args.iter().copied()))
    }

    #[test]
    fn basic_commands() {
        assert_eq!(out(&["qbracket", "p", "x"]).stdout, "1\n");
        assert_eq!(out(&["bracket", "x^3", "p^3"]).stdout, "-9*x^2*p^2 - 6*kappa^2\n");
        assert_eq!(out(&["star", "x", "p"]).stdout, "x*p - kappa\n");
        assert_eq!(out(&["qstar", "p", "x"]).stdout, "q*x*p\n");
        assert_eq!(out(&["qstar", "p", "x", "--quantum"]).stdout, "q*x*p + kappa\n");
        assert_eq!(out(&["qstar", "x", "p", "--ordering", "discrete"]).stdout, "q*x*p\n");
        assert_eq!(out(&["qbracket", "x^2", "p^2", "--q", "1"]).stdout, "-4*x*p\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(out(&["star", "2x", "p"]).code, EXIT_USAGE);
        assert_eq!(out(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(out(&["qstar", "x", "p", "--ordering", "weyl", "--quantum"]).code, EXIT_USAGE);
        assert_eq!(out(&["verify", "qjacobi", "--max-degree", "2"]).code, EXIT_VERIFY);
        assert_eq!(out(&["verify", "eq291", "--max-degree", "2"]).code, 0);
        assert_eq!(out(&["--help"]).code, 0);
        assert_eq!(out(&["star", "x", "p", "--q", "x"]).code, EXIT_USAGE);
    }

    #[test]
    fn numeric_commands() {
        let o = out(&["jackson", "x", "--y", "1", "--q", "1/2"]);
        assert!(o.stdout.starts_with("value = 0.8"), "{o:?}");
        assert_eq!(out(&["invert-check", "--family", "gaussian", "--op", "check"]).code, 0);
        assert_eq!(out(&["qdiff", "x^2", "--x", "2", "--q", "1/2"]).stdout, "2.5\n");
        assert_eq!(out(&["qdiff", "x^3", "--symbolic"]).stdout, "(q^4 + q^2 + 1)*x^2\n");
        assert_eq!(out(&["qdiff", "x*p", "--op", "hat", "--symbolic"]).stdout, "(q^4 - 1) / (q^4 - 2*q^2 + 1)\n");
    }
}
