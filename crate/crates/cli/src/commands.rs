//! Subcommands, problem analysis and exit codes.
//!
//! Exit codes: 0 success, 1 the property fails, 2 unsupported input,
//! 3 nothing found within the bounds, 4 malformed input.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use isomon_core::connection::{
    centralizer, flatten, same_span, CheckMode, ConnectionError, ConnectionSystem, FlattenBounds, FlattenOutcome,
    Mat, ObstructionWitness,
};
use isomon_core::curve::{CurveElement, CurveError, CurveSpec};
use isomon_core::derham::{reduce, telescoper, verify_telescoper, DerhamError, LinearDiffOperator};
use isomon_core::difftower::{Tower, TowerError};
use isomon_core::exactalg::{AlgError, MultiPoly, RationalFunction, Var};
use isomon_core::galois::{
    companion_system, galois_descriptor, horizontal_sections, rebase_derivations, DerivationRebase, GaloisError,
    GaloisVerdict, IntegralSource,
};

use crate::expr::{self, CurveScope, ExprError};
use crate::fixtures::{self, UnknownExample};
use crate::problem::{
    self, convert, eval, eval_matrix, matrix_text, CurveSection, IntegrandSpec, Malformed, MatrixText, MissingSection,
    ProblemFile, SystemSpec,
};
use crate::report::Report;

type Rf = RationalFunction;

#[derive(Parser, Debug)]
#[command(name = "isomon", version, about = "Exact integrability checks, reductions and telescopers")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pairwise,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integrability defects of the system in a problem file.
    Check {
        file: String,
        #[arg(long, value_enum, default_value = "full")]
        mode: Mode,
    },
    /// Gauge transform of the system by a matrix (a JSON list of rows).
    Gauge {
        file: String,
        #[arg(long)]
        matrix: String,
    },
    /// Reduction of a rational integrand to simple poles.
    Reduce {
        #[arg(long)]
        integrand: String,
        #[arg(long, default_value = "x")]
        var: String,
    },
    /// Minimal telescoper with certificate.
    Telescope {
        #[arg(long)]
        integrand: String,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, default_value = "t")]
        param: String,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
    /// Picard-Fuchs operator of x^form dx/z on z^2 = curve.
    PicardFuchs {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 0)]
        form: usize,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, default_value = "t")]
        param: String,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Equivalence moves that make the system fully integrable.
    Flatten {
        file: String,
        #[arg(long, default_value_t = 4)]
        degree_bound: u32,
        /// JSON list of matrices spanning the allowed moves.
        #[arg(long, conflicts_with = "no_commutant")]
        commutant: Option<String>,
        /// Ignore the commutant stored in the problem file.
        #[arg(long)]
        no_commutant: bool,
        /// Comma-separated derivations to process.
        #[arg(long, value_delimiter = ',')]
        order: Vec<String>,
    },
    /// Rational solutions of the telescoper and the resulting verdict.
    Galois {
        #[arg(long, conflicts_with_all = ["curve", "file"])]
        integrand: Option<String>,
        #[arg(long, conflicts_with = "file")]
        curve: Option<String>,
        /// Problem file with an integrand, operator and certificate.
        #[arg(long)]
        file: Option<String>,
        #[arg(long, default_value_t = 0)]
        form: usize,
        #[arg(long, default_value = "x")]
        var: String,
        #[arg(long, default_value = "t")]
        param: String,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
    /// Built-in examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExamplesAction {
    List,
    /// Print the problem file.
    Show { name: String },
    /// Analyze and compare against the stored expectations; `all` runs every example.
    Run { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
    /// Raw text printed instead of the report.
    pub text: Option<String>,
}

impl Outcome {
    fn new(report: Report, code: i32) -> Self {
        Outcome {
            report,
            code,
            text: None,
        }
    }
}

/// Parses `argv` (including the program name), runs, and returns the text to
/// print on stdout, the text for stderr and the exit code.
pub fn run_argv<I, T>(argv: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            return if code == 0 {
                (e.to_string(), String::new(), 0)
            } else {
                (String::new(), e.to_string(), code)
            };
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let out = match o.text {
                Some(t) => t,
                None if cli.json => o.report.to_json() + "\n",
                None => o.report.to_human(),
            };
            (out, String::new(), o.code)
        }
        Err(e) => (String::new(), format!("error: {e:#}\n"), exit_code(&e)),
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Check { file, mode } => {
            let p = ProblemFile::read(file)?;
            let tower = p.field.build()?;
            let spec = p.system_spec()?;
            let s = spec.load(&tower)?;
            let mut r = Report::titled(format!("check {file}"));
            let mode = match mode {
                Mode::Pairwise => CheckMode::Pairwise,
                Mode::Full => CheckMode::Full,
            };
            let holds = check_into(&mut r, &s, spec.dual, mode)?;
            Ok(Outcome::new(r, if holds { 0 } else { 1 }))
        }
        Command::Gauge { file, matrix } => {
            let p = ProblemFile::read(file)?;
            let tower = p.field.build()?;
            let spec = p.system_spec()?;
            let s = spec.load(&tower)?;
            let text = std::fs::read_to_string(matrix).with_context(|| format!("cannot read {matrix}"))?;
            let rows: MatrixText = serde_json::from_str(&text).with_context(|| format!("in {matrix}"))?;
            let g = eval_matrix(&tower, &rows)?;
            let out = s.gauge(&g)?;
            let mut r = Report::titled(format!("gauge {file}"));
            for (name, m) in out.matrices() {
                r.matrix(name, matrix_text(&tower, &convert(m, spec.dual)));
            }
            let before = s.check_integrability(CheckMode::Full)?.holds();
            let after = out.check_integrability(CheckMode::Full)?.holds();
            r.verdict("integrability preserved", before == after, None);
            Ok(Outcome::new(r, 0))
        }
        Command::Reduce { integrand, var } => {
            let (tower, f) = rational_input(integrand, var, &[])?;
            let x = tower.var(var)?;
            let red = reduce(&f, x)?;
            let mut r = Report::titled(format!("reduce {integrand}"));
            r.value("certificate", tower.format(&red.certificate));
            for (pole, res) in red.class.iter() {
                r.value(format!("residue at {var} = {}", tower.format(pole)), tower.format(res));
            }
            let back = &red.certificate.derive(x) + &red.class.representative(x);
            r.verdict("identity", back == f, None);
            Ok(Outcome::new(r, 0))
        }
        Command::Telescope {
            integrand,
            var,
            param,
            max_order,
        } => {
            let (tower, b) = rational_input(integrand, var, &[param])?;
            let mut r = Report::titled(format!("telescope {integrand}"));
            let holds = telescope_into(&mut r, &tower, &b, var, param, *max_order)?;
            Ok(Outcome::new(r, if holds { 0 } else { 1 }))
        }
        Command::PicardFuchs {
            curve,
            form,
            var,
            param,
            max_order,
        } => {
            let tower = Tower::rational(Some(var), &[param.as_str()])?;
            let sec = CurveSection {
                f: curve.clone(),
                var: var.clone(),
                param: param.clone(),
                form: *form,
                max_order: Some(*max_order),
                scale: None,
                certificate: None,
            };
            let mut r = Report::titled(format!("picard-fuchs {curve}"));
            let holds = curve_into(&mut r, &tower, &sec)?;
            Ok(Outcome::new(r, if holds { 0 } else { 1 }))
        }
        Command::Flatten {
            file,
            degree_bound,
            commutant,
            no_commutant,
            order,
        } => {
            let p = ProblemFile::read(file)?;
            let tower = p.field.build()?;
            let spec = p.system_spec()?;
            let s = spec.load(&tower)?;
            let basis = if *no_commutant {
                None
            } else if let Some(path) = commutant {
                let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
                let ms: Vec<MatrixText> = serde_json::from_str(&text).with_context(|| format!("in {path}"))?;
                Some(ms)
            } else {
                p.commutant.clone()
            };
            let basis = load_basis(&tower, basis.as_deref(), spec.dual)?;
            let order = if !order.is_empty() {
                order.clone()
            } else if let Some(f) = &p.flatten {
                f.order.clone()
            } else {
                s.names().into_iter().filter(|n| Some(n.as_str()) != s.principal()).collect()
            };
            let mut r = Report::titled(format!("flatten {file}"));
            let code = flatten_into(&mut r, &s, spec.dual, &order, basis.as_deref(), *degree_bound, "flatten")?;
            Ok(Outcome::new(r, code))
        }
        Command::Galois {
            integrand,
            curve,
            file,
            form,
            var,
            param,
            max_order,
        } => {
            let mut r = Report::titled("galois");
            let holds = if let Some(e) = integrand {
                let (tower, b) = rational_input(e, var, &[param])?;
                let source = IntegralSource::Rational {
                    b: &b,
                    x: tower.var(var)?,
                    t: tower.var(param)?,
                };
                galois_into(&mut r, &tower, source, *max_order)?
            } else if let Some(c) = curve {
                let tower = Tower::rational(Some(var), &[param.as_str()])?;
                let spec = curve_spec(&tower, c, var)?;
                let source = IntegralSource::Curve {
                    curve: &spec,
                    index: *form,
                    t: tower.var(param)?,
                };
                galois_into(&mut r, &tower, source, *max_order)?
            } else if let Some(f) = file {
                let p = ProblemFile::read(f)?;
                let tower = p.field.build()?;
                let spec = p.integrand.as_ref().ok_or(MissingSection("integrand"))?;
                integrand_into(&mut r, &tower, spec)?
            } else {
                bail!(Malformed("galois needs --integrand, --curve or --file".into()));
            };
            Ok(Outcome::new(r, if holds { 0 } else { 1 }))
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                let mut text = String::new();
                for n in fixtures::names() {
                    text.push_str(n);
                    text.push('\n');
                }
                Ok(Outcome {
                    report: Report::default(),
                    code: 0,
                    text: Some(text),
                })
            }
            ExamplesAction::Show { name } => {
                let src = fixtures::source(name).ok_or_else(|| anyhow!(UnknownExample(name.clone())))?;
                Ok(Outcome {
                    report: Report::default(),
                    code: 0,
                    text: Some(src.to_string()),
                })
            }
            ExamplesAction::Run { name } if name == "all" => {
                let mut r = Report::titled("examples");
                let mut code = 0;
                for n in fixtures::names() {
                    let (sub, c) = run_example(n)?;
                    r.verdict(n, c == 0, None);
                    r.sections.push(sub);
                    code = code.max(c);
                }
                Ok(Outcome::new(r, code))
            }
            ExamplesAction::Run { name } => {
                let (r, code) = run_example(name)?;
                Ok(Outcome::new(r, code))
            }
        },
    }
}

/// Analyzes a built-in example and compares it with its expectations.
pub fn run_example(name: &str) -> Result<(Report, i32)> {
    let p = fixtures::load(name)?;
    let tower = p.field.build()?;
    let mut r = analyze(&p, &tower).with_context(|| format!("example {name}"))?;
    r.title = Some(name.to_string());
    let expect = p.expect.clone().unwrap_or_default();
    let bad = expect.mismatches(&tower, &r);
    r.verdict("expectations", bad.is_empty(), (!bad.is_empty()).then(|| bad.join("; ")));
    Ok((r, if bad.is_empty() { 0 } else { 1 }))
}

/// Runs every analysis the sections of `p` call for.
pub fn analyze(p: &ProblemFile, tower: &Tower) -> Result<Report> {
    let mut r = Report::default();
    let dual = p.dual();
    let system = match &p.system {
        Some(spec) => Some(spec.load(tower)?),
        None => None,
    };
    if let Some(s) = &system {
        if s.principal().is_some() {
            check_into(&mut r, s, dual, CheckMode::Pairwise)?;
        }
        check_into(&mut r, s, dual, CheckMode::Full)?;
    }
    if let (Some(gens), Some(comm)) = (&p.centralizer, &p.commutant) {
        let gens = gens.iter().map(|g| eval_matrix(tower, g)).collect::<Result<Vec<_>>>()?;
        let comm = comm.iter().map(|g| eval_matrix(tower, g)).collect::<Result<Vec<_>>>()?;
        let found = centralizer(&gens);
        for (i, m) in found.iter().enumerate() {
            r.matrix(format!("centralizer[{i}]"), matrix_text(tower, m));
        }
        r.verdict("commutant", same_span(&found, &comm), None);
    }
    if let Some(g) = &p.gauge {
        let s = system.as_ref().ok_or(MissingSection("system"))?;
        let from = g.from.load(tower)?;
        let m = eval_matrix(tower, &g.matrix)?;
        r.verdict("gauge", &from.gauge(&m)? == s, None);
    }
    if let Some(f) = &p.flatten {
        let s = system.as_ref().ok_or(MissingSection("system"))?;
        let basis = load_basis(tower, p.commutant.as_deref(), dual)?;
        let degree = f.degree.unwrap_or(FlattenBounds::default().degree);
        flatten_into(&mut r, s, dual, &f.order, basis.as_deref(), degree, "flatten")?;
        if f.unconstrained {
            flatten_into(&mut r, s, dual, &f.order, None, degree, "flatten (unconstrained)")?;
        }
    }
    if let Some(c) = &p.curve {
        curve_into(&mut r, tower, c)?;
    }
    if let Some(i) = &p.integrand {
        integrand_into(&mut r, tower, i)?;
    }
    if let Some(rb) = &p.rebase {
        let s = system.as_ref().ok_or(MissingSection("system"))?;
        let old: Vec<&str> = rb.old.iter().map(String::as_str).collect();
        let new: Vec<&str> = rb.new.iter().map(String::as_str).collect();
        let rebase = DerivationRebase::new(&old, &new, eval_matrix(tower, &rb.matrix)?)?;
        let moved = rebase_derivations(s, &rebase)?;
        let holds = moved.check_integrability(CheckMode::Full)?.holds();
        r.verdict("full (rebased)", holds, Some(format!("on {}", new.join(", "))));
        let mut sets: Vec<Vec<&str>> = new.iter().map(|n| vec![*n]).collect();
        sets.push(new.clone());
        for set in sets {
            let basis = horizontal_sections(&moved, &set, rb.degree)?;
            let label = format!("horizontal({})", set.join(","));
            r.verdict(
                label.clone(),
                !basis.is_empty(),
                Some(format!("{} section(s) of degree at most {}", basis.len(), rb.degree)),
            );
            if !basis.is_empty() {
                r.matrix(label, basis.iter().map(|v| v.iter().map(|e| tower.format(e)).collect()).collect());
            }
        }
    }
    Ok(r)
}

fn check_into(r: &mut Report, s: &ConnectionSystem, dual: bool, mode: CheckMode) -> Result<bool> {
    let rep = s.check_integrability(mode)?;
    let failing: Vec<String> = rep.failing().map(|p| format!("({}, {})", p.first, p.second)).collect();
    let name = match mode {
        CheckMode::Pairwise => "pairwise",
        CheckMode::Full => "full",
    };
    let detail = if failing.is_empty() {
        format!("{} pair(s) integrable", rep.pairs.len())
    } else {
        format!("not integrable: {}", failing.join(", "))
    };
    r.verdict(name, rep.holds(), Some(detail));
    for p in rep.failing() {
        let label = format!("defect({},{})", p.first, p.second);
        if r.find_matrix(&label).is_none() {
            r.matrix(label, matrix_text(s.tower(), &convert(&p.defect, dual)));
        }
    }
    Ok(rep.holds())
}

fn load_basis(tower: &Tower, basis: Option<&[MatrixText]>, dual: bool) -> Result<Option<Vec<Mat>>> {
    basis
        .map(|ms| ms.iter().map(|m| Ok(convert(&eval_matrix(tower, m)?, dual))).collect())
        .transpose()
}

fn flatten_into(
    r: &mut Report,
    s: &ConnectionSystem,
    dual: bool,
    order: &[String],
    basis: Option<&[Mat]>,
    degree: u32,
    label: &str,
) -> Result<i32> {
    let tower = s.tower();
    let order: Vec<&str> = order.iter().map(String::as_str).collect();
    match flatten(s, &order, basis, FlattenBounds { degree })? {
        FlattenOutcome::Found { moves, system } => {
            let ok = system.check_integrability(CheckMode::Full)?.holds();
            r.verdict(label, ok, Some("equivalent integrable system found".into()));
            for (n, m) in moves.entries() {
                if !m.is_zero() {
                    r.matrix(format!("{label} move({n})"), matrix_text(tower, &convert(m, dual)));
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
        FlattenOutcome::ProvenObstruction(w) => {
            match w {
                ObstructionWitness::OutsideSpan { pair, defect } => {
                    r.verdict(
                        label,
                        false,
                        Some(format!("defect of ({}, {}) leaves the allowed span", pair.0, pair.1)),
                    );
                    r.matrix(format!("witness defect({},{})", pair.0, pair.1), matrix_text(tower, &convert(&defect, dual)));
                }
                ObstructionWitness::Residue {
                    pair,
                    index,
                    coordinate,
                    witness,
                } => {
                    r.verdict(
                        label,
                        false,
                        Some(format!(
                            "coordinate {index} of the defect of ({}, {}) is not an exact 2-form",
                            pair.0, pair.1
                        )),
                    );
                    r.value("witness.coordinate", tower.format(&coordinate));
                    r.value("witness.pole", tower.format(&witness.pole));
                    r.value("witness.residue", tower.format(&witness.residue));
                    let class: Vec<String> = witness
                        .residue_class
                        .iter()
                        .map(|(p, c)| format!("{} at {}", tower.format(c), tower.format(p)))
                        .collect();
                    r.value("witness.residue class", class.join(", "));
                }
            }
            Ok(1)
        }
        FlattenOutcome::NotFoundWithinBounds { degree, derivation } => {
            r.verdict(
                label,
                false,
                Some(format!("no move along {derivation} with numerators of degree at most {degree}")),
            );
            Ok(3)
        }
    }
}

/// Tower `ℚ(var, params…)` with every other identifier of `src` as a parameter.
fn rational_input(src: &str, var: &str, params: &[&String]) -> Result<(Tower, Rf)> {
    let e = expr::parse(src)?;
    let mut names: Vec<String> = params.iter().map(|p| p.to_string()).collect();
    for id in e.identifiers() {
        if id != var && !names.contains(&id) {
            names.push(id);
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let tower = Tower::rational(Some(var), &refs)?;
    let f = e.eval(&mut expr::TowerScope { tower: &tower })?;
    Ok((tower, f))
}

fn dense_strings(tower: &Tower, p: &[Rf]) -> Vec<String> {
    p.iter().map(|c| tower.format(c)).collect()
}

/// `Σ p_i D^i` printed from the highest order down.
fn dense_text(tower: &Tower, p: &[Rf], t: Var) -> String {
    let d = format!("D{}", tower.name(t));
    let mut parts = Vec::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let op = match i {
            0 => String::new(),
            1 => d.clone(),
            _ => format!("{d}^{i}"),
        };
        let coeff = tower.format(c);
        parts.push(match (op.is_empty(), c.is_one()) {
            (true, _) => coeff,
            (false, true) => op,
            (false, false) => format!("({coeff})*{op}"),
        });
    }
    let mut out = String::new();
    for (k, part) in parts.iter().enumerate() {
        match (k, part.strip_prefix('-')) {
            (0, _) => out.push_str(part),
            (_, Some(rest)) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            (_, None) => {
                out.push_str(" + ");
                out.push_str(part);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn report_operator(r: &mut Report, name: &str, tower: &Tower, op: &LinearDiffOperator) {
    r.operator(name, op.display(&tower.names()), dense_strings(tower, &op.dense()));
}

fn telescope_into(r: &mut Report, tower: &Tower, b: &Rf, var: &str, param: &str, max_order: usize) -> Result<bool> {
    let (x, t) = (tower.var(var)?, tower.var(param)?);
    let res = telescoper(b, x, t, max_order)?;
    report_operator(r, "telescoper", tower, &res.operator);
    r.value("certificate", tower.format(&res.certificate));
    let ok = verify_telescoper(b, x, &res);
    r.verdict("certificate", ok, None);
    let n = res.operator.order();
    if n > 0 {
        let minimal = match telescoper(b, x, t, n - 1) {
            Err(DerhamError::NotFound { .. }) => true,
            Ok(_) => false,
            Err(e) => return Err(e.into()),
        };
        r.verdict("minimal", minimal, Some(format!("no operator of order {}", n - 1)));
    }
    Ok(ok)
}

fn curve_spec(tower: &Tower, f: &str, var: &str) -> Result<CurveSpec> {
    Ok(CurveSpec::new(polynomial(tower, f)?, tower.var(var)?)?)
}

fn curve_text(tower: &Tower, e: &CurveElement) -> String {
    match (e.even.is_zero(), e.odd.is_zero()) {
        (true, true) => "0".into(),
        (false, true) => tower.format(&e.even),
        (true, false) => format!("({})*z", tower.format(&e.odd)),
        (false, false) => format!("{} + ({})*z", tower.format(&e.even), tower.format(&e.odd)),
    }
}

fn curve_into(r: &mut Report, tower: &Tower, c: &CurveSection) -> Result<bool> {
    let curve = curve_spec(tower, &c.f, &c.var)?;
    let (x, t) = (tower.var(&c.var)?, tower.var(&c.param)?);
    let w = {
        let len = curve.basis_len();
        if c.form >= len {
            bail!(CurveError::BasisIndex { index: c.form, len });
        }
        curve.basis_form(c.form)
    };
    let pf = curve.picard_fuchs(c.form, t, c.max_order.unwrap_or(4))?;
    report_operator(r, "picard-fuchs", tower, &pf.operator);
    r.value("certificate", curve_text(tower, &pf.certificate));
    let ok = curve.verify_picard_fuchs(&w, &pf);
    r.verdict("certificate", ok, None);
    let n = pf.operator.order();
    if n > 0 {
        let minimal = match curve.picard_fuchs(c.form, t, n - 1) {
            Err(CurveError::NotFound { .. }) => true,
            Ok(_) => false,
            Err(e) => return Err(e.into()),
        };
        r.verdict("minimal", minimal, Some(format!("no operator of order {}", n - 1)));
    }
    let mut dense = pf.operator.dense();
    if let Some(s) = &c.scale {
        let k = eval(tower, s)?;
        dense = dense.iter().map(|p| p * &k).collect();
        r.operator("picard-fuchs (scaled)", dense_text(tower, &dense, t), dense_strings(tower, &dense));
    }
    if let Some(a) = &c.certificate {
        let a = expr::parse(a)?.eval(&mut CurveScope { curve: &curve, tower })?;
        let lhs = curve.apply_dense(&dense, &w, t);
        let holds = lhs == curve.derive(&a, x);
        r.verdict(
            if c.scale.is_some() {
                "certificate (scaled)"
            } else {
                "certificate (given)"
            },
            holds,
            Some(format!("a = {}", curve_text(tower, &a))),
        );
    }
    Ok(ok)
}

/// Rational integrand: telescoper and descriptor. Tower integrand with a
/// given identity: the identity, the companion system and the descriptor.
fn integrand_into(r: &mut Report, tower: &Tower, i: &IntegrandSpec) -> Result<bool> {
    let b = eval(tower, &i.expr)?;
    let max_order = i.max_order.unwrap_or(8);
    let (Some(op), Some(a)) = (&i.operator, &i.certificate) else {
        telescope_into(r, tower, &b, &i.var, &i.param, max_order)?;
        let source = IntegralSource::Rational {
            b: &b,
            x: tower.var(&i.var)?,
            t: tower.var(&i.param)?,
        };
        return galois_into(r, tower, source, max_order);
    };
    let coeffs = op.iter().map(|c| eval(tower, c)).collect::<Result<Vec<_>>>()?;
    let op = LinearDiffOperator::new(tower.var(&i.param)?, coeffs);
    let a = eval(tower, a)?;
    let dt = tower.derivation(&i.param)?;
    let identity = op.apply(&b, |e| tower.derive(e, &dt)) == tower.derive_by(&a, &i.var)?;
    r.verdict("identity", identity, Some("D(b) = d/dx(a)".into()));
    let comp = companion_system(tower, &i.var, &i.param, &op, &b, &a)?;
    let flat = comp.check_integrability(CheckMode::Full)?.holds();
    r.verdict("companion integrable", flat, None);
    if !identity {
        return Ok(false);
    }
    let source = IntegralSource::Tower {
        tower,
        x: &i.var,
        b: &b,
        a: &a,
        operator: op,
        t: &i.param,
    };
    galois_into(r, tower, source, max_order)
}

fn galois_into(r: &mut Report, tower: &Tower, source: IntegralSource<'_>, max_order: usize) -> Result<bool> {
    let d = galois_descriptor(source, max_order)?;
    report_operator(r, "operator", tower, &d.operator);
    r.value("rational solutions", d.solutions.len().to_string());
    for (k, s) in d.solutions.iter().enumerate() {
        r.value(format!("solution[{k}]"), tower.format(s));
    }
    let constant = d.verdict == GaloisVerdict::Constant;
    let detail = if constant {
        "full rational solution space; conjugate to constants"
    } else {
        "solution space over the parameter field is smaller than the order; not constant over it"
    };
    r.verdict("constant group", constant, Some(detail.into()));
    Ok(constant)
}

/// Exit code for an error.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if let Some(c) = classify(cause) {
            return c;
        }
    }
    4
}

fn classify(e: &(dyn std::error::Error + 'static)) -> Option<i32> {
    if let Some(e) = e.downcast_ref::<GaloisError>() {
        return Some(galois_code(e));
    }
    if let Some(e) = e.downcast_ref::<CurveError>() {
        return Some(curve_code(e));
    }
    if let Some(e) = e.downcast_ref::<DerhamError>() {
        return Some(derham_code(e));
    }
    if let Some(e) = e.downcast_ref::<ConnectionError>() {
        return Some(connection_code(e));
    }
    if let Some(e) = e.downcast_ref::<AlgError>() {
        return Some(alg_code(e));
    }
    if e.is::<TowerError>()
        || e.is::<ExprError>()
        || e.is::<serde_json::Error>()
        || e.is::<std::io::Error>()
        || e.is::<MissingSection>()
        || e.is::<Malformed>()
        || e.is::<UnknownExample>()
    {
        return Some(4);
    }
    None
}

fn alg_code(e: &AlgError) -> i32 {
    match e {
        AlgError::NonLinearFactor => 2,
        _ => 4,
    }
}

fn derham_code(e: &DerhamError) -> i32 {
    match e {
        DerhamError::NonLinearFactor | DerhamError::Unsupported(_) => 2,
        DerhamError::NotFound { .. } => 3,
        DerhamError::VerificationFailed => 1,
        DerhamError::Alg(a) => alg_code(a),
    }
}

fn curve_code(e: &CurveError) -> i32 {
    match e {
        CurveError::Degree(_) | CurveError::NotSquarefree | CurveError::UnsupportedPoles => 2,
        CurveError::BasisIndex { .. } => 4,
        CurveError::NotFound { .. } => 3,
        CurveError::VerificationFailed => 1,
        CurveError::Derham(d) => derham_code(d),
        CurveError::Alg(a) => alg_code(a),
    }
}

fn connection_code(e: &ConnectionError) -> i32 {
    match e {
        ConnectionError::Precondition(_) => 1,
        ConnectionError::UnsupportedField(_) => 2,
        _ => 4,
    }
}

fn galois_code(e: &GaloisError) -> i32 {
    match e {
        GaloisError::Unsupported(_) => 2,
        GaloisError::IdentityFails => 1,
        GaloisError::SingularRebase | GaloisError::RebaseShape { .. } => 4,
        GaloisError::Derham(d) => derham_code(d),
        GaloisError::Curve(c) => curve_code(c),
        GaloisError::Connection(c) => connection_code(c),
        GaloisError::Tower(_) => 4,
        GaloisError::Alg(a) => alg_code(a),
    }
}

/// Loads a problem's system and returns it in file convention; used to check
/// that fixtures survive loading and storing.
pub fn reload(p: &ProblemFile, tower: &Tower) -> Result<Option<SystemSpec>> {
    let Some(spec) = &p.system else { return Ok(None) };
    let s = spec.load(tower)?;
    Ok(Some(SystemSpec::store(&s, spec.dual)))
}

/// Multi-poly view of a polynomial expression.
pub fn polynomial(tower: &Tower, text: &str) -> Result<MultiPoly> {
    let e = problem::eval(tower, text)?;
    if !e.is_polynomial() {
        bail!(ExprError::NotPolynomial(text.to_string()));
    }
    Ok(e.into_parts().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        let e: anyhow::Error = GaloisError::Derham(DerhamError::NotFound { max_order: 2 }).into();
        assert_eq!(exit_code(&e), 3);
        let e: anyhow::Error = anyhow::Error::from(CurveError::NotSquarefree).context("curve");
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = ConnectionError::Precondition("x".into()).into();
        assert_eq!(exit_code(&e), 1);
        let e: anyhow::Error = expr::parse("x+").unwrap_err().into();
        assert_eq!(exit_code(&e), 4);
        assert_eq!(exit_code(&anyhow!("other")), 4);
    }

    #[test]
    fn dense_text_prints_highest_first() {
        let tw = Tower::rational(Some("x"), &["t"]).unwrap();
        let t = tw.var("t").unwrap();
        let p = vec![Rf::from_int(-1), Rf::zero(), Rf::one()];
        assert_eq!(dense_text(&tw, &p, t), "Dt^2 - 1");
    }
}
