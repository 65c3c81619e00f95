//! Command-line surface: global flags, one subcommand per engine operation.

use std::io::Read;

use clap::{Parser, Subcommand, ValueEnum};
use psdo_core::hierarchy::{self, Relation};
use psdo_core::jet::Jet;
use psdo_core::psdo::render_monomial;
use psdo_core::series::GroupKind;
use psdo_core::tau::{self, Kernel, Lemma42Mode, ShiftKernel, ShiftSign};
use psdo_core::wave;
use psdo_core::{Alphabet, MultiIndex, Rational, Window};

use crate::eval::{self, parse_index, parse_point, parse_window, Context, Op, Value};
use crate::output::{Format, Item, Report};
use crate::parse::{self, Expr};
use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "psdocalc", version, about = "Exact calculator for pseudodifferential operators in several variables")]
pub struct Cli {
    /// Number of variables.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Window depths `d1,...,dn` (exponents `>= -d_i` are kept); `*` keeps a
    /// component exact, a single value applies to all components.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Truncation degree for series in z, s.
    #[arg(long, global = true, env = "PSDOCALC_DEFAULT_DEG", default_value_t = 4)]
    pub deg: u32,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Declared symbols, in rank order; other identifiers become errors.
    #[arg(long, global = true, value_delimiter = ',')]
    pub symbols: Option<Vec<String>>,
    /// `name=expr` bindings, evaluated in order.
    #[arg(long = "let", global = true)]
    pub lets: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Product,
    Multinomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Constrained,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Z,
    S,
    Sp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Minus,
    Plus,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Product of the arguments, left to right.
    Mul {
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Formal adjoint.
    Adjoint { expr: String },
    /// Coefficient of `d1^-1*...*dn^-1`.
    ResD { expr: String },
    /// Coefficient of `z1^-1*...*zn^-1` of a series in z.
    ResZ { expr: String },
    /// Differential and strictly negative parts.
    Split { expr: String },
    /// Inverse of an operator with invertible leading term.
    Inverse { expr: String },
    /// `L1^a1*...*Ln^an`.
    Power {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long)]
        alpha: String,
    },
    /// `[A, B]`.
    Commutator { a: String, b: String },
    /// `L_i = phi*d_i*phi^-1`.
    Dress { phi: String },
    /// Flow equations read off a generic dressing.
    W4Rules {
        phi: String,
        #[arg(long)]
        alpha: String,
    },
    /// Lax equations of a generic dressing along `t_alpha`.
    LaxCheck {
        phi: String,
        #[arg(long)]
        alpha: String,
    },
    /// Zero-curvature equation for `t_alpha`, `t_beta`.
    ZsCheck {
        phi: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Equations from the zero-curvature condition with free jets.
    ExtractPdes(PdeArgs),
    /// `extract-pdes` followed by substitutions.
    Reduce {
        #[command(flatten)]
        pdes: PdeArgs,
        /// `sym:dir`: every jet of `sym` differentiated along `dir` vanishes.
        #[arg(long)]
        vanish: Vec<String>,
        /// `jet=expr` replacements.
        #[arg(long)]
        set: Vec<String>,
    },
    /// `Res_z (psi e^xi)(eta e^-xi)` against `Res_d psi*eta^adj`.
    PairResidue { psi: String, eta: String },
    /// Residue of the shifted wave function against the adjoint one.
    Bilinear { phi: String },
    /// `tau(t - [X^-1])` or `tau(t + [X^-1])`.
    Miwa {
        #[arg(long)]
        tau: String,
        #[arg(long, value_enum, default_value_t = FamilyArg::Z)]
        var: FamilyArg,
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
    },
    /// Residue identity with one kernel.
    Lemma41 {
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t = KernelArg::Product)]
        kernel: KernelArg,
    },
    /// Residue identity with two kernels.
    Lemma42 {
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Constrained)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = KernelArg::Product)]
        kernel: KernelArg,
    },
    /// Shift kernel against the geometric series.
    KernelDiff,
    /// Annihilation of the shifted tau function by `D_k`.
    DkCheck {
        #[arg(long)]
        tau: String,
        /// One-based.
        #[arg(long)]
        k: usize,
    },
    /// Wave-function symbol from tau at a point.
    TauWhat {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        at: String,
    },
    /// Inverse wave symbol against the shifted adjoint one, one variable.
    R1Check {
        #[arg(long)]
        tau: String,
        #[arg(long)]
        at: String,
    },
}

#[derive(clap::Args, Debug)]
pub struct PdeArgs {
    #[arg(long)]
    pub la: String,
    #[arg(long)]
    pub lb: String,
    #[arg(long)]
    pub ta: String,
    #[arg(long)]
    pub tb: String,
}

/// Evaluation context with the stdin placeholder resolved.
pub struct Session {
    pub ctx: Context,
    pub deg: u32,
    pub format: Format,
    stdin: Option<String>,
}

impl Session {
    pub fn new(cli: &Cli) -> Result<Self, CliError> {
        if cli.n == 0 {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        let mut ctx = Context::new(cli.n);
        if let Some(names) = &cli.symbols {
            ctx.alphabet = Alphabet::from_names(names.iter().map(|s| s.trim()))?;
            ctx.strict = true;
        }
        if let Some(w) = &cli.window {
            ctx.window = Some(parse_window(w, cli.n)?);
        }
        let format = match cli.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        };
        let mut s = Session { ctx, deg: cli.deg, format, stdin: None };
        for b in &cli.lets {
            let (name, body) = b.split_once('=').ok_or_else(|| CliError::Usage(format!("expected name=expr in '{b}'")))?;
            let name = name.trim();
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || name.is_empty() {
                return Err(CliError::Usage(format!("bad binding name '{name}'")));
            }
            let v = s.value(body)?;
            s.ctx.lets.insert(name.to_string(), v);
        }
        Ok(s)
    }

    fn text(&mut self, arg: &str) -> Result<String, CliError> {
        if arg.trim() != "-" {
            return Ok(arg.to_string());
        }
        if self.stdin.is_none() {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            self.stdin = Some(buf.trim().to_string());
        }
        Ok(self.stdin.clone().expect("read above"))
    }

    pub fn value(&mut self, arg: &str) -> Result<Value, CliError> {
        let t = self.text(arg)?;
        self.ctx.eval_str(&t)
    }

    fn op(&mut self, arg: &str) -> Result<Op, CliError> {
        let v = self.value(arg)?;
        self.ctx.as_op(v)
    }

    /// Evaluates without a window; dressings are finite sums.
    fn exact_op(&mut self, arg: &str) -> Result<Op, CliError> {
        let w = self.ctx.window.take();
        let v = self.value(arg);
        self.ctx.window = w;
        self.ctx.as_op(v?)
    }

    fn time(&mut self, arg: &str) -> Result<psdo_core::QTimePoly, CliError> {
        let v = self.value(arg)?;
        self.ctx.as_time(v)
    }

    fn time_var(&mut self, arg: &str) -> Result<MultiIndex, CliError> {
        let t = self.text(arg)?;
        match parse::parse(&t)? {
            Expr::Time(v) => self.ctx.time_index(&v),
            _ => parse_index(&t, self.ctx.n),
        }
    }

    fn z_series(&mut self, arg: &str) -> Result<eval::Series, CliError> {
        let v = self.value(arg)?;
        let s = self.ctx.as_series(v)?;
        eval::restrict_groups(&s, self.ctx.n, &[GroupKind::Z])
    }

    fn window(&self) -> Result<Window, CliError> {
        self.ctx.window.clone().ok_or_else(|| CliError::Usage("this command needs --window".into()))
    }

    fn header(&self, r: &mut Report) {
        r.head("n", self.ctx.n);
        r.head("window", self.ctx.window.as_ref().map_or("exact".to_string(), |w| w.to_string()));
    }
}

/// Runs one command; errors map to exit code 2.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut s = Session::new(cli)?;
    let n = s.ctx.n;
    let name = command_name(&cli.command);
    let mut r = Report::new(name);
    match &cli.command {
        Command::Mul { exprs } => {
            let mut acc: Option<Expr> = None;
            for e in exprs {
                let t = s.text(e)?;
                let p = parse::parse(&t)?;
                s.ctx.declare_from(&p)?;
                acc = Some(match acc {
                    None => p,
                    Some(a) => Expr::Mul(Box::new(a), Box::new(p)),
                });
            }
            let v = s.ctx.eval(&acc.expect("at least one factor"))?;
            s.header(&mut r);
            r.push(Item::value("result", &v));
        }
        Command::Adjoint { expr } => {
            let a = s.op(expr)?;
            s.header(&mut r);
            r.push(Item::op("result", &a.adjoint(s.ctx.window.as_ref())?));
        }
        Command::ResD { expr } => {
            let a = s.op(expr)?;
            s.header(&mut r);
            r.push(Item::poly("result", &a.res_partial()?));
        }
        Command::ResZ { expr } => {
            let h = s.z_series(expr)?;
            r.head("n", n);
            r.push(Item::poly("result", &wave::res_z(&h)?));
        }
        Command::Split { expr } => {
            let a = s.op(expr)?;
            let (p, m) = a.split();
            s.header(&mut r);
            r.push(Item::op("plus", &p));
            r.push(Item::op("minus", &m));
        }
        Command::Inverse { expr } => {
            let a = s.op(expr)?;
            s.header(&mut r);
            r.push(Item::op("result", &a.inverse(s.ctx.window.as_ref())?));
        }
        Command::Power { exprs, alpha } => {
            let ls = exprs.iter().map(|e| s.op(e)).collect::<Result<Vec<_>, _>>()?;
            let alpha = parse_index(alpha, ls.len())?;
            s.header(&mut r);
            r.push(Item::op("result", &Op::power_multi(&ls, &alpha, s.ctx.window.as_ref())?));
        }
        Command::Commutator { a, b } => {
            let (a, b) = (s.op(a)?, s.op(b)?);
            s.header(&mut r);
            r.push(Item::op("result", &a.commutator(&b, s.ctx.window.as_ref())?));
        }
        Command::Dress { phi } => {
            let phi = s.exact_op(phi)?;
            let w = s.window()?;
            let l = hierarchy::dress(&phi, &w)?;
            s.header(&mut r);
            for (i, li) in l.components.iter().enumerate() {
                r.push(Item::op(&format!("L{}", i + 1), li));
            }
        }
        Command::W4Rules { phi, alpha } => {
            let phi = s.exact_op(phi)?;
            let alpha = s.time_var(alpha)?;
            let w = s.window()?;
            let rules = hierarchy::w4_rules(&phi, &alpha, &w)?;
            s.header(&mut r);
            for (sym, dir, v) in rules.rules.iter() {
                let jet = Jet::base(sym.clone()).derived(dir);
                r.push(Item::poly(&jet.to_string(), v));
            }
            for (e, c) in &rules.off_ansatz {
                r.push(Item::poly(&format!("off-ansatz {}", render_monomial(e)), c));
            }
            r.verdict = Some(rules.off_ansatz.is_empty());
        }
        Command::LaxCheck { phi, alpha } => {
            let phi = s.exact_op(phi)?;
            let alpha = s.time_var(alpha)?;
            let w = s.window()?;
            let rep = hierarchy::lax_check(&phi, &alpha, &w)?;
            s.header(&mut r);
            r.push(Item::message("report", rep.to_string()));
            r.verdict = Some(rep.holds);
        }
        Command::ZsCheck { phi, alpha, beta } => {
            let phi = s.exact_op(phi)?;
            let (alpha, beta) = (s.time_var(alpha)?, s.time_var(beta)?);
            let w = s.window()?;
            let depth = alpha.total().max(beta.total()) as i32 + 1;
            let l = hierarchy::dress(&phi, &w.lowered(&MultiIndex::new(std::iter::repeat(depth).take(n))))?;
            let (rules, _) = hierarchy::flow_rules(&phi, &[alpha.clone(), beta.clone()], &w)?;
            let rep = hierarchy::zs_check(&l, &alpha, &beta, &rules, &w)?;
            s.header(&mut r);
            r.push(Item::message("report", rep.to_string()));
            r.verdict = Some(rep.holds);
        }
        Command::ExtractPdes(p) => {
            let sys = pdes(&mut s, p)?;
            r.head("n", n).head("window", "exact");
            push_system(&mut r, &sys);
        }
        Command::Reduce { pdes: p, vanish, set } => {
            let sys = pdes(&mut s, p)?;
            let mut rels = Vec::new();
            for v in vanish {
                let (sym, dir) = v.split_once(':').ok_or_else(|| CliError::Usage(format!("expected sym:dir in '{v}'")))?;
                let probe = parse::parse(&format!("{}_{{{}}}", sym.trim(), dir.trim()))?;
                match s.ctx.eval(&probe)? {
                    Value::Poly(p) => match p.as_variable() {
                        Some(j) => rels.push(Relation::Vanish {
                            symbol: j.symbol().clone(),
                            direction: j.profile()[0].0.clone(),
                        }),
                        None => return Err(CliError::Usage(format!("bad vanishing condition '{v}'"))),
                    },
                    _ => return Err(CliError::Usage(format!("bad vanishing condition '{v}'"))),
                }
            }
            for a in set {
                let (lhs, rhs) = a.split_once('=').ok_or_else(|| CliError::Usage(format!("expected jet=expr in '{a}'")))?;
                let jet = match s.value(lhs)? {
                    Value::Poly(p) => p.as_variable().cloned(),
                    _ => None,
                }
                .ok_or_else(|| CliError::Usage(format!("'{lhs}' is not a jet")))?;
                let val = s.value(rhs)?;
                rels.push(Relation::Replace(jet, s.ctx.as_poly(val)?));
            }
            r.head("n", n).head("window", "exact");
            push_system(&mut r, &hierarchy::reduce_system(&sys, &rels));
        }
        Command::PairResidue { psi, eta } => {
            let (psi, eta) = (s.op(psi)?, s.op(eta)?);
            let rep = wave::pair_residue_check(&psi, &eta)?;
            r.head("n", n);
            r.push(Item::poly("lhs", &rep.lhs));
            r.push(Item::poly("rhs", &rep.rhs));
            r.verdict = Some(rep.equal);
        }
        Command::Bilinear { phi } => {
            let phi = s.exact_op(phi)?;
            let t = s.deg;
            let w = s.ctx.window.clone().unwrap_or_else(|| Window::uniform(n, -(t as i32) - 1));
            let dirs: Vec<MultiIndex> =
                ShiftKernel::new(n, t).indices().iter().filter(|a| a.unit_direction().is_none()).cloned().collect();
            let (rules, _) = hierarchy::flow_rules(&phi, &dirs, &w)?;
            let rep = tau::bilinear_check(&phi, &rules, t)?;
            r.head("n", n).head("window", &w).head("degree", t);
            r.push(Item::series("residue", &rep.residue));
            r.verdict = Some(rep.vanishes);
        }
        Command::Miwa { tau: p, var, sign } => {
            let p = s.time(p)?;
            let kind = match var {
                FamilyArg::Z => GroupKind::Z,
                FamilyArg::S => GroupKind::S,
                FamilyArg::Sp => GroupKind::SPrime,
            };
            let sign = match sign {
                SignArg::Minus => ShiftSign::Minus,
                SignArg::Plus => ShiftSign::Plus,
            };
            r.head("n", n).head("degree", s.deg);
            r.push(Item::series("result", &tau::miwa_shift(&p, n, kind, s.deg, sign)?));
        }
        Command::Lemma41 { eta, kernel } => {
            let eta = s.z_series(eta)?;
            let rep = tau::lemma41_check(&eta, kernel_of(*kernel), s.deg)?;
            r.head("n", n).head("degree", s.deg).head("kernel", format!("{:?}", rep.kernel).to_lowercase());
            r.push(Item::series("lhs", &rep.lhs));
            r.push(Item::series("rhs", &rep.rhs));
            r.verdict = Some(rep.equal);
        }
        Command::Lemma42 { eta, mode, kernel } => {
            let eta = s.z_series(eta)?;
            let mode = match mode {
                ModeArg::Constrained => Lemma42Mode::Constrained,
                ModeArg::Paper => Lemma42Mode::Paper,
            };
            let rep = tau::lemma42_check(&eta, kernel_of(*kernel), s.deg, mode)?;
            r.head("n", n)
                .head("degree", s.deg)
                .head("kernel", format!("{:?}", rep.kernel).to_lowercase())
                .head("mode", format!("{:?}", rep.mode).to_lowercase());
            r.push(Item::series("lhs", &rep.lhs));
            r.push(Item::series("rhs_s", &rep.rhs_s));
            r.push(Item::series("rhs_sp", &rep.rhs_sp));
            if let Some(d) = rep.first_discrepancy_degree() {
                r.push(Item::message("first_discrepancy_degree", d.to_string()));
                r.push(Item::message("discrepancies", rep.to_string()));
            }
            r.verdict = Some(rep.equal());
        }
        Command::KernelDiff => {
            let rep = tau::kernel_vs_geometric::<Rational>(n, s.deg)?;
            r.head("n", n).head("degree", s.deg);
            r.push(Item::message("report", rep.to_string()));
            if let Some(m) = rep.first_mismatch() {
                r.push(Item::message("first_mismatch", tau::render_ratio(&m.monomial)));
            }
            r.verdict = Some(rep.agree());
        }
        Command::DkCheck { tau: p, k } => {
            let p = s.time(p)?;
            if *k == 0 || *k > n {
                return Err(CliError::Usage(format!("k must be in 1..={n}")));
            }
            let rep = tau::dk_annihilation_check(&p, n, k - 1, s.deg)?;
            r.head("n", n).head("degree", s.deg).head("sound_degree", rep.sound_degree);
            match &rep.witness {
                Some((e, c)) => {
                    let groups = [psdo_core::series::Group::exact(GroupKind::Z, n)];
                    let at = psdo_core::series::render_exponent(&groups, e);
                    r.push(Item::poly(&format!("witness {at}"), c));
                }
                None => {
                    r.push(Item::message("report", "annihilated down to the sound degree"));
                }
            }
            r.verdict = Some(rep.holds);
        }
        Command::TauWhat { tau: p, at } => {
            let p = s.time(p)?;
            let at = s.text(at)?;
            let point = parse_point(&s.ctx, &at)?;
            r.head("n", n).head("degree", s.deg);
            r.push(Item::series("result", &tau::wavehat_from_tau(&p, n, &point, s.deg)?));
        }
        Command::R1Check { tau: p, at } => {
            let p = s.time(p)?;
            let at = s.text(at)?;
            let point = parse_point(&s.ctx, &at)?;
            let rep = tau::r1_check_n1(&p, &point, s.deg)?;
            r.head("n", n).head("degree", s.deg);
            r.push(Item::series("lhs", &rep.lhs));
            r.push(Item::series("rhs", &rep.rhs));
            r.verdict = Some(rep.equal);
        }
    }
    Ok(r)
}

fn pdes(s: &mut Session, p: &PdeArgs) -> Result<hierarchy::PdeSystem<Rational>, CliError> {
    let (la, lb) = (s.op(&p.la)?, s.op(&p.lb)?);
    let (ta, tb) = (s.time_var(&p.ta)?, s.time_var(&p.tb)?);
    Ok(hierarchy::extract_pdes(&la, &lb, &ta, &tb)?)
}

fn push_system(r: &mut Report, sys: &hierarchy::PdeSystem<Rational>) {
    for eq in &sys.equations {
        let m = render_monomial(&eq.monomial);
        let m = if m.is_empty() { "1".to_string() } else { m };
        r.push(Item::poly(&m, &eq.equation));
    }
}

fn kernel_of(k: KernelArg) -> Kernel {
    match k {
        KernelArg::Product => Kernel::Product,
        KernelArg::Multinomial => Kernel::Multinomial,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Mul { .. } => "mul",
        Command::Adjoint { .. } => "adjoint",
        Command::ResD { .. } => "res-d",
        Command::ResZ { .. } => "res-z",
        Command::Split { .. } => "split",
        Command::Inverse { .. } => "inverse",
        Command::Power { .. } => "power",
        Command::Commutator { .. } => "commutator",
        Command::Dress { .. } => "dress",
        Command::W4Rules { .. } => "w4-rules",
        Command::LaxCheck { .. } => "lax-check",
        Command::ZsCheck { .. } => "zs-check",
        Command::ExtractPdes(_) => "extract-pdes",
        Command::Reduce { .. } => "reduce",
        Command::PairResidue { .. } => "pair-residue",
        Command::Bilinear { .. } => "bilinear",
        Command::Miwa { .. } => "miwa",
        Command::Lemma41 { .. } => "lemma41",
        Command::Lemma42 { .. } => "lemma42",
        Command::KernelDiff => "kernel-diff",
        Command::DkCheck { .. } => "dk-check",
        Command::TauWhat { .. } => "tau-what",
        Command::R1Check { .. } => "r1-check",
    }
}

/// Parses `args`, runs, renders; returns the output text and exit code.
pub fn main_with<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (e.render().to_string(), code);
        }
    };
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    match run(&cli) {
        Ok(r) => (r.render(format), r.exit_code()),
        Err(e) => (format!("error: {e}\n"), 2),
    }
}
