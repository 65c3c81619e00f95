//! Evaluation of parsed expressions into engine values.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use psdo_core::jet::{jet_poly, DiffPoly};
use psdo_core::series::{Group, GroupKind};
use psdo_core::time_poly::{time_var, TimePoly};
use psdo_core::{Alphabet, Jet, LaurentSeries, MultiIndex, Poly, PsdOp, Rational, Window};

use crate::parse::{self, Dir, Expr, Family};
use crate::CliError;

pub type Op = PsdOp<Rational>;
pub type Series = LaurentSeries<Rational, DiffPoly<Rational>>;
pub type TimeSeries = LaurentSeries<Rational, TimePoly<Rational>>;

pub const FAMILIES: [GroupKind; 3] = [GroupKind::Z, GroupKind::S, GroupKind::SPrime];

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Poly(DiffPoly<Rational>),
    Time(TimePoly<Rational>),
    Op(Op),
    /// A series in `z`, `s` and `s′`, all groups present.
    Series(Series),
    /// The same with time-polynomial coefficients.
    TimeSeries(TimeSeries),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Poly(_) => "coefficient",
            Value::Time(_) => "time polynomial",
            Value::Op(_) => "operator",
            Value::Series(_) => "series",
            Value::TimeSeries(_) => "time series",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Poly(p) => write!(f, "{p}"),
            Value::Time(p) => write!(f, "{p}"),
            Value::Op(o) => write!(f, "{o}"),
            Value::Series(s) => write!(f, "{s}"),
            Value::TimeSeries(s) => write!(f, "{s}"),
        }
    }
}

pub struct Context {
    pub n: usize,
    pub alphabet: Alphabet,
    /// Requested window for operator products.
    pub window: Option<Window>,
    pub lets: BTreeMap<String, Value>,
    /// Reject identifiers that were not declared up front.
    pub strict: bool,
}

impl Context {
    pub fn new(n: usize) -> Self {
        Context { n, alphabet: Alphabet::new(), window: None, lets: BTreeMap::new(), strict: false }
    }

    /// Parses and evaluates `text`.
    pub fn eval_str(&mut self, text: &str) -> Result<Value, CliError> {
        let e = parse::parse(text)?;
        self.declare_from(&e)?;
        self.eval(&e)
    }

    /// Declares the identifiers of `e` in sorted order, skipping bound names.
    pub fn declare_from(&mut self, e: &Expr) -> Result<(), CliError> {
        let mut names = Vec::new();
        parse::symbols(e, &mut names);
        names.sort();
        for name in names {
            if self.lets.contains_key(&name) || self.alphabet.get(&name).is_some() {
                continue;
            }
            if self.strict {
                return Err(CliError::Usage(format!("undeclared symbol '{name}'")));
            }
            self.alphabet.intern(&name);
        }
        Ok(())
    }

    fn symbol(&self, name: &str) -> Result<psdo_core::Symbol, CliError> {
        self.alphabet.get(name).ok_or_else(|| CliError::Usage(format!("undeclared symbol '{name}'")))
    }

    fn dir(&self, d: &Dir) -> Result<MultiIndex, CliError> {
        let n = self.n;
        match d {
            Dir::X if n <= 2 => Ok(MultiIndex::unit(n, 0)),
            Dir::Y if n == 2 => Ok(MultiIndex::unit(n, 1)),
            Dir::T(v) => self.time_index(v),
            _ => Err(CliError::Usage(format!("direction {d:?} needs t[..] notation for n = {n}"))),
        }
    }

    pub fn time_index(&self, v: &[i32]) -> Result<MultiIndex, CliError> {
        if v.len() != self.n {
            return Err(CliError::Usage(format!("t[..] needs {} components", self.n)));
        }
        let m = MultiIndex::from(v);
        if !m.in_zplus() {
            return Err(CliError::Usage(format!("{m} is not a time index")));
        }
        Ok(m)
    }

    fn check_index(&self, i: usize) -> Result<(), CliError> {
        if i >= self.n {
            return Err(CliError::Usage(format!("index {} exceeds n = {}", i + 1, self.n)));
        }
        Ok(())
    }

    pub fn empty_series(&self) -> Series {
        LaurentSeries::zero(FAMILIES.iter().map(|k| Group::exact(*k, self.n)).collect())
    }

    fn series_of(&self, p: DiffPoly<Rational>) -> Series {
        LaurentSeries::one(FAMILIES.iter().map(|k| Group::exact(*k, self.n)).collect()).mul_coeff(&p)
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, CliError> {
        self.eval_at(e, self.window.as_ref())
    }

    /// Evaluates with operator products made exact on `target` where the
    /// inputs allow it. Factors are evaluated at the session window.
    fn eval_at(&self, e: &Expr, target: Option<&Window>) -> Result<Value, CliError> {
        Ok(match e {
            Expr::Int(v) => Value::Poly(Poly::constant(Rational::from_integer(v.clone()))),
            Expr::Ratio(a, b) => Value::Poly(Poly::constant(Rational::new(a.clone(), b.clone()))),
            Expr::D(i) => {
                self.check_index(*i)?;
                Value::Op(Op::d(self.n, *i))
            }
            Expr::Var(fam, i) => {
                self.check_index(*i)?;
                let slot = match fam {
                    Family::Z => 0,
                    Family::S => 1,
                    Family::SPrime => 2,
                };
                let e = MultiIndex::unit(3 * self.n, slot * self.n + i);
                Value::Series(self.empty_series().add(&self.series_of(Poly::one()).mul_monomial(&e, &Poly::one()))?)
            }
            Expr::Symbol(name) => match self.lets.get(name) {
                Some(v) => v.clone(),
                None => Value::Poly(jet_poly(Jet::base(self.symbol(name)?))),
            },
            Expr::Jet(name, dirs) => {
                let mut j = Jet::base(self.symbol(name)?);
                for d in dirs {
                    j = j.derived(&self.dir(d)?);
                }
                Value::Poly(jet_poly(j))
            }
            Expr::Time(v) => Value::Time(time_var(self.time_index(v)?)?),
            Expr::Add(a, b) => self.add(self.eval_at(a, target)?, self.eval_at(b, target)?)?,
            Expr::Sub(a, b) => self.add(self.eval_at(a, target)?, negate(self.eval_at(b, target)?))?,
            Expr::Neg(a) => negate(self.eval_at(a, target)?),
            Expr::Mul(..) | Expr::Pow(_, 1..) => {
                let mut factors = Vec::new();
                flatten(e, 1, &mut factors);
                let mut values = Vec::new();
                for (f, k) in factors {
                    let v = self.eval(f)?;
                    values.extend(std::iter::repeat(v).take(k));
                }
                self.product(values, target)?
            }
            Expr::Pow(a, k) => self.pow(self.eval(a)?, *k, target)?,
            Expr::PlusPart(a) => {
                // Only exponents with last component >= 0 survive.
                let keep = Window::single(self.n, self.n - 1, 0);
                let t = target.map_or(keep.clone(), |t| t.meet(&keep));
                Value::Op(self.as_op(self.eval_at(a, Some(&t))?)?.plus())
            }
            Expr::MinusPart(a) => Value::Op(self.as_op(self.eval_at(a, target)?)?.minus()),
        })
    }

    fn product(&self, values: Vec<Value>, target: Option<&Window>) -> Result<Value, CliError> {
        let operators = values.iter().any(|v| matches!(v, Value::Op(_)))
            && values.iter().all(|v| matches!(v, Value::Op(_) | Value::Poly(_)));
        if operators {
            let ops = values.into_iter().map(|v| self.as_op(v)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Op> = ops.iter().collect();
            return Ok(Value::Op(Op::product(&refs, self.n, target)?));
        }
        let mut it = values.into_iter();
        let mut acc = it.next().expect("nonempty product");
        for v in it {
            acc = self.mul(acc, v, target)?;
        }
        Ok(acc)
    }

    pub fn as_op(&self, v: Value) -> Result<Op, CliError> {
        match v {
            Value::Op(o) => Ok(o),
            Value::Poly(p) => Ok(Op::coefficient(self.n, p)),
            other => Err(CliError::Usage(format!("expected an operator, got a {}", other.kind()))),
        }
    }

    pub fn as_series(&self, v: Value) -> Result<Series, CliError> {
        match v {
            Value::Series(s) => Ok(s),
            Value::Poly(p) => Ok(self.series_of(p)),
            other => Err(CliError::Usage(format!("expected a series, got a {}", other.kind()))),
        }
    }

    pub fn as_time(&self, v: Value) -> Result<TimePoly<Rational>, CliError> {
        match v {
            Value::Time(t) => Ok(t),
            Value::Poly(p) => match p.as_constant() {
                Some(c) => Ok(Poly::constant(c)),
                None => Err(CliError::Usage("time polynomials cannot contain symbols".into())),
            },
            other => Err(CliError::Usage(format!("expected a time polynomial, got a {}", other.kind()))),
        }
    }

    pub fn as_time_series(&self, v: Value) -> Result<TimeSeries, CliError> {
        let groups = FAMILIES.iter().map(|k| Group::exact(*k, self.n)).collect();
        match v {
            Value::TimeSeries(s) => Ok(s),
            Value::Time(t) => Ok(LaurentSeries::one(groups).mul_coeff(&t)),
            Value::Poly(_) | Value::Series(_) => {
                let s = self.as_series(v)?;
                Ok(s.map_coeffs(|c| {
                    c.as_constant()
                        .map(Poly::constant)
                        .ok_or_else(|| psdo_core::Error::Invalid("time series cannot contain symbols".into()))
                })?)
            }
            other => Err(CliError::Usage(format!("expected a time series, got a {}", other.kind()))),
        }
    }

    pub fn as_poly(&self, v: Value) -> Result<DiffPoly<Rational>, CliError> {
        match v {
            Value::Poly(p) => Ok(p),
            other => Err(CliError::Usage(format!("expected a coefficient, got a {}", other.kind()))),
        }
    }

    fn add(&self, a: Value, b: Value) -> Result<Value, CliError> {
        if timed_series(&a, &b) {
            return Ok(Value::TimeSeries(self.as_time_series(a)?.add(&self.as_time_series(b)?)?));
        }
        Ok(match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.add(&y)),
            (Value::Time(x), y) => Value::Time(x.add(&self.as_time(y)?)),
            (x, Value::Time(y)) => Value::Time(self.as_time(x)?.add(&y)),
            (x @ Value::Series(_), y) | (y, x @ Value::Series(_)) => {
                Value::Series(self.as_series(x)?.add(&self.as_series(y)?)?)
            }
            (x, y) => Value::Op(self.as_op(x)?.add(&self.as_op(y)?)?),
        })
    }

    fn mul(&self, a: Value, b: Value, target: Option<&Window>) -> Result<Value, CliError> {
        if timed_series(&a, &b) {
            return Ok(Value::TimeSeries(self.as_time_series(a)?.mul(&self.as_time_series(b)?)?));
        }
        Ok(match (a, b) {
            (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.mul(&y)),
            (Value::Time(x), y) => Value::Time(x.mul(&self.as_time(y)?)),
            (x, Value::Time(y)) => Value::Time(self.as_time(x)?.mul(&y)),
            (Value::Series(x), y) => Value::Series(x.mul(&self.as_series(y)?)?),
            (x, Value::Series(y)) => Value::Series(self.as_series(x)?.mul(&y)?),
            (x, y) => Value::Op(self.as_op(x)?.mul(&self.as_op(y)?, target)?),
        })
    }

    fn pow(&self, a: Value, k: i64, target: Option<&Window>) -> Result<Value, CliError> {
        let k32 = u32::try_from(k.unsigned_abs()).map_err(|_| CliError::Usage("exponent too large".into()))?;
        Ok(match a {
            Value::Poly(p) if k >= 0 => Value::Poly(p.pow(k32)),
            Value::Poly(p) => match p.as_constant() {
                Some(c) if !num_traits::Zero::is_zero(&c) => Value::Poly(Poly::constant(c.recip().pow(k32 as i32))),
                _ => Value::Op(self.op_pow(Op::coefficient(self.n, p), k, target)?),
            },
            Value::Time(t) if k >= 0 => Value::Time(t.pow(k32)),
            Value::Series(s) if k >= 0 => Value::Series(s.pow(k32)?),
            Value::Series(s) => {
                let mut terms = s.terms();
                match (terms.next(), terms.next()) {
                    (Some((e, c)), None) if c.as_constant().is_some() => {
                        let c = c.as_constant().expect("checked").recip();
                        let e = -&MultiIndex::new(e.iter().map(|x| x * k32 as i32));
                        let c = Poly::constant(c.pow(k32 as i32));
                        Value::Series(self.empty_series().add(&self.series_of(Poly::one()).mul_monomial(&e, &c))?)
                    }
                    _ => return Err(CliError::Usage("only monomial series have negative powers".into())),
                }
            }
            Value::TimeSeries(s) if k >= 0 => Value::TimeSeries(s.pow(k32)?),
            Value::TimeSeries(_) => return Err(CliError::Usage("negative power of a time series".into())),
            Value::Op(o) => Value::Op(self.op_pow(o, k, target)?),
            Value::Time(_) => return Err(CliError::Usage("negative power of a time polynomial".into())),
        })
    }

    fn op_pow(&self, o: Op, k: i64, target: Option<&Window>) -> Result<Op, CliError> {
        // Monomials with constant coefficients invert exactly.
        let base = if k < 0 {
            let single = o.num_terms() == 1 && o.terms().all(|(_, c)| c.as_constant().is_some());
            if single {
                let (e, c) = o.terms().next().map(|(e, c)| (e.clone(), c.clone())).expect("one term");
                let inv = c.as_constant().expect("constant").recip();
                Op::monomial(-&e, Poly::constant(inv))
            } else {
                o.inverse(target)?
            }
        } else {
            o
        };
        let factors: Vec<&Op> = std::iter::repeat(&base).take(k.unsigned_abs() as usize).collect();
        Ok(Op::product(&factors, self.n, target)?)
    }
}

/// Factors of a product with multiplicities; nonnegative powers repeat.
fn flatten<'a>(e: &'a Expr, times: usize, out: &mut Vec<(&'a Expr, usize)>) {
    match e {
        Expr::Mul(a, b) => {
            for _ in 0..times {
                flatten(a, 1, out);
                flatten(b, 1, out);
            }
        }
        Expr::Pow(a, k) if *k > 0 => flatten(a, times * *k as usize, out),
        other => out.push((other, times)),
    }
}

fn timed_series(a: &Value, b: &Value) -> bool {
    let timed = |v: &Value| matches!(v, Value::Time(_) | Value::TimeSeries(_));
    let series = |v: &Value| matches!(v, Value::Series(_) | Value::TimeSeries(_));
    (timed(a) || timed(b)) && (series(a) || series(b))
}

fn negate(v: Value) -> Value {
    match v {
        Value::Poly(p) => Value::Poly(p.neg()),
        Value::Time(t) => Value::Time(t.neg()),
        Value::Op(o) => Value::Op(o.neg()),
        Value::Series(s) => Value::Series(s.neg()),
        Value::TimeSeries(s) => Value::TimeSeries(s.neg()),
    }
}

/// Keeps only the groups `kinds` of a three-group series; other groups must
/// not occur.
pub fn restrict_groups(s: &Series, n: usize, kinds: &[GroupKind]) -> Result<Series, CliError> {
    let slots: Vec<usize> = kinds.iter().map(|k| FAMILIES.iter().position(|f| f == k).expect("known family")).collect();
    let mut terms = Vec::new();
    for (e, c) in s.terms() {
        for (slot, _) in FAMILIES.iter().enumerate() {
            if !slots.contains(&slot) && !e.slice(slot * n, n).is_zero() {
                return Err(CliError::Usage(format!(
                    "unexpected {} variables in this series",
                    FAMILIES[slot].prefix()
                )));
            }
        }
        let v: Vec<i32> = slots.iter().flat_map(|&k| e.slice(k * n, n).iter().collect::<Vec<_>>()).collect();
        terms.push((MultiIndex::new(v), c.clone()));
    }
    Ok(LaurentSeries::from_terms(kinds.iter().map(|k| Group::exact(*k, n)).collect(), terms))
}

/// `t[1,1]=3, t[2,1]=-1/2`.
pub fn parse_point(ctx: &Context, text: &str) -> Result<Vec<(MultiIndex, Rational)>, CliError> {
    let mut out = Vec::new();
    for part in text.split(';').flat_map(|p| split_top_level(p)) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lhs, rhs) = part.split_once('=').ok_or_else(|| CliError::Usage(format!("expected t[..]=value in '{part}'")))?;
        let var = match parse::parse(lhs.trim())? {
            Expr::Time(v) => ctx.time_index(&v)?,
            _ => return Err(CliError::Usage(format!("'{lhs}' is not a time variable"))),
        };
        let val = parse_rational(rhs.trim())?;
        out.push((var, val));
    }
    Ok(out)
}

/// Splits at commas outside brackets.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out
}

pub fn parse_rational(text: &str) -> Result<Rational, CliError> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(r) => (true, r.trim()),
        None => (false, text),
    };
    let v = match body.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| CliError::Usage(format!("bad number '{text}'")))?;
            let b: BigInt = b.trim().parse().map_err(|_| CliError::Usage(format!("bad number '{text}'")))?;
            if b == BigInt::from(0) {
                return Err(CliError::Usage("zero denominator".into()));
            }
            Rational::new(a, b)
        }
        None => Rational::from_integer(body.parse().map_err(|_| CliError::Usage(format!("bad number '{text}'")))?),
    };
    Ok(if neg { -v } else { v })
}

/// Depths `1,2` or `2,*` as a window keeping exponents `≥ −depth`; `*` leaves
/// a component exact and a single depth applies to every component.
pub fn parse_window(text: &str, n: usize) -> Result<Window, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let parts = if parts.len() == 1 && n > 1 { vec![parts[0]; n] } else { parts };
    if parts.len() != n {
        return Err(CliError::Usage(format!("window needs {n} components")));
    }
    let mut out = Vec::new();
    for p in parts {
        out.push(if p == "*" {
            None
        } else {
            let d = p.parse::<i32>().map_err(|_| CliError::Usage(format!("bad window depth '{p}'")))?;
            if d < 0 {
                return Err(CliError::Usage(format!("window depth {d} is negative")));
            }
            Some(-d)
        });
    }
    Ok(Window::new(out))
}

/// `1,2` as a multi-index.
pub fn parse_index(text: &str, n: usize) -> Result<MultiIndex, CliError> {
    let t = text.trim().trim_start_matches("t[").trim_start_matches('(').trim_end_matches(']').trim_end_matches(')');
    let v: Result<Vec<i32>, _> = t.split(',').map(|p| p.trim().parse::<i32>()).collect();
    let v = v.map_err(|_| CliError::Usage(format!("bad multi-index '{text}'")))?;
    if v.len() != n {
        return Err(CliError::Usage(format!("multi-index '{text}' needs {n} components")));
    }
    Ok(MultiIndex::new(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators() {
        let mut c = Context::new(2);
        assert_eq!(c.eval_str("d2*d2^-1").unwrap().to_string(), "1");
        assert_eq!(c.eval_str("d2^0").unwrap().to_string(), "1");
        assert_eq!(c.eval_str("d1*a").unwrap().to_string(), "a*d1 + a_{x}");
        c.window = Some(Window::new([None, Some(-3)]));
        let v = c.eval_str("d2^-1*c").unwrap();
        assert_eq!(v.to_string(), "c*d2^-1 - c_{y}*d2^-2 + c_{yy}*d2^-3");
    }

    #[test]
    fn lets_and_projections() {
        let mut c = Context::new(2);
        c.window = Some(Window::new([None, Some(-2)]));
        let l1 = c.eval_str("d2 + a*d1*d2^-1 + b*d2^-2").unwrap();
        let l2 = c.eval_str("d2 + c*d2^-1 + d*d1*d2^-2").unwrap();
        c.lets.insert("l1".into(), l1);
        c.lets.insert("l2".into(), l2);
        assert_eq!(c.eval_str("(l1*l2)+").unwrap().to_string(), "d2^2 + a*d1 + c");
    }

    #[test]
    fn series_and_times() {
        let mut c = Context::new(1);
        let v = c.eval_str("1 - 1/3*z1^-1").unwrap();
        assert_eq!(v.to_string(), "1 - 1/3*z1^-1");
        let t = c.eval_str("t[1]^2 + 3*t[2]").unwrap();
        assert_eq!(t.to_string(), "t[1]^2 + 3*t[2]");
        assert!(c.eval_str("a*t[1]").is_err());
        assert!(c.eval_str("d1*z1").is_err());
    }

    #[test]
    fn helpers() {
        let c = Context::new(2);
        assert_eq!(parse_window("2", 2).unwrap(), Window::uniform(2, -2));
        assert_eq!(parse_window("*,2", 2).unwrap(), Window::new([None, Some(-2)]));
        let p = parse_point(&c, "t[1,1]=3, t[2,1]=-1/2").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].1, Rational::new((-1).into(), 2.into()));
        assert!(parse_window("-1", 1).is_err());
        assert_eq!(parse_index("1,2", 2).unwrap(), MultiIndex::from([1, 2]));
    }
}
