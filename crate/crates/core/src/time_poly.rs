//! Polynomials in the time variables `t_α`.

use std::fmt;

use crate::error::{Error, Result};
use crate::multi_index::MultiIndex;
use crate::poly::Poly;
use crate::scalar::Scalar;

/// The time variable `t_α`, `α ∈ Z^n_+`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeVar(MultiIndex);

impl TimeVar {
    pub fn new(index: MultiIndex) -> Result<Self> {
        if !index.in_zplus() {
            return Err(Error::NotATimeIndex(index));
        }
        Ok(TimeVar(index))
    }

    pub fn index(&self) -> &MultiIndex {
        &self.0
    }
}

impl fmt::Display for TimeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "t[{}]", parts.join(","))
    }
}

impl fmt::Debug for TimeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type TimePoly<F> = Poly<TimeVar, F>;

pub fn time_var<F: Scalar>(index: MultiIndex) -> Result<TimePoly<F>> {
    Ok(Poly::var(TimeVar::new(index)?))
}

/// `∂/∂t_α`.
pub fn time_derivative<F: Scalar>(p: &TimePoly<F>, alpha: &MultiIndex) -> TimePoly<F> {
    p.derive_with(|v| Ok(if v.index() == alpha { Poly::one() } else { Poly::zero() }))
        .expect("constant derivation cannot fail")
}

/// Exact value at a point; every variable of `p` must be assigned.
pub fn eval_at<F: Scalar>(p: &TimePoly<F>, point: &[(MultiIndex, F)]) -> Result<F> {
    p.eval(|v| point.iter().find(|(a, _)| a == v.index()).map(|(_, x)| x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn derivative_and_evaluation() {
        let t11 = time_var::<Rational>(MultiIndex::from([1, 1])).unwrap();
        let t21 = time_var::<Rational>(MultiIndex::from([2, 1])).unwrap();
        let tau = t11.pow(2).add(&t21.scale(&Rational::from_integer(3.into())));
        let d = time_derivative(&tau, &MultiIndex::from([1, 1]));
        assert_eq!(d, t11.scale(&Rational::from_integer(2.into())));
        let v = eval_at(&tau, &[(MultiIndex::from([1, 1]), Rational::from_integer(2.into())),
                                (MultiIndex::from([2, 1]), Rational::from_integer(1.into()))]).unwrap();
        assert_eq!(v, Rational::from_integer(7.into()));
        assert_eq!(tau.to_string(), "t[1,1]^2 + 3*t[2,1]");
        assert!(TimeVar::new(MultiIndex::from([0, 0])).is_err());
    }
}
