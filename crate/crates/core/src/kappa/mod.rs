//! Closed-form solutions of `κ' − κ²/2 = C` and the warping functions
//! they integrate to.
//!
//! A warped product over flat `R^n` with one-dimensional fiber and
//! `λ = −Σ ∫κ_i(x_i) dx_i` is biharmonic exactly when each `κ_i` solves
//! the Riccati equation with its own constant.

use std::fmt;
use std::str::FromStr;

use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::expr::{parse, Expression};

/// Points closer than this to a pole are refused.
pub const POLE_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `C = 0`: `κ = −2/(x+b)`.
    I,
    /// `C = a²/2`: `κ = a tan((a/2)(x+b))`.
    II,
    /// `C = −a²/2`: `κ = −a coth((a/2)(x+b))`.
    III,
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            other => Err(Error::InvalidModel(format!(
                "unknown family case `{other}`; expected I, II or III"
            ))),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        })
    }
}

/// One Riccati solution attached to the coordinate `x_{index+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaFamily {
    pub case: Case,
    /// Unused for case I.
    pub a: f64,
    pub b: f64,
    pub index: usize,
}

impl KappaFamily {
    pub fn new(case: Case, a: Option<f64>, b: f64, index: usize) -> Result<Self> {
        let a = match (case, a) {
            (Case::I, _) => 0.0,
            (_, Some(a)) if a > 0.0 && a.is_finite() => a,
            (_, Some(a)) => {
                return Err(Error::InvalidModel(format!(
                    "case {case} needs a > 0, got {a}"
                )))
            }
            (_, None) => {
                return Err(Error::InvalidModel(format!("case {case} needs a value for a")))
            }
        };
        if !b.is_finite() {
            return Err(Error::InvalidModel(format!("b must be finite, got {b}")));
        }
        Ok(Self { case, a, b, index })
    }

    pub fn var(&self) -> String {
        format!("x{}", self.index + 1)
    }

    /// Distance-like measure to the nearest pole; below [`POLE_GUARD`] the
    /// point is refused.
    fn pole_distance(&self, x: f64) -> f64 {
        let u = x + self.b;
        match self.case {
            Case::I => u.abs(),
            Case::II => (0.5 * self.a * u).cos().abs(),
            Case::III => (0.5 * self.a * u).abs(),
        }
    }

    fn guard(&self, x: f64) -> Result<()> {
        if !(self.pole_distance(x) >= POLE_GUARD) {
            return Err(Error::Pole(format!(
                "x{} = {x} is within {POLE_GUARD} of a pole of the case {} family (a = {}, b = {})",
                self.index + 1,
                self.case,
                self.a,
                self.b
            )));
        }
        Ok(())
    }

    fn kappa_jet(&self, x: Jet3) -> Jet3 {
        let u = x + self.b;
        match self.case {
            Case::I => Jet3::constant(-2.0) / u,
            Case::II => (u.scale(0.5 * self.a)).tan().scale(self.a),
            Case::III => (u.scale(0.5 * self.a)).tanh().recip().scale(-self.a),
        }
    }
}

pub fn family_constant(fam: &KappaFamily) -> f64 {
    match fam.case {
        Case::I => 0.0,
        Case::II => 0.5 * fam.a * fam.a,
        Case::III => -0.5 * fam.a * fam.a,
    }
}

pub fn kappa_value(fam: &KappaFamily, x: f64) -> Result<f64> {
    fam.guard(x)?;
    Ok(fam.kappa_jet(Jet3::constant(x)).value())
}

/// The exponential form `a(1 + e^{a(x+b)})/(1 − e^{a(x+b)})` of case III.
pub fn kappa_value_exponential(fam: &KappaFamily, x: f64) -> Result<f64> {
    fam.guard(x)?;
    match fam.case {
        Case::III => {
            let w = (fam.a * (x + fam.b)).exp();
            Ok(fam.a * (1.0 + w) / (1.0 - w))
        }
        _ => kappa_value(fam, x),
    }
}

/// `κ'(x) − κ(x)²/2 − C`.
pub fn riccati_residual(fam: &KappaFamily, c: f64, x: f64) -> Result<f64> {
    fam.guard(x)?;
    let k = fam.kappa_jet(Jet3::seed(&[x])?[0]);
    Ok(k.d(0) - 0.5 * k.value() * k.value() - c)
}

fn signed(v: f64) -> String {
    if v < 0.0 {
        format!("-{}", -v)
    } else {
        format!("+{v}")
    }
}

fn shifted(var: &str, b: f64) -> String {
    if b == 0.0 {
        format!("({var})")
    } else {
        format!("({var}{})", signed(b))
    }
}

/// The term `−∫κ dx` with the integration constant set to zero, as source.
pub fn antiderivative_source(fam: &KappaFamily) -> String {
    let u = shifted(&fam.var(), fam.b);
    match fam.case {
        Case::I => format!("2*ln{u}"),
        Case::II => format!("2*ln(cos({}*{u}))", 0.5 * fam.a),
        Case::III => format!("2*ln(sinh({}*{u}))", 0.5 * fam.a),
    }
}

/// `λ = −Σ ∫κ_i(x_i) dx_i` with zero integration constants.
pub fn assemble_lambda(families: &[KappaFamily]) -> Result<Expression> {
    if families.is_empty() {
        return Err(Error::InvalidModel("at least one family is required".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for f in families {
        if !seen.insert(f.index) {
            return Err(Error::InvalidModel(format!(
                "coordinate x{} has more than one family",
                f.index + 1
            )));
        }
    }
    let src: Vec<String> = families.iter().map(antiderivative_source).collect();
    Ok(parse(&src.join("+"))?)
}

/// Fails unless the family's term of `λ` is defined and pole-free on
/// `[lo, hi]`, with margin [`POLE_GUARD`] at the ends.
pub fn check_interval(fam: &KappaFamily, lo: f64, hi: f64) -> Result<()> {
    let (u0, u1) = (lo + fam.b, hi + fam.b);
    let ok = match fam.case {
        Case::I | Case::III => u0 > 0.0,
        Case::II => {
            // cos((a/2)u) must stay positive
            let half = std::f64::consts::FRAC_PI_2;
            let (v0, v1) = (0.5 * fam.a * u0, 0.5 * fam.a * u1);
            let k = (v0 / (4.0 * half)).round();
            let shift = 4.0 * half * k;
            v0 - shift > -half && v1 - shift < half
        }
    };
    if !ok || !(lo <= hi) {
        return Err(Error::Pole(format!(
            "the case {} family on x{} is singular or undefined inside [{lo}, {hi}]",
            fam.case,
            fam.index + 1
        )));
    }
    fam.guard(lo)?;
    fam.guard(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Chart;

    #[test]
    fn case_values() {
        let one = KappaFamily::new(Case::I, None, 0.0, 0).unwrap();
        assert_eq!(kappa_value(&one, 1.0).unwrap(), -2.0);
        let two = KappaFamily::new(Case::II, Some(2.0), 0.0, 0).unwrap();
        assert_eq!(kappa_value(&two, 0.0).unwrap(), 0.0);
        let three = KappaFamily::new(Case::III, Some(1.0), 0.0, 0).unwrap();
        let e = std::f64::consts::E;
        let oracle = (1.0 + e) / (1.0 - e);
        assert!((kappa_value(&three, 1.0).unwrap() - oracle).abs() < 1e-14);
        assert!((kappa_value_exponential(&three, 1.0).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle + 2.163953).abs() < 1e-6);
    }

    #[test]
    fn constants() {
        let f = |c, a| KappaFamily::new(c, a, 0.0, 0).unwrap();
        assert_eq!(family_constant(&f(Case::I, None)), 0.0);
        assert_eq!(family_constant(&f(Case::II, Some(3.0))), 4.5);
        assert_eq!(family_constant(&f(Case::III, Some(1.0))), -0.5);
    }

    #[test]
    fn riccati_holds() {
        let one = KappaFamily::new(Case::I, None, 0.3, 0).unwrap();
        assert!(riccati_residual(&one, 0.0, 1.2).unwrap().abs() < 1e-10);
        let two = KappaFamily::new(Case::II, Some(2.0), 0.0, 0).unwrap();
        assert!(riccati_residual(&two, 2.0, 0.3).unwrap().abs() < 1e-10);
        let three = KappaFamily::new(Case::III, Some(1.5), -0.2, 0).unwrap();
        assert!(riccati_residual(&three, -1.125, 0.9).unwrap().abs() < 1e-10);
    }

    #[test]
    fn poles_are_refused() {
        let one = KappaFamily::new(Case::I, None, 0.0, 0).unwrap();
        assert!(matches!(kappa_value(&one, 0.0005), Err(Error::Pole(_))));
        let two = KappaFamily::new(Case::II, Some(2.0), 0.0, 0).unwrap();
        assert!(kappa_value(&two, std::f64::consts::FRAC_PI_2).is_err());
        assert!(check_interval(&two, 0.0, 2.0).is_err());
        assert!(check_interval(&two, -1.0, 1.0).is_ok());
        assert!(check_interval(&one, -1.0, 1.0).is_err());
        assert!(KappaFamily::new(Case::II, None, 0.0, 0).is_err());
        assert!(KappaFamily::new(Case::III, Some(-1.0), 0.0, 0).is_err());
    }

    #[test]
    fn assembled_sources() {
        let fams = [
            KappaFamily::new(Case::I, None, 0.0, 0).unwrap(),
            KappaFamily::new(Case::I, None, 0.0, 1).unwrap(),
        ];
        assert_eq!(assemble_lambda(&fams).unwrap().to_string(), "2*ln(x1)+2*ln(x2)");
        let two = KappaFamily::new(Case::II, Some(2.0), 0.0, 0).unwrap();
        assert_eq!(antiderivative_source(&two), "2*ln(cos(1*(x1)))");
        let shifted = KappaFamily::new(Case::I, None, -0.5, 0).unwrap();
        assert_eq!(antiderivative_source(&shifted), "2*ln(x1-0.5)");
        assert!(assemble_lambda(&[]).is_err());
        assert!(assemble_lambda(&[fams[0], fams[0]]).is_err());
    }

    #[test]
    fn gradient_matches_kappa() {
        let fams = [
            KappaFamily::new(Case::III, Some(1.3), 0.2, 0).unwrap(),
            KappaFamily::new(Case::II, Some(0.8), -0.4, 1).unwrap(),
        ];
        let lam = assemble_lambda(&fams).unwrap();
        let p = [0.9, 0.6];
        let names = ["x1".to_string(), "x2".to_string()];
        let jets = Jet3::seed(&p).unwrap();
        let l: Jet3 = lam.eval(&Chart { names: &names, values: &jets }).unwrap();
        for (i, f) in fams.iter().enumerate() {
            assert!((-l.d(i) - kappa_value(f, p[i]).unwrap()).abs() < 1e-12);
        }
    }
}
