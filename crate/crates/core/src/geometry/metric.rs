use crate::autodiff::Jet3;
use crate::error::{Error, Result};
use crate::expr::{parse, Chart, Expression, Func};

use super::linalg;

#[derive(Debug, Clone, PartialEq)]
enum MetricSource {
    /// Explicit entries `g_ij` in chart coordinates.
    Entries(Vec<Vec<Expression>>),
    /// Metric for which the given vector fields form an orthonormal frame:
    /// `g = Σ_a θ^a ⊗ θ^a` with `θ` the dual coframe.
    OrthonormalFrame(Vec<Vec<Expression>>),
}

/// A Riemannian metric on a single global chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    label: String,
    vars: Vec<String>,
    source: MetricSource,
    /// The chart domain is where every one of these is strictly positive.
    validity: Vec<Expression>,
}

fn default_vars(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl MetricField {
    pub fn new(vars: Vec<String>, entries: Vec<Vec<Expression>>) -> Result<Self> {
        let n = vars.len();
        if n == 0 {
            return Err(Error::InvalidModel("metric needs at least one variable".into()));
        }
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidModel(format!(
                "metric entries must form a {n}x{n} matrix"
            )));
        }
        let label = format!("explicit({n})");
        let m = Self {
            label,
            vars,
            source: MetricSource::Entries(entries),
            validity: Vec::new(),
        };
        m.check_vars()?;
        Ok(m)
    }

    /// Metric making `frame` (each entry a vector field given by its
    /// coordinate components) orthonormal.
    pub fn from_orthonormal_frame(vars: Vec<String>, frame: Vec<Vec<Expression>>) -> Result<Self> {
        let n = vars.len();
        if frame.len() != n || frame.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidModel(format!(
                "frame must have {n} vectors of {n} components"
            )));
        }
        let m = Self {
            label: format!("frame({n})"),
            vars,
            source: MetricSource::OrthonormalFrame(frame),
            validity: Vec::new(),
        };
        m.check_vars()?;
        Ok(m)
    }

    pub fn euclidean(n: usize) -> Self {
        Self::euclidean_with_vars(default_vars("x", n))
    }

    pub fn euclidean_with_vars(vars: Vec<String>) -> Self {
        let n = vars.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Expression::constant(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        Self {
            label: format!("euclidean({n})"),
            vars,
            source: MetricSource::Entries(entries),
            validity: Vec::new(),
        }
    }

    /// Unit round sphere in the chart `(theta, phi)`.
    pub fn sphere2() -> Self {
        let sin2 = Expression::call(Func::Sin, Expression::var("theta"))
            .pow(Expression::constant(2.0));
        Self {
            label: "sphere2".into(),
            vars: vec!["theta".into(), "phi".into()],
            source: MetricSource::Entries(vec![
                vec![Expression::constant(1.0), Expression::constant(0.0)],
                vec![Expression::constant(0.0), sin2],
            ]),
            validity: vec![Expression::call(Func::Sin, Expression::var("theta"))],
        }
    }

    /// Upper half-plane model of the hyperbolic plane, chart `(x, y)`.
    pub fn hyperbolic2() -> Self {
        let inv_y2 = Expression::constant(1.0).div(Expression::var("y").pow(Expression::constant(2.0)));
        Self {
            label: "hyperbolic2".into(),
            vars: vec!["x".into(), "y".into()],
            source: MetricSource::Entries(vec![
                vec![inv_y2.clone(), Expression::constant(0.0)],
                vec![Expression::constant(0.0), inv_y2],
            ]),
            validity: vec![Expression::var("y")],
        }
    }

    /// Resolves `euclidean(n)`, `sphere2` or `hyperbolic2`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "sphere2" => return Ok(Self::sphere2()),
            "hyperbolic2" => return Ok(Self::hyperbolic2()),
            _ => {}
        }
        if let Some(arg) = name
            .strip_prefix("euclidean(")
            .and_then(|rest| rest.strip_suffix(')'))
        {
            let n: usize = arg
                .trim()
                .parse()
                .map_err(|_| Error::InvalidModel(format!("bad dimension in `{name}`")))?;
            if n == 0 || n > crate::autodiff::MAX_DIRECTIONS {
                return Err(Error::InvalidModel(format!("unsupported dimension in `{name}`")));
            }
            return Ok(Self::euclidean(n));
        }
        Err(Error::InvalidModel(format!("unknown built-in metric `{name}`")))
    }

    /// Renames the chart variables, rewriting every expression.
    pub fn with_vars(mut self, vars: Vec<String>) -> Result<Self> {
        if vars.len() != self.vars.len() {
            return Err(Error::InvalidModel(format!(
                "expected {} variable names, got {}",
                self.vars.len(),
                vars.len()
            )));
        }
        // two passes through placeholders so swaps like (x,y)->(y,x) work
        let tmp: Vec<String> = (0..vars.len()).map(|i| format!("tmp_rename_{i}")).collect();
        let rename = |e: &Expression, from: &[String], to: &[String]| {
            from.iter().zip(to).fold(e.clone(), |acc, (f, t)| {
                acc.substitute(f, &Expression::var(t.clone()))
            })
        };
        let apply = |e: &Expression| rename(&rename(e, &self.vars, &tmp), &tmp, &vars);
        self.source = match &self.source {
            MetricSource::Entries(rows) => MetricSource::Entries(
                rows.iter().map(|r| r.iter().map(apply).collect()).collect(),
            ),
            MetricSource::OrthonormalFrame(rows) => MetricSource::OrthonormalFrame(
                rows.iter().map(|r| r.iter().map(apply).collect()).collect(),
            ),
        };
        self.validity = self.validity.iter().map(apply).collect();
        self.vars = vars;
        self.check_vars()?;
        Ok(self)
    }

    pub fn with_validity(mut self, validity: Vec<Expression>) -> Result<Self> {
        self.validity = validity;
        self.check_vars()?;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn check_vars(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vars {
            if !seen.insert(v) {
                return Err(Error::InvalidModel(format!("duplicate chart variable `{v}`")));
            }
            if parse(v).ok() != Some(Expression::var(v.clone())) {
                return Err(Error::InvalidModel(format!("`{v}` is not a valid variable name")));
            }
        }
        let exprs: Vec<&Expression> = match &self.source {
            MetricSource::Entries(r) | MetricSource::OrthonormalFrame(r) => r.iter().flatten().collect(),
        };
        for e in exprs.into_iter().chain(&self.validity) {
            if let Some(v) = e.free_vars().into_iter().find(|v| !self.vars.contains(v)) {
                return Err(Error::InvalidModel(format!(
                    "`{v}` in `{e}` is not a chart variable of {}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn validity(&self) -> &[Expression] {
        &self.validity
    }

    /// Explicit entry `g_ij`, when the metric is given by entries.
    pub fn entry(&self, i: usize, j: usize) -> Option<&Expression> {
        match &self.source {
            MetricSource::Entries(rows) => rows.get(i).and_then(|r| r.get(j)),
            MetricSource::OrthonormalFrame(_) => None,
        }
    }

    /// Fails unless `p` has the chart dimension and satisfies the validity
    /// predicate.
    pub fn check_domain(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::OutsideChart {
                point: p.to_vec(),
                detail: "non-finite coordinate".into(),
            });
        }
        let chart = Chart {
            names: &self.vars,
            values: p,
        };
        for cond in &self.validity {
            let v: f64 = cond.eval(&chart)?;
            if !(v > 0.0) {
                return Err(Error::OutsideChart {
                    point: p.to_vec(),
                    detail: format!("`{cond}` = {v} is not positive"),
                });
            }
        }
        Ok(())
    }

    /// Metric entries as jets over the given coordinate jets.
    pub fn eval_jets(&self, coords: &[Jet3], point: &[f64]) -> Result<Vec<Vec<Jet3>>> {
        let n = self.dim();
        let chart = Chart {
            names: &self.vars,
            values: coords,
        };
        match &self.source {
            MetricSource::Entries(rows) => {
                let mut g = vec![vec![Jet3::constant(0.0); n]; n];
                for i in 0..n {
                    for j in i..n {
                        let gij: Jet3 = rows[i][j].eval(&chart)?;
                        if i != j {
                            let gji: Jet3 = rows[j][i].eval(&chart)?;
                            let tol = 1e-12 * (1.0 + gij.value().abs());
                            if (gij.value() - gji.value()).abs() > tol {
                                return Err(Error::InvalidModel(format!(
                                    "metric is not symmetric: g[{i}][{j}] = {} but g[{j}][{i}] = {}",
                                    gij.value(),
                                    gji.value()
                                )));
                            }
                        }
                        g[i][j] = gij;
                        g[j][i] = gij;
                    }
                }
                Ok(g)
            }
            MetricSource::OrthonormalFrame(frame) => {
                // columns of `e` are the frame vectors
                let mut e = vec![vec![Jet3::constant(0.0); n]; n];
                for (a, v) in frame.iter().enumerate() {
                    for (c, comp) in v.iter().enumerate() {
                        e[c][a] = comp.eval(&chart)?;
                    }
                }
                let theta = linalg::inverse(&e).ok_or_else(|| Error::SingularMetric(point.to_vec()))?;
                let mut g = vec![vec![Jet3::constant(0.0); n]; n];
                for i in 0..n {
                    for j in i..n {
                        let s: Jet3 = (0..n).map(|a| theta[a][i] * theta[a][j]).sum();
                        g[i][j] = s;
                        g[j][i] = s;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Metric entries as plain values.
    pub fn eval_values(&self, p: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_domain(p)?;
        let coords = Jet3::seed(p)?;
        Ok(self
            .eval_jets(&coords, p)?
            .iter()
            .map(|r| r.iter().map(|x| x.value()).collect())
            .collect())
    }

    /// Cholesky test of positive definiteness at `p`.
    pub fn is_positive_definite(&self, p: &[f64]) -> Result<bool> {
        Ok(linalg::cholesky(&self.eval_values(p)?).is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        assert_eq!(MetricField::builtin("euclidean(3)").unwrap().dim(), 3);
        assert_eq!(MetricField::builtin("sphere2").unwrap().vars(), ["theta", "phi"]);
        assert!(MetricField::builtin("euclidean(0)").is_err());
        assert!(MetricField::builtin("torus").is_err());
        let h = MetricField::hyperbolic2();
        assert!(h.check_domain(&[0.0, -1.0]).is_err());
        assert!(h.check_domain(&[0.0, 1.0]).is_ok());
        assert!(h.check_domain(&[0.0]).is_err());
    }

    #[test]
    fn rename_swaps() {
        let m = MetricField::hyperbolic2()
            .with_vars(vec!["y".into(), "x".into()])
            .unwrap();
        // now the second coordinate, named x, plays the role of height
        let g = m.eval_values(&[5.0, 2.0]).unwrap();
        assert!((g[0][0] - 0.25).abs() < 1e-15);
        assert!(m.with_vars(vec!["a".into()]).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_foreign_vars() {
        let e = |s: &str| parse(s).unwrap();
        let vars = vec!["x".to_string(), "y".to_string()];
        let m = MetricField::new(vars.clone(), vec![vec![e("1"), e("x")], vec![e("0"), e("1")]]).unwrap();
        assert!(m.eval_values(&[0.5, 0.0]).is_err());
        assert!(MetricField::new(vars.clone(), vec![vec![e("1"), e("0")], vec![e("0"), e("z")]]).is_err());
        assert!(MetricField::new(vars, vec![vec![e("1")]]).is_err());
    }

    #[test]
    fn frame_metric() {
        // frame {y d/dx, y d/dy} is orthonormal for the hyperbolic metric
        let vars = vec!["x".to_string(), "y".to_string()];
        let e = |s: &str| parse(s).unwrap();
        let m = MetricField::from_orthonormal_frame(
            vars,
            vec![vec![e("y"), e("0")], vec![e("0"), e("y")]],
        )
        .unwrap();
        let g = m.eval_values(&[0.3, 2.0]).unwrap();
        assert!((g[0][0] - 0.25).abs() < 1e-15 && g[0][1].abs() < 1e-15);
        assert!(m.is_positive_definite(&[0.3, 2.0]).unwrap());
    }
}
