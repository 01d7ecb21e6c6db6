use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{parse, Expression, Func};
use crate::geometry::MetricField;

/// Chart-domain margin used by the cylindrical model.
pub const CYLINDRICAL_EPS: f64 = 1e-3;

/// Ricci tensor of the base in the frame `dφ(e_1), …, dφ(e_n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseRicci {
    Flat,
    /// Surface base with Gauss curvature `K` (a function on the total space).
    Gauss(Expression),
    /// Full symmetric matrix of frame components.
    Matrix(Vec<Vec<Expression>>),
}

/// A submersion with one-dimensional fibers given by an adapted
/// orthonormal frame and its integrability data.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrabilityModel {
    vars: Vec<String>,
    /// `e_1, …, e_{n+1}` by coordinate components; `e_{n+1}` is vertical.
    frame: Vec<Vec<Expression>>,
    metric: MetricField,
    /// `f^k_ij` stored at `[i][j][k]`, antisymmetric in `i, j`.
    f: Vec<Vec<Vec<Option<Expression>>>>,
    kappa: Vec<Expression>,
    /// `σ_ij`, antisymmetric.
    sigma: Vec<Vec<Option<Expression>>>,
    base_ricci: BaseRicci,
}

fn zero() -> Expression {
    Expression::constant(0.0)
}

impl IntegrabilityModel {
    /// `f` maps `(i, j, k)` to `f^k_ij` and `sigma` maps `(i, j)` to `σ_ij`,
    /// all indices zero-based over the horizontal frame. Entries for `j < i`
    /// are filled in by antisymmetry when absent.
    pub fn new(
        vars: Vec<String>,
        frame: Vec<Vec<Expression>>,
        metric: Option<MetricField>,
        f: BTreeMap<(usize, usize, usize), Expression>,
        kappa: Vec<Expression>,
        sigma: BTreeMap<(usize, usize), Expression>,
        base_ricci: BaseRicci,
    ) -> Result<Self> {
        let total = vars.len();
        if total < 2 {
            return Err(Error::InvalidModel(
                "integrability data needs a base of dimension at least 1".into(),
            ));
        }
        let n = total - 1;
        if kappa.len() != n {
            return Err(Error::InvalidModel(format!(
                "expected {n} kappa functions, found {}",
                kappa.len()
            )));
        }
        let metric = match metric {
            Some(m) => {
                if m.vars() != vars.as_slice() {
                    return Err(Error::InvalidModel(
                        "metric variables differ from the model variables".into(),
                    ));
                }
                m
            }
            None => MetricField::from_orthonormal_frame(vars.clone(), frame.clone())?
                .with_label(format!("frame-induced({total})")),
        };
        if frame.len() != total || frame.iter().any(|v| v.len() != total) {
            return Err(Error::InvalidModel(format!(
                "frame must have {total} vectors of {total} components"
            )));
        }
        let mut fs = vec![vec![vec![None; n]; n]; n];
        for (&(i, j, k), e) in &f {
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidModel(format!(
                    "f index ({}, {}, {}) out of range 1..={n}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            if i == j {
                return Err(Error::InvalidModel(format!(
                    "f^{}_{}{} must vanish by antisymmetry",
                    k + 1,
                    i + 1,
                    j + 1
                )));
            }
            fs[i][j][k] = Some(e.clone());
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if fs[i][j][k].is_none() {
                        if let Some(e) = fs[j][i][k].clone() {
                            fs[i][j][k] = Some(e.neg());
                        }
                    }
                }
            }
        }
        let mut ss = vec![vec![None; n]; n];
        for (&(i, j), e) in &sigma {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidModel(format!(
                    "sigma index ({}, {}) is invalid",
                    i + 1,
                    j + 1
                )));
            }
            ss[i][j] = Some(e.clone());
        }
        for i in 0..n {
            for j in 0..n {
                if ss[i][j].is_none() {
                    if let Some(e) = ss[j][i].clone() {
                        ss[i][j] = Some(e.neg());
                    }
                }
            }
        }
        match &base_ricci {
            BaseRicci::Matrix(rows) if rows.len() != n || rows.iter().any(|r| r.len() != n) => {
                return Err(Error::InvalidModel(format!(
                    "base Ricci matrix must be {n}x{n}"
                )));
            }
            BaseRicci::Gauss(_) if n != 2 => {
                return Err(Error::InvalidModel(
                    "a Gauss curvature base needs n = 2".into(),
                ));
            }
            _ => {}
        }
        let model = Self {
            vars,
            frame,
            metric,
            f: fs,
            kappa,
            sigma: ss,
            base_ricci,
        };
        model.check_vars()?;
        Ok(model)
    }

    fn check_vars(&self) -> Result<()> {
        let exprs = self
            .frame
            .iter()
            .flatten()
            .chain(self.kappa.iter())
            .chain(self.f.iter().flatten().flatten().flatten())
            .chain(self.sigma.iter().flatten().flatten());
        let extra: Vec<&Expression> = match &self.base_ricci {
            BaseRicci::Flat => Vec::new(),
            BaseRicci::Gauss(k) => vec![k],
            BaseRicci::Matrix(rows) => rows.iter().flatten().collect(),
        };
        for e in exprs.chain(extra) {
            if let Some(v) = e.free_vars().into_iter().find(|v| !self.vars.contains(v)) {
                return Err(Error::InvalidModel(format!(
                    "`{v}` in `{e}` is not a model variable"
                )));
            }
        }
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn base_dim(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn frame(&self) -> &[Vec<Expression>] {
        &self.frame
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn kappa(&self) -> &[Expression] {
        &self.kappa
    }

    /// `f^k_ij`, zero when undeclared.
    pub fn f(&self, i: usize, j: usize, k: usize) -> Expression {
        self.f[i][j][k].clone().unwrap_or_else(zero)
    }

    pub fn sigma(&self, i: usize, j: usize) -> Expression {
        self.sigma[i][j].clone().unwrap_or_else(zero)
    }

    pub fn base_ricci(&self) -> &BaseRicci {
        &self.base_ricci
    }
}

/// The models whose biharmonicity can be checked.
#[derive(Debug, Clone, PartialEq)]
pub enum SubmersionModel {
    /// `(M × R^n, g_M + e^{2λ} g_0)` projected onto `M`, with `λ` a
    /// function on `M`. Fiber coordinates are `z` (n = 1) or `z1..zn`.
    WarpedProduct {
        base: MetricField,
        fiber_dim: usize,
        lambda: Expression,
    },
    /// `(R^n × R, g_0 + e^{2λ(x,t)} dt²)` projected onto `R^n`, chart
    /// `(x1, …, xn, t)`.
    TwistedProduct { base_dim: usize, lambda: Expression },
    /// `R^4 \ {x₄-axis}` in coordinates `(r, theta, phi, x4)` projected to
    /// the half-plane `(r, x4)`.
    Cylindrical,
    IntegrabilityData(IntegrabilityModel),
}

fn exp2(lambda: &Expression) -> Expression {
    Expression::call(Func::Exp, Expression::constant(2.0).mul(lambda.clone()))
}

fn exp_neg(lambda: &Expression) -> Expression {
    Expression::call(Func::Exp, lambda.clone().neg())
}

fn unit(n: usize, i: usize) -> Vec<Expression> {
    (0..n)
        .map(|j| Expression::constant(if i == j { 1.0 } else { 0.0 }))
        .collect()
}

fn diagonal(d: Vec<Expression>) -> Vec<Vec<Expression>> {
    let n = d.len();
    d.into_iter()
        .enumerate()
        .map(|(i, e)| {
            let mut row = vec![zero(); n];
            row[i] = e;
            row
        })
        .collect()
}

impl SubmersionModel {
    pub fn warped(base: MetricField, fiber_dim: usize, lambda: Expression) -> Result<Self> {
        let m = Self::WarpedProduct {
            base,
            fiber_dim,
            lambda,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn twisted(base_dim: usize, lambda: Expression) -> Result<Self> {
        let m = Self::TwistedProduct { base_dim, lambda };
        m.validate()?;
        Ok(m)
    }

    /// Checks that every function only uses chart variables and that fiber
    /// and base variable names do not collide.
    pub fn validate(&self) -> Result<()> {
        let (allowed, lambda) = match self {
            Self::WarpedProduct {
                base,
                fiber_dim,
                lambda,
            } => {
                if *fiber_dim == 0 {
                    return Err(Error::InvalidModel("fiber dimension must be positive".into()));
                }
                let fiber = self.fiber_vars();
                if let Some(v) = fiber.iter().find(|v| base.vars().contains(v)) {
                    return Err(Error::InvalidModel(format!(
                        "base variable `{v}` collides with a fiber coordinate"
                    )));
                }
                (base.vars().to_vec(), lambda)
            }
            Self::TwistedProduct { base_dim, lambda } => {
                if *base_dim == 0 {
                    return Err(Error::InvalidModel("base dimension must be positive".into()));
                }
                (self.vars(), lambda)
            }
            Self::Cylindrical | Self::IntegrabilityData(_) => return Ok(()),
        };
        if let Some(v) = lambda.free_vars().into_iter().find(|v| !allowed.contains(v)) {
            return Err(Error::InvalidModel(format!(
                "lambda uses `{v}`, which is not one of {allowed:?}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::WarpedProduct { .. } => "warped_product",
            Self::TwistedProduct { .. } => "twisted_product",
            Self::Cylindrical => "cylindrical",
            Self::IntegrabilityData(_) => "integrability_data",
        }
    }

    fn fiber_vars(&self) -> Vec<String> {
        match self {
            Self::WarpedProduct { fiber_dim: 1, .. } => vec!["z".into()],
            Self::WarpedProduct { fiber_dim, .. } => {
                (1..=*fiber_dim).map(|i| format!("z{i}")).collect()
            }
            Self::TwistedProduct { .. } => vec!["t".into()],
            Self::Cylindrical => vec!["theta".into(), "phi".into()],
            Self::IntegrabilityData(d) => vec![d.vars[d.vars.len() - 1].clone()],
        }
    }

    /// Chart variables of the total space.
    pub fn vars(&self) -> Vec<String> {
        match self {
            Self::WarpedProduct { base, .. } => {
                let mut v = base.vars().to_vec();
                v.extend(self.fiber_vars());
                v
            }
            Self::TwistedProduct { base_dim, .. } => {
                let mut v: Vec<String> = (1..=*base_dim).map(|i| format!("x{i}")).collect();
                v.push("t".into());
                v
            }
            Self::Cylindrical => ["r", "theta", "phi", "x4"].map(String::from).to_vec(),
            Self::IntegrabilityData(d) => d.vars.clone(),
        }
    }

    pub fn total_dim(&self) -> usize {
        match self {
            Self::WarpedProduct {
                base, fiber_dim, ..
            } => base.dim() + fiber_dim,
            Self::TwistedProduct { base_dim, .. } => base_dim + 1,
            Self::Cylindrical => 4,
            Self::IntegrabilityData(d) => d.vars.len(),
        }
    }

    pub fn base_dim(&self) -> usize {
        match self {
            Self::WarpedProduct { base, .. } => base.dim(),
            Self::TwistedProduct { base_dim, .. } => *base_dim,
            Self::Cylindrical => 2,
            Self::IntegrabilityData(d) => d.base_dim(),
        }
    }

    pub fn fiber_dim(&self) -> usize {
        self.total_dim() - self.base_dim()
    }

    /// Total-space coordinates that the projection keeps, in base-chart
    /// order. `None` when the base has no declared chart.
    pub fn base_indices(&self) -> Option<Vec<usize>> {
        match self {
            Self::WarpedProduct { base, .. } => Some((0..base.dim()).collect()),
            Self::TwistedProduct { base_dim, .. } => Some((0..*base_dim).collect()),
            Self::Cylindrical => Some(vec![0, 3]),
            Self::IntegrabilityData(_) => None,
        }
    }

    pub fn fiber_indices(&self) -> Vec<usize> {
        match self {
            Self::Cylindrical => vec![1, 2],
            _ => (self.base_dim()..self.total_dim()).collect(),
        }
    }

    /// Metric of the base chart, when the projection is a coordinate
    /// projection.
    pub fn base_metric(&self) -> Option<MetricField> {
        match self {
            Self::WarpedProduct { base, .. } => Some(base.clone()),
            Self::TwistedProduct { base_dim, .. } => Some(MetricField::euclidean(*base_dim)),
            Self::Cylindrical => Some(
                MetricField::euclidean_with_vars(vec!["r".into(), "x4".into()])
                    .with_validity(vec![parse("r - 0.001").expect("static expression")])
                    .expect("static validity"),
            ),
            Self::IntegrabilityData(_) => None,
        }
    }

    /// The Riemannian metric of the total space.
    pub fn total_metric(&self) -> Result<MetricField> {
        let vars = self.vars();
        let m = match self {
            Self::WarpedProduct {
                base, fiber_dim, lambda,
            } => {
                let b = base.dim();
                let warp = exp2(lambda);
                let mut rows = Vec::with_capacity(b + fiber_dim);
                for i in 0..b {
                    let mut row: Vec<Expression> = (0..b)
                        .map(|j| base.entry(i, j).cloned())
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| {
                            Error::Unsupported(
                                "warped products need a base given by explicit entries".into(),
                            )
                        })?;
                    row.extend((0..*fiber_dim).map(|_| zero()));
                    rows.push(row);
                }
                for s in 0..*fiber_dim {
                    let mut row = vec![zero(); b + fiber_dim];
                    row[b + s] = warp.clone();
                    rows.push(row);
                }
                MetricField::new(vars, rows)?
                    .with_validity(base.validity().to_vec())?
                    .with_label(format!("{} x_warp R^{fiber_dim}", base.label()))
            }
            Self::TwistedProduct { base_dim, lambda } => {
                let mut d: Vec<Expression> = (0..*base_dim).map(|_| Expression::constant(1.0)).collect();
                d.push(exp2(lambda));
                MetricField::new(vars, diagonal(d))?.with_label(format!("twisted({base_dim})"))
            }
            Self::Cylindrical => {
                let d = ["1", "r^2", "r^2*sin(theta)^2", "1"]
                    .iter()
                    .map(|s| parse(s).expect("static expression"))
                    .collect();
                MetricField::new(vars, diagonal(d))?
                    .with_validity(vec![
                        parse("r - 0.001").expect("static expression"),
                        parse("sin(theta) - 0.001").expect("static expression"),
                    ])?
                    .with_label("cylindrical")
            }
            Self::IntegrabilityData(d) => d.metric.clone(),
        };
        Ok(m)
    }

    /// Closed-form adapted frame by coordinate components, horizontal
    /// fields first. Warped products over a non-diagonal base are
    /// orthonormalized pointwise instead (see [`super::LocalSubmersion`]).
    pub fn frame_expressions(&self) -> Option<Vec<Vec<Expression>>> {
        let m = self.total_dim();
        match self {
            Self::WarpedProduct {
                base, fiber_dim, lambda,
            } => {
                let b = base.dim();
                let mut frame = Vec::with_capacity(m);
                for i in 0..b {
                    for j in 0..b {
                        let e = base.entry(i, j)?;
                        if i != j && *e != zero() {
                            return None;
                        }
                    }
                    let gii = base.entry(i, i)?.clone();
                    let mut v = vec![zero(); m];
                    v[i] = Expression::constant(1.0).div(Expression::call(Func::Sqrt, gii));
                    frame.push(v);
                }
                for s in 0..*fiber_dim {
                    let mut v = vec![zero(); m];
                    v[b + s] = exp_neg(lambda);
                    frame.push(v);
                }
                Some(frame)
            }
            Self::TwistedProduct { base_dim, lambda } => {
                let mut frame: Vec<Vec<Expression>> = (0..*base_dim).map(|i| unit(m, i)).collect();
                let mut v = vec![zero(); m];
                v[*base_dim] = exp_neg(lambda);
                frame.push(v);
                Some(frame)
            }
            Self::Cylindrical => {
                let mut e_theta = vec![zero(); 4];
                e_theta[1] = parse("1/r").expect("static expression");
                let mut e_phi = vec![zero(); 4];
                e_phi[2] = parse("1/(r*sin(theta))").expect("static expression");
                Some(vec![unit(4, 0), unit(4, 3), e_theta, e_phi])
            }
            Self::IntegrabilityData(d) => Some(d.frame.clone()),
        }
    }

    /// Range swept by each fiber coordinate in basicness checks.
    pub fn fiber_sample_range(&self) -> Vec<(f64, f64)> {
        match self {
            Self::Cylindrical => vec![
                (std::f64::consts::FRAC_PI_6, 5.0 * std::f64::consts::FRAC_PI_6),
                (0.0, std::f64::consts::PI),
            ],
            _ => vec![(-1.0, 1.0); self.fiber_dim()],
        }
    }

    /// Assembles a total-space point from base and fiber coordinates.
    pub fn total_point(&self, base: &[f64], fiber: &[f64]) -> Result<Vec<f64>> {
        if base.len() != self.base_dim() || fiber.len() != self.fiber_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: base.len() + fiber.len(),
            });
        }
        let mut p = vec![0.0; self.total_dim()];
        match self.base_indices() {
            Some(idx) => {
                for (k, &i) in idx.iter().enumerate() {
                    p[i] = base[k];
                }
            }
            None => p[..base.len()].copy_from_slice(base),
        }
        for (k, &i) in self.fiber_indices().iter().enumerate() {
            p[i] = fiber[k];
        }
        Ok(p)
    }

    /// `φ(p)` for coordinate projections.
    pub fn project(&self, p: &[f64]) -> Option<Vec<f64>> {
        self.base_indices().map(|idx| idx.iter().map(|&i| p[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_warped_metric() {
        let base = MetricField::euclidean_with_vars(vec!["x".into(), "y".into()]);
        let lam = parse("2*ln(y) + 0.5*ln(3)").unwrap();
        let m = SubmersionModel::warped(base, 1, lam).unwrap();
        assert_eq!(m.vars(), vec!["x", "y", "z"]);
        let g = m.total_metric().unwrap().eval_values(&[0.4, 1.5, 0.0]).unwrap();
        assert!((g[2][2] - 3.0 * 1.5f64.powi(4)).abs() < 1e-12);
        assert_eq!(g[0][0], 1.0);
        assert_eq!(g[0][2], 0.0);
    }

    #[test]
    fn twisted_flat_and_cylindrical() {
        let m = SubmersionModel::twisted(2, Expression::constant(0.0)).unwrap();
        let g = m.total_metric().unwrap().eval_values(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(g, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let c = SubmersionModel::Cylindrical.total_metric().unwrap();
        let th = 0.7_f64;
        let g = c.eval_values(&[2.0, th, 0.1, -0.5]).unwrap();
        assert!((g[1][1] - 4.0).abs() < 1e-15);
        assert!((g[2][2] - 4.0 * th.sin().powi(2)).abs() < 1e-15);
        assert!(c.eval_values(&[0.0005, th, 0.0, 0.0]).is_err());
        assert!(c.eval_values(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_foreign_variables() {
        let base = MetricField::euclidean_with_vars(vec!["x".into(), "y".into()]);
        assert!(SubmersionModel::warped(base.clone(), 1, parse("z*y").unwrap()).is_err());
        assert!(SubmersionModel::warped(base, 0, parse("y").unwrap()).is_err());
        assert!(SubmersionModel::twisted(2, parse("x3").unwrap()).is_err());
        let zbase = MetricField::euclidean_with_vars(vec!["x".into(), "z".into()]);
        assert!(SubmersionModel::warped(zbase, 1, parse("x").unwrap()).is_err());
    }

    #[test]
    fn integrability_antisymmetric_fill() {
        let vars: Vec<String> = ["x", "y", "t"].map(String::from).to_vec();
        let frame = vec![unit(3, 0), unit(3, 1), unit(3, 2)];
        let mut f = BTreeMap::new();
        f.insert((0, 1, 0), parse("x").unwrap());
        let d = IntegrabilityModel::new(
            vars,
            frame,
            None,
            f,
            vec![zero(), zero()],
            BTreeMap::new(),
            BaseRicci::Flat,
        )
        .unwrap();
        assert_eq!(d.f(1, 0, 0).to_string(), "-x");
        assert_eq!(d.f(0, 1, 1), zero());
        assert_eq!(d.sigma(0, 1), zero());
    }
}
