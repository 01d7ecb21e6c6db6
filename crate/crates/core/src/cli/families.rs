use std::collections::BTreeMap;

use crate::kappa::{antiderivative_source, assemble_lambda, check_interval, Case, KappaFamily};

use super::{Axis, BaseSpec, CliError, Manifest, ModelSpec, WarpedSpec};

/// A family as requested on the command line, before index assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    pub case: Case,
    pub a: Option<f64>,
    pub b: f64,
}

/// Pairs `--case`, `--a` and `--b` values. `b` must be given once per case;
/// `a` either once per case or once per case II/III family, in order.
pub fn parse_family_args(cases: &[String], a: &[f64], b: &[f64]) -> Result<Vec<FamilySpec>, CliError> {
    let cases = cases
        .iter()
        .map(|c| c.parse::<Case>().map_err(|e| CliError::Manifest(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if b.len() != cases.len() {
        return Err(CliError::Manifest(format!(
            "{} --case values but {} --b values",
            cases.len(),
            b.len()
        )));
    }
    let needs_a = cases.iter().filter(|c| **c != Case::I).count();
    let mut a_iter = a.iter();
    let per_case = a.len() == cases.len();
    if !per_case && a.len() != needs_a {
        return Err(CliError::Manifest(format!(
            "expected {needs_a} --a values (one per case II/III) or {} (one per case), got {}",
            cases.len(),
            a.len()
        )));
    }
    Ok(cases
        .iter()
        .zip(b)
        .map(|(&case, &b)| {
            let a = if per_case || case != Case::I {
                a_iter.next().copied()
            } else {
                None
            };
            FamilySpec { case, a, b }
        })
        .collect())
}

/// A pole-free default interval for one family.
fn default_axis(f: &KappaFamily) -> Axis {
    let (lo, hi) = match f.case {
        Case::I | Case::III => (0.5 - f.b, 3.0 - f.b),
        Case::II => (-2.4 / f.a - f.b, 2.4 / f.a - f.b),
    };
    Axis {
        var: f.var(),
        min: lo,
        max: hi,
        count: 10,
    }
}

/// A warped-product manifest over flat `R^n` whose warping function is
/// assembled from the given families, checked against the warped and
/// Einstein criteria.
pub fn run_families(specs: &[FamilySpec], grid: &[String]) -> Result<Manifest, CliError> {
    if specs.is_empty() {
        return Err(CliError::Manifest("no families given".into()));
    }
    let fams = specs
        .iter()
        .enumerate()
        .map(|(i, s)| KappaFamily::new(s.case, s.a, s.b, i))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| CliError::Manifest(e.to_string()))?;
    assemble_lambda(&fams).map_err(|e| CliError::Manifest(e.to_string()))?;
    let lambda = fams.iter().map(antiderivative_source).collect::<Vec<_>>().join("+");
    let mut axes: Vec<Axis> = fams.iter().map(default_axis).collect();
    for g in grid {
        let a = Axis::parse(g)?;
        let slot = axes
            .iter_mut()
            .find(|x| x.var == a.var)
            .ok_or_else(|| CliError::Manifest(format!("`{}` is not a family coordinate", a.var)))?;
        *slot = a;
    }
    for (f, a) in fams.iter().zip(&axes) {
        check_interval(f, a.min, a.max).map_err(|e| CliError::Manifest(e.to_string()))?;
    }
    let n = fams.len();
    Ok(Manifest {
        model: ModelSpec::WarpedProduct(WarpedSpec {
            base: BaseSpec::Builtin(format!("euclidean({n})")),
            base_vars: None,
            fiber_dim: 1,
            lambda,
        }),
        criteria: vec!["wp-warped".into(), "einstein".into()],
        grid: axes
            .iter()
            .map(|a| format!("{}={}:{}:{}", a.var, a.min, a.max, a.count))
            .collect(),
        fixed: BTreeMap::new(),
        tolerances: BTreeMap::new(),
        expect: None,
        einstein_constant: Some(0.0),
        output: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(case: Case, a: Option<f64>, b: f64) -> FamilySpec {
        FamilySpec { case, a, b }
    }

    #[test]
    fn product_of_case_one() {
        let m = run_families(&[spec(Case::I, None, 0.0), spec(Case::I, None, 0.0)], &[]).unwrap();
        let ModelSpec::WarpedProduct(WarpedSpec { lambda, .. }) = &m.model else {
            panic!()
        };
        assert_eq!(lambda, "2*ln(x1)+2*ln(x2)");
    }

    #[test]
    fn single_case_two() {
        let m = run_families(&[spec(Case::II, Some(2.0), 0.0)], &[]).unwrap();
        let ModelSpec::WarpedProduct(WarpedSpec { lambda, .. }) = &m.model else {
            panic!()
        };
        assert_eq!(lambda, "2*ln(cos(1*(x1)))");
    }

    #[test]
    fn rejects_empty_and_poles() {
        assert!(run_families(&[], &[]).is_err());
        let err = run_families(&[spec(Case::I, None, 0.0)], &["x1=-1:1:5".into()]).unwrap_err();
        assert_eq!(err.exit_code(), super::super::EXIT_MANIFEST);
    }

    #[test]
    fn pairs_arguments() {
        let cases: Vec<String> = ["I", "II", "III"].map(String::from).to_vec();
        let s = parse_family_args(&cases, &[2.0, 1.0], &[0.0, 0.1, 0.2]).unwrap();
        assert_eq!(s[0].a, None);
        assert_eq!(s[1].a, Some(2.0));
        assert_eq!(s[2].a, Some(1.0));
        assert!(parse_family_args(&cases, &[2.0], &[0.0, 0.1, 0.2]).is_err());
        assert!(parse_family_args(&cases, &[2.0, 1.0], &[0.0]).is_err());
    }
}
