//! Averages against the invariant density ρ∞ ∝ exp(−2V) on the torus.

use rayon::prelude::*;

use super::StochasticError;
use crate::elemdiff::{elementary, eval_series, Expr, VectorField};
use crate::forest::Forest;
use crate::series::ForestSeries;

fn grid_points(d: usize, n: usize) -> Vec<Vec<f64>> {
    let total = n.pow(d as u32);
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let x = (k % n) as f64 * step;
                    k /= n;
                    x
                })
                .collect()
        })
        .collect()
}

/// ∫ g ρ∞ on 𝕋^d by the tensor trapezoid rule with `n` points per axis.
pub fn integrate_invariant(g: &Expr, v: &Expr, d: usize, n: usize) -> Result<f64, StochasticError> {
    if d == 0 || n == 0 || n.checked_pow(d as u32).is_none_or(|t| t > 1 << 24) {
        return Err(StochasticError::Config(format!("grid {n}^{d} is empty or too large")));
    }
    if !g.is_periodic() || !v.is_periodic() {
        return Err(StochasticError::Config("quadrature needs periodic integrands".into()));
    }
    let pts = grid_points(d, n);
    let (g, v) = (g.numeric(), v.numeric());
    let (num, den) = pts
        .par_iter()
        .map(|x| {
            let w = (-2.0 * v.eval(x)).exp();
            (g.eval(x) * w, w)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(num / den)
}

fn check_field(field: &VectorField) -> Result<&Expr, StochasticError> {
    field
        .potential()
        .ok_or_else(|| StochasticError::Config("the vector field must be a gradient −∇V".into()))
}

/// ∫ F(S)[φ] ρ∞ for an F-weighted series S and f = −∇V.
pub fn quadrature(s: &ForestSeries, field: &VectorField, phi: &Expr, n: usize) -> Result<f64, StochasticError> {
    let v = check_field(field)?;
    integrate_invariant(&eval_series(s, field, phi)?, v, field.dim(), n)
}

/// Per-term integrals c·∫ F(π)[φ] ρ∞, useful as a scale for relative errors.
pub fn quadrature_terms(
    s: &ForestSeries,
    field: &VectorField,
    phi: &Expr,
    n: usize,
) -> Result<Vec<(Forest, f64)>, StochasticError> {
    let v = check_field(field)?;
    s.iter()
        .map(|(f, c)| {
            let g = elementary(f, field, phi)?.scale(c);
            Ok((f.clone(), integrate_invariant(&g, v, field.dim(), n)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elemdiff::parse_expr;

    #[test]
    fn generator_integrates_to_zero() {
        let v = parse_expr("sin(x1) + 1/4*cos(2*x2)").unwrap();
        let f = VectorField::gradient(&v, 2).unwrap();
        let phi = parse_expr("cos(x1)*sin(x2) + sin(2*x1)").unwrap();
        let lphi = f.generator(&phi);
        assert!(integrate_invariant(&lphi, &v, 2, 64).unwrap().abs() < 1e-13);
        let one = integrate_invariant(&Expr::one(), &v, 2, 16).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
    }
}
