//! Monte Carlo ergodic averages of stochastic Runge-Kutta methods.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::srk::SrkTableau;
use super::StochasticError;
use crate::elemdiff::{elementary_field, Expr, NumExpr, VectorField};
use crate::series::{Functional, Q};

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub h: f64,
    /// Steps averaged per trajectory after burn-in.
    pub steps: usize,
    pub burn_in: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub x0: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimResult {
    pub mean: f64,
    /// Standard error from the spread of the per-trajectory means.
    pub std_error: f64,
    pub samples: usize,
}

/// f̃ = Σ_τ h^{|τ|−1} b(τ)/σ(τ) F(τ) over the trees in the support of b.
pub fn modified_vector_field(b: &Functional, field: &VectorField, h: &Q) -> Result<VectorField, StochasticError> {
    let mut out = VectorField::zero(field.dim());
    for (tau, v) in b.support() {
        if tau.is_empty() {
            continue;
        }
        if !tau.is_black_rooted_tree() {
            return Err(StochasticError::Config(format!("{tau} is not a black-rooted tree")));
        }
        let mut c = v / Q::from_integer((tau.sigma() as i64).into());
        for _ in 1..tau.order() {
            c *= h;
        }
        out.add_scaled(&elementary_field(&tau, field)?, &c);
    }
    Ok(out)
}

const WORDS_PER_NORMAL: u128 = 32;

struct Stepper<'a> {
    t: &'a SrkTableau,
    field: Vec<NumExpr>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    d: Vec<f64>,
    d0: f64,
    explicit: bool,
    periodic: bool,
}

impl<'a> Stepper<'a> {
    fn new(t: &'a SrkTableau, field: &'a VectorField) -> Self {
        let f = |x: &Q| crate::series::q_to_f64(x);
        Stepper {
            t,
            field: field.comps().iter().map(Expr::numeric).collect(),
            a: t.a.iter().map(|r| r.iter().map(f).collect()).collect(),
            b: t.b.iter().map(f).collect(),
            d: t.d.iter().map(f).collect(),
            d0: f(&t.d0),
            explicit: t.is_explicit(),
            periodic: field.comps().iter().all(Expr::is_periodic),
        }
    }

    fn eval_f(&self, y: &[f64]) -> Vec<f64> {
        self.field.iter().map(|c| c.eval(y)).collect()
    }

    fn step(&self, x: &mut [f64], xi: &[f64], h: f64) {
        let s = self.t.stages();
        let dim = x.len();
        let sq = h.sqrt();
        let stage = |i: usize, fs: &[Vec<f64>]| -> Vec<f64> {
            (0..dim)
                .map(|k| x[k] + h * (0..s).map(|j| self.a[i][j] * fs[j][k]).sum::<f64>() + sq * self.d[i] * xi[k])
                .collect()
        };
        let mut fs = vec![vec![0.0; dim]; s];
        if self.explicit {
            for i in 0..s {
                let y = stage(i, &fs);
                fs[i] = self.eval_f(&y);
            }
        } else {
            for _ in 0..200 {
                let next: Vec<Vec<f64>> = (0..s).map(|i| self.eval_f(&stage(i, &fs))).collect();
                let diff = next.iter().zip(&fs).flat_map(|(p, q)| p.iter().zip(q).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
                fs = next;
                if diff < 1e-14 {
                    break;
                }
            }
        }
        for k in 0..dim {
            x[k] += h * (0..s).map(|i| self.b[i] * fs[i][k]).sum::<f64>() + sq * self.d0 * xi[k];
            if self.periodic {
                x[k] = x[k].rem_euclid(2.0 * std::f64::consts::PI);
            }
        }
    }
}

/// Ergodic average of φ along `trajectories` independent paths. The noise of
/// step k on path j depends only on (seed, j, k).
pub fn simulate(t: &SrkTableau, field: &VectorField, phi: &Expr, cfg: &SimConfig) -> Result<SimResult, StochasticError> {
    let dim = field.dim();
    if cfg.x0.len() != dim {
        return Err(StochasticError::Config(format!("initial point has {} entries, expected {dim}", cfg.x0.len())));
    }
    if !(cfg.h > 0.0) || cfg.steps == 0 || cfg.trajectories == 0 {
        return Err(StochasticError::Config("need h > 0, steps > 0 and trajectories > 0".into()));
    }
    let stepper = Stepper::new(t, field);
    let phi = phi.numeric();
    let means: Vec<f64> = (0..cfg.trajectories)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(j as u64);
            let mut x = cfg.x0.clone();
            let mut xi = vec![0.0; dim];
            let mut acc = 0.0;
            for k in 0..cfg.burn_in + cfg.steps {
                rng.set_word_pos(k as u128 * WORDS_PER_NORMAL * dim as u128);
                for z in xi.iter_mut() {
                    *z = StandardNormal.sample(&mut rng);
                }
                stepper.step(&mut x, &xi, cfg.h);
                if k >= cfg.burn_in {
                    acc += phi.eval(&x);
                }
            }
            acc / cfg.steps as f64
        })
        .collect();
    let m = means.len() as f64;
    let mean = means.iter().sum::<f64>() / m;
    let var = if means.len() > 1 { means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok(SimResult { mean, std_error: (var / m).sqrt(), samples: cfg.steps * cfg.trajectories })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elemdiff::parse_expr;

    fn cfg(seed: u64) -> SimConfig {
        SimConfig { h: 0.1, steps: 2000, burn_in: 100, trajectories: 8, seed, x0: vec![0.0] }
    }

    #[test]
    fn reproducible_by_seed() {
        let v = parse_expr("sin(x)").unwrap();
        let f = VectorField::gradient(&v, 1).unwrap();
        let phi = parse_expr("cos(x)").unwrap();
        let em = SrkTableau::euler_maruyama();
        let a = simulate(&em, &f, &phi, &cfg(7)).unwrap();
        let b = simulate(&em, &f, &phi, &cfg(7)).unwrap();
        let c = simulate(&em, &f, &phi, &cfg(8)).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn implicit_stage_solves() {
        let v = parse_expr("sin(x)").unwrap();
        let f = VectorField::gradient(&v, 1).unwrap();
        let t = SrkTableau::implicit_euler();
        let s = Stepper::new(&t, &f);
        let mut x = vec![1.0];
        s.step(&mut x, &[0.3], 0.2);
        let fx = -(x[0] as f64).cos();
        let back = (1.0 + 0.2 * fx + 0.2f64.sqrt() * 0.3).rem_euclid(2.0 * std::f64::consts::PI);
        assert!((x[0] - back).abs() < 1e-12);
    }
}
