//! Thin wrapper around argmin's Nelder–Mead simplex search.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

struct Objective<'a, F: Fn(&[f64]) -> f64> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.f)(p))
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
}

/// Minimizes `f` from an axis-aligned simplex of edge `step` around `x0`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], step: f64, max_iters: u64, sd_tol: f64) -> Result<Minimum> {
    let mut simplex = vec![x0.to_vec()];
    for k in 0..x0.len() {
        let mut v = x0.to_vec();
        v[k] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(sd_tol)
        .map_err(|e| Error::NonConvergence(e.to_string()))?;
    let res = Executor::new(Objective { f }, solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(|e| Error::NonConvergence(e.to_string()))?;
    let st = res.state();
    let x = st
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::NonConvergence("simplex search produced no point".into()))?;
    Ok(Minimum {
        value: st.get_best_cost(),
        iterations: st.get_iter(),
        x,
    })
}
