//! Gradient descent on the Yang–Mills action and on the (anti-)self-dual
//! residual.
//!
//! Free variables are the real λ-coordinates `a^{i,α}_k` of every stored
//! coefficient of a connection, `A^i_k = Σ_α a^{i,α}_k λ_α`, in storage order.
//! Iterates are rebuilt from coordinates, so they stay exactly su(2)-valued.
//!
//! For an objective `‖R‖²` with `R` linear in `F`, the derivative in a
//! direction `B` is `2 Re (L_A(B), Γ)` where `L_A(B) = d^c B + B ∪ A + A ∪ B`
//! and `Γ` is the cotangent: `Γ = F` for the action and `Γ = 2R` for
//! `R = F ∓ ι̃∗F`. The gradient is accumulated in one sweep over the curvature
//! components by transposing each term of
//! `F^{ij}_k = A^j_{k+e_i} - A^j_k - A^i_{k+e_j} + A^i_k + A^i_k A^j_{k+e_i} - A^j_k A^i_{k+e_j}`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix2, Su2Vector};
use crate::calculus::dual;
use crate::cochain::{Cochain, Connection};
use crate::complex4::DirectionSet;
use crate::error::{Error, Result};
use crate::gauge::{bianchi_residual, curvature, sd_component_defects, sd_residual, ym_residual_norm, Duality};

/// Quantity minimized by [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `S = ‖F‖²`.
    Action,
    /// `‖F - ι̃∗F‖²`.
    SdResidual,
    /// `‖F + ι̃∗F‖²`.
    AsdResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once the max-norm of the gradient is at most this.
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub initial_step: f64,
    pub objective: Objective,
    /// Selects the coordinates probed by the finite-difference check.
    pub seed: u64,
    /// Number of coordinates probed by the finite-difference check at the
    /// first and last iterate; 0 disables the check.
    pub gradient_check_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            grad_tol: 1e-6,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            initial_step: 1.0,
            objective: Objective::Action,
            seed: 0,
            gradient_check_samples: 32,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            ));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial_step must be positive, got {}", self.initial_step));
        }
        if !(self.grad_tol >= 0.0 && self.grad_tol.is_finite()) {
            return bad(format!("grad_tol must be non-negative, got {}", self.grad_tol));
        }
        Ok(())
    }
}

/// Step size below which a line search is abandoned.
const MIN_STEP: f64 = 1e-30;

/// Finite-difference step of the gradient check.
pub const FD_STEP: f64 = 1e-4;

/// `S = ‖F‖²`.
pub fn action(a: &Cochain) -> Result<f64> {
    Ok(curvature(a)?.interior_norm_sq())
}

fn residual_form(f: &Cochain, objective: Objective) -> Result<Cochain> {
    match objective {
        Objective::Action => Ok(f.clone()),
        Objective::SdResidual => f.sub(&dual(f)),
        Objective::AsdResidual => f.add(&dual(f)),
    }
}

pub fn objective_value(a: &Cochain, objective: Objective) -> Result<f64> {
    let f = curvature(a)?;
    Ok(residual_form(&f, objective)?.interior_norm_sq())
}

/// Gradient with respect to the λ-coordinates of `a` for a curvature
/// cotangent `gamma`: entry `(site, axis)` is `2 Re tr(λ_α C)` where `C`
/// collects the transposed stencil terms.
pub fn gradient_from_cotangent(a: &Cochain, gamma: &Cochain) -> Result<Vec<Su2Vector>> {
    let d = *a.domain();
    let mut acc = vec![Matrix2::zero(); a.values().len()];
    let slot = |site: usize, axis: usize| site * 4 + (axis - 1);
    let e = DirectionSet::single;
    for (chart, k) in d.interior_sites() {
        let here = d.locate(chart, k)?;
        for &p in DirectionSet::of_degree(2) {
            let mut axes = p.axes();
            let (i, j) = (axes.next().expect("two axes"), axes.next().expect("two axes"));
            let gd = gamma.at(here, p).conj_transpose();
            let ki = d.locate(chart, k.shift(i, 1))?;
            let kj = d.locate(chart, k.shift(j, 1))?;
            let ai_k = a.at(here, e(i));
            let aj_k = a.at(here, e(j));
            let ai_kj = a.at(kj, e(i));
            let aj_ki = a.at(ki, e(j));
            acc[slot(ki, j)] += gd + gd * ai_k;
            acc[slot(here, j)] -= gd + ai_kj * gd;
            acc[slot(kj, i)] -= gd + gd * aj_k;
            acc[slot(here, i)] += gd + aj_ki * gd;
        }
    }
    Ok(acc
        .iter()
        .map(|c| {
            Su2Vector(std::array::from_fn(|alpha| {
                2.0 * (Matrix2::lambda(alpha + 1) * *c).trace().re
            }))
        })
        .collect())
}

/// Objective value and its gradient in one evaluation.
pub fn objective_and_gradient(a: &Cochain, objective: Objective) -> Result<(f64, Vec<Su2Vector>)> {
    let f = curvature(a)?;
    let r = residual_form(&f, objective)?;
    let value = r.interior_norm_sq();
    let gamma = match objective {
        Objective::Action => r,
        _ => r.scale(2.0),
    };
    Ok((value, gradient_from_cotangent(a, &gamma)?))
}

pub fn action_gradient(a: &Cochain) -> Result<Vec<Su2Vector>> {
    Ok(objective_and_gradient(a, Objective::Action)?.1)
}

/// Largest Euclidean length of a gradient entry; invariant under the
/// rotation of λ-coordinates induced by a constant gauge.
pub fn max_norm(g: &[Su2Vector]) -> f64 {
    g.iter().map(Su2Vector::norm).fold(0.0, f64::max)
}

fn l2_norm(g: &[Su2Vector]) -> f64 {
    g.iter().map(Su2Vector::norm_sq).sum::<f64>().sqrt()
}

/// Central finite-difference check of the gradient on `samples` coordinates
/// chosen by `seed` (all coordinates if `samples` exceeds their number).
///
/// Returns `max |g - g_fd| / max(max |g_fd|, 1)` over the probed coordinates.
pub fn gradient_check(a: &Connection, objective: Objective, samples: usize, seed: u64) -> Result<f64> {
    let d = *a.domain();
    let base = a.coords();
    let n = base.len() * 3;
    let (_, grad) = objective_and_gradient(a, objective)?;
    let picks: Vec<usize> = if samples >= n {
        (0..n).collect()
    } else {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut v = sample(&mut rng, n, samples).into_vec();
        v.sort_unstable();
        v
    };
    let mut worst_diff: f64 = 0.0;
    let mut scale: f64 = 1.0;
    let mut coords = base.clone();
    for idx in picks {
        let (c, alpha) = (idx / 3, idx % 3);
        let orig = base[c].0[alpha];
        coords[c].0[alpha] = orig + FD_STEP;
        let plus = objective_value(&*Connection::from_coords(d, &coords)?, objective)?;
        coords[c].0[alpha] = orig - FD_STEP;
        let minus = objective_value(&*Connection::from_coords(d, &coords)?, objective)?;
        coords[c].0[alpha] = orig;
        let fd = (plus - minus) / (2.0 * FD_STEP);
        scale = scale.max(fd.abs());
        worst_diff = worst_diff.max((fd - grad[c].0[alpha]).abs());
    }
    Ok(worst_diff / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    pub objective: f64,
    pub grad_max: f64,
    /// Euclidean norm of the full gradient vector.
    pub grad_norm: f64,
    /// Accepted step leading to this iterate; 0 for the starting point.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub action: f64,
    pub ym_residual_norm: f64,
    pub sd_residual: f64,
    pub bianchi_defect: f64,
    pub max_su2_deviation: f64,
}

impl Diagnostics {
    pub fn of(a: &Cochain) -> Result<Self> {
        let f = curvature(a)?;
        Ok(Self {
            action: f.interior_norm_sq(),
            ym_residual_norm: ym_residual_norm(a)?,
            sd_residual: sd_residual(&f)?,
            bianchi_defect: bianchi_residual(a)?,
            max_su2_deviation: a.max_su2_algebra_defect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIters,
    /// The line search found no acceptable step.
    Stalled,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub trace: Vec<TraceEntry>,
    pub stop: StopReason,
    pub connection: Connection,
    pub diagnostics: Diagnostics,
    /// Finite-difference gradient check at the first and last iterate.
    pub gradient_check: Option<[f64; 2]>,
    /// Componentwise defects of the (anti-)self-dual equations at the last
    /// iterate; set by [`solve_self_dual`].
    pub component_defects: Option<[f64; 3]>,
}

impl SolverReport {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |t| t.iter)
    }
}

fn finite_or_abort(x: f64, iteration: usize) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite { iteration })
    }
}

/// Gradient descent with Armijo backtracking. An accepted step `t`
/// satisfies `f(x - t g) ≤ f(x) - c t ‖g‖²`, so objective values along the
/// trace never increase.
pub fn minimize(a0: &Connection, cfg: &SolverConfig) -> Result<SolverReport> {
    cfg.validate()?;
    let d = *a0.domain();
    let mut coords = a0.coords();
    let mut current = Connection::from_coords(d, &coords)?;
    let (mut value, mut grad) = objective_and_gradient(&current, cfg.objective)?;
    finite_or_abort(value, 0)?;
    let mut trace = vec![TraceEntry {
        iter: 0,
        objective: value,
        grad_max: max_norm(&grad),
        grad_norm: l2_norm(&grad),
        step: 0.0,
    }];
    let first_check = match cfg.gradient_check_samples {
        0 => None,
        n => Some(gradient_check(&current, cfg.objective, n, cfg.seed)?),
    };

    let mut stop = StopReason::MaxIters;
    for iter in 1..=cfg.max_iters + 1 {
        let grad_max = trace.last().expect("non-empty").grad_max;
        if !grad_max.is_finite() {
            return Err(Error::NonFinite { iteration: iter - 1 });
        }
        if grad_max <= cfg.grad_tol {
            stop = StopReason::Converged;
            break;
        }
        if iter > cfg.max_iters {
            break;
        }
        let g_sq = trace.last().expect("non-empty").grad_norm.powi(2);
        let mut step = cfg.initial_step;
        let accepted = loop {
            let trial: Vec<Su2Vector> = coords.iter().zip(&grad).map(|(x, g)| x.axpy(-step, g)).collect();
            let candidate = Connection::from_coords(d, &trial)?;
            let trial_value = objective_value(&candidate, cfg.objective)?;
            if trial_value.is_finite() && trial_value <= value - cfg.armijo_c * step * g_sq {
                break Some((trial, candidate, trial_value));
            }
            step *= cfg.backtrack_factor;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((trial, candidate, trial_value)) = accepted else {
            stop = StopReason::Stalled;
            break;
        };
        coords = trial;
        current = candidate;
        let (v, g) = objective_and_gradient(&current, cfg.objective)?;
        debug_assert_eq!(v.to_bits(), trial_value.to_bits());
        value = finite_or_abort(v, iter)?;
        grad = g;
        trace.push(TraceEntry {
            iter,
            objective: value,
            grad_max: max_norm(&grad),
            grad_norm: l2_norm(&grad),
            step,
        });
    }

    let last_check = match cfg.gradient_check_samples {
        0 => None,
        n => Some(gradient_check(&current, cfg.objective, n, cfg.seed)?),
    };
    Ok(SolverReport {
        trace,
        stop,
        diagnostics: Diagnostics::of(&current)?,
        gradient_check: first_check.zip(last_check).map(|(a, b)| [a, b]),
        component_defects: None,
        connection: current,
    })
}

/// [`minimize`] on `‖F ∓ ι̃∗F‖²`, reporting the three componentwise defects.
/// A configured [`Objective::Action`] is replaced by the self-dual residual.
pub fn solve_self_dual(a0: &Connection, cfg: &SolverConfig) -> Result<SolverReport> {
    let mut cfg = cfg.clone();
    let duality = match cfg.objective {
        Objective::AsdResidual => Duality::AntiSelfDual,
        _ => {
            cfg.objective = Objective::SdResidual;
            Duality::SelfDual
        }
    };
    let mut report = minimize(a0, &cfg)?;
    let f = curvature(&report.connection)?;
    report.component_defects = Some(sd_component_defects(&f, duality)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::exp_su2;
    use crate::cochain::{random_connection, GaugeField};
    use crate::complex4::Domain;
    use crate::gauge::gauge_transform_connection;

    fn sphere2() -> Domain {
        Domain::sphere([2, 2, 2, 2]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig {
                armijo_c: 0.0,
                ..Default::default()
            },
            SolverConfig {
                armijo_c: 1.0,
                ..Default::default()
            },
            SolverConfig {
                backtrack_factor: 1.0,
                ..Default::default()
            },
            SolverConfig {
                initial_step: -1.0,
                ..Default::default()
            },
            SolverConfig {
                grad_tol: f64::NAN,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn zero_connection_has_zero_action_and_gradient() {
        let a = Connection::zero(sphere2());
        assert_eq!(action(&a).unwrap(), 0.0);
        assert_eq!(max_norm(&action_gradient(&a).unwrap()), 0.0);
    }

    #[test]
    fn commuting_constant_connection_is_flat() {
        let a = Connection::from_su2_fn(sphere2(), |_, _, axis| Su2Vector::new(0.0, 0.0, 0.1 * axis as f64));
        assert!(action(&a).unwrap() < 1e-28);
    }

    #[test]
    fn action_matches_componentwise_sum() {
        let d = sphere2();
        let a = random_connection(d, 1.0, 5).unwrap();
        let f = curvature(&a).unwrap();
        let mut brute = 0.0;
        for (chart, k) in d.interior_sites() {
            for &p in DirectionSet::of_degree(2) {
                let m = f.get(chart, k, p).unwrap();
                let t = (m * m.conj_transpose()).trace();
                assert!(t.im.abs() < 1e-14);
                brute += t.re;
            }
        }
        assert!((action(&a).unwrap() - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for (domain, seed, samples) in [
            (sphere2(), 1, usize::MAX),
            (Domain::block([2, 2, 2, 2]).unwrap(), 2, 400),
        ] {
            let a = random_connection(domain, 1.0, seed).unwrap();
            for obj in [Objective::Action, Objective::SdResidual, Objective::AsdResidual] {
                let err = gradient_check(&a, obj, samples, 0).unwrap();
                assert!(err < 1e-6, "{obj:?}: {err}");
            }
        }
    }

    #[test]
    fn gradient_is_invariant_under_constant_gauge() {
        let d = sphere2();
        let a = random_connection(d, 0.5, 9).unwrap();
        let h0 = exp_su2(Su2Vector::new(0.4, -1.1, 2.0));
        let h =
            GaugeField::new(Cochain::from_fn(d, 0, crate::complex4::CopyFlag::Base, |_, _, _| h0).unwrap()).unwrap();
        let a2 = gauge_transform_connection(&a, &h).unwrap();
        let g1 = max_norm(&action_gradient(&a).unwrap());
        let g2 = max_norm(&action_gradient(&a2).unwrap());
        assert!((g1 - g2).abs() <= 1e-9 * g1);
        assert!((action(&a).unwrap() - action(&a2).unwrap()).abs() <= 1e-12 * action(&a).unwrap());
    }

    #[test]
    fn zero_start_converges_immediately() {
        let r = minimize(&Connection::zero(sphere2()), &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.iterations(), 0);
        let r = solve_self_dual(&Connection::zero(sphere2()), &SolverConfig::default()).unwrap();
        assert!(r.converged());
        assert_eq!(r.component_defects, Some([0.0; 3]));
    }

    #[test]
    fn descent_is_monotone_and_su2() {
        let d = sphere2();
        let a0 = random_connection(d, 0.1, 7).unwrap();
        let cfg = SolverConfig {
            max_iters: 50,
            ..Default::default()
        };
        let r = minimize(&a0, &cfg).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
        assert!(r.trace.last().unwrap().objective < r.trace[0].objective);
        assert!(r.diagnostics.max_su2_deviation <= 1e-12);
        let [first, last] = r.gradient_check.unwrap();
        assert!(first < 1e-6 && last < 1e-6, "{first} {last}");
    }

    #[test]
    fn invalid_config_is_rejected_before_work() {
        let cfg = SolverConfig {
            backtrack_factor: 2.0,
            ..Default::default()
        };
        assert!(minimize(&Connection::zero(sphere2()), &cfg).is_err());
    }

    #[test]
    fn objective_serde_names() {
        assert_eq!(
            serde_json::to_string(&Objective::SdResidual).unwrap(),
            "\"sd_residual\""
        );
        let cfg: SolverConfig = serde_json::from_str(r#"{"objective":"action","max_iters":3}"#).unwrap();
        assert_eq!(cfg.max_iters, 3);
        assert_eq!(cfg.armijo_c, 1e-4);
    }
}
