//! Curvature, gauge transformations and the field equations.
//!
//! Connections enter most functions as plain degree-1 [`Cochain`]s: a
//! gauge-transformed connection is in general not su(2)-valued on the
//! lattice, and the curvature never is.
//!
//! Residual norms on a block are summed over cells with `k_i ≤ N_i - 1`
//! only; at `k_i = N_i` the nested stencils would read halo cells whose own
//! stencil left the stored data.

use crate::algebra::Matrix2;
use crate::calculus::{coboundary, cup, dual, stencil_form};
use crate::cochain::{Cochain, Connection, GaugeField};
use crate::complex4::{DirectionSet, MultiIndex, Topology};
use crate::error::{Error, Result};

/// Margin used for residual norms of depth-two stencils on a block.
pub const BLOCK_MARGIN: i64 = 1;

/// Tolerance of [`is_paired_gauge`].
pub const PAIRING_TOL: f64 = 1e-12;

fn require_degree(f: &Cochain, degree: usize) -> Result<()> {
    if f.degree() != degree {
        return Err(Error::DegreeMismatch {
            expected: degree,
            found: f.degree(),
        });
    }
    Ok(())
}

fn safe_norm(f: &Cochain) -> f64 {
    f.norm_sq_with_margin(BLOCK_MARGIN).sqrt()
}

/// `F = d^c A + A ∪ A`.
pub fn curvature(a: &Cochain) -> Result<Cochain> {
    require_degree(a, 1)?;
    coboundary(a)?.add(&cup(a, a)?)
}

/// `d^c_A Ω = d^c Ω + A ∪ Ω + (-1)^{r+1} Ω ∪ A` for an `r`-form `Ω`.
pub fn covariant_d(a: &Cochain, omega: &Cochain) -> Result<Cochain> {
    require_degree(a, 1)?;
    let r = omega.degree();
    if r > 3 {
        return Err(Error::InvalidDegree(r + 1));
    }
    let left = coboundary(omega)?.add(&cup(a, omega)?)?;
    let right = cup(omega, a)?;
    if r.is_multiple_of(2) {
        left.sub(&right)
    } else {
        left.add(&right)
    }
}

/// Result of a gauge transformation together with how far it strays
/// from su(2).
#[derive(Debug, Clone)]
pub struct GaugeTransformed {
    pub field: Cochain,
    /// Largest su(2) predicate defect over all coefficients.
    pub su2_deviation: f64,
}

fn inverse_form(h: &Cochain) -> Result<Cochain> {
    let mut out = h.clone();
    for m in out.values_mut() {
        *m = m.inverse().ok_or(Error::SingularGauge)?;
    }
    Ok(out)
}

/// `A' = h ∪ d^c h⁻¹ + h ∪ A ∪ h⁻¹`, componentwise
/// `A'^i_k = h_k (h⁻¹_{τ_i k} - h⁻¹_k) + h_k A^i_k h⁻¹_{τ_i k}`.
pub fn gauge_transform(a: &Cochain, h: &GaugeField) -> Result<GaugeTransformed> {
    require_degree(a, 1)?;
    if a.domain() != h.domain() {
        return Err(Error::DomainMismatch);
    }
    let hinv = inverse_form(h)?;
    let field = stencil_form(a, 1, a.copy_flag(), |chart, k, p| {
        let axis = p.axes().next().expect("degree-1 set");
        let hk = h.get(chart, k, DirectionSet::EMPTY)?;
        let hinv_k = hinv.get(chart, k, DirectionSet::EMPTY)?;
        let hinv_fwd = hinv.get(chart, k.shift(axis, 1), DirectionSet::EMPTY)?;
        let ak = a.get(chart, k, p)?;
        Ok(hk * (hinv_fwd - hinv_k) + hk * ak * hinv_fwd)
    })?;
    let su2_deviation = field.max_su2_algebra_defect();
    Ok(GaugeTransformed { field, su2_deviation })
}

/// [`gauge_transform`] that insists on an su(2)-valued result.
pub fn gauge_transform_connection(a: &Connection, h: &GaugeField) -> Result<Connection> {
    let t = gauge_transform(a, h)?;
    if t.su2_deviation > crate::algebra::PREDICATE_TOL {
        return Err(Error::NotSu2Algebra {
            max_deviation: t.su2_deviation,
        });
    }
    Connection::new(t.field)
}

/// `h ∪ f ∪ h⁻¹`, componentwise `h_k f^P_k h⁻¹_{k+𝟙_P}`.
pub fn conjugate_form(f: &Cochain, h: &GaugeField) -> Result<Cochain> {
    let hinv = inverse_form(h)?;
    cup(&cup(h, f)?, &hinv)
}

/// The covariant Bianchi form `d^c_A F = d^c F + A ∪ F - F ∪ A`,
/// which vanishes identically.
pub fn bianchi_form(a: &Cochain) -> Result<Cochain> {
    let f = curvature(a)?;
    covariant_d(a, &f)
}

/// Norm of [`bianchi_form`].
pub fn bianchi_residual(a: &Cochain) -> Result<f64> {
    Ok(safe_norm(&bianchi_form(a)?))
}

/// Yang–Mills residual `d^c_A ι̃∗F = d^c ι̃∗F + A ∪ ι̃∗F - ι̃∗F ∪ A`.
pub fn ym_residual(a: &Cochain) -> Result<Cochain> {
    let f = curvature(a)?;
    covariant_d(a, &dual(&f))
}

pub fn ym_residual_norm(a: &Cochain) -> Result<f64> {
    Ok(safe_norm(&ym_residual(a)?))
}

const COMPLEMENTARY_PAIRS: [([usize; 2], [usize; 2]); 3] = [([1, 2], [3, 4]), ([1, 3], [2, 4]), ([1, 4], [2, 3])];

/// Largest `‖h_{τ_ab k} - h_{τ_cd k}‖` over the three pairings and all
/// in-range `k` (on a block, those whose shifted sites are stored).
pub fn gauge_pairing_defect(h: &GaugeField) -> Result<f64> {
    let d = h.domain();
    let mut worst: f64 = 0.0;
    for (chart, k) in d.interior_sites() {
        for (lhs, rhs) in COMPLEMENTARY_PAIRS {
            let shift = |axes: [usize; 2]| -> MultiIndex { k.shift(axes[0], 1).shift(axes[1], 1) };
            let pair = h
                .get(chart, shift(lhs), DirectionSet::EMPTY)
                .and_then(|a| Ok((a, h.get(chart, shift(rhs), DirectionSet::EMPTY)?)));
            match pair {
                Ok((a, b)) => worst = worst.max((a - b).max_abs()),
                Err(Error::OutOfDomain { .. }) if d.topology() == Topology::Block => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(worst)
}

/// Whether `h` lies in the subgroup under which the Yang–Mills equation
/// is gauge invariant.
pub fn is_paired_gauge(h: &GaugeField) -> Result<bool> {
    Ok(gauge_pairing_defect(h)? <= PAIRING_TOL)
}

/// `‖ι̃∗(h ∪ f) - h ∪ ι̃∗f‖`; zero for every `h` and `f`.
pub fn left_gauge_dual_defect(h: &GaugeField, f: &Cochain) -> Result<f64> {
    let lhs = dual(&cup(h, f)?);
    let rhs = cup(h, &dual(f))?;
    Ok(safe_norm(&lhs.sub(&rhs)?))
}

/// `‖ι̃∗(f ∪ h) - ι̃∗f ∪ h‖` for a 2-form `f`; zero iff `h` passes [`is_paired_gauge`].
pub fn right_gauge_dual_defect(h: &GaugeField, f: &Cochain) -> Result<f64> {
    require_degree(f, 2)?;
    let lhs = dual(&cup(f, h)?);
    let rhs = cup(&dual(f), h)?;
    Ok(safe_norm(&lhs.sub(&rhs)?))
}

pub fn self_dual_part(f: &Cochain) -> Result<Cochain> {
    require_degree(f, 2)?;
    Ok(f.add(&dual(f))?.scale(0.5))
}

pub fn anti_self_dual_part(f: &Cochain) -> Result<Cochain> {
    require_degree(f, 2)?;
    Ok(f.sub(&dual(f))?.scale(0.5))
}

/// `‖F - ι̃∗F‖`.
pub fn sd_residual(f: &Cochain) -> Result<f64> {
    require_degree(f, 2)?;
    Ok(f.sub(&dual(f))?.interior_norm_sq().sqrt())
}

/// `‖F + ι̃∗F‖`.
pub fn asd_residual(f: &Cochain) -> Result<f64> {
    require_degree(f, 2)?;
    Ok(f.add(&dual(f))?.interior_norm_sq().sqrt())
}

/// Whether the self-dual or the anti-self-dual equations are meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Duality {
    SelfDual,
    AntiSelfDual,
}

/// Defects of the three componentwise equations
/// `F^{12} = ±F^{34}`, `F^{13} = ∓F^{24}`, `F^{14} = ±F^{23}`,
/// each as `sqrt(Σ_k ‖lhs - rhs‖²)` over in-range cells.
pub fn sd_component_defects(f: &Cochain, duality: Duality) -> Result<[f64; 3]> {
    require_degree(f, 2)?;
    let s = match duality {
        Duality::SelfDual => 1.0,
        Duality::AntiSelfDual => -1.0,
    };
    let set = DirectionSet::from_axes;
    let eqs: [(DirectionSet, DirectionSet, f64); 3] = [
        (set(&[1, 2]), set(&[3, 4]), s),
        (set(&[1, 3]), set(&[2, 4]), -s),
        (set(&[1, 4]), set(&[2, 3]), s),
    ];
    let d = f.domain();
    let mut out = [0.0; 3];
    for (chart, k) in d.interior_sites() {
        for (slot, (lhs, rhs, sign)) in out.iter_mut().zip(eqs) {
            let diff: Matrix2 = f.get(chart, k, lhs)? - f.get(chart, k, rhs)?.scale(sign);
            *slot += diff.frobenius_sq();
        }
    }
    Ok(out.map(f64::sqrt))
}
