//! The invariant suite run by `verify`.
//!
//! Every check draws its inputs from seeds derived from the run seed, so a
//! report is a pure function of the configuration. Defects are relative to
//! the size of the quantities compared unless noted. On a block, residual
//! norms skip the last layer of cells (see `gauge::BLOCK_MARGIN`).

use ymlattice_core::calculus::{
    coboundary, codifferential, cup, dual, green_boundary_term, inner_product, itilde, star,
};
use ymlattice_core::complex4::{boundary_cell, perm_sign};
use ymlattice_core::gauge::{
    anti_self_dual_part, bianchi_form, conjugate_form, gauge_pairing_defect, gauge_transform, is_paired_gauge,
    left_gauge_dual_defect, right_gauge_dual_defect, self_dual_part, ym_residual_norm, BLOCK_MARGIN,
};
use ymlattice_core::solver::{gradient_check, Objective};
use ymlattice_core::{
    curvature, random_connection, random_form, random_gauge, Cell, Chart, Cochain, Connection, CopyFlag, DirectionSet,
    Domain, GaugeField, MultiIndex, Result,
};

use crate::report::{Check, Expectation};

/// Random inputs per check.
pub const SAMPLES: u64 = 4;

pub const TOL_STAR: f64 = 1e-12;
pub const TOL_LEIBNIZ: f64 = 1e-10;
pub const TOL_GREEN: f64 = 1e-10;
pub const TOL_CURVATURE: f64 = 1e-13;
pub const TOL_BIANCHI: f64 = 1e-12;
pub const TOL_GAUGE: f64 = 1e-9;
pub const TOL_GAUGE_DUAL: f64 = 1e-12;
pub const TOL_DUALITY: f64 = 1e-10;
pub const TOL_GRADIENT: f64 = 1e-6;

/// Coordinates probed by the finite-difference gradient check.
pub const GRADIENT_SAMPLES: usize = 48;

fn sub_seed(seed: u64, tag: u64, i: u64) -> u64 {
    seed.wrapping_mul(0x0100_0000_01b3)
        .wrapping_add(tag << 32)
        .wrapping_add(i)
}

fn norm(f: &Cochain) -> f64 {
    f.norm_sq_with_margin(BLOCK_MARGIN).sqrt()
}

fn rel(defect: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

fn form(d: Domain, degree: usize, seed: u64) -> Result<Cochain> {
    random_form(d, degree, CopyFlag::Base, seed)
}

/// `∗∗ = (-1)^{r(4-r)}` on random forms of every degree.
pub fn star_star(d: Domain, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for r in 0..=4 {
        for i in 0..SAMPLES {
            let f = form(d, r, sub_seed(seed, 1, 10 * r as u64 + i))?;
            let sign = if r * (4 - r) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max(star(&star(&f)).sub(&f.scale(sign))?.interior_max_abs());
        }
    }
    Ok(Check::hold("star_star", worst, TOL_STAR))
}

/// Number of nonzero coefficients in `∂∂c` over every cell of the domain.
pub fn boundary_squared(d: Domain) -> Result<Check> {
    let mut bad = 0usize;
    for (chart, k) in d.interior_sites() {
        for dirs in DirectionSet::all() {
            for copy in [CopyFlag::Base, CopyFlag::Tilde] {
                let cell = Cell::new(chart, k, dirs, copy);
                let dd = boundary_cell(&d, &cell)?.boundary(&d)?;
                bad += dd.len();
            }
        }
    }
    Ok(Check::hold("boundary_squared", bad as f64, 0.0))
}

/// The coboundary pairs with the boundary of `ε^{24}_k` as
/// `⟨∂ε^{24}_k, φ⟩ = φ^4_{τ_2 k} - φ^4_k - φ^2_{τ_4 k} + φ^2_k`.
pub fn boundary_example(d: Domain, seed: u64) -> Result<Check> {
    let phi = form(d, 1, sub_seed(seed, 2, 0))?;
    let k = MultiIndex::new(1, 1, 1, 1);
    let chain = boundary_cell(&d, &Cell::base(Chart::V, k, DirectionSet::from_axes(&[2, 4])))?;
    let got = ymlattice_core::calculus::pair(&chain, &phi)?;
    let at = |axis: usize, site: MultiIndex| phi.get(Chart::V, site, DirectionSet::single(axis));
    let want = at(4, k.shift(2, 1))? - at(4, k)? - at(2, k.shift(4, 1))? + at(2, k)?;
    Ok(Check::hold("boundary_eps24", (got - want).max_abs(), 1e-15))
}

pub fn perm_signs() -> Check {
    let bad = DirectionSet::all()
        .filter(|&p| {
            let q = p.degree() * (4 - p.degree());
            let want = if q % 2 == 0 { 1 } else { -1 };
            perm_sign(p) * perm_sign(p.complement()) != want
        })
        .count();
    Check::hold("perm_sign_products", bad as f64, 0.0)
}

pub fn coboundary_squared(d: Domain, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in 0..=2 {
        let f = form(d, p, sub_seed(seed, 3, p as u64))?;
        let dd = coboundary(&coboundary(&f)?)?;
        worst = worst.max(rel(norm(&dd), norm(&f)));
    }
    Ok(Check::hold("coboundary_squared", worst, TOL_LEIBNIZ))
}

pub fn itilde_commutation(d: Domain, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in 0..=2 {
        let f = form(d, p, sub_seed(seed, 4, p as u64))?;
        let g = form(d, 1, sub_seed(seed, 4, 10 + p as u64))?;
        worst = worst.max(itilde(&star(&f)).sub(&star(&itilde(&f)))?.interior_max_abs());
        worst = worst.max(
            itilde(&coboundary(&f)?)
                .sub(&coboundary(&itilde(&f))?)?
                .interior_max_abs(),
        );
        worst = worst.max(
            itilde(&cup(&f, &g)?)
                .sub(&cup(&itilde(&f), &itilde(&g))?)?
                .interior_max_abs(),
        );
    }
    Ok(Check::hold("itilde_commutation", worst, 0.0))
}

pub fn leibniz(d: Domain, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in 0..=3 {
        for q in 0..=(3 - p) {
            for i in 0..SAMPLES {
                let f = form(d, p, sub_seed(seed, 5, 100 * p as u64 + 10 * q as u64 + i))?;
                let g = form(d, q, sub_seed(seed, 6, 100 * p as u64 + 10 * q as u64 + i))?;
                let lhs = coboundary(&cup(&f, &g)?)?;
                let a = cup(&coboundary(&f)?, &g)?;
                let b = cup(&f, &coboundary(&g)?)?;
                let rhs = if p % 2 == 0 { a.add(&b)? } else { a.sub(&b)? };
                worst = worst.max(rel(norm(&lhs.sub(&rhs)?), norm(&lhs)));
            }
        }
    }
    Ok(Check::hold("leibniz", worst, TOL_LEIBNIZ))
}

/// `(d^c φ, ω) - (φ, δ^c ω)` against the assembled boundary term.
pub fn green_formula(d: Domain, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in 1..=4 {
        for i in 0..SAMPLES {
            let phi = form(d, p - 1, sub_seed(seed, 7, 10 * p as u64 + i))?;
            let omega = form(d, p, sub_seed(seed, 8, 10 * p as u64 + i))?;
            let lhs = inner_product(&coboundary(&phi)?, &omega)?;
            let rhs = inner_product(&phi, &codifferential(&omega)?)?;
            let b = green_boundary_term(&phi, &omega)?;
            worst = worst.max(rel((lhs - rhs - b).norm(), lhs.norm() + rhs.norm()));
        }
    }
    Ok(Check::hold("green_formula", worst, TOL_GREEN))
}

/// Largest `|B| / (|(d^c φ, ω)| + |(φ, δ^c ω)|)` over random pairs.
pub fn green_boundary_magnitude(d: Domain, seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in 1..=4 {
        let phi = form(d, p - 1, sub_seed(seed, 9, p as u64))?;
        let omega = form(d, p, sub_seed(seed, 10, p as u64))?;
        let lhs = inner_product(&coboundary(&phi)?, &omega)?;
        let rhs = inner_product(&phi, &codifferential(&omega)?)?;
        worst = worst.max(rel(green_boundary_term(&phi, &omega)?.norm(), lhs.norm() + rhs.norm()));
    }
    Ok(worst)
}

/// Assembled curvature against its componentwise expansion.
pub fn curvature_components(a: &Cochain) -> Result<Check> {
    let d = *a.domain();
    let f = curvature(a)?;
    let mut worst: f64 = 0.0;
    for (chart, k) in d.interior_sites() {
        for &p in DirectionSet::of_degree(2) {
            let mut axes = p.axes();
            let (i, j) = (axes.next().unwrap(), axes.next().unwrap());
            let at = |axis: usize, site: MultiIndex| a.get(chart, site, DirectionSet::single(axis));
            let (ti, tj) = (k.shift(i, 1), k.shift(j, 1));
            let direct =
                (at(j, ti)? - at(j, k)?) - (at(i, tj)? - at(i, k)?) + at(i, k)? * at(j, ti)? - at(j, k)? * at(i, tj)?;
            worst = worst.max((f.get(chart, k, p)? - direct).max_abs());
        }
    }
    Ok(Check::hold("curvature_components", worst, TOL_CURVATURE))
}

/// `‖d^c F + A ∪ F - F ∪ A‖ / (1 + ‖A‖³)`.
pub fn bianchi(a: &Cochain) -> Result<Check> {
    let defect = norm(&bianchi_form(a)?) / (1.0 + norm(a).powi(3));
    Ok(Check::hold("bianchi", defect, TOL_BIANCHI))
}

/// Curvature of the transformed connection against `h ∪ F ∪ h⁻¹`.
pub fn gauge_covariance(a: &Cochain, h: &GaugeField) -> Result<Check> {
    let lhs = curvature(&gauge_transform(a, h)?.field)?;
    let rhs = conjugate_form(&curvature(a)?, h)?;
    let defect = rel(norm(&lhs.sub(&rhs)?), norm(&rhs));
    Ok(Check::hold("gauge_covariance", defect, TOL_GAUGE))
}

/// Relative change of the Yang–Mills residual norm under `h`; only claimed
/// for gauges satisfying the pairing conditions.
pub fn ym_gauge_invariance(a: &Cochain, h: &GaugeField) -> Result<Check> {
    let before = ym_residual_norm(a)?;
    let after = ym_residual_norm(&gauge_transform(a, h)?.field)?;
    let expectation = if is_paired_gauge(h)? {
        Expectation::Hold
    } else {
        Expectation::Record
    };
    Ok(Check::new(
        "ym_gauge_invariance",
        rel((before - after).abs(), before),
        TOL_GAUGE,
        expectation,
    ))
}

pub fn left_gauge_dual(d: Domain, h: &GaugeField, seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in 0..=4 {
        let f = form(d, p, sub_seed(seed, 11, p as u64))?;
        worst = worst.max(rel(left_gauge_dual_defect(h, &f)?, norm(&f)));
    }
    Ok(Check::hold("left_gauge_dual", worst, TOL_GAUGE_DUAL))
}

/// Right multiplication against the dual; expected to fail for gauges that
/// violate the pairing conditions.
pub fn right_gauge_dual(name: &str, d: Domain, h: &GaugeField, seed: u64) -> Result<Check> {
    let f = form(d, 2, sub_seed(seed, 12, 0))?;
    let defect = rel(right_gauge_dual_defect(h, &f)?, norm(&f));
    let expectation = if is_paired_gauge(h)? {
        Expectation::Hold
    } else {
        Expectation::Violate
    };
    Ok(Check::new(name, defect, TOL_GAUGE_DUAL, expectation))
}

/// Self-dual and anti-self-dual parts: eigenforms of the dual, orthogonal,
/// and splitting the action.
pub fn self_duality(a: &Cochain) -> Result<Check> {
    let f = curvature(a)?;
    let fp = self_dual_part(&f)?;
    let fm = anti_self_dual_part(&f)?;
    let s = f.interior_norm_sq();
    let scale = if s > 0.0 { s } else { 1.0 };
    let defects = [
        dual(&fp).sub(&fp)?.interior_norm_sq().sqrt() / scale.sqrt(),
        dual(&fm).add(&fm)?.interior_norm_sq().sqrt() / scale.sqrt(),
        inner_product(&fp, &fm)?.norm() / scale,
        (s - fp.interior_norm_sq() - fm.interior_norm_sq()).abs() / scale,
    ];
    Ok(Check::hold(
        "self_duality_split",
        defects.into_iter().fold(0.0, f64::max),
        TOL_DUALITY,
    ))
}

pub fn action_gradient(a: &Connection, seed: u64) -> Result<Check> {
    let defect = gradient_check(a, Objective::Action, GRADIENT_SAMPLES, seed)?;
    Ok(Check::hold("action_gradient", defect, TOL_GRADIENT))
}

/// Named scalar values reported next to the checks.
pub type Scalars = Vec<(String, f64)>;

/// Runs the suite on the configured connection and gauge plus seeded
/// random inputs. Returns the checks and named scalars.
pub fn run(d: Domain, a: &Connection, h: &GaugeField, seed: u64) -> Result<(Vec<Check>, Scalars)> {
    let counterexample_gauge = random_gauge(d, sub_seed(seed, 13, 0));
    let probe = random_connection(d, 1.0, sub_seed(seed, 14, 0))?;
    let mut checks = vec![
        star_star(d, seed)?,
        perm_signs(),
        boundary_squared(d)?,
        boundary_example(d, seed)?,
        coboundary_squared(d, seed)?,
        itilde_commutation(d, seed)?,
        leibniz(d, seed)?,
        green_formula(d, seed)?,
    ];
    for conn in [a, &probe] {
        let suffix = if std::ptr::eq(conn, a) { "" } else { "_probe" };
        for mut c in [
            curvature_components(conn)?,
            bianchi(conn)?,
            gauge_covariance(conn, h)?,
            ym_gauge_invariance(conn, h)?,
            self_duality(conn)?,
            action_gradient(conn, seed)?,
        ] {
            c.name.push_str(suffix);
            checks.push(c);
        }
    }
    checks.push(left_gauge_dual(d, h, seed)?);
    checks.push(right_gauge_dual("right_gauge_dual", d, h, seed)?);
    checks.push(right_gauge_dual(
        "right_gauge_dual_counterexample",
        d,
        &counterexample_gauge,
        seed,
    )?);

    let scalars = vec![
        ("gauge_condition_defect".to_string(), gauge_pairing_defect(h)?),
        (
            "counterexample_condition_defect".to_string(),
            gauge_pairing_defect(&counterexample_gauge)?,
        ),
        (
            "green_boundary_relative_magnitude".to_string(),
            green_boundary_magnitude(d, seed)?,
        ),
        (
            "transformed_su2_deviation".to_string(),
            gauge_transform(a, h)?.su2_deviation,
        ),
    ];
    Ok((checks, scalars))
}
