//! Discrete exterior calculus on matrix-valued cochains.
//!
//! Component formulas (all addresses resolved through the domain):
//!
//! - coboundary: `(d f)^R_k = Σ_{i∈R} (-1)^{|R∩{1..i-1}|} (f^{R∖i}_{τ_i k} - f^{R∖i}_k)`
//! - cup: `(f ∪ g)^R_k = Σ_{P⊔Q=R} cup_sign(P,Q) f^P_k g^Q_{k+𝟙_P}`
//! - star: `(∗f)^{Pᶜ}_k = perm_sign(P) f^P_k`, landing on the other copy
//! - ι̃: same coefficients on the other copy
//!
//! On a block, an output cell whose stencil leaves the stored range
//! (halo included) is set to zero; the per-cell `*_at` functions report
//! `OutOfDomain` for those cells instead.

use num_complex::Complex64;

use crate::algebra::Matrix2;
use crate::cochain::Cochain;
use crate::complex4::{
    build_vp, cup_sign, perm_sign, Cell, Chain, Chart, CopyFlag, DirectionSet, MultiIndex, Topology,
};
use crate::error::{Error, Result};

/// Builds a form by evaluating a per-cell stencil at every stored cell.
pub(crate) fn stencil_form(
    template: &Cochain,
    degree: usize,
    copy: CopyFlag,
    mut cell_value: impl FnMut(Chart, MultiIndex, DirectionSet) -> Result<Matrix2>,
) -> Result<Cochain> {
    let domain = *template.domain();
    let mut out = Cochain::zeros(domain, degree, copy)?;
    for (site, (chart, k)) in domain.sites().enumerate() {
        for &r in DirectionSet::of_degree(degree) {
            match cell_value(chart, k, r) {
                Ok(v) => *out.at_mut(site, r) = v,
                Err(Error::OutOfDomain { .. }) if domain.topology() == Topology::Block => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

fn face_sign(r: DirectionSet, axis: usize) -> f64 {
    if r.count_below(axis).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// One component of `d^c f`.
pub fn coboundary_at(f: &Cochain, chart: Chart, k: MultiIndex, r: DirectionSet) -> Result<Matrix2> {
    if r.degree() != f.degree() + 1 {
        return Err(Error::DegreeMismatch {
            expected: f.degree() + 1,
            found: r.degree(),
        });
    }
    let d = f.domain();
    let mut acc = Matrix2::zero();
    for axis in r.axes() {
        let face = r.without(axis);
        let fwd = f.at(d.locate(chart, k.shift(axis, 1))?, face);
        let here = f.at(d.locate(chart, k)?, face);
        acc += (fwd - here).scale(face_sign(r, axis));
    }
    Ok(acc)
}

/// `d^c f`, degree `p + 1`, same copy.
pub fn coboundary(f: &Cochain) -> Result<Cochain> {
    if f.degree() >= 4 {
        return Err(Error::InvalidDegree(f.degree() + 1));
    }
    stencil_form(f, f.degree() + 1, f.copy_flag(), |c, k, r| coboundary_at(f, c, k, r))
}

fn check_cup_operands(f: &Cochain, g: &Cochain) -> Result<usize> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    if f.copy_flag() != g.copy_flag() {
        return Err(Error::CopyMismatch);
    }
    let degree = f.degree() + g.degree();
    if degree > 4 {
        return Err(Error::InvalidDegree(degree));
    }
    Ok(degree)
}

/// One component of `f ∪ g`.
pub fn cup_at(f: &Cochain, g: &Cochain, chart: Chart, k: MultiIndex, r: DirectionSet) -> Result<Matrix2> {
    let d = f.domain();
    let here = d.locate(chart, k)?;
    let mut acc = Matrix2::zero();
    for &p in DirectionSet::of_degree(f.degree()) {
        if p.union(r) != r {
            continue;
        }
        let q = DirectionSet::from_bits(r.bits() & !p.bits()).expect("subset of r");
        let shifted = d.locate(chart, k.shift_set(p))?;
        let term = f.at(here, p) * g.at(shifted, q);
        if cup_sign(p, q) > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Cup product; coefficients multiply as matrices in the written order.
pub fn cup(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    let degree = check_cup_operands(f, g)?;
    stencil_form(f, degree, f.copy_flag(), |c, k, r| cup_at(f, g, c, k, r))
}

/// Hodge star: degree `4 - p`, other copy.
pub fn star(f: &Cochain) -> Cochain {
    let domain = *f.domain();
    let mut out =
        Cochain::zeros(domain, 4 - f.degree(), f.copy_flag().toggled()).expect("complementary degree is valid");
    for site in 0..domain.n_sites() {
        for &p in f.sets() {
            let v = f.at(site, p);
            *out.at_mut(site, p.complement()) = if perm_sign(p) > 0 { v } else { -v };
        }
    }
    out
}

/// `∗⁻¹ = (-1)^{p(4-p)} ∗`.
pub fn star_inverse(f: &Cochain) -> Cochain {
    let p = f.degree();
    let s = star(f);
    if (p * (4 - p)).is_multiple_of(2) {
        s
    } else {
        s.scale(-1.0)
    }
}

/// `ι̃`: identical components on the other copy.
pub fn itilde(f: &Cochain) -> Cochain {
    let copy = f.copy_flag().toggled();
    f.clone().with_copy(copy)
}

/// `ι̃ ∘ ∗`, the duality map of the field equations; keeps the copy flag.
pub fn dual(f: &Cochain) -> Cochain {
    let copy = f.copy_flag();
    star(f).with_copy(copy)
}

/// `δ^c = (-1)^p ∗⁻¹ d^c ∗` on a `p`-form, `p ≥ 1`.
pub fn codifferential(f: &Cochain) -> Result<Cochain> {
    let p = f.degree();
    if p == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let inner = coboundary(&star(f))?;
    let out = star_inverse(&inner);
    Ok(if p.is_multiple_of(2) { out } else { out.scale(-1.0) })
}

/// `(φ, ψ) = tr Σ_k Σ_P φ^P_k (ψ^P_k)†` over in-range cells.
pub fn inner_product(f: &Cochain, g: &Cochain) -> Result<Complex64> {
    f.same_shape(g)?;
    let d = f.domain();
    let mut acc = Complex64::new(0.0, 0.0);
    for (chart, k) in d.interior_sites() {
        let site = d.locate(chart, k)?;
        for &p in f.sets() {
            acc += (f.at(site, p) * g.at(site, p).conj_transpose()).trace();
        }
    }
    Ok(acc)
}

/// `‖f‖² = (f, f)`, real and non-negative by construction.
pub fn norm_sq(f: &Cochain) -> f64 {
    f.interior_norm_sq()
}

/// `⟨c, φ⟩`: cells on another copy or of another degree pair to zero.
pub fn pair(chain: &Chain, f: &Cochain) -> Result<Matrix2> {
    let d = f.domain();
    let mut acc = Matrix2::zero();
    for (cell, &c) in chain.iter() {
        if cell.copy != f.copy_flag() || cell.degree() != f.degree() {
            continue;
        }
        acc += f.at(d.locate(cell.chart, cell.k)?, cell.dirs).scale(c as f64);
    }
    Ok(acc)
}

/// Boundary term `tr⟨∂𝕍, φ ⊗ ∗ω*⟩` of the discrete Green formula, assembled
/// from the boundaries of the cells of `V_p` and `V_{p-1}`:
///
/// `Σ_{s∈V_p} ⟨∂s, φ⟩⟨∗s, ∗ω*⟩ + (-1)^{p-1} Σ_{s'∈V_{p-1}} ⟨s', φ⟩⟨∂∗s', ∗ω*⟩`.
pub fn green_boundary_term(phi: &Cochain, omega: &Cochain) -> Result<Complex64> {
    let p = omega.degree();
    if p == 0 || phi.degree() + 1 != p {
        return Err(Error::DegreeMismatch {
            expected: p.saturating_sub(1),
            found: phi.degree(),
        });
    }
    if phi.domain() != omega.domain() {
        return Err(Error::DomainMismatch);
    }
    if phi.copy_flag() != omega.copy_flag() {
        return Err(Error::CopyMismatch);
    }
    let d = *phi.domain();
    let psi = star(&omega.conj_transpose_form());
    let on_copy = |c: Cell| {
        if phi.copy_flag() == CopyFlag::Base {
            c
        } else {
            Cell {
                copy: c.copy.toggled(),
                ..c
            }
        }
    };

    let mut acc = Complex64::new(0.0, 0.0);
    for (s, partner, sign) in build_vp(&d, p)? {
        let ds = Chain::from_cell(on_copy(s)).boundary(&d)?;
        let left = pair(&ds, phi)?;
        let right = pair(&Chain::from_cell(on_copy(partner)), &psi)?.scale(sign as f64);
        acc += (left * right).trace();
    }
    let parity = if (p - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    for (s, partner, sign) in build_vp(&d, p - 1)? {
        let left = pair(&Chain::from_cell(on_copy(s)), phi)?;
        let dstar = Chain::from_cell(on_copy(partner)).boundary(&d)?;
        let right = pair(&dstar, &psi)?.scale(sign as f64);
        acc += (left * right).trace() * parity;
    }
    Ok(acc)
}
