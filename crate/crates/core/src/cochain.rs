//! Dense matrix-valued cochains (discrete forms) and their file format.

use std::ops::Deref;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{embed_su2, exp_su2, project_su2, Matrix2, Su2Vector};
use crate::complex4::{Chart, CopyFlag, DirectionSet, Domain, MultiIndex, Topology};
use crate::error::{Error, Result};

/// Version tag written into every form file.
pub const FORM_FILE_VERSION: u64 = 1;

/// A degree-`p` form with one `Matrix2` per stored cell.
///
/// Layout: storage site (chart-major, `k` lexicographic) then direction
/// set in ascending bitmask order. On a block the halo is part of the
/// data; on a sphere every read goes through address resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    domain: Domain,
    degree: usize,
    copy: CopyFlag,
    values: Vec<Matrix2>,
}

impl Cochain {
    pub fn zeros(domain: Domain, degree: usize, copy: CopyFlag) -> Result<Self> {
        if degree > 4 {
            return Err(Error::InvalidDegree(degree));
        }
        let n = domain.n_sites() * DirectionSet::of_degree(degree).len();
        Ok(Self {
            domain,
            degree,
            copy,
            values: vec![Matrix2::zero(); n],
        })
    }

    /// Evaluates `f` on in-range cells; the block halo is filled by clamped copy.
    pub fn from_fn(
        domain: Domain,
        degree: usize,
        copy: CopyFlag,
        mut f: impl FnMut(Chart, MultiIndex, DirectionSet) -> Matrix2,
    ) -> Result<Self> {
        let mut out = Self::zeros(domain, degree, copy)?;
        for (chart, k) in domain.interior_sites() {
            let site = domain.locate(chart, k)?;
            for &p in DirectionSet::of_degree(degree) {
                let i = out.index(site, p);
                out.values[i] = f(chart, k, p);
            }
        }
        out.fill_halo_clamped();
        Ok(out)
    }

    /// Evaluates `f` on every stored cell, halo included.
    pub fn from_fn_with_halo(
        domain: Domain,
        degree: usize,
        copy: CopyFlag,
        mut f: impl FnMut(Chart, MultiIndex, DirectionSet) -> Matrix2,
    ) -> Result<Self> {
        let mut out = Self::zeros(domain, degree, copy)?;
        let nsets = DirectionSet::of_degree(degree).len();
        for (site, (chart, k)) in domain.sites().enumerate() {
            for (pos, &p) in DirectionSet::of_degree(degree).iter().enumerate() {
                out.values[site * nsets + pos] = f(chart, k, p);
            }
        }
        Ok(out)
    }

    /// Copies the nearest interior value into every halo cell (block only).
    pub fn fill_halo_clamped(&mut self) {
        if self.domain.topology() != Topology::Block {
            return;
        }
        let sizes = self.domain.sizes();
        let nsets = self.sets().len();
        for (site, (chart, k)) in self.domain.sites().enumerate() {
            if self.domain.is_interior(k) {
                continue;
            }
            let clamped = MultiIndex(std::array::from_fn(|a| k.0[a].clamp(1, sizes[a] as i64)));
            let src = self.domain.locate(chart, clamped).expect("clamped index is in range");
            for pos in 0..nsets {
                self.values[site * nsets + pos] = self.values[src * nsets + pos];
            }
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn copy_flag(&self) -> CopyFlag {
        self.copy
    }

    pub fn values(&self) -> &[Matrix2] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Matrix2] {
        &mut self.values
    }

    pub fn sets(&self) -> &'static [DirectionSet] {
        DirectionSet::of_degree(self.degree)
    }

    #[inline]
    pub(crate) fn index(&self, site: usize, p: DirectionSet) -> usize {
        site * self.sets().len() + p.position()
    }

    #[inline]
    pub(crate) fn at(&self, site: usize, p: DirectionSet) -> Matrix2 {
        self.values[self.index(site, p)]
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, site: usize, p: DirectionSet) -> &mut Matrix2 {
        let i = self.index(site, p);
        &mut self.values[i]
    }

    fn check_set(&self, p: DirectionSet) -> Result<()> {
        if p.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: p.degree(),
            });
        }
        Ok(())
    }

    /// Component at `(chart, k, P)` after address resolution.
    pub fn get(&self, chart: Chart, k: MultiIndex, p: DirectionSet) -> Result<Matrix2> {
        self.check_set(p)?;
        let site = self.domain.locate(chart, k)?;
        Ok(self.at(site, p))
    }

    pub fn set(&mut self, chart: Chart, k: MultiIndex, p: DirectionSet, value: Matrix2) -> Result<()> {
        self.check_set(p)?;
        let site = self.domain.locate(chart, k)?;
        *self.at_mut(site, p) = value;
        Ok(())
    }

    pub fn same_shape(&self, other: &Cochain) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        if self.copy != other.copy {
            return Err(Error::CopyMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Cochain, f: impl Fn(Matrix2, Matrix2) -> Matrix2) -> Result<Cochain> {
        self.same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Cochain { values, ..*self })
    }

    pub fn scale(&self, s: f64) -> Cochain {
        self.map_coeffs(|m| m.scale(s))
    }

    pub fn map_coeffs(&self, f: impl Fn(Matrix2) -> Matrix2) -> Cochain {
        Cochain {
            values: self.values.iter().map(|&m| f(m)).collect(),
            ..*self
        }
    }

    /// `φ*`: conjugate transpose of every coefficient.
    pub fn conj_transpose_form(&self) -> Cochain {
        self.map_coeffs(|m| m.conj_transpose())
    }

    /// Same coefficients on the requested copy.
    pub fn with_copy(mut self, copy: CopyFlag) -> Cochain {
        self.copy = copy;
        self
    }

    /// Largest entry modulus over in-range cells.
    pub fn interior_max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (chart, k) in self.domain.interior_sites() {
            let site = self.domain.locate(chart, k).expect("interior site");
            for &p in self.sets() {
                m = m.max(self.at(site, p).max_abs());
            }
        }
        m
    }

    /// Sum over in-range cells of the squared Frobenius norm.
    pub fn interior_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for (chart, k) in self.domain.interior_sites() {
            let site = self.domain.locate(chart, k).expect("interior site");
            for &p in self.sets() {
                s += self.at(site, p).frobenius_sq();
            }
        }
        s
    }

    /// Like [`Cochain::interior_norm_sq`], but on a block only cells with
    /// `k_i ≤ N_i - margin` are summed. Used where nested stencils would
    /// otherwise read cells whose own stencil left the stored range.
    pub fn norm_sq_with_margin(&self, margin: i64) -> f64 {
        if self.domain.topology() == Topology::Sphere || margin == 0 {
            return self.interior_norm_sq();
        }
        let sizes = self.domain.sizes();
        let mut s = 0.0;
        for (chart, k) in self.domain.interior_sites() {
            if (0..4).any(|a| k.0[a] > sizes[a] as i64 - margin) {
                continue;
            }
            let site = self.domain.locate(chart, k).expect("interior site");
            for &p in self.sets() {
                s += self.at(site, p).frobenius_sq();
            }
        }
        s
    }

    pub fn max_su2_algebra_defect(&self) -> f64 {
        self.values.iter().map(Matrix2::su2_algebra_defect).fold(0.0, f64::max)
    }

    pub fn max_su2_group_defect(&self) -> f64 {
        self.values.iter().map(Matrix2::su2_group_defect).fold(0.0, f64::max)
    }

    /// Encodes the form in the JSON form file format.
    pub fn serialize(&self) -> Vec<u8> {
        let file = FormFile {
            version: FORM_FILE_VERSION,
            topology: self.domain.topology(),
            sizes: self.domain.sizes(),
            degree: self.degree,
            copy: self.copy,
            data: self.values.clone(),
        };
        serde_json::to_vec(&file).expect("form file serialization cannot fail")
    }

    /// Decodes a form file. Malformed input, an unknown version and
    /// inconsistent shape are reported as distinct errors.
    pub fn deserialize(bytes: &[u8]) -> Result<Cochain> {
        let raw: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
        let version = raw
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Malformed("missing or non-integer \"version\"".into()))?;
        if version != FORM_FILE_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORM_FILE_VERSION,
            });
        }
        let file: FormFile = serde_json::from_value(raw).map_err(|e| Error::Malformed(e.to_string()))?;
        let domain = Domain::new(file.sizes, file.topology).map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        if file.degree > 4 {
            return Err(Error::ShapeMismatch(format!("degree {} > 4", file.degree)));
        }
        let expected = domain.n_sites() * DirectionSet::of_degree(file.degree).len();
        if file.data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} coefficients, found {}",
                file.data.len()
            )));
        }
        Ok(Cochain {
            domain,
            degree: file.degree,
            copy: file.copy,
            values: file.data,
        })
    }

    /// [`Cochain::deserialize`] plus a check against an expected domain and degree.
    pub fn deserialize_expecting(bytes: &[u8], domain: &Domain, degree: usize) -> Result<Cochain> {
        let f = Self::deserialize(bytes)?;
        if f.domain != *domain || f.degree != degree {
            return Err(Error::ShapeMismatch(format!(
                "file holds a degree-{} form on {:?} {:?}, expected degree {} on {:?} {:?}",
                f.degree,
                f.domain.topology(),
                f.domain.sizes(),
                degree,
                domain.topology(),
                domain.sizes()
            )));
        }
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormFile {
    version: u64,
    topology: Topology,
    sizes: [usize; 4],
    degree: usize,
    copy: CopyFlag,
    data: Vec<Matrix2>,
}

/// An su(2)-valued base-copy 1-form.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection(Cochain);

impl Connection {
    /// Validates degree and su(2) membership of every stored coefficient.
    pub fn new(form: Cochain) -> Result<Self> {
        if form.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: form.degree(),
            });
        }
        let dev = form.max_su2_algebra_defect();
        if dev > crate::algebra::PREDICATE_TOL {
            return Err(Error::NotSu2Algebra { max_deviation: dev });
        }
        Ok(Self(form))
    }

    pub fn zero(domain: Domain) -> Self {
        Self(Cochain::zeros(domain, 1, CopyFlag::Base).expect("degree 1 is valid"))
    }

    /// Interior components from `f(chart, k, axis)`; halo by clamped copy.
    pub fn from_su2_fn(domain: Domain, mut f: impl FnMut(Chart, MultiIndex, usize) -> Su2Vector) -> Self {
        let form = Cochain::from_fn(domain, 1, CopyFlag::Base, |c, k, p| {
            let axis = p.axes().next().expect("degree-1 set");
            embed_su2(f(c, k, axis))
        })
        .expect("degree 1 is valid");
        Self(form)
    }

    /// Builds a connection from λ-coordinates in storage order (site, axis).
    pub fn from_coords(domain: Domain, coords: &[Su2Vector]) -> Result<Self> {
        let mut form = Cochain::zeros(domain, 1, CopyFlag::Base)?;
        if coords.len() != form.values.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, found {}",
                form.values.len(),
                coords.len()
            )));
        }
        for (m, v) in form.values.iter_mut().zip(coords) {
            *m = embed_su2(*v);
        }
        Ok(Self(form))
    }

    /// λ-coordinates of every stored coefficient, storage order.
    pub fn coords(&self) -> Vec<Su2Vector> {
        self.0.values.iter().map(project_su2).collect()
    }

    pub fn as_cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn into_cochain(self) -> Cochain {
        self.0
    }
}

impl Deref for Connection {
    type Target = Cochain;
    fn deref(&self) -> &Cochain {
        &self.0
    }
}

/// An SU(2)-valued base-copy 0-form.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField(Cochain);

impl GaugeField {
    pub fn new(form: Cochain) -> Result<Self> {
        if form.degree() != 0 {
            return Err(Error::DegreeMismatch {
                expected: 0,
                found: form.degree(),
            });
        }
        let dev = form.max_su2_group_defect();
        if dev > crate::algebra::PREDICATE_TOL {
            return Err(Error::NotSu2Group { max_deviation: dev });
        }
        Ok(Self(form))
    }

    pub fn identity(domain: Domain) -> Self {
        let form = Cochain::from_fn_with_halo(domain, 0, CopyFlag::Base, |_, _, _| Matrix2::identity())
            .expect("degree 0 is valid");
        Self(form)
    }

    /// Coefficientwise inverse `h⁻¹` (the conjugate transpose on SU(2)).
    pub fn inverse(&self) -> GaugeField {
        Self(self.0.conj_transpose_form())
    }

    /// `h ∪ g`, i.e. coefficientwise products `h_k g_k`.
    pub fn compose(&self, other: &GaugeField) -> Result<GaugeField> {
        let form = self.0.zip_with(&other.0, |a, b| a * b)?;
        Ok(Self(form))
    }

    pub fn as_cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn into_cochain(self) -> Cochain {
        self.0
    }
}

impl Deref for GaugeField {
    type Target = Cochain;
    fn deref(&self) -> &Cochain {
        &self.0
    }
}

// Seeded generation uses ChaCha20 (rand_chacha) seeded through
// `seed_from_u64`; a uniform draw on [-a, a] is `a * (2u - 1)` with
// `u = rng.gen::<f64>()`. Draws follow the normative cell order.
fn rng_for(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn uniform_su2(rng: &mut ChaCha20Rng, amplitude: f64) -> Su2Vector {
    Su2Vector(std::array::from_fn(|_| amplitude * (2.0 * rng.gen::<f64>() - 1.0)))
}

/// Connection with λ-coordinates uniform in `[-amplitude, amplitude]`.
pub fn random_connection(domain: Domain, amplitude: f64, seed: u64) -> Result<Connection> {
    if amplitude.is_nan() || amplitude < 0.0 {
        return Err(Error::InvalidConfig(format!("amplitude must be ≥ 0, got {amplitude}")));
    }
    let mut rng = rng_for(seed);
    Ok(Connection::from_su2_fn(domain, |_, _, _| {
        uniform_su2(&mut rng, amplitude)
    }))
}

/// General gl(2, ℂ)-valued form; real and imaginary parts of every entry
/// of every stored cell (halo included) uniform in `[-1, 1]`.
pub fn random_form(domain: Domain, degree: usize, copy: CopyFlag, seed: u64) -> Result<Cochain> {
    let mut rng = rng_for(seed);
    let mut draw = || 2.0 * rng.gen::<f64>() - 1.0;
    Cochain::from_fn_with_halo(domain, degree, copy, |_, _, _| Matrix2 {
        m: std::array::from_fn(|_| Complex64::new(draw(), draw())),
    })
}

/// Gauge field `h_k = exp(v_k)` with `v_k` uniform in `[-π, π]³`.
pub fn random_gauge(domain: Domain, seed: u64) -> GaugeField {
    let mut rng = rng_for(seed);
    let form = Cochain::from_fn(domain, 0, CopyFlag::Base, |_, _, _| {
        exp_su2(uniform_su2(&mut rng, std::f64::consts::PI))
    })
    .expect("degree 0 is valid");
    GaugeField(form)
}

/// Profile of a gauge field that depends only on the lattice sum label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumProfile {
    /// Independent seeded SU(2) element per label.
    Random,
    /// `h = exp(label · v)`.
    Linear(Su2Vector),
}

/// Period of the sum label on a sphere: `gcd` of all `2N_i` and `|N_i - N_j|`.
fn sphere_label_period(sizes: [usize; 4]) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut g = 0;
    for &n in &sizes {
        g = gcd(g, 2 * n as i64);
        for &m in &sizes {
            g = gcd(g, (n as i64 - m as i64).abs());
        }
    }
    g
}

/// Label of a site such that translating by `τ_i` raises it by one.
///
/// On a block it is `k1+k2+k3+k4`. On a sphere the unwrapped coordinate
/// sum is only defined modulo the gluing period, and the second chart
/// sits half a period (`N_1`) away.
pub fn sum_label(domain: &Domain, chart: Chart, k: MultiIndex) -> i64 {
    match domain.topology() {
        Topology::Block => k.sum(),
        Topology::Sphere => {
            let g = sphere_label_period(domain.sizes());
            let offset = match chart {
                Chart::V => 0,
                Chart::Vhat => domain.sizes()[0] as i64,
            };
            (k.sum() + offset).rem_euclid(g)
        }
    }
}

/// Gauge field whose coefficients depend only on [`sum_label`]; such
/// fields satisfy `h_{τ_12 k} = h_{τ_34 k}`, `h_{τ_13 k} = h_{τ_24 k}`,
/// `h_{τ_14 k} = h_{τ_23 k}` everywhere.
pub fn sum_gauge(domain: Domain, profile: SumProfile, seed: u64) -> GaugeField {
    let max_label = match domain.topology() {
        Topology::Block => domain.sizes().iter().map(|&n| n as i64 + 1).sum::<i64>(),
        Topology::Sphere => sphere_label_period(domain.sizes()) - 1,
    };
    let table: Vec<Matrix2> = match profile {
        SumProfile::Random => {
            let mut rng = rng_for(seed);
            (0..=max_label)
                .map(|_| exp_su2(uniform_su2(&mut rng, std::f64::consts::PI)))
                .collect()
        }
        SumProfile::Linear(v) => (0..=max_label)
            .map(|l| exp_su2(Su2Vector(v.0.map(|a| a * l as f64))))
            .collect(),
    };
    let form = Cochain::from_fn_with_halo(domain, 0, CopyFlag::Base, |chart, k, _| {
        table[sum_label(&domain, chart, k) as usize]
    })
    .expect("degree 0 is valid");
    GaugeField(form)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere2() -> Domain {
        Domain::sphere([2, 2, 2, 2]).unwrap()
    }

    #[test]
    fn sphere_reads_land_in_other_chart() {
        let d = sphere2();
        let mut f = Cochain::zeros(d, 1, CopyFlag::Base).unwrap();
        let m = Matrix2::scalar(Complex64::new(2.0, -1.0));
        let e1 = DirectionSet::single(1);
        f.set(Chart::Vhat, MultiIndex::new(2, 1, 1, 1), e1, m).unwrap();
        assert_eq!(f.get(Chart::V, MultiIndex::new(0, 1, 1, 1), e1).unwrap(), m);
        assert_eq!(f.get(Chart::Vhat, MultiIndex::new(2, 1, 1, 1), e1).unwrap(), m);
    }

    #[test]
    fn get_checks_degree_and_range() {
        let d = Domain::block([2, 2, 2, 2]).unwrap();
        let f = Cochain::zeros(d, 2, CopyFlag::Base).unwrap();
        assert!(matches!(
            f.get(Chart::V, MultiIndex::new(1, 1, 1, 1), DirectionSet::single(1)),
            Err(Error::DegreeMismatch { .. })
        ));
        assert!(matches!(
            f.get(Chart::V, MultiIndex::new(5, 1, 1, 1), DirectionSet::from_axes(&[1, 2])),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(Cochain::zeros(d, 5, CopyFlag::Base).is_err());
    }

    #[test]
    fn halo_is_clamped_copy() {
        let d = Domain::block([2, 3, 2, 2]).unwrap();
        let f = Cochain::from_fn(d, 0, CopyFlag::Base, |_, k, _| {
            Matrix2::scalar(Complex64::new(k.sum() as f64, k.0[1] as f64))
        })
        .unwrap();
        let p = DirectionSet::EMPTY;
        let halo = f.get(Chart::V, MultiIndex::new(0, 4, 1, 3), p).unwrap();
        let inner = f.get(Chart::V, MultiIndex::new(1, 3, 1, 2), p).unwrap();
        assert_eq!(halo, inner);
        // Explicit halo data is kept as supplied.
        let g = Cochain::from_fn_with_halo(d, 0, CopyFlag::Base, |_, k, _| Matrix2::scalar((k.sum() as f64).into()))
            .unwrap();
        assert_eq!(
            g.get(Chart::V, MultiIndex::new(0, 4, 1, 3), p).unwrap(),
            Matrix2::scalar(8.0.into())
        );
    }

    #[test]
    fn elementwise_algebra() {
        let d = sphere2();
        let a = random_connection(d, 1.0, 3).unwrap();
        let z = Cochain::zeros(d, 1, CopyFlag::Base).unwrap();
        assert_eq!(a.add(&z).unwrap(), *a.as_cochain());
        assert_eq!(a.scale(-1.0).scale(-1.0), *a.as_cochain());
        let neg = a.conj_transpose_form();
        assert!(neg.add(&a).unwrap().interior_max_abs() < 1e-15);
        let two = Cochain::zeros(d, 2, CopyFlag::Base).unwrap();
        assert!(a.add(&two).is_err());
        let tilde = z.clone().with_copy(CopyFlag::Tilde);
        assert_eq!(z.add(&tilde), Err(Error::CopyMismatch));
    }

    #[test]
    fn generators_are_deterministic() {
        let d = sphere2();
        assert_eq!(
            random_connection(d, 0.5, 11).unwrap(),
            random_connection(d, 0.5, 11).unwrap()
        );
        assert_ne!(
            random_connection(d, 0.5, 11).unwrap(),
            random_connection(d, 0.5, 12).unwrap()
        );
        assert_eq!(random_gauge(d, 4), random_gauge(d, 4));
        let zero = random_connection(d, 0.0, 9).unwrap();
        assert_eq!(zero, Connection::zero(d));
        assert!(random_connection(d, -1.0, 0).is_err());
        assert!(random_gauge(d, 1).max_su2_group_defect() < 1e-12);
    }

    #[test]
    fn amplitude_bounds_coordinates() {
        let a = random_connection(Domain::block([3, 3, 3, 3]).unwrap(), 0.25, 5).unwrap();
        assert!(a.coords().iter().all(|v| v.max_abs() <= 0.25));
    }

    #[test]
    fn predicates_enforced_by_constructors() {
        let d = sphere2();
        let herm = Cochain::from_fn(d, 1, CopyFlag::Base, |_, _, _| Matrix2::pauli(1)).unwrap();
        assert!(matches!(Connection::new(herm), Err(Error::NotSu2Algebra { .. })));
        let notgroup = Cochain::from_fn(d, 0, CopyFlag::Base, |_, _, _| Matrix2::pauli(1).scale(2.0)).unwrap();
        assert!(matches!(GaugeField::new(notgroup), Err(Error::NotSu2Group { .. })));
        let g = random_gauge(d, 2);
        let id = g.compose(&g.inverse()).unwrap();
        assert!(id.sub(&GaugeField::identity(d)).unwrap().interior_max_abs() < 1e-14);
    }

    #[test]
    fn sphere_label_period_examples() {
        assert_eq!(sphere_label_period([2, 2, 2, 2]), 4);
        assert_eq!(sphere_label_period([2, 3, 2, 2]), 1);
        assert_eq!(sphere_label_period([3, 3, 5, 3]), 2);
    }

    #[test]
    fn sum_label_is_translation_consistent_on_sphere() {
        for sizes in [[2, 2, 2, 2], [3, 3, 5, 3], [2, 4, 2, 2]] {
            let d = Domain::sphere(sizes).unwrap();
            for (chart, k) in d.interior_sites() {
                let l = sum_label(&d, chart, k);
                for axis in 1..=4 {
                    let (c2, k2) = d.resolve(chart, k.shift(axis, 1)).unwrap();
                    let g = sphere_label_period(sizes);
                    assert_eq!(sum_label(&d, c2, k2), (l + 1).rem_euclid(g));
                }
            }
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let d = Domain::block([2, 3, 2, 2]).unwrap();
        let a = random_connection(d, 1.3, 77).unwrap();
        let bytes = a.serialize();
        let back = Cochain::deserialize(&bytes).unwrap();
        assert_eq!(back, *a.as_cochain());
        for (x, y) in back.values().iter().zip(a.values()) {
            for (u, v) in x.m.iter().zip(y.m) {
                assert_eq!(u.re.to_bits(), v.re.to_bits());
                assert_eq!(u.im.to_bits(), v.im.to_bits());
            }
        }
    }

    #[test]
    fn deserialize_errors_are_distinct() {
        let d = sphere2();
        let bytes = random_connection(d, 1.0, 1).unwrap().serialize();
        let truncated = &bytes[..bytes.len() / 2];
        assert!(matches!(Cochain::deserialize(truncated), Err(Error::Malformed(_))));

        let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        v["version"] = 2.into();
        let wrong_version = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            Cochain::deserialize(&wrong_version),
            Err(Error::VersionMismatch { found: 2, .. })
        ));

        let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        v["degree"] = 2.into();
        let wrong_shape = serde_json::to_vec(&v).unwrap();
        assert!(matches!(
            Cochain::deserialize(&wrong_shape),
            Err(Error::ShapeMismatch(_))
        ));

        let other = Domain::sphere([2, 2, 2, 3]).unwrap();
        assert!(matches!(
            Cochain::deserialize_expecting(&bytes, &other, 1),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn file_layout_follows_cell_order() {
        // Component (V, (1,1,1,2), {2}) of a sphere 1-form sits at
        // site 1, set position 1 → flat index 5.
        let d = sphere2();
        let mut f = Cochain::zeros(d, 1, CopyFlag::Base).unwrap();
        let m = Matrix2::scalar(Complex64::new(0.5, 0.25));
        f.set(Chart::V, MultiIndex::new(1, 1, 1, 2), DirectionSet::single(2), m)
            .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&f.serialize()).unwrap();
        assert_eq!(
            v["data"][5],
            serde_json::json!([[0.5, 0.25], [0.0, 0.0], [0.0, 0.0], [0.5, 0.25]])
        );
        assert_eq!(v["topology"], "sphere");
        assert_eq!(v["copy"], "base");
        assert_eq!(v["data"].as_array().unwrap().len(), 32 * 4);
    }
}
