//! Combinatorial geometry of the 4-D cell complex.
//!
//! A basis cell is addressed by a chart (`V` or its glued counterpart
//! `V̂`), a multi-index `k`, and the set `P ⊆ {1,2,3,4}` of axes along
//! which the cell extends as an edge. The double-complex flag selects the
//! base complex or its tilde copy.
//!
//! Two topologies are supported. A `Block` is the box `1 ≤ k_i ≤ N_i`
//! together with a one-cell halo (`k_i = 0` and `k_i = N_i + 1`) so that
//! forward stencils are total on the interior. A `Sphere` glues two blocks
//! along their boundaries; every address with `0 ≤ k_i ≤ N_i + 1` resolves
//! into range, toggling the chart once per wrapped axis.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version of the cell ordering used by the form file format.
pub const CELL_ORDERING_VERSION: u32 = 1;

/// Subset of the axes `{1,2,3,4}`; bit `i - 1` marks axis `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DirectionSet(u8);

const SETS_DEG0: [DirectionSet; 1] = [DirectionSet(0)];
const SETS_DEG1: [DirectionSet; 4] = [DirectionSet(1), DirectionSet(2), DirectionSet(4), DirectionSet(8)];
const SETS_DEG2: [DirectionSet; 6] = [
    DirectionSet(3),
    DirectionSet(5),
    DirectionSet(6),
    DirectionSet(9),
    DirectionSet(10),
    DirectionSet(12),
];
const SETS_DEG3: [DirectionSet; 4] = [DirectionSet(7), DirectionSet(11), DirectionSet(13), DirectionSet(14)];
const SETS_DEG4: [DirectionSet; 1] = [DirectionSet(15)];

// Position of each bitmask among the sets of its own degree.
const POSITION: [usize; 16] = [0, 0, 1, 0, 2, 1, 2, 0, 3, 3, 4, 1, 5, 2, 3, 0];

impl DirectionSet {
    pub const EMPTY: Self = Self(0);
    pub const FULL: Self = Self(0b1111);

    pub fn from_bits(bits: u8) -> Option<Self> {
        (bits <= 0b1111).then_some(Self(bits))
    }

    /// Builds a set from 1-based axis numbers.
    ///
    /// Panics on an axis outside `1..=4`.
    pub fn from_axes(axes: &[usize]) -> Self {
        axes.iter().fold(Self::EMPTY, |s, &a| s.with(a))
    }

    pub fn single(axis: usize) -> Self {
        Self::EMPTY.with(axis)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, axis: usize) -> bool {
        (1..=4).contains(&axis) && self.0 & (1 << (axis - 1)) != 0
    }

    pub fn with(self, axis: usize) -> Self {
        assert!((1..=4).contains(&axis), "axis must be in 1..=4, got {axis}");
        Self(self.0 | (1 << (axis - 1)))
    }

    pub fn without(self, axis: usize) -> Self {
        assert!((1..=4).contains(&axis), "axis must be in 1..=4, got {axis}");
        Self(self.0 & !(1 << (axis - 1)))
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 0b1111)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    /// Axes in ascending order, 1-based.
    pub fn axes(self) -> impl Iterator<Item = usize> {
        (1..=4).filter(move |&a| self.contains(a))
    }

    /// `|P ∩ {1, …, axis - 1}|`.
    pub fn count_below(self, axis: usize) -> usize {
        (self.0 & ((1u8 << (axis - 1)) - 1)).count_ones() as usize
    }

    /// Index of this set among the sets of equal degree in ascending
    /// bitmask order.
    pub fn position(self) -> usize {
        POSITION[self.0 as usize]
    }

    /// All sets of degree `p`, ascending bitmask order.
    pub fn of_degree(p: usize) -> &'static [DirectionSet] {
        match p {
            0 => &SETS_DEG0,
            1 => &SETS_DEG1,
            2 => &SETS_DEG2,
            3 => &SETS_DEG3,
            4 => &SETS_DEG4,
            _ => &[],
        }
    }

    pub fn all() -> impl Iterator<Item = DirectionSet> {
        (0..16u8).map(DirectionSet)
    }
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, a) in self.axes().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Sign of the permutation (P ascending, then Pᶜ ascending) of (1,2,3,4).
pub fn perm_sign(p: DirectionSet) -> i8 {
    cup_sign(p, p.complement())
}

/// `(-1)^m` with `m = #{(i, j) : i ∈ P, j ∈ Q, j < i}`.
///
/// Only meaningful for disjoint sets; overlapping products vanish.
pub fn cup_sign(p: DirectionSet, q: DirectionSet) -> i8 {
    let inversions: usize = p.axes().map(|i| q.count_below(i)).sum();
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub [i64; 4]);

impl MultiIndex {
    pub fn new(k1: i64, k2: i64, k3: i64, k4: i64) -> Self {
        Self([k1, k2, k3, k4])
    }

    /// `τ_axis` for `direction = +1`, `σ_axis` for `direction = -1`.
    pub fn shift(self, axis: usize, direction: i64) -> Self {
        let mut k = self.0;
        k[axis - 1] += direction;
        Self(k)
    }

    /// `k + 𝟙_P`: one forward step along every axis of `P`.
    pub fn shift_set(self, p: DirectionSet) -> Self {
        p.axes().fold(self, |k, a| k.shift(a, 1))
    }

    pub fn sum(self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// `τ_i k` / `σ_i k`.
pub fn shift(k: MultiIndex, axis: usize, direction: i64) -> MultiIndex {
    k.shift(axis, direction)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Chart {
    V,
    Vhat,
}

impl Chart {
    pub fn toggled(self) -> Self {
        match self {
            Chart::V => Chart::Vhat,
            Chart::Vhat => Chart::V,
        }
    }

    fn index(self) -> usize {
        match self {
            Chart::V => 0,
            Chart::Vhat => 1,
        }
    }
}

/// Which copy of the double complex a cell or form lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyFlag {
    Base,
    Tilde,
}

impl CopyFlag {
    pub fn toggled(self) -> Self {
        match self {
            CopyFlag::Base => CopyFlag::Tilde,
            CopyFlag::Tilde => CopyFlag::Base,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Block,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Domain {
    sizes: [usize; 4],
    topology: Topology,
}

impl Domain {
    pub fn new(sizes: [usize; 4], topology: Topology) -> Result<Self> {
        if let Some(n) = sizes.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidDomain(format!("every size must be at least 2, got {n}")));
        }
        Ok(Self { sizes, topology })
    }

    pub fn block(sizes: [usize; 4]) -> Result<Self> {
        Self::new(sizes, Topology::Block)
    }

    pub fn sphere(sizes: [usize; 4]) -> Result<Self> {
        Self::new(sizes, Topology::Sphere)
    }

    pub fn sizes(&self) -> [usize; 4] {
        self.sizes
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn charts(&self) -> &'static [Chart] {
        match self.topology {
            Topology::Block => &[Chart::V],
            Topology::Sphere => &[Chart::V, Chart::Vhat],
        }
    }

    /// Inclusive range of stored indices along `axis` (1-based).
    pub fn stored_range(&self, axis: usize) -> (i64, i64) {
        let n = self.sizes[axis - 1] as i64;
        match self.topology {
            Topology::Block => (0, n + 1),
            Topology::Sphere => (1, n),
        }
    }

    fn extent(&self, axis: usize) -> usize {
        let (lo, hi) = self.stored_range(axis);
        (hi - lo + 1) as usize
    }

    pub fn sites_per_chart(&self) -> usize {
        (1..=4).map(|a| self.extent(a)).product()
    }

    /// Stored sites over all charts.
    pub fn n_sites(&self) -> usize {
        self.charts().len() * self.sites_per_chart()
    }

    /// Number of in-range cells `1 ≤ k_i ≤ N_i` over all charts.
    pub fn n_interior_sites(&self) -> usize {
        self.charts().len() * self.sizes.iter().product::<usize>()
    }

    pub fn is_interior(&self, k: MultiIndex) -> bool {
        k.0.iter().zip(self.sizes).all(|(&ki, n)| (1..=n as i64).contains(&ki))
    }

    /// Maps an address onto its stored representative.
    pub fn resolve(&self, chart: Chart, k: MultiIndex) -> Result<(Chart, MultiIndex)> {
        let out = || Error::OutOfDomain { chart, k };
        match self.topology {
            Topology::Block => {
                if chart != Chart::V {
                    return Err(out());
                }
                for (&ki, n) in k.0.iter().zip(self.sizes) {
                    if !(0..=n as i64 + 1).contains(&ki) {
                        return Err(out());
                    }
                }
                Ok((chart, k))
            }
            Topology::Sphere => {
                let mut chart_out = chart;
                let mut resolved = k.0;
                for (ki, n) in resolved.iter_mut().zip(self.sizes) {
                    let n = n as i64;
                    if *ki == 0 {
                        chart_out = chart_out.toggled();
                        *ki = n;
                    } else if *ki == n + 1 {
                        chart_out = chart_out.toggled();
                        *ki = 1;
                    } else if !(1..=n).contains(ki) {
                        return Err(out());
                    }
                }
                Ok((chart_out, MultiIndex(resolved)))
            }
        }
    }

    /// Storage index of an already-resolved address.
    fn site_index_resolved(&self, chart: Chart, k: MultiIndex) -> usize {
        let mut idx = 0usize;
        for axis in 1..=4 {
            let (lo, _) = self.stored_range(axis);
            idx = idx * self.extent(axis) + (k.0[axis - 1] - lo) as usize;
        }
        chart.index() * self.sites_per_chart() + idx
    }

    /// Resolves an address and returns its storage index.
    pub fn locate(&self, chart: Chart, k: MultiIndex) -> Result<usize> {
        let (c, r) = self.resolve(chart, k)?;
        Ok(self.site_index_resolved(c, r))
    }

    /// Stored sites in normative order: chart-major, then `k`
    /// lexicographic with `k1` most significant.
    pub fn sites(&self) -> impl Iterator<Item = (Chart, MultiIndex)> + '_ {
        let ranges: [(i64, i64); 4] = std::array::from_fn(|a| self.stored_range(a + 1));
        self.charts()
            .iter()
            .flat_map(move |&chart| box_iter(ranges).map(move |k| (chart, k)))
    }

    /// In-range sites `1 ≤ k_i ≤ N_i`, same ordering as [`Domain::sites`].
    pub fn interior_sites(&self) -> impl Iterator<Item = (Chart, MultiIndex)> + '_ {
        let ranges: [(i64, i64); 4] = std::array::from_fn(|a| (1, self.sizes[a] as i64));
        self.charts()
            .iter()
            .flat_map(move |&chart| box_iter(ranges).map(move |k| (chart, k)))
    }
}

fn box_iter(ranges: [(i64, i64); 4]) -> impl Iterator<Item = MultiIndex> {
    let [(a0, a1), (b0, b1), (c0, c1), (d0, d1)] = ranges;
    (a0..=a1).flat_map(move |i| {
        (b0..=b1).flat_map(move |j| (c0..=c1).flat_map(move |l| (d0..=d1).map(move |m| MultiIndex([i, j, l, m]))))
    })
}

/// Free-function form of [`Domain::resolve`].
pub fn resolve_address(d: &Domain, chart: Chart, k: MultiIndex) -> Result<(Chart, MultiIndex)> {
    d.resolve(chart, k)
}

/// A basis cell `s_k^{(P)}` (or its tilde counterpart).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub copy: CopyFlag,
    pub chart: Chart,
    pub k: MultiIndex,
    pub dirs: DirectionSet,
}

impl Cell {
    pub fn new(chart: Chart, k: MultiIndex, dirs: DirectionSet, copy: CopyFlag) -> Self {
        Self { copy, chart, k, dirs }
    }

    pub fn base(chart: Chart, k: MultiIndex, dirs: DirectionSet) -> Self {
        Self::new(chart, k, dirs, CopyFlag::Base)
    }

    pub fn degree(&self) -> usize {
        self.dirs.degree()
    }

    /// The same cell with its address resolved.
    pub fn resolved(&self, d: &Domain) -> Result<Self> {
        let (chart, k) = d.resolve(self.chart, self.k)?;
        Ok(Self { chart, k, ..*self })
    }

    /// `∗s`: the complementary cell on the other copy, with its sign.
    pub fn star(&self) -> (i8, Cell) {
        (
            perm_sign(self.dirs),
            Cell {
                copy: self.copy.toggled(),
                dirs: self.dirs.complement(),
                ..*self
            },
        )
    }
}

/// Integer combination of cells; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Chain {
    terms: BTreeMap<Cell, i64>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cell(cell: Cell) -> Self {
        let mut c = Self::new();
        c.add(cell, 1);
        c
    }

    pub fn add(&mut self, cell: Cell, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(cell).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&cell);
        }
    }

    pub fn add_chain(&mut self, other: &Chain, factor: i64) {
        for (&cell, &c) in &other.terms {
            self.add(cell, factor * c);
        }
    }

    pub fn coeff(&self, cell: &Cell) -> i64 {
        self.terms.get(cell).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, &i64)> {
        self.terms.iter()
    }

    /// Linear extension of [`boundary_cell`].
    pub fn boundary(&self, d: &Domain) -> Result<Chain> {
        let mut out = Chain::new();
        for (cell, &c) in &self.terms {
            out.add_chain(&boundary_cell(d, cell)?, c);
        }
        Ok(out)
    }
}

/// `∂s_k^{(P)} = Σ_{i∈P} (-1)^{|P∩{1..i-1}|} (s_{τ_i k}^{(P∖i)} - s_k^{(P∖i)})`,
/// every face address-resolved.
pub fn boundary_cell(d: &Domain, cell: &Cell) -> Result<Chain> {
    let mut out = Chain::new();
    for axis in cell.dirs.axes() {
        let sign = if cell.dirs.count_below(axis).is_multiple_of(2) {
            1
        } else {
            -1
        };
        let face = cell.dirs.without(axis);
        let forward = Cell {
            k: cell.k.shift(axis, 1),
            dirs: face,
            ..*cell
        }
        .resolved(d)?;
        let here = Cell { dirs: face, ..*cell }.resolved(d)?;
        out.add(forward, sign);
        out.add(here, -sign);
    }
    Ok(out)
}

/// Entries `(s_k^{(P)}, ∗-partner on the tilde copy, perm_sign(P))` of
/// `V_p = Σ_k Σ_{(p)} s_k^{(p)} ⊗ ∗s_k^{(p)}` over in-range `k`.
pub fn build_vp(d: &Domain, p: usize) -> Result<Vec<(Cell, Cell, i8)>> {
    if p > 4 {
        return Err(Error::InvalidDegree(p));
    }
    let mut out = Vec::with_capacity(d.n_interior_sites() * DirectionSet::of_degree(p).len());
    for (chart, k) in d.interior_sites() {
        for &dirs in DirectionSet::of_degree(p) {
            let cell = Cell::base(chart, k, dirs);
            let (sign, partner) = cell.star();
            out.push((cell, partner, sign));
        }
    }
    Ok(out)
}
