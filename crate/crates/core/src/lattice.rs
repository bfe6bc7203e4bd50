//! Classical lattice-gas reference model.
//!
//! Provides the DnQm lattice descriptors, periodic occupancy fields with one
//! boolean per (site, direction), pattern-based collision through mass and
//! momentum equivalence classes, and classical streaming. Every quantum
//! result in this crate is checked against these functions.
//!
//! Direction conventions (qubit `q_j` carries direction `j`):
//!
//! | lattice | directions |
//! |---------|------------|
//! | D1Q2    | `(+1) (-1)` |
//! | D1Q3    | `(+1) (-1) (0)` |
//! | D2Q4    | `(+1,0) (0,+1) (-1,0) (0,-1)` |
//! | D2Q5    | `(+1,0) (0,+1) (-1,0) (0,-1) (0,0)` |
//!
//! Sites are linearized row-major with axis 0 fastest and bit `(site, j)` is
//! stored at `site * m + j`. Boundaries are periodic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A DnQm lattice: spatial dimension plus an ordered list of discrete velocities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    name: String,
    dimension: usize,
    velocities: Vec<Vec<i32>>,
}

impl LatticeDescriptor {
    /// Builds one of the supported von Neumann lattices by name (case-insensitive).
    pub fn build(name: &str) -> Result<Self> {
        let (canonical, dim, vels): (&str, usize, Vec<Vec<i32>>) = match name.to_ascii_uppercase().as_str() {
            "D1Q2" => ("D1Q2", 1, vec![vec![1], vec![-1]]),
            "D1Q3" => ("D1Q3", 1, vec![vec![1], vec![-1], vec![0]]),
            "D2Q4" => ("D2Q4", 2, vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]]),
            "D2Q5" => (
                "D2Q5",
                2,
                vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1], vec![0, 0]],
            ),
            _ => return Err(Error::UnknownLattice(name.to_string())),
        };
        Self::new(canonical, dim, vels)
    }

    /// Builds a descriptor from explicit velocities, checking the lattice invariants.
    pub fn new(name: &str, dimension: usize, velocities: Vec<Vec<i32>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDescriptor("dimension must be positive".into()));
        }
        if velocities.is_empty() || velocities.len() > 16 {
            return Err(Error::InvalidDescriptor(format!(
                "need 1..=16 velocities, got {}",
                velocities.len()
            )));
        }
        for v in &velocities {
            if v.len() != dimension {
                return Err(Error::InvalidDescriptor(format!(
                    "velocity {v:?} does not have {dimension} components"
                )));
            }
            if v.iter().any(|c| !(-1..=1).contains(c)) {
                return Err(Error::InvalidDescriptor(format!(
                    "velocity {v:?} has a component outside -1..=1"
                )));
            }
        }
        for (i, v) in velocities.iter().enumerate() {
            if velocities[..i].contains(v) {
                return Err(Error::InvalidDescriptor(format!("duplicate velocity {v:?}")));
            }
            let neg: Vec<i32> = v.iter().map(|c| -c).collect();
            if !velocities.contains(&neg) {
                return Err(Error::InvalidDescriptor(format!("velocity {v:?} has no opposite")));
            }
        }
        Ok(Self {
            name: name.to_string(),
            dimension,
            velocities,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of discrete velocities `m`.
    pub fn num_directions(&self) -> usize {
        self.velocities.len()
    }

    pub fn velocities(&self) -> &[Vec<i32>] {
        &self.velocities
    }

    pub fn velocity(&self, j: usize) -> &[i32] {
        &self.velocities[j]
    }

    pub fn is_rest(&self, j: usize) -> bool {
        self.velocities[j].iter().all(|&c| c == 0)
    }

    pub fn rest_index(&self) -> Option<usize> {
        (0..self.num_directions()).find(|&j| self.is_rest(j))
    }

    /// Indices of the nonzero velocities, in descriptor order.
    pub fn moving_directions(&self) -> Vec<usize> {
        (0..self.num_directions()).filter(|&j| !self.is_rest(j)).collect()
    }

    /// Index of `-e_j`.
    pub fn opposite(&self, j: usize) -> usize {
        let neg: Vec<i32> = self.velocities[j].iter().map(|c| -c).collect();
        self.velocities
            .iter()
            .position(|v| *v == neg)
            .expect("descriptor invariant: every velocity has an opposite")
    }

    /// Whether every velocity moves along at most one axis (von Neumann stencil).
    pub fn is_von_neumann(&self) -> bool {
        self.velocities
            .iter()
            .all(|v| v.iter().filter(|&&c| c != 0).count() <= 1)
    }

    /// The same lattice with every velocity negated; streaming with it undoes streaming with `self`.
    pub fn reversed(&self) -> Self {
        Self {
            name: format!("{}-reversed", self.name),
            dimension: self.dimension,
            velocities: self.velocities.iter().map(|v| v.iter().map(|c| -c).collect()).collect(),
        }
    }
}

impl fmt::Display for LatticeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Local velocity pattern at one site: bit `j` set iff a particle travels in direction `j`.
///
/// Displayed with `q_0` leftmost, so `1010` means directions 0 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    bits: u32,
    width: u8,
}

impl Pattern {
    pub fn new(bits: u32, width: usize) -> Self {
        assert!(width <= 16, "pattern width {width} exceeds 16");
        let mask = if width == 0 { 0 } else { (1u32 << width) - 1 };
        Self {
            bits: bits & mask,
            width: width as u8,
        }
    }

    pub fn empty(width: usize) -> Self {
        Self::new(0, width)
    }

    /// All `2^width` patterns in increasing bit order.
    pub fn all(width: usize) -> impl Iterator<Item = Pattern> {
        (0..1u32 << width).map(move |b| Pattern::new(b, width))
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn width(self) -> usize {
        self.width as usize
    }

    pub fn get(self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    pub fn with(self, j: usize, value: bool) -> Self {
        let bits = if value {
            self.bits | 1 << j
        } else {
            self.bits & !(1 << j)
        };
        Self { bits, ..self }
    }

    pub fn popcount(self) -> u32 {
        self.bits.count_ones()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.width() {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 16 {
            return Err(Error::Parse {
                line: 0,
                msg: format!("pattern `{s}` longer than 16 bits"),
            });
        }
        let mut p = Pattern::empty(s.len());
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => p = p.with(j, true),
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("invalid pattern `{s}`"),
                    })
                }
            }
        }
        Ok(p)
    }
}

/// Total mass and momentum of a local pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MassMomentum {
    pub mass: u32,
    pub momentum: Vec<i32>,
}

pub fn mass_momentum(pattern: Pattern, descriptor: &LatticeDescriptor) -> MassMomentum {
    debug_assert_eq!(pattern.width(), descriptor.num_directions());
    let mut momentum = vec![0; descriptor.dimension()];
    for j in (0..descriptor.num_directions()).filter(|&j| pattern.get(j)) {
        for (acc, c) in momentum.iter_mut().zip(descriptor.velocity(j)) {
            *acc += c;
        }
    }
    MassMomentum {
        mass: pattern.popcount(),
        momentum,
    }
}

/// Partition of all `2^m` local patterns into mass/momentum classes.
#[derive(Debug, Clone)]
pub struct EquivalenceClassTable {
    descriptor: LatticeDescriptor,
    classes: BTreeMap<MassMomentum, Vec<Pattern>>,
}

impl EquivalenceClassTable {
    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.descriptor
    }

    pub fn classes(&self) -> &BTreeMap<MassMomentum, Vec<Pattern>> {
        &self.classes
    }

    pub fn class_of(&self, pattern: Pattern) -> &[Pattern] {
        &self.classes[&mass_momentum(pattern, &self.descriptor)]
    }

    /// Classes with more than one member.
    pub fn non_singleton(&self) -> impl Iterator<Item = &[Pattern]> {
        self.classes.values().filter(|c| c.len() > 1).map(Vec::as_slice)
    }

    /// The other member of a two-element class, if `pattern` belongs to one.
    pub fn partner(&self, pattern: Pattern) -> Option<Pattern> {
        match self.class_of(pattern) {
            [a, b] if *a == pattern => Some(*b),
            [a, b] if *b == pattern => Some(*a),
            _ => None,
        }
    }
}

pub fn equivalence_classes(descriptor: &LatticeDescriptor) -> EquivalenceClassTable {
    let mut classes: BTreeMap<MassMomentum, Vec<Pattern>> = BTreeMap::new();
    for p in Pattern::all(descriptor.num_directions()) {
        classes.entry(mass_momentum(p, descriptor)).or_default().push(p);
    }
    EquivalenceClassTable {
        descriptor: descriptor.clone(),
        classes,
    }
}

/// Deterministic classical collision rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionRule {
    Identity,
    /// Map each member of a two-element class to the other member; fix everything else.
    SwapClass,
}

/// Periodic occupancy field with one bit per (site, direction).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyField {
    descriptor: LatticeDescriptor,
    extents: Vec<usize>,
    bits: Vec<bool>,
}

impl OccupancyField {
    pub fn empty(descriptor: &LatticeDescriptor, extents: &[usize]) -> Result<Self> {
        let sites = Self::check_extents(descriptor, extents)?;
        Ok(Self {
            descriptor: descriptor.clone(),
            extents: extents.to_vec(),
            bits: vec![false; sites * descriptor.num_directions()],
        })
    }

    pub fn from_bits(descriptor: &LatticeDescriptor, extents: &[usize], bits: Vec<bool>) -> Result<Self> {
        let sites = Self::check_extents(descriptor, extents)?;
        let expected = sites * descriptor.num_directions();
        if bits.len() != expected {
            return Err(Error::InvalidField(format!(
                "expected {expected} bits, got {}",
                bits.len()
            )));
        }
        Ok(Self {
            descriptor: descriptor.clone(),
            extents: extents.to_vec(),
            bits,
        })
    }

    /// Builds a field from one pattern per site (site order as in [`Self::site_index`]).
    pub fn from_patterns(descriptor: &LatticeDescriptor, extents: &[usize], patterns: &[Pattern]) -> Result<Self> {
        let mut field = Self::empty(descriptor, extents)?;
        if patterns.len() != field.num_sites() {
            return Err(Error::InvalidField(format!(
                "expected {} patterns, got {}",
                field.num_sites(),
                patterns.len()
            )));
        }
        for (site, &p) in patterns.iter().enumerate() {
            if p.width() != descriptor.num_directions() {
                return Err(Error::InvalidField(format!("pattern {p} has wrong width")));
            }
            field.set_pattern(site, p);
        }
        Ok(field)
    }

    fn check_extents(descriptor: &LatticeDescriptor, extents: &[usize]) -> Result<usize> {
        if extents.len() != descriptor.dimension() {
            return Err(Error::InvalidField(format!(
                "{} extents given for a {}-dimensional lattice",
                extents.len(),
                descriptor.dimension()
            )));
        }
        if extents.contains(&0) {
            return Err(Error::InvalidField("extents must be positive".into()));
        }
        Ok(extents.iter().product())
    }

    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.descriptor
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn num_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn get(&self, site: usize, j: usize) -> bool {
        self.bits[site * self.descriptor.num_directions() + j]
    }

    pub fn set(&mut self, site: usize, j: usize, value: bool) {
        let m = self.descriptor.num_directions();
        self.bits[site * m + j] = value;
    }

    pub fn pattern(&self, site: usize) -> Pattern {
        let m = self.descriptor.num_directions();
        (0..m).fold(Pattern::empty(m), |p, j| p.with(j, self.get(site, j)))
    }

    pub fn set_pattern(&mut self, site: usize, pattern: Pattern) {
        for j in 0..self.descriptor.num_directions() {
            self.set(site, j, pattern.get(j));
        }
    }

    pub fn site_coords(&self, mut site: usize) -> Vec<usize> {
        self.extents
            .iter()
            .map(|&e| {
                let c = site % e;
                site /= e;
                c
            })
            .collect()
    }

    /// Linear index of (possibly out-of-range) coordinates, wrapped periodically.
    pub fn site_index(&self, coords: &[i64]) -> usize {
        let mut idx = 0usize;
        for (axis, &c) in coords.iter().enumerate().rev() {
            let e = self.extents[axis] as i64;
            idx = idx * self.extents[axis] + c.rem_euclid(e) as usize;
        }
        idx
    }

    /// Site reached from `site` by moving along `offset` with periodic wrap.
    pub fn shifted(&self, site: usize, offset: &[i32]) -> usize {
        let coords: Vec<i64> = self
            .site_coords(site)
            .iter()
            .zip(offset)
            .map(|(&c, &o)| c as i64 + o as i64)
            .collect();
        self.site_index(&coords)
    }

    pub fn total_mass(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn total_momentum(&self) -> Vec<i64> {
        let mut momentum = vec![0i64; self.descriptor.dimension()];
        for site in 0..self.num_sites() {
            for (acc, c) in momentum
                .iter_mut()
                .zip(mass_momentum(self.pattern(site), &self.descriptor).momentum)
            {
                *acc += c as i64;
            }
        }
        momentum
    }
}

/// Moves every particle one site along its velocity: output bit `(x, j)` is input bit `(x - e_j, j)`.
pub fn stream_classical(field: &OccupancyField) -> OccupancyField {
    let mut out = field.clone();
    let descriptor = field.descriptor();
    for j in 0..descriptor.num_directions() {
        let back: Vec<i32> = descriptor.velocity(j).iter().map(|c| -c).collect();
        for site in 0..field.num_sites() {
            out.set(site, j, field.get(field.shifted(site, &back), j));
        }
    }
    out
}

/// Applies `rule` independently at every site.
pub fn collide_classical(field: &OccupancyField, rule: CollisionRule) -> OccupancyField {
    match rule {
        CollisionRule::Identity => field.clone(),
        CollisionRule::SwapClass => {
            let table = equivalence_classes(field.descriptor());
            let mut out = field.clone();
            for site in 0..field.num_sites() {
                if let Some(p) = table.partner(field.pattern(site)) {
                    out.set_pattern(site, p);
                }
            }
            out
        }
    }
}
