//! Finite groups and their subgroups.
//!
//! Three families are supported, all with elements stored as integer
//! coordinate tuples:
//!
//! * `ScaledTorus { d, m, n }`: `((1/m)Z / nZ)^d`. A coordinate `P` stands
//!   for the real value `P/m`, so residues live in `Z/(m·n)Z`.
//! * `Heisenberg { m, n }`: the Heisenberg group over `Z/(m·n)Z` with law
//!   `(X,Y,Z)(U,V,W) = (X+U, Y+V, Z+W+X·V)` applied directly to the
//!   residues, so the order is `(m·n)^3`. Residues divisible by `m` (the
//!   integer points) form a normal subgroup of order `n^3`.
//! * `Dihedral { n }`: pairs `(k mod n, e mod 2)` for `r^k s^e`.

use crate::error::{domain, Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

/// Default cap on the number of elements any routine will enumerate.
pub const ENUMERATION_CAP: u64 = 1 << 24;

pub type Coords = SmallVec<[u32; 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Coords,
}

impl GroupElement {
    pub fn new(coords: &[u32]) -> Self {
        GroupElement { coords: Coords::from_slice(coords) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    ScaledTorus { d: u32, m: u64, n: u64 },
    Heisenberg { m: u64, n: u64 },
    Dihedral { n: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    spec: GroupSpec,
    order: u64,
    moduli: SmallVec<[u32; 4]>,
}

impl FiniteGroup {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let (moduli, order): (SmallVec<[u32; 4]>, u128) = match spec {
            GroupSpec::ScaledTorus { d, m, n } => {
                if d == 0 || m == 0 || n == 0 {
                    return Err(domain!("torus parameters must be positive, got d={d}, m={m}, n={n}"));
                }
                let q = check_modulus(m as u128 * n as u128)?;
                (SmallVec::from_elem(q, d as usize), (q as u128).checked_pow(d).unwrap_or(u128::MAX))
            }
            GroupSpec::Heisenberg { m, n } => {
                if m == 0 || n == 0 {
                    return Err(domain!("Heisenberg parameters must be positive, got m={m}, n={n}"));
                }
                let q = check_modulus(m as u128 * n as u128)?;
                (SmallVec::from_elem(q, 3), (q as u128).pow(3))
            }
            GroupSpec::Dihedral { n } => {
                if n == 0 {
                    return Err(domain!("dihedral parameter must be positive"));
                }
                let q = check_modulus(n as u128)?;
                (SmallVec::from_slice(&[q, 2]), 2 * q as u128)
            }
        };
        let order = u64::try_from(order)
            .map_err(|_| Error::Resource(format!("group order of {spec:?} does not fit in 64 bits")))?;
        Ok(FiniteGroup { spec, order, moduli })
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Per-coordinate moduli.
    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_abelian(&self) -> bool {
        match self.spec {
            GroupSpec::ScaledTorus { .. } => true,
            GroupSpec::Heisenberg { m, n } => m * n == 1,
            GroupSpec::Dihedral { n } => n <= 2,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { coords: SmallVec::from_elem(0, self.rank()) }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.rank() && g.coords.iter().zip(&self.moduli).all(|(c, q)| c < q)
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(domain!("element {:?} is not in {:?}", g.coords, self.spec))
        }
    }

    /// Group law with membership checks on both operands.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.op(g, h))
    }

    /// Group law without membership checks.
    pub fn op(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let mut out = g.clone();
        match self.spec {
            GroupSpec::ScaledTorus { .. } => {
                let q = self.moduli[0] as u64;
                for (o, b) in out.coords.iter_mut().zip(&h.coords) {
                    *o = ((*o as u64 + *b as u64) % q) as u32;
                }
            }
            GroupSpec::Heisenberg { .. } => {
                let q = self.moduli[0] as u64;
                let (x, y, z) = (g.coords[0] as u64, g.coords[1] as u64, g.coords[2] as u64);
                let (u, v, w) = (h.coords[0] as u64, h.coords[1] as u64, h.coords[2] as u64);
                out.coords[0] = ((x + u) % q) as u32;
                out.coords[1] = ((y + v) % q) as u32;
                out.coords[2] = ((z + w + (x * v) % q) % q) as u32;
            }
            GroupSpec::Dihedral { n } => {
                let (k1, e1) = (g.coords[0] as u64, g.coords[1]);
                let (k2, e2) = (h.coords[0] as u64, h.coords[1]);
                let k = if e1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                out.coords[0] = k as u32;
                out.coords[1] = (e1 + e2) % 2;
            }
        }
        out
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    /// Inverse without membership checks.
    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        let mut out = g.clone();
        match self.spec {
            GroupSpec::ScaledTorus { .. } => {
                let q = self.moduli[0];
                for c in out.coords.iter_mut() {
                    *c = (q - *c) % q;
                }
            }
            GroupSpec::Heisenberg { .. } => {
                let q = self.moduli[0] as u64;
                let (x, y, z) = (g.coords[0] as u64, g.coords[1] as u64, g.coords[2] as u64);
                out.coords[0] = ((q - x) % q) as u32;
                out.coords[1] = ((q - y) % q) as u32;
                out.coords[2] = ((q - z + (x * y) % q) % q) as u32;
            }
            GroupSpec::Dihedral { n } => {
                if g.coords[1] == 0 {
                    out.coords[0] = ((n - g.coords[0] as u64) % n) as u32;
                }
            }
        }
        out
    }

    pub fn pow(&self, g: &GroupElement, k: u64) -> GroupElement {
        let mut acc = self.identity();
        let mut base = g.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.op(&acc, &base);
            }
            base = self.op(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, g: &GroupElement) -> Result<u64> {
        self.check(g)?;
        let id = self.identity();
        let mut x = g.clone();
        let mut k = 1;
        while x != id {
            x = self.op(&x, g);
            k += 1;
        }
        Ok(k)
    }

    /// Position of `g` in the lexicographic enumeration.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        let mut idx: u64 = 0;
        for (c, q) in g.coords.iter().zip(&self.moduli) {
            idx = idx * (*q as u64) + *c as u64;
        }
        idx as usize
    }

    pub fn element_at(&self, index: usize) -> GroupElement {
        let mut rest = index as u64;
        let mut coords: Coords = SmallVec::from_elem(0, self.rank());
        for (slot, q) in coords.iter_mut().zip(&self.moduli).rev() {
            *slot = (rest % *q as u64) as u32;
            rest /= *q as u64;
        }
        GroupElement { coords }
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        self.elements_capped(ENUMERATION_CAP)
    }

    pub fn elements_capped(&self, cap: u64) -> Result<Vec<GroupElement>> {
        if self.order > cap {
            return Err(Error::Resource(format!(
                "enumerating {:?} needs {} elements, cap is {cap}",
                self.spec, self.order
            )));
        }
        Ok((0..self.order as usize).map(|i| self.element_at(i)).collect())
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        self.element_at(rng.random_range(0..self.order) as usize)
    }

    /// A generating set, used for normality tests.
    pub fn generators(&self) -> Vec<GroupElement> {
        let r = self.rank();
        match self.spec {
            GroupSpec::ScaledTorus { .. } => (0..r)
                .map(|i| {
                    let mut g = self.identity();
                    g.coords[i] = 1 % self.moduli[i];
                    g
                })
                .collect(),
            GroupSpec::Heisenberg { .. } => {
                let q = self.moduli[0];
                vec![GroupElement::new(&[1 % q, 0, 0]), GroupElement::new(&[0, 1 % q, 0])]
            }
            GroupSpec::Dihedral { n } => {
                vec![GroupElement::new(&[(1 % n) as u32, 0]), GroupElement::new(&[0, 1])]
            }
        }
    }

    /// Real-valued coordinates of `g` with each residue taken in the
    /// centred window `[-q/2, q/2)` and divided by the family scale.
    /// Dihedral elements report the centred rotation index and the reflection bit.
    pub fn centered_values(&self, g: &GroupElement) -> Vec<f64> {
        let scale = match self.spec {
            GroupSpec::ScaledTorus { m, .. } | GroupSpec::Heisenberg { m, .. } => m as f64,
            GroupSpec::Dihedral { .. } => 1.0,
        };
        let centred = |c: u32, q: u32| -> f64 {
            let (c, q) = (c as i64, q as i64);
            let r = if 2 * c >= q { c - q } else { c };
            r as f64
        };
        match self.spec {
            GroupSpec::Dihedral { .. } => vec![centred(g.coords[0], self.moduli[0]), g.coords[1] as f64],
            _ => g.coords.iter().zip(&self.moduli).map(|(c, q)| centred(*c, *q) / scale).collect(),
        }
    }
}

fn check_modulus(q: u128) -> Result<u32> {
    u32::try_from(q).map_err(|_| Error::Resource(format!("coordinate modulus {q} does not fit in 32 bits")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubgroupKind {
    Trivial,
    Whole,
    /// In a scaled torus: the first `periods.len()` coordinates range over
    /// multiples of `periods[i]` (in units of `1/m`, i.e. stored residues are
    /// multiples of `m·periods[i]`); the remaining coordinates are zero.
    TorusSublattice {
        periods: Vec<u64>,
    },
    /// In a Heisenberg group: points whose three coordinates are integers,
    /// i.e. stored residues divisible by `m`.
    HeisenbergIntegerPoints,
    /// In a dihedral group: the cyclic rotation subgroup of the given order.
    DihedralRotations {
        order: u64,
    },
    /// The subgroup generated by the listed elements.
    Generated {
        generators: Vec<GroupElement>,
    },
}

#[derive(Debug)]
pub struct Subgroup {
    group: FiniteGroup,
    kind: SubgroupKind,
    order: u64,
    elements: OnceLock<Vec<GroupElement>>,
}

impl Clone for Subgroup {
    fn clone(&self) -> Self {
        let elements = OnceLock::new();
        if let Some(e) = self.elements.get() {
            let _ = elements.set(e.clone());
        }
        Subgroup { group: self.group.clone(), kind: self.kind.clone(), order: self.order, elements }
    }
}

impl Subgroup {
    pub fn new(group: &FiniteGroup, kind: SubgroupKind) -> Result<Self> {
        let order = match (&kind, group.spec()) {
            (SubgroupKind::Trivial, _) => 1,
            (SubgroupKind::Whole, _) => group.order(),
            (SubgroupKind::TorusSublattice { periods }, GroupSpec::ScaledTorus { d, n, .. }) => {
                if periods.len() > d as usize {
                    return Err(domain!("sublattice rank {} exceeds torus dimension {d}", periods.len()));
                }
                let mut order = 1u64;
                for &p in periods {
                    if p == 0 || n % p != 0 {
                        return Err(domain!("sublattice period {p} does not divide {n}"));
                    }
                    order *= n / p;
                }
                order
            }
            (SubgroupKind::HeisenbergIntegerPoints, GroupSpec::Heisenberg { n, .. }) => n * n * n,
            (SubgroupKind::DihedralRotations { order }, GroupSpec::Dihedral { n }) => {
                if *order == 0 || n % order != 0 {
                    return Err(domain!("rotation subgroup order {order} does not divide {n}"));
                }
                *order
            }
            (SubgroupKind::Generated { generators }, _) => {
                for g in generators {
                    group.check(g)?;
                }
                let elements = closure(group, generators, ENUMERATION_CAP)?;
                let order = elements.len() as u64;
                let sg = Subgroup { group: group.clone(), kind: kind.clone(), order, elements: OnceLock::new() };
                let _ = sg.elements.set(elements);
                return Ok(sg);
            }
            (k, spec) => return Err(domain!("subgroup kind {k:?} does not apply to {spec:?}")),
        };
        Ok(Subgroup { group: group.clone(), kind, order, elements: OnceLock::new() })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn kind(&self) -> &SubgroupKind {
        &self.kind
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn index(&self) -> u64 {
        self.group.order() / self.order
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        if !self.group.contains(g) {
            return false;
        }
        match (&self.kind, self.group.spec()) {
            (SubgroupKind::Trivial, _) => g.coords.iter().all(|&c| c == 0),
            (SubgroupKind::Whole, _) => true,
            (SubgroupKind::TorusSublattice { periods }, GroupSpec::ScaledTorus { m, .. }) => {
                g.coords.iter().enumerate().all(|(i, &c)| match periods.get(i) {
                    Some(&p) => (c as u64).is_multiple_of(m * p),
                    None => c == 0,
                })
            }
            (SubgroupKind::HeisenbergIntegerPoints, GroupSpec::Heisenberg { m, .. }) => {
                g.coords.iter().all(|&c| (c as u64).is_multiple_of(m))
            }
            (SubgroupKind::DihedralRotations { order }, GroupSpec::Dihedral { n }) => {
                g.coords[1] == 0 && (g.coords[0] as u64).is_multiple_of(n / order)
            }
            (SubgroupKind::Generated { .. }, _) => self.elements_unchecked().binary_search(g).is_ok(),
            _ => false,
        }
    }

    fn elements_unchecked(&self) -> &[GroupElement] {
        self.elements.get_or_init(|| self.enumerate())
    }

    /// Elements in lexicographic order of their coordinates.
    pub fn elements(&self) -> Result<&[GroupElement]> {
        if self.order > ENUMERATION_CAP {
            return Err(Error::Resource(format!("subgroup of order {} exceeds enumeration cap", self.order)));
        }
        Ok(self.elements_unchecked())
    }

    fn enumerate(&self) -> Vec<GroupElement> {
        let g = &self.group;
        let mut out = match (&self.kind, g.spec()) {
            (SubgroupKind::Trivial, _) => vec![g.identity()],
            (SubgroupKind::Whole, _) => (0..g.order() as usize).map(|i| g.element_at(i)).collect(),
            (SubgroupKind::TorusSublattice { periods }, GroupSpec::ScaledTorus { m, n, .. }) => {
                let steps: Vec<(u64, u64)> = periods.iter().map(|&p| (m * p, n / p)).collect();
                let mut acc = vec![g.identity()];
                for (i, (step, count)) in steps.into_iter().enumerate() {
                    let mut next = Vec::with_capacity(acc.len() * count as usize);
                    for e in &acc {
                        for t in 0..count {
                            let mut x = e.clone();
                            x.coords[i] = (t * step) as u32;
                            next.push(x);
                        }
                    }
                    acc = next;
                }
                acc
            }
            (SubgroupKind::HeisenbergIntegerPoints, GroupSpec::Heisenberg { m, n }) => {
                let mut v = Vec::with_capacity((n * n * n) as usize);
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            v.push(GroupElement::new(&[(x * m) as u32, (y * m) as u32, (z * m) as u32]));
                        }
                    }
                }
                v
            }
            (SubgroupKind::DihedralRotations { order }, GroupSpec::Dihedral { n }) => {
                let step = n / order;
                (0..*order).map(|t| GroupElement::new(&[(t * step) as u32, 0])).collect()
            }
            _ => unreachable!("generated subgroups are enumerated at construction"),
        };
        out.sort();
        out
    }

    /// Normality test: `H` is normal iff conjugation by each generator of
    /// the ambient group maps `H` into itself.
    pub fn is_normal(&self) -> Result<bool> {
        let g = &self.group;
        if g.is_abelian() {
            return Ok(true);
        }
        let elems = self.elements()?;
        for s in g.generators() {
            let s_inv = g.inv(&s);
            for h in elems {
                let c = g.op(&g.op(&s, h), &s_inv);
                if !self.contains(&c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Closure of a generating set under the group law, sorted.
fn closure(group: &FiniteGroup, generators: &[GroupElement], cap: u64) -> Result<Vec<GroupElement>> {
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let id = group.identity();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in generators {
            let y = group.op(&x, s);
            if seen.insert(y.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::Resource("generated subgroup exceeds enumeration cap".into()));
                }
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<GroupElement> = seen.into_iter().collect();
    v.sort();
    Ok(v)
}
