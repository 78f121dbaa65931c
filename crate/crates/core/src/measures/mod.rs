//! Computable probability measures on the two spaces: finite measures,
//! closed-form measures, mixtures and pushforwards, each exposing a
//! Prokhorov approximation oracle and lower-bound oracles on finite unions
//! of ideal balls.

mod morphism;
mod prokhorov;
mod zero_point;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Interval, Rational};
use crate::spaces::{BallRelation, IdealBall, IdealPoint, SpaceId};

pub use morphism::Morphism;
use morphism::Region;
pub use prokhorov::{prokhorov, prokhorov_bisect, SUPPORT_CAP};
pub use zero_point::{
    almost_decidable_radii, find_zero_measure_point, upper_closed, AlmostDecidableBall,
    ZeroMeasureTrace,
};

/// One weighted point of a [`FiniteMeasure`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub point: IdealPoint,
    pub weight: Rational,
}

/// A probability measure with finitely many ideal atoms and rational
/// weights summing to one. Atoms are kept sorted by point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFinite")]
pub struct FiniteMeasure {
    space: SpaceId,
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawFinite {
    space: SpaceId,
    atoms: Vec<Atom>,
}

impl TryFrom<RawFinite> for FiniteMeasure {
    type Error = Error;

    fn try_from(raw: RawFinite) -> Result<Self> {
        FiniteMeasure::new(raw.space, raw.atoms)
    }
}

impl FiniteMeasure {
    pub fn new(space: SpaceId, mut atoms: Vec<Atom>) -> Result<Self> {
        let mut total = Rational::zero();
        for a in &atoms {
            a.point.expect_space(space)?;
            if !a.weight.is_positive() {
                return Err(Error::BadParameter(format!(
                    "atom weight {} is not positive",
                    a.weight
                )));
            }
            total += &a.weight;
        }
        if total != Rational::one() {
            return Err(Error::BadParameter(format!(
                "atom weights sum to {total}, not 1"
            )));
        }
        atoms.sort_by(|a, b| a.point.cmp(&b.point));
        if atoms.windows(2).any(|w| w[0].point == w[1].point) {
            return Err(Error::BadParameter("repeated atom location".into()));
        }
        Ok(FiniteMeasure { space, atoms })
    }

    /// Merges repeated points and drops zero weights before validating.
    pub fn collect<I>(space: SpaceId, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IdealPoint, Rational)>,
    {
        let mut merged: BTreeMap<IdealPoint, Rational> = BTreeMap::new();
        for (p, w) in atoms {
            *merged.entry(p).or_default() += w;
        }
        let atoms = merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(point, weight)| Atom { point, weight })
            .collect();
        FiniteMeasure::new(space, atoms)
    }

    pub fn dirac(point: IdealPoint) -> Self {
        FiniteMeasure {
            space: point.space(),
            atoms: vec![Atom {
                point,
                weight: Rational::one(),
            }],
        }
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Exact mass of a finite union of open balls.
    pub fn mass_of(&self, balls: &[IdealBall]) -> Result<Rational> {
        let mut total = Rational::zero();
        for a in &self.atoms {
            let mut inside = false;
            for b in balls {
                if b.contains_ideal(&a.point)? {
                    inside = true;
                    break;
                }
            }
            if inside {
                total += &a.weight;
            }
        }
        Ok(total)
    }

    fn scaled(&self, k: &Rational) -> impl Iterator<Item = (IdealPoint, Rational)> + '_ {
        let k = k.clone();
        self.atoms
            .iter()
            .map(move |a| (a.point.clone(), &a.weight * &k))
    }
}

/// What is known about the atoms of a measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomInfo {
    NonAtomic,
    Atomic(Vec<IdealPoint>),
    Unknown,
}

impl AtomInfo {
    pub fn is_non_atomic(&self) -> bool {
        matches!(self, AtomInfo::NonAtomic)
    }
}

/// Continuous distribution functions with exact rational values at
/// rational points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfForm {
    Lebesgue,
    /// `F(x) = x^k`.
    Power(u32),
    /// Density `densities[i]` on `[cuts[i], cuts[i+1]]`.
    Piecewise {
        cuts: Vec<Rational>,
        densities: Vec<Rational>,
    },
}

impl CdfForm {
    fn validate(&self) -> Result<()> {
        match self {
            CdfForm::Lebesgue => Ok(()),
            CdfForm::Power(k) if *k >= 1 => Ok(()),
            CdfForm::Power(_) => Err(Error::BadParameter("power CDF needs k >= 1".into())),
            CdfForm::Piecewise { cuts, densities } => {
                let ok_shape = cuts.len() == densities.len() + 1
                    && cuts.first() == Some(&Rational::zero())
                    && cuts.last() == Some(&Rational::one())
                    && cuts.windows(2).all(|w| w[0] < w[1])
                    && densities.iter().all(|d| !d.is_negative());
                if !ok_shape {
                    return Err(Error::BadParameter("malformed piecewise density".into()));
                }
                let total: Rational = densities
                    .iter()
                    .zip(cuts.windows(2))
                    .map(|(d, w)| d * &(&w[1] - &w[0]))
                    .sum();
                if total != Rational::one() {
                    return Err(Error::BadParameter(format!(
                        "density integrates to {total}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `F(x)`, clamped outside `[0, 1]`.
    pub fn cdf(&self, x: &Rational) -> Rational {
        if !x.is_positive() {
            return Rational::zero();
        }
        if *x >= Rational::one() {
            return Rational::one();
        }
        match self {
            CdfForm::Lebesgue => x.clone(),
            CdfForm::Power(k) => x.pow(*k),
            CdfForm::Piecewise { cuts, densities } => {
                let mut acc = Rational::zero();
                for (d, w) in densities.iter().zip(cuts.windows(2)) {
                    if *x <= w[0] {
                        break;
                    }
                    let right = x.clone().min(w[1].clone());
                    acc += d * &(right - &w[0]);
                }
                acc
            }
        }
    }

    fn density_bound(&self) -> Rational {
        match self {
            CdfForm::Lebesgue => Rational::one(),
            CdfForm::Power(k) => Rational::integer(*k as i64),
            CdfForm::Piecewise { densities, .. } => densities
                .iter()
                .cloned()
                .fold(Rational::one(), Rational::max),
        }
    }
}

#[derive(Clone)]
enum Kind {
    Finite(FiniteMeasure),
    Cdf(CdfForm),
    Bernoulli(Rational),
    Mixture {
        atoms: FiniteMeasure,
        weight: Rational,
        rest: ComputableMeasure,
    },
    Pushforward {
        base: ComputableMeasure,
        maps: Vec<Morphism>,
    },
}

/// A computable probability measure.
#[derive(Clone)]
pub struct ComputableMeasure {
    space: SpaceId,
    kind: Arc<Kind>,
}

impl fmt::Debug for ComputableMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.kind {
            Kind::Finite(m) => write!(f, "Finite({} atoms)", m.len()),
            Kind::Cdf(form) => write!(f, "Cdf({form:?})"),
            Kind::Bernoulli(p) => write!(f, "Bernoulli({p})"),
            Kind::Mixture { weight, rest, .. } => write!(f, "Mixture({weight}, {rest:?})"),
            Kind::Pushforward { base, maps } => write!(f, "Pushforward({base:?}, {maps:?})"),
        }
    }
}

/// Cells of the closed-form measures: cylinders and dyadic intervals.
#[derive(Clone)]
enum Cell {
    Cyl(Vec<bool>),
    Dy(Interval),
}

impl Cell {
    fn root(space: SpaceId) -> Cell {
        match space {
            SpaceId::Cantor => Cell::Cyl(Vec::new()),
            SpaceId::UnitInterval => Cell::Dy(Interval::new(Rational::zero(), Rational::one())),
        }
    }

    fn children(&self) -> [Cell; 2] {
        match self {
            Cell::Cyl(w) => {
                let mut a = w.clone();
                a.push(false);
                let mut b = w.clone();
                b.push(true);
                [Cell::Cyl(a), Cell::Cyl(b)]
            }
            Cell::Dy(iv) => {
                let m = iv.midpoint();
                [
                    Cell::Dy(Interval::new(iv.lo.clone(), m.clone())),
                    Cell::Dy(Interval::new(m, iv.hi.clone())),
                ]
            }
        }
    }

    fn region(&self) -> Region {
        match self {
            Cell::Cyl(w) => Region::Cylinder(w.clone()),
            Cell::Dy(iv) => Region::Interval(iv.clone()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Inside,
    Outside,
}

impl ComputableMeasure {
    fn from_kind(space: SpaceId, kind: Kind) -> Self {
        ComputableMeasure {
            space,
            kind: Arc::new(kind),
        }
    }

    /// Lebesgue measure on `[0, 1]`.
    pub fn lebesgue() -> Self {
        ComputableMeasure::from_kind(SpaceId::UnitInterval, Kind::Cdf(CdfForm::Lebesgue))
    }

    pub fn from_cdf(form: CdfForm) -> Result<Self> {
        form.validate()?;
        Ok(ComputableMeasure::from_kind(
            SpaceId::UnitInterval,
            Kind::Cdf(form),
        ))
    }

    pub fn piecewise_density(cuts: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        ComputableMeasure::from_cdf(CdfForm::Piecewise { cuts, densities })
    }

    /// The product measure on Cantor space with `P(ω_i = 1) = p`.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(Error::BadParameter(format!(
                "bernoulli parameter {p} outside [0, 1]"
            )));
        }
        Ok(ComputableMeasure::from_kind(
            SpaceId::Cantor,
            Kind::Bernoulli(p),
        ))
    }

    pub fn finite(m: FiniteMeasure) -> Self {
        ComputableMeasure::from_kind(m.space(), Kind::Finite(m))
    }

    /// `blend·Σ w_i δ_{p_i} + (1 - blend)·continuous`.
    pub fn atomic_mixture(
        atoms: Vec<(IdealPoint, Rational)>,
        continuous: Option<ComputableMeasure>,
        blend: Rational,
    ) -> Result<Self> {
        if blend.is_negative() || blend > Rational::one() {
            return Err(Error::BadParameter(format!("blend {blend} outside [0, 1]")));
        }
        let space = match (&continuous, atoms.first()) {
            (Some(c), _) => c.space(),
            (None, Some((p, _))) => p.space(),
            (None, None) => return Err(Error::BadParameter("empty mixture".into())),
        };
        if atoms.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::BadParameter("atom weights must be positive".into()));
        }
        if blend.is_zero() {
            return continuous
                .ok_or_else(|| Error::BadParameter("blend 0 needs a continuous part".into()));
        }
        let fm = FiniteMeasure::collect(space, atoms)?;
        if blend == Rational::one() {
            return Ok(ComputableMeasure::finite(fm));
        }
        let rest = continuous
            .ok_or_else(|| Error::BadParameter("blend below 1 needs a continuous part".into()))?;
        Ok(ComputableMeasure::from_kind(
            space,
            Kind::Mixture {
                atoms: fm,
                weight: blend,
                rest,
            },
        ))
    }

    pub fn space(&self) -> SpaceId {
        self.space
    }

    pub fn atom_info(&self) -> AtomInfo {
        match &*self.kind {
            Kind::Finite(m) => {
                AtomInfo::Atomic(m.atoms().iter().map(|a| a.point.clone()).collect())
            }
            Kind::Cdf(_) => AtomInfo::NonAtomic,
            Kind::Bernoulli(p) if p.is_positive() && *p < Rational::one() => AtomInfo::NonAtomic,
            Kind::Bernoulli(p) if p.is_zero() => AtomInfo::Atomic(vec![IdealPoint::word(&[])]),
            Kind::Bernoulli(_) => AtomInfo::Unknown,
            Kind::Mixture { atoms, rest, .. } => match rest.atom_info() {
                AtomInfo::NonAtomic => {
                    AtomInfo::Atomic(atoms.atoms().iter().map(|a| a.point.clone()).collect())
                }
                _ => AtomInfo::Unknown,
            },
            Kind::Pushforward { base, maps } => {
                if base.atom_info().is_non_atomic() && maps.iter().all(Morphism::keeps_non_atomic) {
                    AtomInfo::NonAtomic
                } else {
                    AtomInfo::Unknown
                }
            }
        }
    }

    /// Closed-form mass of the cylinder `[w]` for Bernoulli measures.
    pub fn cylinder_mass(&self, word: &[bool]) -> Option<Rational> {
        match &*self.kind {
            Kind::Bernoulli(p) => Some(bernoulli_mass(p, word)),
            _ => None,
        }
    }

    /// Closed-form CDF value for measures given by a distribution function.
    pub fn closed_cdf(&self, x: &Rational) -> Option<Rational> {
        match &*self.kind {
            Kind::Cdf(form) => Some(form.cdf(x)),
            _ => None,
        }
    }

    fn check_balls(&self, balls: &[IdealBall]) -> Result<()> {
        for b in balls {
            if b.space() != self.space {
                return Err(Error::SpaceMismatch {
                    expected: self.space,
                    found: b.space(),
                });
            }
        }
        Ok(())
    }

    /// Lower bound of `μ(⋃ balls)`, non-decreasing in `t` and converging.
    pub fn lower(&self, balls: &[IdealBall], t: u32) -> Result<Rational> {
        self.check_balls(balls)?;
        self.side_lower(balls, t, Side::Inside)
    }

    /// Lower bound of `μ(X \ ⋃ balls)`, non-decreasing in `t`.
    pub fn exterior_lower(&self, balls: &[IdealBall], t: u32) -> Result<Rational> {
        self.check_balls(balls)?;
        self.side_lower(balls, t, Side::Outside)
    }

    fn side_lower(&self, balls: &[IdealBall], t: u32, side: Side) -> Result<Rational> {
        match &*self.kind {
            Kind::Finite(m) => {
                let inside = m.mass_of(balls)?;
                Ok(if side == Side::Inside {
                    inside
                } else {
                    Rational::one() - inside
                })
            }
            Kind::Cdf(form) => {
                let inside = cdf_union_mass(form, balls);
                Ok(if side == Side::Inside {
                    inside
                } else {
                    Rational::one() - inside
                })
            }
            Kind::Bernoulli(_) => self.walk(&[], balls, t, side),
            Kind::Mixture {
                atoms,
                weight,
                rest,
            } => {
                let a = atoms.mass_of(balls)?;
                let a = if side == Side::Inside {
                    a
                } else {
                    Rational::one() - a
                };
                let r = rest.side_lower(balls, t, side)?;
                Ok(weight * &a + (Rational::one() - weight) * r)
            }
            Kind::Pushforward { base, maps } => base.walk(maps, balls, t, side),
        }
    }

    fn depth_for(&self, t: u32) -> usize {
        match &*self.kind {
            Kind::Bernoulli(p) => t as usize * bernoulli_depth_factor(p) + 1,
            Kind::Cdf(form) => {
                let extra = form.density_bound().ceil_log2().max(0) as usize;
                t as usize + 2 + extra
            }
            _ => t as usize,
        }
    }

    fn cell_mass(&self, cell: &Cell) -> Rational {
        match (&*self.kind, cell) {
            (Kind::Bernoulli(p), Cell::Cyl(w)) => bernoulli_mass(p, w),
            (Kind::Cdf(form), Cell::Dy(iv)) => form.cdf(&iv.hi) - form.cdf(&iv.lo),
            _ => unreachable!("cells exist only for closed-form measures"),
        }
    }

    fn image(maps: &[Morphism], cell: &Cell, stage: u32) -> Result<Region> {
        let mut region = cell.region();
        for m in maps {
            region = m.image(&region, stage)?;
        }
        Ok(region)
    }

    /// Sums the masses of cells whose image is certified inside some ball
    /// (`Inside`) or outside every ball (`Outside`), refining straddling
    /// cells down to the depth allotted to stage `t`.
    fn walk(&self, maps: &[Morphism], balls: &[IdealBall], t: u32, side: Side) -> Result<Rational> {
        let depth = self.depth_for(t) + if maps.is_empty() { 0 } else { 2 };
        let mut total = Rational::zero();
        let mut stack = vec![(Cell::root(self.space), 0usize)];
        while let Some((cell, level)) = stack.pop() {
            let mass = self.cell_mass(&cell);
            if mass.is_zero() {
                continue;
            }
            let region = ComputableMeasure::image(maps, &cell, t)?;
            let rels: Vec<BallRelation> = balls.iter().map(|b| region.relation(b)).collect();
            let any_inside = rels.contains(&BallRelation::Inside);
            let all_out = rels.iter().all(|r| *r == BallRelation::Disjoint);
            let (take, drop) = match side {
                Side::Inside => (any_inside, all_out),
                Side::Outside => (all_out, any_inside),
            };
            if take {
                total += mass;
            } else if !drop && level < depth {
                for child in cell.children() {
                    stack.push((child, level + 1));
                }
            }
        }
        Ok(total)
    }

    /// A finite measure within Prokhorov distance `2^-n`.
    pub fn approximant(&self, n: u32) -> Result<FiniteMeasure> {
        match &*self.kind {
            Kind::Finite(m) => Ok(m.clone()),
            Kind::Cdf(_) | Kind::Bernoulli(_) => self.cell_approximant(&[], n),
            Kind::Mixture {
                atoms,
                weight,
                rest,
            } => {
                let r = rest.approximant(n)?;
                let rest_weight = Rational::one() - weight;
                FiniteMeasure::collect(
                    self.space,
                    atoms
                        .scaled(weight)
                        .chain(r.scaled(&rest_weight))
                        .collect::<Vec<_>>(),
                )
            }
            Kind::Pushforward { base, maps } => base.cell_approximant(maps, n),
        }
    }

    /// Splits cells until every image region has diameter `<= 2^-n` and
    /// puts each cell's mass at its region's center.
    fn cell_approximant(&self, maps: &[Morphism], n: u32) -> Result<FiniteMeasure> {
        let target = maps.iter().fold(self.space, |s, m| m.target(s));
        let eps = Rational::pow2(-(n as i64));
        let cap = self.depth_for(n) + 40;
        let mut atoms = Vec::new();
        let mut stack = vec![(Cell::root(self.space), 0usize)];
        while let Some((cell, level)) = stack.pop() {
            let mass = self.cell_mass(&cell);
            if mass.is_zero() {
                continue;
            }
            let region = ComputableMeasure::image(maps, &cell, n + 2)?;
            if region.diameter() <= eps {
                atoms.push((region.center(), mass));
            } else if level >= cap {
                return Err(Error::TooLarge(format!(
                    "image cells do not shrink below 2^-{n} by depth {cap}"
                )));
            } else {
                for child in cell.children() {
                    stack.push((child, level + 1));
                }
            }
        }
        FiniteMeasure::collect(target, atoms)
    }

    /// Enclosure of `F(x) = μ([0, x])` on the interval from the lower
    /// oracle: `μ([0, x)) <= F(x) <= 1 - μ((x, 1])`.
    pub fn cdf_bounds(&self, x: &Rational, t: u32) -> Result<Interval> {
        if self.space != SpaceId::UnitInterval {
            return Err(Error::SpaceMismatch {
                expected: SpaceId::UnitInterval,
                found: self.space,
            });
        }
        if let Some(v) = self.closed_cdf(x) {
            return Ok(Interval::point(v));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        if *x >= one {
            return Ok(Interval::point(one));
        }
        let lo = if x.is_positive() {
            self.lower(&[IdealBall::interval(zero.clone(), x.clone())?], t)?
        } else {
            zero.clone()
        };
        let right = (&one - x).min(one.clone());
        let hi = &one - &self.lower(&[IdealBall::interval(one.clone(), right)?], t)?;
        Ok(Interval::new(lo.clone().min(hi.clone()), hi.max(lo)))
    }
}

fn bernoulli_mass(p: &Rational, word: &[bool]) -> Rational {
    let ones = word.iter().filter(|&&b| b).count() as u32;
    let zeros = word.len() as u32 - ones;
    p.pow(ones) * (Rational::one() - p).pow(zeros)
}

/// Least `k` with `max(p, 1-p)^k <= 1/2`, so `k` levels halve cell mass.
fn bernoulli_depth_factor(p: &Rational) -> usize {
    let q = p.clone().max(Rational::one() - p);
    if q >= Rational::one() {
        return 1;
    }
    let half = Rational::new(1, 2);
    let mut acc = q.clone();
    let mut k = 1;
    while acc > half {
        acc = acc * q.clone();
        k += 1;
    }
    k
}

/// Exact mass of a union of interval balls under a continuous CDF.
fn cdf_union_mass(form: &CdfForm, balls: &[IdealBall]) -> Rational {
    let zero = Rational::zero();
    let one = Rational::one();
    let mut spans: Vec<(Rational, Rational)> = balls
        .iter()
        .filter_map(IdealBall::interval_ends)
        .map(|(lo, hi)| (lo.max(zero.clone()), hi.min(one.clone())))
        .filter(|(lo, hi)| lo < hi)
        .collect();
    spans.sort();
    let mut total = Rational::zero();
    let mut current: Option<(Rational, Rational)> = None;
    for (lo, hi) in spans {
        current = match current {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += form.cdf(&b) - form.cdf(&a);
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = current {
        total += form.cdf(&b) - form.cdf(&a);
    }
    total
}

/// `μ ∘ f^-1`.
pub fn pushforward(mu: &ComputableMeasure, f: &Morphism) -> Result<ComputableMeasure> {
    if let Some(dom) = f.domain() {
        if dom != mu.space() {
            return Err(Error::SpaceMismatch {
                expected: dom,
                found: mu.space(),
            });
        }
    }
    let target = f.target(mu.space());
    if matches!(f, Morphism::Identity) {
        return Ok(mu.clone());
    }
    let kind = match &*mu.kind {
        Kind::Finite(m) => {
            let mapped = m
                .atoms()
                .iter()
                .map(|a| Ok((f.map_ideal(&a.point)?, a.weight.clone())))
                .collect::<Result<Vec<_>>>()?;
            Kind::Finite(FiniteMeasure::collect(target, mapped)?)
        }
        Kind::Mixture {
            atoms,
            weight,
            rest,
        } => {
            let mapped = atoms
                .atoms()
                .iter()
                .map(|a| Ok((f.map_ideal(&a.point)?, a.weight.clone())))
                .collect::<Result<Vec<_>>>()?;
            Kind::Mixture {
                atoms: FiniteMeasure::collect(target, mapped)?,
                weight: weight.clone(),
                rest: pushforward(rest, f)?,
            }
        }
        Kind::Cdf(_) | Kind::Bernoulli(_) => Kind::Pushforward {
            base: mu.clone(),
            maps: vec![f.clone()],
        },
        Kind::Pushforward { base, maps } => {
            let mut maps = maps.clone();
            maps.push(f.clone());
            Kind::Pushforward {
                base: base.clone(),
                maps,
            }
        }
    };
    Ok(ComputableMeasure::from_kind(target, kind))
}

/// `(lower, upper)` with `lower <= μ(⋃ balls) <= upper`, from the lower
/// oracle and the lower oracle of the exterior, both at stage `n`.
pub fn derive_bounds(
    mu: &ComputableMeasure,
    balls: &[IdealBall],
    n: u32,
) -> Result<(Rational, Rational)> {
    let lower = mu.lower(balls, n)?;
    let upper = Rational::one() - mu.exterior_lower(balls, n)?;
    Ok((lower, upper))
}

/// Upper bound of `μ(⋃ balls)` from the Prokhorov oracle alone: with
/// `ρ(μ, μ_{n+1}) <= 2^-(n+1) < ε = 2^-n`, `μ(U) <= μ_{n+1}(U^ε) + ε`, and
/// `U^ε` lies inside the balls enlarged by `ε`.
pub fn prokhorov_upper(mu: &ComputableMeasure, balls: &[IdealBall], n: u32) -> Result<Rational> {
    mu.check_balls(balls)?;
    let approx = mu.approximant(n + 1)?;
    let eps = Rational::pow2(-(n as i64));
    let grown = balls
        .iter()
        .map(|b| IdealBall::new(b.center().clone(), b.radius() + &eps))
        .collect::<Result<Vec<_>>>()?;
    Ok((approx.mass_of(&grown)? + eps).min(Rational::one()))
}
