//! Clopen partition refinement, Kakutani–Rohlin towers, incidence matrices
//! and invariant-measure estimates over a finite orbit sample.
//!
//! A sample point is a truncated coset vector together with the exact
//! window pattern it induces; every evaluation of the array factors through
//! that vector, so translating points is exact table arithmetic and never
//! depends on which witness reached the vector first. Points whose window
//! touches an undecided position are dropped, and the space is shrunk to a
//! translate-closed core for the tower levels in use: all set operations
//! afterwards are exact on the sample, and anything that would still need a
//! point outside it errors loudly rather than guessing.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::chain::TruncatedPoint;
use crate::snf::IntegerMatrix;
use crate::toeplitz::{ToeplitzError, ToeplitzSpec};
use crate::word::{ball_enumerate, ball_unchecked, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("translate by {word} leaves the sample space; enlarge sample_radius")]
    TranslateEscapesSpace { word: Word },
    #[error("window position {0} is not part of the sample window")]
    MissingWindowPosition(Word),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("partition cell is empty: {0}")]
    EmptyCell(String),
    #[error("inclusion undecided: {0}")]
    InclusionUndecided(String),
    #[error("column {col} sums to {got}, expected {expected}")]
    ColumnSumViolation { col: usize, got: String, expected: String },
    #[error("refinement self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Toeplitz(#[from] ToeplitzError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A sampled point: a truncated coset vector, its exact window pattern, and
/// the first shortlex witness that reached it.
#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub witness: Word,
    pub point: TruncatedPoint,
    pub pattern: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct SampleSpace {
    window: Vec<Word>,
    points: Vec<SamplePoint>,
    by_coords: BTreeMap<TruncatedPoint, usize>,
    pub dropped: usize,
    /// pattern set unchanged when the sample radius is doubled
    pub stable: bool,
}

/// Subset of sample-space points.
pub type Clopen = BTreeSet<usize>;

/// Plain finite partition of the sample space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub cells: Vec<Clopen>,
}

impl Partition {
    pub fn new(cells: Vec<Clopen>, space: &SampleSpace) -> Result<Self, PartitionError> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        for (i, c) in cells.iter().enumerate() {
            if c.is_empty() {
                return Err(PartitionError::EmptyCell(format!("cell {i}")));
            }
            for &p in c {
                if !seen.insert(p) {
                    return Err(PartitionError::NotAPartition(format!(
                        "point {p} covered twice"
                    )));
                }
            }
        }
        if seen.len() != space.len() {
            return Err(PartitionError::NotAPartition("cells do not cover the space".into()));
        }
        Ok(Partition { cells })
    }

    pub fn whole(space: &SampleSpace) -> Self {
        Partition { cells: vec![(0..space.len()).collect()] }
    }

    fn cell_of(&self, p: usize) -> usize {
        self.cells.iter().position(|c| c.contains(&p)).expect("partition covers the space")
    }
}

/// Exact window pattern induced by a coset vector, if every position is
/// decided at the truncation.
pub fn point_pattern(
    spec: &ToeplitzSpec,
    window: &[Word],
    point: &TruncatedPoint,
) -> Option<Vec<u8>> {
    let chain = spec.chain();
    let mut pattern = Vec::with_capacity(window.len());
    for u in window {
        let v = spec.evaluate_point(&chain.act(u, point));
        if !v.exact {
            return None;
        }
        pattern.push(v.symbol);
    }
    Some(pattern)
}

impl SampleSpace {
    /// Samples the orbit of the identity point over ball(sample_radius),
    /// deduplicated by coset vector; points with undecided window values
    /// are dropped and counted. Stability compares the pattern sets of the
    /// plain and the doubled scan. The result is shrunk to its
    /// translate-closed core for tower levels up to `closure_level`:
    /// truncation leaves undecidable positions near the marker tails, and
    /// without the core the refinement algorithm would hit them at any
    /// sample radius.
    pub fn build(
        spec: &ToeplitzSpec,
        window: &[Word],
        sample_radius: usize,
        closure_level: usize,
    ) -> Result<Self, PartitionError> {
        let small = scan(spec, window, sample_radius);
        let (mut points, mut dropped) = scan(spec, window, 2 * sample_radius);
        let small_set: BTreeSet<&Vec<u8>> = small.0.iter().map(|p| &p.pattern).collect();
        let big_set: BTreeSet<&Vec<u8>> = points.iter().map(|p| &p.pattern).collect();
        // enlarging the radius never removes a pattern
        debug_assert!(small_set.is_subset(&big_set));
        let stable = small_set == big_set;
        if closure_level > 0 {
            dropped += close_under_translates(spec, &mut points, closure_level);
        }
        let by_coords = points.iter().enumerate().map(|(i, p)| (p.point.clone(), i)).collect();
        Ok(SampleSpace { window: window.to_vec(), points, by_coords, dropped, stable })
    }

    pub fn window(&self) -> &[Word] {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, id: usize) -> &SamplePoint {
        &self.points[id]
    }

    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    /// The sampled point h·p, by exact coset arithmetic.
    pub fn translate(
        &self,
        spec: &ToeplitzSpec,
        h: &Word,
        id: usize,
    ) -> Result<usize, PartitionError> {
        let moved = spec.chain().act(h, &self.points[id].point);
        self.by_coords
            .get(&moved)
            .copied()
            .ok_or(PartitionError::TranslateEscapesSpace { word: h.clone() })
    }

    pub fn translate_set(
        &self,
        spec: &ToeplitzSpec,
        h: &Word,
        set: &Clopen,
    ) -> Result<Clopen, PartitionError> {
        set.iter().map(|&p| self.translate(spec, h, p)).collect()
    }
}

fn scan(spec: &ToeplitzSpec, window: &[Word], radius: usize) -> (Vec<SamplePoint>, usize) {
    let chain = spec.chain();
    let mut points: Vec<SamplePoint> = Vec::new();
    let mut seen: BTreeSet<TruncatedPoint> = BTreeSet::new();
    let mut dropped: BTreeSet<TruncatedPoint> = BTreeSet::new();
    for g in ball_unchecked(chain.group(), radius) {
        let point = chain.point_of_word(&g);
        if seen.contains(&point) || dropped.contains(&point) {
            continue;
        }
        match point_pattern(spec, window, &point) {
            Some(pattern) => {
                seen.insert(point.clone());
                points.push(SamplePoint { witness: g, point, pattern });
            }
            None => {
                dropped.insert(point);
            }
        }
    }
    (points, dropped.len())
}

/// Largest subset closed under the translates the tower machinery needs;
/// returns the number of removed points.
fn close_under_translates(
    spec: &ToeplitzSpec,
    points: &mut Vec<SamplePoint>,
    closure_level: usize,
) -> usize {
    let chain = spec.chain();
    // per level, coset state -> fundamental domain word
    let rep_of_state: Vec<BTreeMap<u32, Word>> = (0..=closure_level)
        .map(|n| {
            spec.tower()
                .domain(n)
                .iter()
                .map(|w| (chain.level(n).coset_of(w), w.clone()))
                .collect()
        })
        .collect();
    let before = points.len();
    let mut alive: BTreeSet<TruncatedPoint> = points.iter().map(|p| p.point.clone()).collect();
    loop {
        let mut dead: Vec<TruncatedPoint> = Vec::new();
        for p in alive.iter() {
            let mut ok = true;
            'levels: for n in 0..=closure_level {
                let rep = &rep_of_state[n][&p.coords()[n]];
                if !alive.contains(&chain.act(&rep.inverse(), p)) {
                    ok = false;
                    break 'levels;
                }
                if p.coords()[n] == 0 {
                    for w in spec.tower().domain(n) {
                        if !alive.contains(&chain.act(w, p)) {
                            ok = false;
                            break 'levels;
                        }
                    }
                }
            }
            if !ok {
                dead.push(p.clone());
            }
        }
        if dead.is_empty() {
            break;
        }
        for d in dead {
            alive.remove(&d);
        }
    }
    points.retain(|p| alive.contains(&p.point));
    before - points.len()
}

/// Tower partition {w·C_j : w ∈ D, j}: base cells over the coset of the
/// identity, translated along a fundamental-domain transversal.
#[derive(Clone, Debug)]
pub struct LabeledPartition {
    pub base: Vec<Clopen>,
    pub transversal: Vec<Word>,
    /// `cells[w][j] = w·base[j]`
    pub cells: Vec<Vec<Clopen>>,
}

impl LabeledPartition {
    pub fn flat_cells(&self) -> Vec<Clopen> {
        self.cells.iter().flatten().cloned().collect()
    }

    pub fn base_union(&self) -> Clopen {
        self.base.iter().flatten().copied().collect()
    }

    fn validate(&self, space: &SampleSpace) -> Result<(), PartitionError> {
        Partition::new(self.flat_cells(), space)?;
        for (j, b) in self.base.iter().enumerate() {
            if b.is_empty() {
                return Err(PartitionError::EmptyCell(format!("base cell {j}")));
            }
        }
        Ok(())
    }
}

/// Coset partition of the sample space at a chain level: one tower with a
/// single base cell per the level's fundamental domain.
pub fn base_partition(
    spec: &ToeplitzSpec,
    level: usize,
    space: &SampleSpace,
) -> Result<LabeledPartition, PartitionError> {
    if level > spec.depth() {
        return Err(PartitionError::Toeplitz(ToeplitzError::DepthOutOfRange(level)));
    }
    let domain = spec.tower().domain(level).to_vec();
    let chain = spec.chain();
    let state_to_idx: BTreeMap<u32, usize> = domain
        .iter()
        .enumerate()
        .map(|(i, w)| (chain.level(level).coset_of(w), i))
        .collect();
    let mut cells: Vec<Vec<Clopen>> = vec![vec![Clopen::new()]; domain.len()];
    for (id, p) in space.points().iter().enumerate() {
        let idx = state_to_idx[&p.point.coords()[level]];
        cells[idx][0].insert(id);
    }
    let base = cells[0].clone();
    let out = LabeledPartition { base, transversal: domain, cells };
    out.validate(space)?;
    Ok(out)
}

/// Sampled return-time law: translating base points by γ ∈ Γ_level within
/// the test ball never leaves the base (translates outside the sample are
/// allowed to escape).
pub fn check_return_law(
    spec: &ToeplitzSpec,
    level: usize,
    partition: &LabeledPartition,
    space: &SampleSpace,
    test_radius: usize,
) -> Result<usize, PartitionError> {
    let base = partition.base_union();
    let mut checked = 0;
    for g in ball_enumerate(spec.chain().group(), test_radius)? {
        if !spec.chain().level(level).contains_word(&g) {
            continue;
        }
        for &p in &base {
            match space.translate(spec, &g, p) {
                Ok(q) => {
                    if !base.contains(&q) {
                        return Err(PartitionError::SelfCheck(format!(
                            "return-time law fails: γ = {g} maps a base point outside"
                        )));
                    }
                    checked += 1;
                }
                Err(PartitionError::TranslateEscapesSpace { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(checked)
}

/// The refinement R ∧ Q: walks the transversal once, splitting every base
/// cell by the refiner cell that its translate lands in. Cell order is
/// (step, parent cell, refiner cell), so the output is deterministic.
pub fn kr_refine(
    refiner: &Partition,
    q: &LabeledPartition,
    space: &SampleSpace,
    spec: &ToeplitzSpec,
) -> Result<LabeledPartition, PartitionError> {
    let mut current: Vec<Clopen> = q.base.clone();
    for w in &q.transversal {
        let mut next: Vec<Clopen> = Vec::new();
        for cell in &current {
            let mut groups: BTreeMap<usize, Clopen> = BTreeMap::new();
            for &p in cell {
                let t = space.translate(spec, w, p)?;
                groups.entry(refiner.cell_of(t)).or_default().insert(p);
            }
            next.extend(groups.into_values());
        }
        current = next;
    }
    let mut cells = Vec::with_capacity(q.transversal.len());
    for w in &q.transversal {
        let mut row = Vec::with_capacity(current.len());
        for b in &current {
            row.push(space.translate_set(spec, w, b)?);
        }
        cells.push(row);
    }
    let out = LabeledPartition { base: current, transversal: q.transversal.clone(), cells };
    out.validate(space)?;
    if out.base_union() != q.base_union() {
        return Err(PartitionError::SelfCheck("refinement changed the tower base".into()));
    }
    check_finer_than(&out.flat_cells(), &refiner.cells, "refiner")?;
    check_finer_than(&out.flat_cells(), &q.flat_cells(), "tower")?;
    Ok(out)
}

fn check_finer_than(
    fine: &[Clopen],
    coarse: &[Clopen],
    what: &str,
) -> Result<(), PartitionError> {
    for cell in fine {
        let hosts = coarse.iter().filter(|c| cell.is_subset(c)).count();
        if hosts != 1 {
            return Err(PartitionError::SelfCheck(format!(
                "output cell lies in {hosts} cells of the {what}"
            )));
        }
    }
    Ok(())
}

/// Nested Kakutani–Rohlin towers P_0, …, P_M: P_0 = R_0 ∧ Q_0 and
/// P_n = P_{n−1} ∧ (R_n ∧ Q_n), with Q_n the coset partition at level n.
pub fn kr_tower_sequence(
    spec: &ToeplitzSpec,
    space: &SampleSpace,
    refiners: &[Partition],
) -> Result<Vec<LabeledPartition>, PartitionError> {
    assert!(!refiners.is_empty());
    let mut out: Vec<LabeledPartition> = Vec::new();
    for (n, refiner) in refiners.iter().enumerate() {
        let q = base_partition(spec, n, space)?;
        let refined = kr_refine(refiner, &q, space, spec)?;
        let p = if let Some(prev) = out.last() {
            let prev_cells = Partition { cells: prev.flat_cells() };
            kr_refine(&prev_cells, &refined, space, spec)?
        } else {
            refined
        };
        if let Some(prev) = out.last() {
            if !p.base_union().is_subset(&prev.base_union()) {
                return Err(PartitionError::SelfCheck(format!(
                    "tower bases do not nest at level {n}"
                )));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Default refiners: symbol patterns restricted to the growing fundamental
/// domains D_0 ⊆ D_1 ⊆ …, mirroring a sequence of clopen partitions that
/// spans the sampled topology.
pub fn symbol_refiners(
    spec: &ToeplitzSpec,
    space: &SampleSpace,
    max_level: usize,
) -> Result<Vec<Partition>, PartitionError> {
    let mut out = Vec::with_capacity(max_level + 1);
    for n in 0..=max_level {
        let positions: Vec<usize> = spec
            .tower()
            .domain(n)
            .iter()
            .map(|w| {
                space
                    .window()
                    .iter()
                    .position(|u| u == w)
                    .ok_or_else(|| PartitionError::MissingWindowPosition(w.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut groups: BTreeMap<Vec<u8>, Clopen> = BTreeMap::new();
        for (id, p) in space.points().iter().enumerate() {
            let key: Vec<u8> = positions.iter().map(|&i| p.pattern[i]).collect();
            groups.entry(key).or_default().insert(id);
        }
        out.push(Partition::new(groups.into_values().collect(), space)?);
    }
    Ok(out)
}

/// Trivial refiners: every R_n is the whole space, so P_n = Q_n and the
/// towers have a single base cell each.
pub fn trivial_refiners(space: &SampleSpace, max_level: usize) -> Vec<Partition> {
    (0..=max_level).map(|_| Partition::whole(space)).collect()
}

/// A_n(i, j) = #{w ∈ D_{n+1} : w·C_{n+1,j} ⊆ C_{n,i}}; every column sums to
/// |D_{n+1}|/|D_n| exactly.
pub fn incidence_matrix(
    upper: &LabeledPartition,
    lower: &LabeledPartition,
    space: &SampleSpace,
    spec: &ToeplitzSpec,
) -> Result<IntegerMatrix, PartitionError> {
    let k_up = upper.base.len();
    let k_low = lower.base.len();
    let mut matrix = IntegerMatrix::zero(k_up, k_low);
    let upper_flat = upper.flat_cells();
    for (j, cell) in lower.base.iter().enumerate() {
        for w in &lower.transversal {
            let image = space.translate_set(spec, w, cell).map_err(|e| match e {
                PartitionError::TranslateEscapesSpace { word } => {
                    PartitionError::InclusionUndecided(format!(
                        "translate by {word} leaves the sample space"
                    ))
                }
                other => other,
            })?;
            let mut host = None;
            for (i, up) in upper.base.iter().enumerate() {
                if image.is_subset(up) {
                    host = Some(i);
                    break;
                }
            }
            match host {
                Some(i) => {
                    matrix[(i, j)] += BigInt::one();
                }
                None => {
                    // must sit inside exactly one non-base cell of the tower
                    if upper_flat.iter().filter(|c| image.is_subset(c)).count() != 1 {
                        return Err(PartitionError::InclusionUndecided(format!(
                            "translate by {w} of lower cell {j} straddles upper cells"
                        )));
                    }
                }
            }
        }
    }
    let expected = BigInt::from(lower.transversal.len() / upper.transversal.len());
    for j in 0..k_low {
        let got = matrix.column_sum(j);
        if got != expected {
            return Err(PartitionError::ColumnSumViolation {
                col: j,
                got: got.to_string(),
                expected: expected.to_string(),
            });
        }
    }
    Ok(matrix)
}

/// Exact-rational vector over a tower base with Σ = 1/|D_n|.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexVector {
    pub entries: Vec<BigRational>,
}

impl SimplexVector {
    pub fn validate(&self, domain_size: usize) -> Result<(), PartitionError> {
        if self.entries.iter().any(|x| x < &BigRational::zero()) {
            return Err(PartitionError::SelfCheck("negative simplex coordinate".into()));
        }
        let sum: BigRational = self.entries.iter().cloned().sum();
        let expected = BigRational::new(BigInt::one(), BigInt::from(domain_size));
        if sum != expected {
            return Err(PartitionError::SelfCheck(format!(
                "simplex sum {sum} differs from 1/{domain_size}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LevelEstimate {
    /// coordinatewise hull of A_n ⋯ A_{M−1}(Δ_M) inside Δ_n
    pub intervals: Vec<(BigRational, BigRational)>,
    /// propagated barycenter; satisfies μ_n = A_n μ_{n+1} exactly
    pub point: SimplexVector,
    pub width: BigRational,
}

#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub levels: Vec<LevelEstimate>,
    /// interval diameter at the top level
    pub diameter: BigRational,
    pub unique_ergodicity: bool,
    pub tolerance: BigRational,
    /// with a Følner transversal sequence the estimate is an invariant
    /// measure; otherwise it is only an inverse-limit element
    pub folner: bool,
}

/// Exact interval hulls of the nested simplex images, the propagated
/// barycenter estimate, and the unique-ergodicity indicator.
pub fn measure_estimate(
    matrices: &[IntegerMatrix],
    folner: bool,
    tolerance: &BigRational,
) -> Result<MeasureReport, PartitionError> {
    assert!(!matrices.is_empty());
    let levels_count = matrices.len() + 1;
    // |D_n| from the column sums, |D_0| = 1
    let mut dn: Vec<BigInt> = vec![BigInt::one()];
    for a in matrices {
        let q = a.column_sum(0);
        dn.push(dn.last().unwrap() * &q);
    }
    let k_last = matrices.last().unwrap().cols;
    let deep_scale = BigRational::new(BigInt::one(), dn[levels_count - 1].clone());
    let bary = BigRational::new(BigInt::one(), BigInt::from(k_last) * &dn[levels_count - 1]);
    // accumulate products A_n ⋯ A_{M−1} from the deepest level up
    let mut products: Vec<Option<IntegerMatrix>> = vec![None; levels_count];
    let mut acc: Option<IntegerMatrix> = None;
    for n in (0..matrices.len()).rev() {
        let next = match &acc {
            None => matrices[n].clone(),
            Some(p) => matrices[n].mul(p),
        };
        products[n] = Some(next.clone());
        acc = Some(next);
    }
    let mut levels = Vec::with_capacity(levels_count);
    for n in 0..levels_count {
        let (intervals, point) = match &products[n] {
            Some(p) => {
                let rows = p.rows;
                let cols = p.cols;
                let mut intervals = Vec::with_capacity(rows);
                for i in 0..rows {
                    let mut lo = p[(i, 0)].clone();
                    let mut hi = p[(i, 0)].clone();
                    for j in 1..cols {
                        if p[(i, j)] < lo {
                            lo = p[(i, j)].clone();
                        }
                        if p[(i, j)] > hi {
                            hi = p[(i, j)].clone();
                        }
                    }
                    intervals.push((
                        BigRational::from(lo) * &deep_scale,
                        BigRational::from(hi) * &deep_scale,
                    ));
                }
                let point: Vec<BigRational> = (0..rows)
                    .map(|i| {
                        (0..cols)
                            .map(|j| BigRational::from(p[(i, j)].clone()) * &bary)
                            .sum()
                    })
                    .collect();
                (intervals, SimplexVector { entries: point })
            }
            None => {
                // deepest level: Δ_M itself
                let intervals = vec![(BigRational::zero(), deep_scale.clone()); k_last];
                let point = SimplexVector { entries: vec![bary.clone(); k_last] };
                (intervals, point)
            }
        };
        let width = intervals
            .iter()
            .map(|(lo, hi)| hi - lo)
            .max()
            .unwrap_or_else(BigRational::zero);
        let dsize: usize = dn[n].to_string().parse().expect("desk-scale domain");
        point.validate(dsize)?;
        levels.push(LevelEstimate { intervals, point, width });
    }
    // exact consistency μ_n = A_n μ_{n+1}
    for n in 0..matrices.len() {
        let a = &matrices[n];
        let next = &levels[n + 1].point.entries;
        for i in 0..a.rows {
            let expect: BigRational = (0..a.cols)
                .map(|j| BigRational::from(a[(i, j)].clone()) * &next[j])
                .sum();
            if expect != levels[n].point.entries[i] {
                return Err(PartitionError::SelfCheck(format!(
                    "μ_{n} ≠ A_{n} μ_{} at coordinate {i}",
                    n + 1
                )));
            }
        }
    }
    let diameter = levels[0].width.clone();
    let unique_ergodicity = &diameter < tolerance;
    Ok(MeasureReport {
        levels,
        diameter,
        unique_ergodicity,
        tolerance: tolerance.clone(),
        folner,
    })
}

pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}
