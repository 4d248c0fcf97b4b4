//! Nested subgroup chains as truncated (sub)odometers.
//!
//! A `Chain` is a validated sequence Γ_0 = G ⊇ Γ_1 ⊇ ... ⊇ Γ_N of
//! finite-index subgroups; a `TruncatedPoint` is a compatible sequence of
//! cosets, one per level. The full inverse limit is never pretended: the
//! truncation depth N is a first-class parameter, residuality is certified
//! per (radius, depth), and every identity below is exact at depth N.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::coset::{CosetError, SubgroupHandle};
use crate::word::{ball_enumerate, GroupDescriptor, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("nesting violated at level {level}: witness {witness}")]
    NestingViolation { level: usize, witness: Word },
    #[error("chain needs at least one level beyond the whole group")]
    TooShallow,
    #[error("level {0} exceeds the chain depth")]
    DepthOutOfRange(usize),
    #[error("point does not lie in the requested cylinder")]
    PointNotInCylinder,
    #[error("stabilizer scan disagrees with the conjugate-intersection formula at {0}")]
    FormulaMismatch(Word),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Validated chain Γ_0 = G ⊇ Γ_1 ⊇ … ⊇ Γ_N.
#[derive(Clone, Debug)]
pub struct Chain {
    group: GroupDescriptor,
    levels: Vec<SubgroupHandle>,
    strict: Vec<bool>,
    normal: Vec<bool>,
    /// `projections[n]` maps level n+1 states to level n states
    projections: Vec<Vec<u32>>,
}

/// A compatible coset sequence (g_0, …, g_N); g_0 is always 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncatedPoint {
    coords: Vec<u32>,
}

impl TruncatedPoint {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    /// Prefix of a compatible sequence, itself compatible.
    pub fn truncated(&self, depth: usize) -> TruncatedPoint {
        assert!(depth <= self.depth());
        TruncatedPoint { coords: self.coords[..=depth].to_vec() }
    }
}

impl Chain {
    /// Validates nesting and derives the strict/normal flags.
    pub fn from_handles(
        group: &GroupDescriptor,
        deeper: Vec<SubgroupHandle>,
    ) -> Result<Self, ChainError> {
        if deeper.is_empty() {
            return Err(ChainError::TooShallow);
        }
        let mut levels = vec![SubgroupHandle::whole_group(group)];
        levels.extend(deeper);
        for n in 0..levels.len() - 1 {
            match levels[n].contains_subgroup(&levels[n + 1])? {
                crate::coset::Containment::Contains => {}
                crate::coset::Containment::NotContained { witness } => {
                    return Err(ChainError::NestingViolation { level: n + 1, witness });
                }
            }
        }
        let strict: Vec<bool> = (0..levels.len() - 1)
            .map(|n| levels[n + 1].index() >= 2 * levels[n].index())
            .collect();
        let normal: Vec<bool> = levels.iter().map(|h| h.is_normal()).collect();
        let projections: Vec<Vec<u32>> = (0..levels.len() - 1)
            .map(|n| {
                levels[n + 1]
                    .transversal()
                    .iter()
                    .map(|t| levels[n].coset_of(t))
                    .collect()
            })
            .collect();
        Ok(Chain { group: group.clone(), levels, strict, normal, projections })
    }

    pub fn from_generator_lists(
        group: &GroupDescriptor,
        lists: &[Vec<Word>],
        max_states: usize,
    ) -> Result<Self, ChainError> {
        let mut handles = Vec::with_capacity(lists.len());
        for gens in lists {
            handles.push(SubgroupHandle::from_generators(group, gens, max_states)?);
        }
        Self::from_handles(group, handles)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    /// Deepest level index N.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &SubgroupHandle {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[SubgroupHandle] {
        &self.levels
    }

    pub fn strict_flags(&self) -> &[bool] {
        &self.strict
    }

    pub fn normal_flags(&self) -> &[bool] {
        &self.normal
    }

    pub fn truncate(&self, depth: usize) -> Result<Chain, ChainError> {
        if depth == 0 || depth > self.depth() {
            return Err(ChainError::DepthOutOfRange(depth));
        }
        Ok(Chain {
            group: self.group.clone(),
            levels: self.levels[..=depth].to_vec(),
            strict: self.strict[..depth].to_vec(),
            normal: self.normal[..=depth].to_vec(),
            projections: self.projections[..depth].to_vec(),
        })
    }

    /// Nonidentity ball elements still inside Γ_N; an empty list certifies
    /// residuality at (radius, depth).
    pub fn residuality_witnesses(&self, radius: usize) -> Result<Vec<Word>, ChainError> {
        let deepest = self.levels.last().unwrap();
        Ok(ball_enumerate(&self.group, radius)?
            .into_iter()
            .filter(|w| !w.is_identity() && deepest.contains_word(w))
            .collect())
    }

    pub fn point_of_identity(&self) -> TruncatedPoint {
        TruncatedPoint { coords: vec![0; self.levels.len()] }
    }

    pub fn point_of_word(&self, g: &Word) -> TruncatedPoint {
        let coords = self.levels.iter().map(|h| h.coset_of(g)).collect();
        let p = TruncatedPoint { coords };
        self.assert_compatible(&p);
        p
    }

    fn assert_compatible(&self, p: &TruncatedPoint) {
        assert_eq!(p.coords.len(), self.levels.len());
        assert_eq!(p.coords[0], 0);
        for n in 0..self.projections.len() {
            assert_eq!(
                self.projections[n][p.coords[n + 1] as usize],
                p.coords[n],
                "coset sequence is not compatible at level {n}"
            );
        }
    }

    /// Coordinatewise left action; compatibility is preserved and asserted.
    pub fn act(&self, g: &Word, p: &TruncatedPoint) -> TruncatedPoint {
        let coords = self
            .levels
            .iter()
            .zip(&p.coords)
            .map(|(h, &s)| h.table().apply_word(g, s))
            .collect();
        let out = TruncatedPoint { coords };
        self.assert_compatible(&out);
        out
    }

    /// Ball elements fixing `p`, computed by scanning and cross-checked
    /// against the conjugate-intersection formula.
    pub fn stabilizer_ball(
        &self,
        p: &TruncatedPoint,
        radius: usize,
    ) -> Result<BTreeSet<Word>, ChainError> {
        let ball = ball_enumerate(&self.group, radius)?;
        let scanned: BTreeSet<Word> =
            ball.iter().filter(|w| self.act(w, p) == *p).cloned().collect();
        let conjugates: Vec<SubgroupHandle> = self
            .levels
            .iter()
            .zip(&p.coords)
            .map(|(h, &s)| h.conjugate(&h.transversal()[s as usize]))
            .collect::<Result<_, _>>()?;
        let formula: BTreeSet<Word> = ball
            .iter()
            .filter(|w| conjugates.iter().all(|c| c.contains_word(w)))
            .cloned()
            .collect();
        if scanned != formula {
            let diff = scanned.symmetric_difference(&formula).next().unwrap().clone();
            return Err(ChainError::FormulaMismatch(diff));
        }
        Ok(scanned)
    }

    /// Return times of `p` to the cylinder [level; state], within a ball.
    /// Equals the conjugate of Γ_level by the cylinder representative.
    pub fn return_times(
        &self,
        level: usize,
        state: u32,
        p: &TruncatedPoint,
        radius: usize,
    ) -> Result<BTreeSet<Word>, ChainError> {
        if level > self.depth() {
            return Err(ChainError::DepthOutOfRange(level));
        }
        if p.coords[level] != state {
            return Err(ChainError::PointNotInCylinder);
        }
        let ball = ball_enumerate(&self.group, radius)?;
        let scanned: BTreeSet<Word> = ball
            .iter()
            .filter(|w| self.act(w, p).coords[level] == state)
            .cloned()
            .collect();
        let handle = &self.levels[level];
        let conj = handle.conjugate(&handle.transversal()[state as usize])?;
        let formula: BTreeSet<Word> =
            ball.iter().filter(|w| conj.contains_word(w)).cloned().collect();
        if scanned != formula {
            let diff = scanned.symmetric_difference(&formula).next().unwrap().clone();
            return Err(ChainError::FormulaMismatch(diff));
        }
        Ok(scanned)
    }

    /// Exact Haar measure of a level-`n` cylinder.
    pub fn haar_cylinder(&self, n: usize) -> Result<BigRational, ChainError> {
        if n > self.depth() {
            return Err(ChainError::DepthOutOfRange(n));
        }
        Ok(BigRational::new(BigInt::one(), BigInt::from(self.levels[n].index())))
    }
}

/// Induced factor map between two chains over the same group: level `i` of
/// the target is read off level `k_i` of the source, with `k_i` the least
/// admissible choice.
#[derive(Clone, Debug)]
pub struct FactorMap {
    /// per target level i, the least source level k_i with Γ¹_{k_i} ⊆ Γ²_i
    pub source_levels: Vec<usize>,
    /// `coset_maps[i][state of source level k_i]` = state of target level i
    coset_maps: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct FactorObstruction {
    /// first target level with no admissible source level
    pub level: usize,
    /// witness from the deepest attempt: element of Γ¹_{N1} outside Γ²_level
    pub witness: Word,
}

pub fn factor_between(
    source: &Chain,
    target: &Chain,
) -> Result<Result<FactorMap, FactorObstruction>, ChainError> {
    if source.group() != target.group() {
        return Err(ChainError::Coset(CosetError::GroupMismatch));
    }
    let mut source_levels = Vec::with_capacity(target.depth() + 1);
    let mut coset_maps = Vec::with_capacity(target.depth() + 1);
    for i in 0..=target.depth() {
        let mut found = None;
        let mut deepest_witness = None;
        for k in 0..=source.depth() {
            match target.level(i).contains_subgroup(source.level(k))? {
                crate::coset::Containment::Contains => {
                    found = Some(k);
                    break;
                }
                crate::coset::Containment::NotContained { witness } => {
                    deepest_witness = Some(witness);
                }
            }
        }
        match found {
            Some(k) => {
                let map: Vec<u32> = source
                    .level(k)
                    .transversal()
                    .iter()
                    .map(|t| target.level(i).coset_of(t))
                    .collect();
                source_levels.push(k);
                coset_maps.push(map);
            }
            None => {
                return Ok(Err(FactorObstruction {
                    level: i,
                    witness: deepest_witness.expect("at least one level was tried"),
                }));
            }
        }
    }
    debug_assert!(source_levels.windows(2).all(|w| w[0] <= w[1]));
    Ok(Ok(FactorMap { source_levels, coset_maps }))
}

impl FactorMap {
    pub fn apply(&self, p: &TruncatedPoint) -> TruncatedPoint {
        let coords = self
            .source_levels
            .iter()
            .zip(&self.coset_maps)
            .map(|(&k, map)| map[p.coords[k] as usize])
            .collect();
        TruncatedPoint { coords }
    }
}

/// Chain of normal cores covering a subodometer, with the factor map onto
/// the original chain (level-for-level).
pub fn normal_cover(chain: &Chain, cap: usize) -> Result<(Chain, FactorMap), ChainError> {
    let cores: Vec<SubgroupHandle> = chain.levels[1..]
        .iter()
        .map(|h| h.normal_core(cap))
        .collect::<Result<_, _>>()?;
    let cover = Chain::from_handles(&chain.group, cores)?;
    for n in 0..=cover.depth() {
        if !chain.level(n).contains_subgroup(cover.level(n))?.holds() {
            return Err(ChainError::Coset(CosetError::SelfCheck(format!(
                "core at level {n} is not inside its subgroup"
            ))));
        }
    }
    let map = factor_between(&cover, chain)?.map_err(|obs| {
        ChainError::Coset(CosetError::SelfCheck(format!(
            "cover does not factor onto the chain at level {}",
            obs.level
        )))
    })?;
    if map.source_levels.iter().enumerate().any(|(i, &k)| k > i) {
        return Err(ChainError::Coset(CosetError::SelfCheck(
            "cover factor map is not level-for-level".into(),
        )));
    }
    Ok((cover, map))
}

/// A character of the group with values written additively as exact
/// rationals mod 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CharacterVector {
    q: Vec<BigRational>,
}

impl CharacterVector {
    pub fn components(&self) -> &[BigRational] {
        &self.q
    }

    /// χ(w) as the fractional part of ⟨q, ab(w)⟩.
    pub fn eval(&self, w: &Word) -> BigRational {
        let dot: BigRational = self
            .q
            .iter()
            .zip(w.exponents())
            .map(|(qi, e)| qi * BigRational::from(BigInt::from(e)))
            .sum();
        frac_mod_one(dot)
    }

    pub fn is_trivial(&self) -> bool {
        self.q.iter().all(|x| x.is_zero())
    }
}

pub fn frac_mod_one(x: BigRational) -> BigRational {
    let f = x.floor();
    let out = x - f;
    debug_assert!(!out.is_negative() && out < BigRational::one());
    out
}

/// All characters of G trivial on Γ_n, through the abelianized lattice.
#[derive(Clone, Debug)]
pub struct CharacterGroup {
    pub level: usize,
    /// invariant factors > 1 of the torsion part
    pub torsion: Vec<BigInt>,
    /// rank of the free part; zero for finite-index subgroups
    pub free_rank: usize,
    pub characters: Vec<CharacterVector>,
}

impl CharacterGroup {
    pub fn order(&self) -> usize {
        self.characters.len()
    }
}

pub fn eigenvalue_group(chain: &Chain, n: usize) -> Result<CharacterGroup, ChainError> {
    if n > chain.depth() {
        return Err(ChainError::DepthOutOfRange(n));
    }
    let el = chain.level(n).eigen_lattice();
    let rank = chain.group().rank();
    let diag: Vec<BigInt> = el.smith.diag.iter().take(el.smith.rank).cloned().collect();
    // enumerate y with d_i y_i integral, torsion coordinates only
    let mut counters: Vec<u64> = vec![0; diag.len()];
    let radices: Vec<u64> = diag
        .iter()
        .map(|d| d.to_string().parse::<u64>().expect("desk-scale diagonal"))
        .collect();
    let mut characters = Vec::new();
    loop {
        let y: Vec<BigRational> = counters
            .iter()
            .zip(&diag)
            .map(|(&k, d)| BigRational::new(BigInt::from(k), d.clone()))
            .collect();
        let q: Vec<BigRational> = (0..rank)
            .map(|i| {
                let dot: BigRational = (0..diag.len())
                    .map(|j| BigRational::from(el.smith.q[(i, j)].clone()) * y[j].clone())
                    .sum();
                frac_mod_one(dot)
            })
            .collect();
        characters.push(CharacterVector { q });
        // mixed-radix increment, last coordinate fastest
        let mut c = counters.len();
        loop {
            if c == 0 {
                break;
            }
            c -= 1;
            counters[c] += 1;
            if counters[c] < radices[c] {
                break;
            }
            counters[c] = 0;
            if c == 0 {
                c = usize::MAX;
                break;
            }
        }
        if c == usize::MAX || counters.iter().all(|&k| k == 0) {
            break;
        }
    }
    // sanity spot-check: characters annihilate Schreier generators
    for ch in characters.iter().take(4) {
        for s in chain.level(n).schreier_generators().iter().take(16) {
            debug_assert!(ch.eval(s).is_zero());
        }
    }
    Ok(CharacterGroup { level: n, torsion: el.torsion, free_rank: el.free_rank, characters })
}
