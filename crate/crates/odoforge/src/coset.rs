//! Finite-index subgroups as coset tables.
//!
//! A `CosetTable` stores, for each generator, the permutation induced by
//! left multiplication on the left cosets `w·Γ`; state 0 is the coset of the
//! identity. Free-group subgroups are built by folding the loops of their
//! generators at a base vertex (the folded graph must be complete, which
//! certifies finite index); free-abelian subgroups come from the Hermite
//! basis of their exponent lattice.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::snf::{self, IntegerMatrix, SmithForm};
use crate::word::{ball_unchecked, sym, sym_inverse, GroupDescriptor, GroupKind, Word};

pub const DEFAULT_MAX_STATES: usize = 10_000;
pub const DEFAULT_CORE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error("subgroup does not have finite index: {0}")]
    NotFiniteIndex(String),
    #[error("state cap {0} exceeded")]
    StateCap(usize),
    #[error("core cap {0} exceeded")]
    CoreCap(usize),
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("generating set is empty after removing identities")]
    EmptyGenerators,
    #[error("internal consistency check failed: {0}")]
    SelfCheck(String),
}

#[derive(Clone, Debug)]
pub struct CosetTable {
    group: GroupDescriptor,
    n: usize,
    /// fwd[g][s] = state of a_g · (coset s)
    fwd: Vec<Vec<u32>>,
    /// bwd[g] is the inverse permutation of fwd[g]
    bwd: Vec<Vec<u32>>,
}

impl CosetTable {
    fn from_fwd(group: GroupDescriptor, fwd: Vec<Vec<u32>>) -> Result<Self, CosetError> {
        let n = fwd.first().map_or(1, |p| p.len());
        let mut bwd = Vec::with_capacity(fwd.len());
        for p in &fwd {
            if p.len() != n {
                return Err(CosetError::SelfCheck("ragged permutation table".into()));
            }
            let mut inv = vec![u32::MAX; n];
            for (s, &t) in p.iter().enumerate() {
                if inv[t as usize] != u32::MAX {
                    return Err(CosetError::SelfCheck("generator map is not a bijection".into()));
                }
                inv[t as usize] = s as u32;
            }
            bwd.push(inv);
        }
        let table = CosetTable { group, n, fwd, bwd };
        if !table.is_transitive() {
            return Err(CosetError::SelfCheck("coset table is not transitive".into()));
        }
        Ok(table)
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn apply_symbol(&self, s: u32, state: u32) -> u32 {
        let g = (s / 2) as usize;
        if s & 1 == 0 {
            self.fwd[g][state as usize]
        } else {
            self.bwd[g][state as usize]
        }
    }

    /// State of `w · (coset at `state`)`; letters act right-to-left.
    pub fn apply_word(&self, w: &Word, state: u32) -> u32 {
        let mut s = state;
        match self.group.kind() {
            GroupKind::Free => {
                for &sm in w.symbols().iter().rev() {
                    s = self.apply_symbol(sm, s);
                }
            }
            GroupKind::FreeAbelian => {
                for (g, &x) in w.exponents().iter().enumerate() {
                    let sm = sym(g, x < 0);
                    for _ in 0..x.unsigned_abs() {
                        s = self.apply_symbol(sm, s);
                    }
                }
            }
        }
        s
    }

    fn is_transitive(&self) -> bool {
        self.bfs_order().len() == self.n
    }

    /// States in BFS discovery order from state 0, symbols in shortlex order.
    fn bfs_order(&self) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        order.push(0u32);
        while let Some(s) = queue.pop_front() {
            for sm in 0..self.group.symbol_count() as u32 {
                let t = self.apply_symbol(sm, s);
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Renumbers states into BFS discovery order, a canonical labeling.
    fn canonicalize(self) -> Self {
        let order = self.bfs_order();
        let mut relabel = vec![0u32; self.n];
        for (new, &old) in order.iter().enumerate() {
            relabel[old as usize] = new as u32;
        }
        let mut fwd = vec![vec![0u32; self.n]; self.group.rank()];
        for g in 0..self.group.rank() {
            for old in 0..self.n {
                fwd[g][relabel[old] as usize] = relabel[self.fwd[g][old] as usize];
            }
        }
        CosetTable::from_fwd(self.group.clone(), fwd).expect("relabeling preserves validity")
    }

    /// BFS distances from state 0.
    fn distances(&self) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[0] = 0;
        queue.push_back(0u32);
        while let Some(s) = queue.pop_front() {
            for sm in 0..self.group.symbol_count() as u32 {
                let t = self.apply_symbol(sm, s) as usize;
                if dist[t] == u32::MAX {
                    dist[t] = dist[s as usize] + 1;
                    queue.push_back(t as u32);
                }
            }
        }
        dist
    }

    /// JSON-friendly dump: per-generator permutations.
    pub fn permutations(&self) -> &[Vec<u32>] {
        &self.fwd
    }
}

/// How a subgroup handle came to be; echoed in reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    WholeGroup,
    Generated(Vec<Word>),
    Core,
    Intersect,
    Conjugate,
}

#[derive(Clone, Debug)]
pub struct SubgroupHandle {
    table: CosetTable,
    transversal: Vec<Word>,
    schreier: Vec<Word>,
    origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Contains,
    NotContained { witness: Word },
}

impl Containment {
    pub fn holds(&self) -> bool {
        matches!(self, Containment::Contains)
    }
}

/// Quotient of the abelianization by the subgroup's exponent lattice.
#[derive(Clone, Debug)]
pub struct EigenLattice {
    pub lattice: IntegerMatrix,
    pub smith: SmithForm,
    /// Torsion invariant factors > 1, divisibility-ordered.
    pub torsion: Vec<BigInt>,
    /// Rank of the free part (0 for finite-index subgroups).
    pub free_rank: usize,
}

impl EigenLattice {
    pub fn quotient_order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.smith.diag.iter().take(self.smith.rank).product())
    }
}

impl SubgroupHandle {
    /// The improper subgroup Γ_0 = G, with a single coset.
    pub fn whole_group(group: &GroupDescriptor) -> Self {
        let fwd = vec![vec![0u32]; group.rank()];
        let table = CosetTable::from_fwd(group.clone(), fwd).unwrap();
        let schreier = (0..group.rank()).map(|i| group.generator(i)).collect();
        SubgroupHandle {
            table,
            transversal: vec![group.identity()],
            schreier,
            origin: Origin::WholeGroup,
        }
    }

    pub fn from_generators(
        group: &GroupDescriptor,
        gens: &[Word],
        max_states: usize,
    ) -> Result<Self, CosetError> {
        let gens: Vec<Word> = gens.iter().filter(|w| !w.is_identity()).cloned().collect();
        if gens.is_empty() {
            return Err(CosetError::EmptyGenerators);
        }
        for g in &gens {
            if g.group() != group {
                return Err(CosetError::GroupMismatch);
            }
        }
        let table = match group.kind() {
            GroupKind::Free => stallings_fold(group, &gens, max_states)?.canonicalize(),
            GroupKind::FreeAbelian => lattice_table(group, &gens, max_states)?,
        };
        let handle = Self::from_table(table, Origin::Generated(gens.clone()))?;
        for g in &gens {
            if handle.coset_of(g) != 0 {
                return Err(CosetError::SelfCheck(format!(
                    "supplied generator {g} does not fix the base coset"
                )));
            }
        }
        Ok(handle)
    }

    /// Builds transversal and Schreier generators for a finished table.
    /// Lattice tables keep their box numbering (state = lexicographic index
    /// of the canonical representative); everything else is renumbered into
    /// BFS discovery order by its constructor.
    fn from_table(table: CosetTable, origin: Origin) -> Result<Self, CosetError> {
        let transversal = shortlex_transversal(&table);
        for (i, t) in transversal.iter().enumerate() {
            if table.apply_word(t, 0) != i as u32 {
                return Err(CosetError::SelfCheck(format!(
                    "transversal word {t} does not reach state {i}"
                )));
            }
        }
        let mut schreier = Vec::new();
        for state in 0..table.state_count() as u32 {
            for g in 0..table.group().rank() {
                let s = sym(g, false);
                let target = table.apply_symbol(s, state);
                // t_{a·i}^'-1 · a · t_i lies in the subgroup
                let w = transversal[target as usize]
                    .inverse()
                    .mul(&table.group().generator(g))
                    .mul(&transversal[state as usize]);
                if !w.is_identity() {
                    schreier.push(w);
                }
            }
        }
        let handle = SubgroupHandle { table, transversal, schreier, origin };
        for s in &handle.schreier {
            if handle.coset_of(s) != 0 {
                return Err(CosetError::SelfCheck(format!(
                    "schreier word {s} leaves the base coset"
                )));
            }
        }
        Ok(handle)
    }

    pub fn group(&self) -> &GroupDescriptor {
        self.table.group()
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn index(&self) -> usize {
        self.table.state_count()
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn coset_of(&self, w: &Word) -> u32 {
        debug_assert_eq!(w.group(), self.group());
        self.table.apply_word(w, 0)
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.coset_of(w) == 0
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn schreier_generators(&self) -> &[Word] {
        &self.schreier
    }

    /// `self ⊇ inner`? Decided on the Schreier generators of `inner`; a
    /// failing generator is the witness.
    pub fn contains_subgroup(&self, inner: &SubgroupHandle) -> Result<Containment, CosetError> {
        if self.group() != inner.group() {
            return Err(CosetError::GroupMismatch);
        }
        for s in inner.schreier_generators() {
            if !self.contains_word(s) {
                return Ok(Containment::NotContained { witness: s.clone() });
            }
        }
        Ok(Containment::Contains)
    }

    pub fn same_subgroup(&self, other: &SubgroupHandle) -> Result<bool, CosetError> {
        Ok(self.index() == other.index()
            && self.contains_subgroup(other)?.holds()
            && other.contains_subgroup(self)?.holds())
    }

    /// Reachable component of the product action from (0,0).
    pub fn intersect(
        &self,
        other: &SubgroupHandle,
        max_states: usize,
    ) -> Result<SubgroupHandle, CosetError> {
        if self.group() != other.group() {
            return Err(CosetError::GroupMismatch);
        }
        let group = self.group().clone();
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = vec![(0, 0)];
        ids.insert((0, 0), 0);
        let mut fwd: Vec<Vec<u32>> = vec![Vec::new(); group.rank()];
        let mut head = 0usize;
        while head < pairs.len() {
            let (s1, s2) = pairs[head];
            for g in 0..group.rank() {
                let s = sym(g, false);
                let t = (self.table.apply_symbol(s, s1), other.table.apply_symbol(s, s2));
                let id = *ids.entry(t).or_insert_with(|| {
                    pairs.push(t);
                    (pairs.len() - 1) as u32
                });
                if pairs.len() > max_states {
                    return Err(CosetError::StateCap(max_states));
                }
                fwd[g].push(id);
            }
            head += 1;
        }
        // fwd was filled row-by-row in pair order; transpose into per-gen perms
        let n = pairs.len();
        let mut perms = vec![vec![0u32; n]; group.rank()];
        for (st, _) in pairs.iter().enumerate() {
            for g in 0..group.rank() {
                perms[g][st] = fwd[g][st];
            }
        }
        let table = CosetTable::from_fwd(group, perms)?.canonicalize();
        Self::from_table(table, Origin::Intersect)
    }

    /// Normal core: the Cayley graph of the permutation image of the group
    /// acting on this subgroup's cosets. Kernel membership = identity image.
    pub fn normal_core(&self, cap: usize) -> Result<SubgroupHandle, CosetError> {
        let group = self.group().clone();
        let n = self.index();
        let gen_perms: Vec<Vec<u32>> = (0..group.rank())
            .map(|g| (0..n).map(|s| self.table.apply_symbol(sym(g, false), s as u32)).collect())
            .collect();
        let identity: Vec<u32> = (0..n as u32).collect();
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut elems: Vec<Vec<u32>> = vec![identity.clone()];
        ids.insert(identity, 0);
        let mut fwd_rows: Vec<Vec<u32>> = Vec::new();
        let mut head = 0usize;
        while head < elems.len() {
            let cur = elems[head].clone();
            let mut row = Vec::with_capacity(group.rank());
            for perm in &gen_perms {
                // left multiplication: (a ∘ g)(x) = a(g(x))
                let composed: Vec<u32> = cur.iter().map(|&x| perm[x as usize]).collect();
                let id = *ids.entry(composed.clone()).or_insert_with(|| {
                    elems.push(composed);
                    (elems.len() - 1) as u32
                });
                if elems.len() > cap {
                    return Err(CosetError::CoreCap(cap));
                }
                row.push(id);
            }
            fwd_rows.push(row);
            head += 1;
        }
        let m = elems.len();
        let mut perms = vec![vec![0u32; m]; group.rank()];
        for st in 0..m {
            for g in 0..group.rank() {
                perms[g][st] = fwd_rows[st][g];
            }
        }
        let table = CosetTable::from_fwd(group, perms)?.canonicalize();
        Self::from_table(table, Origin::Core)
    }

    /// Membership `w ∈ result` iff `g^-1 w g ∈ self`; same index.
    pub fn conjugate(&self, g: &Word) -> Result<SubgroupHandle, CosetError> {
        if g.group() != self.group() {
            return Err(CosetError::GroupMismatch);
        }
        let group = self.group().clone();
        let n = self.index();
        let mut perms = vec![vec![0u32; n]; group.rank()];
        for gen in 0..group.rank() {
            let w = g.inverse().mul(&group.generator(gen)).mul(g);
            for s in 0..n as u32 {
                perms[gen][s as usize] = self.table.apply_word(&w, s);
            }
        }
        let table = CosetTable::from_fwd(group, perms)?.canonicalize();
        Self::from_table(table, Origin::Conjugate)
    }

    /// Exact normality test: aΓa^-1 ⊆ Γ for every generator `a` suffices at
    /// finite index (equal indices force equality).
    pub fn is_normal(&self) -> bool {
        for g in 0..self.group().rank() {
            let a = self.group().generator(g);
            for s in self.schreier_generators() {
                let conj = a.mul(s).mul(&a.inverse());
                if !self.contains_word(&conj) {
                    return false;
                }
            }
        }
        true
    }

    /// Abelianized Schreier lattice with its Smith form; characters of the
    /// group trivial on this subgroup factor through this quotient.
    pub fn eigen_lattice(&self) -> EigenLattice {
        let rank = self.group().rank();
        let rows: Vec<Vec<BigInt>> = self
            .schreier_generators()
            .iter()
            .map(|w| w.exponents().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let lattice = if rows.is_empty() {
            IntegerMatrix::zero(1, rank)
        } else {
            IntegerMatrix::from_rows(rows, rank)
        };
        let smith = snf::smith_normal_form(&lattice);
        let torsion: Vec<BigInt> = smith
            .diag
            .iter()
            .take(smith.rank)
            .filter(|d| !d.is_one())
            .cloned()
            .collect();
        let free_rank = rank - smith.rank;
        EigenLattice { lattice, smith, torsion, free_rank }
    }
}

/// Stallings construction: trace each generator as a loop at the base
/// vertex (letters applied right-to-left), fold to determinism, and demand
/// completeness.
fn stallings_fold(
    group: &GroupDescriptor,
    gens: &[Word],
    max_states: usize,
) -> Result<CosetTable, CosetError> {
    let nsym = group.symbol_count() as u32;
    // union-find
    let mut parent: Vec<u32> = vec![0];
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let up = parent[parent[x as usize] as usize];
            parent[x as usize] = up;
            x = up;
        }
        x
    }
    let mut edges: BTreeSet<(u32, u32, u32)> = BTreeSet::new(); // (u, sym, v): v = sym·u
    let fresh = |parent: &mut Vec<u32>| -> u32 {
        let id = parent.len() as u32;
        parent.push(id);
        id
    };
    for g in gens {
        let syms = g.symbols();
        let mut prev = 0u32; // base
        for (k, &s) in syms.iter().rev().enumerate() {
            let target = if k + 1 == syms.len() { 0 } else { fresh(&mut parent) };
            edges.insert((prev, s, target));
            edges.insert((target, sym_inverse(s), prev));
            prev = target;
        }
    }
    if parent.len() > max_states * 8 {
        return Err(CosetError::StateCap(max_states));
    }
    // fold until deterministic
    loop {
        // normalize
        let normalized: BTreeSet<(u32, u32, u32)> = edges
            .iter()
            .map(|&(u, s, v)| (find(&mut parent, u), s, find(&mut parent, v)))
            .collect();
        edges = normalized;
        let mut merge: Option<(u32, u32)> = None;
        {
            let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
            for &(u, s, v) in &edges {
                if let Some(&w) = seen.get(&(u, s)) {
                    if w != v {
                        merge = Some((w, v));
                        break;
                    }
                } else {
                    seen.insert((u, s), v);
                }
            }
        }
        match merge {
            Some((a, b)) => {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi as usize] = lo;
            }
            None => break,
        }
    }
    // collect roots and check completeness
    let mut out: BTreeMap<u32, Vec<Option<u32>>> = BTreeMap::new();
    for &(u, s, v) in &edges {
        out.entry(u).or_insert_with(|| vec![None; nsym as usize])[s as usize] = Some(v);
        out.entry(v).or_insert_with(|| vec![None; nsym as usize]);
    }
    let base = find(&mut parent, 0);
    out.entry(base).or_insert_with(|| vec![None; nsym as usize]);
    let states: Vec<u32> = out.keys().cloned().collect();
    if states.len() > max_states {
        return Err(CosetError::StateCap(max_states));
    }
    let reindex: HashMap<u32, u32> = {
        // base must become state 0
        let mut order = vec![base];
        order.extend(states.iter().filter(|&&s| s != base));
        order.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect()
    };
    let n = states.len();
    let mut fwd = vec![vec![u32::MAX; n]; group.rank()];
    for (&st, slots) in &out {
        for s in 0..nsym {
            match slots[s as usize] {
                Some(t) => {
                    if s & 1 == 0 {
                        fwd[(s / 2) as usize][reindex[&st] as usize] = reindex[&t];
                    }
                }
                None => {
                    return Err(CosetError::NotFiniteIndex(format!(
                        "folded graph is missing a `{}` edge",
                        symbol_name(group, s)
                    )));
                }
            }
        }
    }
    CosetTable::from_fwd(group.clone(), fwd)
}

fn symbol_name(group: &GroupDescriptor, s: u32) -> String {
    let name = &group.generator_names()[(s / 2) as usize];
    if s & 1 == 0 {
        name.clone()
    } else {
        format!("{name}^-1")
    }
}

/// Free-abelian subgroup: Hermite basis of the exponent lattice; states are
/// the canonical representatives in the fundamental box.
fn lattice_table(
    group: &GroupDescriptor,
    gens: &[Word],
    max_states: usize,
) -> Result<CosetTable, CosetError> {
    let d = group.rank();
    let vectors: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|w| w.exponents().iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let basis = snf::hermite_rows(&vectors, d);
    if basis.len() < d {
        return Err(CosetError::NotFiniteIndex(format!(
            "exponent lattice has rank {} < {}",
            basis.len(),
            d
        )));
    }
    let index: BigInt = (0..d).map(|i| basis[i][i].clone()).product();
    let index = index
        .to_usize()
        .filter(|&ix| ix <= max_states)
        .ok_or(CosetError::StateCap(max_states))?;
    // enumerate box representatives lexicographically
    let dims: Vec<usize> = (0..d).map(|i| basis[i][i].to_usize().unwrap()).collect();
    let mut reps: Vec<Vec<BigInt>> = Vec::with_capacity(index);
    let mut cur = vec![BigInt::zero(); d];
    loop {
        reps.push(cur.clone());
        let mut c = d;
        while c > 0 {
            c -= 1;
            cur[c] += 1;
            if cur[c] < BigInt::from(dims[c]) {
                break;
            }
            cur[c] = BigInt::zero();
            if c == 0 {
                c = usize::MAX;
                break;
            }
        }
        if c == usize::MAX || reps.len() == index {
            break;
        }
    }
    let rep_id: HashMap<Vec<BigInt>, u32> =
        reps.iter().enumerate().map(|(i, r)| (r.clone(), i as u32)).collect();
    let mut fwd = vec![vec![0u32; index]; d];
    for (st, rep) in reps.iter().enumerate() {
        for g in 0..d {
            let mut v = rep.clone();
            v[g] += 1;
            let red = snf::reduce_mod_lattice(&basis, &v);
            fwd[g][st] = rep_id[&red];
        }
    }
    CosetTable::from_fwd(group.clone(), fwd)
}

/// Shortlex-least representative word for every state.
fn shortlex_transversal(table: &CosetTable) -> Vec<Word> {
    let group = table.group().clone();
    let dist = table.distances();
    match group.kind() {
        GroupKind::Free => {
            // greedy: w(s) = a · w(t) with minimal symbol a, π_a(t) = s,
            // dist(t) = dist(s) - 1; minimal first symbol wins outright
            let n = table.state_count();
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by_key(|&s| (dist[s as usize], s));
            let mut words: Vec<Option<Word>> = vec![None; n];
            for &s in &order {
                if dist[s as usize] == 0 {
                    words[s as usize] = Some(group.identity());
                    continue;
                }
                let mut chosen: Option<(u32, u32)> = None;
                for sm in 0..group.symbol_count() as u32 {
                    let t = table.apply_symbol(sym_inverse(sm), s);
                    if dist[t as usize] + 1 == dist[s as usize] {
                        chosen = Some((sm, t));
                        break;
                    }
                }
                let (sm, t) = chosen.expect("BFS predecessor exists");
                let tail = words[t as usize].clone().expect("processed in distance order");
                let mut syms = vec![sm];
                syms.extend(tail.symbols());
                words[s as usize] = Some(group.word_from_symbols(&syms));
            }
            words.into_iter().map(Option::unwrap).collect()
        }
        GroupKind::FreeAbelian => {
            let ecc = dist.iter().max().copied().unwrap_or(0) as usize;
            let n = table.state_count();
            let mut words: Vec<Option<Word>> = vec![None; n];
            let mut left = n;
            for w in ball_unchecked(&group, ecc) {
                let s = table.apply_word(&w, 0) as usize;
                if words[s].is_none() {
                    words[s] = Some(w);
                    left -= 1;
                    if left == 0 {
                        break;
                    }
                }
            }
            words.into_iter().map(Option::unwrap).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::parse_word;

    fn f2() -> GroupDescriptor {
        GroupDescriptor::free(&["a", "b"])
    }
    fn z1() -> GroupDescriptor {
        GroupDescriptor::free_abelian(&["t"])
    }
    fn z2g() -> GroupDescriptor {
        GroupDescriptor::free_abelian(&["x", "y"])
    }

    fn sub(group: &GroupDescriptor, gens: &[&str]) -> SubgroupHandle {
        let words: Vec<Word> = gens.iter().map(|s| parse_word(s, group).unwrap()).collect();
        SubgroupHandle::from_generators(group, &words, DEFAULT_MAX_STATES).unwrap()
    }

    #[test]
    fn two_z_in_z() {
        let g = z1();
        let h = sub(&g, &["t^2"]);
        assert_eq!(h.index(), 2);
        assert_eq!(h.coset_of(&parse_word("t^5", &g).unwrap()), 1);
        assert!(h.contains_word(&parse_word("t^-4", &g).unwrap()));
        let reps: Vec<String> = h.transversal().iter().map(|w| w.to_string()).collect();
        assert_eq!(reps, vec!["e", "t"]);
        let sg: Vec<String> = h.schreier_generators().iter().map(|w| w.to_string()).collect();
        assert_eq!(sg, vec!["t^2"]);
    }

    #[test]
    fn f2_index_two_fold() {
        let g = f2();
        let h = sub(&g, &["a", "b^2", "b*a*b^-1"]);
        assert_eq!(h.index(), 2);
        assert_eq!(h.coset_of(&parse_word("b*a", &g).unwrap()), 1);
        for gen in ["a", "b^2", "b*a*b^-1"] {
            assert!(h.contains_word(&parse_word(gen, &g).unwrap()));
        }
        assert!(!h.contains_word(&parse_word("b", &g).unwrap()));
    }

    #[test]
    fn z2_diagonal_lattice() {
        let g = z2g();
        let h = sub(&g, &["x^2", "y^2"]);
        assert_eq!(h.index(), 4);
        assert!(h.is_normal());
    }

    #[test]
    fn not_finite_index_detected() {
        let g = f2();
        let w = parse_word("a", &g).unwrap();
        assert!(matches!(
            SubgroupHandle::from_generators(&g, &[w], DEFAULT_MAX_STATES),
            Err(CosetError::NotFiniteIndex(_))
        ));
        let z = z2g();
        let v = parse_word("x^2", &z).unwrap();
        assert!(matches!(
            SubgroupHandle::from_generators(&z, &[v], DEFAULT_MAX_STATES),
            Err(CosetError::NotFiniteIndex(_))
        ));
    }

    #[test]
    fn containment_with_witness() {
        let g = z1();
        let two = sub(&g, &["t^2"]);
        let four = sub(&g, &["t^4"]);
        assert!(two.contains_subgroup(&four).unwrap().holds());
        match four.contains_subgroup(&two).unwrap() {
            Containment::NotContained { witness } => {
                assert_eq!(witness.to_string(), "t^2");
            }
            _ => panic!("2Z is not inside 4Z"),
        }
    }

    #[test]
    fn schreier_parity_containment() {
        // index-4 kernel of both exponents mod 2, inside the index-2 kernel
        // of the total exponent sum mod 2; decided on Schreier generators
        let g = f2();
        let inner = sub(&g, &["a^2", "b^-1*a^2*b", "b^-1*a^-1*b*a", "b^2", "a^-1*b*a*b"]);
        assert_eq!(inner.index(), 4);
        let outer = sub(&g, &["a*b", "a^2", "b*a"]);
        assert_eq!(outer.index(), 2);
        assert!(outer.contains_subgroup(&inner).unwrap().holds());
        for s in inner.schreier_generators() {
            let total: i64 = s.exponents().iter().sum();
            assert_eq!(total.rem_euclid(2), 0);
        }
    }

    #[test]
    fn intersect_two_and_three() {
        let g = z1();
        let two = sub(&g, &["t^2"]);
        let three = sub(&g, &["t^3"]);
        let six = two.intersect(&three, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(six.index(), 6);
        // brute membership over the radius-12 ball
        for w in ball_unchecked(&g, 12) {
            let n = w.exponents()[0];
            assert_eq!(six.contains_word(&w), n % 6 == 0);
        }
    }

    #[test]
    fn intersect_idempotent() {
        let g = f2();
        let h = sub(&g, &["a", "b^2", "b*a*b^-1"]);
        let hh = h.intersect(&h, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(hh.index(), h.index());
        assert!(hh.same_subgroup(&h).unwrap());
    }

    #[test]
    fn intersect_lattices_hnf_vs_points() {
        let g = z2g();
        let h1 = sub(&g, &["x^2", "y"]);
        let h2 = sub(&g, &["x", "y^3"]);
        let meet = h1.intersect(&h2, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(meet.index(), 6);
        // oracle: point enumeration in a 6x6 box
        for i in -6i64..=6 {
            for j in -6i64..=6 {
                let w = g.word_from_exponents(vec![i, j]);
                assert_eq!(meet.contains_word(&w), i % 2 == 0 && j % 3 == 0, "({i},{j})");
            }
        }
    }

    #[test]
    fn core_of_normal_subgroup_is_itself() {
        let g = z1();
        let two = sub(&g, &["t^2"]);
        let core = two.normal_core(DEFAULT_CORE_CAP).unwrap();
        assert!(core.same_subgroup(&two).unwrap());
    }

    fn stab1() -> SubgroupHandle {
        // stabilizer of a point under a -> (1 2 3), b -> (1 2)
        sub(&f2(), &["a^3", "a^-1*b", "b*a", "a*b*a^-1"])
    }

    #[test]
    fn s3_stabilizer_core() {
        let h = stab1();
        assert_eq!(h.index(), 3);
        let core = h.normal_core(DEFAULT_CORE_CAP).unwrap();
        assert_eq!(core.index(), 6);
        assert!(h.contains_subgroup(&core).unwrap().holds());
        // index of the core divides 3!
        assert_eq!(BigInt::from(6) % BigInt::from(core.index()), BigInt::zero());
        assert!(core.is_normal());
        assert!(!h.is_normal());
    }

    #[test]
    fn core_normality_on_ball() {
        let g = f2();
        let core = stab1().normal_core(DEFAULT_CORE_CAP).unwrap();
        for w in ball_unchecked(&g, 3) {
            for s in core.schreier_generators() {
                assert!(core.contains_word(&w.mul(s).mul(&w.inverse())));
            }
        }
    }

    #[test]
    fn conjugate_by_identity_and_abelian() {
        let g = f2();
        let h = stab1();
        let he = h.conjugate(&g.identity()).unwrap();
        for w in ball_unchecked(&g, 4) {
            assert_eq!(h.contains_word(&w), he.contains_word(&w));
        }
        let z = z2g();
        let k = sub(&z, &["x^2", "y^2"]);
        let kc = k.conjugate(&parse_word("x*y^-1", &z).unwrap()).unwrap();
        assert!(k.same_subgroup(&kc).unwrap());
    }

    #[test]
    fn conjugate_stabilizer_moves_the_point() {
        // Stab(1)^a = Stab(2) under the S3 action; check membership on a ball
        // against the permutation image oracle
        let g = f2();
        let h = stab1();
        let conj = h.conjugate(&g.generator(0)).unwrap();
        assert_eq!(conj.index(), 3);
        let perm_a = [1u8, 2, 0]; // 1->2->3->1 on {0,1,2}
        let perm_b = [1u8, 0, 2];
        let image = |w: &Word| -> [u8; 3] {
            let mut p = [0u8, 1, 2];
            for &s in w.symbols().iter().rev() {
                let gperm = if s / 2 == 0 { perm_a } else { perm_b };
                p = p.map(|x| {
                    if s & 1 == 0 {
                        gperm[x as usize]
                    } else {
                        gperm.iter().position(|&y| y == x).unwrap() as u8
                    }
                });
            }
            p
        };
        for w in ball_unchecked(&g, 4) {
            let fixes_2 = image(&w)[1] == 1;
            assert_eq!(conj.contains_word(&w), fixes_2, "word {w}");
        }
    }

    #[test]
    fn schreier_counts() {
        let g = f2();
        let whole = SubgroupHandle::whole_group(&g);
        assert_eq!(whole.transversal().len(), 1);
        assert_eq!(whole.schreier_generators().len(), 2);
        let h = stab1();
        assert_eq!(h.transversal().len(), 3);
        // Nielsen-Schreier: 1 + n(k-1) = 4 free generators
        assert_eq!(h.schreier_generators().len(), 4);
    }

    #[test]
    fn schreier_generators_generate() {
        let g = f2();
        let h = stab1();
        let regen =
            SubgroupHandle::from_generators(&g, h.schreier_generators(), DEFAULT_MAX_STATES)
                .unwrap();
        assert!(regen.same_subgroup(&h).unwrap());
    }

    #[test]
    fn transversal_is_shortlex_least() {
        // oracle: first shortlex ball word reaching each state
        let g = f2();
        for h in [stab1(), sub(&g, &["a", "b^2", "b*a*b^-1"])] {
            let mut seen: Vec<Option<Word>> = vec![None; h.index()];
            for w in ball_unchecked(&g, 6) {
                let s = h.coset_of(&w) as usize;
                if seen[s].is_none() {
                    seen[s] = Some(w);
                }
            }
            for (i, t) in h.transversal().iter().enumerate() {
                assert_eq!(seen[i].as_ref().unwrap(), t);
            }
        }
    }

    #[test]
    fn table_word_consistency_on_ball() {
        let g = f2();
        let h = stab1();
        for w in ball_unchecked(&g, 4) {
            for gen in 0..2 {
                let a = g.generator(gen);
                assert_eq!(
                    h.coset_of(&a.mul(&w)),
                    h.table().apply_symbol(sym(gen, false), h.coset_of(&w))
                );
            }
        }
    }

    #[test]
    fn orbit_membership_duality_abelian() {
        let g = z2g();
        let h = sub(&g, &["x^2*y", "y^3"]);
        for w in ball_unchecked(&g, 4) {
            let v = w.exponents();
            // oracle: (i, j) in <(2,1),(0,3)> iff i even and j - i/2 ≡ 0 mod 3
            let member = v[0] % 2 == 0 && (v[1] - v[0] / 2).rem_euclid(3) == 0;
            assert_eq!(h.contains_word(&w), member, "{v:?}");
        }
    }

    #[test]
    fn intersection_membership_is_conjunction() {
        let g = f2();
        let h1 = sub(&g, &["a", "b^2", "b*a*b^-1"]);
        let h2 = stab1();
        let meet = h1.intersect(&h2, DEFAULT_MAX_STATES).unwrap();
        for w in ball_unchecked(&g, 4) {
            assert_eq!(meet.contains_word(&w), h1.contains_word(&w) && h2.contains_word(&w));
        }
    }

    #[test]
    fn eigen_lattice_examples() {
        let g = z1();
        for n in 1..=4u32 {
            let h = sub(&g, &[&format!("t^{}", 1 << n)]);
            let el = h.eigen_lattice();
            assert_eq!(el.free_rank, 0);
            assert_eq!(el.quotient_order().unwrap(), BigInt::from(1u64 << n));
            assert_eq!(el.torsion, vec![BigInt::from(1u64 << n)]);
        }
        let z = z2g();
        let h = sub(&z, &["x^2", "y^2"]);
        let el = h.eigen_lattice();
        assert_eq!(el.torsion, vec![BigInt::from(2), BigInt::from(2)]);
        let f = f2();
        let k = sub(&f, &["a", "b^2", "b*a*b^-1"]);
        let el = k.eigen_lattice();
        assert_eq!(el.torsion, vec![BigInt::from(2)]);
        assert_eq!(el.free_rank, 0);
    }

    #[test]
    fn rank_three_groups_work() {
        let f3 = GroupDescriptor::free(&["a", "b", "c"]);
        let gens: Vec<Word> = ["a^2", "b", "a^-1*b*a", "c", "a^-1*c*a"]
            .iter()
            .map(|s| parse_word(s, &f3).unwrap())
            .collect();
        let h = SubgroupHandle::from_generators(&f3, &gens, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(h.index(), 2);
        assert!(h.is_normal());
        let z3 = GroupDescriptor::free_abelian(&["x", "y", "z"]);
        let gens: Vec<Word> = ["x^2", "y^2", "z^2"]
            .iter()
            .map(|s| parse_word(s, &z3).unwrap())
            .collect();
        let k = SubgroupHandle::from_generators(&z3, &gens, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(k.index(), 8);
        assert_eq!(k.eigen_lattice().quotient_order().unwrap(), BigInt::from(8));
    }

    #[test]
    fn eigen_quotient_order_equals_index_for_abelian() {
        let g = z2g();
        for gens in [&["x^2", "y^2"][..], &["x^2*y", "y^3"][..], &["x^3", "y"][..]] {
            let h = sub(&g, gens);
            assert_eq!(h.eigen_lattice().quotient_order().unwrap(), BigInt::from(h.index()));
        }
    }
}
