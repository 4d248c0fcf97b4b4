//! The explicit {0,1} Toeplitz array attached to a subgroup chain.
//!
//! A fundamental-domain tower `D_0 ⊆ D_1 ⊆ …` is built by the product rule
//! `D_{n+1} = D_n · K_n` with `K_n` the shortlex-least representatives of
//! the Γ_{n+1}-cosets inside Γ_n; marker sets `S_n` and marker points `v_n`
//! are the shortlex-least admissible choices. The array takes symbol 0 on
//! the even-level sets `S_{2m}·Γ_{2m+1}`, symbol 1 elsewhere. Those sets are
//! pairwise disjoint, and each evaluation carries an exactness certificate:
//! either some level ≤ N−1 claimed the position, or the position escaped a
//! marker coset `v_m·Γ_m` early enough that no deeper level can claim it.
//! Positions inside the last unresolved marker tower are reported as
//! provisional, never guessed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::chain::{Chain, ChainError, TruncatedPoint};
use crate::word::{ball_enumerate, ball_unchecked, GroupDescriptor, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToeplitzError {
    #[error("level {0} has index ratio 1 but the chain does not stabilize there")]
    IndexOneLevel(usize),
    #[error("coset search for K_{level} exhausted radius {radius}; raise the radius cap")]
    TransversalSearchCap { level: usize, radius: usize },
    #[error("window element {0} lies outside the fundamental domain D_N")]
    WindowOutsideTower(Word),
    #[error("level {0} exceeds the built depth")]
    DepthOutOfRange(usize),
    #[error("evaluation soundness check failed: {0}")]
    Soundness(String),
    #[error("bad external array line {0}")]
    BadArrayLine(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// D_0, …, D_N and K_0, …, K_{N−1} with `D_{n+1} = D_n · K_n`.
#[derive(Clone, Debug)]
pub struct FundamentalTower {
    domains: Vec<Vec<Word>>,
    blocks: Vec<Vec<Word>>,
}

impl FundamentalTower {
    /// Fundamental domain of Γ_n, in product order (D_n is a prefix of D_{n+1}).
    pub fn domain(&self, n: usize) -> &[Word] {
        &self.domains[n]
    }

    pub fn block(&self, n: usize) -> &[Word] {
        &self.blocks[n]
    }

    pub fn depth(&self) -> usize {
        self.domains.len() - 1
    }
}

/// Marker sets S_n and marker points v_n (v_0 is the identity).
#[derive(Clone, Debug)]
pub struct MarkerData {
    sets: Vec<Vec<Word>>,
    markers: Vec<Word>,
}

impl MarkerData {
    pub fn set(&self, n: usize) -> &[Word] {
        &self.sets[n]
    }

    /// v_n; index 0 returns the identity.
    pub fn marker(&self, n: usize) -> &Word {
        &self.markers[n]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Generic,
    /// Chain stabilizes at this level; the array is Γ_m-periodic.
    Finite { level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzValue {
    pub symbol: u8,
    pub exact: bool,
    pub deciding_level: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ToeplitzSpec {
    chain: Chain,
    mode: Mode,
    tower: FundamentalTower,
    markers: Option<MarkerData>,
    /// per level m ≤ N−1, the Γ_{m+1}-states of the S_m elements
    hit_states: Vec<BTreeSet<u32>>,
    /// per level m ≥ 1, the Γ_m-state of v_m
    marker_states: Vec<u32>,
    domain_set: BTreeSet<Word>,
}

impl ToeplitzSpec {
    pub fn build(chain: &Chain) -> Result<Self, ToeplitzError> {
        let mode = detect_mode(chain)?;
        let tower = build_tower(chain)?;
        let (markers, hit_states, marker_states) = match mode {
            Mode::Generic => {
                let markers = build_markers(chain, &tower)?;
                let depth = chain.depth();
                let mut hit_states = Vec::with_capacity(depth);
                for m in 0..depth {
                    let states: BTreeSet<u32> = markers.sets[m]
                        .iter()
                        .map(|s| chain.level(m + 1).coset_of(s))
                        .collect();
                    hit_states.push(states);
                }
                let marker_states: Vec<u32> = (0..=depth)
                    .map(|m| chain.level(m).coset_of(&markers.markers[m]))
                    .collect();
                (Some(markers), hit_states, marker_states)
            }
            Mode::Finite { .. } => (None, Vec::new(), Vec::new()),
        };
        let domain_set = tower.domains.last().unwrap().iter().cloned().collect();
        Ok(ToeplitzSpec {
            chain: chain.clone(),
            mode,
            tower,
            markers,
            hit_states,
            marker_states,
            domain_set,
        })
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn tower(&self) -> &FundamentalTower {
        &self.tower
    }

    pub fn markers(&self) -> Option<&MarkerData> {
        self.markers.as_ref()
    }

    pub fn depth(&self) -> usize {
        self.chain.depth()
    }

    /// Fundamental domain of the deepest level, sorted shortlex.
    pub fn sorted_domain(&self) -> Vec<Word> {
        self.domain_set.iter().cloned().collect()
    }

    pub fn in_domain(&self, w: &Word) -> bool {
        self.domain_set.contains(w)
    }

    /// The position's first marker-set hit and first marker-coset escape;
    /// everything x knows about a position factors through its coset vector.
    fn analyze_coords(&self, coords: &[u32]) -> (Option<usize>, Option<usize>) {
        let depth = self.depth();
        let mut hits = Vec::new();
        for m in 0..depth {
            if self.hit_states[m].contains(&coords[m + 1]) {
                hits.push(m);
            }
        }
        assert!(
            hits.len() <= 1,
            "marker-coset sets must be pairwise disjoint; hit levels {hits:?}"
        );
        let mut first_escape = None;
        for m in 1..depth {
            if coords[m] != self.marker_states[m] {
                first_escape = Some(m);
                break;
            }
        }
        let first_hit = hits.first().copied();
        if let (Some(h), Some(esc)) = (first_hit, first_escape) {
            assert!(
                esc >= h,
                "a position claimed at level {h} cannot escape earlier at level {esc}"
            );
        }
        (first_hit, first_escape)
    }

    fn analyze(&self, w: &Word) -> (Option<usize>, Option<usize>) {
        let coords: Vec<u32> = self.chain.levels().iter().map(|h| h.coset_of(w)).collect();
        self.analyze_coords(&coords)
    }

    fn value_from(&self, hit: Option<usize>, escape: Option<usize>) -> ToeplitzValue {
        match (hit, escape) {
            (Some(m), _) => ToeplitzValue {
                symbol: u8::from(m % 2 == 1),
                exact: true,
                deciding_level: Some(m),
            },
            (None, Some(m)) => ToeplitzValue { symbol: 1, exact: true, deciding_level: Some(m) },
            (None, None) => ToeplitzValue { symbol: 1, exact: false, deciding_level: None },
        }
    }

    /// x(w) with its exactness certificate; any group element is accepted.
    pub fn evaluate(&self, w: &Word) -> ToeplitzValue {
        match self.mode {
            Mode::Finite { level } => {
                let symbol = u8::from(!self.chain.level(level).contains_word(w));
                ToeplitzValue { symbol, exact: true, deciding_level: Some(level) }
            }
            Mode::Generic => {
                let (hit, escape) = self.analyze(w);
                self.value_from(hit, escape)
            }
        }
    }

    /// x at the position described by a truncated coset vector.
    pub fn evaluate_point(&self, p: &TruncatedPoint) -> ToeplitzValue {
        match self.mode {
            Mode::Finite { level } => {
                let symbol = u8::from(p.coords()[level] != 0);
                ToeplitzValue { symbol, exact: true, deciding_level: Some(level) }
            }
            Mode::Generic => {
                let (hit, escape) = self.analyze_coords(p.coords());
                self.value_from(hit, escape)
            }
        }
    }

    /// Least n with `w` certified in Per(x, Γ_n), with the certified symbol.
    /// `None` when the truncation cannot decide.
    pub fn certification(&self, w: &Word) -> Option<(usize, u8)> {
        match self.mode {
            Mode::Finite { level } => {
                let symbol = u8::from(!self.chain.level(level).contains_word(w));
                Some((level, symbol))
            }
            Mode::Generic => {
                let (hit, escape) = self.analyze(w);
                match (hit, escape) {
                    (Some(m), _) => Some((m + 1, u8::from(m % 2 == 1))),
                    (None, Some(m)) => Some((m + 1, 1)),
                    (None, None) => None,
                }
            }
        }
    }

    /// Image of the orbit element g·x under the equicontinuous-factor map,
    /// truncated at level `n`.
    pub fn factor_coords(&self, g: &Word, n: usize) -> Result<TruncatedPoint, ToeplitzError> {
        if n > self.depth() {
            return Err(ToeplitzError::DepthOutOfRange(n));
        }
        Ok(self.chain.point_of_word(g).truncated(n))
    }
}

fn detect_mode(chain: &Chain) -> Result<Mode, ToeplitzError> {
    let depth = chain.depth();
    for n in 0..depth {
        if chain.level(n + 1).index() == chain.level(n).index() {
            // stabilization candidate; every deeper level must agree
            for k in n + 1..=depth {
                if chain.level(k).index() != chain.level(n).index() {
                    return Err(ToeplitzError::IndexOneLevel(n + 1));
                }
            }
            return Ok(Mode::Finite { level: n });
        }
    }
    Ok(Mode::Generic)
}

/// K_n = shortlex-least representatives in Γ_n of its Γ_{n+1}-cosets, found
/// by growing-radius ball scans; D_{n+1} = D_n · K_n in product order.
fn build_tower(chain: &Chain) -> Result<FundamentalTower, ToeplitzError> {
    let group = chain.group().clone();
    let mut domains = vec![vec![group.identity()]];
    let mut blocks = Vec::new();
    for n in 0..chain.depth() {
        let wanted = chain.level(n + 1).index() / chain.level(n).index();
        let block = coset_block(chain, n, wanted, &group)?;
        let mut next = Vec::with_capacity(domains[n].len() * block.len());
        for k in &block {
            for d in &domains[n] {
                next.push(d.mul(k));
            }
        }
        // transversal property of D_{n+1}
        let mut seen = vec![false; chain.level(n + 1).index()];
        for d in &next {
            let s = chain.level(n + 1).coset_of(d) as usize;
            if seen[s] {
                return Err(ToeplitzError::Soundness(format!(
                    "duplicate Γ_{} coset in the product domain at {d}",
                    n + 1
                )));
            }
            seen[s] = true;
        }
        if !seen.iter().all(|&b| b) {
            return Err(ToeplitzError::Soundness(format!(
                "product domain misses a coset at level {}",
                n + 1
            )));
        }
        blocks.push(block);
        domains.push(next);
    }
    Ok(FundamentalTower { domains, blocks })
}

fn coset_block(
    chain: &Chain,
    n: usize,
    wanted: usize,
    group: &GroupDescriptor,
) -> Result<Vec<Word>, ToeplitzError> {
    let cap = group.radius_cap();
    let mut found: BTreeSet<u32> = BTreeSet::new();
    let mut order: Vec<Word> = Vec::new();
    for radius in 0..=cap {
        for w in ball_unchecked(group, radius) {
            if w.len() < radius {
                continue; // inner shells were scanned at smaller radii
            }
            if !chain.level(n).contains_word(&w) {
                continue;
            }
            let state = chain.level(n + 1).coset_of(&w);
            if found.insert(state) {
                order.push(w);
                if order.len() == wanted {
                    debug_assert!(order[0].is_identity());
                    return Ok(order);
                }
            }
        }
    }
    Err(ToeplitzError::TransversalSearchCap { level: n, radius: cap })
}

/// S_1 = {v_1}, S_n = v_{n−1}·Γ_{n−1} ∩ D_n \ D_{n−1}; each v_n is the
/// shortlex-least element of S_n.
fn build_markers(chain: &Chain, tower: &FundamentalTower) -> Result<MarkerData, ToeplitzError> {
    let group = chain.group();
    let depth = chain.depth();
    let mut sets: Vec<Vec<Word>> = vec![vec![group.identity()]];
    let mut markers: Vec<Word> = vec![group.identity()];
    for n in 1..=depth {
        let set: Vec<Word> = if n == 1 {
            let mut d1: Vec<Word> =
                tower.domain(1).iter().filter(|w| !w.is_identity()).cloned().collect();
            d1.sort_by(|a, b| a.shortlex_cmp(b));
            vec![d1[0].clone()]
        } else {
            let prev_state = chain.level(n - 1).coset_of(&markers[n - 1]);
            let old: BTreeSet<&Word> = tower.domain(n - 1).iter().collect();
            let mut s: Vec<Word> = tower
                .domain(n)
                .iter()
                .filter(|w| !old.contains(w))
                .filter(|w| chain.level(n - 1).coset_of(w) == prev_state)
                .cloned()
                .collect();
            s.sort_by(|a, b| a.shortlex_cmp(b));
            s
        };
        if set.is_empty() {
            return Err(ToeplitzError::Soundness(format!("marker set S_{n} is empty")));
        }
        let expected = if n == 1 {
            1
        } else {
            chain.level(n).index() / chain.level(n - 1).index() - 1
        };
        if set.len() != expected {
            return Err(ToeplitzError::Soundness(format!(
                "marker set S_{n} has {} elements, expected {expected}",
                set.len()
            )));
        }
        markers.push(set[0].clone());
        sets.push(set);
    }
    // nesting of the marker cosets
    for n in 1..depth {
        let state = chain.level(n).coset_of(&markers[n]);
        if chain.level(n).coset_of(&markers[n + 1]) != state {
            return Err(ToeplitzError::Soundness(format!(
                "marker nesting fails: v_{} outside v_{n}·Γ_{n}",
                n + 1
            )));
        }
    }
    Ok(MarkerData { sets, markers })
}

/// One dump line per window element: `<word> <symbol> <exact|provisional> <level>`.
pub fn dump_array(spec: &ToeplitzSpec, window: &[Word]) -> String {
    let mut out = String::new();
    for w in window {
        let v = spec.evaluate(w);
        let level = v.deciding_level.map_or("-".to_string(), |m| m.to_string());
        out.push_str(&format!(
            "{w} {} {} {level}\n",
            v.symbol,
            if v.exact { "exact" } else { "provisional" }
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct PerEntry {
    pub position: Word,
    pub symbol: u8,
    pub certified_at: usize,
}

#[derive(Clone, Debug)]
pub struct PerReport {
    pub level: usize,
    pub certified: Vec<PerEntry>,
    pub residue: Vec<Word>,
    pub confirmations: usize,
}

/// Partition of a window into positions certified periodic under Γ_n (with
/// their symbol) and an uncertified residue; every certificate is confirmed
/// against exact evaluations over Γ_n ∩ ball(test_radius).
pub fn per_report(
    spec: &ToeplitzSpec,
    n: usize,
    window: &[Word],
    test_radius: usize,
) -> Result<PerReport, ToeplitzError> {
    if n > spec.depth() {
        return Err(ToeplitzError::DepthOutOfRange(n));
    }
    for w in window {
        if !spec.in_domain(w) {
            return Err(ToeplitzError::WindowOutsideTower(w.clone()));
        }
    }
    let mut certified = Vec::new();
    let mut residue = Vec::new();
    for w in window {
        match spec.certification(w) {
            Some((nw, symbol)) if nw <= n => {
                certified.push(PerEntry { position: w.clone(), symbol, certified_at: nw });
            }
            _ => residue.push(w.clone()),
        }
    }
    let gamma: Vec<Word> = ball_enumerate(spec.chain().group(), test_radius)?
        .into_iter()
        .filter(|g| spec.chain().level(n).contains_word(g))
        .collect();
    let mut confirmations = 0;
    for entry in &certified {
        for g in &gamma {
            let v = spec.evaluate(&entry.position.mul(g));
            if !v.exact || v.symbol != entry.symbol {
                return Err(ToeplitzError::Soundness(format!(
                    "certificate for {} contradicted at translate {g}",
                    entry.position
                )));
            }
            confirmations += 1;
        }
    }
    Ok(PerReport { level: n, certified, residue, confirmations })
}

#[derive(Clone, Debug)]
pub struct VerifyEntry {
    pub position: Word,
    pub certified_at: Option<usize>,
    pub symbol: Option<u8>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub entries: Vec<VerifyEntry>,
    pub pass: bool,
    /// deepest certification level over the window; with PASS this realizes
    /// Γ_level inside the return times of the window cylinder
    pub recurrence_level: Option<usize>,
    pub recurrence_checked: usize,
}

/// Certifies that every window position is periodic under some Γ_n, and
/// exhibits the regular-recurrence datum for the whole window cylinder.
pub fn toeplitz_verify(
    spec: &ToeplitzSpec,
    window: &[Word],
    radius: usize,
) -> Result<VerifyReport, ToeplitzError> {
    for w in window {
        if !spec.in_domain(w) {
            return Err(ToeplitzError::WindowOutsideTower(w.clone()));
        }
    }
    let mut entries = Vec::new();
    let mut pass = true;
    let mut deepest = 0usize;
    for w in window {
        match spec.certification(w) {
            Some((nw, symbol)) => {
                deepest = deepest.max(nw);
                entries.push(VerifyEntry {
                    position: w.clone(),
                    certified_at: Some(nw),
                    symbol: Some(symbol),
                });
            }
            None => {
                pass = false;
                entries.push(VerifyEntry { position: w.clone(), certified_at: None, symbol: None });
            }
        }
    }
    let mut recurrence_checked = 0;
    let recurrence_level = if pass { Some(deepest) } else { None };
    if let Some(level) = recurrence_level {
        let gamma: Vec<Word> = ball_enumerate(spec.chain().group(), radius)?
            .into_iter()
            .filter(|g| spec.chain().level(level).contains_word(g))
            .collect();
        for g in &gamma {
            for entry in &entries {
                let v = spec.evaluate(&entry.position.mul(g));
                if !v.exact || Some(v.symbol) != entry.symbol {
                    return Err(ToeplitzError::Soundness(format!(
                        "window pattern not Γ_{level}-recurrent at translate {g}"
                    )));
                }
            }
            recurrence_checked += 1;
        }
    }
    Ok(VerifyReport { entries, pass, recurrence_level, recurrence_checked })
}

/// A {0,1} array given extensionally on a finite set of positions; its
/// periodicity can only ever be sampled, never certified.
#[derive(Clone, Debug)]
pub struct ExternalArray {
    entries: BTreeMap<Word, u8>,
}

impl ExternalArray {
    /// One line per position: `<word> <symbol>`; blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str, group: &GroupDescriptor) -> Result<Self, ToeplitzError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(wtext), Some(stext), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(ToeplitzError::BadArrayLine(i + 1));
            };
            let w = crate::word::parse_word(wtext, group)
                .map_err(|_| ToeplitzError::BadArrayLine(i + 1))?;
            let s: u8 = match stext {
                "0" => 0,
                "1" => 1,
                _ => return Err(ToeplitzError::BadArrayLine(i + 1)),
            };
            entries.insert(w, s);
        }
        Ok(ExternalArray { entries })
    }

    pub fn get(&self, w: &Word) -> Option<u8> {
        self.entries.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct ExternalVerifyEntry {
    pub position: Word,
    /// least chain level whose sampled period test found no contradiction
    pub sampled_at: Option<usize>,
    /// contradiction witness at the deepest level, if every level failed
    pub witness: Option<(Word, u8, u8)>,
}

#[derive(Clone, Debug)]
pub struct ExternalVerifyReport {
    pub entries: Vec<ExternalVerifyEntry>,
    pub pass: bool,
}

/// Sampled periodicity check of an external array against a chain: for each
/// window position, the least level n whose Γ_n-translates inside the
/// array's domain all agree. FAIL is a report outcome, not an error.
pub fn verify_external(
    array: &ExternalArray,
    chain: &Chain,
    window: &[Word],
    radius: usize,
) -> Result<ExternalVerifyReport, ToeplitzError> {
    let ball = ball_enumerate(chain.group(), radius)?;
    let mut entries = Vec::new();
    let mut pass = true;
    for w in window {
        let Some(base) = array.get(w) else {
            return Err(ToeplitzError::WindowOutsideTower(w.clone()));
        };
        let mut sampled_at = None;
        let mut witness = None;
        for n in 1..=chain.depth() {
            let mut contradiction = None;
            for g in &ball {
                if !chain.level(n).contains_word(g) {
                    continue;
                }
                if let Some(found) = array.get(&w.mul(g)) {
                    if found != base {
                        contradiction = Some((g.clone(), base, found));
                        break;
                    }
                }
            }
            match contradiction {
                None => {
                    sampled_at = Some(n);
                    break;
                }
                Some(c) => witness = Some(c),
            }
        }
        if sampled_at.is_none() {
            pass = false;
        }
        entries.push(ExternalVerifyEntry { position: w.clone(), sampled_at, witness });
    }
    Ok(ExternalVerifyReport { entries, pass })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FalsifyOutcome {
    InGroup,
    Witness { position: Word, symbol: u8, translate: Word, observed: u8 },
    Inconclusive,
}

/// Tries to falsify "g preserves all Per(x, Γ_n) data" for g outside Γ_n:
/// looks for a certified position w and γ ∈ Γ_n with an exact evaluation
/// x(w·γ·g) different from the certified symbol. Absence of a witness is
/// reported as Inconclusive, never as a proof.
pub fn essential_falsify(
    spec: &ToeplitzSpec,
    n: usize,
    g: &Word,
    depth: usize,
) -> Result<FalsifyOutcome, ToeplitzError> {
    if n > spec.depth() {
        return Err(ToeplitzError::DepthOutOfRange(n));
    }
    if spec.chain().level(n).contains_word(g) {
        return Ok(FalsifyOutcome::InGroup);
    }
    let gamma: Vec<Word> = ball_enumerate(spec.chain().group(), depth)?
        .into_iter()
        .filter(|w| spec.chain().level(n).contains_word(w))
        .collect();
    for w in spec.sorted_domain() {
        let Some((nw, symbol)) = spec.certification(&w) else { continue };
        if nw > n {
            continue;
        }
        for gm in &gamma {
            let v = spec.evaluate(&w.mul(gm).mul(g));
            if v.exact && v.symbol != symbol {
                return Ok(FalsifyOutcome::Witness {
                    position: w,
                    symbol,
                    translate: gm.clone(),
                    observed: v.symbol,
                });
            }
        }
    }
    Ok(FalsifyOutcome::Inconclusive)
}

#[derive(Clone, Debug)]
pub struct LevelPeriodReport {
    pub level: usize,
    pub tested: usize,
    pub witnesses: usize,
    pub in_group: usize,
    pub inconclusive: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct PeriodStructureReport {
    pub levels: Vec<LevelPeriodReport>,
    pub all_falsified: bool,
}

/// Batch falsification over every level n ≤ max_level and every ball element
/// outside Γ_n; combined with a toeplitz_verify PASS this is the
/// period-structure certificate at (max_level, radius).
pub fn period_structure_check(
    spec: &ToeplitzSpec,
    max_level: usize,
    radius: usize,
) -> Result<PeriodStructureReport, ToeplitzError> {
    if max_level > spec.depth() {
        return Err(ToeplitzError::DepthOutOfRange(max_level));
    }
    let ball = ball_enumerate(spec.chain().group(), radius)?;
    let mut levels = Vec::new();
    let mut all = true;
    for n in 0..=max_level {
        let mut report = LevelPeriodReport {
            level: n,
            tested: 0,
            witnesses: 0,
            in_group: 0,
            inconclusive: Vec::new(),
        };
        for g in &ball {
            if g.is_identity() {
                continue;
            }
            report.tested += 1;
            match essential_falsify(spec, n, g, radius)? {
                FalsifyOutcome::InGroup => report.in_group += 1,
                FalsifyOutcome::Witness { .. } => report.witnesses += 1,
                FalsifyOutcome::Inconclusive => report.inconclusive.push(g.clone()),
            }
        }
        if !report.inconclusive.is_empty() {
            all = false;
        }
        levels.push(report);
    }
    Ok(PeriodStructureReport { levels, all_falsified: all })
}

#[derive(Clone, Debug)]
pub struct OrbitPatterns {
    pub window: Vec<Word>,
    /// distinct window patterns with their first (shortlex) witness
    pub patterns: Vec<(Vec<u8>, Word)>,
    pub dropped: usize,
}

/// Window patterns of orbit translates g·x over a ball, deduplicated;
/// patterns touching a provisional evaluation are dropped and counted.
pub fn orbit_patterns(
    spec: &ToeplitzSpec,
    window: &[Word],
    sample_radius: usize,
) -> Result<OrbitPatterns, ToeplitzError> {
    let mut seen: BTreeMap<Vec<u8>, Word> = BTreeMap::new();
    let mut order: Vec<Vec<u8>> = Vec::new();
    let mut dropped = 0usize;
    for g in ball_unchecked(spec.chain().group(), sample_radius) {
        let mut pattern = Vec::with_capacity(window.len());
        let mut ok = true;
        for w in window {
            let v = spec.evaluate(&w.mul(&g));
            if !v.exact {
                ok = false;
                break;
            }
            pattern.push(v.symbol);
        }
        if !ok {
            dropped += 1;
            continue;
        }
        if !seen.contains_key(&pattern) {
            seen.insert(pattern.clone(), g);
            order.push(pattern);
        }
    }
    let patterns = order
        .into_iter()
        .map(|p| {
            let w = seen[&p].clone();
            (p, w)
        })
        .collect();
    Ok(OrbitPatterns { window: window.to_vec(), patterns, dropped })
}
