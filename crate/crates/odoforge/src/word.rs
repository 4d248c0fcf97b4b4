//! Group elements as reduced words over a fixed generating set.
//!
//! Two group kinds are supported: free groups (letters stored as a freely
//! reduced symbol sequence) and free-abelian groups (canonical exponent
//! vectors). A fixed shortlex order on words makes every downstream choice
//! of representatives reproducible: symbols are ordered
//! `a1 < a1^-1 < a2 < a2^-1 < ...` and words compare by length first, then
//! lexicographically.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("syntax error at byte {0}")]
    Syntax(usize),
    #[error("operands belong to different groups")]
    GroupMismatch,
    #[error("radius {requested} exceeds the cap {cap} for this group kind")]
    RadiusCap { requested: usize, cap: usize },
    #[error("invalid group descriptor: {0}")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Free,
    FreeAbelian,
}

#[derive(Debug, PartialEq, Eq)]
struct GroupData {
    kind: GroupKind,
    gens: Vec<String>,
}

/// A finitely generated group: either free or free-abelian of rank `k ≥ 1`,
/// with named generators. Cheap to clone; equality is structural.
#[derive(Clone)]
pub struct GroupDescriptor(Arc<GroupData>);

impl fmt::Debug for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}({})", self.0.kind, self.0.gens.join(","))
    }
}

impl PartialEq for GroupDescriptor {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for GroupDescriptor {}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "e"
        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl GroupDescriptor {
    pub fn new(kind: GroupKind, gens: Vec<String>) -> Result<Self, WordError> {
        if gens.is_empty() {
            return Err(WordError::BadDescriptor("rank must be at least 1".into()));
        }
        for (i, g) in gens.iter().enumerate() {
            if !valid_name(g) {
                return Err(WordError::BadDescriptor(format!("bad generator name `{g}`")));
            }
            if gens[..i].contains(g) {
                return Err(WordError::BadDescriptor(format!("duplicate generator `{g}`")));
            }
        }
        Ok(GroupDescriptor(Arc::new(GroupData { kind, gens })))
    }

    pub fn free(names: &[&str]) -> Self {
        Self::new(GroupKind::Free, names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    pub fn free_abelian(names: &[&str]) -> Self {
        Self::new(GroupKind::FreeAbelian, names.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    pub fn kind(&self) -> GroupKind {
        self.0.kind
    }

    pub fn rank(&self) -> usize {
        self.0.gens.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.0.gens
    }

    /// Number of symbols (generators and their inverses).
    pub fn symbol_count(&self) -> usize {
        2 * self.rank()
    }

    pub fn generator(&self, idx: usize) -> Word {
        assert!(idx < self.rank());
        match self.kind() {
            GroupKind::Free => Word {
                group: self.clone(),
                repr: Repr::Free(vec![sym(idx, false)]),
            },
            GroupKind::FreeAbelian => {
                let mut v = vec![0i64; self.rank()];
                v[idx] = 1;
                Word { group: self.clone(), repr: Repr::Abelian(v) }
            }
        }
    }

    pub fn identity(&self) -> Word {
        match self.kind() {
            GroupKind::Free => Word { group: self.clone(), repr: Repr::Free(Vec::new()) },
            GroupKind::FreeAbelian => {
                Word { group: self.clone(), repr: Repr::Abelian(vec![0; self.rank()]) }
            }
        }
    }

    /// Word whose letters are the given symbols, freely reduced.
    pub fn word_from_symbols(&self, symbols: &[u32]) -> Word {
        match self.kind() {
            GroupKind::Free => {
                let mut out: Vec<u32> = Vec::with_capacity(symbols.len());
                for &s in symbols {
                    debug_assert!((s as usize) < self.symbol_count());
                    if out.last() == Some(&(s ^ 1)) {
                        out.pop();
                    } else {
                        out.push(s);
                    }
                }
                Word { group: self.clone(), repr: Repr::Free(out) }
            }
            GroupKind::FreeAbelian => {
                let mut v = vec![0i64; self.rank()];
                for &s in symbols {
                    let g = (s / 2) as usize;
                    v[g] += if s & 1 == 0 { 1 } else { -1 };
                }
                Word { group: self.clone(), repr: Repr::Abelian(v) }
            }
        }
    }

    pub fn word_from_exponents(&self, exps: Vec<i64>) -> Word {
        assert_eq!(self.kind(), GroupKind::FreeAbelian);
        assert_eq!(exps.len(), self.rank());
        Word { group: self.clone(), repr: Repr::Abelian(exps) }
    }

    /// Default radius cap for `ball_enumerate` (12 for free, 50 for abelian).
    pub fn radius_cap(&self) -> usize {
        match self.kind() {
            GroupKind::Free => 12,
            GroupKind::FreeAbelian => 50,
        }
    }
}

/// Symbol id for generator `g`: `2g` is the generator, `2g+1` its inverse.
#[inline]
pub fn sym(gen: usize, inverse: bool) -> u32 {
    (2 * gen + usize::from(inverse)) as u32
}

#[inline]
pub fn sym_inverse(s: u32) -> u32 {
    s ^ 1
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Free(Vec<u32>),
    Abelian(Vec<i64>),
}

/// A reduced word: the universal element representation for both group kinds.
#[derive(Clone, Debug)]
pub struct Word {
    group: GroupDescriptor,
    repr: Repr,
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.repr == other.repr
    }
}
impl Eq for Word {}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // group omitted on purpose: equal words hash equal, and words from
        // several groups rarely share a table
        self.repr.hash(state);
    }
}

impl Word {
    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn is_identity(&self) -> bool {
        match &self.repr {
            Repr::Free(ls) => ls.is_empty(),
            Repr::Abelian(v) => v.iter().all(|&x| x == 0),
        }
    }

    /// Word length in the generators (L1 norm for the abelian kind).
    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Free(ls) => ls.len(),
            Repr::Abelian(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Letters as symbol ids, leftmost first. Abelian words yield their
    /// canonical spelling (all `a1` powers, then `a2`, ...).
    pub fn symbols(&self) -> Vec<u32> {
        match &self.repr {
            Repr::Free(ls) => ls.clone(),
            Repr::Abelian(v) => {
                let mut out = Vec::with_capacity(self.len());
                for (g, &x) in v.iter().enumerate() {
                    let s = sym(g, x < 0);
                    for _ in 0..x.unsigned_abs() {
                        out.push(s);
                    }
                }
                out
            }
        }
    }

    /// Exponent-sum vector (the abelianization image).
    pub fn exponents(&self) -> Vec<i64> {
        match &self.repr {
            Repr::Free(ls) => {
                let mut v = vec![0i64; self.group.rank()];
                for &s in ls {
                    v[(s / 2) as usize] += if s & 1 == 0 { 1 } else { -1 };
                }
                v
            }
            Repr::Abelian(v) => v.clone(),
        }
    }

    pub fn mul(&self, rhs: &Word) -> Word {
        assert_eq!(self.group, rhs.group, "group mismatch");
        match (&self.repr, &rhs.repr) {
            (Repr::Free(a), Repr::Free(b)) => {
                let mut out = a.clone();
                for &s in b {
                    if out.last() == Some(&(s ^ 1)) {
                        out.pop();
                    } else {
                        out.push(s);
                    }
                }
                Word { group: self.group.clone(), repr: Repr::Free(out) }
            }
            (Repr::Abelian(a), Repr::Abelian(b)) => {
                let v = a.iter().zip(b).map(|(x, y)| x + y).collect();
                Word { group: self.group.clone(), repr: Repr::Abelian(v) }
            }
            _ => unreachable!("kind fixed by the shared descriptor"),
        }
    }

    pub fn inverse(&self) -> Word {
        match &self.repr {
            Repr::Free(ls) => {
                let inv = ls.iter().rev().map(|&s| s ^ 1).collect();
                Word { group: self.group.clone(), repr: Repr::Free(inv) }
            }
            Repr::Abelian(v) => {
                Word { group: self.group.clone(), repr: Repr::Abelian(v.iter().map(|x| -x).collect()) }
            }
        }
    }

    /// Re-reduces the word. Words are reduced by construction, so this is a
    /// fixed point; kept as the public `reduce` operation.
    pub fn reduce(&self) -> Word {
        self.group.word_from_symbols(&self.symbols())
    }

    pub fn checked_mul(&self, rhs: &Word) -> Result<Word, WordError> {
        if self.group != rhs.group {
            return Err(WordError::GroupMismatch);
        }
        Ok(self.mul(rhs))
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        // g^-1 * self * g
        g.inverse().mul(self).mul(g)
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        debug_assert_eq!(self.group, other.group);
        self.len()
            .cmp(&other.len())
            .then_with(|| self.symbols().cmp(&other.symbols()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.group.kind(), self.group.generator_names())
            .cmp(&(other.group.kind(), other.group.generator_names()))
            .then_with(|| self.shortlex_cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        let names = self.group.generator_names();
        let mut parts: Vec<String> = Vec::new();
        match &self.repr {
            Repr::Free(ls) => {
                let mut i = 0;
                while i < ls.len() {
                    let s = ls[i];
                    let mut j = i;
                    while j < ls.len() && ls[j] == s {
                        j += 1;
                    }
                    let count = (j - i) as i64;
                    let exp = if s & 1 == 0 { count } else { -count };
                    let name = &names[(s / 2) as usize];
                    if exp == 1 {
                        parts.push(name.clone());
                    } else {
                        parts.push(format!("{name}^{exp}"));
                    }
                    i = j;
                }
            }
            Repr::Abelian(v) => {
                for (g, &x) in v.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    if x == 1 {
                        parts.push(names[g].clone());
                    } else {
                        parts.push(format!("{}^{}", names[g], x));
                    }
                }
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Parses the grammar `term ('*' term)*` with `term = name ('^' int)?`;
/// whitespace is ignored and `e` denotes the identity. Zero exponents reduce
/// away silently.
pub fn parse_word(text: &str, group: &GroupDescriptor) -> Result<Word, WordError> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut acc = group.identity();
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            if first {
                return Err(WordError::Syntax(pos));
            }
            break;
        }
        if !first {
            if bytes[pos] != b'*' {
                return Err(WordError::Syntax(pos));
            }
            pos += 1;
            skip_ws(&mut pos);
        }
        let start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
            pos += 1;
        }
        if pos == start {
            return Err(WordError::Syntax(pos));
        }
        let name = &text[start..pos];
        skip_ws(&mut pos);
        let mut exp: i64 = 1;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            skip_ws(&mut pos);
            let estart = pos;
            if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            exp = text[estart..pos].parse().map_err(|_| WordError::Syntax(estart))?;
            // keeps letter materialization bounded for the free kind
            if exp.unsigned_abs() > 1_000_000 {
                return Err(WordError::Syntax(estart));
            }
        }
        if name == "e" {
            // identity term, any exponent collapses
        } else {
            let idx = group
                .generator_names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            let term = match group.kind() {
                GroupKind::Free => {
                    let s = sym(idx, exp < 0);
                    group.word_from_symbols(&vec![s; exp.unsigned_abs() as usize])
                }
                GroupKind::FreeAbelian => {
                    let mut v = vec![0i64; group.rank()];
                    v[idx] = exp;
                    group.word_from_exponents(v)
                }
            };
            acc = acc.mul(&term);
        }
        first = false;
        skip_ws(&mut pos);
        if pos >= bytes.len() {
            break;
        }
        if bytes[pos] != b'*' {
            return Err(WordError::Syntax(pos));
        }
    }
    Ok(acc)
}

/// All reduced words of length at most `radius`, in shortlex order.
pub fn ball_enumerate(group: &GroupDescriptor, radius: usize) -> Result<Vec<Word>, WordError> {
    let cap = group.radius_cap();
    if radius > cap {
        return Err(WordError::RadiusCap { requested: radius, cap });
    }
    if group.kind() == GroupKind::Free && free_ball_size(group.rank(), radius) > 5_000_000 {
        // higher ranks hit the cap well before radius 12
        return Err(WordError::RadiusCap { requested: radius, cap });
    }
    Ok(ball_unchecked(group, radius))
}

/// Ball enumeration without the public radius cap; internal callers bound
/// the radius themselves (e.g. by a coset-graph eccentricity).
pub(crate) fn ball_unchecked(group: &GroupDescriptor, radius: usize) -> Vec<Word> {
    match group.kind() {
        GroupKind::Free => {
            let mut out = vec![group.identity()];
            let mut level: Vec<Vec<u32>> = vec![Vec::new()];
            for _ in 0..radius {
                let mut next: Vec<Vec<u32>> = Vec::new();
                for w in &level {
                    for s in 0..group.symbol_count() as u32 {
                        if w.last() == Some(&(s ^ 1)) {
                            continue;
                        }
                        let mut ext = w.clone();
                        ext.push(s);
                        next.push(ext);
                    }
                }
                for w in &next {
                    out.push(Word { group: group.clone(), repr: Repr::Free(w.clone()) });
                }
                level = next;
            }
            out
        }
        GroupKind::FreeAbelian => {
            let d = group.rank();
            let mut vecs: Vec<Vec<i64>> = Vec::new();
            let mut cur = vec![0i64; d];
            enumerate_l1(&mut vecs, &mut cur, 0, radius as i64);
            let mut words: Vec<Word> =
                vecs.into_iter().map(|v| group.word_from_exponents(v)).collect();
            words.sort_by(|a, b| a.shortlex_cmp(b));
            words
        }
    }
}

fn enumerate_l1(out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>, coord: usize, budget: i64) {
    if coord == cur.len() {
        out.push(cur.clone());
        return;
    }
    for x in -budget..=budget {
        cur[coord] = x;
        enumerate_l1(out, cur, coord + 1, budget - x.abs());
    }
    cur[coord] = 0;
}

/// Closed-form size of the free-group ball of radius `r` on `k ≥ 1`
/// generators, saturating at `u64::MAX`.
pub fn free_ball_size(rank: usize, radius: usize) -> u64 {
    let k = rank as u128;
    if radius == 0 {
        return 1;
    }
    if k == 1 {
        return 2 * radius as u64 + 1;
    }
    let q = 2 * k - 1;
    let mut power: u128 = 1;
    for _ in 0..radius {
        power = power.saturating_mul(q);
        if power > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    let size = 1 + 2 * k * (power - 1) / (q - 1);
    u64::try_from(size).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupDescriptor {
        GroupDescriptor::free(&["a", "b"])
    }
    fn z2() -> GroupDescriptor {
        GroupDescriptor::free_abelian(&["a", "b"])
    }
    fn z1() -> GroupDescriptor {
        GroupDescriptor::free_abelian(&["t"])
    }

    #[test]
    fn parse_reduces_to_identity() {
        let w = parse_word("a*b*b^-1*a^-1", &f2()).unwrap();
        assert!(w.is_identity());
        assert_eq!(w.to_string(), "e");
    }

    #[test]
    fn parse_abelian_exponent_vector() {
        let w = parse_word("a^3", &z2()).unwrap();
        assert_eq!(w.exponents(), vec![3, 0]);
    }

    #[test]
    fn parse_irreducible_conjugate() {
        let w = parse_word("b*a*b^-1", &f2()).unwrap();
        assert_eq!(w.len(), 3);
        // no adjacent inverse pair
        let syms = w.symbols();
        for pair in syms.windows(2) {
            assert_ne!(pair[0] ^ 1, pair[1]);
        }
        assert_eq!(w.to_string(), "b*a*b^-1");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_word("a*c", &f2()),
            Err(WordError::UnknownGenerator("c".into()))
        );
        assert!(matches!(parse_word("a**b", &f2()), Err(WordError::Syntax(_))));
        assert!(matches!(parse_word("", &f2()), Err(WordError::Syntax(_))));
        // zero exponents vanish
        assert!(parse_word("a^0", &f2()).unwrap().is_identity());
    }

    #[test]
    fn descriptor_rejects_bad_names() {
        assert!(GroupDescriptor::new(GroupKind::Free, vec![]).is_err());
        assert!(GroupDescriptor::new(GroupKind::Free, vec!["e".into()]).is_err());
        assert!(GroupDescriptor::new(GroupKind::Free, vec!["a".into(), "a".into()]).is_err());
        assert!(GroupDescriptor::new(GroupKind::Free, vec!["a*b".into()]).is_err());
    }

    #[test]
    fn multiply_inverse_laws() {
        let g = f2();
        let a = g.generator(0);
        let b = g.generator(1);
        assert!(a.mul(&a.inverse()).is_identity());
        assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
        let z = z2();
        let u = z.word_from_exponents(vec![1, 2]);
        let v = z.word_from_exponents(vec![3, -1]);
        assert_eq!(u.mul(&v).exponents(), vec![4, 1]);
    }

    #[test]
    fn checked_mul_detects_mismatch() {
        let a = f2().generator(0);
        let t = z1().generator(0);
        assert_eq!(a.checked_mul(&t), Err(WordError::GroupMismatch));
    }

    #[test]
    fn ball_radius_one_free() {
        let ws = ball_enumerate(&f2(), 1).unwrap();
        let printed: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(printed, vec!["e", "a", "a^-1", "b", "b^-1"]);
    }

    #[test]
    fn ball_radius_two_free_count() {
        assert_eq!(ball_enumerate(&f2(), 2).unwrap().len(), 17);
    }

    #[test]
    fn ball_integer_line() {
        let ws = ball_enumerate(&z1(), 3).unwrap();
        let exps: Vec<i64> = ws.iter().map(|w| w.exponents()[0]).collect();
        assert_eq!(exps, vec![0, 1, -1, 2, -2, 3, -3]);
    }

    #[test]
    fn ball_cap_enforced() {
        assert!(matches!(
            ball_enumerate(&f2(), 13),
            Err(WordError::RadiusCap { .. })
        ));
        // higher ranks saturate the size guard before the radius cap
        let f3 = GroupDescriptor::free(&["a", "b", "c"]);
        assert!(matches!(ball_enumerate(&f3, 12), Err(WordError::RadiusCap { .. })));
        assert_eq!(ball_enumerate(&f3, 3).unwrap().len() as u64, free_ball_size(3, 3));
    }

    #[test]
    fn parser_rejects_unbounded_exponents() {
        assert!(matches!(
            parse_word("a^123456789123", &f2()),
            Err(WordError::Syntax(_))
        ));
    }

    // oracle: generate every letter string of length <= r, reduce, dedupe
    fn brute_ball(group: &GroupDescriptor, radius: usize) -> std::collections::BTreeSet<Word> {
        let mut out = std::collections::BTreeSet::new();
        let nsym = group.symbol_count() as u32;
        let mut frontier: Vec<Vec<u32>> = vec![Vec::new()];
        out.insert(group.identity());
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..nsym {
                    let mut ext = w.clone();
                    ext.push(s);
                    let red = group.word_from_symbols(&ext);
                    if red.len() <= radius {
                        out.insert(red);
                    }
                    next.push(ext);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn ball_matches_brute_force_and_closed_form() {
        let g = f2();
        for r in 0..=5 {
            let ball = ball_enumerate(&g, r).unwrap();
            let brute = brute_ball(&g, r);
            assert_eq!(ball.len() as u64, free_ball_size(2, r));
            assert_eq!(ball.iter().cloned().collect::<std::collections::BTreeSet<_>>(), brute);
        }
    }

    #[test]
    fn ball_is_shortlex_sorted_and_inverse_closed() {
        for g in [f2(), z2()] {
            let ball = ball_enumerate(&g, 4).unwrap();
            for pair in ball.windows(2) {
                assert_eq!(pair[0].shortlex_cmp(&pair[1]), Ordering::Less);
            }
            let set: std::collections::BTreeSet<_> = ball.iter().cloned().collect();
            for w in &ball {
                assert!(set.contains(&w.inverse()));
            }
        }
    }

    #[test]
    fn reduce_is_idempotent_and_group_laws_hold_on_ball() {
        for g in [f2(), z2()] {
            let ball = ball_enumerate(&g, 2).unwrap();
            for w in &ball {
                assert_eq!(w.reduce(), *w);
                assert!(w.mul(&w.inverse()).is_identity());
            }
            // associativity over every triple from the radius-2 ball
            for u in &ball {
                for v in &ball {
                    for w in &ball {
                        assert_eq!(u.mul(v).mul(w), u.mul(&v.mul(w)));
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_print_parse() {
        for g in [f2(), z2()] {
            for w in ball_enumerate(&g, 4).unwrap() {
                let back = parse_word(&w.to_string(), &g).unwrap();
                assert_eq!(back, w);
            }
        }
    }
}
