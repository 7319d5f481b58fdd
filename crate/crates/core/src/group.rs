//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..order`. Groups built from permutation generators
//! carry the permutation image of every element, and the product `a * b`
//! is the composition "apply `b`, then `a`", so that tables of left actions
//! satisfy `act(a * b, x) = act(a, act(b, x))`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest group order for which a full multiplication table is built.
pub const MAX_ORDER: usize = 2048;

/// Default number of triples checked exhaustively for associativity.
pub const DEFAULT_TRIPLE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("generator {index} is not a bijection of 0..{degree}")]
    NotBijective { index: usize, degree: usize },
    #[error("generator {index} has degree {found}, expected {expected}")]
    DegreeMismatch { index: usize, found: usize, expected: usize },
    #[error("group order exceeds the table limit of {MAX_ORDER}")]
    TooLarge,
    #[error("element index {0} out of range")]
    InvalidElement(usize),
    #[error("multiplication table is not {0}x{0}")]
    TableShape(usize),
    #[error("group axiom violated: {0}")]
    Axiom(String),
    #[error("permutation is not an element of the group")]
    NotAnElement,
    #[error("cannot parse permutation `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// A bijection of `0..n`, stored by its one-line images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GroupError::NotBijective { index: 0, degree: n });
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation of `0..degree` from disjoint or overlapping cycles,
    /// composed right to left.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut perm = Self::identity(degree);
        for cycle in cycles {
            let mut images: Vec<usize> = (0..degree).collect();
            for (k, &p) in cycle.iter().enumerate() {
                let q = cycle[(k + 1) % cycle.len()];
                if p >= degree || q >= degree {
                    return Err(GroupError::NotBijective { index: 0, degree });
                }
                images[p] = q;
            }
            let c = Self::new(images)?;
            perm = perm.compose(&c);
        }
        Ok(perm)
    }

    /// Parses either a one-line image array `[1,0,2]` or cycle notation
    /// `(0 1)(2 3)` over `0..degree`.
    pub fn parse(input: &str, degree: usize) -> Result<Self, GroupError> {
        let err = |reason: &str| GroupError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim();
        if s.starts_with('[') {
            let images: Vec<usize> =
                serde_json::from_str(s).map_err(|_| err("malformed image array"))?;
            if images.len() != degree {
                return Err(err(&format!("expected {degree} images, found {}", images.len())));
            }
            return Self::new(images).map_err(|_| err("images do not form a bijection"));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let Some(body) = rest.strip_prefix('(') else {
                return Err(err(&format!("unexpected token `{rest}`")));
            };
            let Some(close) = body.find(')') else {
                return Err(err(&format!("unclosed cycle at `{rest}`")));
            };
            let inner = &body[..close];
            if inner.contains('(') {
                return Err(err(&format!("unclosed cycle at `{rest}`")));
            }
            let mut cycle = Vec::new();
            for tok in inner.split(|c: char| c == ',' || c.is_whitespace()) {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok.parse().map_err(|_| err(&format!("bad point `{tok}`")))?;
                if p >= degree {
                    return Err(err(&format!("point {p} out of range for degree {degree}")));
                }
                if cycle.contains(&p) {
                    return Err(err(&format!("point {p} repeated in a cycle")));
                }
                cycle.push(p);
            }
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        Self::from_cycles(degree, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Self { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.images[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.images[p];
            }
            out.push(cycle);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = GroupError;
    fn try_from(images: Vec<usize>) -> Result<Self, GroupError> {
        Self::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = GroupError;

    /// Only image arrays are self-describing; cycle strings need a degree.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let images: Vec<usize> = serde_json::from_str(s.trim()).map_err(|_| GroupError::Parse {
            input: s.to_string(),
            reason: "expected an image array".into(),
        })?;
        let n = images.len();
        Self::parse(s, n)
    }
}

/// A finite group with a total multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
    labels: Option<Vec<Permutation>>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a raw table, checking closure, identity, inverses
    /// and associativity (exhaustively).
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::TableShape(0));
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge);
        }
        let mut mul = Vec::with_capacity(order * order);
        for row in &table {
            if row.len() != order {
                return Err(GroupError::TableShape(order));
            }
            for &v in row {
                if v >= order {
                    return Err(GroupError::InvalidElement(v));
                }
                mul.push(v);
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e * order + g] == g && mul[g * order + e] == g))
            .ok_or_else(|| GroupError::Axiom("no identity element".into()))?;
        let mut inv = vec![usize::MAX; order];
        for g in 0..order {
            inv[g] = (0..order)
                .find(|&h| mul[g * order + h] == identity && mul[h * order + g] == identity)
                .ok_or_else(|| GroupError::Axiom(format!("element {g} has no inverse")))?;
        }
        let group = Self {
            order,
            mul,
            identity,
            inv,
            labels: None,
            generators: Vec::new(),
        };
        group.check_associativity(usize::MAX, 0)?;
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Element indices of the generating set, when the group was built from one.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn labels(&self) -> Option<&[Permutation]> {
        self.labels.as_deref()
    }

    pub fn label(&self, g: usize) -> Option<&Permutation> {
        self.labels.as_ref().map(|l| &l[g])
    }

    /// Degree of the permutation labels, if any.
    pub fn degree(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l[0].degree())
    }

    pub fn index_of(&self, perm: &Permutation) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|p| p == perm)
    }

    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn check_element(&self, g: usize) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::InvalidElement(g))
        }
    }

    /// Identity and inverse axioms, checked exhaustively.
    pub fn check_unit_axioms(&self) -> Result<(), GroupError> {
        let e = self.identity;
        for g in self.elements() {
            if self.mul(e, g) != g || self.mul(g, e) != g {
                return Err(GroupError::Axiom(format!("identity fails at {g}")));
            }
            if self.mul(g, self.inv(g)) != e || self.mul(self.inv(g), g) != e {
                return Err(GroupError::Axiom(format!("inverse fails at {g}")));
            }
        }
        Ok(())
    }

    /// Associativity over all triples when `order³ ≤ budget`, otherwise over
    /// `budget` triples drawn from a generator seeded with `seed`.
    /// Returns the number of triples checked.
    pub fn check_associativity(&self, budget: usize, seed: u64) -> Result<usize, GroupError> {
        let n = self.order;
        let fail = |a, b, c| GroupError::Axiom(format!("associativity fails at ({a}, {b}, {c})"));
        let total = n.checked_pow(3);
        match total {
            Some(t) if t <= budget => {
                for a in 0..n {
                    for b in 0..n {
                        let ab = self.mul(a, b);
                        for c in 0..n {
                            if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                                return Err(fail(a, b, c));
                            }
                        }
                    }
                }
                Ok(t)
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for _ in 0..budget {
                    let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(fail(a, b, c));
                    }
                }
                Ok(budget)
            }
        }
    }
}

/// Closure of a set of permutations of `0..degree` under composition.
///
/// Elements are numbered breadth-first from the identity, extending each
/// element by the generators in the order given.
pub fn group_from_generators(
    degree: usize,
    generators: &[Permutation],
) -> Result<FiniteGroup, GroupError> {
    if degree == 0 {
        return Err(GroupError::ZeroDegree);
    }
    for (index, g) in generators.iter().enumerate() {
        if g.degree() != degree {
            return Err(GroupError::DegreeMismatch {
                index,
                found: g.degree(),
                expected: degree,
            });
        }
        Permutation::new(g.images.clone()).map_err(|_| GroupError::NotBijective { index, degree })?;
    }

    let identity = Permutation::identity(degree);
    let mut labels = vec![identity.clone()];
    let mut index: HashMap<Permutation, usize> = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = labels[g].compose(s);
            if !index.contains_key(&h) {
                if labels.len() == MAX_ORDER {
                    return Err(GroupError::TooLarge);
                }
                index.insert(h.clone(), labels.len());
                queue.push_back(labels.len());
                labels.push(h);
            }
        }
    }

    let order = labels.len();
    let mut mul = Vec::with_capacity(order * order);
    for a in &labels {
        for b in &labels {
            mul.push(index[&a.compose(b)]);
        }
    }
    let inv = labels.iter().map(|p| index[&p.inverse()]).collect();
    let gens = generators.iter().map(|s| index[s]).collect();
    Ok(FiniteGroup {
        order,
        mul,
        identity: 0,
        inv,
        labels: Some(labels),
        generators: gens,
    })
}

/// A subgroup, held as the sorted list of its element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Validates that `members` contains the identity and is closed.
    pub fn new(group: &FiniteGroup, mut members: Vec<usize>) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            group.check_element(m)?;
        }
        let sub = Self { members };
        if !sub.contains(group.identity()) {
            return Err(GroupError::Axiom("subgroup lacks the identity".into()));
        }
        for &a in &sub.members {
            if !sub.contains(group.inv(a)) {
                return Err(GroupError::Axiom(format!("subgroup not closed under inverse at {a}")));
            }
            for &b in &sub.members {
                if !sub.contains(group.mul(a, b)) {
                    return Err(GroupError::Axiom(format!(
                        "subgroup not closed under products at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(sub)
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Self {
            members: vec![group.identity()],
        }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Self {
            members: group.elements().collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

/// Smallest subgroup containing `seeds`.
pub fn subgroup_generated(group: &FiniteGroup, seeds: &[usize]) -> Result<Subgroup, GroupError> {
    for &s in seeds {
        group.check_element(s)?;
    }
    let mut inside = vec![false; group.order()];
    inside[group.identity()] = true;
    let mut members = vec![group.identity()];
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(g) = queue.pop_front() {
        for &s in seeds {
            let h = group.mul(g, s);
            if !inside[h] {
                inside[h] = true;
                members.push(h);
                queue.push_back(h);
            }
        }
    }
    members.sort_unstable();
    Ok(Subgroup { members })
}

/// `g h g⁻¹ ∈ H` for every `g ∈ G`, `h ∈ H`.
pub fn is_normal(group: &FiniteGroup, sub: &Subgroup) -> bool {
    group
        .elements()
        .all(|g| sub.members.iter().all(|&h| sub.contains(group.conjugate(g, h))))
}

/// Left cosets `gH` of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetSpace {
    pub subgroup: Subgroup,
    /// Each coset as a sorted list, ordered by representative.
    pub cosets: Vec<Vec<usize>>,
    /// Smallest element index of each coset.
    pub representatives: Vec<usize>,
    #[serde(skip)]
    coset_of: Vec<usize>,
}

impl CosetSpace {
    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }
}

pub fn left_cosets(group: &FiniteGroup, sub: &Subgroup) -> CosetSpace {
    let mut coset_of = vec![usize::MAX; group.order()];
    let mut cosets = Vec::new();
    let mut representatives = Vec::new();
    for g in group.elements() {
        if coset_of[g] != usize::MAX {
            continue;
        }
        let mut coset: Vec<usize> = sub.members.iter().map(|&h| group.mul(g, h)).collect();
        coset.sort_unstable();
        for &c in &coset {
            coset_of[c] = cosets.len();
        }
        representatives.push(g);
        cosets.push(coset);
    }
    CosetSpace {
        subgroup: sub.clone(),
        cosets,
        representatives,
        coset_of,
    }
}

/// Largest normal subgroup of `G` contained in `H`: `∩_g gHg⁻¹`.
pub fn normal_core(group: &FiniteGroup, sub: &Subgroup) -> Subgroup {
    let members = sub
        .members
        .iter()
        .copied()
        .filter(|&h| group.elements().all(|g| sub.contains(group.conjugate(group.inv(g), h))))
        .collect();
    Subgroup { members }
}
