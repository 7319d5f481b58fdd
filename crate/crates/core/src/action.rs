//! Actions of finite groups on finite point sets.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::group::{left_cosets, FiniteGroup, Subgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("action table has {found} rows/entries where {expected} were expected")]
    Shape { expected: usize, found: usize },
    #[error("table entry act[{alpha}][{x}] = {value} is out of range")]
    OutOfRange { alpha: usize, x: usize, value: usize },
    #[error("identity axiom fails at x = {x}")]
    IdentityViolation { x: usize },
    #[error("compatibility axiom fails at (α, β, x) = ({alpha}, {beta}, {x})")]
    CompatibilityViolation { alpha: usize, beta: usize, x: usize },
    #[error("group carries no permutation labels, so it has no natural action")]
    NoLabels,
    #[error("point {0} out of range")]
    PointOutOfRange(usize),
    #[error("the action is not transitive")]
    NotTransitive,
}

/// A group together with the table `act[g][x]` of its action on `0..degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    degree: usize,
    act: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ActionProfile {
    pub transitive: bool,
    pub free: bool,
    pub faithful: bool,
    pub orbit_count: usize,
}

/// Validates a table against both action axioms, exhaustively.
pub fn make_action(
    group: Arc<FiniteGroup>,
    degree: usize,
    table: Vec<Vec<usize>>,
) -> Result<GroupAction, ActionError> {
    if degree == 0 {
        return Err(ActionError::ZeroDegree);
    }
    if table.len() != group.order() {
        return Err(ActionError::Shape {
            expected: group.order(),
            found: table.len(),
        });
    }
    let mut act = Vec::with_capacity(group.order() * degree);
    for (alpha, row) in table.into_iter().enumerate() {
        if row.len() != degree {
            return Err(ActionError::Shape {
                expected: degree,
                found: row.len(),
            });
        }
        for (x, &value) in row.iter().enumerate() {
            if value >= degree {
                return Err(ActionError::OutOfRange { alpha, x, value });
            }
        }
        act.extend(row);
    }
    let action = GroupAction { group, degree, act };
    action.check_axioms()?;
    Ok(action)
}

impl GroupAction {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `α·x`.
    pub fn act(&self, alpha: usize, x: usize) -> usize {
        self.act[alpha * self.degree + x]
    }

    /// The point map `x ↦ α·x` as a slice.
    pub fn point_map(&self, alpha: usize) -> &[usize] {
        &self.act[alpha * self.degree..(alpha + 1) * self.degree]
    }

    pub fn check_point(&self, x: usize) -> Result<(), ActionError> {
        if x < self.degree {
            Ok(())
        } else {
            Err(ActionError::PointOutOfRange(x))
        }
    }

    /// Both axioms over every element pair and point.
    pub fn check_axioms(&self) -> Result<(), ActionError> {
        let g = &self.group;
        let e = g.identity();
        if let Some(x) = (0..self.degree).find(|&x| self.act(e, x) != x) {
            return Err(ActionError::IdentityViolation { x });
        }
        for alpha in g.elements() {
            for beta in g.elements() {
                let ab = g.mul(alpha, beta);
                for x in 0..self.degree {
                    if self.act(ab, x) != self.act(alpha, self.act(beta, x)) {
                        return Err(ActionError::CompatibilityViolation { alpha, beta, x });
                    }
                }
            }
        }
        Ok(())
    }

    /// Orbits, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree {
            if seen[x] {
                continue;
            }
            let orbit = self.orbit(x);
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut hit = vec![false; self.degree];
        for alpha in self.group.elements() {
            hit[self.act(alpha, x)] = true;
        }
        (0..self.degree).filter(|&y| hit[y]).collect()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree
    }

    pub fn require_transitive(&self) -> Result<(), ActionError> {
        if self.is_transitive() {
            Ok(())
        } else {
            Err(ActionError::NotTransitive)
        }
    }

    /// Whether `α` moves no point.
    pub fn acts_trivially(&self, alpha: usize) -> bool {
        self.point_map(alpha).iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Elements acting as the identity permutation.
    pub fn kernel(&self) -> Vec<usize> {
        self.group.elements().filter(|&a| self.acts_trivially(a)).collect()
    }

    /// Orbits of a subgroup on the point set, ordered by smallest point.
    pub fn suborbits(&self, sub: &Subgroup) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.degree];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.degree {
            if label[x] != usize::MAX {
                continue;
            }
            let mut orbit: Vec<usize> = sub.members().iter().map(|&h| self.act(h, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                label[y] = out.len();
            }
            out.push(orbit);
        }
        out
    }

    /// An element sending `x` to `y`, the smallest index among all such.
    pub fn transporter(&self, x: usize, y: usize) -> Option<usize> {
        self.group.elements().find(|&a| self.act(a, x) == y)
    }
}

pub fn classify(action: &GroupAction) -> ActionProfile {
    let g = action.group();
    let orbit_count = action.orbits().len();
    let free = g
        .elements()
        .filter(|&a| a != g.identity())
        .all(|a| (0..action.degree()).all(|x| action.act(a, x) != x));
    let faithful = action.kernel() == vec![g.identity()];
    ActionProfile {
        transitive: orbit_count == 1,
        free,
        faithful,
        orbit_count,
    }
}

/// `S(x) = {α : α·x = x}`.
pub fn stabilizer(action: &GroupAction, x: usize) -> Result<Subgroup, ActionError> {
    action.check_point(x)?;
    let members = action
        .group()
        .elements()
        .filter(|&a| action.act(a, x) == x)
        .collect();
    Ok(Subgroup::new(action.group(), members).expect("stabilizers are subgroups"))
}

/// `G` acting on itself by left multiplication.
pub fn regular_action(group: Arc<FiniteGroup>) -> GroupAction {
    let n = group.order();
    let mut act = Vec::with_capacity(n * n);
    for g in group.elements() {
        act.extend(group.elements().map(|h| group.mul(g, h)));
    }
    GroupAction {
        group,
        degree: n,
        act,
    }
}

/// `G` acting on the left cosets of `H`, numbered as in
/// [`left_cosets`](crate::group::left_cosets). The coset `H` itself is the
/// one containing the identity.
pub fn coset_action(group: Arc<FiniteGroup>, sub: &Subgroup) -> GroupAction {
    let cosets = left_cosets(&group, sub);
    let degree = cosets.len();
    let mut act = Vec::with_capacity(group.order() * degree);
    for g in group.elements() {
        act.extend(
            cosets
                .representatives
                .iter()
                .map(|&a| cosets.coset_of(group.mul(g, a))),
        );
    }
    GroupAction { group, degree, act }
}

/// The point of a coset action that is the subgroup itself.
pub fn identity_coset(group: &FiniteGroup, sub: &Subgroup) -> usize {
    left_cosets(group, sub).coset_of(group.identity())
}

/// The defining permutation action of a group built from permutations.
pub fn natural_action(group: Arc<FiniteGroup>) -> Result<GroupAction, ActionError> {
    let labels = group.labels().ok_or(ActionError::NoLabels)?;
    let degree = labels[0].degree();
    let act = labels.iter().flat_map(|p| p.images().iter().copied()).collect();
    Ok(GroupAction { group, degree, act })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::group::{subgroup_generated, Permutation};

    fn s3() -> Arc<FiniteGroup> {
        Arc::new(families::symmetric(3).unwrap())
    }

    fn q8_center_action() -> GroupAction {
        let q = Arc::new(families::quaternion8());
        let minus = q.index_of(&families::quaternion_minus_one()).unwrap();
        let center = subgroup_generated(&q, &[minus]).unwrap();
        coset_action(q, &center)
    }

    #[test]
    fn make_action_validates_axioms() {
        let c4 = Arc::new(families::cyclic(4).unwrap());
        let table: Vec<Vec<usize>> = c4
            .elements()
            .map(|g| c4.elements().map(|h| c4.mul(g, h)).collect())
            .collect();
        assert!(make_action(c4.clone(), 4, table.clone()).is_ok());
        let mut broken = table;
        broken[c4.identity()][2] = 3;
        broken[c4.identity()][3] = 2;
        assert_eq!(
            make_action(c4.clone(), 4, broken),
            Err(ActionError::IdentityViolation { x: 2 })
        );
        let g = s3();
        let natural: Vec<Vec<usize>> =
            g.labels().unwrap().iter().map(|p| p.images().to_vec()).collect();
        assert!(make_action(g.clone(), 3, natural.clone()).is_ok());
        let mut swapped = natural;
        swapped.swap(1, 2);
        assert!(matches!(
            make_action(g, 3, swapped),
            Err(ActionError::CompatibilityViolation { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let nat = natural_action(s3()).unwrap();
        let p = classify(&nat);
        assert!(p.transitive && p.faithful && !p.free);
        let reg = regular_action(Arc::new(families::cyclic(4).unwrap()));
        let p = classify(&reg);
        assert!(p.transitive && p.faithful && p.free);
        let p = classify(&q8_center_action());
        assert!(p.transitive && !p.faithful && !p.free);
        assert_eq!(q8_center_action().degree(), 4);
        let p = classify(&regular_action(Arc::new(families::cyclic(1).unwrap())));
        assert_eq!(p.orbit_count, 1);
    }

    #[test]
    fn stabilizer_examples() {
        let nat = natural_action(s3()).unwrap();
        let s0 = stabilizer(&nat, 0).unwrap();
        assert_eq!(s0.order(), 2);
        let t = nat.group().index_of(&Permutation::parse("(1 2)", 3).unwrap()).unwrap();
        assert!(s0.contains(t));
        let reg = regular_action(s3());
        assert_eq!(stabilizer(&reg, 4).unwrap().order(), 1);
        assert_eq!(stabilizer(&nat, 3), Err(ActionError::PointOutOfRange(3)));

        let g = s3();
        let tr = g.index_of(&Permutation::parse("(0 1)", 3).unwrap()).unwrap();
        let h = subgroup_generated(&g, &[tr]).unwrap();
        let ca = coset_action(g.clone(), &h);
        assert_eq!(ca.degree(), 3);
        assert_eq!(stabilizer(&ca, identity_coset(&g, &h)).unwrap(), h);
        assert!(classify(&ca).transitive);
    }

    #[test]
    fn coset_action_of_trivial_is_regular() {
        let g = s3();
        let ca = coset_action(g.clone(), &Subgroup::trivial(&g));
        assert_eq!(ca, regular_action(g));
    }

    #[test]
    fn q8_center_is_the_kernel() {
        let a = q8_center_action();
        let minus = a.group().index_of(&families::quaternion_minus_one()).unwrap();
        assert_eq!(a.kernel(), vec![a.group().identity(), minus]);
    }

    #[test]
    fn natural_action_needs_labels() {
        let g = Arc::new(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).unwrap());
        assert_eq!(natural_action(g), Err(ActionError::NoLabels));
    }
}
