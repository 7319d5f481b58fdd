//! Named permutation groups used by instance files and tests.

use crate::group::{group_from_generators, FiniteGroup, GroupError, Permutation};

fn cycle(n: usize) -> Permutation {
    Permutation::new((0..n).map(|i| (i + 1) % n).collect()).expect("rotation is a bijection")
}

/// Generators of ℤₙ acting on `n` points by rotation.
pub fn cyclic_generators(n: usize) -> Vec<Permutation> {
    if n <= 1 {
        Vec::new()
    } else {
        vec![cycle(n)]
    }
}

/// Generators of the dihedral group of order `2n` acting on the vertices of
/// an `n`-gon: rotation, then the reflection `i ↦ −i mod n`.
pub fn dihedral_generators(n: usize) -> Result<Vec<Permutation>, GroupError> {
    if n < 3 {
        return Err(GroupError::Parse {
            input: format!("dihedral {n}"),
            reason: "dihedral groups need n ≥ 3".into(),
        });
    }
    let reflection = Permutation::new((0..n).map(|i| (n - i) % n).collect())?;
    Ok(vec![cycle(n), reflection])
}

/// Generators of Sₙ on `n` points: a transposition and an `n`-cycle.
pub fn symmetric_generators(n: usize) -> Vec<Permutation> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![cycle(2)],
        _ => {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            vec![Permutation::new(t).expect("transposition"), cycle(n)]
        }
    }
}

/// Unit quaternions `±1, ±i, ±j, ±k` as the points `0..8` in the order
/// `1, i, j, k, −1, −i, −j, −k`.
fn quaternion_product(a: usize, b: usize) -> usize {
    // Products of basis units 1,i,j,k as (sign, unit).
    const TABLE: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let (sa, ua) = (a >= 4, a % 4);
    let (sb, ub) = (b >= 4, b % 4);
    let (s, u) = TABLE[ua][ub];
    if sa ^ sb ^ s {
        u + 4
    } else {
        u
    }
}

/// Generators of Q₈ acting on itself by left multiplication (degree 8):
/// left multiplication by `i`, then by `j`.
pub fn quaternion_generators() -> Vec<Permutation> {
    [1, 2]
        .iter()
        .map(|&u| Permutation::new((0..8).map(|q| quaternion_product(u, q)).collect()).unwrap())
        .collect()
}

/// Left multiplication by `−1` in the degree-8 model of Q₈.
pub fn quaternion_minus_one() -> Permutation {
    Permutation::new((0..8).map(|q| quaternion_product(4, q)).collect()).unwrap()
}

/// Direct product of permutation groups acting on the disjoint union of
/// their point sets. Returns the total degree and the shifted generators.
pub fn product_generators(factors: &[(usize, Vec<Permutation>)]) -> (usize, Vec<Permutation>) {
    let total: usize = factors.iter().map(|(d, _)| d).sum();
    let mut out = Vec::new();
    let mut offset = 0;
    for (degree, gens) in factors {
        for g in gens {
            let mut images: Vec<usize> = (0..total).collect();
            for (x, &y) in g.images().iter().enumerate() {
                images[offset + x] = offset + y;
            }
            out.push(Permutation::new(images).expect("shifted bijection"));
        }
        offset += degree;
    }
    (total, out)
}

pub fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    group_from_generators(n, &cyclic_generators(n))
}

pub fn dihedral(n: usize) -> Result<FiniteGroup, GroupError> {
    group_from_generators(n, &dihedral_generators(n)?)
}

pub fn symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    group_from_generators(n, &symmetric_generators(n))
}

pub fn quaternion8() -> FiniteGroup {
    group_from_generators(8, &quaternion_generators()).expect("Q8 closes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{is_normal, subgroup_generated, Subgroup};

    #[test]
    fn orders() {
        assert_eq!(cyclic(12).unwrap().order(), 12);
        assert_eq!(cyclic(1).unwrap().order(), 1);
        assert_eq!(dihedral(4).unwrap().order(), 8);
        assert_eq!(symmetric(4).unwrap().order(), 24);
        assert_eq!(symmetric(2).unwrap().order(), 2);
        assert_eq!(quaternion8().order(), 8);
        assert!(dihedral(2).is_err());
    }

    #[test]
    fn quaternion_structure() {
        let q = quaternion8();
        let minus = q.index_of(&quaternion_minus_one()).unwrap();
        let center = subgroup_generated(&q, &[minus]).unwrap();
        assert_eq!(center.order(), 2);
        // every subgroup of Q8 is normal
        for g in q.elements() {
            let h = subgroup_generated(&q, &[g]).unwrap();
            assert!(is_normal(&q, &h));
        }
        // i² = −1, not abelian
        let i = q.generators()[0];
        let j = q.generators()[1];
        assert_eq!(q.mul(i, i), minus);
        assert_ne!(q.mul(i, j), q.mul(j, i));
        assert_ne!(center, Subgroup::trivial(&q));
    }

    #[test]
    fn products_are_direct() {
        let (deg, gens) = product_generators(&[(2, cyclic_generators(2)), (3, cyclic_generators(3))]);
        assert_eq!(deg, 5);
        assert_eq!(group_from_generators(deg, &gens).unwrap().order(), 6);
    }
}
