//! The projective line over `Z/N`, i.e. cyclic subgroups of order `N` in
//! `(Z/N)^2`, indexed densely so that matrix actions become permutations.

use crate::arith::gcd;

pub struct ProjectiveLine {
    n: u64,
    /// class id of the pair (a, b) at index a * n + b, or u32::MAX if not primitive
    class: Vec<u32>,
    reps: Vec<(u64, u64)>,
}

impl ProjectiveLine {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let size = (n * n) as usize;
        let mut class = vec![u32::MAX; size];
        let mut reps = Vec::new();
        let units: Vec<u64> = (0..n.max(2)).filter(|&u| gcd(u, n) == 1).map(|u| u % n).collect();
        for a in 0..n {
            for b in 0..n {
                let idx = (a * n + b) as usize;
                if class[idx] != u32::MAX || gcd(gcd(a, b), n) != 1 {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push((a, b));
                for &u in &units {
                    let j = ((u * a % n) * n + u * b % n) as usize;
                    class[j] = id;
                }
            }
        }
        if n == 1 {
            // Z/1 has a single point
            class[0] = 0;
            if reps.is_empty() {
                reps.push((0, 0));
            }
        }
        ProjectiveLine { n, class, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn reps(&self) -> &[(u64, u64)] {
        &self.reps
    }

    /// Index of the point through `(a, b)`; `(a, b)` must be primitive mod N.
    pub fn index(&self, a: i64, b: i64) -> usize {
        let n = self.n as i64;
        let (a, b) = (a.rem_euclid(n) as u64, b.rem_euclid(n) as u64);
        let id = self.class[(a * self.n + b) as usize];
        assert!(id != u32::MAX, "({a}, {b}) is not primitive mod {}", self.n);
        id as usize
    }

    /// Image of every point under the column action `v -> M v`, for `M`
    /// invertible mod N.
    pub fn permutation(&self, m: [[i64; 2]; 2]) -> Vec<usize> {
        self.reps
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (a as i64, b as i64);
                self.index(m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b)
            })
            .collect()
    }

    /// Number of points `(x : y)` with `form(x, y) = 0 mod N`.
    pub fn count_zeros(&self, form: impl Fn(i64, i64) -> i64) -> u64 {
        let n = self.n as i64;
        self.reps
            .iter()
            .filter(|&&(a, b)| form(a as i64, b as i64).rem_euclid(n) == 0)
            .count() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_level;

    #[test]
    fn size_is_psi() {
        for n in 1..=120 {
            assert_eq!(ProjectiveLine::new(n).len() as u64, make_level(n).unwrap().psi());
        }
    }

    #[test]
    fn permutation_is_bijective() {
        let p1 = ProjectiveLine::new(60);
        let mut perm = p1.permutation([[0, -1], [1, 0]]);
        perm.sort_unstable();
        assert_eq!(perm, (0..p1.len()).collect::<Vec<_>>());
    }
}
