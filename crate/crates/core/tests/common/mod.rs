//! Test-only oracles that share no code path with the library's formulas.
#![allow(dead_code)]

use gonality::arith::{ext_gcd, gcd, gcd_i};
use gonality::p1::ProjectiveLine;

type Mat = [[i64; 2]; 2];

fn mul(a: Mat, b: Mat) -> Mat {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Lift a point `(c : d)` of P^1(Z/N) to a matrix of SL_2(Z) with that bottom row.
fn lift(c: u64, d: u64, n: u64) -> Mat {
    let n = n as i64;
    let c = if c == 0 { n } else { c as i64 };
    let mut d = d as i64;
    while gcd_i(c, d) != 1 {
        d += n;
    }
    // a d - b c = 1
    let (_, x, y) = ext_gcd(d, c);
    [[x, -y], [c, d]]
}

fn inverse(g: Mat) -> Mat {
    [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]]
}

/// Whether `M` lies in the Atkin-Lehner coset `[[q*, *], [N*, q*]]`.
fn in_al_coset(m: Mat, n: i64, q: i64) -> bool {
    m[0][0] % q == 0 && m[1][1] % q == 0 && m[1][0] % n == 0
}

/// Genus of X0(N) by permutation action of S, ST, T on P^1(Z/N).
pub fn coset_genus(n: u64) -> u64 {
    let line = ProjectiveLine::new(n);
    let s = line.permutation([[0, 1], [-1, 0]]);
    let st = line.permutation([[0, 1], [-1, 1]]);
    let t = line.permutation([[1, 0], [1, 1]]);
    let e2 = (0..line.len()).filter(|&i| s[i] == i).count() as i64;
    let e3 = (0..line.len()).filter(|&i| st[i] == i).count() as i64;
    let cusps = orbits(line.len(), &[t]).len() as i64;
    let twelve = 12 + line.len() as i64 - 3 * e2 - 4 * e3 - 6 * cusps;
    assert_eq!(twelve % 12, 0);
    (twelve / 12) as u64
}

fn orbits(len: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; len];
    let mut out = Vec::new();
    for i in 0..len {
        if seen[i] {
            continue;
        }
        let mut orbit = vec![i];
        seen[i] = true;
        let mut k = 0;
        while k < orbit.len() {
            let j = orbit[k];
            for g in gens {
                if !seen[g[j]] {
                    seen[g[j]] = true;
                    orbit.push(g[j]);
                }
            }
            k += 1;
        }
        out.push(orbit);
    }
    out
}

fn reduced_primitive_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let abs = -disc;
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= abs {
        for b in -a..=a {
            let num = b * b + abs;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || gcd(gcd(a as u64, b.unsigned_abs()), c as u64) != 1 {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out
}

/// Fixed points of w_q on X0(N), counted as Gamma_0(N)-classes of points of
/// the upper half plane (plus cusps) fixed by some matrix of the
/// Atkin-Lehner coset.
pub fn fixed_points_oracle(n: u64, q: u64) -> u64 {
    let line = ProjectiveLine::new(n);
    let lifts: Vec<Mat> = line.reps().iter().map(|&(c, d)| lift(c, d, n)).collect();
    let (ni, qi) = (n as i64, q as i64);
    let fixed_by = |g: &Mat, a: &Mat| in_al_coset(mul(mul(*g, *a), inverse(*g)), ni, qi);

    // every integral matrix of determinant q fixing the root of a primitive
    // form (a, b, c) of discriminant D is [[(t - b u)/2, -c u], [a u, (t + b u)/2]]
    // with t^2 - D u^2 = 4q
    let mut discs = std::collections::BTreeSet::new();
    let mut u = 1i64;
    while 3 * u * u <= 4 * qi {
        let mut t = 0i64;
        while t * t < 4 * qi {
            let rest = 4 * qi - t * t;
            if rest % (u * u) == 0 && matches!((-rest / (u * u)).rem_euclid(4), 0 | 1) {
                discs.insert(-rest / (u * u));
            }
            t += 1;
        }
        u += 1;
    }
    let mut elliptic = 0u64;
    for &disc in &discs {
        for form in reduced_primitive_forms(disc) {
            elliptic += count_for_form(&line, &lifts, form, disc, qi, &fixed_by);
        }
    }

    // cusps: T-orbits on P^1(Z/N); fixed iff some [[alpha, beta], [0, delta]]
    // of determinant q conjugates into the coset
    let t_perm = line.permutation([[1, 0], [1, 1]]);
    let mut cusps = 0u64;
    for orbit in orbits(line.len(), &[t_perm]) {
        let g = lifts[orbit[0]];
        let fixed = gonality::arith::divisors(q).into_iter().any(|alpha| {
            let delta = (q / alpha) as i64;
            (0..ni * qi).any(|beta| fixed_by(&g, &[[alpha as i64, beta], [0, delta]]))
        });
        if fixed {
            cusps += 1;
        }
    }
    elliptic + cusps
}

fn count_for_form(
    line: &ProjectiveLine,
    lifts: &[Mat],
    (a, b, c): (i64, i64, i64),
    disc: i64,
    q: i64,
    fixed_by: &dyn Fn(&Mat, &Mat) -> bool,
) -> u64 {
    let mut mats = Vec::new();
    let mut u = 1i64;
    while -disc * u * u <= 4 * q {
        let rest = 4 * q + disc * u * u;
        let t = (rest as f64).sqrt().round() as i64;
        if t * t == rest {
            for t in [t, -t] {
                mats.push([[(t - b * u) / 2, -c * u], [a * u, (t + b * u) / 2]]);
            }
        }
        u += 1;
    }
    let fixed: Vec<bool> = lifts.iter().map(|g| mats.iter().any(|m| fixed_by(g, m))).collect();
    // identify x with x s for s in the stabiliser of the root in SL_2(Z)
    let stab: Vec<Vec<usize>> = match disc {
        -4 if (a, b, c) == (1, 0, 1) => vec![line.permutation([[0, 1], [-1, 0]])],
        -3 if (a, b, c) == (1, 1, 1) => vec![line.permutation([[0, 1], [-1, 1]])],
        _ => vec![],
    };
    orbits(line.len(), &stab).into_iter().filter(|o| fixed[o[0]]).count() as u64
}

pub fn single_quotient_genus_oracle(n: u64, q: u64) -> u64 {
    let num = 2 * coset_genus(n) as i64 + 2 - fixed_points_oracle(n, q) as i64;
    assert!(num >= 0 && num % 4 == 0, "oracle Riemann-Hurwitz failed for ({n}, {q})");
    (num / 4) as u64
}

pub fn pair_quotient_genus_oracle(n: u64, d: u64, d2: u64) -> u64 {
    let g3 = (d / gcd(d, d2)) * (d2 / gcd(d, d2));
    let nu: i64 = [d, d2, g3].iter().map(|&q| fixed_points_oracle(n, q) as i64).sum();
    let num = 2 * coset_genus(n) as i64 + 6 - nu;
    assert!(
        num >= 0 && num % 8 == 0,
        "oracle Riemann-Hurwitz failed for ({n}, {d}, {d2})"
    );
    (num / 8) as u64
}

/// Class number of a negative discriminant from Dirichlet's formula at the
/// fundamental discriminant and the conductor formula, with no reduction.
pub fn analytic_class_number(disc: i64) -> u64 {
    let (fund, f) = fundamental_part(disc);
    let abs = -fund;
    let sum: i64 = (1..abs).map(|n| kronecker(fund, n) as i64 * n).sum();
    let w = match fund {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let h0 = -w * sum / (2 * abs);
    // h(D f^2) = h(D) f prod_{p | f} (1 - (D/p)/p) / [O_K^* : O^*]
    let mut num = h0 * f;
    let mut den = 1i64;
    for p in (2..=f).filter(|&p| f % p == 0 && (2..p).all(|q| p % q != 0)) {
        num *= p - kronecker(fund, p) as i64;
        den *= p;
    }
    if f > 1 {
        den *= w / 2;
    }
    assert_eq!(num % den, 0, "conductor formula not integral at {disc}");
    (num / den) as u64
}

fn fundamental_part(disc: i64) -> (i64, i64) {
    let mut f = 1;
    let mut d = disc;
    let mut p = 2;
    while p * p <= -d {
        while d % (p * p) == 0 && matches!((d / (p * p)).rem_euclid(4), 0 | 1) {
            d /= p * p;
            f *= p;
        }
        p += 1;
    }
    (d, f)
}

/// Kronecker symbol `(d / n)` by quadratic reciprocity-free brute force:
/// multiplicative in `n`, with `(d/p)` from Euler's criterion for odd `p`.
fn kronecker(d: i64, n: i64) -> i32 {
    let mut n = n;
    let mut out = 1;
    let mut p = 2;
    while n > 1 {
        while n % p == 0 {
            out *= if p == 2 {
                match d.rem_euclid(8) {
                    0 | 2 | 4 | 6 => 0,
                    1 | 7 => 1,
                    _ => -1,
                }
            } else {
                let r = d.rem_euclid(p);
                if r == 0 {
                    0
                } else if (1..p).any(|x| x * x % p == r) {
                    1
                } else {
                    -1
                }
            };
            n /= p;
        }
        p += 1;
    }
    out
}

/// Class number by listing reduced primitive forms.
pub fn form_class_number(disc: i64) -> u64 {
    reduced_primitive_forms(disc).len() as u64
}

/// Points of `y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6` over `F_p`, with infinity.
pub fn weierstrass_count(a: [i64; 5], p: u64) -> u64 {
    let p = p as i64;
    let [a1, a2, a3, a4, a6] = a;
    let mut count = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(p) == 0 {
                count += 1;
            }
        }
    }
    count
}
