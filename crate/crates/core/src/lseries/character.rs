//! Dirichlet characters mod q, constructed through the factorization of q:
//! primitive roots for odd prime powers, the `{±1}×⟨5⟩` decomposition for
//! powers of two. Values are complex roots of unity accurate to ~1e−15.

use crate::error::{Error, Result};
use num_complex::Complex64;

const CHARACTER_MODULUS_CAP: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// χ(n mod q); zero where gcd(n, q) > 1.
    values: Vec<Complex64>,
    pub primitive: bool,
    /// χ(−1) = +1.
    pub even: bool,
    /// Component exponents in the canonical cyclic decomposition (a label).
    pub exponents: Vec<u64>,
}

impl DirichletCharacter {
    #[inline]
    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % m as u128) as u64;
        }
        a = (a as u128 * a as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn factorize_simple(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn primitive_root_mod_p(p: u64) -> u64 {
    let phi = p - 1;
    let fac = factorize_simple(phi);
    'g: for g in 2..p {
        for &(q, _) in &fac {
            if powmod(g, phi / q, p) == 1 {
                continue 'g;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

/// One cyclic component of (Z/q)^*: order, and discrete logs indexed mod pe.
struct CyclicComponent {
    pe: u64,
    order: u64,
    dlog: Vec<u64>, // dlog[x] valid when gcd(x, p) = 1
}

fn odd_prime_power_component(p: u64, e: u32) -> CyclicComponent {
    let pe = p.pow(e);
    let order = pe / p * (p - 1);
    let mut g = primitive_root_mod_p(p);
    if e > 1 && powmod(g, p - 1, p * p) == 1 {
        g += p;
    }
    let mut dlog = vec![0u64; pe as usize];
    let mut x = 1u64;
    for k in 0..order {
        dlog[x as usize] = k;
        x = (x as u128 * g as u128 % pe as u128) as u64;
    }
    CyclicComponent { pe, order, dlog }
}

/// All φ(q) characters mod q, in a deterministic component-exponent order.
pub fn character_table(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 || q > CHARACTER_MODULUS_CAP {
        return Err(Error::precondition(format!(
            "character_table: modulus must be in [1, {CHARACTER_MODULUS_CAP}]"
        )));
    }
    if q == 1 {
        return Ok(vec![DirichletCharacter {
            modulus: 1,
            values: vec![Complex64::new(1.0, 0.0)],
            primitive: true,
            even: true,
            exponents: vec![],
        }]);
    }

    // Cyclic components. For 2^e with e >= 3 the unit group is {±1}×⟨5⟩.
    let mut components: Vec<CyclicComponent> = Vec::new();
    for (p, e) in factorize_simple(q) {
        if p == 2 {
            match e {
                1 => {} // trivial group
                2 => {
                    // ⟨3⟩ of order 2 mod 4
                    components.push(CyclicComponent {
                        pe: 4,
                        order: 2,
                        dlog: vec![0, 0, 0, 1],
                    });
                }
                _ => {
                    let pe = 2u64.pow(e);
                    // sign component: x ≡ ±5^k; dlog over ⟨5⟩ of order 2^{e−2}
                    let half = pe / 4;
                    let mut dlog5 = vec![0u64; pe as usize];
                    let mut sign = vec![0u64; pe as usize];
                    let mut x = 1u64;
                    for k in 0..half {
                        dlog5[x as usize] = k;
                        sign[x as usize] = 0;
                        let neg = pe - x;
                        dlog5[neg as usize] = k;
                        sign[neg as usize] = 1;
                        x = (x * 5) % pe;
                    }
                    components.push(CyclicComponent { pe, order: 2, dlog: sign });
                    components.push(CyclicComponent { pe, order: half, dlog: dlog5 });
                }
            }
        } else {
            components.push(odd_prime_power_component(p, e));
        }
    }

    let phi: u64 = components.iter().map(|c| c.order).product::<u64>().max(1);
    let mut chars = Vec::with_capacity(phi as usize);
    let mut exps = vec![0u64; components.len()];
    loop {
        // Build the character with the current exponent tuple.
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        for n in 0..q {
            if gcd(n, q) != 1 {
                continue;
            }
            let mut angle = 0.0f64;
            for (c, &k) in components.iter().zip(&exps) {
                let d = c.dlog[(n % c.pe) as usize];
                let t = (k as u128 * d as u128 % c.order as u128) as f64;
                angle += t / c.order as f64;
            }
            let theta = 2.0 * std::f64::consts::PI * angle;
            values[n as usize] = Complex64::new(theta.cos(), theta.sin());
        }
        let even = (values[(q - 1) as usize].re - 1.0).abs() < 1e-9;
        chars.push(DirichletCharacter {
            modulus: q,
            values,
            primitive: false, // filled below
            even,
            exponents: exps.clone(),
        });
        // Next exponent tuple (odometer).
        let mut i = 0;
        loop {
            if i == components.len() {
                break;
            }
            exps[i] += 1;
            if exps[i] < components[i].order {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
        if i == components.len() {
            break;
        }
    }
    debug_assert_eq!(chars.len() as u64, phi);

    // Conductor: smallest d | q with χ(n) = 1 whenever n ≡ 1 (mod d), (n,q)=1;
    // primitive ⇔ conductor = q.
    let divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    for ch in &mut chars {
        let mut conductor = q;
        'd: for &d in &divisors {
            let mut n = 1 + d;
            while n <= q {
                if gcd(n, q) == 1 && (ch.values[(n % q) as usize] - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
                    continue 'd;
                }
                n += d;
            }
            conductor = d;
            break;
        }
        ch.primitive = conductor == q;
    }
    Ok(chars)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_one() {
        let t = character_table(1).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].primitive);
        assert_eq!(t[0].value(17), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn modulus_four() {
        let t = character_table(4).unwrap();
        assert_eq!(t.len(), 2);
        let nontrivial = t.iter().find(|c| !c.is_principal()).unwrap();
        assert!((nontrivial.value(3) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(!nontrivial.even);
        assert!(nontrivial.primitive);
        let principal = t.iter().find(|c| c.is_principal()).unwrap();
        assert!(!principal.primitive);
    }

    #[test]
    fn modulus_five_orthogonality() {
        let t = character_table(5).unwrap();
        assert_eq!(t.len(), 4);
        // Values are 4th roots of unity.
        for ch in &t {
            for n in 1..5u64 {
                let v = ch.value(n);
                assert!((v.norm() - 1.0).abs() < 1e-12);
                let v4 = v * v * v * v;
                assert!((v4 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
        // Orthogonality matrix = φ(q)·I.
        for (i, a) in t.iter().enumerate() {
            for (j, b) in t.iter().enumerate() {
                let s: Complex64 = (0..5u64).map(|n| a.value(n) * b.value(n).conj()).sum();
                let expect = if i == j { 4.0 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-12, "{i},{j}");
            }
        }
    }

    #[test]
    fn complete_multiplicativity() {
        for q in [3u64, 8, 9, 12, 15, 16, 24, 36, 45] {
            let t = character_table(q).unwrap();
            assert_eq!(t.len() as u64, euler_phi(q));
            for ch in &t {
                for m in 0..q {
                    for n in 0..q {
                        let lhs = ch.value(m * n);
                        let rhs = ch.value(m) * ch.value(n);
                        assert!((lhs - rhs).norm() < 1e-10, "q={q} m={m} n={n}");
                    }
                }
                // χ(n) = 0 iff gcd(n, q) > 1; χ(1) = 1.
                for n in 0..q {
                    let zero = ch.value(n).norm() < 1e-15;
                    assert_eq!(zero, gcd(n, q) != 1);
                }
                assert!((ch.value(1) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn primitive_counts() {
        // #primitive characters mod q = Σ_{d|q} μ(q/d)φ(d).
        for q in 1..=48u64 {
            let t = character_table(q).unwrap();
            let got = t.iter().filter(|c| c.primitive).count() as i64;
            let expect: i64 = (1..=q)
                .filter(|d| q % d == 0)
                .map(|d| moebius_simple(q / d) * euler_phi(d) as i64)
                .sum();
            assert_eq!(got, expect, "q={q}");
        }
    }

    fn euler_phi(q: u64) -> u64 {
        (1..=q).filter(|&n| gcd(n, q) == 1).count() as u64
    }

    fn moebius_simple(n: u64) -> i64 {
        let f = factorize_simple(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}
