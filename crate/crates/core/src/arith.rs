//! Small integer helpers.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors in increasing order, with multiplicity.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    let mut f = factorize(n);
    f.dedup();
    f
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let f = factorize(n);
    f.windows(2).all(|w| w[0] != w[1])
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    result
}

/// Multiplicative order of `a` modulo `n`, or `None` when `gcd(a, n) != 1`.
pub fn mult_order(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(1);
    }
    if gcd(a % n, n) != 1 {
        return None;
    }
    let mut x = a % n;
    let mut k = 1;
    while x != 1 {
        x = x * a % n;
        k += 1;
    }
    Some(k)
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert!(is_prime(31) && !is_prime(1) && !is_prime(91));
        assert_eq!(factorize(60), vec![2, 2, 3, 5]);
        assert!(is_squarefree(30) && !is_squarefree(12) && is_squarefree(1));
        assert_eq!(mult_order(2, 7), Some(3));
        assert_eq!(mult_order(3, 7), Some(6));
        assert_eq!(mult_order(7, 21), None);
        assert_eq!(pow_mod(3, 5, 7), 5);
    }
}
