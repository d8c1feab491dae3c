//! Reference values computed independently of the library routines they check.

/// Derangement numbers by `D_n = (n - 1)(D_{n-1} + D_{n-2})`, `D_0 = 1`, `D_1 = 0`.
pub fn derangements(n: usize) -> usize {
    let (mut prev, mut cur) = (1usize, 0usize);
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        (prev, cur) = (cur, (k - 1) * (prev + cur));
    }
    cur
}

/// `dim_{F_p} Z/m ⊗ F_p`.
pub fn cyclic_dim_mod_p(m: u64, p: u64) -> usize {
    usize::from(m % p == 0)
}
