//! Pedersen binding in a toy group small enough to enumerate: the order-q
//! subgroup of Z_p^* with p = 2q + 1 = 65267.

const P: u64 = 65_267;
const Q: u64 = 32_633;
const G: u64 = 4;
const H: u64 = 9;

fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= P;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        exp >>= 1;
    }
    acc
}

fn commit(m: u64, r: u64) -> u64 {
    pow(G, m) * pow(H, r) % P
}

fn log_table(base: u64) -> Vec<u64> {
    let mut table = vec![u64::MAX; P as usize];
    let mut v = 1;
    for e in 0..Q {
        table[v as usize] = e;
        v = v * base % P;
    }
    table
}

#[test]
fn toy_parameters_are_sound() {
    assert_eq!(P, 2 * Q + 1);
    assert!((2..Q)
        .take_while(|d| d * d <= Q)
        .all(|d| !Q.is_multiple_of(d)));
    assert_eq!(pow(G, Q), 1);
    assert_eq!(pow(H, Q), 1);
    assert_ne!(G, 1);
    assert_ne!(H, 1);
}

#[test]
fn every_other_opening_lies_on_the_discrete_log_line() {
    let log_g = log_table(G);
    let alpha = log_g[H as usize];
    assert_ne!(alpha, u64::MAX);
    let log_h = log_table(H);

    for (m, r) in [(17, 4_242), (0, 1), (Q - 1, Q - 1), (12_345, 0)] {
        let c = commit(m, r);
        let mut openings = 0;
        for m2 in 0..Q {
            let target = c * pow(G, Q - m2) % P;
            let r2 = log_h[target as usize];
            assert_ne!(r2, u64::MAX, "h generates the subgroup");
            assert_eq!(commit(m2, r2), c);
            assert_eq!((m2 + alpha * r2) % Q, (m + alpha * r) % Q);
            if m2 != m {
                let recovered = (m2 + Q - m) * pow_q(r + Q - r2, Q - 2) % Q;
                assert_eq!(recovered, alpha, "a second opening yields log_g(h)");
            }
            openings += 1;
        }
        assert_eq!(openings, Q);
    }
}

fn pow_q(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    base %= Q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % Q;
        }
        base = base * base % Q;
        exp >>= 1;
    }
    acc
}
