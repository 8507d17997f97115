//! Classical Hadamard constructions.
//!
//! These stand in for catalog files when the remote library is not
//! reachable, and give known matrices of many orders for tests.

use crate::gf2::SignMatrix;

/// Sylvester matrix of order `2^k`: entry `(i, j)` is `(-1)^popcount(i & j)`.
pub fn sylvester(k: u32) -> SignMatrix {
    let n = 1usize << k;
    let entries = (0..n * n)
        .map(|p| if ((p / n) & (p % n)).count_ones().is_multiple_of(2) { 1 } else { -1 })
        .collect();
    SignMatrix::new(n, entries).expect("well-formed")
}

/// Kronecker product `a ⊗ b`.
pub fn kronecker(a: &SignMatrix, b: &SignMatrix) -> SignMatrix {
    let (m, n) = (a.order(), b.order());
    let order = m * n;
    let entries = (0..order * order)
        .map(|p| {
            let (i, j) = (p / order, p % order);
            a.get(i / n, j / n) * b.get(i % n, j % n)
        })
        .collect();
    SignMatrix::new(order, entries).expect("well-formed")
}

/// Paley construction I, order `q + 1`, for a prime power `q ≡ 3 (mod 4)`.
pub fn paley_i(q: usize) -> Option<SignMatrix> {
    let field = Field::new(q)?;
    if q % 4 != 3 {
        return None;
    }
    let n = q + 1;
    let mut entries = vec![0i8; n * n];
    for i in 0..n {
        for j in 0..n {
            // Skew core [[0, 1^T], [-1, Q]] plus the identity.
            let s = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => field.chi(field.sub(i - 1, j - 1)),
            };
            entries[i * n + j] = if i == j { 1 } else { s };
        }
    }
    SignMatrix::new(n, entries).ok()
}

/// Paley construction II, order `2(q + 1)`, for a prime power `q ≡ 1 (mod 4)`.
pub fn paley_ii(q: usize) -> Option<SignMatrix> {
    let field = Field::new(q)?;
    if q % 4 != 1 {
        return None;
    }
    let c = q + 1;
    let conference = |i: usize, j: usize| -> i8 {
        match (i, j) {
            (0, 0) => 0,
            (0, _) | (_, 0) => 1,
            _ => field.chi(field.sub(i - 1, j - 1)),
        }
    };
    let n = 2 * c;
    let mut entries = vec![0i8; n * n];
    for i in 0..n {
        for j in 0..n {
            let (bi, bj, si, sj) = (i / 2, j / 2, i % 2, j % 2);
            entries[i * n + j] = match conference(bi, bj) {
                0 => [[1, -1], [-1, -1]][si][sj],
                x => x * [[1, 1], [1, -1]][si][sj],
            };
        }
    }
    SignMatrix::new(n, entries).ok()
}

/// Williamson matrix of order `4n`, using the first quadruple of symmetric
/// circulant blocks found by exhaustive search (practical for `n <= 9`).
pub fn williamson(n: usize) -> Option<SignMatrix> {
    let rows = symmetric_circulant_rows(n);
    let autocorr: Vec<Vec<i32>> = rows.iter().map(|r| periodic_autocorrelation(r)).collect();
    let r = rows.len();
    for a in 0..r {
        for b in a..r {
            for c in b..r {
                for d in c..r {
                    let ok = (1..n).all(|s| {
                        autocorr[a][s] + autocorr[b][s] + autocorr[c][s] + autocorr[d][s] == 0
                    });
                    if ok {
                        return Some(williamson_array(&rows[a], &rows[b], &rows[c], &rows[d]));
                    }
                }
            }
        }
    }
    None
}

fn symmetric_circulant_rows(n: usize) -> Vec<Vec<i8>> {
    let free = n / 2 + 1;
    (0u32..1 << free)
        .map(|bits| {
            (0..n)
                .map(|i| {
                    let k = i.min(n - i);
                    if (bits >> k) & 1 == 1 { -1 } else { 1 }
                })
                .collect()
        })
        .collect()
}

fn periodic_autocorrelation(row: &[i8]) -> Vec<i32> {
    let n = row.len();
    (0..n)
        .map(|s| (0..n).map(|i| i32::from(row[i] * row[(i + s) % n])).sum())
        .collect()
}

fn williamson_array(a: &[i8], b: &[i8], c: &[i8], d: &[i8]) -> SignMatrix {
    let n = a.len();
    let circ = |row: &[i8], i: usize, j: usize| row[(j + n - i) % n];
    // Block layout: entry (sign, block) for each of the 4x4 positions.
    let layout: [[(i8, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(-1, 1), (1, 0), (-1, 3), (1, 2)],
        [(-1, 2), (1, 3), (1, 0), (-1, 1)],
        [(-1, 3), (-1, 2), (1, 1), (1, 0)],
    ];
    let blocks = [a, b, c, d];
    let order = 4 * n;
    let entries = (0..order * order)
        .map(|p| {
            let (i, j) = (p / order, p % order);
            let (sign, which) = layout[i / n][j / n];
            sign * circ(blocks[which], i % n, j % n)
        })
        .collect();
    SignMatrix::new(order, entries).expect("well-formed")
}

/// Goethals-Seidel array on the circulant blocks with first rows `a`, `b`,
/// `c`, `d`. Hadamard exactly when the periodic autocorrelations of the four
/// rows cancel at every nonzero shift; returns `None` otherwise.
pub fn goethals_seidel(a: &[i8], b: &[i8], c: &[i8], d: &[i8]) -> Option<SignMatrix> {
    let n = a.len();
    if [b, c, d].iter().any(|r| r.len() != n) || n == 0 {
        return None;
    }
    // (sign, block, transposed, reversed columns) for each 4x4 position.
    let layout: [[(i8, usize, bool, bool); 4]; 4] = [
        [(1, 0, false, false), (1, 1, false, true), (1, 2, false, true), (1, 3, false, true)],
        [(-1, 1, false, true), (1, 0, false, false), (1, 3, true, true), (-1, 2, true, true)],
        [(-1, 2, false, true), (-1, 3, true, true), (1, 0, false, false), (1, 1, true, true)],
        [(-1, 3, false, true), (1, 2, true, true), (-1, 1, true, true), (1, 0, false, false)],
    ];
    let blocks = [a, b, c, d];
    let order = 4 * n;
    let entries = (0..order * order)
        .map(|p| {
            let (i, j) = (p / order, p % order);
            let (sign, which, transposed, reversed) = layout[i / n][j / n];
            let (r, mut col) = (i % n, j % n);
            if reversed {
                col = n - 1 - col;
            }
            let (r, col) = if transposed { (col, r) } else { (r, col) };
            sign * blocks[which][(col + n - r) % n]
        })
        .collect();
    let h = SignMatrix::new(order, entries).expect("well-formed");
    h.is_hadamard().then_some(h)
}

/// Quadruples of `±1` rows of length `n` whose periodic autocorrelations
/// cancel, with `a` minimal among its shifts, negations and reversals and
/// `b <= c <= d`. At most `limit` are returned, in a fixed order.
pub fn cancelling_quadruples(n: usize, limit: usize) -> Vec<[Vec<i8>; 4]> {
    let row = |bits: u32| -> Vec<i8> { (0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect() };
    let all: Vec<u32> = (0..1u32 << n).collect();
    let paf: Vec<Vec<i32>> = all.iter().map(|&x| periodic_autocorrelation(&row(x))[1..].to_vec()).collect();
    let canonical = |x: u32| -> u32 {
        let mask = (1u32 << n) - 1;
        let rot = |v: u32, k: usize| ((v >> k) | (v << (n - k))) & mask;
        let rev = |v: u32| (0..n).fold(0, |acc, i| acc | ((v >> i & 1) << (n - 1 - i)));
        let mut best = x;
        for base in [x, !x & mask, rev(x), !rev(x) & mask] {
            for k in 0..n {
                best = best.min(rot(base, k));
            }
        }
        best
    };
    // Meet in the middle on (c, d).
    let mut by_sum: std::collections::HashMap<Vec<i32>, Vec<(u32, u32)>> = std::collections::HashMap::new();
    for &c in &all {
        for &d in all.iter().filter(|&&d| d >= c) {
            let key: Vec<i32> = paf[c as usize].iter().zip(&paf[d as usize]).map(|(x, y)| x + y).collect();
            by_sum.entry(key).or_default().push((c, d));
        }
    }
    let mut out = Vec::new();
    for &a in all.iter().filter(|&&a| canonical(a) == a) {
        for &b in &all {
            let need: Vec<i32> = paf[a as usize].iter().zip(&paf[b as usize]).map(|(x, y)| -(x + y)).collect();
            for &(c, d) in by_sum.get(&need).into_iter().flatten() {
                if b <= c {
                    out.push([row(a), row(b), row(c), row(d)]);
                    if out.len() == limit {
                        return out;
                    }
                }
            }
        }
    }
    out
}

/// GF(p^e) with elements encoded as base-p digit vectors, built by brute
/// force. Only meant for the small fields the constructions need.
struct Field {
    q: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
    is_square: Vec<bool>,
}

impl Field {
    fn new(q: usize) -> Option<Field> {
        let (p, e) = prime_power(q)?;
        let mul = multiplication_table(p, e)?;
        let digits = |x: usize| -> Vec<usize> { (0..e).map(|k| (x / p.pow(k as u32)) % p).collect() };
        let from_digits = |d: &[usize]| -> usize { d.iter().rev().fold(0, |acc, &x| acc * p + x) };
        let mut add = vec![0; q * q];
        for x in 0..q {
            for y in 0..q {
                let (dx, dy) = (digits(x), digits(y));
                let s: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * q + y] = from_digits(&s);
            }
        }
        let neg = (0..q).map(|x| (0..q).find(|&y| add[x * q + y] == 0).unwrap()).collect();
        let mut is_square = vec![false; q];
        for x in 1..q {
            is_square[mul[x * q + x]] = true;
        }
        Some(Field { q, add, neg, is_square })
    }

    fn sub(&self, x: usize, y: usize) -> usize {
        self.add[x * self.q + self.neg[y]]
    }

    fn chi(&self, x: usize) -> i8 {
        match x {
            0 => 0,
            _ if self.is_square[x] => 1,
            _ => -1,
        }
    }
}

fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Multiplication table of F_p[x]/(f) for the first monic degree-`e`
/// polynomial `f` that yields a field (no zero divisors).
fn multiplication_table(p: usize, e: usize) -> Option<Vec<usize>> {
    let q = p.pow(e as u32);
    let digits = |x: usize| -> Vec<usize> { (0..e).map(|k| (x / p.pow(k as u32)) % p).collect() };
    'poly: for low in 0..q {
        // f = x^e + sum low_k x^k
        let f = digits(low);
        let mut table = vec![0; q * q];
        for x in 0..q {
            for y in 0..q {
                let (a, b) = (digits(x), digits(y));
                let mut prod = vec![0; 2 * e];
                for i in 0..e {
                    for j in 0..e {
                        prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
                    }
                }
                for deg in (e..2 * e).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        prod[deg] = 0;
                        for k in 0..e {
                            prod[deg - e + k] = (prod[deg - e + k] + p * p - c * f[k] % p) % p;
                        }
                    }
                }
                let value = prod[..e].iter().rev().fold(0, |acc, &d| acc * p + d);
                if x != 0 && y != 0 && value == 0 {
                    continue 'poly;
                }
                table[x * q + y] = value;
            }
        }
        return Some(table);
    }
    None
}
