//! Graph families: complete, Hamming, random regular (configuration model),
//! Ramanujan Cayley graphs of PSL/PGL(2, q), and small named test graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FamilyTag, Graph};
use crate::{Error, Result};

/// Guard against silently materializing gigantic edge lists.
pub(crate) const MAX_MATERIALIZED_EDGES: usize = 100_000_000;

/// Complete graph on `n` vertices.
pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("complete graph needs n >= 2, got {n}")));
    }
    let m = n * (n - 1) / 2;
    if m > MAX_MATERIALIZED_EDGES {
        return Err(Error::CapacityExceeded(format!(
            "complete graph on {n} vertices has {m} edges; use the implicit percolation sampler instead"
        )));
    }
    let mut edges = Vec::with_capacity(m);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, edges, FamilyTag::Complete)
}

/// Hamming graph H(k, m): vertices are k-tuples over an m-letter alphabet
/// (encoded base-m), adjacent when they differ in exactly one coordinate.
/// n = m^k and the common degree is k(m-1).
pub fn hamming_graph(k: usize, m: usize) -> Result<Graph> {
    if k < 1 || m < 2 {
        return Err(Error::InvalidParameter(format!("hamming graph needs k >= 1, m >= 2, got ({k}, {m})")));
    }
    let mut n: usize = 1;
    for _ in 0..k {
        n = n
            .checked_mul(m)
            .ok_or_else(|| Error::CapacityExceeded(format!("m^k overflows for (k, m) = ({k}, {m})")))?;
    }
    let edge_count = n * k * (m - 1) / 2;
    if edge_count > MAX_MATERIALIZED_EDGES {
        return Err(Error::CapacityExceeded(format!("H({k}, {m}) has {edge_count} edges")));
    }
    let mut edges = Vec::with_capacity(edge_count);
    for v in 0..n {
        let mut stride = 1usize;
        for _ in 0..k {
            let digit = (v / stride) % m;
            for c in (digit + 1)..m {
                let w = v + (c - digit) * stride;
                edges.push((v as u32, w as u32));
            }
            stride *= m;
        }
    }
    Graph::from_edges(n, edges, FamilyTag::Hamming)
}

/// Uniform-ish random d-regular graph via the configuration model with
/// legal-pair matching: repeatedly pair two random unmatched half-edge stubs,
/// skipping pairs that would form a loop or repeat an edge, and restart the
/// attempt only when no legal pair is left among the unmatched stubs.
///
/// Deterministic given `seed`. Restarts are rare for d well below n (unlike
/// whole-graph rejection, whose acceptance rate exp(-(d^2-1)/4) dies fast in
/// d); the sampled law is asymptotically uniform for small d.
pub fn random_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    random_regular_graph_with_attempts(n, d, seed, 1000)
}

pub fn random_regular_graph_with_attempts(
    n: usize,
    d: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    if d < 1 || d >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= d < n, got d = {d}, n = {n}")));
    }
    if n * d % 2 != 0 {
        return Err(Error::InvalidParameter(format!("n * d = {} is odd; no {d}-regular graph on {n} vertices", n * d)));
    }
    if n * d / 2 > MAX_MATERIALIZED_EDGES {
        return Err(Error::CapacityExceeded(format!("{}-regular graph on {n} vertices is too large", d)));
    }

    let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
    for v in 0..n as u32 {
        stubs.extend(std::iter::repeat(v).take(d));
    }

    'attempt: for attempt in 0..max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::harness::derive_seed(seed, &[attempt as u64]));
        let mut pool = stubs.clone();
        pool.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        let mut stall = 0usize;
        while pool.len() >= 2 {
            let i = rng.random_range(0..pool.len());
            let mut j = rng.random_range(0..pool.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (pool[i], pool[j]);
            if a != b && seen.insert((a.min(b), a.max(b))) {
                edges.push((a, b));
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                pool.swap_remove(hi);
                pool.swap_remove(lo);
                stall = 0;
            } else {
                stall += 1;
                if stall > 32 + 8 * pool.len() {
                    if has_legal_pair(&pool, &seen) {
                        stall = 0;
                    } else {
                        continue 'attempt;
                    }
                }
            }
        }
        return Graph::from_edges(n, edges, FamilyTag::RandomRegular);
    }
    Err(Error::SamplingFailure(format!(
        "configuration model got stuck {max_attempts} times for (n, d) = ({n}, {d})"
    )))
}

fn has_legal_pair(pool: &[u32], seen: &std::collections::HashSet<(u32, u32)>) -> bool {
    pool.iter().enumerate().any(|(i, &a)| {
        pool[i + 1..].iter().any(|&b| a != b && !seen.contains(&(a.min(b), a.max(b))))
    })
}

/// Ramanujan Cayley graph of PSL(2, q) or PGL(2, q) for primes p, q = 1 (mod 4)
/// with q > 2 sqrt(p). Generators are the p + 1 integer quaternions of norm p
/// (a odd positive, b, c, d even) sent to 2x2 matrices over F_q via a square
/// root of -1. When p is a quadratic residue mod q the generators land in
/// PSL(2, q) and n = q(q^2 - 1)/2; otherwise the graph lives on all of
/// PGL(2, q), n = q(q^2 - 1), and is bipartite.
pub fn lps_ramanujan_graph(p: u64, q: u64) -> Result<Graph> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidParameter(format!("p = {p} and q = {q} must both be prime")));
    }
    if p % 4 != 1 || q % 4 != 1 {
        return Err(Error::InvalidParameter(format!("p = {p} and q = {q} must both be 1 mod 4")));
    }
    if p == q {
        return Err(Error::InvalidParameter("p and q must be distinct".into()));
    }
    if (q as f64) <= 2.0 * (p as f64).sqrt() {
        return Err(Error::InvalidParameter(format!("need q > 2 sqrt(p), got q = {q}, p = {p}")));
    }
    if q >= 1 << 15 {
        return Err(Error::CapacityExceeded(format!("q = {q} too large to materialize PGL(2, q)")));
    }

    let i = sqrt_minus_one_mod(q)
        .ok_or_else(|| Error::InvalidStructure(format!("no square root of -1 mod {q}")))?;

    let sols = norm_p_quaternions(p);
    if sols.len() != (p + 1) as usize {
        return Err(Error::InvalidStructure(format!(
            "expected {} norm-{p} quaternion generators, found {}",
            p + 1,
            sols.len()
        )));
    }
    let gens: Vec<[u64; 4]> = sols
        .iter()
        .map(|&(a, b, c, d)| {
            let a = a.rem_euclid(q as i64) as u64;
            let b = b.rem_euclid(q as i64) as u64;
            let c = c.rem_euclid(q as i64) as u64;
            let d = d.rem_euclid(q as i64) as u64;
            // [a + bi, c + di; -c + di, a - bi] over F_q
            canon(
                [
                    (a + mulmod(b, i, q)) % q,
                    (c + mulmod(d, i, q)) % q,
                    (q - c + mulmod(d, i, q)) % q,
                    (a + q - mulmod(b, i, q) % q) % q,
                ],
                q,
            )
        })
        .collect();
    {
        let mut dedup = gens.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != gens.len() {
            return Err(Error::InvalidStructure("projective generators collide; q too small".into()));
        }
    }

    let expected_n = if legendre_is_residue(p % q, q) {
        (q * (q * q - 1) / 2) as usize
    } else {
        (q * (q * q - 1)) as usize
    };

    // BFS over the subgroup generated by `gens`, assigning dense vertex ids.
    let encode = |m: [u64; 4]| ((m[0] * q + m[1]) * q + m[2]) * q + m[3];
    let mut ids: std::collections::HashMap<u64, u32> = std::collections::HashMap::with_capacity(expected_n * 2);
    let mut elems: Vec<[u64; 4]> = Vec::with_capacity(expected_n);
    let identity = canon([1, 0, 0, 1], q);
    ids.insert(encode(identity), 0);
    elems.push(identity);
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(expected_n * (p as usize + 1) / 2);
    let mut head = 0usize;
    while head < elems.len() {
        let cur = elems[head];
        let cur_id = head as u32;
        for gen in &gens {
            let nb = canon(matmul(*gen, cur, q), q);
            let key = encode(nb);
            let nb_id = *ids.entry(key).or_insert_with(|| {
                elems.push(nb);
                (elems.len() - 1) as u32
            });
            if cur_id < nb_id {
                edges.push((cur_id, nb_id));
            }
        }
        head += 1;
        if elems.len() > expected_n {
            return Err(Error::InvalidStructure(format!(
                "group closure exceeded expected order {expected_n}"
            )));
        }
    }
    if elems.len() != expected_n {
        return Err(Error::InvalidStructure(format!(
            "group closure reached {} elements, expected {expected_n}",
            elems.len()
        )));
    }
    let g = Graph::from_edges(expected_n, edges, FamilyTag::Lps)?;
    if g.regular_degree() != Some((p + 1) as usize) {
        return Err(Error::InvalidStructure(format!("Cayley graph is not {}-regular", p + 1)));
    }
    Ok(g)
}

/// The Petersen graph: outer 5-cycle, inner pentagram, spokes.
pub fn petersen_graph() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
        edges.push((i, 5 + i));
    }
    Graph::from_edges(10, edges, FamilyTag::Custom).expect("petersen edges are fixed")
}

/// Cycle on n >= 3 vertices.
pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
    }
    let edges = (0..n as u32).map(|i| (i, (i + 1) % n as u32));
    Graph::from_edges(n, edges, FamilyTag::Custom)
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    let mut f = 3;
    while f * f <= x {
        if x % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, q);
        }
        base = mulmod(base, base, q);
        exp >>= 1;
    }
    acc
}

fn legendre_is_residue(a: u64, q: u64) -> bool {
    powmod(a % q, (q - 1) / 2, q) == 1
}

fn sqrt_minus_one_mod(q: u64) -> Option<u64> {
    (2..q).find(|&x| mulmod(x, x, q) == q - 1)
}

/// Integer quaternions (a, b, c, d) with a^2+b^2+c^2+d^2 = p, a odd positive,
/// b, c, d even (any sign). For p = 1 (mod 4) there are exactly p + 1 of them.
fn norm_p_quaternions(p: u64) -> Vec<(i64, i64, i64, i64)> {
    let mut out = Vec::new();
    let bound = (p as f64).sqrt() as i64 + 1;
    let mut a = 1i64;
    while a * a <= p as i64 {
        let evens = |limit: i64| (-limit..=limit).filter(|x| x % 2 == 0).collect::<Vec<_>>();
        for b in evens(bound) {
            for c in evens(bound) {
                for d in evens(bound) {
                    if a * a + b * b + c * c + d * d == p as i64 {
                        out.push((a, b, c, d));
                    }
                }
            }
        }
        a += 2;
    }
    out
}

fn matmul(x: [u64; 4], y: [u64; 4], q: u64) -> [u64; 4] {
    [
        (mulmod(x[0], y[0], q) + mulmod(x[1], y[2], q)) % q,
        (mulmod(x[0], y[1], q) + mulmod(x[1], y[3], q)) % q,
        (mulmod(x[2], y[0], q) + mulmod(x[3], y[2], q)) % q,
        (mulmod(x[2], y[1], q) + mulmod(x[3], y[3], q)) % q,
    ]
}

/// Projective canonical form: scale so the first nonzero entry equals 1.
fn canon(m: [u64; 4], q: u64) -> [u64; 4] {
    let lead = m.iter().copied().find(|&x| x != 0).expect("zero matrix cannot arise in GL(2, q)");
    let inv = powmod(lead, q - 2, q);
    [mulmod(m[0], inv, q), mulmod(m[1], inv, q), mulmod(m[2], inv, q), mulmod(m[3], inv, q)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_shape() {
        let g = complete_graph(4).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.regular_degree(), Some(3));
        assert!(complete_graph(1).is_err());
    }

    #[test]
    fn hamming_shape_and_degree() {
        let g = hamming_graph(2, 3).unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(g.regular_degree(), Some(4));
        assert_eq!(g.edge_count(), 18);
        // 2|E| = 36 directed edges for H(2, 3)
        let h33 = hamming_graph(3, 3).unwrap();
        assert_eq!(h33.n(), 27);
        assert_eq!(h33.regular_degree(), Some(6));
        // H(1, m) is the complete graph K_m
        let h1 = hamming_graph(1, 5).unwrap();
        assert_eq!(h1.edge_count(), 10);
        assert_eq!(h1.regular_degree(), Some(4));
        assert!(hamming_graph(0, 3).is_err());
        assert!(hamming_graph(2, 1).is_err());
    }

    #[test]
    fn hamming_neighbors_differ_in_one_coordinate() {
        let g = hamming_graph(3, 4).unwrap();
        let digits = |v: u32| [(v % 4), (v / 4 % 4), (v / 16 % 4)];
        for v in 0..g.n() as u32 {
            for &w in g.neighbors(v) {
                let (dv, dw) = (digits(v), digits(w));
                let diff = (0..3).filter(|&i| dv[i] != dw[i]).count();
                assert_eq!(diff, 1, "{v} ~ {w}");
            }
        }
    }

    #[test]
    fn random_regular_is_regular_and_deterministic() {
        let g1 = random_regular_graph(20, 3, 7).unwrap();
        let g2 = random_regular_graph(20, 3, 7).unwrap();
        assert_eq!(g1.regular_degree(), Some(3));
        assert_eq!(g1.edges(), g2.edges());
        let g3 = random_regular_graph(20, 3, 8).unwrap();
        assert!(g1.edges() != g3.edges() || g1.n() == 0, "different seeds should differ");
        assert!(matches!(random_regular_graph(7, 3, 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(random_regular_graph(4, 5, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn random_regular_survives_degrees_that_defeat_whole_graph_rejection() {
        // Whole-pairing rejection accepts with rate ~exp(-(d^2-1)/4), hopeless
        // already at d = 6; legal-pair matching must not care.
        for seed in 0..20 {
            assert_eq!(random_regular_graph(30, 6, seed).unwrap().regular_degree(), Some(6));
        }
        for seed in 0..20 {
            assert_eq!(random_regular_graph(8, 5, seed).unwrap().regular_degree(), Some(5));
        }
    }

    #[test]
    fn petersen_is_3_regular_on_10_vertices() {
        let g = petersen_graph();
        assert_eq!(g.n(), 10);
        assert_eq!(g.edge_count(), 15);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn lps_5_13_has_pgl_order_and_degree_6() {
        let g = lps_ramanujan_graph(5, 13).unwrap();
        assert_eq!(g.n(), 2184); // 5 is a non-residue mod 13, so PGL(2, 13)
        assert_eq!(g.regular_degree(), Some(6));
    }

    #[test]
    fn lps_rejects_bad_parameters() {
        assert!(lps_ramanujan_graph(6, 13).is_err());
        assert!(lps_ramanujan_graph(5, 11).is_err()); // 11 = 3 mod 4
        assert!(lps_ramanujan_graph(13, 5).is_err()); // q too small
        assert!(lps_ramanujan_graph(5, 5).is_err());
    }

    #[test]
    fn quaternion_solution_count_is_p_plus_one() {
        for p in [5u64, 13, 17, 29] {
            assert_eq!(norm_p_quaternions(p).len() as u64, p + 1, "p = {p}");
        }
    }
}
