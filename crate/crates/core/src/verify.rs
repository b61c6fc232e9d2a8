//! Invariant suites over enumerated trees, each returning [`Report`]s.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::address::{Side, TreeAddress, TreeKind};
use crate::cohn::{self, random_unimodular, trace_identity_check, Mat2};
use crate::criterion::uniqueness_empirical;
use crate::error::Result;
use crate::farey::{self, address_to_fraction, farey_children_with, fraction_to_address, Fraction, FareyTriple};
use crate::markov_tree::{self, is_gme_solution, is_gsme_solution, to_gsme, MarkovTriple};
use crate::numtheory::{primes_below, Budget};
use crate::report::Report;

fn entries_of(t: &MarkovTriple) -> [BigUint; 3] {
    [t.a().clone(), t.b().clone(), t.c().clone()]
}

/// GME exactness, coprimality, jumps and parents, GSME images, parity,
/// the mod 4 condition and vertex multiplicities on WMT(k).
pub fn trees_suite(k: u64, depth: usize) -> Vec<Report> {
    let mut gme = Report::new(format!("GME k={k}"));
    let mut coprime = Report::new(format!("coprime k={k}"));
    let mut jumps = Report::new(format!("parent of child k={k}"));
    let mut gsme = Report::new(format!("GSME image k={k}"));
    let mut residues = Report::new(format!("parity and mod 4 k={k}"));
    let mut unique = Report::new(format!("tree multiplicity k={k}"));
    let four = BigUint::from(4u32);

    let levels = markov_tree::enumerate_levels(k, depth, TreeKind::Wide);
    for t in levels.iter().flatten() {
        gme.check(is_gme_solution(k, t.a(), t.b(), t.c()), || format!("{t:?}"));
        coprime.check(t.is_pairwise_coprime(), || format!("{t:?}"));
        if !t.is_root() {
            gme.check(t.b() > t.a() && t.b() > t.c() || t.a() == t.c(), || {
                format!("middle entry is not the strict maximum in {t:?}")
            });
        }
        for e in t.entries() {
            if k.is_odd() {
                residues.check(e.is_odd(), || format!("even entry {e} for odd k"));
            }
            if k % 4 != 2 {
                residues.check(!(e % &four).is_zero(), || format!("entry {e} divisible by 4"));
            }
        }

        let g = to_gsme(t);
        let [x, y, z] = g.entries();
        gsme.check(is_gsme_solution(k, x, y, z) && g.is_induced(), || format!("image of {t:?}"));
        for side in [Side::L, Side::R] {
            let child = match side {
                Side::L => markov_tree::vieta_left(t),
                Side::R => markov_tree::vieta_right(t),
            };
            let child = match child {
                Ok(c) => c,
                Err(e) => {
                    jumps.fail(format!("{side} jump from {t:?}: {e}"));
                    continue;
                }
            };
            match markov_tree::parent(&child) {
                Ok((p, s)) => jumps.check(entries_of(&p) == entries_of(t) && s == side, || {
                    format!("parent of {side} child of {t:?} is {p:?} via {s}")
                }),
                Err(e) => jumps.fail(format!("parent of {child:?}: {e}")),
            }
            let gsme_child = match side {
                Side::L => markov_tree::gsme_vieta_left(&g),
                Side::R => markov_tree::gsme_vieta_right(&g),
            };
            gsme.check(gsme_child.as_ref().ok() == Some(&to_gsme(&child)), || {
                format!("{side} jump does not commute with the GSME map at {t:?}")
            });
        }
    }

    // Ordered triples are unique in MT, unordered ones in LMT (MT's two
    // halves are mirror images), and WMT holds each non-root triple twice.
    let mut ordered: HashMap<[BigUint; 3], Vec<TreeAddress>> = HashMap::new();
    for t in levels.iter().flatten().skip(1) {
        let addr = t.address().cloned().unwrap_or_default();
        ordered.entry(entries_of(t)).or_default().push(addr);
    }
    for (triple, addrs) in &ordered {
        let halves = [Side::L, Side::R].map(|s| addrs.iter().filter(|a| a.sides()[0] == s).count());
        unique.check(halves == [1, 1], || format!("{triple:?} at {addrs:?} in WMT"));
    }
    let left = vec![Side::L, Side::L];
    let mut unordered: HashMap<[BigUint; 3], TreeAddress> = HashMap::new();
    for t in levels.iter().flatten() {
        let addr = t.address().cloned().unwrap_or_default();
        if !addr.sides().starts_with(&left) {
            continue;
        }
        let prior = unordered.insert(t.unordered(), addr.clone());
        unique.check(prior.is_none(), || {
            format!("{:?} at {addr} and {} in LMT", t.unordered(), prior.clone().unwrap_or_default())
        });
    }

    vec![gme, coprime, jumps, gsme, residues, unique]
}

/// Squares of WMT(0) against WMT(2).
pub fn square_suite(depth: usize) -> Report {
    markov_tree::square_correspondence_check(depth)
}

/// Depth used for the GCT* comparison and the per-matrix lemmas.
pub const COHN_LEMMA_DEPTH: usize = 6;

/// Cohn conditions, index monotonicity, parents, and agreement of the
/// `(1,2)`-entries with WMT(k) on WGCT(k, l); GCT* and trace lemmas to
/// [`COHN_LEMMA_DEPTH`].
pub fn cohn_suite(k: u64, l: i64, depth: usize, samples: usize, seed: u64) -> Vec<Report> {
    let mut valid = Report::new(format!("Cohn triple k={k} l={l}"));
    let mut index = Report::new(format!("index order k={k} l={l}"));
    let mut iso = Report::new(format!("(1,2)-entries vs WMT k={k} l={l}"));
    let mut parents = Report::new(format!("Cohn parent of child k={k} l={l}"));

    let cohn = cohn::enumerate_cohn(k, l, depth, TreeKind::Wide);
    let markov: Vec<MarkovTriple> = markov_tree::enumerate_levels(k, depth, TreeKind::Wide)
        .into_iter()
        .flatten()
        .collect();
    iso.check(cohn.len() == markov.len(), || "vertex counts differ".into());
    for (c, m) in cohn.iter().zip(&markov) {
        valid.check(c.validate().is_ok(), || format!("{:?}: {:?}", c.address(), c.validate()));
        index.check(c.index_increasing(), || format!("{:?}", c.address()));
        iso.check(c.markov_entries() == entries_of(m), || format!("{:?}", c.address()));
        for side in [Side::L, Side::R] {
            let child = match side {
                Side::L => cohn::child_left(c),
                Side::R => cohn::child_right(c),
            };
            match child.and_then(|ch| cohn::parent(&ch)) {
                Ok((p, s)) => parents.check(p.matrices() == c.matrices() && s == side, || {
                    format!("{:?} {side}: parent via {s}", c.address())
                }),
                Err(e) => parents.fail(format!("{:?} {side}: {e}", c.address())),
            }
        }
    }

    let lemma_depth = depth.min(COHN_LEMMA_DEPTH);
    vec![
        valid,
        index,
        iso,
        parents,
        cohn::gct_star_check(k, l, lemma_depth),
        cohn::verify_trace_lemmas(k, l, lemma_depth, samples, seed),
    ]
}

/// Farey tree validity and address round trips, with children built by
/// `mediant`.
pub fn farey_suite_with<F>(depth: usize, mediant: F) -> Report
where
    F: Fn(&Fraction, &Fraction) -> Result<Fraction> + Copy,
{
    let mut report = Report::new("Farey tree");
    let mut level = vec![(TreeAddress::root(), FareyTriple::root())];
    for d in 0..=depth {
        let mut next = Vec::new();
        for (addr, t) in &level {
            report.check(t.is_valid(), || format!("{addr}: {t:?} is not a Farey triple"));
            if t.is_valid() {
                let back = fraction_to_address(&t.mid);
                report.check(back.as_ref() == Ok(addr), || format!("{addr}: {} maps to {back:?}", t.mid));
                let forward = address_to_fraction(addr);
                report.check(forward == Ok(t.mid), || format!("{addr} maps to {forward:?}"));
            }
            if d == depth {
                continue;
            }
            match farey_children_with(t, mediant) {
                Ok((l, r)) => {
                    next.push((addr.child(Side::L), l));
                    next.push((addr.child(Side::R), r));
                }
                Err(e) => report.fail(format!("{addr}: {e}")),
            }
        }
        level = next;
    }
    report
}

pub fn farey_suite(depth: usize) -> Report {
    farey_suite_with(depth, Fraction::mediant)
}

/// Characteristic numbers of LMT(k): both routes agree, the congruence,
/// `0 < u_t < m_t/(k+2)`, `u_t + k < m_t/2` and `m_r u_t = +-m_s (mod m_t)`.
pub fn labels_suite(k: u64, depth: usize) -> Report {
    let mut report = Report::new(format!("characteristic numbers k={k}"));
    let vertices = match farey::labelled_vertices(k, depth) {
        Ok(v) => v,
        Err(e) => {
            report.fail(e.to_string());
            return report;
        }
    };
    for v in &vertices {
        let (m_r, m_t, m_s) = (v.triple.a(), v.triple.b(), v.triple.c());
        let u = &v.u_t;
        let t = v.farey.mid;
        report.check(((u * u + k * u + 1u32) % m_t).is_zero(), || format!("{t}: congruence"));
        report.check(!u.is_zero() && u * (k + 2) < *m_t, || format!("{t}: u_t >= m_t/(k+2)"));
        report.check((u + k) * 2u32 < *m_t, || format!("{t}: u_t + k >= m_t/2"));
        let lhs = (m_r * u) % m_t;
        let s = m_s % m_t;
        let neg = (m_t - &s) % m_t;
        report.check(lhs == s || lhs == neg, || format!("{t}: m_r u_t != +-m_s"));
    }
    report
}

/// Bound on primes for the arithmetic consistency checks.
pub const PRIME_CHECK_BOUND: u32 = 1000;

/// Empirical uniqueness on LMT(k), plus consistency of the per-prime
/// conditions: a large prime never divides `k^2 - 4`, and for an odd prime
/// `p` dividing `k^2 - 4` with `p^2` dividing neither `k/2 +- 1` (even `k`)
/// nor `k +- 2` (odd `k`), `p^2` divides no enumerated Markov number.
pub fn criterion_suite(k: u64, depth: usize, budget: Budget) -> Result<Vec<Report>> {
    let empirical = uniqueness_empirical(k, depth, budget)?;
    let mut uniq = Report::new(format!("uniqueness k={k} depth={depth}"));
    uniq.checked = empirical.distinct_maxima;
    for b in &empirical.duplicate_maxima {
        uniq.fail(format!("maximum {b} reached by distinct triples"));
    }
    for b in &empirical.duplicate_labels {
        uniq.fail(format!("m_t = {b} for distinct fractions"));
    }
    for v in &empirical.violations {
        uniq.fail(v.clone());
    }

    let mut large = Report::new(format!("large primes k={k}"));
    let mut divisors = Report::new(format!("p^2 condition k={k}"));
    let disc = k as i128 * k as i128 - 4;
    let primes: Vec<u64> = primes_below(PRIME_CHECK_BOUND)
        .into_iter()
        .filter(|&p| p > 2)
        .map(u64::from)
        .collect();
    let threshold = match k {
        _ if k >= 4 && k.is_even() => Some(k / 2 + 1),
        _ if k.is_odd() => Some(k + 2),
        _ => None,
    };
    if let Some(threshold) = threshold {
        for &p in primes.iter().filter(|&&p| p > threshold) {
            large.check(disc % p as i128 != 0, || format!("{p} divides k^2 - 4"));
        }
    }

    let markov: Vec<BigUint> = markov_tree::enumerate_levels(k, depth, TreeKind::Left)
        .into_iter()
        .flatten()
        .flat_map(|t| entries_of(&t))
        .collect();
    let pair = match k {
        _ if k >= 4 && k.is_even() => Some((k / 2 + 1, k / 2 - 1)),
        _ if k.is_odd() => Some((k + 2, k.abs_diff(2))),
        _ => None,
    };
    if let Some((u, v)) = pair {
        for &p in &primes {
            let p2 = p * p;
            if disc % p as i128 != 0 || u % p2 == 0 || v % p2 == 0 {
                continue;
            }
            let hit = markov.iter().find(|m| (*m % p2).is_zero());
            divisors.check(hit.is_none(), || format!("{p}^2 divides Markov number {}", hit.unwrap()));
        }
    }
    Ok(vec![uniq, large, divisors])
}

/// The trace identity on `samples` random triples of unimodular matrices,
/// plus `A = B = C = I`.
pub fn identity_suite(samples: usize, seed: u64) -> Report {
    let mut report = Report::new("trace identity");
    let id = Mat2::identity();
    report.check(trace_identity_check(&id, &id, &id), || "A = B = C = I".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = random_unimodular(&mut rng, 40);
        let b = random_unimodular(&mut rng, 40);
        let c = random_unimodular(&mut rng, 40);
        report.check(trace_identity_check(&a, &b, &c), || format!("{a}, {b}, {c}"));
    }
    report
}
