//! Corpus generators shared by the acceptance and property suites.
#![allow(dead_code)]

use contraction_kit::circuit::{Circuit, CircuitBuilder, Wire};
use contraction_kit::{int, rat, BanachInstance, ClsLocalInstance, FiniteSelfMap, Rational};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---- finite self-maps ----

/// Random convergent self-map on `n` points with a random rational metric.
///
/// Points are visited in a shuffled order; the first is `x*` and every later
/// point maps to a uniformly chosen earlier one, so all orbits reach `x*`
/// within `n` steps. Even seeds get a shortest-path metric over random
/// weights `k/8`, odd seeds the ℓ1 metric of distinct coordinates `k/4`.
pub fn random_self_map(rng: &mut ChaCha8Rng, n: usize, graph_metric: bool) -> FiniteSelfMap {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut map = vec![0; n];
    map[order[0]] = order[0];
    for i in 1..n {
        map[order[i]] = order[rng.random_range(0..i)];
    }
    let distance = if graph_metric {
        let mut d = vec![vec![int(0); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let w = rat(rng.random_range(1..=16), 8);
                d[i][j] = w.clone();
                d[j][i] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = &d[i][k] + &d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    } else {
        let dims = rng.random_range(1..=3);
        let mut coords: Vec<Vec<i64>> = Vec::new();
        while coords.len() < n {
            let c: Vec<i64> = (0..dims).map(|_| rng.random_range(0..=8)).collect();
            if !coords.contains(&c) {
                coords.push(c);
            }
        }
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s: i64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).abs()).sum();
                        rat(s, 4)
                    })
                    .collect()
            })
            .collect()
    };
    FiniteSelfMap::from_parts(distance, map, order[0]).expect("generator yields valid self-maps")
}

/// Fifty maps of two to twelve points.
pub fn self_map_corpus(rng: &mut ChaCha8Rng) -> Vec<FiniteSelfMap> {
    (0..50)
        .map(|i| {
            let n = rng.random_range(2..=12);
            random_self_map(rng, n, i % 2 == 0)
        })
        .collect()
}

pub fn factors() -> [Rational; 3] {
    [rat(1, 4), rat(1, 2), rat(9, 10)]
}

pub fn radii() -> [Rational; 2] {
    [rat(1, 8), rat(1, 2)]
}

// ---- circuits on the cube ----

fn map3(per_coord: impl Fn(&mut CircuitBuilder, &[Wire], usize) -> Wire) -> Circuit {
    let mut b = CircuitBuilder::new();
    let x = b.inputs(3);
    let out: Vec<Wire> = (0..3).map(|i| per_coord(&mut b, &x, i)).collect();
    b.finish(&out).unwrap()
}

fn scalar3(body: impl Fn(&mut CircuitBuilder, &[Wire]) -> Wire) -> Circuit {
    let mut b = CircuitBuilder::new();
    let x = b.inputs(3);
    let out = body(&mut b, &x);
    b.finish(&[out]).unwrap()
}

pub fn identity() -> Circuit {
    map3(|_, x, i| x[i])
}

/// `x ↦ (x + a)/2`, fixed point `a`.
pub fn toward(a: [Rational; 3]) -> Circuit {
    map3(|b, x, i| {
        let k = b.constant(a[i].clone());
        let s = b.add(x[i], k);
        b.scale(s, rat(1, 2))
    })
}

/// `x ↦ s·x + (1 − s)·a` coordinatewise.
pub fn affine(s: Rational, a: [Rational; 3]) -> Circuit {
    map3(|b, x, i| {
        let scaled = b.scale(x[i], s.clone());
        let k = b.constant((int(1) - &s) * &a[i]);
        b.add(scaled, k)
    })
}

pub fn reflect() -> Circuit {
    map3(|b, x, i| {
        let one = b.constant(int(1));
        b.sub(one, x[i])
    })
}

pub fn rotate() -> Circuit {
    map3(|_, x, i| x[(i + 1) % 3])
}

pub fn shift_up(step: Rational) -> Circuit {
    map3(|b, x, i| {
        let k = b.constant(step.clone());
        let s = b.add(x[i], k);
        let one = b.constant(int(1));
        b.min(s, one)
    })
}

/// `x ↦ min(2x, 1)`: expanding, 2-Lipschitz.
pub fn doubling() -> Circuit {
    map3(|b, x, i| {
        let s = b.scale(x[i], int(2));
        let one = b.constant(int(1));
        b.min(s, one)
    })
}

/// `x ↦ max(x, 1/2)` on the first coordinate, halving on the rest.
pub fn floor_half() -> Circuit {
    map3(|b, x, i| {
        if i == 0 {
            let h = b.constant(rat(1, 2));
            b.max(x[0], h)
        } else {
            b.scale(x[i], rat(1, 2))
        }
    })
}

pub fn mean_potential() -> Circuit {
    scalar3(|b, x| {
        let s = b.add(x[0], x[1]);
        let s = b.add(s, x[2]);
        b.scale(s, rat(1, 3))
    })
}

pub fn first_coord() -> Circuit {
    scalar3(|_, x| x[0])
}

pub fn anti_mean_potential() -> Circuit {
    scalar3(|b, x| {
        let s = b.add(x[0], x[1]);
        let s = b.add(s, x[2]);
        let m = b.scale(s, rat(1, 3));
        let one = b.constant(int(1));
        b.sub(one, m)
    })
}

pub fn max_potential() -> Circuit {
    scalar3(|b, x| {
        let m = b.max(x[0], x[1]);
        b.max(m, x[2])
    })
}

/// `|x₀ − 1/2| + |x₁ − 1/2|`, capped at 1.
pub fn centre_potential() -> Circuit {
    scalar3(|b, x| {
        let h = b.constant(rat(1, 2));
        let a = b.sub(x[0], h);
        let a = b.abs(a);
        let c = b.sub(x[1], h);
        let c = b.abs(c);
        let s = b.add(a, c);
        let one = b.constant(int(1));
        b.min(s, one)
    })
}

pub fn zero_potential() -> Circuit {
    scalar3(|b, _| b.constant(int(0)))
}

/// `min(1, 4x₀)`: steep, 4-Lipschitz.
pub fn steep_potential() -> Circuit {
    scalar3(|b, x| {
        let s = b.scale(x[0], int(4));
        let one = b.constant(int(1));
        b.min(s, one)
    })
}

fn distance6(body: impl Fn(&mut CircuitBuilder, &[Wire], &[Wire]) -> Wire) -> Circuit {
    let mut b = CircuitBuilder::new();
    let v = b.inputs(6);
    let out = body(&mut b, &v[..3], &v[3..]);
    b.finish(&[out]).unwrap()
}

pub fn l1_distance() -> Circuit {
    distance6(|b, x, y| {
        let mut acc = b.constant(int(0));
        for i in 0..3 {
            let d = b.sub(x[i], y[i]);
            let a = b.abs(d);
            acc = b.add(acc, a);
        }
        acc
    })
}

pub fn linf_distance() -> Circuit {
    distance6(|b, x, y| {
        let mut acc = b.constant(int(0));
        for i in 0..3 {
            let d = b.sub(x[i], y[i]);
            let a = b.abs(d);
            acc = b.max(acc, a);
        }
        acc
    })
}

/// `(ℓ1)²`: not a metric, the triangle inequality fails.
pub fn squared_l1_distance() -> Circuit {
    let l1 = l1_distance();
    distance6(|b, x, y| {
        let args: Vec<Wire> = x.iter().chain(y).copied().collect();
        let d = b.embed(&l1, &args).unwrap()[0];
        b.mul(d, d)
    })
}

fn g(k: i64) -> Rational {
    rat(k, 16)
}

/// Twenty CLS-Local instances over piecewise-linear circuits.
pub fn cls_local_instances() -> Vec<ClsLocalInstance> {
    let e = |n, d| rat(n, d);
    let specs: Vec<(Circuit, Circuit, Rational, Rational)> = vec![
        (toward([int(0), int(0), int(0)]), mean_potential(), e(1, 4), int(1)),
        (toward([int(0), int(0), int(0)]), first_coord(), e(1, 8), int(1)),
        (toward([g(8), g(8), g(8)]), centre_potential(), e(1, 4), int(2)),
        (toward([int(0), int(0), int(0)]), anti_mean_potential(), e(1, 4), int(1)),
        (toward([int(0), int(0), int(0)]), max_potential(), e(1, 5), int(1)),
        (identity(), mean_potential(), e(1, 4), int(1)),
        (identity(), zero_potential(), e(1, 8), int(1)),
        (reflect(), mean_potential(), e(1, 4), int(1)),
        (reflect(), centre_potential(), e(1, 8), int(2)),
        (rotate(), max_potential(), e(1, 4), int(1)),
        (rotate(), first_coord(), e(1, 4), int(1)),
        (shift_up(g(2)), anti_mean_potential(), e(1, 4), int(1)),
        (shift_up(g(2)), mean_potential(), e(1, 8), int(1)),
        (doubling(), mean_potential(), e(1, 4), int(1)),
        (doubling(), first_coord(), e(1, 4), int(2)),
        (floor_half(), first_coord(), e(1, 4), int(1)),
        (floor_half(), steep_potential(), e(1, 4), int(1)),
        (affine(rat(3, 4), [g(4), g(12), g(0)]), centre_potential(), e(1, 4), int(2)),
        (affine(rat(1, 4), [g(16), g(16), g(16)]), anti_mean_potential(), e(1, 5), int(1)),
        (toward([g(16), g(0), g(8)]), steep_potential(), e(1, 4), int(1)),
    ];
    specs
        .into_iter()
        .map(|(f, p, eps, lambda)| ClsLocalInstance::new(f, p, eps, lambda).unwrap())
        .collect()
}

/// Twenty Banach instances: contractions with grid-aligned and off-grid
/// fixed points, non-contracting maps, and a non-metric `d` without the
/// metric promise.
pub fn banach_instances() -> Vec<BanachInstance> {
    let third = rat(1, 3);
    let specs: Vec<(Circuit, Circuit, Rational, Rational, Rational, bool)> = vec![
        (toward([int(0), int(0), int(0)]), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (toward([g(8), g(8), g(8)]), l1_distance(), rat(1, 8), int(1), rat(1, 2), true),
        (toward([g(4), g(12), g(16)]), linf_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (toward([third.clone(), third.clone(), third.clone()]), l1_distance(), rat(1, 2), int(1), rat(1, 2), true),
        (toward([third.clone(), g(0), third.clone()]), linf_distance(), rat(1, 2), int(1), rat(1, 2), true),
        (affine(rat(3, 4), [g(8), g(8), g(8)]), l1_distance(), rat(1, 4), int(1), rat(3, 4), true),
        (affine(rat(3, 4), [g(8), g(8), g(8)]), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (affine(rat(9, 10), [g(2), g(6), g(10)]), linf_distance(), rat(1, 4), int(1), rat(9, 10), true),
        (affine(rat(1, 4), [g(16), g(0), g(16)]), l1_distance(), rat(1, 8), int(1), rat(1, 4), true),
        (reflect(), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (reflect(), linf_distance(), rat(1, 8), int(1), rat(9, 10), true),
        (rotate(), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (identity(), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (shift_up(g(1)), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (doubling(), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (doubling(), linf_distance(), rat(1, 4), int(2), rat(1, 2), true),
        (floor_half(), l1_distance(), rat(1, 4), int(1), rat(1, 2), true),
        (toward([int(0), int(0), int(0)]), squared_l1_distance(), rat(1, 16), int(1), rat(1, 2), false),
        (reflect(), squared_l1_distance(), rat(1, 16), int(1), rat(1, 2), false),
        (rotate(), squared_l1_distance(), rat(1, 16), int(1), rat(1, 2), false),
    ];
    specs
        .into_iter()
        .map(|(f, d, eps, lambda, c, promised)| BanachInstance::new(f, d, eps, lambda, c, promised).unwrap())
        .collect()
}

// ---- spectral systems ----

/// `A = Q diag(λ) Qᵀ` with `λ₁ = 1` and the rest in `[−0.85, 0.85]`,
/// arranged so `λ₂ ≥ |λₙ|`. Returns `A`, the descending eigenvalues and
/// the matching columns of `Q`.
pub fn random_spectral(rng: &mut ChaCha8Rng, n: usize) -> (DMatrix<f64>, Vec<f64>, Vec<DVector<f64>>) {
    let raw = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let q = raw.qr().q();
    let mut rest: Vec<f64> = (1..n).map(|_| rng.random_range(-0.85..0.85)).collect();
    rest.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if rest.last().unwrap().abs() > rest[0] {
        for v in &mut rest {
            *v = -*v;
        }
        rest.reverse();
    }
    let mut lambdas = vec![1.0];
    lambdas.extend(rest);
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(lambdas.clone())) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let vecs = (0..n).map(|i| q.column(i).into_owned()).collect();
    (a, lambdas, vecs)
}

/// Unit vector uniform in direction within the cube, kept away from `v₁⊥`.
pub fn random_unit(rng: &mut ChaCha8Rng, v1: &DVector<f64>) -> DVector<f64> {
    loop {
        let x = DVector::from_fn(v1.len(), |_, _| rng.random_range(-1.0..1.0));
        if x.norm() < 1e-3 {
            continue;
        }
        let x = x.normalize();
        if x.dot(v1).abs() >= 1e-6 {
            return x;
        }
    }
}
