//! Contraction metric synthesis on finite spaces.
//!
//! Given a self-map `f` of a finite metric space whose orbits all reach the
//! unique fixed point `x*`, build a metric `d_c` under which `f` contracts by
//! `c`, while keeping `d_c(x, y) <= ε` tied to `d`-closeness:
//!
//! 1. `d_M(x, y) = max_i d(f^i x, f^i y)`, the orbit metric (`f` non-expanding);
//! 2. an invariant neighbourhood `W = K_0` of `x*` with `diam W <= ε`, levels
//!    `n(x)` and `ρ_c = c^min(n(x), n(y)) · d_M`;
//! 3. `d_c` is the shortest-chain closure of `ρ_c`.
//!
//! Every step is exact, and [`synthesize`] certifies the result exhaustively.

mod format;

pub use format::{parse_finite_map, print_finite_map, FormatError};

use crate::metrics::{check_table_axioms, IndexViolation};
use crate::rational::{pow, Fraction, Rational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Matrix = Vec<Vec<Rational>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FiniteMapError {
    #[error("a finite map needs at least one point")]
    Empty,
    #[error("distance matrix is not {0}x{0}")]
    Shape(usize),
    #[error("map has {got} entries for {expected} points")]
    MapLength { expected: usize, got: usize },
    #[error("map sends {from} to out-of-range index {to}")]
    MapRange { from: usize, to: usize },
    #[error("fixed point index {0} is out of range")]
    FixedRange(usize),
    #[error("declared fixed point {0} is not fixed")]
    NotFixed(usize),
    #[error("second fixed point {0}")]
    ExtraFixedPoint(usize),
    #[error("orbit of {0} does not reach the fixed point")]
    NotConvergent(usize),
    #[error("base distance is not a metric: {0}")]
    NotMetric(IndexViolation),
}

/// A self-map of a finite metric space with a globally attracting fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSelfMap {
    labels: Vec<String>,
    coords: Vec<Vec<Rational>>,
    distance: Matrix,
    map: Vec<usize>,
    fixed: usize,
}

impl FiniteSelfMap {
    pub fn new(
        labels: Vec<String>,
        coords: Vec<Vec<Rational>>,
        distance: Matrix,
        map: Vec<usize>,
        fixed: usize,
    ) -> Result<Self, FiniteMapError> {
        let n = distance.len();
        if n == 0 {
            return Err(FiniteMapError::Empty);
        }
        if distance.iter().any(|row| row.len() != n) || labels.len() != n || coords.len() != n {
            return Err(FiniteMapError::Shape(n));
        }
        if map.len() != n {
            return Err(FiniteMapError::MapLength {
                expected: n,
                got: map.len(),
            });
        }
        if let Some((from, &to)) = map.iter().enumerate().find(|(_, &t)| t >= n) {
            return Err(FiniteMapError::MapRange { from, to });
        }
        if fixed >= n {
            return Err(FiniteMapError::FixedRange(fixed));
        }
        if map[fixed] != fixed {
            return Err(FiniteMapError::NotFixed(fixed));
        }
        if let Some(other) = (0..n).find(|&i| i != fixed && map[i] == i) {
            return Err(FiniteMapError::ExtraFixedPoint(other));
        }
        for start in 0..n {
            let mut x = start;
            for _ in 0..n {
                x = map[x];
            }
            if x != fixed {
                return Err(FiniteMapError::NotConvergent(start));
            }
        }
        if let Some(v) = check_table_axioms(&distance, |i, j| i == j) {
            return Err(FiniteMapError::NotMetric(v));
        }
        Ok(FiniteSelfMap {
            labels,
            coords,
            distance,
            map,
            fixed,
        })
    }

    /// Unlabelled instance with default labels `p0, p1, ..` and no coordinates.
    pub fn from_parts(distance: Matrix, map: Vec<usize>, fixed: usize) -> Result<Self, FiniteMapError> {
        let n = distance.len();
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        FiniteSelfMap::new(labels, vec![Vec::new(); n], distance, map, fixed)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> &[Vec<Rational>] {
        &self.coords
    }

    pub fn distance(&self) -> &Matrix {
        &self.distance
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn fixed_point(&self) -> usize {
        self.fixed
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `iterates[i][x] = f^i(x)` for `i = 0..=n`; row `n` is constant `x*`.
    pub fn iterates(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![(0..self.len()).collect::<Vec<_>>()];
        for _ in 0..self.len() {
            let prev = rows.last().expect("nonempty");
            let next = prev.iter().map(|&x| self.map[x]).collect();
            rows.push(next);
        }
        rows
    }

    pub fn diameter(&self, set: &[usize]) -> Rational {
        let mut diam = Rational::zero();
        for &i in set {
            for &j in set {
                if self.distance[i][j] > diam {
                    diam = self.distance[i][j].clone();
                }
            }
        }
        diam
    }
}

/// `n(x)`: depth inside the nested images of `W`, `Infinite` only at `x*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(n) => write!(f, "{n}"),
            Level::Infinite => f.write_str("inf"),
        }
    }
}

fn ball(m: &FiniteSelfMap, radius: &Rational) -> Vec<usize> {
    (0..m.len())
        .filter(|&i| &m.distance[m.fixed][i] <= radius)
        .collect()
}

/// Largest ball around `x*` whose diameter is at most `eps`. It always
/// contains the `eps/2` ball, so small-diameter invariance carries over.
fn base_ball(m: &FiniteSelfMap, eps: &Rational) -> Vec<usize> {
    let mut radii: Vec<&Rational> = m.distance[m.fixed].iter().collect();
    radii.sort();
    radii.dedup();
    let mut best = vec![m.fixed];
    for r in radii {
        let candidate = ball(m, r);
        if &m.diameter(&candidate) <= eps {
            best = candidate;
        } else {
            break;
        }
    }
    best
}

/// `W = ∩_{j<k} f^{-j}(U)` with `k` the first exponent such that
/// `f^k(U) ⊆ U`. `W` contains `x*`, is `f`-invariant and has diameter `<= eps`.
pub fn find_invariant_neighborhood(m: &FiniteSelfMap, eps: &Rational) -> Vec<usize> {
    let n = m.len();
    let u = base_ball(m, eps);
    let mut in_u = vec![false; n];
    for &i in &u {
        in_u[i] = true;
    }
    let iterates = m.iterates();
    let k = (1..=n)
        .find(|&k| u.iter().all(|&x| in_u[iterates[k][x]]))
        .expect("f^n(U) = {x*} lies in U");
    let w: Vec<usize> = u
        .iter()
        .copied()
        .filter(|&x| (0..k).all(|j| in_u[iterates[j][x]]))
        .collect();
    let invariant = w.iter().all(|&x| w.contains(&m.map[x]));
    if invariant && &m.diameter(&w) <= eps {
        w
    } else {
        vec![m.fixed]
    }
}

/// `d_M(x, y) = max_i d(f^i x, f^i y)`.
pub fn compute_orbit_metric(m: &FiniteSelfMap) -> Matrix {
    let iterates = m.iterates();
    let n = m.len();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    iterates
                        .iter()
                        .map(|row| &m.distance[row[x]][row[y]])
                        .max()
                        .expect("at least one iterate")
                        .clone()
                })
                .collect()
        })
        .collect()
}

/// Levels and the sets `K_n`, keyed by `n`. Non-negative keys hold
/// `f^n(W)` until it collapses to `{x*}`; negative keys hold `f^{-|n|}(W)`
/// down to the deepest level present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Levels {
    pub levels: Vec<Level>,
    pub k_sets: BTreeMap<i64, Vec<usize>>,
}

pub fn compute_levels(m: &FiniteSelfMap, w: &[usize]) -> Levels {
    let n = m.len();
    let iterates = m.iterates();
    let mut in_w = vec![false; n];
    for &x in w {
        in_w[x] = true;
    }
    let mut k_sets = BTreeMap::new();
    let mut levels = vec![Level::Finite(0); n];
    levels[m.fixed] = Level::Infinite;

    let mut current: Vec<usize> = w.to_vec();
    current.sort_unstable();
    let mut depth = 0i64;
    loop {
        for &x in &current {
            if x != m.fixed {
                levels[x] = Level::Finite(depth);
            }
        }
        k_sets.insert(depth, current.clone());
        if current == [m.fixed] {
            break;
        }
        let mut next: Vec<usize> = current.iter().map(|&x| m.map[x]).collect();
        next.sort_unstable();
        next.dedup();
        current = next;
        depth += 1;
    }

    let mut deepest = 0;
    for x in 0..n {
        if in_w[x] {
            continue;
        }
        let steps = (1..=n)
            .find(|&s| in_w[iterates[s][x]])
            .expect("every orbit reaches x* inside W") as i64;
        levels[x] = Level::Finite(-steps);
        deepest = deepest.max(steps);
    }
    for s in 1..=deepest {
        let members = (0..n).filter(|&x| in_w[iterates[s as usize][x]]).collect();
        k_sets.insert(-s, members);
    }
    Levels { levels, k_sets }
}

/// `ρ_c(x, y) = c^min(n(x), n(y)) · d_M(x, y)`.
pub fn compute_rho(d_m: &Matrix, levels: &[Level], c: &Rational) -> Matrix {
    let n = d_m.len();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| match levels[x].min(levels[y]) {
                    Level::Finite(k) => pow(c, k) * &d_m[x][y],
                    Level::Infinite => Rational::zero(),
                })
                .collect()
        })
        .collect()
}

/// All-pairs shortest chains over the complete graph weighted by `rho`.
pub fn geodesic_closure(rho: &Matrix) -> Matrix {
    let mut d = rho.clone();
    let n = d.len();
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
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesizedMetric {
    pub c: Rational,
    pub eps: Rational,
    pub w: Vec<usize>,
    pub d_m: Matrix,
    pub levels: Levels,
    pub rho: Matrix,
    pub d_c: Matrix,
    pub certificate: Certificate,
}

/// Outcome of the exhaustive checks. `None` means the check passed; `Some`
/// holds the first failing indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub pairs_checked: usize,
    pub metric_axioms: Option<IndexViolation>,
    pub orbit_dominates_base: Option<(usize, usize)>,
    pub orbit_non_expanding: Option<(usize, usize)>,
    pub contraction: Option<(usize, usize)>,
    pub closeness_transfer: Option<(usize, usize)>,
    pub lower_bound: Option<(usize, usize)>,
    pub closure_idempotent: bool,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    fn first_failure(&self) -> Option<(&'static str, Vec<usize>)> {
        if let Some(v) = &self.metric_axioms {
            return Some(("metric axioms", v.indices.clone()));
        }
        let pairs = [
            ("d <= d_M", self.orbit_dominates_base),
            ("d_M non-expanding", self.orbit_non_expanding),
            ("contraction", self.contraction),
            ("closeness transfer", self.closeness_transfer),
            ("chain lower bound", self.lower_bound),
        ];
        for (name, failure) in pairs {
            if let Some((x, y)) = failure {
                return Some((name, vec![x, y]));
            }
        }
        (!self.closure_idempotent).then(|| ("closure idempotent", Vec::new()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("contraction factor {0} must lie strictly between 0 and 1")]
    Factor(Rational),
    #[error("epsilon must be positive, got {0}")]
    Eps(Rational),
    #[error("certificate check '{check}' failed at {witness:?}")]
    Certificate {
        check: &'static str,
        witness: Vec<usize>,
    },
}

fn first_pair(n: usize, bad: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| bad(x, y))
}

/// Runs every exhaustive check on a synthesized metric.
pub fn certify(m: &FiniteSelfMap, s: &SynthesizedMetric) -> Certificate {
    let n = m.len();
    let d = &m.distance;
    let f = &m.map;
    let xs = m.fixed;
    let two_eps = &s.eps + &s.eps;
    let outside_k0: Vec<bool> = (0..n).map(|x| !s.w.contains(&x)).collect();
    let dist_to_k0: Vec<Rational> = (0..n)
        .map(|x| {
            s.w.iter()
                .map(|&z| &s.d_m[x][z])
                .min()
                .expect("W contains x*")
                .clone()
        })
        .collect();

    Certificate {
        pairs_checked: n * n,
        metric_axioms: check_table_axioms(&s.d_c, |i, j| i == j),
        orbit_dominates_base: first_pair(n, |x, y| d[x][y] > s.d_m[x][y]),
        orbit_non_expanding: first_pair(n, |x, y| s.d_m[f[x]][f[y]] > s.d_m[x][y]),
        contraction: first_pair(n, |x, y| s.d_c[f[x]][f[y]] > &s.c * &s.d_c[x][y]),
        closeness_transfer: first_pair(n, |x, y| {
            s.d_c[x][y] <= s.eps
                && [&d[xs][x], &d[xs][y], &d[x][y]]
                    .into_iter()
                    .min()
                    .expect("three values")
                    > &two_eps
        }),
        lower_bound: first_pair(n, |x, y| {
            x != y
                && outside_k0[x]
                && outside_k0[y]
                && s.d_c[x][y] < s.d_m[x][y].clone().min(dist_to_k0[x].clone())
        }),
        closure_idempotent: geodesic_closure(&s.d_c) == s.d_c,
    }
}

/// Builds `d_{c,ε}` and certifies it; any failed check is an error.
pub fn synthesize(m: &FiniteSelfMap, c: &Rational, eps: &Rational) -> Result<SynthesizedMetric, SynthesisError> {
    if !c.is_positive() || c >= &Rational::one() {
        return Err(SynthesisError::Factor(c.clone()));
    }
    if !eps.is_positive() {
        return Err(SynthesisError::Eps(eps.clone()));
    }
    let w = find_invariant_neighborhood(m, eps);
    let d_m = compute_orbit_metric(m);
    let levels = compute_levels(m, &w);
    let rho = compute_rho(&d_m, &levels.levels, c);
    let d_c = geodesic_closure(&rho);
    let mut s = SynthesizedMetric {
        c: c.clone(),
        eps: eps.clone(),
        w,
        d_m,
        levels,
        rho,
        d_c,
        certificate: Certificate::default(),
    };
    s.certificate = certify(m, &s);
    if let Some((check, witness)) = s.certificate.first_failure() {
        return Err(SynthesisError::Certificate { check, witness });
    }
    Ok(s)
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.iter()
        .map(|row| row.iter().map(|v| Fraction(v).to_string()).collect())
        .collect()
}

fn pair_labels(m: &FiniteSelfMap, p: Option<(usize, usize)>) -> Option<[String; 2]> {
    p.map(|(x, y)| [m.labels[x].clone(), m.labels[y].clone()])
}

/// Serializable view of a synthesized metric, rationals written as `a/b`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SynthesisReport {
    pub c: String,
    pub eps: String,
    pub labels: Vec<String>,
    pub fixed_point: String,
    pub invariant_neighborhood: Vec<String>,
    pub levels: Vec<String>,
    pub k_sets: BTreeMap<i64, Vec<String>>,
    pub orbit_metric: Vec<Vec<String>>,
    pub rho: Vec<Vec<String>>,
    pub contraction_metric: Vec<Vec<String>>,
    pub certificate: CertificateReport,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub metric_axioms: Option<String>,
    pub orbit_dominates_base: Option<[String; 2]>,
    pub orbit_non_expanding: Option<[String; 2]>,
    pub contraction: Option<[String; 2]>,
    pub closeness_transfer: Option<[String; 2]>,
    pub chain_lower_bound: Option<[String; 2]>,
    pub closure_idempotent: bool,
}

impl SynthesizedMetric {
    pub fn report(&self, m: &FiniteSelfMap) -> SynthesisReport {
        let names = |set: &[usize]| set.iter().map(|&i| m.labels[i].clone()).collect::<Vec<_>>();
        let cert = &self.certificate;
        SynthesisReport {
            c: Fraction(&self.c).to_string(),
            eps: Fraction(&self.eps).to_string(),
            labels: m.labels.clone(),
            fixed_point: m.labels[m.fixed].clone(),
            invariant_neighborhood: names(&self.w),
            levels: self.levels.levels.iter().map(|l| l.to_string()).collect(),
            k_sets: self
                .levels
                .k_sets
                .iter()
                .map(|(k, set)| (*k, names(set)))
                .collect(),
            orbit_metric: matrix_strings(&self.d_m),
            rho: matrix_strings(&self.rho),
            contraction_metric: matrix_strings(&self.d_c),
            certificate: CertificateReport {
                passed: cert.passed(),
                pairs_checked: cert.pairs_checked,
                metric_axioms: cert.metric_axioms.as_ref().map(|v| v.to_string()),
                orbit_dominates_base: pair_labels(m, cert.orbit_dominates_base),
                orbit_non_expanding: pair_labels(m, cert.orbit_non_expanding),
                contraction: pair_labels(m, cert.contraction),
                closeness_transfer: pair_labels(m, cert.closeness_transfer),
                chain_lower_bound: pair_labels(m, cert.lower_bound),
                closure_idempotent: cert.closure_idempotent,
            },
        }
    }
}
