//! Brute-force search on the grid `{0, 1/r, .., 1}³`.
//!
//! Clauses are tried in a fixed priority order and each clause scans its
//! candidates in index order, so the returned solution is deterministic.
//! Pair candidates are `(x, f(x))` and axis neighbours `(x, x + e_i/r)`;
//! metric-Lipschitz quadruples are `(x, f(x), y, f(y))` over neighbouring
//! `x, y`. Every returned solution has been accepted by the verifier.

use super::{Instance, Solution, SolutionKind};
use crate::metrics::PointMap;
use crate::point::Point;
use crate::rational::{rat, Rational};
use rayon::prelude::*;

pub fn grid_points(resolution: u32) -> Vec<Point> {
    let r = resolution as i64;
    let coord = |i: i64| rat(i, r);
    let mut pts = Vec::with_capacity(((r + 1) * (r + 1) * (r + 1)) as usize);
    for a in 0..=r {
        for b in 0..=r {
            for c in 0..=r {
                pts.push(Point::new(coord(a), coord(b), coord(c)));
            }
        }
    }
    pts
}

#[derive(Debug, Clone)]
pub struct GridSolver {
    pub resolution: u32,
    points: Vec<Point>,
}

impl GridSolver {
    pub fn new(resolution: u32) -> Self {
        assert!(resolution >= 1, "grid resolution must be positive");
        GridSolver {
            resolution,
            points: grid_points(resolution),
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn neighbours(&self, x: &Point) -> Vec<Point> {
        let step = rat(1, self.resolution as i64);
        (0..3)
            .filter_map(|i| {
                let mut y = x.clone();
                y.0[i] = &y.0[i] + &step;
                y.in_unit_cube().then_some(y)
            })
            .collect()
    }

    fn pairs(&self, images: &[Point]) -> Vec<(Point, Point)> {
        let mut out = Vec::new();
        for (x, fx) in self.points.iter().zip(images) {
            if fx != x && fx.in_unit_cube() {
                out.push((x.clone(), fx.clone()));
            }
            for y in self.neighbours(x) {
                out.push((x.clone(), y));
            }
        }
        out
    }

    fn first<T: Sync>(
        instance: &Instance,
        candidates: &[T],
        kind: SolutionKind,
        witnesses: impl Fn(&T) -> Option<Vec<Point>> + Sync,
    ) -> Option<Solution> {
        candidates.par_iter().find_map_first(|cand| {
            let sol = Solution::new(kind, witnesses(cand)?);
            instance.verify(&sol).accepted().then_some(sol)
        })
    }

    pub fn solve(&self, instance: &Instance) -> Option<Solution> {
        use SolutionKind::*;
        let f: &dyn PointMap = match instance {
            Instance::ClsLocal(i) => &i.f,
            Instance::Banach(i) => &i.f,
            Instance::ContractionMap(i) => &i.f,
        };
        let images: Vec<Point> = self.points.par_iter().map(|x| f.apply(x)).collect();
        let single = |x: &Point| Some(vec![x.clone()]);
        let pair = |(x, y): &(Point, Point)| Some(vec![x.clone(), y.clone()]);
        let (point_kind, pair_kinds): (SolutionKind, &[SolutionKind]) = match instance {
            Instance::ClsLocal(_) => (CO1, &[CO2, CO3]),
            Instance::Banach(_) => (Oa, &[Ob, Oc]),
            Instance::ContractionMap(_) => (Oa, &[Ob, Oc]),
        };
        if let Some(s) = Self::first(instance, &self.points, point_kind, single) {
            return Some(s);
        }
        let pairs = self.pairs(&images);
        for &kind in pair_kinds {
            if let Some(s) = Self::first(instance, &pairs, kind, pair) {
                return Some(s);
            }
        }
        let Instance::Banach(banach) = instance else {
            return None;
        };

        let index_of = |p: &Point| -> Option<usize> {
            let r = self.resolution as i64;
            let mut idx = 0usize;
            for c in &p.0 {
                let scaled = c * Rational::from_integer(r.into());
                if !scaled.is_integer() {
                    return None;
                }
                let v: i64 = scaled.to_integer().try_into().ok()?;
                idx = idx * (r as usize + 1) + v as usize;
            }
            Some(idx)
        };
        let quads: Vec<(usize, usize)> = (0..self.points.len())
            .flat_map(|i| {
                self.neighbours(&self.points[i])
                    .into_iter()
                    .filter_map(|y| index_of(&y))
                    .map(move |j| (i, j))
                    .collect::<Vec<_>>()
            })
            .collect();
        let od = |&(i, j): &(usize, usize)| {
            let (x, y) = (&self.points[i], &self.points[j]);
            let (fx, fy) = (&images[i], &images[j]);
            (fx.in_unit_cube() && fy.in_unit_cube() && fx != x && fy != y)
                .then(|| vec![x.clone(), fx.clone(), y.clone(), fy.clone()])
        };
        if let Some(s) = Self::first(instance, &quads, Od, od) {
            return Some(s);
        }
        if banach.metric_promised {
            return None;
        }
        if let Some(s) = Self::first(instance, &self.points, Oe, single) {
            return Some(s);
        }
        if let Some(s) = Self::first(instance, &pairs, Oe, pair) {
            return Some(s);
        }
        let triples: Vec<(usize, Point)> = (0..self.points.len())
            .flat_map(|i| self.neighbours(&self.points[i]).into_iter().map(move |y| (i, y)))
            .collect();
        Self::first(instance, &triples, Oe, |(i, y)| {
            let fx = &images[*i];
            fx.in_unit_cube()
                .then(|| vec![self.points[*i].clone(), y.clone(), fx.clone()])
        })
    }
}

/// Grid search at `resolution`, see [`GridSolver`].
pub fn solve_grid(instance: &Instance, resolution: u32) -> Option<Solution> {
    GridSolver::new(resolution).solve(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, CircuitBuilder};
    use crate::cls::{BanachInstance, ClsLocalInstance};
    use crate::rational::int;

    #[test]
    fn grid_has_expected_size() {
        assert_eq!(grid_points(16).len(), 17 * 17 * 17);
        assert_eq!(grid_points(1).len(), 8);
    }

    #[test]
    fn finds_an_approximate_fixed_point() {
        // f(x) = 1 - x per coordinate, fixed point at (1/2, 1/2, 1/2)
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let one = b.constant(int(1));
        let out: Vec<_> = x.iter().map(|&v| b.sub(one, v)).collect();
        let f = b.finish(&out).unwrap();
        let d = parse_circuit(
            "input 0\ninput 1\ninput 2\ninput 3\ninput 4\ninput 5\n\
             n6: sub n0 n3\nn7: sub n1 n4\nn8: sub n2 n5\nn9: const 0\nn10: sub n9 n6\n\
             n11: sub n9 n7\nn12: sub n9 n8\nn13: max n6 n10\nn14: max n7 n11\nn15: max n8 n12\n\
             n16: add n13 n14\nn17: add n16 n15\noutputs: n17",
        )
        .unwrap();
        let inst = Instance::Banach(BanachInstance::new(f, d, rat(1, 100), int(1), rat(1, 2), true).unwrap());
        let sol = solve_grid(&inst, 4).unwrap();
        assert_eq!(sol.kind, SolutionKind::Oa);
        assert_eq!(sol.witnesses[0], Point::new(rat(1, 2), rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn cls_local_prefers_single_points() {
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let f = b.finish(&x).unwrap();
        let mut b = CircuitBuilder::new();
        let x = b.inputs(3);
        let p = b.finish(&[x[0]]).unwrap();
        let inst = Instance::ClsLocal(ClsLocalInstance::new(f, p, rat(1, 10), int(1)).unwrap());
        let sol = solve_grid(&inst, 2).unwrap();
        assert_eq!(sol.kind, SolutionKind::CO1);
        assert_eq!(sol.witnesses[0], Point::origin());
    }
}
